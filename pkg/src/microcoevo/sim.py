"""Deterministic fixed-timestep skirmish simulation between two sides.

One tick is one frame; all speeds and cooldowns are per frame. Within a
frame every live unit decides from the same frame-start snapshot, then all
attacks resolve simultaneously, then movement applies, then the dead leave
the roster. Identical (config, genomes, seed) always reproduces the fight
bit-exactly, whatever worker schedule runs it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .controller import APPROACH, EnemyView, FriendView, decide_action
from .errors import ConfigurationError, SimulationError
from .movement import side_repulsion
from .formations import FormationSpec, generate_formation
from .genome import MicroGenome
from .influence import GridSpec, NoTargetError, build_influence_grid, influence_patch, select_target_cell
from .units import DEFAULT_SCORE_WEIGHTS, ScoreWeights, UnitTypeSpec

RED = "red"
BLUE = "blue"
DRAW = "draw"
SIDES = (RED, BLUE)


def opposite(side: str) -> str:
    return BLUE if side == RED else RED


@dataclass(slots=True, eq=False)
class UnitState:
    unit_id: int
    side: str
    type_spec: UnitTypeSpec
    x: float
    y: float
    hitpoints: float
    cooldown_remaining: int = 0
    behavior_mode: str = APPROACH
    kite_armed: bool = False
    frames_since_fire: int = 0
    waypoint_x: float = 0.0
    waypoint_y: float = 0.0
    ctl: object = None  # SideTypeControl, wired at spawn


class SideTypeControl:
    """Per (side, unit type) controller context: decoded parameters, cached
    unit statistics, the influence patch, and the current attack location."""

    __slots__ = (
        "side",
        "params",
        "spec",
        "move_speed",
        "attack_range2",
        "attack_damage",
        "attack_cooldown",
        "map_width",
        "map_height",
        "patch",
        "wait_cap",
        "target_x",
        "target_y",
    )

    def __init__(self, side: str, params: MicroGenome, spec: UnitTypeSpec,
                 map_width: float, map_height: float):
        self.side = side
        self.params = params
        self.spec = spec
        self.move_speed = spec.move_speed
        self.attack_range2 = spec.attack_range * spec.attack_range
        self.attack_damage = spec.attack_damage
        self.attack_cooldown = spec.attack_cooldown
        self.map_width = map_width
        self.map_height = map_height
        self.patch = influence_patch(params.influence_weight, params.influence_range)
        self.wait_cap = max(0, math.ceil(params.kite_hold_frames))
        self.target_x = map_width / 2.0
        self.target_y = map_height / 2.0


@dataclass(frozen=True)
class SkirmishConfig:
    """Everything needed to reproduce one skirmish except the genomes."""

    red_roster: tuple[tuple[UnitTypeSpec, int], ...]
    blue_roster: tuple[tuple[UnitTypeSpec, int], ...]
    formation: FormationSpec = FormationSpec()
    rng_seed: int = 0
    map_width: float = 2048.0
    map_height: float = 2048.0
    max_frames: int = 2500
    score_weights: Optional[dict[str, dict[str, ScoreWeights]]] = None
    normalize_damage: bool = False
    im_cell_size: float = 32.0
    im_refresh_interval: int = 8

    def __post_init__(self):
        if self.max_frames < 0:
            raise ConfigurationError(f"max_frames must be >= 0, got {self.max_frames}")
        if self.im_refresh_interval < 1:
            raise ConfigurationError("im_refresh_interval must be >= 1")
        if self.map_width <= 0 or self.map_height <= 0:
            raise ConfigurationError("map dimensions must be positive")
        for side, roster in ((RED, self.red_roster), (BLUE, self.blue_roster)):
            if not roster:
                raise ConfigurationError(f"{side} roster is empty")
            for spec, count in roster:
                if count < 1:
                    raise ConfigurationError(f"{side} roster has non-positive count for {spec.name}")

    def roster(self, side: str):
        return self.red_roster if side == RED else self.blue_roster

    def weights_for(self, side: str) -> dict[str, ScoreWeights]:
        if self.score_weights is not None:
            return self.score_weights[side]
        return DEFAULT_SCORE_WEIGHTS


@dataclass(frozen=True)
class SkirmishResult:
    score_red: float
    score_blue: float
    survivors_red: int
    survivors_blue: int
    remaining_hitpoints: dict[str, dict[str, float]]  # side -> type -> total hp
    frames_elapsed: int
    winner: str

    def score(self, side: str) -> float:
        return self.score_red if side == RED else self.score_blue


@dataclass(frozen=True)
class FrameSnapshot:
    frame: int
    units: tuple[tuple[int, float, float, float], ...]  # id, x, y, hitpoints
    shots: tuple[tuple[int, int, float], ...]           # attacker, target, damage


@dataclass
class ReplayTrace:
    frames: list[FrameSnapshot] = field(default_factory=list)

    def serialize(self) -> str:
        """One frame per line: frame index, then id,x,y,hp per live unit."""
        lines = []
        for snap in self.frames:
            parts = [str(snap.frame)]
            for uid, x, y, hp in snap.units:
                parts.extend((str(uid), repr(x), repr(y), repr(hp)))
            lines.append(",".join(parts))
        return "\n".join(lines) + "\n"


class SimulationState:
    def __init__(self, config: SkirmishConfig, units: list[UnitState],
                 controls: list[SideTypeControl], trace: Optional[ReplayTrace]):
        self.config = config
        self.units = units
        self.unit_by_id = {u.unit_id: u for u in units}
        self.live_red = [u for u in units if u.side == RED]
        self.live_blue = [u for u in units if u.side == BLUE]
        self.controls = controls
        self.frames_elapsed = 0
        self.damage_by = {RED: 0.0, BLUE: 0.0}
        self.grid_spec = GridSpec.for_map(config.map_width, config.map_height,
                                          config.im_cell_size)
        self.trace = trace
        if trace is not None:
            trace.frames.append(self._snapshot(()))

    def is_terminal(self) -> bool:
        return (
            not self.live_red
            or not self.live_blue
            or self.frames_elapsed >= self.config.max_frames
        )

    def _snapshot(self, shots) -> FrameSnapshot:
        units = tuple(
            (u.unit_id, u.x, u.y, u.hitpoints)
            for u in self.live_red + self.live_blue
        )
        return FrameSnapshot(frame=self.frames_elapsed, units=units, shots=tuple(shots))

    def cycle_key(self):
        """Hashable full-state key: equal keys mean identical futures."""
        per_unit = tuple(
            (
                u.unit_id,
                u.x,
                u.y,
                u.hitpoints,
                u.cooldown_remaining,
                u.behavior_mode,
                u.kite_armed,
                min(u.frames_since_fire, u.ctl.wait_cap),
                u.waypoint_x,
                u.waypoint_y,
            )
            for u in self.live_red + self.live_blue
        )
        targets = tuple((c.target_x, c.target_y) for c in self.controls)
        phase = self.frames_elapsed % self.config.im_refresh_interval
        return (phase, per_unit, targets)


def spawn_skirmish(
    config: SkirmishConfig,
    red_genomes: list[MicroGenome],
    blue_genomes: list[MicroGenome],
    collect_trace: bool = False,
) -> SimulationState:
    """Place both rosters per the formation and wire up their controllers.

    Genome arity must match the roster: one parameter set per unit type,
    in roster order.
    """
    genomes = {RED: red_genomes, BLUE: blue_genomes}
    for side in SIDES:
        roster = config.roster(side)
        if len(genomes[side]) != len(roster):
            raise ConfigurationError(
                f"{side} genome arity {len(genomes[side])} does not match "
                f"roster type count {len(roster)}"
            )
        weights = config.weights_for(side)
        for spec, _ in roster:
            if spec.name not in weights:
                raise ConfigurationError(f"no score weights for unit type {spec.name!r}")
        for spec, _ in config.roster(opposite(side)):
            if spec.name not in weights:
                raise ConfigurationError(f"no score weights for unit type {spec.name!r}")

    red_count = sum(c for _, c in config.red_roster)
    blue_count = sum(c for _, c in config.blue_roster)
    red_pos, blue_pos = generate_formation(
        config.formation, red_count, blue_count,
        config.map_width, config.map_height, config.rng_seed,
    )
    for x, y in red_pos + blue_pos:
        if not (0.0 <= x <= config.map_width and 0.0 <= y <= config.map_height):
            raise ConfigurationError(f"spawn position ({x}, {y}) outside map bounds")

    controls = []
    units = []
    next_id = 0
    for side, positions in ((RED, red_pos), (BLUE, blue_pos)):
        pos_iter = iter(positions)
        for type_index, (spec, count) in enumerate(config.roster(side)):
            ctl = SideTypeControl(
                side, genomes[side][type_index], spec,
                config.map_width, config.map_height,
            )
            controls.append(ctl)
            for _ in range(count):
                x, y = next(pos_iter)
                unit = UnitState(
                    unit_id=next_id, side=side, type_spec=spec,
                    x=x, y=y, hitpoints=spec.max_hitpoints, ctl=ctl,
                )
                units.append(unit)
                next_id += 1

    trace = ReplayTrace() if collect_trace else None
    return SimulationState(config, units, controls, trace)


def _refresh_targets(sim: SimulationState) -> None:
    grid_spec = sim.grid_spec
    enemy_positions = {
        RED: [(u.x, u.y) for u in sim.live_blue],
        BLUE: [(u.x, u.y) for u in sim.live_red],
    }
    for ctl in sim.controls:
        enemies = enemy_positions[ctl.side]
        try:
            grid = build_influence_grid(
                enemies, ctl.params.influence_weight, ctl.params.influence_range,
                grid_spec, patch=ctl.patch,
            )
            row, col = select_target_cell(grid, enemies)
            ctl.target_x, ctl.target_y = grid_spec.cell_center(row, col)
        except NoTargetError:
            ctl.target_x = sim.config.map_width / 2.0
            ctl.target_y = sim.config.map_height / 2.0


def step(sim: SimulationState) -> bool:
    """Advance one frame; returns True when any shot was fired.

    Stepping a finished simulation is a caller bug and raises.
    """
    if sim.is_terminal():
        raise SimulationError("step() called on a terminal simulation state")

    # Timers tick at frame start so a cooldown of c yields one shot every c frames.
    for u in sim.live_red:
        if u.cooldown_remaining > 0:
            u.cooldown_remaining -= 1
        u.frames_since_fire += 1
    for u in sim.live_blue:
        if u.cooldown_remaining > 0:
            u.cooldown_remaining -= 1
        u.frames_since_fire += 1

    if sim.frames_elapsed % sim.config.im_refresh_interval == 0:
        _refresh_targets(sim)

    red_enemy_view: list[EnemyView] = [(u.unit_id, u.x, u.y, u.hitpoints) for u in sim.live_blue]
    blue_enemy_view: list[EnemyView] = [(u.unit_id, u.x, u.y, u.hitpoints) for u in sim.live_red]
    red_friend_view: list[FriendView] = [(u.unit_id, u.x, u.y) for u in sim.live_red]
    blue_friend_view: list[FriendView] = [(u.unit_id, u.x, u.y) for u in sim.live_blue]

    decisions = []
    for u in sim.live_red:
        ctl = u.ctl
        decisions.append((u, decide_action(u, ctl, red_enemy_view, red_friend_view,
                                           ctl.target_x, ctl.target_y)))
    for u in sim.live_blue:
        ctl = u.ctl
        decisions.append((u, decide_action(u, ctl, blue_enemy_view, blue_friend_view,
                                           ctl.target_x, ctl.target_y)))

    # Movement and controller state first; positions were already captured
    # in the frame-start views, so attack resolution below is unaffected.
    # Positions snap to a 2^-20 map-unit lattice: far below any gameplay
    # scale, but it lets converging or oscillating motion revisit exact
    # states so stand-offs can be fast-forwarded.
    map_w = sim.config.map_width
    map_h = sim.config.map_height
    for u, dec in decisions:
        if dec.move_x or dec.move_y:
            u.x = round(min(max(u.x + dec.move_x, 0.0), map_w) * 1048576.0) / 1048576.0
            u.y = round(min(max(u.y + dec.move_y, 0.0), map_h) * 1048576.0) / 1048576.0
        u.behavior_mode = dec.mode
        u.kite_armed = dec.kite_armed
        if dec.waypoint is not None:
            u.waypoint_x, u.waypoint_y = dec.waypoint

    # Attacks hit simultaneously from frame-start hitpoints; mutual kills land.
    shots = []
    hit: dict[UnitState, float] = {}
    for u, dec in decisions:
        tid = dec.attack_target
        if tid is None:
            continue
        target = sim.unit_by_id[tid]
        dmg = u.ctl.attack_damage
        target.hitpoints -= dmg
        hit[target] = hit.get(target, 0.0) + dmg
        u.cooldown_remaining = u.ctl.attack_cooldown
        u.kite_armed = True
        u.frames_since_fire = 0
        shots.append((u.unit_id, tid, dmg))

    for target, total in hit.items():
        removed = total if target.hitpoints >= 0.0 else target.hitpoints + total
        sim.damage_by[opposite(target.side)] += removed
        if target.hitpoints < 0.0:
            target.hitpoints = 0.0

    if hit:
        sim.live_red = [u for u in sim.live_red if u.hitpoints > 0.0]
        sim.live_blue = [u for u in sim.live_blue if u.hitpoints > 0.0]

    sim.frames_elapsed += 1
    if sim.trace is not None:
        sim.trace.frames.append(sim._snapshot(shots))
    return bool(shots)


def compute_score(side: str, units: list[UnitState], config: SkirmishConfig) -> float:
    """Damage-based score for one side over the final unit states.

    Saved friendly hitpoint fractions are weighted per friendly type;
    hitpoints removed from each enemy are weighted per enemy type. Dead
    units contribute zero saved health and full removed health.
    """
    weights = config.weights_for(side)
    saved = 0.0
    removed = 0.0
    for u in units:
        w = weights[u.type_spec.name]
        if u.side == side:
            saved += w.save_weight * (u.hitpoints / u.type_spec.max_hitpoints)
        else:
            dealt = u.type_spec.max_hitpoints - u.hitpoints
            if config.normalize_damage:
                dealt /= u.type_spec.max_hitpoints
            removed += w.damage_weight * dealt
    return saved + removed


def _hitpoint_fraction(units: list[UnitState], side: str) -> float:
    total = 0.0
    count = 0
    for u in units:
        if u.side == side:
            total += u.hitpoints / u.type_spec.max_hitpoints
            count += 1
    return total / count


def _build_result(sim: SimulationState) -> SkirmishResult:
    config = sim.config
    red_alive = len(sim.live_red)
    blue_alive = len(sim.live_blue)
    if red_alive == 0 and blue_alive == 0:
        winner = DRAW
    elif blue_alive == 0:
        winner = RED
    elif red_alive == 0:
        winner = BLUE
    else:
        red_frac = _hitpoint_fraction(sim.units, RED)
        blue_frac = _hitpoint_fraction(sim.units, BLUE)
        winner = RED if red_frac > blue_frac else BLUE if blue_frac > red_frac else DRAW

    remaining: dict[str, dict[str, float]] = {RED: {}, BLUE: {}}
    for side in SIDES:
        for spec, _ in config.roster(side):
            remaining[side].setdefault(spec.name, 0.0)
    for u in sim.units:
        remaining[u.side][u.type_spec.name] += u.hitpoints

    return SkirmishResult(
        score_red=compute_score(RED, sim.units, config),
        score_blue=compute_score(BLUE, sim.units, config),
        survivors_red=red_alive,
        survivors_blue=blue_alive,
        remaining_hitpoints=remaining,
        frames_elapsed=sim.frames_elapsed,
        winner=winner,
    )


def run_skirmish(
    config: SkirmishConfig,
    red_genomes: list[MicroGenome],
    blue_genomes: list[MicroGenome],
    collect_trace: bool = False,
    detect_cycles: bool = True,
):
    """Run to elimination or the frame cap; returns the SkirmishResult,
    or (result, trace) when ``collect_trace`` is set.

    ``detect_cycles`` fast-forwards provably repeating stand-offs to the
    frame cap; the outcome is bit-identical to stepping every frame, so it
    is only disabled when a full per-frame trace is wanted.
    """
    sim = spawn_skirmish(config, red_genomes, blue_genomes, collect_trace=collect_trace)
    seen: Optional[dict] = {} if (detect_cycles and not collect_trace) else None
    while not sim.is_terminal():
        fired = step(sim)
        if seen is None:
            continue
        if fired:
            # Hitpoints dropped, so no stored state can ever repeat.
            seen.clear()
            continue
        if sim.frames_elapsed & 3:
            continue  # sampling every 4th frame still catches any cycle
        key = sim.cycle_key()
        first = seen.get(key)
        if first is None:
            seen[key] = sim.frames_elapsed
            continue
        period = sim.frames_elapsed - first
        remaining = (config.max_frames - sim.frames_elapsed) % period
        for _ in range(remaining):
            step(sim)
        sim.frames_elapsed = config.max_frames
        break
    result = _build_result(sim)
    if collect_trace:
        return result, sim.trace
    return result
