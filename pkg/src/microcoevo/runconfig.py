"""Run configuration: one JSON file describes a whole experiment.

Unknown keys are rejected outright and every value is range-checked with
its field name in the error. An empty file yields the reference settings:
population 50, 60 generations, crossover 0.95, mutation 0.03, sample and
hall-of-fame size 5, 2500-frame skirmishes, 5 ranged vs 25 melee.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigurationError
from .formations import FORMATION_KINDS, FormationSpec
from .genome import DEFAULT_RANGES, PARAM_NAMES
from .seeds import derive_seed
from .sim import BLUE, RED, SkirmishConfig
from .units import UNIT_TYPES, UnitTypeSpec

EXPERIMENT_KINDS = (
    "coevolve-1v1type",
    "coevolve-2v2type",
    "baseline",
    "robustness",
    "replay",
)

MODES = ("simple", "enhanced")


@dataclass(frozen=True)
class BaselineSettings:
    random_count: int = 200
    candidate_count: int = 25
    threshold: float = 0.90


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    population_size: int
    generations: int
    crossover_prob: float
    mutation_prob: float
    mode: str
    sample_size: int
    hof_size: int
    share_raw_scores: bool
    master_seed: int
    workers: int
    out_dir: str
    baseline: BaselineSettings
    robustness_start_sets: int
    sim: SkirmishConfig
    ranges: dict[str, tuple[float, float]]

    def genome_counts(self) -> tuple[int, int]:
        return (len(self.sim.red_roster), len(self.sim.blue_roster))

    def canonical_dict(self) -> dict:
        """Everything that determines the run's artifacts, JSON-shaped.

        The worker count is deliberately left out: parallelism never
        changes any output.
        """
        def roster(entries):
            return [
                {
                    "type": dataclasses.asdict(spec),
                    "count": count,
                }
                for spec, count in entries
            ]

        return {
            "experiment": self.experiment,
            "master_seed": self.master_seed,
            "population_size": self.population_size,
            "generations": self.generations,
            "crossover_prob": self.crossover_prob,
            "mutation_prob": self.mutation_prob,
            "mode": self.mode,
            "sample_size": self.sample_size,
            "hof_size": self.hof_size,
            "share_raw_scores": self.share_raw_scores,
            "baseline": dataclasses.asdict(self.baseline),
            "robustness_start_sets": self.robustness_start_sets,
            "skirmish": {
                "red_roster": roster(self.sim.red_roster),
                "blue_roster": roster(self.sim.blue_roster),
                "formation": dataclasses.asdict(self.sim.formation),
                "rng_seed": self.sim.rng_seed,
                "map_width": self.sim.map_width,
                "map_height": self.sim.map_height,
                "max_frames": self.sim.max_frames,
                "normalize_damage": self.sim.normalize_damage,
                "im_cell_size": self.sim.im_cell_size,
                "im_refresh_interval": self.sim.im_refresh_interval,
            },
            "ranges": {name: list(self.ranges[name]) for name in PARAM_NAMES},
        }

    def config_hash(self) -> str:
        payload = json.dumps(self.canonical_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


def _reject_unknown(section: dict, allowed: set[str], context: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigurationError(f"unknown key '{context}{unknown[0]}'")


def _get_number(section, key, default, lo=None, hi=None, integer=False, context=""):
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{context}{key} must be a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigurationError(f"{context}{key} must be an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigurationError(f"{context}{key} must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise ConfigurationError(f"{context}{key} must be <= {hi}, got {value}")
    return int(value) if integer else float(value)


def _get_bool(section, key, default, context=""):
    value = section.get(key, default)
    if not isinstance(value, bool):
        raise ConfigurationError(f"{context}{key} must be a boolean, got {value!r}")
    return value


def _get_choice(section, key, default, choices, context=""):
    value = section.get(key, default)
    if value not in choices:
        raise ConfigurationError(f"{context}{key} must be one of {choices}, got {value!r}")
    return value


def _parse_unit_types(section: dict) -> dict[str, UnitTypeSpec]:
    types = dict(UNIT_TYPES)
    allowed = {"max_hitpoints", "move_speed", "attack_range", "attack_damage", "attack_cooldown"}
    for name, overrides in section.items():
        if not isinstance(overrides, dict):
            raise ConfigurationError(f"unit_types.{name} must be an object")
        _reject_unknown(overrides, allowed, f"unit_types.{name}.")
        base = types.get(name)
        fields = {
            "name": name,
            "max_hitpoints": base.max_hitpoints if base else None,
            "move_speed": base.move_speed if base else None,
            "attack_range": base.attack_range if base else None,
            "attack_damage": base.attack_damage if base else None,
            "attack_cooldown": base.attack_cooldown if base else None,
        }
        fields.update(overrides)
        missing = [k for k, v in fields.items() if v is None]
        if missing:
            raise ConfigurationError(f"unit_types.{name} missing {missing[0]!r}")
        try:
            types[name] = UnitTypeSpec(
                name=name,
                max_hitpoints=float(fields["max_hitpoints"]),
                move_speed=float(fields["move_speed"]),
                attack_range=float(fields["attack_range"]),
                attack_damage=float(fields["attack_damage"]),
                attack_cooldown=int(fields["attack_cooldown"]),
            )
        except ValueError as exc:
            raise ConfigurationError(f"unit_types.{name}: {exc}") from exc
    return types


def _parse_roster(entries, types: dict[str, UnitTypeSpec], context: str):
    roster = []
    for entry in entries:
        if not (isinstance(entry, list) and len(entry) == 2):
            raise ConfigurationError(f"{context} entries must be [type_name, count] pairs")
        name, count = entry
        if name not in types:
            raise ConfigurationError(f"{context}: unknown unit type {name!r}")
        count = _get_number({"count": count}, "count", None, lo=1, integer=True,
                            context=f"{context}.")
        roster.append((types[name], count))
    return tuple(roster)


def _parse_formation(section: dict, master_seed: int) -> FormationSpec:
    allowed = {"kind", "placement_seed", "circle_radius", "line_separation",
               "line_span", "box_inset"}
    _reject_unknown(section, allowed, "skirmish.formation.")
    kind = _get_choice(section, "kind", "circle", FORMATION_KINDS, "skirmish.formation.")
    placement = section.get("placement_seed")
    if placement is None:
        placement = derive_seed(master_seed, "training/placement")
    else:
        placement = _get_number(section, "placement_seed", None, integer=True,
                                context="skirmish.formation.")

    def geo(key):
        if key not in section or section[key] is None:
            return None
        return _get_number(section, key, None, lo=0.0, context="skirmish.formation.")

    return FormationSpec(
        kind=kind,
        placement_seed=placement,
        circle_radius=geo("circle_radius"),
        line_separation=geo("line_separation"),
        line_span=geo("line_span"),
        box_inset=_get_number(section, "box_inset", 0.05, lo=0.0, hi=0.4,
                              context="skirmish.formation."),
    )


def _parse_ranges(section: dict) -> dict[str, tuple[float, float]]:
    ranges = dict(DEFAULT_RANGES)
    _reject_unknown(section, set(PARAM_NAMES), "ranges.")
    for name, bounds in section.items():
        if not (isinstance(bounds, list) and len(bounds) == 2):
            raise ConfigurationError(f"ranges.{name} must be [low, high]")
        lo, hi = float(bounds[0]), float(bounds[1])
        if hi < lo:
            raise ConfigurationError(f"ranges.{name}: high must be >= low")
        ranges[name] = (lo, hi)
    return ranges


_DEFAULT_ROSTERS = {
    "1v1type": {"red": [["vulture", 5]], "blue": [["zealot", 25]]},
    "2v2type": {"red": [["vulture", 5], ["zealot", 25]],
                "blue": [["vulture", 5], ["zealot", 25]]},
}


def build_run_config(raw: dict) -> RunConfig:
    """Validate a parsed JSON object and fill reference defaults."""
    if not isinstance(raw, dict):
        raise ConfigurationError("config root must be a JSON object")
    allowed = {
        "experiment", "population_size", "generations", "crossover_prob",
        "mutation_prob", "mode", "sample_size", "hof_size", "share_raw_scores",
        "master_seed", "workers", "out_dir", "baseline", "robustness_start_sets",
        "skirmish", "ranges", "unit_types",
    }
    _reject_unknown(raw, allowed, "")

    experiment = _get_choice(raw, "experiment", "coevolve-1v1type", EXPERIMENT_KINDS)
    population_size = _get_number(raw, "population_size", 50, lo=2, integer=True)
    generations = _get_number(raw, "generations", 60, lo=1, integer=True)
    crossover_prob = _get_number(raw, "crossover_prob", 0.95, lo=0.0, hi=1.0)
    mutation_prob = _get_number(raw, "mutation_prob", 0.03, lo=0.0, hi=1.0)
    mode = _get_choice(raw, "mode", "enhanced", MODES)
    sample_size = _get_number(raw, "sample_size", 5, lo=1, integer=True)
    hof_size = _get_number(raw, "hof_size", 5, lo=0, integer=True)
    share_raw_scores = _get_bool(raw, "share_raw_scores", False)
    master_seed = _get_number(raw, "master_seed", 0, integer=True)
    workers = _get_number(raw, "workers", os.cpu_count() or 1, lo=1, integer=True)
    out_dir = raw.get("out_dir", "out")
    if not isinstance(out_dir, str):
        raise ConfigurationError(f"out_dir must be a string, got {out_dir!r}")
    robustness_start_sets = _get_number(raw, "robustness_start_sets", 10, lo=1, integer=True)

    baseline_raw = raw.get("baseline", {})
    if not isinstance(baseline_raw, dict):
        raise ConfigurationError("baseline must be an object")
    _reject_unknown(baseline_raw, {"random_count", "candidate_count", "threshold"},
                    "baseline.")
    two_type = experiment == "coevolve-2v2type"
    baseline = BaselineSettings(
        random_count=_get_number(baseline_raw, "random_count", 200, lo=1, integer=True,
                                 context="baseline."),
        candidate_count=_get_number(baseline_raw, "candidate_count", 25, lo=1, integer=True,
                                    context="baseline."),
        threshold=_get_number(baseline_raw, "threshold", 0.99 if two_type else 0.90,
                              lo=0.0, hi=1.0, context="baseline."),
    )

    types = _parse_unit_types(raw.get("unit_types", {}))

    sk = raw.get("skirmish", {})
    if not isinstance(sk, dict):
        raise ConfigurationError("skirmish must be an object")
    _reject_unknown(sk, {"red_roster", "blue_roster", "formation", "map_width",
                         "map_height", "max_frames", "normalize_damage",
                         "im_cell_size", "im_refresh_interval"}, "skirmish.")
    roster_kind = "2v2type" if two_type else "1v1type"
    red_roster = _parse_roster(sk.get("red_roster", _DEFAULT_ROSTERS[roster_kind]["red"]),
                               types, "skirmish.red_roster")
    blue_roster = _parse_roster(sk.get("blue_roster", _DEFAULT_ROSTERS[roster_kind]["blue"]),
                                types, "skirmish.blue_roster")
    formation = _parse_formation(sk.get("formation", {}), master_seed)
    try:
        sim = SkirmishConfig(
            red_roster=red_roster,
            blue_roster=blue_roster,
            formation=formation,
            rng_seed=derive_seed(master_seed, "skirmish"),
            map_width=_get_number(sk, "map_width", 2048.0, lo=1.0, context="skirmish."),
            map_height=_get_number(sk, "map_height", 2048.0, lo=1.0, context="skirmish."),
            max_frames=_get_number(sk, "max_frames", 2500, lo=0, integer=True,
                                   context="skirmish."),
            normalize_damage=_get_bool(sk, "normalize_damage", False, "skirmish."),
            im_cell_size=_get_number(sk, "im_cell_size", 32.0, lo=1.0, context="skirmish."),
            im_refresh_interval=_get_number(sk, "im_refresh_interval", 8, lo=1, integer=True,
                                            context="skirmish."),
        )
    except ConfigurationError:
        raise
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc

    ranges = _parse_ranges(raw.get("ranges", {}))
    return RunConfig(
        experiment=experiment,
        population_size=population_size,
        generations=generations,
        crossover_prob=crossover_prob,
        mutation_prob=mutation_prob,
        mode=mode,
        sample_size=sample_size,
        hof_size=hof_size,
        share_raw_scores=share_raw_scores,
        master_seed=master_seed,
        workers=workers,
        out_dir=out_dir,
        baseline=baseline,
        robustness_start_sets=robustness_start_sets,
        sim=sim,
        ranges=ranges,
    )


def load_config(path, overrides: Optional[dict] = None) -> RunConfig:
    """Parse, validate, and resolve a JSON run config.

    ``overrides`` (e.g. from CLI flags) replace top-level keys before
    validation so the recorded config hash reflects the run as executed.
    """
    text = Path(path).read_text()
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"malformed config file {path}: {exc}") from exc
    if overrides:
        raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    return build_run_config(raw)
