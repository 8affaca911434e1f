"""Per-frame unit control driven by the twelve evolved parameters.

Behavior priority is total: flee > kite > attack > approach. Exactly one
command comes out per unit per frame. All functions here read frame-start
world views and mutate nothing, so units can be decided in any order.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

from .movement import EPSILON, MIN_FORCE_DISTANCE, _steer

APPROACH = "approach"
ENGAGE = "engage"
KITE_RETREAT = "kite-retreat"
FLEE = "flee"

# (id, x, y, hitpoints) of a live enemy; (id, x, y) of a live friend.
EnemyView = tuple[int, float, float, float]
FriendView = tuple[int, float, float]


class Decision(NamedTuple):
    """One frame's command plus the controller state it carries forward."""

    move_x: float
    move_y: float
    attack_target: Optional[int]
    mode: str
    waypoint: Optional[tuple[float, float]]
    kite_armed: bool


class EnemyScan(NamedTuple):
    """Aggregates from one pass over the enemy view."""

    nearest_d2: float
    nearest_x: float
    nearest_y: float
    in_radius: int          # enemies within the targeting radius
    centroid_x: float       # centroid of those enemies (valid when in_radius)
    centroid_y: float
    weak: Optional[tuple[int, float]]  # (id, d2) best below-threshold target
    near: Optional[tuple[int, float]]  # (id, d2) nearest target in radius


def scan_enemies(
    x: float,
    y: float,
    enemies: list[EnemyView],
    target_radius: float,
    weak_target_hp: float,
) -> EnemyScan:
    r2 = target_radius * target_radius
    nearest_d2 = math.inf
    nearest_x = nearest_y = 0.0
    in_radius = 0
    sum_x = sum_y = 0.0
    weak_key = None
    weak_sel = None
    near_key = None
    near_sel = None
    for eid, ex, ey, ehp in enemies:
        dx = ex - x
        dy = ey - y
        d2 = dx * dx + dy * dy
        if d2 < nearest_d2:
            nearest_d2 = d2
            nearest_x = ex
            nearest_y = ey
        if d2 <= r2:
            in_radius += 1
            sum_x += ex
            sum_y += ey
            if ehp < weak_target_hp:
                key = (ehp, d2, eid)
                if weak_key is None or key < weak_key:
                    weak_key = key
                    weak_sel = (eid, d2)
            key2 = (d2, eid)
            if near_key is None or key2 < near_key:
                near_key = key2
                near_sel = (eid, d2)
    if in_radius:
        sum_x /= in_radius
        sum_y /= in_radius
    return EnemyScan(nearest_d2, nearest_x, nearest_y, in_radius, sum_x, sum_y, weak_sel, near_sel)


def choose_attack_target(
    x: float,
    y: float,
    enemies: list[EnemyView],
    weak_target_hp: float,
    target_radius: float,
) -> Optional[int]:
    """Pick an enemy within the targeting radius, favoring weakened ones.

    Enemies below the hitpoint threshold are preferred, lowest hitpoints
    first (nearest on ties); otherwise the nearest enemy in radius wins.
    Returns None when nothing is in radius.
    """
    scan = scan_enemies(x, y, enemies, target_radius, weak_target_hp)
    selected = scan.weak if scan.weak is not None else scan.near
    return None if selected is None else selected[0]


def _flee_move(unit, scan: EnemyScan, speed: float) -> Decision:
    if scan.in_radius:
        away_x = unit.x - scan.centroid_x
        away_y = unit.y - scan.centroid_y
    else:
        away_x = unit.x - scan.nearest_x
        away_y = unit.y - scan.nearest_y
    d = math.sqrt(away_x * away_x + away_y * away_y)
    if d > EPSILON:
        mx = speed * away_x / d
        my = speed * away_y / d
    else:
        mx, my = speed, 0.0
    return Decision(mx, my, None, FLEE, None, unit.kite_armed)


def flee_decision(unit, enemies: list[EnemyView], flee_hp: float,
                  target_radius: float, speed: float) -> Optional[Decision]:
    """Withdraw when hitpoints drop below the threshold (strict).

    Moves directly away from the centroid of enemies within the targeting
    radius, or away from the nearest enemy if none are that close. Returns
    None when the unit is healthy enough to keep fighting.
    """
    if not unit.hitpoints < flee_hp:
        return None
    scan = scan_enemies(unit.x, unit.y, enemies, target_radius, 0.0)
    return _flee_move(unit, scan, speed)


def _kite_move(unit, scan: EnemyScan, ctl) -> Optional[Decision]:
    ux = unit.x
    uy = unit.y
    speed = ctl.move_speed
    p = ctl.params

    if unit.behavior_mode == KITE_RETREAT:
        wx = unit.waypoint_x
        wy = unit.waypoint_y
        dx = wx - ux
        dy = wy - uy
        d = math.sqrt(dx * dx + dy * dy)
        if d <= speed:
            # Arrived (or reachable within one frame): back to engaging.
            return Decision(dx, dy, None, ENGAGE, None, unit.kite_armed)
        scale = speed / d
        return Decision(dx * scale, dy * scale, None, KITE_RETREAT, (wx, wy), unit.kite_armed)

    if unit.kite_armed and scan.nearest_d2 < p.kite_trigger_range * p.kite_trigger_range:
        if unit.frames_since_fire < p.kite_hold_frames:
            # Still inside the post-fire wait: hold position.
            return Decision(0.0, 0.0, None, ENGAGE, None, True)
        d = math.sqrt(scan.nearest_d2)
        if d > EPSILON:
            dir_x = (ux - scan.nearest_x) / d
            dir_y = (uy - scan.nearest_y) / d
        else:
            dir_x, dir_y = 1.0, 0.0
        wx = min(max(ux + dir_x * p.kite_retreat_dist, 0.0), ctl.map_width)
        wy = min(max(uy + dir_y * p.kite_retreat_dist, 0.0), ctl.map_height)
        dx = wx - ux
        dy = wy - uy
        d = math.sqrt(dx * dx + dy * dy)
        if d <= speed:
            return Decision(dx, dy, None, ENGAGE, None, False)
        scale = speed / d
        return Decision(dx * scale, dy * scale, None, KITE_RETREAT, (wx, wy), False)
    return None


def kite_decision(unit, enemies: list[EnemyView], ctl) -> Optional[Decision]:
    """Hit-and-run state machine.

    After firing, the unit holds position for the post-fire wait, then pulls
    back by the retreat distance directly away from the nearest threat
    whenever that threat is inside the trigger range; once the retreat
    waypoint is reached it re-engages. Returns None when kiting does not
    apply this frame.
    """
    scan = scan_enemies(unit.x, unit.y, enemies, 0.0, 0.0)
    return _kite_move(unit, scan, ctl)


def decide_action(
    unit,
    ctl,
    enemies: list[EnemyView],
    friends: list[FriendView],
    target_x: float,
    target_y: float,
    repulsion: Optional[tuple[float, float]] = None,
) -> Decision:
    """Compose flee, kite, attack, and approach into one command.

    ``unit`` is the live unit state; ``ctl`` bundles its type statistics and
    decoded parameters (see sim.SideTypeControl); ``enemies``/``friends``
    are frame-start views in ascending unit-id order; the target point is
    the current influence-map attack location for this unit's side/type.
    The simulator passes the unit's friend-repulsion sum precomputed for
    the whole side (movement.side_repulsion); standalone callers may leave
    it out and pay for the pairwise loop here.
    """
    p = ctl.params
    speed = ctl.move_speed
    scan = scan_enemies(unit.x, unit.y, enemies, p.target_radius, p.weak_target_hp)

    if unit.hitpoints < p.flee_hp:
        return _flee_move(unit, scan, speed)

    kite = _kite_move(unit, scan, ctl)
    if kite is not None:
        return kite

    selected = scan.weak if scan.weak is not None else scan.near
    if selected is not None and unit.cooldown_remaining == 0:
        target_id, d2 = selected
        if d2 <= ctl.attack_range2:
            return Decision(0.0, 0.0, target_id, ENGAGE, None, unit.kite_armed)

    if repulsion is None:
        mx, my = _steer(
            unit.x, unit.y, target_x, target_y, friends, unit.unit_id,
            p.attract_coeff, p.attract_exp, p.repulse_coeff, p.repulse_exp, speed,
        )
    else:
        vx, vy = repulsion
        dx = target_x - unit.x
        dy = target_y - unit.y
        d = math.sqrt(dx * dx + dy * dy)
        if d > EPSILON:
            dc = d if d > MIN_FORCE_DISTANCE else MIN_FORCE_DISTANCE
            mag = p.attract_coeff * dc**p.attract_exp
            vx += mag * dx / d
            vy += mag * dy / d
        norm = math.sqrt(vx * vx + vy * vy)
        if norm > speed:
            scale = speed / norm
            vx *= scale
            vy *= scale
        mx, my = vx, vy
    mode = ENGAGE if scan.in_radius else APPROACH
    return Decision(mx, my, None, mode, None, unit.kite_armed)
