"""Unit decision logic: targeting, kiting, fleeing, and their priority."""

import math

import pytest

from microcoevo.controller import (
    APPROACH,
    ENGAGE,
    FLEE,
    KITE_RETREAT,
    choose_attack_target,
    decide_action,
    flee_decision,
    kite_decision,
)
from microcoevo.genome import MicroGenome
from microcoevo.sim import SideTypeControl, UnitState
from microcoevo.units import VULTURE


def make_params(**overrides):
    base = dict(
        influence_weight=10.0,
        influence_range=2.0,
        attract_coeff=20.0,
        attract_exp=1.0,
        repulse_coeff=0.0,
        repulse_exp=0.0,
        weak_target_hp=50.0,
        target_radius=200.0,
        kite_trigger_range=0.0,
        kite_hold_frames=0.0,
        kite_retreat_dist=0.0,
        flee_hp=0.0,
    )
    base.update(overrides)
    return MicroGenome(**base)


def make_unit(ctl, x=0.0, y=0.0, hp=80.0, **overrides):
    unit = UnitState(unit_id=0, side="red", type_spec=ctl.spec, x=x, y=y, hitpoints=hp, ctl=ctl)
    for name, value in overrides.items():
        setattr(unit, name, value)
    return unit


def make_ctl(params, map_size=1024.0):
    return SideTypeControl("red", params, VULTURE, map_size, map_size)


def enemy(eid, x, y, hp=160.0):
    return (eid, x, y, hp)


class TestChooseAttackTarget:
    def test_nothing_in_radius(self):
        assert choose_attack_target(0.0, 0.0, [enemy(1, 500.0, 0.0)], 50.0, 200.0) is None

    def test_weakened_enemy_preferred(self):
        enemies = [enemy(1, 50.0, 0.0, hp=90.0), enemy(2, 120.0, 0.0, hp=30.0)]
        assert choose_attack_target(0.0, 0.0, enemies, 50.0, 200.0) == 2

    def test_healthy_enemies_fall_back_to_nearest(self):
        enemies = [enemy(1, 120.0, 0.0, hp=90.0), enemy(2, 50.0, 0.0, hp=100.0)]
        assert choose_attack_target(0.0, 0.0, enemies, 50.0, 200.0) == 2

    def test_weak_tie_broken_by_distance(self):
        enemies = [enemy(1, 120.0, 0.0, hp=30.0), enemy(2, 50.0, 0.0, hp=30.0)]
        assert choose_attack_target(0.0, 0.0, enemies, 50.0, 200.0) == 2


class TestFlee:
    def test_threshold_zero_never_triggers(self):
        ctl = make_ctl(make_params(flee_hp=0.0))
        unit = make_unit(ctl, hp=0.0)
        assert flee_decision(unit, [enemy(1, 10.0, 0.0)], 0.0, 200.0, 6.4) is None

    def test_full_health_does_not_flee_at_threshold(self):
        # Strict comparison: hitpoints equal to the threshold still fight.
        ctl = make_ctl(make_params(flee_hp=80.0))
        unit = make_unit(ctl, hp=80.0)
        assert flee_decision(unit, [enemy(1, 10.0, 0.0)], 80.0, 200.0, 6.4) is None

    def test_damaged_unit_flees_directly_away(self):
        ctl = make_ctl(make_params(flee_hp=40.0, target_radius=200.0))
        unit = make_unit(ctl, x=100.0, y=50.0, hp=10.0)
        dec = flee_decision(unit, [enemy(1, 60.0, 50.0)], 40.0, 200.0, 6.4)
        assert dec.mode == FLEE
        assert dec.attack_target is None
        assert dec.move_x == pytest.approx(6.4)
        assert dec.move_y == pytest.approx(0.0)

    def test_flee_overrides_attack_opportunity(self):
        ctl = make_ctl(make_params(flee_hp=40.0))
        unit = make_unit(ctl, hp=10.0, cooldown_remaining=0)
        dec = decide_action(unit, ctl, [enemy(1, 50.0, 0.0)], [(0, 0.0, 0.0)], 500.0, 0.0)
        assert dec.mode == FLEE
        assert dec.attack_target is None


class TestKite:
    def kite_ctl(self, **overrides):
        params = dict(kite_trigger_range=100.0, kite_hold_frames=5.0, kite_retreat_dist=50.0)
        params.update(overrides)
        return make_ctl(make_params(**params))

    def test_distant_threat_does_not_trigger(self):
        ctl = self.kite_ctl()
        unit = make_unit(ctl, kite_armed=True, frames_since_fire=10)
        assert kite_decision(unit, [enemy(1, 150.0, 0.0)], ctl) is None

    def test_unfired_unit_does_not_kite(self):
        ctl = self.kite_ctl()
        unit = make_unit(ctl, kite_armed=False)
        assert kite_decision(unit, [enemy(1, 50.0, 0.0)], ctl) is None

    def test_holds_position_during_post_fire_wait(self):
        ctl = self.kite_ctl()
        unit = make_unit(ctl, kite_armed=True, frames_since_fire=3)
        dec = kite_decision(unit, [enemy(1, 50.0, 0.0)], ctl)
        assert dec == (0.0, 0.0, None, ENGAGE, None, True)

    def test_retreats_after_wait_away_from_threat(self):
        ctl = self.kite_ctl()
        unit = make_unit(ctl, x=200.0, y=0.0, kite_armed=True, frames_since_fire=5)
        dec = kite_decision(unit, [enemy(1, 150.0, 0.0)], ctl)
        assert dec.mode == KITE_RETREAT
        assert dec.kite_armed is False
        assert dec.waypoint == (250.0, 0.0)
        assert dec.move_x == pytest.approx(ctl.move_speed)

    def test_zero_retreat_distance_is_a_same_frame_noop(self):
        ctl = self.kite_ctl(kite_retreat_dist=0.0)
        unit = make_unit(ctl, x=200.0, y=0.0, kite_armed=True, frames_since_fire=5)
        dec = kite_decision(unit, [enemy(1, 150.0, 0.0)], ctl)
        assert dec.mode == ENGAGE
        assert dec.waypoint is None
        assert (dec.move_x, dec.move_y) == (0.0, 0.0)

    def test_retreat_continues_until_waypoint(self):
        ctl = self.kite_ctl()
        unit = make_unit(
            ctl, x=200.0, y=0.0, behavior_mode=KITE_RETREAT,
            waypoint_x=200.0 + ctl.move_speed * 3, waypoint_y=0.0,
        )
        dec = kite_decision(unit, [enemy(1, 100.0, 0.0)], ctl)
        assert dec.mode == KITE_RETREAT
        assert dec.move_x == pytest.approx(ctl.move_speed)

    def test_arrival_within_one_frame_reengages(self):
        ctl = self.kite_ctl()
        unit = make_unit(
            ctl, x=200.0, y=0.0, behavior_mode=KITE_RETREAT,
            waypoint_x=203.0, waypoint_y=0.0,
        )
        dec = kite_decision(unit, [enemy(1, 100.0, 0.0)], ctl)
        assert dec.mode == ENGAGE
        assert dec.move_x == pytest.approx(3.0)


class TestDecideActionPriority:
    def test_attack_when_in_range_and_ready(self):
        ctl = make_ctl(make_params())
        unit = make_unit(ctl, cooldown_remaining=0)
        dec = decide_action(unit, ctl, [enemy(1, 100.0, 0.0)], [(0, 0.0, 0.0)], 500.0, 0.0)
        assert dec.attack_target == 1
        assert (dec.move_x, dec.move_y) == (0.0, 0.0)
        assert dec.mode == ENGAGE

    def test_cooldown_blocks_attack(self):
        ctl = make_ctl(make_params())
        unit = make_unit(ctl, cooldown_remaining=3)
        dec = decide_action(unit, ctl, [enemy(1, 100.0, 0.0)], [(0, 0.0, 0.0)], 500.0, 0.0)
        assert dec.attack_target is None

    def test_out_of_weapon_range_target_means_movement(self):
        ctl = make_ctl(make_params(target_radius=640.0))
        unit = make_unit(ctl, cooldown_remaining=0)
        dec = decide_action(unit, ctl, [enemy(1, 400.0, 0.0)], [(0, 0.0, 0.0)], 500.0, 0.0)
        assert dec.attack_target is None
        assert dec.mode == ENGAGE  # an enemy is inside the targeting radius
        assert dec.move_x > 0.0

    def test_no_enemy_in_radius_approaches_target_point(self):
        ctl = make_ctl(make_params(target_radius=50.0))
        unit = make_unit(ctl, cooldown_remaining=0)
        dec = decide_action(unit, ctl, [enemy(1, 400.0, 0.0)], [(0, 0.0, 0.0)], 0.0, 300.0)
        assert dec.attack_target is None
        assert dec.mode == APPROACH
        assert dec.move_y > 0.0 and dec.move_x == pytest.approx(0.0)

    def test_kite_hold_preempts_attack(self):
        ctl = make_ctl(make_params(kite_trigger_range=150.0, kite_hold_frames=5.0,
                                   kite_retreat_dist=50.0))
        unit = make_unit(ctl, cooldown_remaining=0, kite_armed=True, frames_since_fire=2)
        dec = decide_action(unit, ctl, [enemy(1, 100.0, 0.0)], [(0, 0.0, 0.0)], 500.0, 0.0)
        assert dec.attack_target is None
        assert (dec.move_x, dec.move_y) == (0.0, 0.0)

    def test_move_magnitude_never_exceeds_speed(self):
        import random

        rng = random.Random(99)
        ctl = make_ctl(make_params(repulse_coeff=30.0, repulse_exp=-0.2, attract_coeff=64.0))
        for _ in range(200):
            unit = make_unit(ctl, x=rng.uniform(0, 500), y=rng.uniform(0, 500),
                             hp=rng.uniform(1, 80))
            enemies = [enemy(i, rng.uniform(0, 500), rng.uniform(0, 500), rng.uniform(1, 160))
                       for i in range(1, 5)]
            friends = [(i + 10, rng.uniform(0, 500), rng.uniform(0, 500)) for i in range(3)]
            dec = decide_action(unit, ctl, enemies, friends, rng.uniform(0, 500), rng.uniform(0, 500))
            assert math.hypot(dec.move_x, dec.move_y) <= ctl.move_speed + 1e-12

    def test_attack_target_is_live_and_in_range(self):
        import random

        rng = random.Random(7)
        ctl = make_ctl(make_params(weak_target_hp=100.0))
        for _ in range(200):
            unit = make_unit(ctl, x=rng.uniform(0, 400), y=rng.uniform(0, 400))
            enemies = [enemy(i, rng.uniform(0, 400), rng.uniform(0, 400), rng.uniform(1, 160))
                       for i in range(1, 6)]
            dec = decide_action(unit, ctl, enemies, [(0, unit.x, unit.y)], 200.0, 200.0)
            if dec.attack_target is not None:
                chosen = next(e for e in enemies if e[0] == dec.attack_target)
                d = math.hypot(chosen[1] - unit.x, chosen[2] - unit.y)
                assert d <= ctl.spec.attack_range
                assert chosen[3] > 0.0
