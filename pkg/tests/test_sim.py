"""Skirmish simulation: spawning, stepping, outcomes, determinism."""

import random

import pytest

from microcoevo.errors import ConfigurationError, SimulationError
from microcoevo.formations import FormationSpec
from microcoevo.genome import MicroGenome
from microcoevo.sim import (
    BLUE,
    DRAW,
    RED,
    SkirmishConfig,
    compute_score,
    run_skirmish,
    spawn_skirmish,
    step,
)
from microcoevo.units import VULTURE, ZEALOT, UnitTypeSpec


def passive_params(**overrides):
    base = dict(
        influence_weight=10.0, influence_range=1.0,
        attract_coeff=20.0, attract_exp=1.0, repulse_coeff=0.0, repulse_exp=0.0,
        weak_target_hp=0.0, target_radius=300.0,
        kite_trigger_range=0.0, kite_hold_frames=0.0, kite_retreat_dist=0.0,
        flee_hp=0.0,
    )
    base.update(overrides)
    return MicroGenome(**base)


KITER = passive_params(kite_trigger_range=100.0, kite_hold_frames=3.0,
                       kite_retreat_dist=60.0, target_radius=400.0)


def small_config(**overrides):
    base = dict(
        red_roster=((VULTURE, 5),),
        blue_roster=((ZEALOT, 25),),
        formation=FormationSpec(kind="circle"),
        rng_seed=7,
        map_width=1024.0,
        map_height=1024.0,
        max_frames=1500,
    )
    base.update(overrides)
    return SkirmishConfig(**base)


class TestSpawn:
    def test_rosters_spawn_live_at_full_health(self):
        sim = spawn_skirmish(small_config(), [passive_params()], [passive_params()])
        assert len(sim.units) == 30
        assert len(sim.live_red) == 5 and len(sim.live_blue) == 25
        for u in sim.units:
            assert u.hitpoints == u.type_spec.max_hitpoints
            assert u.cooldown_remaining == 0

    def test_same_seed_spawns_identical_positions(self):
        cfg = small_config()
        a = spawn_skirmish(cfg, [passive_params()], [passive_params()])
        b = spawn_skirmish(cfg, [passive_params()], [passive_params()])
        assert [(u.x, u.y) for u in a.units] == [(u.x, u.y) for u in b.units]

    def test_two_type_rosters_take_one_genome_per_type(self):
        cfg = small_config(
            red_roster=((VULTURE, 5), (ZEALOT, 25)),
            blue_roster=((VULTURE, 5), (ZEALOT, 25)),
        )
        genomes = [passive_params(), passive_params(attract_coeff=5.0)]
        sim = spawn_skirmish(cfg, genomes, genomes)
        assert len(sim.units) == 60
        red_specs = {u.type_spec.name for u in sim.live_red}
        assert red_specs == {"vulture", "zealot"}

    def test_genome_arity_mismatch_rejected(self):
        cfg = small_config(red_roster=((VULTURE, 5), (ZEALOT, 5)))
        with pytest.raises(ConfigurationError):
            spawn_skirmish(cfg, [passive_params()], [passive_params()])


class TestStep:
    def separated_sim(self, red_params=None, blue_params=None, gap=500.0):
        cfg = small_config(red_roster=((VULTURE, 1),), blue_roster=((ZEALOT, 1),))
        sim = spawn_skirmish(cfg, [red_params or passive_params()],
                             [blue_params or passive_params()])
        red, blue = sim.live_red[0], sim.live_blue[0]
        red.x, red.y = 200.0, 512.0
        blue.x, blue.y = 200.0 + gap, 512.0
        return sim, red, blue

    def test_out_of_contact_units_advance_without_damage(self):
        sim, red, blue = self.separated_sim(gap=800.0)
        x0, hp0 = red.x, red.hitpoints
        step(sim)
        assert red.hitpoints == hp0 and blue.hitpoints == blue.type_spec.max_hitpoints
        assert (red.x, red.y) != (200.0, 512.0) or (blue.x, blue.y) != (1000.0, 512.0)
        assert sim.frames_elapsed == 1

    def test_ready_attacker_damages_and_resets_cooldown(self):
        sim, red, blue = self.separated_sim(gap=100.0)
        step(sim)
        assert blue.hitpoints == blue.type_spec.max_hitpoints - red.type_spec.attack_damage
        assert red.cooldown_remaining == red.type_spec.attack_cooldown

    def test_mutual_lethal_attacks_resolve_simultaneously(self):
        sim, red, blue = self.separated_sim(gap=10.0)
        red.hitpoints = 1.0
        blue.hitpoints = 1.0
        step(sim)
        assert red.hitpoints == 0.0 and blue.hitpoints == 0.0
        assert not sim.live_red and not sim.live_blue

    def test_step_on_terminal_state_raises(self):
        sim, red, blue = self.separated_sim(gap=10.0)
        red.hitpoints = 1.0
        blue.hitpoints = 1.0
        step(sim)
        with pytest.raises(SimulationError):
            step(sim)


class TestRunSkirmish:
    def test_kiters_eliminate_immobile_melee(self):
        crawler = UnitTypeSpec("zealot", 160.0, 1e-6, 12.0, 16.0, 22)
        cfg = small_config(
            red_roster=((VULTURE, 5),),
            blue_roster=((crawler, 10),),
            max_frames=2500,
        )
        result = run_skirmish(cfg, [KITER], [passive_params()])
        assert result.winner == RED
        assert result.survivors_blue == 0
        assert result.survivors_red == 5

    def test_identical_genomes_symmetric_duel_is_a_draw(self):
        cfg = small_config(
            red_roster=((VULTURE, 1),),
            blue_roster=((VULTURE, 1),),
            formation=FormationSpec(kind="line", line_separation=100.0, line_span=10.0),
            max_frames=2500,
        )
        genome = passive_params(target_radius=640.0)
        result = run_skirmish(cfg, [genome], [genome])
        assert result.winner == DRAW
        assert result.survivors_red == 0 and result.survivors_blue == 0
        assert result.score_red == result.score_blue == pytest.approx(80.0 * 80.0)

    def test_zero_frame_cap_draws_at_spawn(self):
        cfg = small_config(max_frames=0)
        result = run_skirmish(cfg, [passive_params()], [passive_params()])
        assert result.frames_elapsed == 0
        assert result.winner == DRAW
        assert result.survivors_red == 5 and result.survivors_blue == 25

    def test_standoff_times_out_as_equal_fraction_draw(self):
        inert = passive_params(influence_weight=0.0, attract_coeff=0.0)
        cfg = small_config(red_roster=((VULTURE, 2),), blue_roster=((ZEALOT, 2),),
                           max_frames=400)
        result = run_skirmish(cfg, [inert], [inert])
        assert result.frames_elapsed == 400
        assert result.winner == DRAW

    def test_cycle_fast_forward_matches_honest_simulation(self):
        inert = passive_params(influence_weight=0.0, attract_coeff=0.0)
        cfg = small_config(red_roster=((VULTURE, 2),), blue_roster=((ZEALOT, 3),),
                           max_frames=300)
        fast = run_skirmish(cfg, [inert], [inert], detect_cycles=True)
        slow = run_skirmish(cfg, [inert], [inert], detect_cycles=False)
        assert fast == slow

    def test_result_is_reproducible(self):
        cfg = small_config(max_frames=800)
        a = run_skirmish(cfg, [KITER], [passive_params()])
        b = run_skirmish(cfg, [KITER], [passive_params()])
        assert a == b

    def test_timeout_winner_has_higher_hitpoint_fraction(self):
        # Red outranges blue but the cap lands before elimination.
        crawler = UnitTypeSpec("zealot", 160.0, 1e-6, 12.0, 16.0, 22)
        cfg = small_config(red_roster=((VULTURE, 5),), blue_roster=((crawler, 10),),
                           max_frames=80)
        result = run_skirmish(cfg, [KITER], [passive_params()])
        assert result.frames_elapsed == 80
        if result.winner != DRAW:
            assert result.winner == RED


class TestKiteTrace:
    def test_post_fire_hold_then_retreat_timeline(self):
        # A single ranged red unit against one inbound melee unit: red fires,
        # stands still for the post-fire wait, then pulls back.
        kiter = passive_params(kite_trigger_range=256.0, kite_hold_frames=5.0,
                               kite_retreat_dist=64.0, target_radius=500.0)
        charger = passive_params(target_radius=640.0)
        cfg = small_config(
            red_roster=((VULTURE, 1),),
            blue_roster=((ZEALOT, 1),),
            formation=FormationSpec(kind="line", line_separation=200.0, line_span=2.0),
            max_frames=120,
        )
        result, trace = run_skirmish(cfg, [kiter], [charger], collect_trace=True)
        fire_frames = [snap.frame for snap in trace.frames
                       if any(shot[0] == 0 for shot in snap.shots)]
        assert fire_frames, "red never fired"
        t = fire_frames[0]
        red_xy = {snap.frame: next((u[1], u[2]) for u in snap.units if u[0] == 0)
                  for snap in trace.frames}
        # Stationary on the firing frame and for the 5-frame wait after it.
        assert red_xy[t] == red_xy[t - 1]
        for frame in range(t + 1, t + 5):
            assert red_xy[frame] == red_xy[t]
        assert red_xy[t + 5] != red_xy[t + 4]


class TestComputeScore:
    def finished_sim(self):
        cfg = small_config()
        sim = spawn_skirmish(cfg, [passive_params()], [passive_params()])
        return cfg, sim

    def test_untouched_armies_score_only_saved_health(self):
        cfg, sim = self.finished_sim()
        assert compute_score(RED, sim.units, cfg) == pytest.approx(400.0 * 5)
        assert compute_score(BLUE, sim.units, cfg) == pytest.approx(160.0 * 25)

    def test_total_annihilation_scores_full_damage(self):
        cfg, sim = self.finished_sim()
        for u in sim.units:
            u.hitpoints = 0.0
        assert compute_score(RED, sim.units, cfg) == pytest.approx(160.0 * 25 * 160.0)

    def test_mixed_state_direct_substitution(self):
        # One vulture at 40/80 alive, one zealot damaged to 80/160, the rest
        # of the zealots untouched and the other vultures dead:
        # 400 * 0.5 + 160 * 80 = 13000.
        cfg, sim = self.finished_sim()
        for u in sim.live_red:
            u.hitpoints = 0.0
        sim.live_red[0].hitpoints = 40.0
        sim.live_blue[0].hitpoints = 80.0
        assert compute_score(RED, sim.units, cfg) == pytest.approx(13000.0)

    def test_matches_independent_straight_line_oracle(self):
        rng = random.Random(31)
        cfg = small_config(red_roster=((VULTURE, 3), (ZEALOT, 4)),
                           blue_roster=((ZEALOT, 5), (VULTURE, 2)))
        for _ in range(50):
            sim = spawn_skirmish(cfg, [passive_params()] * 2, [passive_params()] * 2)
            for u in sim.units:
                u.hitpoints = rng.choice([0.0, rng.uniform(0.0, u.type_spec.max_hitpoints)])
            for side in (RED, BLUE):
                expected = eq2_oracle(side, sim.units, cfg)
                assert compute_score(side, sim.units, cfg) == pytest.approx(expected, rel=1e-12)

    def test_normalized_damage_variant(self):
        cfg = small_config(normalize_damage=True)
        sim = spawn_skirmish(cfg, [passive_params()], [passive_params()])
        for u in sim.live_blue:
            u.hitpoints = 80.0  # half gone
        expected = 400.0 * 5 + 160.0 * 25 * 0.5
        assert compute_score(RED, sim.units, cfg) == pytest.approx(expected)


def eq2_oracle(side, units, cfg):
    """Straight-line score re-derivation used as the test oracle."""
    weights = cfg.weights_for(side)
    total = 0.0
    for u in units:
        if u.side == side:
            total += weights[u.type_spec.name].save_weight * u.hitpoints / u.type_spec.max_hitpoints
    for u in units:
        if u.side != side:
            removed = u.type_spec.max_hitpoints - u.hitpoints
            if cfg.normalize_damage:
                removed = removed / u.type_spec.max_hitpoints
            total += weights[u.type_spec.name].damage_weight * removed
    return total


class TestConservation:
    def test_damage_dealt_equals_enemy_hitpoints_removed(self):
        cfg = small_config(red_roster=((VULTURE, 3),), blue_roster=((ZEALOT, 6),),
                           max_frames=400)
        sim = spawn_skirmish(cfg, [KITER], [passive_params(target_radius=640.0)])
        while not sim.is_terminal():
            step(sim)
        removed_from_blue = sum(u.type_spec.max_hitpoints - u.hitpoints
                                for u in sim.units if u.side == BLUE)
        removed_from_red = sum(u.type_spec.max_hitpoints - u.hitpoints
                               for u in sim.units if u.side == RED)
        assert sim.damage_by[RED] == removed_from_blue
        assert sim.damage_by[BLUE] == removed_from_red
        assert removed_from_blue > 0.0


class TestReplayTrace:
    def test_frame_indices_strictly_increase_and_rerun_is_bit_exact(self):
        cfg = small_config(red_roster=((VULTURE, 2),), blue_roster=((ZEALOT, 3),),
                           max_frames=200)
        r1, t1 = run_skirmish(cfg, [KITER], [passive_params()], collect_trace=True)
        r2, t2 = run_skirmish(cfg, [KITER], [passive_params()], collect_trace=True)
        frames = [s.frame for s in t1.frames]
        assert frames == sorted(set(frames))
        assert t1.serialize() == t2.serialize()
        assert r1 == r2

    def test_serialized_line_format(self):
        cfg = small_config(red_roster=((VULTURE, 1),), blue_roster=((ZEALOT, 1),),
                           max_frames=3)
        _, trace = run_skirmish(cfg, [passive_params()], [passive_params()],
                                collect_trace=True)
        lines = trace.serialize().strip().split("\n")
        assert len(lines) == 4  # spawn snapshot + 3 frames
        first = lines[0].split(",")
        assert first[0] == "0"
        assert len(first) == 1 + 4 * 2  # frame index + (id, x, y, hp) per unit
