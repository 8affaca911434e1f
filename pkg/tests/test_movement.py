"""Potential-field force law and group movement composition."""

import math

import pytest

from microcoevo.movement import MIN_FORCE_DISTANCE, group_move_vector, pf_force


def test_unit_distance_nullifies_exponents():
    assert pf_force(3.0, 1.7, 4.0, -2.3, 1.0) == pytest.approx(7.0)


def test_pure_attraction_direct_substitution():
    assert pf_force(2.0, 1.0, 0.0, 0.0, 3.0) == pytest.approx(6.0)


def test_mixed_terms_direct_substitution():
    assert pf_force(1.0, 2.0, 4.0, -1.0, 2.0) == pytest.approx(6.0)


def test_zero_distance_clamped():
    assert pf_force(1.0, 1.0, 0.0, 0.0, 0.0) == pytest.approx(MIN_FORCE_DISTANCE)
    assert pf_force(0.0, 0.0, 8.0, -1.0, 0.0) == pytest.approx(8.0 / MIN_FORCE_DISTANCE)


def test_monotone_in_coefficients():
    for d in (0.7, 1.0, 13.0, 400.0):
        low = pf_force(1.0, 1.2, 2.0, -1.0, d)
        assert pf_force(2.0, 1.2, 2.0, -1.0, d) > low
        assert pf_force(1.0, 1.2, 3.0, -1.0, d) > low


def test_continuity_near_clamp_boundary():
    eps = 1e-9
    below = pf_force(2.0, 1.5, 3.0, -2.0, MIN_FORCE_DISTANCE - eps)
    above = pf_force(2.0, 1.5, 3.0, -2.0, MIN_FORCE_DISTANCE + eps)
    assert abs(below - above) < 1e-6


def test_unit_at_target_with_no_friends_stays_put():
    v = group_move_vector((10.0, 10.0), (10.0, 10.0), [], 5.0, 1.0, 2.0, -1.0, 4.0)
    assert v == (0.0, 0.0)


def test_single_attraction_points_at_target_with_clamped_magnitude():
    v = group_move_vector((0.0, 0.0), (100.0, 0.0), [], 50.0, 1.0, 0.0, 0.0, 4.0)
    assert v == pytest.approx((4.0, 0.0))
    weak = group_move_vector((0.0, 0.0), (100.0, 0.0), [], 0.01, 0.0, 0.0, 0.0, 4.0)
    assert weak == pytest.approx((0.01, 0.0))


def test_symmetric_friend_repulsion_cancels():
    v = group_move_vector(
        (0.0, 0.0),
        (100.0, 0.0),
        [(0.0, 10.0), (0.0, -10.0)],
        3.0, 1.0, 7.0, -1.0, 4.0,
    )
    assert v[1] == pytest.approx(0.0)
    assert v[0] == pytest.approx(4.0)


def test_resultant_never_exceeds_max_speed():
    positions = [(3.0, 1.0), (-2.0, 4.0), (0.5, 0.5)]
    v = group_move_vector((0.0, 0.0), (9.0, 9.0), positions, 60.0, 2.0, 60.0, -0.5, 5.0)
    assert math.hypot(*v) <= 5.0 + 1e-12
