"""Potential-field movement: attraction to a target point, repulsion between
friendly units. Force magnitude follows coeff * distance ** exponent."""

from __future__ import annotations

import math

import numpy as np

# Distances are clamped here before exponentiation so negative exponents
# cannot blow up at contact range.
MIN_FORCE_DISTANCE = 0.5

# Below this separation a direction is undefined and the contribution is zero.
EPSILON = 1e-9


def pf_force(
    attract_coeff: float,
    attract_exp: float,
    repulse_coeff: float,
    repulse_exp: float,
    distance: float,
) -> float:
    """Combined field magnitude at a given distance."""
    d = max(distance, MIN_FORCE_DISTANCE)
    return attract_coeff * d**attract_exp + repulse_coeff * d**repulse_exp


def group_move_vector(
    position: tuple[float, float],
    target_point: tuple[float, float],
    friend_positions: list[tuple[float, float]],
    attract_coeff: float,
    attract_exp: float,
    repulse_coeff: float,
    repulse_exp: float,
    max_speed: float,
) -> tuple[float, float]:
    """Attraction toward the target plus repulsion away from each friend.

    The resultant is clamped to ``max_speed``. A coincident target or
    friend contributes nothing (no defined direction).
    """
    px, py = position
    tx, ty = target_point
    return _steer(
        px, py, tx, ty,
        [(-1, fx, fy) for fx, fy in friend_positions], -1,
        attract_coeff, attract_exp, repulse_coeff, repulse_exp, max_speed,
    )


def _steer(
    px, py, tx, ty, friends, skip_id,
    attract_coeff, attract_exp, repulse_coeff, repulse_exp, max_speed,
):
    """Hot-path core of group_move_vector over (id, x, y) friend views.

    Entries whose id equals ``skip_id`` (the moving unit itself) are ignored.
    """
    sqrt = math.sqrt
    vx = vy = 0.0

    dx = tx - px
    dy = ty - py
    d = sqrt(dx * dx + dy * dy)
    if d > EPSILON:
        dc = d if d > MIN_FORCE_DISTANCE else MIN_FORCE_DISTANCE
        mag = attract_coeff * dc**attract_exp
        vx = mag * dx / d
        vy = mag * dy / d

    for fid, fx, fy in friends:
        if fid == skip_id:
            continue
        dx = px - fx
        dy = py - fy
        d = sqrt(dx * dx + dy * dy)
        if d > EPSILON:
            dc = d if d > MIN_FORCE_DISTANCE else MIN_FORCE_DISTANCE
            mag = repulse_coeff * dc**repulse_exp
            vx += mag * dx / d
            vy += mag * dy / d

    norm = sqrt(vx * vx + vy * vy)
    if norm > max_speed:
        scale = max_speed / norm
        vx *= scale
        vy *= scale
    return vx, vy


def side_repulsion(
    xs: list[float],
    ys: list[float],
    coeffs: list[float],
    exps: list[float],
) -> tuple[list[float], list[float]]:
    """All units' friend-repulsion sums for one side, batched.

    Row i holds the repulsion acting on unit i from every other unit of the
    same side; coefficients and exponents are the moving unit's own. One
    call per side per frame replaces the per-unit pairwise loop.
    """
    n = len(xs)
    if n <= 1:
        return [0.0] * n, [0.0] * n
    x = np.asarray(xs)
    y = np.asarray(ys)
    dx = x[:, None] - x[None, :]
    dy = y[:, None] - y[None, :]
    d = np.sqrt(dx * dx + dy * dy)
    # Self pairs and coincident units contribute nothing (no direction).
    d[d <= EPSILON] = np.inf
    clamped = np.maximum(d, MIN_FORCE_DISTANCE)
    mag = np.asarray(coeffs)[:, None] * clamped ** np.asarray(exps)[:, None]
    with np.errstate(invalid="ignore"):
        w = np.where(np.isfinite(d), mag / d, 0.0)
    rep_x = (w * dx).sum(axis=1)
    rep_y = (w * dy).sum(axis=1)
    return rep_x.tolist(), rep_y.tolist()
