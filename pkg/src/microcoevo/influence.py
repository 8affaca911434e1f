"""Influence maps: a grid whose cells accumulate decayed enemy presence.

Each enemy stamps its weight onto every cell within its influence range,
decaying linearly with Chebyshev cell distance. The weakest occupied cell
(closest to an enemy on ties) is the attack location a group moves toward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    cell_size: float
    width: int   # cells
    height: int  # cells

    @classmethod
    def for_map(cls, map_width: float, map_height: float, cell_size: float = 32.0) -> "GridSpec":
        return cls(
            cell_size=cell_size,
            width=max(1, math.ceil(map_width / cell_size)),
            height=max(1, math.ceil(map_height / cell_size)),
        )

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        """(row, col) of the cell containing a map position, clamped to the grid."""
        col = min(max(int(x // self.cell_size), 0), self.width - 1)
        row = min(max(int(y // self.cell_size), 0), self.height - 1)
        return row, col

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return ((col + 0.5) * self.cell_size, (row + 0.5) * self.cell_size)


@dataclass
class InfluenceGrid:
    spec: GridSpec
    values: np.ndarray  # shape (height, width), float64, >= 0


def influence_patch(weight: float, decay_range: float) -> np.ndarray:
    """Contribution of a single enemy to the cells around its own cell.

    Cell at Chebyshev distance d <= decay_range receives
    weight * (decay_range + 1 - d) / (decay_range + 1).
    """
    radius = int(decay_range)
    size = 2 * radius + 1
    rows = np.arange(-radius, radius + 1)
    cheb = np.maximum(np.abs(rows)[:, None], np.abs(rows)[None, :]).astype(np.float64)
    patch = weight * (decay_range + 1.0 - cheb) / (decay_range + 1.0)
    return patch.reshape(size, size)


def build_influence_grid(
    enemy_positions: list[tuple[float, float]],
    weight: float,
    decay_range: float,
    spec: GridSpec,
    patch: np.ndarray | None = None,
) -> InfluenceGrid:
    """Sum every enemy's decayed contribution into one grid.

    A precomputed ``patch`` (from :func:`influence_patch` with the same
    weight/range) may be passed to skip rebuilding it per call.
    """
    if decay_range < 0:
        raise ValueError(f"decay_range must be >= 0, got {decay_range}")
    values = np.zeros((spec.height, spec.width), dtype=np.float64)
    if patch is None:
        patch = influence_patch(weight, decay_range)
    radius = patch.shape[0] // 2
    for x, y in enemy_positions:
        row, col = spec.cell_of(x, y)
        r0, r1 = row - radius, row + radius + 1
        c0, c1 = col - radius, col + radius + 1
        pr0 = max(0, -r0)
        pc0 = max(0, -c0)
        pr1 = patch.shape[0] - max(0, r1 - spec.height)
        pc1 = patch.shape[1] - max(0, c1 - spec.width)
        values[max(r0, 0) : min(r1, spec.height), max(c0, 0) : min(c1, spec.width)] += patch[
            pr0:pr1, pc0:pc1
        ]
    return InfluenceGrid(spec=spec, values=values)


class NoTargetError(Exception):
    """Raised when no positive-influence cell exists to aim at."""


def select_target_cell(
    grid: InfluenceGrid,
    enemy_positions: list[tuple[float, float]],
) -> tuple[int, int]:
    """Pick the weakest positive cell, preferring cells nearer an enemy.

    Returns (row, col). Ties on value break by least Euclidean distance
    from the cell center to the nearest enemy, then lexicographically.
    Raises NoTargetError when there are no enemies or no positive cells
    (the caller falls back to the map center).
    """
    if not enemy_positions:
        raise NoTargetError("no enemies alive")
    values = grid.values
    positive = values > 0.0
    if not positive.any():
        raise NoTargetError("no positive influence anywhere")
    min_value = values[positive].min()
    rows, cols = np.nonzero(values == min_value)
    if rows.shape[0] == 1:
        return int(rows[0]), int(cols[0])
    spec = grid.spec
    ex = np.fromiter((p[0] for p in enemy_positions), np.float64, len(enemy_positions))
    ey = np.fromiter((p[1] for p in enemy_positions), np.float64, len(enemy_positions))
    cx = (cols + 0.5) * spec.cell_size
    cy = (rows + 0.5) * spec.cell_size
    d2 = ((cx[:, None] - ex[None, :]) ** 2 + (cy[:, None] - ey[None, :]) ** 2).min(axis=1)
    best = np.lexsort((cols, rows, d2))[0]
    return int(rows[best]), int(cols[best])
