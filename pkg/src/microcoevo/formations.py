"""Spawn-position generators: circle, line, and random formations.

Each generator is a pure function of (geometry, roster sizes, seed); the
two sides always spawn in disjoint regions inside the map bounds.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigurationError

FORMATION_KINDS = ("circle", "line", "random")

# Keep the two half-disc arcs of the circle formation strictly apart.
_ARC_MARGIN = 0.05

# Minimum room per unit: area for 2-D regions, length for the line.
_AREA_PER_UNIT = 16.0
_LINE_SPACING = 2.0


@dataclass(frozen=True)
class FormationSpec:
    """Which formation to spawn and with what geometry.

    ``placement_seed`` of None defers to the skirmish seed. Geometry values
    of None are derived from the map size at generation time.
    """

    kind: str = "circle"
    placement_seed: Optional[int] = None
    circle_radius: Optional[float] = None
    line_separation: Optional[float] = None
    line_span: Optional[float] = None
    box_inset: float = 0.05  # random formation: margin as a fraction of map size

    def __post_init__(self):
        if self.kind not in FORMATION_KINDS:
            raise ConfigurationError(f"unknown formation kind: {self.kind!r}")


def generate_formation(
    spec: FormationSpec,
    red_count: int,
    blue_count: int,
    map_width: float,
    map_height: float,
    seed: int,
) -> tuple[list[tuple[float, float]], list[tuple[float, float]]]:
    """Spawn positions for both sides; deterministic in (spec, counts, seed)."""
    if red_count < 1 or blue_count < 1:
        raise ConfigurationError("both sides need at least one unit")
    effective_seed = spec.placement_seed if spec.placement_seed is not None else seed
    rng = random.Random(effective_seed)
    cx = map_width / 2.0
    cy = map_height / 2.0

    if spec.kind == "circle":
        radius = spec.circle_radius if spec.circle_radius is not None else min(map_width, map_height) * 0.25
        if radius <= 0 or radius > min(cx, cy, map_width - cx, map_height - cy):
            raise ConfigurationError(f"circle radius {radius} does not fit the map")
        half_area = math.pi * radius * radius / 2.0
        if half_area < _AREA_PER_UNIT * max(red_count, blue_count):
            raise ConfigurationError(
                f"roster of {max(red_count, blue_count)} too large for circle radius {radius}"
            )
        # Red takes the west arc, blue the mirrored east arc.
        red = _arc_points(rng, red_count, cx, cy, radius, math.pi / 2 + _ARC_MARGIN, 3 * math.pi / 2 - _ARC_MARGIN)
        blue = _arc_points(rng, blue_count, cx, cy, radius, -math.pi / 2 + _ARC_MARGIN, math.pi / 2 - _ARC_MARGIN)
        return red, blue

    if spec.kind == "line":
        separation = spec.line_separation if spec.line_separation is not None else map_width * 0.3
        span = spec.line_span if spec.line_span is not None else map_height * 0.5
        if separation <= 0 or separation >= map_width:
            raise ConfigurationError(f"line separation {separation} does not fit the map")
        if span <= 0 or span > map_height:
            raise ConfigurationError(f"line span {span} does not fit the map")
        if span < _LINE_SPACING * max(red_count, blue_count):
            raise ConfigurationError(
                f"roster of {max(red_count, blue_count)} too large for line span {span}"
            )
        red_x = cx - separation / 2.0
        blue_x = cx + separation / 2.0
        red = [(red_x, cy + (rng.random() - 0.5) * span) for _ in range(red_count)]
        blue = [(blue_x, cy + (rng.random() - 0.5) * span) for _ in range(blue_count)]
        return red, blue

    # random: uniform inside side-disjoint boxes left/right of center.
    inset_x = map_width * spec.box_inset
    inset_y = map_height * spec.box_inset
    gap = map_width * 0.05
    red_box = (inset_x, cx - gap, inset_y, map_height - inset_y)
    blue_box = (cx + gap, map_width - inset_x, inset_y, map_height - inset_y)
    for x0, x1, y0, y1 in (red_box, blue_box):
        if x1 <= x0 or y1 <= y0:
            raise ConfigurationError("random-formation boxes do not fit the map")
        if (x1 - x0) * (y1 - y0) < _AREA_PER_UNIT * max(red_count, blue_count):
            raise ConfigurationError("roster too large for random-formation boxes")
    red = [_box_point(rng, red_box) for _ in range(red_count)]
    blue = [_box_point(rng, blue_box) for _ in range(blue_count)]
    return red, blue


def _arc_points(rng, count, cx, cy, radius, angle_lo, angle_hi):
    points = []
    for _ in range(count):
        angle = angle_lo + rng.random() * (angle_hi - angle_lo)
        r = radius * math.sqrt(rng.random())
        points.append((cx + r * math.cos(angle), cy + r * math.sin(angle)))
    return points


def _box_point(rng, box):
    x0, x1, y0, y1 = box
    return (x0 + rng.random() * (x1 - x0), y0 + rng.random() * (y1 - y0))
