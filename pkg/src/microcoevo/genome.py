"""The twelve evolved micro parameters for one unit type, and their ranges.

Two parameters shape the influence map used to pick an attack location,
four shape the potential-field group movement, and six drive reactive
control (target selection, kiting, fleeing).
"""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class MicroGenome:
    influence_weight: float   # weight an enemy stamps on its grid cell
    influence_range: float    # decay radius of that stamp, in grid cells
    attract_coeff: float      # attraction toward the target cell
    attract_exp: float
    repulse_coeff: float      # repulsion between friendly units
    repulse_exp: float
    weak_target_hp: float     # prefer enemies below this hitpoint level
    target_radius: float      # only consider enemies within this distance
    kite_trigger_range: float # threat distance that starts a kite cycle
    kite_hold_frames: float   # wait this long after firing before retreating
    kite_retreat_dist: float  # how far to pull back
    flee_hp: float            # withdraw a unit whose hitpoints drop below this


PARAM_NAMES = tuple(f.name for f in fields(MicroGenome))
PARAM_COUNT = len(PARAM_NAMES)
BITS_PER_PARAM = 8

# Lower/upper decode bounds per parameter. Chosen to bracket the default
# unit statistics; experiments may widen them through RunConfig. Two caps
# matter: the flee threshold tops out at half of melee health (any higher
# and a random individual can spawn below its own threshold and run from
# frame zero, which melee units can never punish), and the post-fire wait
# tops out at the longest default cooldown (holding longer than a reload
# freezes a unit with a ready weapon).
DEFAULT_RANGES: dict[str, tuple[float, float]] = {
    "influence_weight": (0.0, 64.0),
    "influence_range": (0.0, 10.0),
    "attract_coeff": (0.0, 64.0),
    "attract_exp": (0.0, 2.0),
    "repulse_coeff": (0.0, 64.0),
    "repulse_exp": (-3.0, 0.0),
    "weak_target_hp": (0.0, 160.0),
    "target_radius": (0.0, 640.0),
    "kite_trigger_range": (0.0, 256.0),
    "kite_hold_frames": (0.0, 30.0),
    "kite_retreat_dist": (0.0, 128.0),
    "flee_hp": (0.0, 80.0),
}


def range_table_as_tuples(ranges: dict[str, tuple[float, float]]) -> list[tuple[float, float]]:
    """Order a range mapping by parameter position, validating coverage."""
    missing = [n for n in PARAM_NAMES if n not in ranges]
    if missing:
        raise ValueError(f"range table missing parameters: {missing}")
    extra = [n for n in ranges if n not in PARAM_NAMES]
    if extra:
        raise ValueError(f"range table has unknown parameters: {extra}")
    return [ranges[n] for n in PARAM_NAMES]


def format_genome(genome: MicroGenome, label: str = "") -> str:
    """Pretty-print decoded parameter values, one ``name=value`` per line."""
    head = f"[{label}]\n" if label else ""
    body = "\n".join(f"{n}={getattr(genome, n):.6g}" for n in PARAM_NAMES)
    return head + body
