"""Unit type definitions: static combat statistics for a class of units."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class UnitTypeSpec:
    """Combat statistics shared by every unit of one type.

    Speeds and cooldowns are per frame; ranges and positions are in map
    units. One simulation tick is one frame.
    """

    name: str
    max_hitpoints: float
    move_speed: float
    attack_range: float
    attack_damage: float
    attack_cooldown: int

    def __post_init__(self):
        if self.max_hitpoints <= 0:
            raise ValueError(f"max_hitpoints must be > 0, got {self.max_hitpoints}")
        if self.move_speed <= 0:
            raise ValueError(f"move_speed must be > 0, got {self.move_speed}")
        if self.attack_range < 0:
            raise ValueError(f"attack_range must be >= 0, got {self.attack_range}")
        if self.attack_cooldown < 1:
            raise ValueError(f"attack_cooldown must be >= 1, got {self.attack_cooldown}")


@dataclass(frozen=True)
class ScoreWeights:
    """Per-unit-type score weights.

    ``save_weight`` rewards keeping a friendly unit of this type alive
    (applied to its remaining hitpoint fraction); ``damage_weight`` rewards
    hitpoints removed from an enemy unit of this type.
    """

    save_weight: float
    damage_weight: float


# Fast fragile ranged unit vs slow durable melee unit. Hitpoints (80/160)
# and the score weights come from the source game; the remaining statistics
# mirror its relative profile and are configurable per skirmish.
VULTURE = UnitTypeSpec(
    name="vulture",
    max_hitpoints=80.0,
    move_speed=6.4,
    attack_range=160.0,
    attack_damage=20.0,
    attack_cooldown=30,
)

ZEALOT = UnitTypeSpec(
    name="zealot",
    max_hitpoints=160.0,
    move_speed=4.0,
    attack_range=12.0,
    attack_damage=16.0,
    attack_cooldown=22,
)

DEFAULT_SCORE_WEIGHTS: dict[str, ScoreWeights] = {
    "vulture": ScoreWeights(save_weight=400.0, damage_weight=80.0),
    "zealot": ScoreWeights(save_weight=160.0, damage_weight=160.0),
}

UNIT_TYPES: dict[str, UnitTypeSpec] = {
    "vulture": VULTURE,
    "zealot": ZEALOT,
}
