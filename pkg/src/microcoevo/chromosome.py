"""Bit-string chromosomes and the genetic operators that act on them.

Each micro parameter is an 8-bit field decoded linearly onto its range:
96 bits control one unit type, 192 control a two-type force (the first
twelve fields drive the first roster type, the next twelve the second).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .genome import BITS_PER_PARAM, PARAM_COUNT, PARAM_NAMES, MicroGenome, range_table_as_tuples

FIELD_MAX = (1 << BITS_PER_PARAM) - 1


@dataclass(frozen=True)
class BitChromosome:
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) % (BITS_PER_PARAM * PARAM_COUNT) != 0 or not self.bits:
            raise ValueError(
                f"chromosome length must be a positive multiple of "
                f"{BITS_PER_PARAM * PARAM_COUNT}, got {len(self.bits)}"
            )
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("chromosome bits must be 0 or 1")

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def genome_count(self) -> int:
        return len(self.bits) // (BITS_PER_PARAM * PARAM_COUNT)

    def to_hex(self) -> str:
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return f"{value:0{len(self.bits) // 4}x}"

    @classmethod
    def from_hex(cls, text: str) -> "BitChromosome":
        n = len(text) * 4
        value = int(text, 16)
        bits = tuple((value >> (n - 1 - i)) & 1 for i in range(n))
        return cls(bits)


def random_chromosome(rng: random.Random, genome_count: int = 1) -> BitChromosome:
    n = BITS_PER_PARAM * PARAM_COUNT * genome_count
    return BitChromosome(tuple(rng.getrandbits(1) for _ in range(n)))


def field_values(chromosome: BitChromosome) -> list[int]:
    """Big-endian integer value of each 8-bit field, in genome order."""
    bits = chromosome.bits
    values = []
    for start in range(0, len(bits), BITS_PER_PARAM):
        v = 0
        for b in bits[start : start + BITS_PER_PARAM]:
            v = (v << 1) | b
        values.append(v)
    return values


def decode(chromosome: BitChromosome, ranges: dict[str, tuple[float, float]]) -> list[MicroGenome]:
    """Decode into one MicroGenome per 12-parameter block, in roster order.

    Field value v on range [lo, hi] maps to lo + (v/255)*(hi - lo).
    """
    bounds = range_table_as_tuples(ranges)
    values = field_values(chromosome)
    genomes = []
    for g in range(chromosome.genome_count):
        block = values[g * PARAM_COUNT : (g + 1) * PARAM_COUNT]
        params = [
            lo + (v / FIELD_MAX) * (hi - lo) for v, (lo, hi) in zip(block, bounds)
        ]
        genomes.append(MicroGenome(*params))
    return genomes


def encode(genomes: list[MicroGenome], ranges: dict[str, tuple[float, float]]) -> BitChromosome:
    """Inverse of decode, up to the 8-bit quantization of each field."""
    bounds = range_table_as_tuples(ranges)
    bits: list[int] = []
    for genome in genomes:
        for name, (lo, hi) in zip(PARAM_NAMES, bounds):
            value = getattr(genome, name)
            v = 0 if hi == lo else round((value - lo) / (hi - lo) * FIELD_MAX)
            v = min(max(v, 0), FIELD_MAX)
            for i in range(BITS_PER_PARAM - 1, -1, -1):
                bits.append((v >> i) & 1)
    return BitChromosome(tuple(bits))


def crossover(
    a: BitChromosome,
    b: BitChromosome,
    crossover_prob: float,
    rng: random.Random,
) -> tuple[BitChromosome, BitChromosome]:
    """One-point crossover with probability ``crossover_prob``, else copies.

    The cut is uniform over [1, L-1] so a crossover always exchanges at
    least one bit.
    """
    if len(a) != len(b):
        raise ValueError(f"parent lengths differ: {len(a)} vs {len(b)}")
    if rng.random() >= crossover_prob:
        return a, b
    cut = rng.randrange(1, len(a))
    child1 = BitChromosome(a.bits[:cut] + b.bits[cut:])
    child2 = BitChromosome(b.bits[:cut] + a.bits[cut:])
    return child1, child2


def mutate(c: BitChromosome, mutation_prob: float, rng: random.Random) -> BitChromosome:
    """Flip each bit independently with probability ``mutation_prob``."""
    bits = tuple(b ^ 1 if rng.random() < mutation_prob else b for b in c.bits)
    return BitChromosome(bits)
