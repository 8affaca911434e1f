"""Two-population competitive coevolution over bit chromosomes.

Simple mode evaluates every member against the whole opposing population.
Enhanced mode replaces that with a small diverse opponent sample plus a
hall of past champions, shares win credit among members that beat the same
opponent, and cuts the per-generation evaluation count accordingly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .chromosome import BitChromosome, crossover, mutate, random_chromosome
from .seeds import derive_seed
from .sim import BLUE, DRAW, RED, SkirmishResult, opposite

SIMPLE = "simple"
ENHANCED = "enhanced"


@dataclass
class Population:
    side: str
    members: list[BitChromosome]
    rng: random.Random
    generation_index: int = 0

    @classmethod
    def random(cls, side: str, size: int, genome_count: int, master_seed: int) -> "Population":
        rng = random.Random(derive_seed(master_seed, f"population/{side}"))
        members = [random_chromosome(rng, genome_count) for _ in range(size)]
        return cls(side=side, members=members, rng=rng)

    def __len__(self) -> int:
        return len(self.members)


@dataclass
class EvaluationMatrix:
    """Scores and the defeat relation for one population's evaluation.

    Row m is a population member, column o one of its opponents; every cell
    comes from one skirmish. ``defeats[m][o]`` means the member won that
    fight, ``losses[m][o]`` that the opponent won; draws set neither.
    """

    side: str
    member_scores: list[list[float]]
    opponent_scores: list[list[float]]
    defeats: list[list[bool]]
    losses: list[list[bool]]

    @property
    def member_count(self) -> int:
        return len(self.member_scores)

    @property
    def opponent_count(self) -> int:
        return len(self.member_scores[0]) if self.member_scores else 0

    def mean_member_scores(self) -> list[float]:
        return [sum(row) / len(row) for row in self.member_scores]

    def defeat_counts_per_opponent(self) -> list[int]:
        counts = [0] * self.opponent_count
        for row in self.defeats:
            for o, won in enumerate(row):
                if won:
                    counts[o] += 1
        return counts


@dataclass
class HallOfFame:
    """Ring of the most recent generation champions, newest first."""

    capacity: int = 5
    champions: list[BitChromosome] = field(default_factory=list)

    def update(self, champion: BitChromosome) -> None:
        self.champions.insert(0, champion)
        del self.champions[self.capacity:]

    def __len__(self) -> int:
        return len(self.champions)


@dataclass
class SharedSample:
    """Opponents drawn from the opposing population's previous generation."""

    members: list[BitChromosome]
    indices: list[int]

    def __len__(self) -> int:
        return len(self.members)


def matrices_from_pairwise(
    red_members: list[BitChromosome],
    blue_members: list[BitChromosome],
    results: list[SkirmishResult],
) -> tuple[EvaluationMatrix, EvaluationMatrix]:
    """Split one full red-cross-blue skirmish batch into both side matrices.

    ``results`` is ordered red-major: red member i versus blue member j at
    index i * len(blue) + j.
    """
    p_red = len(red_members)
    p_blue = len(blue_members)
    red_scores = [[0.0] * p_blue for _ in range(p_red)]
    blue_scores = [[0.0] * p_red for _ in range(p_blue)]
    red_defeats = [[False] * p_blue for _ in range(p_red)]
    blue_defeats = [[False] * p_red for _ in range(p_blue)]
    for i in range(p_red):
        for j in range(p_blue):
            r = results[i * p_blue + j]
            red_scores[i][j] = r.score_red
            blue_scores[j][i] = r.score_blue
            if r.winner == RED:
                red_defeats[i][j] = True
            elif r.winner == BLUE:
                blue_defeats[j][i] = True
    red_losses = [[blue_defeats[j][i] for j in range(p_blue)] for i in range(p_red)]
    blue_losses = [[red_defeats[i][j] for i in range(p_red)] for j in range(p_blue)]
    red_matrix = EvaluationMatrix(RED, red_scores,
                                  [[blue_scores[j][i] for j in range(p_blue)] for i in range(p_red)],
                                  red_defeats, red_losses)
    blue_matrix = EvaluationMatrix(BLUE, blue_scores,
                                   [[red_scores[i][j] for i in range(p_red)] for j in range(p_blue)],
                                   blue_defeats, blue_losses)
    return red_matrix, blue_matrix


def evaluate_pairwise(pop_red: Population, pop_blue: Population, runner):
    """All p*p skirmishes; fitness is the mean score over every opponent."""
    pairs = [(r, b) for r in pop_red.members for b in pop_blue.members]
    results = runner.run_pairs(pairs)
    red_matrix, blue_matrix = matrices_from_pairwise(pop_red.members, pop_blue.members, results)
    return red_matrix, blue_matrix, red_matrix.mean_member_scores(), blue_matrix.mean_member_scores()


def evaluate_sampled(pop: Population, opponents: list[BitChromosome], runner,
                     share_raw_scores: bool = False):
    """Each member fights the opponent list (shared sample plus hall of fame);
    fitness is shared win credit with mean raw score as tie-break."""
    if not opponents:
        raise ValueError("sampled evaluation needs at least one opponent")
    if pop.side == RED:
        pairs = [(m, o) for m in pop.members for o in opponents]
    else:
        pairs = [(o, m) for m in pop.members for o in opponents]
    results = runner.run_pairs(pairs)
    n_opp = len(opponents)
    member_scores = []
    opponent_scores = []
    defeats = []
    losses = []
    for m in range(len(pop.members)):
        row = results[m * n_opp : (m + 1) * n_opp]
        member_scores.append([r.score(pop.side) for r in row])
        opponent_scores.append([r.score(opposite(pop.side)) for r in row])
        defeats.append([r.winner == pop.side for r in row])
        losses.append([r.winner == opposite(pop.side) for r in row])
    matrix = EvaluationMatrix(pop.side, member_scores, opponent_scores, defeats, losses)
    return matrix, shared_fitness(matrix, share_raw_scores=share_raw_scores)


def shared_fitness(matrix: EvaluationMatrix, share_raw_scores: bool = False) -> list[float]:
    """Divide each defeated opponent's credit among everyone who beat it.

    Opponent i beaten by N_i members contributes 1/N_i to each of them (or
    score/N_i with ``share_raw_scores``), so rare wins are worth the most.
    Members that defeated nobody score zero.
    """
    counts = matrix.defeat_counts_per_opponent()
    fitness = []
    for m, row in enumerate(matrix.defeats):
        total = 0.0
        for o, won in enumerate(row):
            if won:
                credit = matrix.member_scores[m][o] if share_raw_scores else 1.0
                total += credit / counts[o]
        fitness.append(total)
    return fitness


def selection_keys(fitness: list[float], matrix: EvaluationMatrix) -> list[tuple[float, float]]:
    """Total ordering for selection: fitness first, mean raw score second."""
    means = matrix.mean_member_scores()
    return list(zip(fitness, means))


def build_shared_sample(
    opposing_matrix: Optional[EvaluationMatrix],
    opposing_members: list[BitChromosome],
    k: int,
    rng: Optional[random.Random] = None,
) -> SharedSample:
    """Greedy-coverage opponent sample from the opposing population.

    Repeatedly picks the opponent that defeated the most of our individuals
    not yet covered by the sample (ties: more total defeats, then lower
    index), then pads with the highest-raw-fitness leftovers. Without a
    previous-generation matrix (generation zero) the sample is uniform
    random without replacement.
    """
    k = min(k, len(opposing_members))
    if opposing_matrix is None:
        if rng is None:
            raise ValueError("generation-zero sampling needs an rng")
        indices = sorted(rng.sample(range(len(opposing_members)), k))
        return SharedSample([opposing_members[i] for i in indices], indices)

    if opposing_matrix.member_count != len(opposing_members):
        raise ValueError("matrix rows do not match the opposing population")
    defeat_sets = [
        frozenset(o for o, won in enumerate(row) if won)
        for row in opposing_matrix.defeats
    ]
    chosen: list[int] = []
    covered: set[int] = set()
    available = set(range(len(opposing_members)))
    while len(chosen) < k:
        best_idx = None
        best_key = None
        for i in sorted(available):
            gain = len(defeat_sets[i] - covered)
            key = (-gain, -len(defeat_sets[i]), i)
            if best_key is None or key < best_key:
                best_key = key
                best_idx = i
        if best_idx is None or -best_key[0] == 0:
            break  # nothing new to cover; switch to fitness padding
        chosen.append(best_idx)
        covered |= defeat_sets[best_idx]
        available.discard(best_idx)
    if len(chosen) < k:
        means = opposing_matrix.mean_member_scores()
        padding = sorted(available, key=lambda i: (-means[i], i))
        chosen.extend(padding[: k - len(chosen)])
    return SharedSample([opposing_members[i] for i in chosen], chosen)


def update_hall_of_fame(hof: HallOfFame, champion: BitChromosome) -> HallOfFame:
    hof.update(champion)
    return hof


def champion_index(keys: list[tuple[float, float]]) -> int:
    best = 0
    for i in range(1, len(keys)):
        if keys[i] > keys[best]:
            best = i
    return best


def breed(pop: Population, keys: list[tuple[float, float]],
          crossover_prob: float, mutation_prob: float) -> Population:
    """Binary tournament selection, one-point crossover, bit mutation, and
    elitism of one (the champion passes through untouched)."""
    rng = pop.rng
    size = len(pop.members)
    elite = pop.members[champion_index(keys)]
    next_members = [elite]

    def tournament() -> BitChromosome:
        a = rng.randrange(size)
        b = rng.randrange(size)
        if keys[b] > keys[a] or (keys[b] == keys[a] and b < a):
            a = b
        return pop.members[a]

    while len(next_members) < size:
        child1, child2 = crossover(tournament(), tournament(), crossover_prob, rng)
        next_members.append(mutate(child1, mutation_prob, rng))
        if len(next_members) < size:
            next_members.append(mutate(child2, mutation_prob, rng))
    return Population(side=pop.side, members=next_members, rng=rng,
                      generation_index=pop.generation_index + 1)


@dataclass
class GenerationReport:
    generation: int
    mode: str
    evaluations: int
    red_champion: BitChromosome
    blue_champion: BitChromosome
    red_champion_fitness: float
    blue_champion_fitness: float


class CoevolutionEngine:
    """Drives both populations one generation at a time.

    The engine owns populations, halls of fame, and shared samples; the
    skirmish runner is injected so tests can count or fake evaluations.
    """

    def __init__(
        self,
        runner,
        population_size: int,
        genome_counts: tuple[int, int],
        master_seed: int,
        mode: str = SIMPLE,
        crossover_prob: float = 0.95,
        mutation_prob: float = 0.03,
        sample_size: int = 5,
        hof_size: int = 5,
        share_raw_scores: bool = False,
    ):
        if mode not in (SIMPLE, ENHANCED):
            raise ValueError(f"unknown mode {mode!r}")
        self.runner = runner
        self.mode = mode
        self.crossover_prob = crossover_prob
        self.mutation_prob = mutation_prob
        self.sample_size = sample_size
        self.share_raw_scores = share_raw_scores
        self.populations = {
            RED: Population.random(RED, population_size, genome_counts[0], master_seed),
            BLUE: Population.random(BLUE, population_size, genome_counts[1], master_seed),
        }
        self.hofs = {RED: HallOfFame(hof_size), BLUE: HallOfFame(hof_size)}
        self.samples: dict[str, Optional[SharedSample]] = {RED: None, BLUE: None}
        self._sample_rng = random.Random(derive_seed(master_seed, "shared-sample/generation0"))
        self.generation = 0
        self.total_evaluations = 0

    def opponents_for(self, side: str) -> list[BitChromosome]:
        """Opponent list for `side` members: shared sample then hall entries."""
        sample = self.samples[side]
        if sample is None:
            sample = build_shared_sample(
                None, self.populations[opposite(side)].members,
                self.sample_size, rng=self._sample_rng,
            )
            self.samples[side] = sample
        return list(sample.members) + list(self.hofs[opposite(side)].champions)

    def planned_evaluations(self) -> int:
        """Exact skirmish count the next step_generation will perform."""
        p_red = len(self.populations[RED])
        p_blue = len(self.populations[BLUE])
        if self.mode == SIMPLE:
            return p_red * p_blue
        return (p_red * len(self.opponents_for(RED))
                + p_blue * len(self.opponents_for(BLUE)))

    def step_generation(self) -> GenerationReport:
        pop_red = self.populations[RED]
        pop_blue = self.populations[BLUE]
        before = self.runner.skirmishes_run

        if self.mode == SIMPLE:
            red_matrix, blue_matrix, red_fitness, blue_fitness = evaluate_pairwise(
                pop_red, pop_blue, self.runner)
        else:
            red_matrix, red_fitness = evaluate_sampled(
                pop_red, self.opponents_for(RED), self.runner, self.share_raw_scores)
            blue_matrix, blue_fitness = evaluate_sampled(
                pop_blue, self.opponents_for(BLUE), self.runner, self.share_raw_scores)

        evaluations = self.runner.skirmishes_run - before
        self.total_evaluations += evaluations

        red_keys = selection_keys(red_fitness, red_matrix)
        blue_keys = selection_keys(blue_fitness, blue_matrix)
        red_champ_idx = champion_index(red_keys)
        blue_champ_idx = champion_index(blue_keys)
        report = GenerationReport(
            generation=self.generation,
            mode=self.mode,
            evaluations=evaluations,
            red_champion=pop_red.members[red_champ_idx],
            blue_champion=pop_blue.members[blue_champ_idx],
            red_champion_fitness=red_fitness[red_champ_idx],
            blue_champion_fitness=blue_fitness[blue_champ_idx],
        )

        self.hofs[RED].update(report.red_champion)
        self.hofs[BLUE].update(report.blue_champion)
        if self.mode == ENHANCED:
            # Next generation's opponents come from this generation's
            # populations and their defeat records.
            self.samples[RED] = build_shared_sample(
                blue_matrix, pop_blue.members, self.sample_size)
            self.samples[BLUE] = build_shared_sample(
                red_matrix, pop_red.members, self.sample_size)

        self.populations[RED] = breed(pop_red, red_keys, self.crossover_prob, self.mutation_prob)
        self.populations[BLUE] = breed(pop_blue, blue_keys, self.crossover_prob, self.mutation_prob)
        self.generation += 1
        return report
