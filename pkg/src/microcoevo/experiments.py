"""Experiment harness: baselines, per-generation progress, robustness.

Coevolutionary fitness is relative, so progress is measured by playing each
generation's champion against a fixed baseline found by random search. The
robustness sweep then replays a champion against that baseline across
formations and fresh starting positions.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

from .chromosome import BitChromosome, random_chromosome
from .coevo import CoevolutionEngine, GenerationReport
from .formations import FormationSpec
from .seeds import derive_seed
from .sim import BLUE, DRAW, RED, SkirmishConfig, opposite

import random

FORMATION_KINDS = ("circle", "line", "random")


@dataclass(frozen=True)
class BaselineRecord:
    """A fixed opponent for progress measurement, found by random search."""

    side: str
    chromosome: BitChromosome
    win_rate: float
    opponent_count: int
    seed: int
    outcomes: tuple[str, ...]  # winner of each stored skirmish, in order

    def recomputed_win_rate(self) -> float:
        wins = sum(1 for w in self.outcomes if w == self.side)
        draws = sum(1 for w in self.outcomes if w == DRAW)
        return (wins + 0.5 * draws) / len(self.outcomes)


def build_baseline(
    side: str,
    runner,
    random_count: int,
    candidate_count: int,
    master_seed: int,
    threshold: float = 0.90,
) -> BaselineRecord:
    """Best-of-candidates random chromosome, judged by win rate over a shared
    set of uniform-random opponents (draws count half).

    Always returns the best record found; the caller decides what to do
    when ``win_rate`` misses the threshold (typically raise candidate_count
    and retry).
    """
    if random_count < 1 or candidate_count < 1:
        raise ValueError("random_count and candidate_count must be >= 1")
    config = runner.sim_config
    own_arity = len(config.roster(side))
    opp_arity = len(config.roster(opposite(side)))
    cand_rng = random.Random(derive_seed(master_seed, f"baseline/{side}/candidates"))
    opp_rng = random.Random(derive_seed(master_seed, f"baseline/{side}/opponents"))
    candidates = [random_chromosome(cand_rng, own_arity) for _ in range(candidate_count)]
    opponents = [random_chromosome(opp_rng, opp_arity) for _ in range(random_count)]

    if side == RED:
        pairs = [(c, o) for c in candidates for o in opponents]
    else:
        pairs = [(o, c) for c in candidates for o in opponents]
    results = runner.run_pairs(pairs)

    best: Optional[BaselineRecord] = None
    for idx in range(candidate_count):
        outcomes = tuple(r.winner for r in results[idx * random_count : (idx + 1) * random_count])
        wins = sum(1 for w in outcomes if w == side)
        draws = sum(1 for w in outcomes if w == DRAW)
        rate = (wins + 0.5 * draws) / random_count
        if best is None or rate > best.win_rate:
            best = BaselineRecord(
                side=side, chromosome=candidates[idx], win_rate=rate,
                opponent_count=random_count, seed=master_seed, outcomes=outcomes,
            )
    return best


def progress_eval(
    champion: BitChromosome,
    champion_side: str,
    baseline: BaselineRecord,
    runner,
) -> tuple[float, float]:
    """One canonical-start skirmish champion vs baseline.

    Returns (champion score, baseline score).
    """
    if baseline.side == champion_side:
        raise ValueError("baseline must belong to the opposing side")
    if champion_side == RED:
        result = runner.run_one(champion, baseline.chromosome)
        return result.score_red, result.score_blue
    result = runner.run_one(baseline.chromosome, champion)
    return result.score_blue, result.score_red


@dataclass(frozen=True)
class RobustnessEntry:
    formation: str
    start_index: int
    placement_seed: int
    champion_score: float
    baseline_score: float
    winner: str


@dataclass(frozen=True)
class RobustnessReport:
    champion_side: str
    entries: tuple[RobustnessEntry, ...]
    champion_aggregates: dict[str, float]  # formation -> mean champion score
    baseline_aggregates: dict[str, float]


def robustness_eval(
    champion: BitChromosome,
    champion_side: str,
    baseline: BaselineRecord,
    runner,
    master_seed: int,
    formations: tuple[str, ...] = FORMATION_KINDS,
    start_sets: int = 10,
) -> RobustnessReport:
    """Champion vs baseline across every formation and fresh start positions.

    Exactly ``len(formations) * start_sets`` skirmishes run; per-formation
    aggregates are plain means of the stored entries.
    """
    config = runner.sim_config
    tasks = []
    meta = []
    for kind in formations:
        for i in range(start_sets):
            placement = derive_seed(master_seed, f"robustness/{kind}/{i}")
            formation = FormationSpec(
                kind=kind,
                placement_seed=placement,
                circle_radius=config.formation.circle_radius,
                line_separation=config.formation.line_separation,
                line_span=config.formation.line_span,
                box_inset=config.formation.box_inset,
            )
            variant = dataclasses.replace(config, formation=formation)
            if champion_side == RED:
                tasks.append((variant, champion, baseline.chromosome))
            else:
                tasks.append((variant, baseline.chromosome, champion))
            meta.append((kind, i, placement))
    results = runner.run_tasks(tasks)

    entries = []
    for (kind, i, placement), result in zip(meta, results):
        entries.append(RobustnessEntry(
            formation=kind,
            start_index=i,
            placement_seed=placement,
            champion_score=result.score(champion_side),
            baseline_score=result.score(opposite(champion_side)),
            winner=result.winner,
        ))
    champion_aggregates = {}
    baseline_aggregates = {}
    for kind in formations:
        rows = [e for e in entries if e.formation == kind]
        champion_aggregates[kind] = sum(e.champion_score for e in rows) / len(rows)
        baseline_aggregates[kind] = sum(e.baseline_score for e in rows) / len(rows)
    return RobustnessReport(
        champion_side=champion_side,
        entries=tuple(entries),
        champion_aggregates=champion_aggregates,
        baseline_aggregates=baseline_aggregates,
    )


@dataclass(frozen=True)
class ProgressRecord:
    """One CSV row of per-generation progress (wall-clock kept separate so
    the file is bit-reproducible)."""

    generation: int
    mode: str
    evaluations: int
    total_evaluations: int
    red_champion_fitness: float
    red_champion_score: float
    red_baseline_score: float
    blue_champion_fitness: float
    blue_champion_score: float
    blue_baseline_score: float


def run_coevolution(
    engine: CoevolutionEngine,
    generations: int,
    baselines: dict[str, BaselineRecord],
    runner,
    on_generation=None,
) -> tuple[list[ProgressRecord], list[GenerationReport]]:
    """Drive the engine for a number of generations, measuring every
    champion against the fixed baselines after each one."""
    records = []
    reports = []
    for _ in range(generations):
        report = engine.step_generation()
        red_score, red_base = progress_eval(report.red_champion, RED, baselines[BLUE], runner)
        blue_score, blue_base = progress_eval(report.blue_champion, BLUE, baselines[RED], runner)
        record = ProgressRecord(
            generation=report.generation,
            mode=report.mode,
            evaluations=report.evaluations,
            total_evaluations=engine.total_evaluations,
            red_champion_fitness=report.red_champion_fitness,
            red_champion_score=red_score,
            red_baseline_score=red_base,
            blue_champion_fitness=report.blue_champion_fitness,
            blue_champion_score=blue_score,
            blue_baseline_score=blue_base,
        )
        records.append(record)
        reports.append(report)
        if on_generation is not None:
            on_generation(record, report)
    return records, reports
