"""Artifact persistence: CSV tables, champion files, baselines, traces.

Every file written here is a pure function of (config, master seed), so a
rerun regenerates it bit-identically; wall-clock timings go to their own
sidecar file to keep progress.csv that way.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from pathlib import Path

from .chromosome import BitChromosome, decode
from .errors import ConfigurationError
from .experiments import BaselineRecord, ProgressRecord, RobustnessReport
from .genome import PARAM_NAMES
from .sim import ReplayTrace, SkirmishResult

PROGRESS_COLUMNS = [
    "generation", "mode", "evaluations", "total_evaluations",
    "red_champion_fitness", "red_champion_score", "red_baseline_score",
    "blue_champion_fitness", "blue_champion_score", "blue_baseline_score",
]

RESULTS_COLUMNS = ["config_hash", "seed", "score_red", "score_blue", "winner", "frames"]


def write_progress_csv(records: list[ProgressRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROGRESS_COLUMNS)
        for r in records:
            writer.writerow([
                r.generation, r.mode, r.evaluations, r.total_evaluations,
                repr(r.red_champion_fitness), repr(r.red_champion_score),
                repr(r.red_baseline_score), repr(r.blue_champion_fitness),
                repr(r.blue_champion_score), repr(r.blue_baseline_score),
            ])


def read_progress_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_timing_csv(timings: list[tuple[int, float]], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "wall_clock_seconds"])
        for generation, seconds in timings:
            writer.writerow([generation, repr(seconds)])


def append_results_csv(path, config_hash: str, seed: int, result: SkirmishResult) -> None:
    """One row per skirmish outcome, appended; header written on first use."""
    path = Path(path)
    new_file = not path.exists()
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(RESULTS_COLUMNS)
        writer.writerow([
            config_hash, seed, repr(result.score_red), repr(result.score_blue),
            result.winner, result.frames_elapsed,
        ])


def result_hash(result: SkirmishResult) -> str:
    payload = ",".join([
        repr(result.score_red), repr(result.score_blue),
        str(result.survivors_red), str(result.survivors_blue),
        str(result.frames_elapsed), result.winner,
    ])
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def format_champion_block(label: str, chromosome: BitChromosome, ranges) -> str:
    lines = [f"{label} {chromosome.to_hex()}"]
    for idx, genome in enumerate(decode(chromosome, ranges)):
        prefix = f"{label}.genome{idx}"
        values = " ".join(f"{name}={getattr(genome, name)!r}" for name in PARAM_NAMES)
        lines.append(f"{prefix} {values}")
    return "\n".join(lines)


def write_champion_file(path, generation: int, red: BitChromosome, blue: BitChromosome,
                        ranges, pair_result_hash: str) -> None:
    """Hex chromosomes plus their decoded parameter tuples for one generation.

    ``pair_result_hash`` fingerprints the champion-vs-champion skirmish so a
    replay can prove it reproduced the stored fight.
    """
    content = "\n".join([
        f"generation {generation}",
        f"pair_result_hash {pair_result_hash}",
        format_champion_block("red", red, ranges),
        format_champion_block("blue", blue, ranges),
    ]) + "\n"
    Path(path).write_text(content)


def read_champion_file(path) -> dict:
    data: dict = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition(" ")
        if key == "generation":
            data["generation"] = int(value)
        elif key == "pair_result_hash":
            data["pair_result_hash"] = value
        elif key in ("red", "blue"):
            data[key] = BitChromosome.from_hex(value.strip())
    for side in ("red", "blue"):
        if side not in data:
            raise ConfigurationError(f"champion file {path} is missing the {side} chromosome")
    return data


def write_baseline_json(record: BaselineRecord, path) -> None:
    payload = {
        "side": record.side,
        "chromosome": record.chromosome.to_hex(),
        "win_rate": record.win_rate,
        "opponent_count": record.opponent_count,
        "seed": record.seed,
        "outcomes": list(record.outcomes),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_baseline_json(path) -> BaselineRecord:
    payload = json.loads(Path(path).read_text())
    return BaselineRecord(
        side=payload["side"],
        chromosome=BitChromosome.from_hex(payload["chromosome"]),
        win_rate=payload["win_rate"],
        opponent_count=payload["opponent_count"],
        seed=payload["seed"],
        outcomes=tuple(payload["outcomes"]),
    )


def write_robustness_csv(report: RobustnessReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["formation", "start_index", "placement_seed",
                         "champion_score", "baseline_score", "winner"])
        for e in report.entries:
            writer.writerow([e.formation, e.start_index, e.placement_seed,
                             repr(e.champion_score), repr(e.baseline_score), e.winner])
        for kind, aggregate in report.champion_aggregates.items():
            writer.writerow([kind, "mean", "", repr(aggregate),
                             repr(report.baseline_aggregates[kind]), ""])


def write_trace(trace: ReplayTrace, path) -> None:
    Path(path).write_text(trace.serialize())


class ManifestWriter:
    """Collects artifact paths while a run executes, then seals the manifest."""

    def __init__(self, out_dir, config_hash: str, master_seed: int, version: str):
        self.out_dir = Path(out_dir)
        self.config_hash = config_hash
        self.master_seed = master_seed
        self.version = version
        self.started_at = time.time()
        self.artifacts: list[str] = []

    def add(self, path) -> Path:
        path = Path(path)
        rel = path.relative_to(self.out_dir) if path.is_absolute() else path
        self.artifacts.append(str(rel))
        return self.out_dir / rel

    def write(self) -> Path:
        payload = {
            "config_hash": self.config_hash,
            "master_seed": self.master_seed,
            "version": self.version,
            "started_at": self.started_at,
            "finished_at": time.time(),
            "artifacts": sorted(self.artifacts),
        }
        path = self.out_dir / "manifest.json"
        missing = [a for a in payload["artifacts"] if not (self.out_dir / a).exists()]
        if missing:
            raise ConfigurationError(f"manifest lists missing artifact {missing[0]!r}")
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return path
