"""Skirmish batch execution, optionally across a worker pool.

A batch is an ordered list of (red chromosome, blue chromosome) pairs; the
results come back in the same order, so downstream aggregation never
depends on worker count or scheduling.
"""

from __future__ import annotations

import multiprocessing
from typing import Optional

from .chromosome import BitChromosome, decode
from .sim import SkirmishConfig, SkirmishResult, run_skirmish

_worker_state: dict = {}


def _init_worker(sim_config, ranges):
    _worker_state["config"] = sim_config
    _worker_state["ranges"] = ranges


def _run_pair(pair) -> SkirmishResult:
    red_bits, blue_bits = pair
    config = _worker_state["config"]
    ranges = _worker_state["ranges"]
    return run_skirmish(config, decode(red_bits, ranges), decode(blue_bits, ranges))


def _run_task(task) -> SkirmishResult:
    config, red_bits, blue_bits = task
    if config is None:
        config = _worker_state["config"]
    ranges = _worker_state["ranges"]
    return run_skirmish(config, decode(red_bits, ranges), decode(blue_bits, ranges))


class SkirmishRunner:
    """Runs chromosome-pair skirmishes under one fixed skirmish config.

    ``workers=1`` executes inline; more workers fan out over a process
    pool. Either path returns bit-identical results in task order.
    """

    def __init__(self, sim_config: SkirmishConfig, ranges: dict, workers: int = 1):
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        self.sim_config = sim_config
        self.ranges = ranges
        self.workers = workers
        self._pool: Optional[multiprocessing.pool.Pool] = None
        self.skirmishes_run = 0

    def run_pairs(self, pairs: list[tuple[BitChromosome, BitChromosome]]) -> list[SkirmishResult]:
        self.skirmishes_run += len(pairs)
        if self.workers == 1 or len(pairs) < 2:
            _init_worker(self.sim_config, self.ranges)
            return [_run_pair(p) for p in pairs]
        if self._pool is None:
            self._pool = multiprocessing.Pool(
                self.workers, initializer=_init_worker,
                initargs=(self.sim_config, self.ranges),
            )
        chunk = max(1, len(pairs) // (self.workers * 4))
        return self._pool.map(_run_pair, pairs, chunksize=chunk)

    def run_tasks(self, tasks) -> list[SkirmishResult]:
        """Like run_pairs, but each task may carry its own config:
        (config_or_None, red_bits, blue_bits)."""
        self.skirmishes_run += len(tasks)
        if self.workers == 1 or len(tasks) < 2:
            _init_worker(self.sim_config, self.ranges)
            return [_run_task(t) for t in tasks]
        if self._pool is None:
            self._pool = multiprocessing.Pool(
                self.workers, initializer=_init_worker,
                initargs=(self.sim_config, self.ranges),
            )
        chunk = max(1, len(tasks) // (self.workers * 4))
        return self._pool.map(_run_task, tasks, chunksize=chunk)

    def run_one(self, red_bits: BitChromosome, blue_bits: BitChromosome) -> SkirmishResult:
        return self.run_pairs([(red_bits, blue_bits)])[0]

    def with_config(self, sim_config: SkirmishConfig) -> "SkirmishRunner":
        """A runner for a config variant (e.g. another formation), sharing
        nothing but the worker count."""
        return SkirmishRunner(sim_config, self.ranges, self.workers)

    def close(self):
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
