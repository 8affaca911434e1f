"""Command-line entry point.

Verbs: coevolve, baseline, robustness, replay, inspect. Every run folder
gets a manifest tying its artifacts to the config hash and master seed
that regenerate them.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .chromosome import decode
from .coevo import CoevolutionEngine
from .errors import ConfigurationError
from .experiments import (
    build_baseline,
    progress_eval,
    robustness_eval,
    run_coevolution,
)
from .genome import format_genome
from .parallel import SkirmishRunner
from .recording import (
    ManifestWriter,
    append_results_csv,
    read_baseline_json,
    read_champion_file,
    result_hash,
    write_baseline_json,
    write_champion_file,
    write_progress_csv,
    write_robustness_csv,
    write_timing_csv,
    write_trace,
)
from .runconfig import RunConfig, load_config
from .sim import BLUE, RED, run_skirmish


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="microcoevo",
        description="Coevolve RTS unit micro parameters in a deterministic skirmish simulator.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON run config")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--workers", type=int, default=None, help="worker pool size")
        p.add_argument("--mode", choices=["simple", "enhanced"], default=None)
        p.add_argument("--out", default=None, help="output directory override")

    p = sub.add_parser("coevolve", help="run two-population coevolution")
    common(p)
    p.add_argument("--baseline-red", default=None, help="red baseline record path")
    p.add_argument("--baseline-blue", default=None, help="blue baseline record path")

    p = sub.add_parser("baseline", help="build both fixed baseline opponents")
    common(p)

    p = sub.add_parser("robustness", help="replay a champion across unseen scenarios")
    common(p)
    p.add_argument("--champion", required=False, default=None,
                   help="champion file (champions/gen_XXXX.txt)")
    p.add_argument("--champion-side", choices=[RED, BLUE], default=RED)
    p.add_argument("--baseline", default=None, help="opposing baseline record path")

    p = sub.add_parser("replay", help="re-simulate a stored champion pair with a trace")
    common(p)
    p.add_argument("--champion", required=False, default=None, help="champion file")

    p = sub.add_parser("inspect", help="pretty-print a stored artifact")
    p.add_argument("path", help="champion file, baseline record, or manifest")
    p.add_argument("--config", default=None, help="config for decode ranges")
    return parser


def _overrides(args) -> dict:
    return {
        "master_seed": getattr(args, "seed", None),
        "workers": getattr(args, "workers", None),
        "mode": getattr(args, "mode", None),
        "out_dir": getattr(args, "out", None),
    }


def _prepare(args) -> tuple[RunConfig, Path]:
    config = load_config(args.config, _overrides(args))
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return config, out_dir


def cmd_baseline(args) -> int:
    config, out_dir = _prepare(args)
    manifest = ManifestWriter(out_dir, config.config_hash(), config.master_seed, __version__)
    failures = []
    with SkirmishRunner(config.sim, config.ranges, config.workers) as runner:
        for side in (RED, BLUE):
            record = build_baseline(
                side, runner,
                random_count=config.baseline.random_count,
                candidate_count=config.baseline.candidate_count,
                master_seed=config.master_seed,
                threshold=config.baseline.threshold,
            )
            path = manifest.add(f"baseline_{side}.json")
            write_baseline_json(record, path)
            print(f"baseline[{side}]: win rate {record.win_rate:.3f} "
                  f"over {record.opponent_count} random opponents -> {path}")
            if record.win_rate < config.baseline.threshold:
                failures.append(side)
    manifest.write()
    if failures:
        print(f"baseline below threshold {config.baseline.threshold} for "
              f"{', '.join(failures)}; raise baseline.candidate_count and rerun",
              file=sys.stderr)
        return 1
    return 0


def _load_baselines(args, config, out_dir):
    paths = {
        RED: Path(args.baseline_red) if args.baseline_red else out_dir / "baseline_red.json",
        BLUE: Path(args.baseline_blue) if args.baseline_blue else out_dir / "baseline_blue.json",
    }
    baselines = {}
    for side, path in paths.items():
        if not path.exists():
            raise ConfigurationError(
                f"missing {side} baseline at {path}; run `microcoevo baseline` first"
            )
        baselines[side] = read_baseline_json(path)
    return baselines


def cmd_coevolve(args) -> int:
    config, out_dir = _prepare(args)
    baselines = _load_baselines(args, config, out_dir)
    champions_dir = out_dir / "champions"
    champions_dir.mkdir(exist_ok=True)
    manifest = ManifestWriter(out_dir, config.config_hash(), config.master_seed, __version__)

    with SkirmishRunner(config.sim, config.ranges, config.workers) as runner:
        engine = CoevolutionEngine(
            runner,
            population_size=config.population_size,
            genome_counts=config.genome_counts(),
            master_seed=config.master_seed,
            mode=config.mode,
            crossover_prob=config.crossover_prob,
            mutation_prob=config.mutation_prob,
            sample_size=config.sample_size,
            hof_size=config.hof_size,
            share_raw_scores=config.share_raw_scores,
        )
        timings = []
        clock = time.perf_counter()

        def on_generation(record, report):
            nonlocal clock
            pair = runner.run_one(report.red_champion, report.blue_champion)
            path = manifest.add(Path("champions") / f"gen_{record.generation:04d}.txt")
            write_champion_file(path, record.generation, report.red_champion,
                                report.blue_champion, config.ranges, result_hash(pair))
            now = time.perf_counter()
            timings.append((record.generation, now - clock))
            clock = now
            print(f"gen {record.generation:3d}: evals {record.evaluations:5d} "
                  f"red {record.red_champion_score:12.1f} "
                  f"blue {record.blue_champion_score:12.1f}")

        records, _ = run_coevolution(engine, config.generations, baselines, runner,
                                     on_generation=on_generation)

    write_progress_csv(records, manifest.add("progress.csv"))
    write_timing_csv(timings, manifest.add("timing.csv"))
    manifest.write()
    print(f"coevolve: {len(records)} generations, "
          f"{records[-1].total_evaluations} evaluations -> {out_dir}")
    return 0


def cmd_robustness(args) -> int:
    config, out_dir = _prepare(args)
    if not args.champion:
        raise ConfigurationError("robustness needs --champion (a champions/gen_XXXX.txt file)")
    champion_path = Path(args.champion)
    if not champion_path.exists():
        raise ConfigurationError(f"champion file not found: {champion_path}")
    side = args.champion_side
    other = BLUE if side == RED else RED
    baseline_path = Path(args.baseline) if args.baseline else out_dir / f"baseline_{other}.json"
    if not baseline_path.exists():
        raise ConfigurationError(
            f"missing {other} baseline at {baseline_path}; run `microcoevo baseline` first"
        )
    champion = read_champion_file(champion_path)[side]
    baseline = read_baseline_json(baseline_path)
    manifest = ManifestWriter(out_dir, config.config_hash(), config.master_seed, __version__)

    with SkirmishRunner(config.sim, config.ranges, config.workers) as runner:
        report = robustness_eval(
            champion, side, baseline, runner,
            master_seed=config.master_seed,
            start_sets=config.robustness_start_sets,
        )
    write_robustness_csv(report, manifest.add("robustness.csv"))
    results_path = manifest.add("results.csv")
    config_hash = config.config_hash()
    for entry in report.entries:
        append_results_csv(
            results_path, config_hash, entry.placement_seed,
            _entry_as_result(entry, side),
        )
    manifest.write()
    for kind, aggregate in report.champion_aggregates.items():
        print(f"robustness[{kind}]: champion mean {aggregate:.1f} "
              f"baseline mean {report.baseline_aggregates[kind]:.1f}")
    return 0


def _entry_as_result(entry, champion_side):
    from .sim import SkirmishResult

    if champion_side == RED:
        score_red, score_blue = entry.champion_score, entry.baseline_score
    else:
        score_red, score_blue = entry.baseline_score, entry.champion_score
    return SkirmishResult(
        score_red=score_red, score_blue=score_blue,
        survivors_red=0, survivors_blue=0, remaining_hitpoints={},
        frames_elapsed=0, winner=entry.winner,
    )


def cmd_replay(args) -> int:
    config, out_dir = _prepare(args)
    if not args.champion:
        raise ConfigurationError("replay needs --champion (a champions/gen_XXXX.txt file)")
    champion_path = Path(args.champion)
    if not champion_path.exists():
        raise ConfigurationError(f"champion file not found: {champion_path}")
    stored = read_champion_file(champion_path)
    red = decode(stored["red"], config.ranges)
    blue = decode(stored["blue"], config.ranges)
    result, trace = run_skirmish(config.sim, red, blue, collect_trace=True)
    manifest = ManifestWriter(out_dir, config.config_hash(), config.master_seed, __version__)
    write_trace(trace, manifest.add("replay.trace"))
    append_results_csv(manifest.add("results.csv"), config.config_hash(),
                       config.master_seed, result)
    manifest.write()
    fresh = result_hash(result)
    print(f"replay: winner {result.winner} after {result.frames_elapsed} frames, "
          f"result hash {fresh}")
    expected = stored.get("pair_result_hash")
    if expected and expected != fresh:
        print(f"replay hash mismatch: stored {expected}, got {fresh}", file=sys.stderr)
        return 1
    return 0


def cmd_inspect(args) -> int:
    path = Path(args.path)
    if not path.exists():
        raise ConfigurationError(f"no such artifact: {path}")
    if path.suffix == ".json":
        payload = json.loads(path.read_text())
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    ranges = None
    if args.config:
        ranges = load_config(args.config).ranges
    else:
        from .genome import DEFAULT_RANGES
        ranges = DEFAULT_RANGES
    stored = read_champion_file(path)
    print(f"generation {stored.get('generation', '?')}")
    for side in (RED, BLUE):
        for idx, genome in enumerate(decode(stored[side], ranges)):
            print(format_genome(genome, label=f"{side}.genome{idx}"))
    return 0


COMMANDS = {
    "coevolve": cmd_coevolve,
    "baseline": cmd_baseline,
    "robustness": cmd_robustness,
    "replay": cmd_replay,
    "inspect": cmd_inspect,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.verb](args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
