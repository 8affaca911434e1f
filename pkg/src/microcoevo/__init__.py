"""Deterministic RTS skirmish simulation plus competitive coevolution of
unit micromanagement parameters."""

__version__ = "0.1.0"

from .chromosome import BitChromosome, crossover, decode, encode, mutate, random_chromosome
from .coevo import (
    CoevolutionEngine,
    EvaluationMatrix,
    HallOfFame,
    Population,
    SharedSample,
    build_shared_sample,
    evaluate_pairwise,
    evaluate_sampled,
    shared_fitness,
)
from .experiments import (
    BaselineRecord,
    ProgressRecord,
    RobustnessReport,
    build_baseline,
    progress_eval,
    robustness_eval,
    run_coevolution,
)
from .formations import FormationSpec, generate_formation
from .genome import DEFAULT_RANGES, MicroGenome
from .parallel import SkirmishRunner
from .runconfig import RunConfig, build_run_config, load_config
from .sim import (
    BLUE,
    DRAW,
    RED,
    ReplayTrace,
    SkirmishConfig,
    SkirmishResult,
    UnitState,
    compute_score,
    run_skirmish,
    spawn_skirmish,
    step,
)
from .units import VULTURE, ZEALOT, ScoreWeights, UnitTypeSpec
