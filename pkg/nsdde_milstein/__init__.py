from pkg_resources import get_distribution, DistributionNotFound

from ._datainput.builtin_problems import builtin_problem, list_builtin_problems
from ._datainput.brownian import (
    FineBrownianPath,
    GridSpec,
    StepIncrements,
    build_grid,
    coarsen_increments,
    compute_l2,
    sample_fine_path,
    sample_fine_paths,
)
from ._datainput.problem import (
    CoefficientSet,
    InitialSegment,
    NsddeProblem,
    TamingParams,
    ValidationReport,
    evaluate_segment,
    validate_problem,
)
from ._schemes.one_step import SchemeKind, step_baseline, step_tamed_milstein
from ._schemes.simulate import Trajectory, simulate_path, step_process_lookup
from ._utils.taming import TamedDriftValue, tame_drift, taming_gap


try:
    __version__ = get_distribution(__name__).version
except DistributionNotFound:
    # package is not installed
    __version__ = "unknown"
