import warnings
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd

from .._datainput.brownian import sample_fine_paths
from .._datainput.problem import NsddeProblem, TamingParams, evaluate_segment
from .._schemes.one_step import SchemeKind
from .._utils.exceptions import ConstraintViolation, GridMismatch
from .._utils.statistics import mean_and_stderr
from ._monte_carlo import (
    concatenate_batches,
    dyadic_step,
    map_batches,
    require_paths,
    simulate_coupled,
    sup_norms,
)


class ExitReport(NamedTuple):
    """Rows of which (tau_R for the reference run, rho_R for the scheme), R, prob,
    scaled = R**2 * prob and the standard error of prob.
    """

    table: pd.DataFrame


def segment_norm(problem: NsddeProblem, nodes: int = 64) -> float:
    """||xi||, the sup norm of the initial segment sampled on a uniform grid."""
    times = [-problem.delay * Fraction(j, nodes) for j in range(nodes + 1)]
    return max(
        float(np.linalg.norm(evaluate_segment(problem, time))) for time in times
    )


def estimate_exit_probability(
    problem: NsddeProblem,
    scheme: SchemeKind,
    m_exponent: int,
    paths: int,
    radii: Sequence[float] = (2.0, 4.0, 8.0, 16.0),
    alpha: float = 0.5,
    seed: int = 42,
    ref_exponent: Optional[int] = None,
    workers: int = 1,
    batch_size: int = 250,
) -> ExitReport:
    """P(max_k |Y_k| >= R) for the scheme at dt = tau / 2**m_exponent (rho_R) and for
    the tamed Milstein reference at tau / 2**ref_exponent (tau_R). Exploded paths
    count as exits.
    """
    # pylint: disable=too-many-arguments, too-many-locals
    require_paths(paths)
    alpha = TamingParams(alpha).alpha
    radii = [float(radius) for radius in radii]
    if not radii or radii[0] <= 0 or sorted(radii) != radii:
        raise ConstraintViolation(
            f"Radii must be positive and sorted ascending, got {radii}."
        )
    ref_exponent = m_exponent + 4 if ref_exponent is None else ref_exponent
    if ref_exponent < m_exponent:
        raise GridMismatch(
            f"Reference exponent {ref_exponent} is coarser than {m_exponent}."
        )
    initial_norm = segment_norm(problem)
    if radii[0] <= initial_norm:
        warnings.warn(
            f"The smallest radius {radii[0]} does not exceed the initial segment norm "
            f"{initial_norm}; exit probabilities at that radius are trivial.",
            UserWarning,
        )
    fine_delta = dyadic_step(problem, ref_exponent)

    def batch(indices: range) -> dict:
        fine = sample_fine_paths(seed, indices, problem.horizon, fine_delta)
        return {
            "tau_R": sup_norms(
                simulate_coupled(
                    problem, fine, ref_exponent, SchemeKind.TAMED_MILSTEIN, alpha
                )
            ),
            "rho_R": sup_norms(
                simulate_coupled(problem, fine, m_exponent, scheme, alpha)
            ),
        }

    samples = concatenate_batches(
        map_batches(batch, paths, batch_size=batch_size, workers=workers)
    )
    rows = []
    for which in ("tau_R", "rho_R"):
        for radius in radii:
            prob, stderr = mean_and_stderr(
                (samples[which] >= radius).astype(float)
            )
            rows.append(
                {
                    "which": which,
                    "R": radius,
                    "prob": prob,
                    "scaled": radius ** 2 * prob,
                    "stderr": stderr,
                }
            )
    return ExitReport(table=pd.DataFrame(rows))
