import warnings
from typing import NamedTuple

import numpy as np
import pandas as pd

from .._datainput.brownian import sample_fine_paths
from .._datainput.problem import NsddeProblem, TamingParams
from .._schemes.interpolant import continuous_interpolant
from .._schemes.one_step import SchemeKind
from .._utils.exceptions import GridMismatch
from .._utils.statistics import mean_and_stderr
from ._monte_carlo import (
    concatenate_batches,
    dyadic_step,
    map_batches,
    require_paths,
    simulate_coupled,
)


class GapReport(NamedTuple):
    """Rows of dt, p, gap and stderr."""

    table: pd.DataFrame


def estimate_interpolation_gap(
    problem: NsddeProblem,
    m_exponent: int,
    ref_exponent: int,
    paths: int,
    p: float = 2.0,
    alpha: float = 0.5,
    seed: int = 42,
    kind: SchemeKind = SchemeKind.TAMED_MILSTEIN,
    workers: int = 1,
    batch_size: int = 250,
) -> GapReport:
    """E[max_k max_j |y(t_k + j dt_ref) - Y_k|^p], the distance between the
    continuous-time scheme and its step process sampled on the fine sub-grid.
    """
    # pylint: disable=too-many-arguments
    require_paths(paths)
    alpha = TamingParams(alpha).alpha
    if ref_exponent <= m_exponent:
        raise GridMismatch(
            f"Reference exponent {ref_exponent} must be finer than {m_exponent}."
        )
    fine_delta = dyadic_step(problem, ref_exponent)

    def batch(indices: range) -> dict:
        fine = sample_fine_paths(seed, indices, problem.horizon, fine_delta)
        traj = simulate_coupled(problem, fine, m_exponent, kind, alpha)
        values = continuous_interpolant(problem, traj, fine, alpha)
        with np.errstate(invalid="ignore"):
            distance = np.linalg.norm(
                values - traj.nodes[:, :-1, np.newaxis, :], axis=-1
            )
            gaps = np.max(distance.reshape(distance.shape[0], -1), axis=1) ** p
        return {"gap": gaps, "exploded": traj.exploded}

    samples = concatenate_batches(
        map_batches(batch, paths, batch_size=batch_size, workers=workers)
    )
    exploded = samples["exploded"]
    if exploded.any():
        warnings.warn(
            f"{int(exploded.sum())} of {paths} paths exploded and are left out of the "
            "interpolation gap.",
            UserWarning,
        )
    gap, stderr = mean_and_stderr(samples["gap"][~exploded])
    return GapReport(
        table=pd.DataFrame(
            [
                {
                    "dt": float(dyadic_step(problem, m_exponent)),
                    "p": float(p),
                    "gap": gap,
                    "stderr": stderr,
                }
            ]
        )
    )
