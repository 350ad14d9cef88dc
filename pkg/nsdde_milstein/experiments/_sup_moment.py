import warnings
from typing import NamedTuple, Optional

import numpy as np
import pandas as pd

from .._datainput.brownian import sample_fine_paths
from .._datainput.problem import NsddeProblem, TamingParams
from .._schemes.one_step import SchemeKind
from .._utils.exceptions import GridMismatch
from .._utils.statistics import mean_and_stderr
from ._monte_carlo import (
    concatenate_batches,
    dyadic_step,
    map_batches,
    require_paths,
    simulate_coupled,
    sup_norms,
)


class MomentReport(NamedTuple):
    """One row per scheme and step: scheme, dt, p, sup_moment, stderr,
    exploded_fraction.
    """

    table: pd.DataFrame


def _moment_row(kind: SchemeKind, delta: float, p: float, sups: np.ndarray) -> dict:
    exploded = ~np.isfinite(sups)
    moment, stderr = mean_and_stderr(sups[~exploded] ** p)
    return {
        "scheme": kind.value,
        "dt": delta,
        "p": float(p),
        "sup_moment": moment,
        "stderr": stderr,
        "exploded_fraction": float(np.mean(exploded)),
    }


def estimate_sup_moment(
    problem: NsddeProblem,
    scheme: SchemeKind,
    m_exponent: int,
    paths: int,
    p: float = 2.0,
    alpha: float = 0.5,
    seed: int = 42,
    ref_exponent: Optional[int] = None,
    include_reference: bool = False,
    workers: int = 1,
    batch_size: int = 250,
) -> MomentReport:
    """Monte Carlo estimate of E[max_k |Y_k|^p] over the nodes k = 0..M.

    The Brownian paths are sampled at dt_ref = tau / 2**ref_exponent (by default
    four dyadic levels below the scheme's step) so the delayed iterated integral is
    resolved; with `include_reference` the tamed Milstein scheme at dt_ref is
    reported as an additional row.
    """
    # pylint: disable=too-many-arguments
    require_paths(paths)
    alpha = TamingParams(alpha).alpha
    ref_exponent = m_exponent + 4 if ref_exponent is None else ref_exponent
    if ref_exponent < m_exponent:
        raise GridMismatch(
            f"Fine exponent {ref_exponent} is coarser than the scheme exponent "
            f"{m_exponent}."
        )
    fine_delta = dyadic_step(problem, ref_exponent)

    def batch(indices: range) -> dict:
        fine = sample_fine_paths(seed, indices, problem.horizon, fine_delta)
        result = {
            "scheme": sup_norms(
                simulate_coupled(problem, fine, m_exponent, scheme, alpha)
            )
        }
        if include_reference:
            result["reference"] = sup_norms(
                simulate_coupled(
                    problem, fine, ref_exponent, SchemeKind.TAMED_MILSTEIN, alpha
                )
            )
        return result

    samples = concatenate_batches(
        map_batches(batch, paths, batch_size=batch_size, workers=workers)
    )
    rows = [
        _moment_row(
            scheme, float(dyadic_step(problem, m_exponent)), p, samples["scheme"]
        )
    ]
    if include_reference:
        rows.append(
            _moment_row(
                SchemeKind.TAMED_MILSTEIN, float(fine_delta), p, samples["reference"]
            )
        )
    for row in rows:
        if row["exploded_fraction"] > 0:
            warnings.warn(
                f"{row['scheme']} exploded on a fraction {row['exploded_fraction']} of "
                f"the paths at dt = {row['dt']}; those paths are left out of the "
                "moment.",
                UserWarning,
            )
    return MomentReport(table=pd.DataFrame(rows))
