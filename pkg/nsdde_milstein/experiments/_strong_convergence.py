import logging
import warnings
from typing import Dict, Iterable, NamedTuple

import numpy as np
import pandas as pd

from .._datainput.brownian import sample_fine_paths
from .._datainput.problem import NsddeProblem, TamingParams
from .._schemes.one_step import SchemeKind
from .._utils.exceptions import DegenerateFit, GridMismatch
from .._utils.statistics import fit_order, lp_estimate
from ._monte_carlo import (
    concatenate_batches,
    dyadic_step,
    map_batches,
    require_paths,
    simulate_coupled,
)

LOGGER = logging.getLogger(__name__)


class ConvergenceReport(NamedTuple):
    """`table` has one row per (scheme, dt) with columns scheme, dt, paths, p, error,
    stderr, exploded_fraction and unreliable; `slopes` maps scheme names to the
    fitted order (NaN when no fit is possible).
    """

    table: pd.DataFrame
    slopes: Dict[str, float]


def run_strong_convergence(
    problem: NsddeProblem,
    schemes: Iterable[SchemeKind],
    m_exponents: Iterable[int],
    ref_exponent: int,
    paths: int,
    p: float = 2.0,
    alpha: float = 0.5,
    seed: int = 42,
    reference_scheme: SchemeKind = SchemeKind.TAMED_MILSTEIN,
    l2_refinement: int = 0,
    workers: int = 1,
    batch_size: int = 250,
) -> ConvergenceReport:
    """Strong L^p errors at the coarse nodes against a reference run on the finest
    grid, every step size driven by the same fine Brownian path of each sample.
    """
    # pylint: disable=too-many-arguments, too-many-locals
    schemes = list(schemes)
    m_exponents = sorted(set(m_exponents))
    require_paths(paths)
    alpha = TamingParams(alpha).alpha
    if not schemes or not m_exponents:
        raise ValueError("At least one scheme and one step exponent are required.")
    if ref_exponent < max(m_exponents):
        raise GridMismatch(
            f"Reference exponent {ref_exponent} is coarser than the finest compared "
            f"exponent {max(m_exponents)}."
        )
    if l2_refinement < 0:
        raise ValueError(f"l2 refinement must be nonnegative, got {l2_refinement}.")
    fine_delta = dyadic_step(problem, ref_exponent + l2_refinement)

    def batch(indices: range) -> dict:
        fine = sample_fine_paths(seed, indices, problem.horizon, fine_delta)
        reference = simulate_coupled(
            problem, fine, ref_exponent, reference_scheme, alpha
        )
        result = {"reference_exploded": reference.exploded}
        for exponent in m_exponents:
            target = reference.nodes[:, :: 2 ** (ref_exponent - exponent)]
            for kind in schemes:
                if exponent == ref_exponent and kind is reference_scheme:
                    traj = reference
                else:
                    traj = simulate_coupled(problem, fine, exponent, kind, alpha)
                with np.errstate(all="ignore"):
                    distance = np.max(
                        np.linalg.norm(traj.nodes - target, axis=-1), axis=1
                    )
                result[(kind, exponent, "error")] = distance ** p
                result[(kind, exponent, "exploded")] = traj.exploded
        return result

    samples = concatenate_batches(
        map_batches(batch, paths, batch_size=batch_size, workers=workers)
    )
    reference_exploded = samples["reference_exploded"]
    if reference_exploded.any():
        warnings.warn(
            f"{int(reference_exploded.sum())} of {paths} reference paths exploded and "
            "are left out of every error estimate.",
            UserWarning,
        )

    rows = []
    for kind in schemes:
        for exponent in m_exponents:
            exploded = samples[(kind, exponent, "exploded")]
            valid = ~exploded & ~reference_exploded
            error, stderr = lp_estimate(samples[(kind, exponent, "error")][valid], p)
            exploded_fraction = float(np.mean(exploded))
            rows.append(
                {
                    "scheme": kind.value,
                    "dt": float(dyadic_step(problem, exponent)),
                    "paths": paths,
                    "p": float(p),
                    "error": error,
                    "stderr": stderr,
                    "exploded_fraction": exploded_fraction,
                    "unreliable": exploded_fraction > 0,
                }
            )
            if exploded_fraction > 0:
                warnings.warn(
                    f"{kind.value} exploded on a fraction {exploded_fraction} of the "
                    f"paths at dt = tau / 2**{exponent}; its error row is unreliable.",
                    UserWarning,
                )
    report = ConvergenceReport(table=pd.DataFrame(rows), slopes={})
    for kind in schemes:
        try:
            report.slopes[kind.value] = estimate_order(report, kind)
        except DegenerateFit:
            report.slopes[kind.value] = np.nan
    LOGGER.info(
        "Strong convergence of %s on %d paths, fitted orders %s",
        problem.name,
        paths,
        report.slopes,
    )
    return report


def estimate_order(report: ConvergenceReport, scheme: SchemeKind) -> float:
    rows = report.table[report.table["scheme"] == scheme.value]
    return fit_order(rows["dt"].to_numpy(), rows["error"].to_numpy())
