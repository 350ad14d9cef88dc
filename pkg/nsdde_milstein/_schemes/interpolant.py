import numpy as np

from .._datainput.brownian import (
    FineBrownianPath,
    exclusive_cumsum,
    refinement_ratio,
)
from .._datainput.problem import NsddeProblem
from .._utils.taming import apply_taming
from .simulate import Trajectory


def _running(values: np.ndarray) -> np.ndarray:
    """Partial sums over the last axis with a leading zero, r -> r + 1 entries."""
    return np.concatenate(
        [np.zeros(values.shape[:-1] + (1,)), np.cumsum(values, axis=-1)], axis=-1
    )


def continuous_interpolant(
    problem: NsddeProblem,
    traj: Trajectory,
    fine: FineBrownianPath,
    alpha: float = 0.5,
) -> np.ndarray:
    """Continuous-time scheme at the fine nodes t_k + j * delta, j = 0..r, of every
    coarse step k, shape (paths, M, r + 1, n).

    Inside a step the step process is frozen at its coarse values, so the neutral
    term keeps its value D(Y_{k-m}) up to the left limit at t_{k+1}. The stochastic
    integrals use the fine increments. The iterated integral against the current
    noise has the closed form ((B(t) - B(t_k))**2 - (t - t_k)) / 2, the delayed one
    is a partial Riemann-Ito sum over the fine increments.
    """
    grid = traj.grid
    ratio = refinement_ratio(fine, grid)
    increments = np.atleast_2d(fine.increments)
    bins = increments.reshape(increments.shape[0], grid.M, ratio)
    delayed = np.zeros_like(bins)
    delayed[:, grid.m :, :] = bins[:, : grid.M - grid.m, :]

    states = traj.states
    offset = 2 * grid.m
    y_k = states[:, offset : offset + grid.M]
    y_k_m = states[:, grid.m : grid.m + grid.M]
    y_k_2m = states[:, : grid.M]

    elapsed = (np.arange(ratio + 1) * float(fine.fine_delta))[:, np.newaxis]
    brownian = _running(bins)[..., np.newaxis]
    iterated_1 = (brownian * brownian - elapsed) / 2
    iterated_2 = _running(exclusive_cumsum(delayed) * bins)[..., np.newaxis]

    coeffs = problem.coefficients
    with np.errstate(all="ignore"):
        drift = coeffs.b(y_k, y_k_m)
        if traj.kind.tamed:
            drift = apply_taming(drift, float(grid.delta), alpha)
        values = (
            y_k[:, :, np.newaxis, :]
            + drift[:, :, np.newaxis, :] * elapsed
            + coeffs.sigma(y_k, y_k_m)[:, :, np.newaxis, :] * brownian
        )
        if traj.kind.milstein:
            values = (
                values
                + coeffs.sigma1_sigma(y_k, y_k_m)[:, :, np.newaxis, :] * iterated_1
                + coeffs.sigma2_sigma(y_k, y_k_m, y_k_m, y_k_2m)[:, :, np.newaxis, :]
                * iterated_2
            )
    return values
