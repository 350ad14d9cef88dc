"""Brownian input for the schemes: fine paths, grids and per-step increments.

All coarse quantities are aggregated from one fine path with a fixed summation
order (adjacent pairwise summation in ascending fine index, an odd trailing
element carried to the next level). This order makes coarse and fine grids agree bit
by bit, e.g. the increment over a 2*dt bin is exactly the sum of its two dt
sub-bins, as long as refinement ratios are powers of two; other ratios are
rejected with ResolutionMismatch.
"""

from fractions import Fraction
from typing import Sequence, Tuple, Union

from dataclasses import dataclass

import numpy as np

from .._utils.exceptions import BadStep, GridMismatch, OutOfRange, ResolutionMismatch
from .problem import Rational, as_rational


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid t_k = k * delta for k = -2m..M, with tau = m * delta and
    T = M * delta.
    """

    delta: Fraction
    m: int
    M: int

    @property
    def tau(self) -> Fraction:
        return self.m * self.delta

    @property
    def horizon(self) -> Fraction:
        return self.M * self.delta

    @property
    def n_nodes(self) -> int:
        """Number of stored nodes, history included."""
        return 2 * self.m + self.M + 1

    def times(self) -> np.ndarray:
        return np.array(
            [float(k * self.delta) for k in range(-2 * self.m, self.M + 1)]
        )

    def node_times(self) -> np.ndarray:
        """Times of the nodes k = 0..M."""
        return self.times()[2 * self.m :]


@dataclass(frozen=True)
class FineBrownianPath:
    """Increments of B on [0, T] at step `fine_delta`, B(t) = 0 for t <= 0.

    `increments` has shape (T / fine_delta,) for a single path and
    (len(path_indices), T / fine_delta) for a batch.
    """

    seed: int
    path_indices: Tuple[int, ...]
    fine_delta: Fraction
    horizon: Fraction
    increments: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.increments.shape[-1]


@dataclass(frozen=True)
class StepIncrements:
    """Per coarse step k = 0..M-1: dB_k, l1_k and l2_k, last axis indexed by k."""

    grid: GridSpec
    dB: np.ndarray
    l1: np.ndarray
    l2: np.ndarray

    @property
    def n_paths(self) -> int:
        return 1 if self.dB.ndim == 1 else self.dB.shape[0]


def build_grid(tau: Rational, horizon: Rational, m: int) -> GridSpec:
    tau = as_rational(tau)
    horizon = as_rational(horizon)
    if m < 1 or tau <= 0:
        raise BadStep(f"Need m >= 1 and tau > 0, got m = {m} and tau = {tau}.")
    delta = tau / m
    if delta >= 1:
        raise BadStep(f"Step size delta = tau / m = {delta} must be smaller than 1.")
    steps = horizon / delta
    if steps.denominator != 1 or steps <= 0:
        raise GridMismatch(
            f"Horizon T = {horizon} is not a positive integer multiple of "
            f"delta = {delta} (T / delta = {float(steps)})."
        )
    return GridSpec(delta=delta, m=m, M=steps.numerator)


def dyadic_grid(tau: Rational, horizon: Rational, exponent: int) -> GridSpec:
    """Grid with delta = tau / 2**exponent."""
    return build_grid(tau, horizon, 2 ** exponent)


def pairwise_sum(values: np.ndarray) -> np.ndarray:
    """Sum over the last axis in the package's fixed pairwise order."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] == 0:
        return np.zeros(values.shape[:-1])
    while values.shape[-1] > 1:
        half = values.shape[-1] // 2
        summed = values[..., 0 : 2 * half : 2] + values[..., 1 : 2 * half : 2]
        if values.shape[-1] % 2:
            summed = np.concatenate([summed, values[..., -1:]], axis=-1)
        values = summed
    return values[..., 0]


def exclusive_cumsum(values: np.ndarray) -> np.ndarray:
    """Running sum over the last axis, excluding the current element."""
    running = np.cumsum(values, axis=-1)
    return np.concatenate(
        [np.zeros(values.shape[:-1] + (1,)), running[..., :-1]], axis=-1
    )


def _generator(seed: int, path_index: int) -> np.random.Generator:
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, int(path_index)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def _n_fine_steps(horizon: Fraction, fine_delta: Fraction) -> int:
    if fine_delta <= 0:
        raise BadStep(f"Fine step must be positive, got {fine_delta}.")
    steps = horizon / fine_delta
    if steps.denominator != 1:
        raise BadStep(
            f"Fine step {fine_delta} does not divide the horizon {horizon}."
        )
    return steps.numerator


def sample_fine_path(
    seed: int, path_index: int, horizon: Rational, fine_delta: Rational
) -> FineBrownianPath:
    """Independent N(0, fine_delta) increments keyed by (seed, path_index).

    Every (seed, path_index) pair owns its own Philox stream, so a path is the same
    whether it is drawn alone or inside any batch.
    """
    horizon = as_rational(horizon)
    fine_delta = as_rational(fine_delta)
    n_steps = _n_fine_steps(horizon, fine_delta)
    increments = _generator(seed, path_index).standard_normal(n_steps) * np.sqrt(
        float(fine_delta)
    )
    return FineBrownianPath(
        seed=seed,
        path_indices=(path_index,),
        fine_delta=fine_delta,
        horizon=horizon,
        increments=increments,
    )


def sample_fine_paths(
    seed: int, path_indices: Sequence[int], horizon: Rational, fine_delta: Rational
) -> FineBrownianPath:
    horizon = as_rational(horizon)
    fine_delta = as_rational(fine_delta)
    n_steps = _n_fine_steps(horizon, fine_delta)
    scale = np.sqrt(float(fine_delta))
    increments = np.empty((len(path_indices), n_steps))
    for row, path_index in enumerate(path_indices):
        increments[row] = _generator(seed, path_index).standard_normal(n_steps) * scale
    return FineBrownianPath(
        seed=seed,
        path_indices=tuple(path_indices),
        fine_delta=fine_delta,
        horizon=horizon,
        increments=increments,
    )


def refinement_ratio(fine: FineBrownianPath, grid: GridSpec) -> int:
    if fine.horizon != grid.horizon:
        raise ResolutionMismatch(
            f"Fine path horizon {fine.horizon} differs from grid horizon "
            f"{grid.horizon}."
        )
    ratio = grid.delta / fine.fine_delta
    if ratio.denominator != 1:
        raise ResolutionMismatch(
            f"Fine step {fine.fine_delta} does not divide grid step {grid.delta}."
        )
    if ratio.numerator & (ratio.numerator - 1):
        raise ResolutionMismatch(
            f"Refinement ratio {ratio.numerator} is not a power of two; coarse "
            "increments would not sum to B(T) bit by bit."
        )
    return ratio.numerator


def _bins(fine: FineBrownianPath, grid: GridSpec) -> np.ndarray:
    ratio = refinement_ratio(fine, grid)
    return fine.increments.reshape(fine.increments.shape[:-1] + (grid.M, ratio))


def _delayed_bins(bins: np.ndarray, m: int) -> np.ndarray:
    """Fine increments of B(. - tau) on every coarse bin; zero before t = tau."""
    delayed = np.zeros_like(bins)
    delayed[..., m:, :] = bins[..., : bins.shape[-2] - m, :]
    return delayed


def _l2_from_bins(bins: np.ndarray, m: int) -> np.ndarray:
    inner = exclusive_cumsum(_delayed_bins(bins, m))
    return pairwise_sum(inner * bins)


def coarsen_increments(fine: FineBrownianPath, grid: GridSpec) -> StepIncrements:
    bins = _bins(fine, grid)
    d_b = pairwise_sum(bins)
    return StepIncrements(
        grid=grid,
        dB=d_b,
        l1=(d_b * d_b - float(grid.delta)) / 2,
        l2=_l2_from_bins(bins, grid.m),
    )


def compute_l2(
    fine: FineBrownianPath, grid: GridSpec, k: int
) -> Union[float, np.ndarray]:
    """Sub-grid Ito sum for the delayed iterated integral over step k."""
    if not 0 <= k < grid.M:
        raise OutOfRange(f"Step index {k} is outside 0..{grid.M - 1}.")
    bins = _bins(fine, grid)
    if k < grid.m:
        return np.zeros(bins.shape[:-2])[()]
    delayed = bins[..., k - grid.m, :]
    return pairwise_sum(exclusive_cumsum(delayed) * bins[..., k, :])[()]


def riemann_ito_l1(fine: FineBrownianPath, grid: GridSpec) -> np.ndarray:
    """Sub-grid sum  sum_j (B(t_k + j delta) - B(t_k)) dB_j  approximating l1_k."""
    bins = _bins(fine, grid)
    return pairwise_sum(exclusive_cumsum(bins) * bins)


def total_increment(fine: FineBrownianPath) -> Union[float, np.ndarray]:
    """B(T), summed in the same order as the coarse increments."""
    return pairwise_sum(fine.increments)[()]


def zero_increments(grid: GridSpec, n_paths: int = 1) -> StepIncrements:
    """Increments of a noiseless run, l1 keeps its -delta/2 compensator."""
    zeros = np.zeros((n_paths, grid.M))
    return StepIncrements(
        grid=grid, dB=zeros, l1=zeros - float(grid.delta) / 2, l2=zeros.copy()
    )
