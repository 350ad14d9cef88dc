import logging
from fractions import Fraction
from multiprocessing.pool import ThreadPool
from typing import Callable, Dict, List, TypeVar

import numpy as np

from .._datainput.brownian import FineBrownianPath, coarsen_increments, dyadic_grid
from .._datainput.problem import NsddeProblem
from .._schemes.one_step import SchemeKind
from .._schemes.simulate import Trajectory, simulate_path
from .._utils.exceptions import InsufficientPaths

LOGGER = logging.getLogger(__name__)

BatchResult = TypeVar("BatchResult")


def path_batches(paths: int, batch_size: int) -> List[range]:
    """Consecutive path index ranges covering 0..paths-1."""
    if batch_size < 1:
        raise ValueError(f"Batch size must be positive, got {batch_size}.")
    return [
        range(start, min(start + batch_size, paths))
        for start in range(0, paths, batch_size)
    ]


def require_paths(paths: int, minimum: int = 2):
    if paths < minimum:
        raise InsufficientPaths(
            f"At least {minimum} Monte Carlo paths are needed, got {paths}."
        )


def map_batches(
    func: Callable[[range], BatchResult],
    paths: int,
    batch_size: int = 250,
    workers: int = 1,
) -> List[BatchResult]:
    """Apply `func` to every batch of path indices and return the results in batch
    order, whatever the number of workers.
    """
    batches = path_batches(paths, batch_size)

    def run(batch: range) -> BatchResult:
        result = func(batch)
        LOGGER.debug("Finished paths %d to %d", batch.start, batch.stop - 1)
        return result

    if workers <= 1 or len(batches) == 1:
        return [run(batch) for batch in batches]
    with ThreadPool(processes=workers) as pool:
        return pool.map(run, batches)


def concatenate_batches(results: List[Dict]) -> Dict:
    """Join per-batch arrays key by key in path index order."""
    return {
        key: np.concatenate([result[key] for result in results]) for key in results[0]
    }


def dyadic_step(problem: NsddeProblem, exponent: int) -> Fraction:
    return problem.delay / 2 ** exponent


def simulate_coupled(
    problem: NsddeProblem,
    fine: FineBrownianPath,
    exponent: int,
    kind: SchemeKind,
    alpha: float,
) -> Trajectory:
    """Simulate on the grid dt = tau / 2**exponent driven by the shared fine path."""
    grid = dyadic_grid(problem.delay, problem.horizon, exponent)
    return simulate_path(problem, grid, coarsen_increments(fine, grid), kind, alpha)


def sup_norms(traj: Trajectory) -> np.ndarray:
    """max_k |Y_k| over k = 0..M per path, infinite for exploded paths."""
    with np.errstate(invalid="ignore"):
        sups = np.max(np.linalg.norm(traj.nodes, axis=-1), axis=1)
    return np.where(traj.exploded, np.inf, sups)
