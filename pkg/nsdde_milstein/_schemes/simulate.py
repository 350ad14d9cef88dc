from fractions import Fraction
from typing import Union

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .._datainput.brownian import GridSpec, StepIncrements
from .._datainput.problem import NsddeProblem, TamingParams, evaluate_segment
from .._utils.exceptions import GridMismatch, OutOfRange
from .one_step import SchemeKind, advance

# States at or beyond this norm mark a path as exploded.
OVERFLOW_GUARD = 1e12


@dataclass(frozen=True)
class Trajectory:
    """Scheme output for a batch of paths.

    `states` has shape (paths, 2m + M + 1, n) and is indexed by k + 2m for
    k = -2m..M. From `explosion_step` on (the first node whose norm reached
    OVERFLOW_GUARD) the states of an exploded path are NaN; `explosion_step` is -1
    for paths that did not explode.
    """

    grid: GridSpec
    kind: SchemeKind
    states: np.ndarray
    exploded: np.ndarray
    explosion_step: np.ndarray

    @property
    def n_paths(self) -> int:
        return self.states.shape[0]

    @property
    def nodes(self) -> np.ndarray:
        """States at k = 0..M, shape (paths, M + 1, n)."""
        return self.states[:, 2 * self.grid.m :]

    def state(self, k: int) -> np.ndarray:
        return self.states[:, k + 2 * self.grid.m]


def segment_history(problem: NsddeProblem, grid: GridSpec) -> np.ndarray:
    """Y_k = xi(t_k) for k = -2m..0, shape (2m + 1, n)."""
    return np.stack(
        [
            evaluate_segment(problem, Fraction(k) * grid.delta)
            for k in range(-2 * grid.m, 1)
        ]
    )


def _check_grid(problem: NsddeProblem, grid: GridSpec, inc: StepIncrements):
    if grid.tau != problem.delay or grid.horizon != problem.horizon:
        raise GridMismatch(
            f"Grid with tau = {grid.tau}, T = {grid.horizon} does not match problem "
            f"{problem.name} with tau = {problem.delay}, T = {problem.horizon}."
        )
    if inc.grid != grid:
        raise GridMismatch("Step increments were built on a different grid.")


def simulate_path(
    problem: NsddeProblem,
    grid: GridSpec,
    inc: StepIncrements,
    kind: SchemeKind = SchemeKind.TAMED_MILSTEIN,
    alpha: float = 0.5,
) -> Trajectory:
    """Run the recursion for every path in `inc`. Explosions are recorded, not
    raised.
    """
    _check_grid(problem, grid, inc)
    alpha = TamingParams(alpha).alpha
    delta = float(grid.delta)
    d_b, l1, l2 = (np.atleast_2d(values) for values in (inc.dB, inc.l1, inc.l2))
    n_paths = d_b.shape[0]
    offset = 2 * grid.m

    states = np.full((n_paths, grid.n_nodes, problem.dim), np.nan)
    states[:, : offset + 1] = segment_history(problem, grid)
    exploded = np.zeros(n_paths, dtype=bool)
    explosion_step = np.full(n_paths, -1)

    for k in range(grid.M):
        node = k + offset
        new = advance(
            kind,
            states[:, node],
            states[:, node - grid.m],
            states[:, node - 2 * grid.m],
            states[:, node + 1 - grid.m],
            problem.coefficients,
            (d_b[:, k], l1[:, k], l2[:, k]),
            delta,
            alpha,
        )
        with np.errstate(all="ignore"):
            over = ~(np.linalg.norm(new, axis=-1) < OVERFLOW_GUARD)
        fresh = over & ~exploded
        explosion_step[fresh] = k + 1
        exploded |= over
        new[exploded] = np.nan
        states[:, node + 1] = new

    return Trajectory(
        grid=grid,
        kind=kind,
        states=states,
        exploded=exploded,
        explosion_step=explosion_step,
    )


def step_process_lookup(traj: Trajectory, t: Union[float, Fraction]) -> np.ndarray:
    """Piecewise constant interpolant: Y_{t_k} for t in [t_k, t_{k+1}), Y_{t_M} at T.

    Returns one state per path, shape (paths, n).
    """
    if not 0 <= Fraction(t) <= traj.grid.horizon:
        raise OutOfRange(
            f"Time {t} is outside the simulation interval "
            f"[0, {float(traj.grid.horizon)}]."
        )
    times = traj.grid.node_times()
    k = min(int(np.searchsorted(times, float(t), side="right")) - 1, traj.grid.M)
    return traj.nodes[:, k]


def trajectory_frame(traj: Trajectory, path: int = 0) -> pd.DataFrame:
    """One path at the nodes k = 0..M with columns t, y_0, ..., y_{n-1}."""
    nodes = traj.nodes[path]
    frame = pd.DataFrame({"t": traj.grid.node_times()})
    for component in range(nodes.shape[-1]):
        frame[f"y_{component}"] = nodes[:, component]
    return frame
