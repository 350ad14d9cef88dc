from typing import Sequence, Tuple

import numpy as np
from scipy import stats

from .exceptions import DegenerateFit


def mean_and_stderr(values: np.ndarray) -> Tuple[float, float]:
    """Sample mean and its standard error. A constant sample has stderr 0, a sample
    of fewer than two values has stderr NaN, an empty one NaN for both.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return np.nan, np.nan
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, np.nan
    if np.all(values == values[0]):
        return mean, 0.0
    return mean, float(stats.sem(values, ddof=1))


def lp_estimate(pth_powers: np.ndarray, p: float) -> Tuple[float, float]:
    """(mean of X**p)**(1/p) with a delta-method standard error."""
    mean, stderr = mean_and_stderr(pth_powers)
    if not np.isfinite(mean):
        return np.nan, np.nan
    estimate = mean ** (1.0 / p)
    if stderr == 0:
        return estimate, 0.0
    return estimate, float(estimate / (p * mean) * stderr)


def fit_order(steps: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(step)."""
    steps = np.asarray(steps, dtype=float)
    errors = np.asarray(errors, dtype=float)
    usable = np.isfinite(errors) & (errors > 0) & (steps > 0)
    steps, errors = steps[usable], errors[usable]
    if np.unique(steps).size < 2:
        raise DegenerateFit(
            f"Need errors at two or more distinct step sizes to fit an order, "
            f"got {np.unique(steps).size} usable step size(s)."
        )
    return float(stats.linregress(np.log(steps), np.log(errors)).slope)
