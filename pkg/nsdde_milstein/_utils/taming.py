from typing import NamedTuple, Union

import numpy as np

from .exceptions import BadExponent, BadStep, NonFiniteInput


class TamedDriftValue(NamedTuple):
    """Tamed drift b / (1 + dt**alpha |b|) and the raw norm |b|.

    For batched input `value` has the shape of the input and `raw_norm` drops the
    last (state) axis.
    """

    value: np.ndarray
    raw_norm: Union[float, np.ndarray]


def _check_step(delta: float, alpha: float):
    if not 0 < delta < 1:
        raise BadStep(f"Taming needs a step in (0, 1), got {delta}.")
    if not 0 < alpha <= 0.5:
        raise BadExponent(f"Taming exponent must lie in (0, 1/2], got {alpha}.")


def _as_vector(b_val) -> np.ndarray:
    b_val = np.asarray(b_val, dtype=float)
    if b_val.ndim == 0:
        b_val = b_val.reshape(1)
    if not np.all(np.isfinite(b_val)):
        raise NonFiniteInput("Drift value must be finite to be tamed.")
    return b_val


def taming_factor(raw_norm, delta: float, alpha: float):
    """lambda = 1 / (1 + dt**alpha |b|), the scalar by which b is shrunk."""
    return 1.0 / (1.0 + delta ** alpha * raw_norm)


def apply_taming(b_val: np.ndarray, delta: float, alpha: float) -> np.ndarray:
    """Unchecked tamed drift for arrays of shape (..., n). Non-finite rows stay
    non-finite, the simulators use that to detect explosions.
    """
    raw_norm = np.linalg.norm(b_val, axis=-1, keepdims=True)
    return b_val * taming_factor(raw_norm, delta, alpha)


def tame_drift(b_val, delta: float, alpha: float) -> TamedDriftValue:
    _check_step(delta, alpha)
    b_val = _as_vector(b_val)
    return TamedDriftValue(
        value=apply_taming(b_val, delta, alpha),
        raw_norm=np.linalg.norm(b_val, axis=-1)[()],
    )


def taming_gap(b_val, delta: float, alpha: float):
    """|b - b_h| = dt**alpha |b|**2 / (1 + dt**alpha |b|)."""
    _check_step(delta, alpha)
    b_val = _as_vector(b_val)
    raw_norm = np.linalg.norm(b_val, axis=-1)
    scaled = delta ** alpha * raw_norm
    return (scaled * raw_norm / (1.0 + scaled))[()]
