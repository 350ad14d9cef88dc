from enum import Enum
from typing import Tuple

import numpy as np

from .._datainput.problem import CoefficientSet
from .._utils.taming import apply_taming


class SchemeKind(Enum):
    EM = "em"
    TAMED_EM = "tamed-em"
    MILSTEIN = "milstein"
    TAMED_MILSTEIN = "tamed-milstein"

    @property
    def tamed(self) -> bool:
        return self in (SchemeKind.TAMED_EM, SchemeKind.TAMED_MILSTEIN)

    @property
    def milstein(self) -> bool:
        return self in (SchemeKind.MILSTEIN, SchemeKind.TAMED_MILSTEIN)

    @classmethod
    def from_name(cls, name: str) -> "SchemeKind":
        try:
            return cls(name)
        except ValueError as exc:
            raise ValueError(
                f"Unknown scheme '{name}'. Valid schemes are: "
                f"{', '.join(kind.value for kind in cls)}."
            ) from exc


# (dB_k, l1_k, l2_k), scalars or one entry per path
Increment = Tuple[np.ndarray, np.ndarray, np.ndarray]


def _per_path(value) -> np.ndarray:
    return np.asarray(value, dtype=float)[..., np.newaxis]


def advance(
    kind: SchemeKind,
    y_k: np.ndarray,
    y_k_m: np.ndarray,
    y_k_2m: np.ndarray,
    y_k1_m: np.ndarray,
    coeffs: CoefficientSet,
    inc: Increment,
    delta: float,
    alpha: float,
) -> np.ndarray:
    """One step of any scheme for states of shape (..., n).

    The terms are accumulated in the order
    D(Y_{k+1-m}) + Y_k - D(Y_{k-m}) + drift * dt + sigma dB [+ Milstein terms],
    so forcing l1 = l2 = 0 in a Milstein step reproduces the Euler step bit by bit.
    Non-finite results are returned as they are; the caller decides on explosion.
    """
    d_b, l1, l2 = (_per_path(value) for value in inc)
    with np.errstate(all="ignore"):
        drift = coeffs.b(y_k, y_k_m)
        if kind.tamed:
            drift = apply_taming(drift, delta, alpha)
        state = (
            coeffs.D(y_k1_m)
            + y_k
            - coeffs.D(y_k_m)
            + drift * delta
            + coeffs.sigma(y_k, y_k_m) * d_b
        )
        if kind.milstein:
            state = (
                state
                + coeffs.sigma1_sigma(y_k, y_k_m) * l1
                + coeffs.sigma2_sigma(y_k, y_k_m, y_k_m, y_k_2m) * l2
            )
    return state


def step_tamed_milstein(
    y_k: np.ndarray,
    y_k_m: np.ndarray,
    y_k_2m: np.ndarray,
    y_k1_m: np.ndarray,
    coeffs: CoefficientSet,
    inc: Increment,
    delta: float,
    alpha: float,
) -> np.ndarray:
    """Y_{k+1} of the tamed Milstein scheme."""
    return advance(
        SchemeKind.TAMED_MILSTEIN, y_k, y_k_m, y_k_2m, y_k1_m, coeffs, inc, delta, alpha
    )


def step_baseline(
    kind: SchemeKind,
    y_k: np.ndarray,
    y_k_m: np.ndarray,
    y_k_2m: np.ndarray,
    y_k1_m: np.ndarray,
    coeffs: CoefficientSet,
    inc: Increment,
    delta: float,
    alpha: float = 0.5,
) -> np.ndarray:
    """Y_{k+1} of a baseline scheme: EM drops the Milstein terms, the tamed
    variants replace b by its tamed version.
    """
    return advance(kind, y_k, y_k_m, y_k_2m, y_k1_m, coeffs, inc, delta, alpha)
