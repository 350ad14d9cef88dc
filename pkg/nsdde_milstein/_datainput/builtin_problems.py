import json
import pathlib
from functools import lru_cache
from typing import Dict, List

import numpy as np

from .._utils.exceptions import UnknownProblem
from .problem import CoefficientSet, InitialSegment, NsddeProblem, validate_problem


_DATA_PATH = pathlib.Path(__file__).parent.absolute() / "problem_data"

BUILTIN_PROBLEMS = json.loads((_DATA_PATH / "builtin_problems.json").read_text())


def _zero(y):
    return np.zeros_like(y, dtype=float)


def _zero_pair(x, _y):
    return np.zeros_like(x, dtype=float)


def _zero_quad(x, _y, _u, _v):
    return np.zeros_like(x, dtype=float)


def _linear_b(x, y):
    return -2.0 * x + y


def _linear_sigma(x, y):
    return 0.5 * x + 0.1 * y


def _linear_sigma1_sigma(x, y):
    return 0.5 * _linear_sigma(x, y)


def _linear_sigma2_sigma(_x, _y, u, v):
    return 0.1 * _linear_sigma(u, v)


def _cubic_D(y):
    return 0.25 * y


def _cubic_b(x, y):
    return x - x ** 3 + 0.5 * y


def _cubic_sigma(x, _y):
    return 0.5 * x


def _cubic_sigma1_sigma(x, _y):
    return 0.25 * x


def _neutral_D(y):
    return 0.5 * y


def _neutral_b(x, _y):
    return -x


def _neutral_sigma(x, _y):
    return np.full_like(x, 0.3, dtype=float)


def _stiff_D(y):
    return 0.1 * y


def _stiff_b(x, y):
    return -((x - 0.1 * y) ** 3)


def _stiff_sigma(x, _y):
    return 1.0 * x


_COEFFICIENTS: Dict[str, CoefficientSet] = {
    "linear-sdde": CoefficientSet(
        D=_zero,
        b=_linear_b,
        sigma=_linear_sigma,
        sigma1_sigma=_linear_sigma1_sigma,
        sigma2_sigma=_linear_sigma2_sigma,
    ),
    "cubic-tamed": CoefficientSet(
        D=_cubic_D,
        b=_cubic_b,
        sigma=_cubic_sigma,
        sigma1_sigma=_cubic_sigma1_sigma,
        sigma2_sigma=_zero_quad,
    ),
    "pure-neutral": CoefficientSet(
        D=_neutral_D,
        b=_neutral_b,
        sigma=_neutral_sigma,
        sigma1_sigma=_zero_pair,
        sigma2_sigma=_zero_quad,
    ),
    "stiff-cubic": CoefficientSet(
        D=_stiff_D,
        b=_stiff_b,
        sigma=_stiff_sigma,
        sigma1_sigma=_stiff_sigma,
        sigma2_sigma=_zero_quad,
    ),
}

_SEGMENTS = {
    "linear-sdde": lambda t: np.array([1.0 + t]),
    "cubic-tamed": lambda t: np.array([1.0 + t]),
    "pure-neutral": lambda t: np.array([np.cos(t)]),
    "stiff-cubic": lambda t: np.array([3.0]),
}


def list_builtin_problems() -> List[str]:
    return sorted(BUILTIN_PROBLEMS)


@lru_cache(maxsize=None)
def builtin_problem(name: str) -> NsddeProblem:
    """Return the registered problem instance with the given name."""
    try:
        constants = BUILTIN_PROBLEMS[name]
    except KeyError as exc:
        raise UnknownProblem(
            f"Unknown problem '{name}'. Available problems are: "
            f"{', '.join(list_builtin_problems())}."
        ) from exc

    problem = NsddeProblem(
        name=name,
        dim=constants["dim"],
        coefficients=_COEFFICIENTS[name],
        segment=InitialSegment(
            evaluate=_SEGMENTS[name], holder_constant=constants["holder_constant"]
        ),
        delay=constants["delay"],
        horizon=constants["horizon"],
        kappa=constants["kappa"],
        khasminskii_K1=constants["khasminskii_K1"],
        khasminskii_p=constants["khasminskii_p"],
    )
    validate_problem(problem)
    return problem
