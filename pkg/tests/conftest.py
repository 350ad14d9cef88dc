import numpy as np
import pytest

from nsdde_milstein import (
    CoefficientSet,
    InitialSegment,
    NsddeProblem,
    builtin_problem,
)


def _zeros(x, *_args):
    return np.zeros_like(x, dtype=float)


@pytest.fixture
def linear_problem():
    return builtin_problem("linear-sdde")


@pytest.fixture
def cubic_problem():
    return builtin_problem("cubic-tamed")


@pytest.fixture
def stiff_problem():
    return builtin_problem("stiff-cubic")


@pytest.fixture
def zero_problem():
    """Every coefficient zero and a constant segment, so every scheme keeps the
    state at 1.
    """
    return NsddeProblem(
        name="zero",
        dim=1,
        coefficients=CoefficientSet(
            D=_zeros, b=_zeros, sigma=_zeros, sigma1_sigma=_zeros, sigma2_sigma=_zeros
        ),
        segment=InitialSegment(evaluate=lambda t: np.array([1.0]), holder_constant=0.0),
        delay=1,
        horizon=2,
        kappa=0.5,
        khasminskii_K1=1.0,
        khasminskii_p=4,
    )


@pytest.fixture
def output_dir(tmp_path):
    return tmp_path / "results"
