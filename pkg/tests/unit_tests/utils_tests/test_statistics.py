import numpy as np
import pytest

import nsdde_milstein._utils.statistics as statistics
from nsdde_milstein._utils.exceptions import DegenerateFit


def test_mean_and_stderr():
    mean, stderr = statistics.mean_and_stderr([1.0, 2.0, 3.0])
    assert mean == 2.0
    assert stderr == pytest.approx(1 / np.sqrt(3))


@pytest.mark.parametrize(
    "values,expected_mean,expected_stderr",
    [
        ([], np.nan, np.nan),
        ([2.0], 2.0, np.nan),
        ([0.5, 0.5, 0.5], 0.5, 0.0),
    ],
)
def test_mean_and_stderr_edge_cases(values, expected_mean, expected_stderr):
    mean, stderr = statistics.mean_and_stderr(values)
    np.testing.assert_equal([mean, stderr], [expected_mean, expected_stderr])


def test_lp_estimate():
    assert statistics.lp_estimate(np.array([4.0, 4.0]), 2) == (2.0, 0.0)
    estimate, stderr = statistics.lp_estimate(np.array([1.0, 3.0]), 2)
    assert estimate == pytest.approx(np.sqrt(2))
    assert stderr == pytest.approx(np.sqrt(2) / 4)
    assert np.isnan(statistics.lp_estimate(np.array([]), 2)[0])


def test_fit_order_recovers_power_law():
    steps = 2.0 ** -np.arange(3, 9)
    assert statistics.fit_order(steps, 3 * steps ** 1.5) == pytest.approx(1.5)


def test_fit_order_skips_unusable_errors():
    steps = [0.5, 0.25, 0.125, 0.0625]
    errors = [np.nan, 0.25, 0.125, 0.0]
    assert statistics.fit_order(steps, errors) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "steps,errors",
    [
        ([0.5], [0.1]),
        ([0.5, 0.5], [0.1, 0.2]),
        ([0.5, 0.25], [0.1, np.inf]),
    ],
)
def test_fit_order_degenerate(steps, errors):
    with pytest.raises(DegenerateFit):
        statistics.fit_order(steps, errors)


@pytest.mark.parametrize("scale", [0.5, 3.0, -2.0])
@pytest.mark.parametrize("p", [2.0, 4.0])
def test_lp_estimate_is_homogeneous(scale, p):
    values = np.abs(np.random.default_rng(3).standard_normal(500))
    estimate, stderr = statistics.lp_estimate(values ** p, p)
    scaled, scaled_stderr = statistics.lp_estimate(np.abs(scale * values) ** p, p)
    assert scaled == pytest.approx(abs(scale) * estimate, rel=1e-12)
    assert scaled_stderr == pytest.approx(abs(scale) * stderr, rel=1e-9)
