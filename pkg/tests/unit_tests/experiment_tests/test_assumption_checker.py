from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

import nsdde_milstein.experiments._assumption_checker as checker
from nsdde_milstein import builtin_problem
from nsdde_milstein._datainput.problem import CoefficientSet, InitialSegment
from nsdde_milstein._utils.exceptions import BadExponent, ContractionViolated


def test_contraction(cubic_problem):
    kappa_hat, ok = checker.check_contraction(
        cubic_problem.coefficients, R=10, samples=500, seed=1
    )
    assert kappa_hat == pytest.approx(0.25, rel=1e-9)
    assert ok


def test_contraction_failure(cubic_problem):
    expanding = CoefficientSet(
        D=lambda y: 1.5 * y,
        b=cubic_problem.coefficients.b,
        sigma=cubic_problem.coefficients.sigma,
        sigma1_sigma=cubic_problem.coefficients.sigma1_sigma,
        sigma2_sigma=cubic_problem.coefficients.sigma2_sigma,
    )
    kappa_hat, ok = checker.check_contraction(expanding, R=10, samples=200, seed=1)
    assert kappa_hat == pytest.approx(1.5, rel=1e-9)
    assert not ok


def test_local_lipschitz(linear_problem):
    K_R, Kbar_R = checker.check_local_lipschitz(
        linear_problem.coefficients, R=5, samples=500, seed=2
    )
    # |b(x, y) - b(u, v)| <= 2 |x - u| + |y - v|, attained along x
    assert K_R == pytest.approx(2.0, rel=1e-6)
    assert 0 < Kbar_R <= 0.25 + 1e-9


def test_khasminskii(cubic_problem):
    ok, K1_hat, violations = checker.check_khasminskii(
        cubic_problem.coefficients,
        cubic_problem.kappa,
        4,
        R=10,
        samples=5000,
        seed=42,
        declared_K1=cubic_problem.khasminskii_K1,
    )
    assert ok
    assert 0.2 < K1_hat <= cubic_problem.khasminskii_K1
    assert violations == []


def test_khasminskii_witnesses(cubic_problem):
    _, K1_hat, violations = checker.check_khasminskii(
        cubic_problem.coefficients, 0.25, 4, R=10, samples=500, seed=1, declared_K1=0.01
    )
    assert violations
    for violation in violations:
        assert violation.assumption == "A5"
        assert violation.value > violation.bound
        assert violation.value <= K1_hat * (
            1 + violation.x[0] ** 2 + violation.y[0] ** 2
        ) * (1 + 1e-12)


@pytest.mark.parametrize(
    "kappa,p,error", [(1.0, 4, ContractionViolated), (0.25, 2, BadExponent)]
)
def test_khasminskii_arguments(cubic_problem, kappa, p, error):
    with pytest.raises(error):
        checker.check_khasminskii(cubic_problem.coefficients, kappa, p, 10, 100, 1)


def test_khasminskii_ladder(cubic_problem):
    ladder = checker.khasminskii_ladder(
        cubic_problem.coefficients, 0.25, 4, [20, 1, 10], samples=2000, seed=3
    )
    assert ladder["R"].tolist() == [1.0, 10.0, 20.0]
    assert ladder["K1_hat"].is_monotonic_increasing
    assert checker.ladder_stabilises(ladder)


@pytest.mark.parametrize(
    "estimates,stable",
    [([0.1, 0.5], False), ([0.3, 0.32], True), ([0.0, 0.0], True), ([0.2], True)],
)
def test_ladder_stabilises(estimates, stable):
    ladder = pd.DataFrame(
        {"R": [float(2 ** i) for i in range(len(estimates))], "K1_hat": estimates}
    )
    assert checker.ladder_stabilises(ladder) is stable


def test_taming_gap_table(cubic_problem):
    deltas = [2.0 ** -e for e in range(3, 9)]
    table = checker.check_taming_gap(
        cubic_problem.coefficients, 10, deltas, 0.5, samples=1000, seed=1
    )
    assert list(table.columns) == ["dt", "gap", "n_r_hat", "n_r_alpha_hat"]
    assert table["dt"].tolist() == deltas
    # N_R grows as the step shrinks
    assert np.all(np.diff(table["n_r_hat"]) > 0)
    assert np.all(np.diff(table["gap"]) < 0)
    np.testing.assert_allclose(table["n_r_hat"], table["gap"] / table["dt"])


def test_tamed_khasminskii(cubic_problem):
    ok, violations = checker.check_tamed_khasminskii(
        cubic_problem.coefficients,
        cubic_problem.khasminskii_K1,
        10,
        0.125,
        0.5,
        samples=2000,
        seed=4,
    )
    assert ok
    assert violations == []


def test_tamed_lipschitz(linear_problem):
    K_R, _ = checker.check_local_lipschitz(
        linear_problem.coefficients, R=5, samples=300, seed=2
    )
    ok, ratio = checker.check_tamed_lipschitz(
        linear_problem.coefficients, K_R, 5, 0.125, 0.5, samples=300, seed=2
    )
    assert ok
    assert 0 < ratio <= 1 + 1e-9


def test_segment_holder(cubic_problem, stiff_problem):
    assert checker.check_segment_holder(cubic_problem, 200, 1) == pytest.approx(1.0)
    assert checker.check_segment_holder(stiff_problem, 200, 1) == 0


def test_run_assumption_checks(cubic_problem):
    report = checker.run_assumption_checks(cubic_problem, radius=10, samples=2000)
    assert report.contraction_ok
    assert report.khasminskii_ok
    assert report.tamed_khasminskii_ok
    assert report.violations == []
    assert report.kappa_hat == pytest.approx(0.25, rel=1e-9)
    assert len(report.taming_gap) == 6

    frame = checker.report_frame(report)
    assert list(frame.columns) == ["assumption", "quantity", "R", "value"]
    def value(assumption, quantity):
        rows = frame[
            (frame["assumption"] == assumption) & (frame["quantity"] == quantity)
        ]
        return rows["value"].item()

    assert value("A2", "kappa_hat") == pytest.approx(0.25, rel=1e-9)
    assert value("A2", "contraction_ok") == 1.0
    assert value("all", "violations") == 0.0
    assert (frame["quantity"] == "K1_hat_ladder").sum() == 3

    violations = checker.violations_frame(report)
    assert list(violations.columns) == ["assumption", "x_0", "y_0", "value", "bound"]
    assert violations.empty


def test_violations_frame(cubic_problem):
    report = checker.run_assumption_checks(cubic_problem, radius=10, samples=200)
    report.violations.append(
        checker.Violation("A5", x=(1.0,), y=(2.0,), value=3.0, bound=1.0)
    )
    frame = checker.violations_frame(report)
    assert frame.iloc[-1].tolist() == ["A5", 1.0, 2.0, 3.0, 1.0]


def _zeros(x, *_args):
    return np.zeros_like(x, dtype=float)


def _coefficients(D=_zeros, b=_zeros, sigma=_zeros):
    return CoefficientSet(
        D=D, b=b, sigma=sigma, sigma1_sigma=_zeros, sigma2_sigma=_zeros
    )


def test_contraction_of_sine_neutral_term():
    coeffs = _coefficients(D=lambda y: 0.5 * np.sin(y))
    kappa_hat, ok = checker.check_contraction(coeffs, R=10, samples=10000, seed=42)
    assert 0.49 < kappa_hat <= 0.5 + 1e-9
    assert ok


def test_local_lipschitz_of_cubic_drift(cubic_problem):
    K_R, _ = checker.check_local_lipschitz(
        cubic_problem.coefficients, R=10, samples=10000, seed=42
    )
    # |d/dx (x - x^3)| = |1 - 3 x^2| reaches 299 on the boundary
    assert K_R == pytest.approx(300, rel=0.1)
    assert K_R <= 299 * (1 + 1e-6)


def test_constant_diffusion_is_not_lipschitz_relevant():
    coeffs = _coefficients(sigma=lambda x, y: np.full_like(x, 0.3, dtype=float))
    K_R, Kbar_R = checker.check_local_lipschitz(coeffs, R=10, samples=500, seed=3)
    assert K_R == 0
    assert Kbar_R == 0


def test_estimates_grow_with_samples(cubic_problem):
    sine = _coefficients(D=lambda y: 0.5 * np.sin(y))
    kappas = [
        checker.check_contraction(sine, R=10, samples=samples, seed=5)[0]
        for samples in (200, 1000, 4000)
    ]
    lipschitz = [
        checker.check_local_lipschitz(
            cubic_problem.coefficients, R=10, samples=samples, seed=5
        )[0]
        for samples in (200, 1000, 4000)
    ]
    # larger samples extend the smaller ones
    assert kappas == sorted(kappas)
    assert lipschitz == sorted(lipschitz)


def test_ladder_of_superlinear_drift_does_not_stabilise():
    coeffs = _coefficients(b=lambda x, y: x ** 3)
    ladder = checker.khasminskii_ladder(
        coeffs, 0.5, 4, [1, 2, 4, 8], samples=2000, seed=1
    )
    # x b(x) = x^4 against 1 + x^2 grows like R^2
    assert ladder["K1_hat"].tolist()[0] == pytest.approx(0.5, rel=1e-9)
    assert ladder["K1_hat"].tolist()[1] == pytest.approx(3.2, rel=1e-9)
    assert not checker.ladder_stabilises(ladder)


def test_segment_steeper_than_declared(cubic_problem):
    steep = replace(
        cubic_problem,
        segment=InitialSegment(
            evaluate=lambda t: np.array([1.0 + 3.0 * t]), holder_constant=1.0
        ),
    )
    report = checker.run_assumption_checks(steep, radius=10, samples=200)
    assert report.theta_hat == pytest.approx(3.0)
    segment_violations = [v for v in report.violations if v.assumption == "A1"]
    assert len(segment_violations) > 100
    for violation in segment_violations:
        t, s = violation.times
        assert -1 <= t <= 0 and -1 <= s <= 0 and t != s
        assert violation.x[0] == pytest.approx(1.0 + 3.0 * t)
        assert violation.y[0] == pytest.approx(1.0 + 3.0 * s)
        assert violation.value == pytest.approx(3.0)
        assert violation.bound == 1.0


@pytest.mark.parametrize(
    "name", ["linear-sdde", "cubic-tamed", "pure-neutral", "stiff-cubic"]
)
def test_builtin_segments_respect_their_constant(name):
    problem = builtin_problem(name)
    assert checker._holder_violations(problem, samples=500, seed=42) == []
    assert checker.check_segment_holder(problem, 500, 42) <= (
        problem.segment.holder_constant + 1e-6
    )
