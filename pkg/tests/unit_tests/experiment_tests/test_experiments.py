import numpy as np
import pandas as pd
import pytest

from nsdde_milstein._schemes.one_step import SchemeKind
from nsdde_milstein._utils.exceptions import (
    ConstraintViolation,
    GridMismatch,
    InsufficientPaths,
)
from nsdde_milstein.experiments import (
    estimate_exit_probability,
    estimate_interpolation_gap,
    estimate_order,
    estimate_sup_moment,
    run_strong_convergence,
)


def test_convergence_report(linear_problem):
    report = run_strong_convergence(
        linear_problem,
        schemes=[SchemeKind.TAMED_MILSTEIN, SchemeKind.EM],
        m_exponents=[2, 3],
        ref_exponent=5,
        paths=8,
    )
    table = report.table
    assert list(table.columns) == [
        "scheme",
        "dt",
        "paths",
        "p",
        "error",
        "stderr",
        "exploded_fraction",
        "unreliable",
    ]
    assert table["scheme"].tolist() == ["tamed-milstein"] * 2 + ["em"] * 2
    assert table["dt"].tolist() == [0.25, 0.125] * 2
    assert np.all(table["error"] > 0)
    assert not table["unreliable"].any()
    assert set(report.slopes) == {"tamed-milstein", "em"}
    assert report.slopes["em"] == estimate_order(report, SchemeKind.EM)


def test_convergence_independent_of_workers(linear_problem):
    arguments = dict(
        schemes=[SchemeKind.TAMED_MILSTEIN],
        m_exponents=[2, 3],
        ref_exponent=5,
        paths=8,
        seed=3,
    )
    serial = run_strong_convergence(linear_problem, **arguments)
    threaded = run_strong_convergence(
        linear_problem, workers=2, batch_size=3, **arguments
    )
    pd.testing.assert_frame_equal(serial.table, threaded.table)


def test_reference_self_row(linear_problem):
    report = run_strong_convergence(
        linear_problem,
        schemes=[SchemeKind.TAMED_MILSTEIN],
        m_exponents=[2, 3],
        ref_exponent=3,
        paths=4,
    )
    self_row = report.table.iloc[-1]
    assert self_row["error"] == 0
    assert self_row["stderr"] == 0
    # a single nonzero error does not determine an order
    assert np.isnan(report.slopes["tamed-milstein"])


def test_convergence_errors(linear_problem):
    with pytest.raises(GridMismatch):
        run_strong_convergence(
            linear_problem, [SchemeKind.EM], [2, 3], ref_exponent=2, paths=4
        )
    with pytest.raises(InsufficientPaths):
        run_strong_convergence(
            linear_problem, [SchemeKind.EM], [2, 3], ref_exponent=5, paths=1
        )


def test_sup_moment(linear_problem):
    report = estimate_sup_moment(
        linear_problem, SchemeKind.TAMED_MILSTEIN, 2, paths=10, p=4.0
    )
    assert len(report.table) == 1
    row = report.table.iloc[0]
    assert row["scheme"] == "tamed-milstein"
    assert row["dt"] == 0.25
    assert row["p"] == 4.0
    assert np.isfinite(row["sup_moment"])
    # the supremum includes t = 0 where |x| = 1
    assert row["sup_moment"] >= 1.0
    assert row["exploded_fraction"] == 0


def test_sup_moment_with_reference(linear_problem):
    report = estimate_sup_moment(
        linear_problem, SchemeKind.EM, 2, paths=10, include_reference=True
    )
    assert report.table["scheme"].tolist() == ["em", "tamed-milstein"]
    assert report.table["dt"].tolist() == [0.25, 0.015625]


def test_interpolation_gap_decreases(linear_problem):
    coarse = estimate_interpolation_gap(linear_problem, 2, 6, paths=40)
    fine = estimate_interpolation_gap(linear_problem, 4, 6, paths=40)
    assert list(coarse.table.columns) == ["dt", "p", "gap", "stderr"]
    assert 0 < fine.table["gap"][0] < coarse.table["gap"][0]


def test_interpolation_gap_needs_finer_reference(linear_problem):
    with pytest.raises(GridMismatch):
        estimate_interpolation_gap(linear_problem, 3, 3, paths=10)


def test_exit_probability(cubic_problem):
    report = estimate_exit_probability(
        cubic_problem, SchemeKind.TAMED_MILSTEIN, 3, paths=20, radii=[2, 4]
    )
    table = report.table
    assert table["which"].tolist() == ["tau_R", "tau_R", "rho_R", "rho_R"]
    assert table["R"].tolist() == [2.0, 4.0, 2.0, 4.0]
    np.testing.assert_allclose(table["scaled"], table["R"] ** 2 * table["prob"])
    for _, rows in table.groupby("which"):
        probs = rows["prob"].to_numpy()
        assert np.all((probs >= 0) & (probs <= 1))
        assert probs[1] <= probs[0]


def test_exit_probability_radii(cubic_problem):
    with pytest.raises(ConstraintViolation):
        estimate_exit_probability(
            cubic_problem, SchemeKind.EM, 2, paths=4, radii=[4, 2]
        )
    with pytest.raises(ConstraintViolation):
        estimate_exit_probability(
            cubic_problem, SchemeKind.EM, 2, paths=4, radii=[0, 2]
        )
    with pytest.warns(UserWarning):
        estimate_exit_probability(
            cubic_problem, SchemeKind.EM, 2, paths=4, radii=[0.5, 2]
        )


@pytest.mark.parametrize("kind", [SchemeKind.EM, SchemeKind.TAMED_MILSTEIN])
def test_sup_moment_of_constant_path(zero_problem, kind):
    report = estimate_sup_moment(zero_problem, kind, 3, paths=10, p=4.0)
    row = report.table.iloc[0]
    assert row["sup_moment"] == 1.0
    assert row["stderr"] == 0.0


def test_zero_problem_has_no_error(zero_problem):
    report = run_strong_convergence(
        zero_problem,
        schemes=[SchemeKind.EM, SchemeKind.MILSTEIN, SchemeKind.TAMED_MILSTEIN],
        m_exponents=[2, 3],
        ref_exponent=5,
        paths=6,
    )
    assert np.all(report.table["error"] == 0)
    assert np.all(report.table["stderr"] == 0)
    assert all(np.isnan(slope) for slope in report.slopes.values())


def test_exit_probability_of_constant_path(zero_problem):
    with pytest.warns(UserWarning):
        report = estimate_exit_probability(
            zero_problem, SchemeKind.TAMED_MILSTEIN, 2, paths=8, radii=[0.5, 2]
        )
    for _, rows in report.table.groupby("which"):
        # every path starts at |xi(0)| = 1 and stays there
        assert rows["prob"].tolist() == [1.0, 0.0]
