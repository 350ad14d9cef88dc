import warnings
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence, Tuple

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .._datainput.problem import (
    CoefficientSet,
    NsddeProblem,
    evaluate_segment,
)
from .._utils.csv_output import violations_schema
from .._utils.exceptions import BadExponent, ContractionViolated
from .._utils.sampling import StateSample, sample_ladder, sample_pairs, sample_states
from .._utils.taming import apply_taming


class Violation(NamedTuple):
    """A sampled point where `value <= bound` fails for the named assumption."""

    assumption: str
    x: Tuple[float, ...]
    y: Tuple[float, ...]
    value: float
    bound: float
    # (t, s) for initial segment witnesses, whose x and y are xi(t) and xi(s)
    times: Tuple[float, ...] = ()


@dataclass
class AssumptionReport:
    # pylint: disable=too-many-instance-attributes
    radius: float
    samples: int
    theta_hat: float
    kappa_hat: float
    contraction_ok: bool
    K_R_hat: float
    Kbar_R_hat: float
    khasminskii_ok: bool
    K1_hat: float
    khasminskii_ladder: pd.DataFrame
    taming_gap: pd.DataFrame
    tamed_lipschitz_ratio: float
    tamed_khasminskii_ok: bool
    violations: List[Violation] = field(default_factory=list)


def _norm(values: np.ndarray) -> np.ndarray:
    return np.linalg.norm(values, axis=-1)


def _safe_quotient(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    usable = denominator > 0
    return numerator[usable] / denominator[usable]


def _max_or_zero(values: np.ndarray) -> float:
    return float(max(np.max(values, initial=0.0), 0.0))


def _point_pairs(
    first: StateSample, second: StateSample
) -> Tuple[np.ndarray, np.ndarray]:
    """Single-state pairs from both the x and the y components of the pairs."""
    return (
        np.concatenate([first.x, first.y]),
        np.concatenate([second.x, second.y]),
    )


def _khasminskii_ratio(
    coeffs: CoefficientSet, p: float, x: np.ndarray, y: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """G(x, y) = (x - D(y))^T b(x, y) + (p - 1) / 2 |sigma(x, y)|^2 and the
    weight 1 + |x|^2 + |y|^2.
    """
    neutral = x - coeffs.D(y)
    value = np.sum(neutral * coeffs.b(x, y), axis=-1) + (p - 1) / 2 * _norm(
        coeffs.sigma(x, y)
    ) ** 2
    return value, 1.0 + _norm(x) ** 2 + _norm(y) ** 2


def check_contraction(
    coeffs: CoefficientSet, R: float, samples: int, seed: int, dim: int = 1
) -> Tuple[float, bool]:
    """Largest sampled |D(a) - D(b)| / |a - b| on the ball and whether it stays below
    1 with D(0) = 0.
    """
    first, second = _point_pairs(
        *sample_pairs(sample_states(dim, R, samples, seed), R, seed)
    )
    quotients = _safe_quotient(
        _norm(coeffs.D(first) - coeffs.D(second)), _norm(first - second)
    )
    kappa_hat = _max_or_zero(quotients)
    origin_ok = bool(np.all(np.asarray(coeffs.D(np.zeros(dim))) == 0))
    return kappa_hat, bool(kappa_hat < 1 and origin_ok)


def check_local_lipschitz(
    coeffs: CoefficientSet, R: float, samples: int, seed: int, dim: int = 1
) -> Tuple[float, float]:
    """Sampled local Lipschitz constants: K_R for b and sigma, Kbar_R for the
    Milstein products sigma1_sigma(x, y) and sigma2_sigma(x, y, y, w).
    """
    first, second = sample_pairs(sample_states(dim, R, samples, seed), R, seed)
    distance = _norm(first.x - second.x) + _norm(first.y - second.y)
    K_R = max(
        _max_or_zero(
            _safe_quotient(
                _norm(coeffs.b(first.x, first.y) - coeffs.b(second.x, second.y)),
                distance,
            )
        ),
        _max_or_zero(
            _safe_quotient(
                _norm(
                    coeffs.sigma(first.x, first.y) - coeffs.sigma(second.x, second.y)
                ),
                distance,
            )
        ),
    )
    Kbar_R = max(
        _max_or_zero(
            _safe_quotient(
                _norm(
                    coeffs.sigma1_sigma(first.x, first.y)
                    - coeffs.sigma1_sigma(second.x, second.y)
                ),
                distance,
            )
        ),
        _max_or_zero(
            _safe_quotient(
                _norm(
                    coeffs.sigma2_sigma(first.x, first.y, first.y, first.w)
                    - coeffs.sigma2_sigma(second.x, second.y, second.y, second.w)
                ),
                distance + _norm(first.w - second.w),
            )
        ),
    )
    return K_R, Kbar_R


def _check_khasminskii_arguments(kappa: float, p: float):
    if not 0 < kappa < 1:
        raise ContractionViolated(
            f"The Khasminskii condition presupposes a contraction, got kappa = {kappa}."
        )
    if p <= 2:
        raise BadExponent(f"Khasminskii exponent p must exceed 2, got {p}.")


def _khasminskii_on(
    coeffs: CoefficientSet,
    p: float,
    states: StateSample,
    declared_K1: Optional[float],
) -> Tuple[float, List[Violation]]:
    value, weight = _khasminskii_ratio(coeffs, p, states.x, states.y)
    K1_hat = _max_or_zero(value / weight)
    violations = []
    if declared_K1 is not None:
        for index in np.flatnonzero(value > declared_K1 * weight):
            violations.append(
                Violation(
                    assumption="A5",
                    x=tuple(states.x[index]),
                    y=tuple(states.y[index]),
                    value=float(value[index]),
                    bound=float(declared_K1 * weight[index]),
                )
            )
    return K1_hat, violations


def check_khasminskii(
    coeffs: CoefficientSet,
    kappa: float,
    p: float,
    R: float,
    samples: int,
    seed: int,
    dim: int = 1,
    declared_K1: Optional[float] = None,
) -> Tuple[bool, float, List[Violation]]:
    """Smallest K1 for which the sampled points satisfy the Khasminskii condition.

    `khasminskii_ok` only says the estimate is finite; growth of K1_hat along
    increasing radii is judged with `khasminskii_ladder`. Points breaking the
    inequality with `declared_K1` are returned as witnesses.
    """
    # pylint: disable=too-many-arguments
    _check_khasminskii_arguments(kappa, p)
    K1_hat, violations = _khasminskii_on(
        coeffs, p, sample_states(dim, R, samples, seed), declared_K1
    )
    return bool(np.isfinite(K1_hat)), K1_hat, violations


def khasminskii_ladder(
    coeffs: CoefficientSet,
    kappa: float,
    p: float,
    radii: Sequence[float],
    samples: int,
    seed: int,
    dim: int = 1,
) -> pd.DataFrame:
    """K1_hat on growing balls with nested samples, so the column is nondecreasing."""
    _check_khasminskii_arguments(kappa, p)
    radii = sorted(float(radius) for radius in radii)
    return pd.DataFrame(
        {
            "R": radii,
            "K1_hat": [
                _khasminskii_on(coeffs, p, states, None)[0]
                for states in sample_ladder(dim, radii, samples, seed)
            ],
        }
    )


def ladder_stabilises(ladder: pd.DataFrame, ratio: float = 2.0) -> bool:
    """True when the estimate at the largest radius is less than `ratio` times the
    one before it (or both are zero).
    """
    if len(ladder) < 2:
        return True
    previous, last = ladder["K1_hat"].iloc[-2], ladder["K1_hat"].iloc[-1]
    if last == 0:
        return True
    return bool(last < ratio * previous)


def check_taming_gap(
    coeffs: CoefficientSet,
    R: float,
    deltas: Sequence[float],
    alpha: float,
    samples: int,
    seed: int,
    dim: int = 1,
) -> pd.DataFrame:
    """Largest sampled |b - b_h| per step, relative to dt and to dt**alpha."""
    # pylint: disable=too-many-arguments
    states = sample_states(dim, R, samples, seed)
    drift = coeffs.b(states.x, states.y)
    raw_norm = _norm(drift)
    rows = []
    for delta in deltas:
        delta = float(delta)
        scaled = delta ** alpha * raw_norm
        gap = _max_or_zero(scaled * raw_norm / (1.0 + scaled))
        rows.append(
            {
                "dt": delta,
                "gap": gap,
                "n_r_hat": gap / delta,
                "n_r_alpha_hat": gap / delta ** alpha,
            }
        )
    return pd.DataFrame(rows)


def check_tamed_khasminskii(
    coeffs: CoefficientSet,
    K1: float,
    R: float,
    delta: float,
    alpha: float,
    samples: int,
    seed: int,
    dim: int = 1,
) -> Tuple[bool, List[Violation]]:
    """(x - D(y))^T b_h(x, y) <= K1 (1 + |x|^2 + |y|^2) on the sampled points."""
    # pylint: disable=too-many-arguments
    states = sample_states(dim, R, samples, seed)
    tamed = apply_taming(coeffs.b(states.x, states.y), delta, alpha)
    value = np.sum((states.x - coeffs.D(states.y)) * tamed, axis=-1)
    bound = K1 * (1.0 + _norm(states.x) ** 2 + _norm(states.y) ** 2)
    violations = [
        Violation(
            assumption="tamed-A5",
            x=tuple(states.x[index]),
            y=tuple(states.y[index]),
            value=float(value[index]),
            bound=float(bound[index]),
        )
        for index in np.flatnonzero(value > bound)
    ]
    return not violations, violations


def check_tamed_lipschitz(
    coeffs: CoefficientSet,
    K_R_hat: float,
    R: float,
    delta: float,
    alpha: float,
    samples: int,
    seed: int,
    dim: int = 1,
) -> Tuple[bool, float]:
    """Largest sampled Lipschitz quotient of b_h relative to K_R_hat; passes while
    the ratio stays within 2.
    """
    # pylint: disable=too-many-arguments
    first, second = sample_pairs(sample_states(dim, R, samples, seed), R, seed)
    quotients = _safe_quotient(
        _norm(
            apply_taming(coeffs.b(first.x, first.y), delta, alpha)
            - apply_taming(coeffs.b(second.x, second.y), delta, alpha)
        ),
        _norm(first.x - second.x) + _norm(first.y - second.y),
    )
    largest = _max_or_zero(quotients)
    if K_R_hat == 0:
        return largest == 0, 0.0 if largest == 0 else np.inf
    ratio = largest / K_R_hat
    return bool(ratio <= 2.0), ratio


def _segment_quotients(
    problem: NsddeProblem, samples: int, seed: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample times in [-tau, 0] (both ends included), the segment values there and
    the difference quotients of consecutive times.
    """
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, 7]))
    )
    tau = float(problem.delay)
    times = np.concatenate([[-tau, 0.0], -tau * rng.random(samples)])
    values = np.stack(
        [evaluate_segment(problem, Fraction(time)) for time in times]
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        quotients = _norm(values[1:] - values[:-1]) / np.abs(times[1:] - times[:-1])
    return times, values, np.where(times[1:] != times[:-1], quotients, 0.0)


def check_segment_holder(problem: NsddeProblem, samples: int, seed: int) -> float:
    """Sampled |xi(t) - xi(s)| / |t - s| over s, t in [-tau, 0]."""
    return _max_or_zero(_segment_quotients(problem, samples, seed)[2])


def _holder_violations(
    problem: NsddeProblem, samples: int, seed: int
) -> List[Violation]:
    times, values, quotients = _segment_quotients(problem, samples, seed)
    theta = problem.segment.holder_constant
    # slack for rounding of xi at nearby times
    rounding = 4 * np.finfo(float).eps * (_norm(values[1:]) + _norm(values[:-1]))
    excess = _norm(values[1:] - values[:-1]) - (
        theta * np.abs(times[1:] - times[:-1]) * (1 + 1e-9) + rounding
    )
    return [
        Violation(
            assumption="A1",
            x=tuple(values[index + 1]),
            y=tuple(values[index]),
            value=float(quotients[index]),
            bound=float(theta),
            times=(float(times[index + 1]), float(times[index])),
        )
        for index in np.flatnonzero((excess > 0) & (quotients > theta))
    ]


def _contraction_violations(
    coeffs: CoefficientSet, kappa: float, R: float, samples: int, seed: int, dim: int
) -> List[Violation]:
    first, second = _point_pairs(
        *sample_pairs(sample_states(dim, R, samples, seed), R, seed)
    )
    value = _norm(coeffs.D(first) - coeffs.D(second))
    # relative slack absorbs rounding of linear neutral terms such as D(y) = 0.1 y
    bound = kappa * _norm(first - second) * (1 + 1e-9)
    return [
        Violation(
            assumption="A2",
            x=tuple(first[index]),
            y=tuple(second[index]),
            value=float(value[index]),
            bound=float(bound[index]),
        )
        for index in np.flatnonzero(value > bound)
    ]


def default_ladder(radius: float) -> List[float]:
    return sorted({1.0, radius / 2, float(radius)})


def run_assumption_checks(
    problem: NsddeProblem,
    radius: float = 10.0,
    samples: int = 10000,
    seed: int = 42,
    deltas: Optional[Sequence[float]] = None,
    alpha: float = 0.5,
    ladder: Optional[Sequence[float]] = None,
) -> AssumptionReport:
    """Every sampled check on one ball, with violations of the problem's declared
    constants collected as witnesses.
    """
    # pylint: disable=too-many-arguments, too-many-locals
    coeffs, dim = problem.coefficients, problem.dim
    deltas = (
        [float(problem.delay / 2 ** exponent) for exponent in range(3, 9)]
        if deltas is None
        else list(deltas)
    )
    kappa_hat, contraction_ok = check_contraction(coeffs, radius, samples, seed, dim)
    K_R_hat, Kbar_R_hat = check_local_lipschitz(coeffs, radius, samples, seed, dim)
    khasminskii_ok, K1_hat, violations = check_khasminskii(
        coeffs,
        problem.kappa,
        problem.khasminskii_p,
        radius,
        samples,
        seed,
        dim,
        declared_K1=problem.khasminskii_K1,
    )
    ladder_table = khasminskii_ladder(
        coeffs,
        problem.kappa,
        problem.khasminskii_p,
        default_ladder(radius) if ladder is None else ladder,
        samples,
        seed,
        dim,
    )
    if not ladder_stabilises(ladder_table):
        warnings.warn(
            f"K1 estimates of {problem.name} keep growing with the radius: "
            f"{ladder_table['K1_hat'].tolist()} at R = {ladder_table['R'].tolist()}.",
            UserWarning,
        )
    tamed_lipschitz_ok, tamed_ratio = check_tamed_lipschitz(
        coeffs, K_R_hat, radius, deltas[0], alpha, samples, seed, dim
    )
    tamed_khasminskii_ok, tamed_violations = check_tamed_khasminskii(
        coeffs, K1_hat, radius, deltas[0], alpha, samples, seed, dim
    )
    if not tamed_lipschitz_ok:
        warnings.warn(
            f"Tamed drift of {problem.name} has a Lipschitz quotient {tamed_ratio} "
            "times the untamed estimate.",
            UserWarning,
        )
    return AssumptionReport(
        radius=float(radius),
        samples=samples,
        theta_hat=check_segment_holder(problem, samples, seed),
        kappa_hat=kappa_hat,
        contraction_ok=contraction_ok,
        K_R_hat=K_R_hat,
        Kbar_R_hat=Kbar_R_hat,
        khasminskii_ok=khasminskii_ok and ladder_stabilises(ladder_table),
        K1_hat=K1_hat,
        khasminskii_ladder=ladder_table,
        taming_gap=check_taming_gap(coeffs, radius, deltas, alpha, samples, seed, dim),
        tamed_lipschitz_ratio=tamed_ratio,
        tamed_khasminskii_ok=tamed_khasminskii_ok,
        violations=_holder_violations(problem, samples, seed)
        + _contraction_violations(coeffs, problem.kappa, radius, samples, seed, dim)
        + violations
        + tamed_violations,
    )


def report_frame(report: AssumptionReport) -> pd.DataFrame:
    """Long table with columns assumption, quantity, R and value."""
    rows = [
        ("A1", "theta_hat", report.radius, report.theta_hat),
        ("A2", "kappa_hat", report.radius, report.kappa_hat),
        ("A2", "contraction_ok", report.radius, float(report.contraction_ok)),
        ("A3", "K_R_hat", report.radius, report.K_R_hat),
        ("A4", "Kbar_R_hat", report.radius, report.Kbar_R_hat),
        ("A5", "K1_hat", report.radius, report.K1_hat),
        ("A5", "khasminskii_ok", report.radius, float(report.khasminskii_ok)),
    ]
    rows.extend(
        ("A5", "K1_hat_ladder", float(row.R), float(row.K1_hat))
        for row in report.khasminskii_ladder.itertuples()
    )
    rows.extend(
        [
            (
                "B1",
                "n_r_hat_max",
                report.radius,
                float(report.taming_gap["n_r_hat"].max()),
            ),
            (
                "B1",
                "n_r_alpha_hat_max",
                report.radius,
                float(report.taming_gap["n_r_alpha_hat"].max()),
            ),
            ("tamed", "lipschitz_ratio", report.radius, report.tamed_lipschitz_ratio),
            (
                "tamed",
                "khasminskii_ok",
                report.radius,
                float(report.tamed_khasminskii_ok),
            ),
            ("all", "violations", report.radius, float(len(report.violations))),
        ]
    )
    return pd.DataFrame(rows, columns=["assumption", "quantity", "R", "value"])


def violations_frame(report: AssumptionReport, dim: int = 1) -> pd.DataFrame:
    """Witness table with one x_i / y_i column per state component."""
    rows = []
    for violation in report.violations:
        row = {"assumption": violation.assumption}
        row.update({f"x_{i}": value for i, value in enumerate(violation.x)})
        row.update({f"y_{i}": value for i, value in enumerate(violation.y)})
        row.update({"value": violation.value, "bound": violation.bound})
        rows.append(row)
    return pd.DataFrame(rows, columns=violations_schema(dim))
