from fractions import Fraction
from math import gcd
from typing import Callable, List, NamedTuple, Optional, Type, Union

from dataclasses import dataclass

import numpy as np

from .._utils.exceptions import (
    BadExponent,
    BadStep,
    ContractionViolated,
    GridMismatch,
    NeutralOriginViolated,
    NonFiniteInput,
    NsddeError,
    OutOfSegment,
)

Rational = Union[Fraction, int, float, str]

# Coefficient callables work on arrays whose last axis is the state dimension n,
# leading axes are broadcast (one row per Monte Carlo path).
StateMap = Callable[[np.ndarray], np.ndarray]
PairMap = Callable[[np.ndarray, np.ndarray], np.ndarray]
QuadMap = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def as_rational(value: Rational) -> Fraction:
    """Exact rational from user input. Floats are read through their shortest
    decimal representation, so 3.3 becomes 33/10 and not the nearest binary fraction.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    try:
        return Fraction(repr(value) if isinstance(value, float) else str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise GridMismatch(f"{value!r} is not a finite rational number.") from exc


def common_step(first: Fraction, second: Fraction) -> Fraction:
    """Largest rational step dividing both arguments."""
    numerator = gcd(
        first.numerator * second.denominator, second.numerator * first.denominator
    )
    return Fraction(numerator, first.denominator * second.denominator)


@dataclass(frozen=True)
class InitialSegment:
    """Initial data xi on [-tau, 0]. Below -tau the segment is extended by the
    constant xi(-tau), see `evaluate_segment`.
    """

    evaluate: Callable[[float], np.ndarray]
    holder_constant: float


@dataclass(frozen=True)
class CoefficientSet:
    """D(y), b(x, y), sigma(x, y) for a scalar driving Brownian motion, plus the
    derivative products consumed by the Milstein correction:
    sigma1_sigma(x, y) = d_x sigma(x, y) sigma(x, y) and
    sigma2_sigma(x, y, u, v) = d_y sigma(x, y) sigma(u, v).
    """

    D: StateMap
    b: PairMap
    sigma: PairMap
    sigma1_sigma: PairMap
    sigma2_sigma: QuadMap


@dataclass(frozen=True)
class NsddeProblem:
    # pylint: disable=too-many-instance-attributes
    name: str
    dim: int
    coefficients: CoefficientSet
    segment: InitialSegment
    delay: Fraction
    horizon: Fraction
    kappa: float
    khasminskii_K1: float
    khasminskii_p: float

    def __post_init__(self):
        object.__setattr__(self, "delay", as_rational(self.delay))
        object.__setattr__(self, "horizon", as_rational(self.horizon))


@dataclass(frozen=True)
class TamingParams:
    alpha: float = 0.5

    def __post_init__(self):
        if not 0 < self.alpha <= 0.5:
            raise BadExponent(
                f"The taming exponent alpha must lie in (0, 1/2], got {self.alpha}."
            )


class RuleResult(NamedTuple):
    rule: str
    passed: bool
    detail: str
    error: Type[NsddeError]


class ValidationReport(NamedTuple):
    problem: str
    results: List[RuleResult]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[RuleResult]:
        return [result for result in self.results if not result.passed]


def validate_problem(
    problem: NsddeProblem, raise_on_failure: bool = True
) -> ValidationReport:
    """Check the structural rules every problem must satisfy before it is simulated.

    With `raise_on_failure` the error attached to the first failing rule is raised,
    otherwise the full report is returned for inspection.
    """
    results = []

    results.append(
        RuleResult(
            "contraction",
            0 < problem.kappa < 1,
            f"kappa = {problem.kappa}",
            ContractionViolated,
        )
    )

    with np.errstate(all="ignore"):
        d_origin = np.asarray(
            problem.coefficients.D(np.zeros(problem.dim)), dtype=float
        )
    results.append(
        RuleResult(
            "neutral_origin",
            bool(np.all(d_origin == 0)),
            f"D(0) = {d_origin.tolist()}",
            NeutralOriginViolated,
        )
    )

    results.append(
        RuleResult(
            "positive_delay", problem.delay > 0, f"tau = {problem.delay}", BadStep
        )
    )

    results.append(
        RuleResult(
            "horizon_beyond_delay",
            problem.horizon > problem.delay,
            f"T = {problem.horizon}, tau = {problem.delay}",
            GridMismatch,
        )
    )

    results.append(
        RuleResult(
            "khasminskii_exponent",
            problem.khasminskii_p > 2,
            f"p = {problem.khasminskii_p}",
            BadExponent,
        )
    )

    if problem.delay > 0 and problem.horizon > 0:
        step: Optional[Fraction] = common_step(problem.delay, problem.horizon)
        results.append(
            RuleResult(
                "commensurable",
                True,
                f"tau = {problem.delay / step} * {step}, "
                f"T = {problem.horizon / step} * {step}",
                GridMismatch,
            )
        )
    else:
        results.append(
            RuleResult(
                "commensurable",
                False,
                "no positive common step for nonpositive tau or T",
                GridMismatch,
            )
        )

    report = ValidationReport(problem.name, results)
    if raise_on_failure and not report.passed:
        first = report.failures[0]
        raise first.error(
            f"Problem {problem.name} fails rule '{first.rule}': {first.detail}."
        )
    return report


def evaluate_segment(problem: NsddeProblem, t: Union[float, Fraction]) -> np.ndarray:
    """xi(t) for t in [-tau, 0], xi(-tau) for t in [-2 tau, -tau)."""
    if not isinstance(t, Fraction) and not np.isfinite(t):
        raise OutOfSegment(f"Time {t} is not a finite point of the initial segment.")
    exact_t = Fraction(t)
    if exact_t < -2 * problem.delay or exact_t > 0:
        raise OutOfSegment(
            f"Time {t} is outside the extended initial segment "
            f"[{float(-2 * problem.delay)}, 0]."
        )
    if exact_t < -problem.delay:
        t = -problem.delay
    value = np.asarray(problem.segment.evaluate(float(t)), dtype=float).reshape(
        problem.dim
    )
    if not np.all(np.isfinite(value)):
        raise NonFiniteInput(
            f"Initial segment of {problem.name} is not finite at t = {t}."
        )
    return value
