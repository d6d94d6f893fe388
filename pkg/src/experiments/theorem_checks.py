"""
Threshold Verifiers and Census
Description: Finite-x checks of the lower bounds on exponents: how many primes
fall below a threshold, why they do, and how many primes admit a given m1.

================================================================================
THRESHOLD CHECKS
================================================================================
For every prime q <= x the surveyed minimum exponent is compared with a
threshold T(q):

    constant    q^(3/4 + eps)   (threshold), q^(1/2 + eps) (half-threshold)
    duke-log    q^(3/4) / log q
    trivial     sqrt(q) - 1           (never beaten)

Comparisons against T(q) are exact (sympy). Each exceptional q is classified:

  - the witness m1 divides q - 1, and m1 >= (sqrt(q) - 1)^2 / T(q), since
    N = m1 m2 >= (sqrt(q) - 1)^2 while m2 < T(q)
  - divisor class   q - 1 has a divisor in I = (x^(1/4-3eta), x^(1/4+3eta)]
  - K-set class     k = (m1,) satisfies all three K-set conditions
  - remaining       neither

A failure of the first two statements is a violation and makes the run fail.
The half-threshold check instead looks for a divisor of q - 1 in
[x^(1/2-2eta), x^(1/2+2eta)] with eta = 2 eps, and flags q in (2x^(1-eta), x].

================================================================================
CENSUS
================================================================================
#Q_k1 counts primes q in (x/2, x] with some curve having m1 = k1. Ordinary
structures come from the oracle; supersingular ones (only possible for
k1 | gcd(q - 1, q + 1) = 2) from an exhaustive scan.
================================================================================
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from ..curves.attainability import (
    KSetFlags,
    eta_in_range,
    interval_I,
    k_set_membership,
    ordinary_structures,
    qk_bound,
)
from ..curves.elliptic_core import P_EXHAUSTIVE
from ..errors import ArgumentError, MissingRecordsError
from ..number_theory.prime_engine import has_divisor_in, sieve_range
from .experiment_base import ExperimentBase
from .survey import PrimeSurveyRecord, supersingular_structures

logger = logging.getLogger(__name__)

THRESHOLD_SUMMARY_HEADER = ['x', 'rule', 'primes', 'exceptions', 'fraction', 'violations']
EXCEPTION_HEADER = ['q', 'min_exponent', 'threshold', 'm1', 'm2', 'm1_divides', 'm1_bound',
                    'divisor_in_I', 'in_K', 'proof_class', 'half_window', 'half_range']
CENSUS_HEADER = ['x', 'k1', 'observed', 'bound', 'exceeds']
DEFAULT_ETA = 0.005


class ThresholdRule(Enum):
    CONSTANT = 'constant'
    DUKE_LOG = 'duke-log'
    TRIVIAL = 'trivial'


def threshold_expr(q: int, rule: ThresholdRule, epsilon: float = 0.0, base: Fraction = Fraction(3, 4)):
    """T(q) as an exact sympy expression."""
    rule = ThresholdRule(rule)
    Q = sympy.Integer(q)
    if rule is ThresholdRule.CONSTANT:
        return Q ** (sympy.Rational(base.numerator, base.denominator) + sympy.Rational(str(epsilon)))
    if rule is ThresholdRule.DUKE_LOG:
        return Q ** sympy.Rational(3, 4) / sympy.log(Q)
    return sympy.sqrt(Q) - 1


# ============================================================================
# EXCEPTIONS
# ============================================================================

@dataclass(frozen=True)
class ExceptionRecord:
    q: int
    min_exponent: int
    threshold: float
    m1: int
    m2: int
    m1_divides: bool
    m1_bound: bool
    divisor_in_I: bool
    k_set: Optional[KSetFlags]
    half_window: Optional[bool] = None
    half_range: Optional[bool] = None

    @property
    def proof_class(self) -> str:
        if self.divisor_in_I:
            return 'T1'
        if self.k_set is not None and self.k_set.in_K:
            return 'T2'
        return 'T3'

    @property
    def in_K(self) -> Optional[bool]:
        return None if self.k_set is None else self.k_set.in_K

    def as_row(self) -> dict:
        return {name: getattr(self, name) for name in EXCEPTION_HEADER}


def classify_exception(record: PrimeSurveyRecord, x: float, eta: float, threshold) -> ExceptionRecord:
    """
    Check and classify a prime whose minimum exponent is below the threshold.

    Args:
        record: Exhaustive survey record of q
        x: Upper end of the verified range
        eta: Width parameter of I and of the K-set conditions
        threshold: T(q) as a sympy expression
    """
    q = record.q
    s = record.witness_structure
    Q = sympy.Integer(q)
    m1_bound = bool(sympy.Integer(s.m1) * threshold >= (sympy.sqrt(Q) - 1) ** 2)
    lo, hi = interval_I(x, eta)
    k_set = k_set_membership(x, eta, 1, (s.m1,)) if eta_in_range(eta) else None
    return ExceptionRecord(
        q=q, min_exponent=record.min_exponent, threshold=float(threshold),
        m1=s.m1, m2=s.m2,
        m1_divides=(q - 1) % s.m1 == 0,
        m1_bound=m1_bound,
        divisor_in_I=has_divisor_in(q - 1, lo, hi),
        k_set=k_set,
    )


@dataclass
class ThresholdReport:
    x: int
    rule: str
    primes: int
    exceptions: List[ExceptionRecord] = field(default_factory=list)

    @property
    def fraction(self) -> float:
        return len(self.exceptions) / self.primes if self.primes else 0.0

    def violations(self) -> List[str]:
        out = []
        for e in self.exceptions:
            if not e.m1_divides:
                out.append(f"q={e.q}: witness m1={e.m1} does not divide q - 1")
            if not e.m1_bound:
                out.append(f"q={e.q}: witness m1={e.m1} below (sqrt(q) - 1)^2 / T(q)")
        return out

    def summary_row(self) -> dict:
        return {'x': self.x, 'rule': self.rule, 'primes': self.primes,
                'exceptions': len(self.exceptions), 'fraction': self.fraction,
                'violations': len(self.violations())}

    def rows(self) -> List[dict]:
        return [self.summary_row()]

    def exception_rows(self) -> List[dict]:
        return [e.as_row() for e in self.exceptions]


def _records_up_to(records: Sequence[PrimeSurveyRecord], x: int) -> List[PrimeSurveyRecord]:
    by_q: Dict[int, PrimeSurveyRecord] = {r.q: r for r in records if r.exhaustive}
    primes = sieve_range(max(x, 2)).primes_in(4, x).tolist()
    missing = [q for q in primes if q not in by_q]
    if missing:
        raise MissingRecordsError(
            f"exhaustive survey records missing for {len(missing)} primes <= {x}, "
            f"first {missing[:5]}")
    return [by_q[q] for q in primes]


def _check(records: Sequence[PrimeSurveyRecord], x: int, rule: ThresholdRule,
           epsilon: float, eta: float, base: Fraction) -> ThresholdReport:
    rule = ThresholdRule(rule)
    surveyed = _records_up_to(records, x)
    label = rule.value if rule is not ThresholdRule.CONSTANT else f"constant({epsilon:g})"
    report = ThresholdReport(x=x, rule=label, primes=len(surveyed))
    for r in surveyed:
        T = threshold_expr(r.q, rule, epsilon, base)
        if bool(sympy.Integer(r.min_exponent) < T):
            report.exceptions.append(classify_exception(r, x, eta, T))
    logger.info("threshold %s at x=%d: %d/%d exceptional", label, x, len(report.exceptions), report.primes)
    return report


def verify_threshold(records: Sequence[PrimeSurveyRecord], x: int,
                     rule: ThresholdRule = ThresholdRule.CONSTANT, epsilon: float = 0.0,
                     eta: float = DEFAULT_ETA) -> ThresholdReport:
    """
    Primes q <= x whose minimum exponent is below the three-quarter threshold.

    Raises:
        MissingRecordsError: some prime 5 <= q <= x has no exhaustive record
    """
    return _check(records, x, rule, epsilon, eta, Fraction(3, 4))


def verify_half_threshold(records: Sequence[PrimeSurveyRecord], x: int, epsilon: float) -> ThresholdReport:
    """Primes q <= x whose minimum exponent is below q^(1/2 + eps)."""
    if epsilon < 0:
        raise ArgumentError(f"epsilon must be non-negative, got {epsilon}")
    eta = 2 * epsilon
    report = _check(records, x, ThresholdRule.CONSTANT, epsilon, eta, Fraction(1, 2))
    report.rule = f"half({epsilon:g})"
    lo, hi = x ** (0.5 - 2 * eta), x ** (0.5 + 2 * eta)
    start = 2 * x ** (1 - eta)
    report.exceptions = [
        replace(e, half_window=has_divisor_in(e.q - 1, math.ceil(lo) - 1, hi),
                half_range=start < e.q <= x)
        for e in report.exceptions
    ]
    return report


verify_thm1 = verify_threshold
verify_thm3 = verify_half_threshold


class ThresholdExperiment(ExperimentBase):
    """Threshold verification over an x-grid, sharing one set of survey records."""

    def __init__(self, records: Sequence[PrimeSurveyRecord], half: bool = False):
        self.records = records
        self.half = half
        self.name = "Half-exponent threshold check" if half else "Three-quarter threshold check"

    def run(self, x_grid: Sequence[int] = (), rule: ThresholdRule = ThresholdRule.CONSTANT,
            epsilon: float = 0.0, eta: float = DEFAULT_ETA) -> Tuple[List[ThresholdReport], List[dict]]:
        steps: List[dict] = []
        self.add_step(steps, 'Initialize', f'{self.name} over x in {list(x_grid)}',
                      f'{len(self.records)} survey records available')
        reports = []
        for x in sorted(x_grid):
            if self.half:
                report = verify_half_threshold(self.records, x, epsilon)
            else:
                report = verify_threshold(self.records, x, rule, epsilon, eta)
            reports.append(report)
            classes = {}
            for e in report.exceptions:
                classes[e.proof_class] = classes.get(e.proof_class, 0) + 1
            self.add_step(steps, f'x = {x}',
                          f'{len(report.exceptions)} of {report.primes} primes below the threshold',
                          f'fraction {report.fraction:.6g}, classes {classes}',
                          data=report.exception_rows())
        return reports, steps

    def get_experiment_name(self) -> str:
        return self.name


# ============================================================================
# CENSUS
# ============================================================================

@dataclass(frozen=True)
class CensusReport:
    x: int
    k1: int
    observed: int
    bound: float
    g: int = 1

    @property
    def exceeds(self) -> bool:
        return self.observed > self.bound

    def as_row(self) -> dict:
        return {'x': self.x, 'k1': self.k1, 'observed': self.observed,
                'bound': self.bound, 'exceeds': self.exceeds}

    def violations(self) -> List[str]:
        return [f"x={self.x}, k1={self.k1}: {self.observed} primes exceed the bound {self.bound:.6g}"] \
            if self.exceeds else []


def _admits_m1(q: int, k1: int, p_exhaustive: int) -> bool:
    if any(m1 == k1 for _, m1, _ in ordinary_structures(q)):
        return True
    if (q + 1) % (k1 * k1) or (q - 1) % k1 or q > p_exhaustive:
        return False
    return any(m1 == k1 for m1, _ in supersingular_structures(q, p_exhaustive))


def qk_census(x: int, k1: int, bound_scale: float = 1.0,
              p_exhaustive: int = P_EXHAUSTIVE) -> CensusReport:
    """
    #Q_k1 for genus 1 against the U_k V_k bound.

    Args:
        x: Upper end; primes in (x/2, x] are counted
        k1: Required m1
        bound_scale: Multiplies the bound (1.0 except in fault-injection runs)
    """
    if k1 < 1:
        raise ArgumentError(f"k1 must be positive, got {k1}")
    if x < 5:
        raise ArgumentError(f"census needs x >= 5, got {x}")
    primes = sieve_range(x).primes_in(max(x // 2, 4), x).tolist()
    observed = sum(1 for q in primes if _admits_m1(q, k1, p_exhaustive))
    bound = qk_bound(x, 1, (k1,)).bound * bound_scale
    return CensusReport(x=x, k1=k1, observed=observed, bound=bound)


class CensusExperiment(ExperimentBase):
    """Q_k census for every k1 up to a limit."""

    def __init__(self, p_exhaustive: int = P_EXHAUSTIVE, bound_scale: float = 1.0):
        self.name = "Q_k census"
        self.p_exhaustive = p_exhaustive
        self.bound_scale = bound_scale

    def run(self, x: int = 100, k1_values: Sequence[int] = ()) -> Tuple[List[CensusReport], List[dict]]:
        steps: List[dict] = []
        if not k1_values:
            k1_values = range(1, math.isqrt(x) + 2)
        self.add_step(steps, 'Initialize', f'Counting primes in ({x // 2}, {x}] by m1',
                      f'k1 in {list(k1_values)}')
        reports = []
        for k1 in k1_values:
            report = qk_census(x, k1, self.bound_scale, self.p_exhaustive)
            reports.append(report)
            self.add_step(steps, f'k1 = {k1}', f'observed {report.observed}, bound {report.bound:.6g}',
                          'EXCEEDS' if report.exceeds else 'within bound')
        return reports, steps

    def get_experiment_name(self) -> str:
        return self.name
