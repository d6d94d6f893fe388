"""
Small Exponent Construction
Description: Builds curves whose exponent sits below q^(3/4 + eps), together
with the two prime-sum checks the construction leans on.

================================================================================
CONSTRUCTION
================================================================================
With y = x^(1/4 - eps) and z = x^(1/4 - eps/2):

  1. P = primes q in [x / log x, x] such that q - 1 has a prime divisor p in (y, z].
  2. For q in P, every k in the Hasse window of q with p^2 | k gives the
     structure (p, k/p): p | k/p and p | q - 1, so it is attainable whenever k is
     an ordinary order.
  3. The exponent k/p is at most q/y, which is q^(3/4 + eps) for large x.
     Findings above the threshold at finite x are dropped.
  4. Optionally the curve is found by scan, avoiding j = 0 and j = 1728, and its
     structure certified.

Each finding also carries half its exponent, the bound asserted for the genus 2
curve whose Jacobian is isogenous to E x E. It is reported, not checked.

================================================================================
PRIME SUMS
================================================================================
  mertens   sum_{y < p <= z} 1/p  against  log((1 - 2 eps) / (1 - 4 eps))
  bv        sum_{y < p <= z} |pi(x; p, 1) - pi(x) / (p - 1)|, and the same sum
            divided by x / (log x)^2
================================================================================
"""

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from ..curves.attainability import OrderKind, hasse_window, waterhouse_attainable
from ..curves.curve_scan import NotAttainable, find_curve_with_structure
from ..curves.elliptic_core import (
    P_EXHAUSTIVE,
    WeierstrassCurve,
    group_structure,
    is_supersingular,
    j_invariant,
)
from ..errors import ArgumentError, InternalConsistencyError
from ..number_theory.prime_engine import PrimeSieve, mertens_sum, prime_count, sieve_range
from .experiment_base import ExperimentBase

logger = logging.getLogger(__name__)

DUKE_HEADER = ['x', 'epsilon', 'q', 'p', 'k', 'exponent', 'threshold', 'a', 'b', 'genus2_bound']
MERTENS_HEADER = ['x', 'epsilon', 'y', 'z', 'prime_sum', 'target', 'gap']
BV_HEADER = ['x', 'y', 'z', 'error_sum', 'normalized']
EPSILON_LIMIT = 0.05


def construction_window(x: float, epsilon: float) -> Tuple[float, float]:
    """(y, z) = (x^(1/4 - eps), x^(1/4 - eps/2))."""
    return x ** (0.25 - epsilon), x ** (0.25 - epsilon / 2)


def _check_epsilon(epsilon: float, allow_zero: bool = False) -> None:
    low_ok = epsilon >= 0 if allow_zero else epsilon > 0
    if not (low_ok and epsilon <= EPSILON_LIMIT):
        raise ArgumentError(f"epsilon must lie in {'[0' if allow_zero else '(0'}, 1/20], got {epsilon}")


@dataclass(frozen=True)
class DukeFinding:
    x: int
    epsilon: float
    q: int
    p_divisor: int
    k_order: int
    target_exponent: int
    threshold: float
    realized_curve: Optional[WeierstrassCurve] = None

    @property
    def genus2_reported_bound(self) -> float:
        return self.target_exponent / 2

    def as_row(self) -> dict:
        E = self.realized_curve
        return {
            'x': self.x, 'epsilon': self.epsilon, 'q': self.q, 'p': self.p_divisor,
            'k': self.k_order, 'exponent': self.target_exponent, 'threshold': self.threshold,
            'a': E.a if E else None, 'b': E.b if E else None,
            'genus2_bound': self.genus2_reported_bound,
        }


def _realize(q: int, p: int, k: int, p_exhaustive: int) -> WeierstrassCurve:
    found = find_curve_with_structure(q, p, k // p, exclude_special_j=True, p_exhaustive=p_exhaustive)
    if isinstance(found, NotAttainable):
        raise InternalConsistencyError(f"({p}, {k // p}) over F_{q} could not be realised: {found.reason}")
    gs = group_structure(found, order=k, p_exhaustive=p_exhaustive)
    if gs.m2 != k // p or is_supersingular(found, order=k) or j_invariant(found) in (0, 1728 % q):
        raise InternalConsistencyError(f"realised curve {found} does not have the constructed properties")
    return found


def duke_construct(x: int, epsilon: float, realize: int = 0,
                   p_exhaustive: int = P_EXHAUSTIVE,
                   sieve: Optional[PrimeSieve] = None) -> List[DukeFinding]:
    """
    Every (q, p, k) produced by the construction, sorted by (q, p, k).

    Args:
        x: Range end
        epsilon: 0 < eps <= 1/20
        realize: How many of the first findings (with q <= p_exhaustive) to
                 realise as explicit curves
        p_exhaustive: Largest q realised
        sieve: A sieve covering x, built when omitted
    """
    _check_epsilon(epsilon)
    y, z = construction_window(x, epsilon)
    if sieve is None:
        sieve = sieve_range(max(x, 2))
    divisors = sieve.primes_in(y, z).tolist()
    if not divisors:
        logger.info("no prime in (%.6g, %.6g]; nothing to construct", y, z)
        return []

    start = x / math.log(x)
    findings: List[DukeFinding] = []
    for q in sieve.primes_in(math.ceil(start) - 1, x).tolist():
        threshold = q ** (0.75 + epsilon)
        window = hasse_window(q)
        for p in divisors:
            if (q - 1) % p:
                continue
            step = p * p
            for k in range(-(-window.lo_int // step) * step, window.hi_int + 1, step):
                if waterhouse_attainable(q, k).kind is not OrderKind.ORDINARY:
                    continue
                if k // p <= threshold:
                    findings.append(DukeFinding(x=x, epsilon=epsilon, q=q, p_divisor=p, k_order=k,
                                                target_exponent=k // p, threshold=threshold))

    realized = 0
    for i, f in enumerate(findings):
        if realized >= realize:
            break
        if f.q <= p_exhaustive:
            E = _realize(f.q, f.p_divisor, f.k_order, p_exhaustive)
            findings[i] = replace(f, realized_curve=E)
            realized += 1
            logger.info("realised q=%d k=%d at (a, b)=(%d, %d)", f.q, f.k_order, E.a, E.b)
    return findings


# ============================================================================
# DENSITY OF THE PRIME SET
# ============================================================================

@dataclass(frozen=True)
class DensityReport:
    x: int
    epsilon: float
    count: int
    pi_x: int

    @property
    def ratio(self) -> float:
        return self.count / self.pi_x if self.pi_x else 0.0


def prime_set_density(x: int, epsilon: float, sieve: Optional[PrimeSieve] = None) -> DensityReport:
    """#P / pi(x) for the prime set of the construction."""
    _check_epsilon(epsilon)
    y, z = construction_window(x, epsilon)
    if sieve is None:
        sieve = sieve_range(max(x, 2))
    primes = sieve.primes_in(math.ceil(x / math.log(x)) - 1, x)
    hit = np.zeros(primes.size, dtype=bool)
    for p in sieve.primes_in(y, z).tolist():
        hit |= (primes - 1) % p == 0
    return DensityReport(x=x, epsilon=epsilon, count=int(np.count_nonzero(hit)), pi_x=prime_count(sieve, x))


def admissible_k_report(q: int, p: int, z: float) -> Tuple[int, float]:
    """
    Number of k in [q + 1 - 2 sqrt(q), q] with p^2 | k, and the lower estimate
    2 sqrt(q) / z^2 - 1 for it.
    """
    lo = q + 1 - math.isqrt(4 * q)
    step = p * p
    count = q // step - (lo - 1) // step
    return count, 2 * math.sqrt(q) / (z * z) - 1


# ============================================================================
# PRIME SUMS
# ============================================================================

@dataclass(frozen=True)
class MertensReport:
    x: float
    epsilon: float
    y: float
    z: float
    prime_sum: float
    target: float

    @property
    def gap(self) -> float:
        return self.prime_sum - self.target

    def as_row(self) -> dict:
        return {name: getattr(self, name) for name in MERTENS_HEADER}


def mertens_check(x: float, epsilon: float) -> MertensReport:
    """Sum of 1/p over (y, z] against log((1 - 2 eps) / (1 - 4 eps))."""
    _check_epsilon(epsilon, allow_zero=True)
    y, z = construction_window(x, epsilon)
    sieve = sieve_range(max(math.floor(z), 2))
    return MertensReport(x=x, epsilon=epsilon, y=y, z=z,
                         prime_sum=mertens_sum(sieve, y, z),
                         target=math.log((1 - 2 * epsilon) / (1 - 4 * epsilon)))


@dataclass(frozen=True)
class BVReport:
    x: int
    y: float
    z: float
    error_sum: float
    normalized: float

    def as_row(self) -> dict:
        return {name: getattr(self, name) for name in BV_HEADER}


def bv_check(x: int, y: float, z: float, sieve: Optional[PrimeSieve] = None) -> BVReport:
    """
    Sum over primes p in (y, z] of |pi(x; p, 1) - pi(x) / (p - 1)|, summed exactly.

    Raises:
        CapacityError: the sieve does not cover x
    """
    if x < 2:
        raise ArgumentError(f"x must be at least 2, got {x}")
    if sieve is None:
        sieve = sieve_range(x)
    sieve.require(x)
    primes = sieve.primes_up_to(x)
    pi_x = int(primes.size)
    total = Fraction(0)
    for p in sieve.primes_in(y, min(z, x)).tolist():
        in_class = int(np.count_nonzero(primes % p == 1))
        total += abs(Fraction(in_class) - Fraction(pi_x, p - 1))
    error_sum = float(total)
    return BVReport(x=x, y=y, z=z, error_sum=error_sum,
                    normalized=error_sum / (x / math.log(x) ** 2))


# ============================================================================
# EXPERIMENTS
# ============================================================================

class DukeExperiment(ExperimentBase):
    """The small-exponent construction with its density and k-count reports."""

    def __init__(self, p_exhaustive: int = P_EXHAUSTIVE):
        self.name = "Small exponent construction"
        self.p_exhaustive = p_exhaustive

    def run(self, x: int = 10**4, epsilon: float = 0.05, realize: int = 1) -> Tuple[List[DukeFinding], List[dict]]:
        steps: List[dict] = []
        y, z = construction_window(x, epsilon)
        sieve = sieve_range(max(x, 2))
        self.add_step(steps, 'Initialize', f'y = {y:.6g}, z = {z:.6g}',
                      f'interval primes {sieve.primes_in(y, z).tolist()}')
        density = prime_set_density(x, epsilon, sieve)
        self.add_step(steps, 'Prime set', f'#P = {density.count} of pi(x) = {density.pi_x}',
                      f'observed density {density.ratio:.6g}')
        findings = duke_construct(x, epsilon, realize=realize, p_exhaustive=self.p_exhaustive, sieve=sieve)
        for f in findings:
            count, floor = admissible_k_report(f.q, f.p_divisor, z)
            curve = f'curve (a, b)=({f.realized_curve.a}, {f.realized_curve.b})' if f.realized_curve else 'not realised'
            self.add_step(steps, f'q = {f.q}, k = {f.k_order}',
                          f'structure ({f.p_divisor}, {f.target_exponent}) <= {f.threshold:.6g}',
                          f'{curve}; {count} admissible k (estimate {floor:.6g}); '
                          f'asserted genus 2 bound {f.genus2_reported_bound:g}')
        self.add_step(steps, 'Complete', f'{len(findings)} findings')
        return findings, steps

    def get_experiment_name(self) -> str:
        return self.name


class PrimeSumExperiment(ExperimentBase):
    """Mertens sums over an x-grid."""

    def __init__(self):
        self.name = "Mertens sum check"

    def run(self, x_grid=(10**6,), epsilon: float = 0.05) -> Tuple[List[MertensReport], List[dict]]:
        steps: List[dict] = []
        reports = [mertens_check(x, epsilon) for x in sorted(x_grid)]
        for r in reports:
            self.add_step(steps, f'x = {r.x:g}', f'sum {r.prime_sum:.6g} vs target {r.target:.6g}',
                          f'gap {r.gap:.6g} over ({r.y:.6g}, {r.z:.6g}]')
        return reports, steps

    def get_experiment_name(self) -> str:
        return self.name
