"""
Elliptic Curve Core
Description: Arithmetic, point counting and certified group structure for curves
y^2 = x^3 + ax + b over prime fields F_p, p >= 5.

================================================================================
POINT COUNTING
================================================================================
With chi the quadratic character of F_p,

    #E(F_p) = p + 1 + sum_{x in F_p} chi(x^3 + ax + b)

chi is tabulated once per prime (squares of 0..p-1 are +1, everything else
nonzero is -1) and the sum is a numpy gather over all x. The same table gives
whole rows of counts {N(a, b) : b in F_p} with one broadcast, which is what the
curve scanners use.

================================================================================
GROUP STRUCTURE
================================================================================
E(F_p) = Z/m1 x Z/m2 with m1 | m2, m1 m2 = N and m1 | p - 1. The exponent is m2.

  1. L = lcm of the orders of points taken in a fixed order.
  2. Candidates are the pairs (N/m2, m2) with L | m2 | N that satisfy the two
     divisibility conditions. The true pair is always a candidate.
       - L = N                   -> cyclic, certified
       - exactly one candidate   -> certified
  3. Exhaustive mode (p <= P_EXHAUSTIVE): with m1 = N/L, the pair (m1, L) is
     certified when the full enumeration finds #E[m1] = m1^2. If the points run
     out first, L is the lcm of every order, i.e. the exponent itself.
  4. Sampled mode (larger p): after MAX_SAMPLED_POINTS points without a unique
     candidate the result is UncertifiedStructureError, never a guess.

Points are handled internally as tuples (x, y) with None for the point at
infinity; CurvePoint is the checked public form.
================================================================================
"""

import logging
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple

import numpy as np
from sympy import isprime

from ..errors import (
    ArgumentError,
    CapacityError,
    InternalConsistencyError,
    UncertifiedStructureError,
    UnsupportedFieldError,
)
from ..number_theory.prime_engine import Factorization, factorize

logger = logging.getLogger(__name__)

FIELD_CEILING = 2**61
COUNT_CEILING = 2**22
P_EXHAUSTIVE = 2000
MAX_SAMPLED_POINTS = 64
# Torsion counts are only tried once a few orders have been folded into L.
CERTIFY_AFTER = 8
X_CHUNK = 2**16

_Affine = Optional[Tuple[int, int]]


# ============================================================================
# TYPES
# ============================================================================

@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 = x^3 + ax + b over F_p."""
    p: int
    a: int
    b: int

    def __post_init__(self):
        if self.p < 5:
            raise UnsupportedFieldError(f"only p >= 5 is supported, got p={self.p}")
        if self.p > FIELD_CEILING:
            raise CapacityError(f"p={self.p} exceeds the field ceiling 2^61")
        if not isprime(self.p):
            raise ArgumentError(f"p={self.p} is not prime")
        if not (0 <= self.a < self.p and 0 <= self.b < self.p):
            raise ArgumentError(f"coefficients must lie in [0, {self.p}), got a={self.a}, b={self.b}")
        if self.discriminant() == 0:
            raise ArgumentError(f"y^2 = x^3 + {self.a}x + {self.b} is singular over F_{self.p}")

    def discriminant(self) -> int:
        """4a^3 + 27b^2 mod p (zero iff singular)."""
        return (4 * self.a ** 3 + 27 * self.b ** 2) % self.p

    def rhs(self, x: int) -> int:
        return (x * x * x + self.a * x + self.b) % self.p

    def contains(self, P: 'CurvePoint') -> bool:
        if P.is_infinity:
            return True
        return (P.y * P.y - self.rhs(P.x)) % self.p == 0


@dataclass(frozen=True)
class CurvePoint:
    """An affine point (x, y), or the point at infinity when both are None."""
    x: Optional[int] = None
    y: Optional[int] = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def as_tuple(self) -> _Affine:
        return None if self.x is None else (self.x, self.y)

    @classmethod
    def from_tuple(cls, t: _Affine) -> 'CurvePoint':
        return INFINITY if t is None else cls(t[0], t[1])


INFINITY = CurvePoint()


@dataclass(frozen=True)
class GroupStructure:
    """E(F_q) = Z/m1 x Z/m2 with exponent m2."""
    q: int
    N: int
    m1: int
    m2: int

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ArgumentError(f"invalid structure {self}: {'; '.join(problems)}")

    def violations(self) -> List[str]:
        q, N, m1, m2 = self.q, self.N, self.m1, self.m2
        out = []
        if m1 < 1 or m2 < 1 or m1 * m2 != N:
            out.append("m1 * m2 != N")
        elif m2 % m1:
            out.append("m1 does not divide m2")
        if m1 >= 1 and (q - 1) % m1:
            out.append("m1 does not divide q - 1")
        if (q + 1 - N) ** 2 > 4 * q:
            out.append("N outside the Hasse window")
        if (m2 + 1) ** 2 < q:
            out.append("exponent below sqrt(q) - 1")
        return out

    @property
    def exponent(self) -> int:
        return self.m2

    @property
    def trace(self) -> int:
        return self.q + 1 - self.N


# ============================================================================
# QUADRATIC CHARACTER AND POINT COUNTING
# ============================================================================

def legendre(a: int, p: int) -> int:
    """Quadratic character of a mod the odd prime p: -1, 0 or +1."""
    assert p > 2 and p % 2, "legendre needs an odd prime"
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


@lru_cache(maxsize=8)
def chi_table(p: int) -> np.ndarray:
    """chi[v] for v in [0, p) as int8."""
    xs = np.arange(p, dtype=np.int64)
    chi = np.full(p, -1, dtype=np.int8)
    chi[(xs * xs) % p] = 1
    chi[0] = 0
    return chi


@lru_cache(maxsize=8)
def sqrt_table(p: int) -> np.ndarray:
    """root[v] with root[v]^2 = v for squares v, -1 for non-squares."""
    xs = np.arange(p, dtype=np.int64)
    roots = np.full(p, -1, dtype=np.int64)
    roots[(xs * xs) % p] = xs
    return roots


def _require_countable(p: int) -> None:
    if p >= COUNT_CEILING:
        raise CapacityError(f"point counting is O(p); p={p} is above the ceiling 2^22")


def _cubic_values(p: int, a: int, b: int, lo: int, hi: int) -> np.ndarray:
    xs = np.arange(lo, hi, dtype=np.int64)
    return ((xs * xs % p) * xs % p + a * xs % p + b) % p


def point_count(E: WeierstrassCurve) -> int:
    """N = #E(F_p) from the character sum."""
    _require_countable(E.p)
    chi = chi_table(E.p)
    total = 0
    for lo in range(0, E.p, X_CHUNK):
        f = _cubic_values(E.p, E.a, E.b, lo, min(lo + X_CHUNK, E.p))
        total += int(chi[f].sum(dtype=np.int64))
    return E.p + 1 + total


def row_point_counts(p: int, a: int, b_chunk: int = 256) -> np.ndarray:
    """
    N(a, b) for every b in [0, p) at once (singular b included, their
    entries are meaningless).
    """
    _require_countable(p)
    chi = chi_table(p)
    f0 = _cubic_values(p, a, 0, 0, p)
    counts = np.empty(p, dtype=np.int64)
    for lo in range(0, p, b_chunk):
        bs = np.arange(lo, min(lo + b_chunk, p), dtype=np.int64)
        sums = chi[(f0[None, :] + bs[:, None]) % p].sum(axis=1, dtype=np.int64)
        counts[lo:lo + bs.size] = p + 1 + sums
    return counts


# ============================================================================
# GROUP LAW
# ============================================================================

def _add(p: int, a: int, P: _Affine, Q: _Affine) -> _Affine:
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def _mul(p: int, a: int, n: int, P: _Affine) -> _Affine:
    if P is None or n == 0:
        return None
    if n < 0:
        n, P = -n, (P[0], (-P[1]) % p)
    result = None
    while n:
        if n & 1:
            result = _add(p, a, result, P)
        P = _add(p, a, P, P)
        n >>= 1
    return result


def _check_on_curve(E: WeierstrassCurve, *points: CurvePoint) -> None:
    for P in points:
        if not E.contains(P):
            raise ArgumentError(f"{P} is not on {E}")


def add(E: WeierstrassCurve, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    """P + Q by the chord-tangent law."""
    _check_on_curve(E, P, Q)
    return CurvePoint.from_tuple(_add(E.p, E.a, P.as_tuple(), Q.as_tuple()))


def negate(E: WeierstrassCurve, P: CurvePoint) -> CurvePoint:
    _check_on_curve(E, P)
    return P if P.is_infinity else CurvePoint(P.x, (-P.y) % E.p)


def scalar_mul(E: WeierstrassCurve, n: int, P: CurvePoint) -> CurvePoint:
    """n * P by double-and-add."""
    _check_on_curve(E, P)
    return CurvePoint.from_tuple(_mul(E.p, E.a, n, P.as_tuple()))


def _order(E: WeierstrassCurve, P: _Affine, N: int, fac: Factorization) -> int:
    order = N
    for q, e in fac.factors:
        for _ in range(e):
            if _mul(E.p, E.a, order // q, P) is None:
                order //= q
            else:
                break
    return order


def point_order(E: WeierstrassCurve, P: CurvePoint, N: Optional[int] = None) -> int:
    """
    Exact order of P, found by dividing prime factors out of the group order N.

    Args:
        E: The curve
        P: A point on E
        N: #E(F_p); counted when omitted
    """
    _check_on_curve(E, P)
    if P.is_infinity:
        return 1
    if N is None:
        N = point_count(E)
    return _order(E, P.as_tuple(), N, factorize(N))


# ============================================================================
# ENUMERATION AND TORSION
# ============================================================================

def _affine_points(E: WeierstrassCurve) -> Iterator[Tuple[int, int]]:
    p = E.p
    _require_countable(p)
    chi = chi_table(p)
    roots = sqrt_table(p)
    for lo in range(0, p, X_CHUNK):
        f = _cubic_values(p, E.a, E.b, lo, min(lo + X_CHUNK, p))
        for offset in np.flatnonzero(chi[f] >= 0).tolist():
            x = lo + offset
            v = int(f[offset])
            if v == 0:
                yield x, 0
            else:
                r = int(roots[v])
                yield x, min(r, p - r)
                yield x, max(r, p - r)


def enumerate_points(E: WeierstrassCurve) -> Iterator[CurvePoint]:
    """All points of E(F_p): infinity first, then by x, then by y."""
    yield INFINITY
    for x, y in _affine_points(E):
        yield CurvePoint(x, y)


def torsion_count(E: WeierstrassCurve, m: int) -> int:
    """#E[m](F_p): points P with mP = O, by full enumeration."""
    if m < 1:
        raise ArgumentError(f"torsion index must be positive, got {m}")
    return 1 + sum(1 for P in _affine_points(E) if _mul(E.p, E.a, m, P) is None)


def _sampled_points(E: WeierstrassCurve, count: int) -> Iterator[Tuple[int, int]]:
    """Pseudo-random points from a generator seeded by the curve itself."""
    from sympy.ntheory.residue_ntheory import sqrt_mod

    rng = random.Random(hash((E.p, E.a, E.b)) & 0xFFFFFFFF)
    produced = 0
    while produced < count:
        x = rng.randrange(E.p)
        v = E.rhs(x)
        if v == 0:
            produced += 1
            yield x, 0
        elif legendre(v, E.p) == 1:
            r = sqrt_mod(v, E.p)
            produced += 1
            yield x, (r if rng.random() < 0.5 else E.p - r)


# ============================================================================
# STRUCTURE
# ============================================================================

def structure_candidates(q: int, N: int, L: int) -> List[Tuple[int, int]]:
    """Pairs (m1, m2) with L | m2, m1 m2 = N, m1 | m2 and m1 | q - 1, by m2."""
    out = []
    for m2 in factorize(N).divisors():
        m1 = N // m2
        if m2 % L == 0 and m2 % m1 == 0 and (q - 1) % m1 == 0:
            out.append((m1, m2))
    return out


def group_structure(E: WeierstrassCurve, order: Optional[int] = None,
                    p_exhaustive: int = P_EXHAUSTIVE,
                    max_samples: int = MAX_SAMPLED_POINTS) -> GroupStructure:
    """
    Certified (m1, m2) of E(F_p).

    Args:
        E: The curve
        order: #E(F_p) if already known
        p_exhaustive: Largest p certified by full enumeration
        max_samples: Point budget in sampled mode

    Returns:
        GroupStructure

    Raises:
        UncertifiedStructureError: sampled mode could not single out (m1, m2)
    """
    p = E.p
    N = point_count(E) if order is None else order
    fac = factorize(N)
    exhaustive = p <= p_exhaustive
    points = _affine_points(E) if exhaustive else _sampled_points(E, max_samples)

    L = 1
    tried = set()
    for seen, P in enumerate(points, start=1):
        L = math.lcm(L, _order(E, P, N, fac))
        if L == N:
            return GroupStructure(p, N, 1, N)
        candidates = structure_candidates(p, N, L)
        if len(candidates) == 1:
            return GroupStructure(p, N, *candidates[0])
        if exhaustive and seen >= CERTIFY_AFTER and L not in tried:
            tried.add(L)
            m1 = N // L
            if (m1, L) in candidates and torsion_count(E, m1) == m1 * m1:
                return GroupStructure(p, N, m1, L)

    if exhaustive:
        # Every point has been seen, so L is the exponent.
        return GroupStructure(p, N, N // L, L)
    raise UncertifiedStructureError(
        f"{max_samples} sampled points left {len(structure_candidates(p, N, L))} "
        f"candidate structures for {E} (N={N})")


def exponent(E: WeierstrassCurve, **kwargs) -> int:
    """The exponent of E(F_p), the largest order of its points."""
    return group_structure(E, **kwargs).m2


def is_supersingular(E: WeierstrassCurve, order: Optional[int] = None) -> bool:
    """True iff the trace p + 1 - N vanishes."""
    if E.p < 5:
        raise UnsupportedFieldError(f"only p >= 5 is supported, got p={E.p}")
    N = point_count(E) if order is None else order
    return E.p + 1 - N == 0


def j_invariant(E: WeierstrassCurve) -> int:
    """1728 * 4a^3 / (4a^3 + 27b^2) mod p."""
    p = E.p
    four_a3 = 4 * E.a ** 3 % p
    return 1728 * four_a3 * pow(E.discriminant(), -1, p) % p


# ============================================================================
# TWISTS
# ============================================================================

@lru_cache(maxsize=64)
def smallest_nonresidue(p: int) -> int:
    d = 2
    while legendre(d, p) != -1:
        d += 1
    return d


def twist(E: WeierstrassCurve, d: Optional[int] = None) -> WeierstrassCurve:
    """
    The quadratic twist (a d^2, b d^3) by a non-residue d; its order is
    2p + 2 - N.
    """
    p = E.p
    if d is None:
        d = smallest_nonresidue(p)
    elif legendre(d, p) != -1:
        raise ArgumentError(f"twisting needs a non-residue mod {p}, got {d}")
    return WeierstrassCurve(p, E.a * d * d % p, E.b * d ** 3 % p)


def quadratic_twist_counts(E: WeierstrassCurve, d: Optional[int] = None) -> Tuple[int, int]:
    """
    (N(E), N(E')) for the twist E' of E by the non-residue d.

    Raises:
        InternalConsistencyError: the counts do not sum to 2p + 2
    """
    N = point_count(E)
    N_twist = point_count(twist(E, d))
    if N + N_twist != 2 * E.p + 2:
        raise InternalConsistencyError(
            f"{E}: N={N} and twisted N'={N_twist} do not sum to 2p + 2 = {2 * E.p + 2}")
    return N, N_twist
