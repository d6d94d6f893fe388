"""
Attainability Oracle
Description: Which group orders and structures elliptic curves over F_p can
have, and evaluators for the closed-form bounds on Jacobian exponents.

================================================================================
ORDERS AND STRUCTURES
================================================================================
For p >= 5 and N in the Hasse window, with trace a = p + 1 - N:

    ordinary        a != 0, gcd(a, p) = 1, a^2 <= 4p
    supersingular   a = 0
    not-attainable  anything else

Every ordinary N is realised by some curve, and so is every structure
Z/m1 x Z/m2 with m1 m2 = N, m1 | m2 and m1 | p - 1. Supersingular structures
are deliberately left out and are only ever observed by enumeration.

================================================================================
BOUNDS
================================================================================
  window          (sqrt(q) - 1)^(2g) <= #J <= (sqrt(q) + 1)^(2g)
  trivial         exponent >= sqrt(q) - 1
  floor           ((sqrt(q)-1)^(2g) / (k1^s k2^(s-1) ... ks))^(1/(2g-s))
  Q_k census      U_k V_k with
                    U_k = (sqrt(x)+1)^(2g) / (k1^(2g) k2^(2g-1) ... k_(2g-1)^2)
                    V_k = 5 (sqrt(x)+1) / (k1 ... kg) + 1

Bound evaluators return floats. Membership in the window is always decided by
exact integer arithmetic.
================================================================================
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Sequence, Tuple

import sympy

from ..errors import ArgumentError, DomainError, UnsupportedFieldError
from ..number_theory.prime_engine import factorize


# ============================================================================
# HASSE WINDOW
# ============================================================================

@dataclass(frozen=True)
class HasseWindow:
    """The Weil interval of #J(F_q) for genus g, with its integer points."""
    q: int
    g: int
    lower: float
    upper: float
    lo_int: int
    hi_int: int

    @property
    def integer_range(self) -> range:
        return range(self.lo_int, self.hi_int + 1)

    def __contains__(self, N: int) -> bool:
        if self.g == 1:
            return (self.q + 1 - N) ** 2 <= 4 * self.q
        return self.lo_int <= N <= self.hi_int


def hasse_window(q: int, g: int = 1) -> HasseWindow:
    """
    The window [(sqrt(q)-1)^(2g), (sqrt(q)+1)^(2g)].

    For g = 1 the integer ends are q + 1 -/+ isqrt(4q), which is the exact form
    of (q + 1 - N)^2 <= 4q. For larger g they are taken from sympy's exact
    floor and ceiling of the algebraic end points.
    """
    if q < 2:
        raise ArgumentError(f"q must be at least 2, got {q}")
    if g < 1:
        raise ArgumentError(f"genus must be positive, got {g}")
    root = math.sqrt(q)
    lower, upper = (root - 1) ** (2 * g), (root + 1) ** (2 * g)
    if g == 1:
        half_width = math.isqrt(4 * q)
        lo_int, hi_int = q + 1 - half_width, q + 1 + half_width
    else:
        s = sympy.sqrt(q)
        lo_int = int(sympy.ceiling((s - 1) ** (2 * g)))
        hi_int = int(sympy.floor((s + 1) ** (2 * g)))
    return HasseWindow(q=q, g=g, lower=lower, upper=upper, lo_int=lo_int, hi_int=hi_int)


# ============================================================================
# ORDER AND STRUCTURE CRITERIA
# ============================================================================

class OrderKind(Enum):
    ORDINARY = 'ordinary'
    SUPERSINGULAR = 'supersingular'
    NOT_ATTAINABLE = 'not-attainable'


@dataclass(frozen=True)
class AttainableOrder:
    N: int
    trace: int
    kind: OrderKind


def _require_field(p: int) -> None:
    if p < 5:
        raise UnsupportedFieldError(f"only p >= 5 is supported, got p={p}")


def waterhouse_attainable(p: int, N: int) -> AttainableOrder:
    """Classify N as a possible order of E(F_p)."""
    _require_field(p)
    a = p + 1 - N
    if a * a > 4 * p:
        kind = OrderKind.NOT_ATTAINABLE
    elif a == 0:
        kind = OrderKind.SUPERSINGULAR
    elif math.gcd(a, p) == 1:
        kind = OrderKind.ORDINARY
    else:
        kind = OrderKind.NOT_ATTAINABLE
    return AttainableOrder(N=N, trace=a, kind=kind)


def divisor_structures(p: int, N: int) -> List[Tuple[int, int]]:
    """All (m1, m2) with m1 m2 = N, m1 | m2, m1 | p - 1, ascending by m2."""
    out = []
    for m2 in factorize(N).divisors():
        m1 = N // m2
        if m2 % m1 == 0 and (p - 1) % m1 == 0:
            out.append((m1, m2))
    return out


def ruck_structures(p: int, N: int) -> List[Tuple[int, int]]:
    """
    Structures realised by ordinary curves of order N over F_p.

    Raises:
        DomainError: N is supersingular or not attainable
    """
    order = waterhouse_attainable(p, N)
    if order.kind is not OrderKind.ORDINARY:
        raise DomainError(f"N={N} over F_{p} is {order.kind.value}; structures are only "
                          f"predicted for ordinary orders")
    return divisor_structures(p, N)


def min_structure_exponent(p: int, N: int) -> int:
    """Smallest m2 any curve of order N over F_p could have."""
    return divisor_structures(p, N)[0][1]


def ordinary_structures(p: int) -> Iterator[Tuple[int, int, int]]:
    """(N, m1, m2) for every ordinary N in the window, N ascending."""
    _require_field(p)
    for N in hasse_window(p).integer_range:
        if waterhouse_attainable(p, N).kind is OrderKind.ORDINARY:
            for m1, m2 in divisor_structures(p, N):
                yield N, m1, m2


@dataclass(frozen=True)
class OracleMinimum:
    exponent: int
    N: int
    m1: int
    m2: int


def min_exponent_oracle(p: int) -> OracleMinimum:
    """
    The smallest exponent of an ordinary curve over F_p.

    Ties on the exponent go to the largest m1 (the least cyclic structure).
    """
    best = None
    for N, m1, m2 in ordinary_structures(p):
        key = (m2, -m1)
        if best is None or key < best[0]:
            best = (key, OracleMinimum(exponent=m2, N=N, m1=m1, m2=m2))
    return best[1]


# ============================================================================
# BOUND EVALUATORS
# ============================================================================

def trivial_exponent_bound(q: int, g: int = 1) -> float:
    """sqrt(q) - 1, whatever the genus."""
    if q < 2:
        raise ArgumentError(f"q must be at least 2, got {q}")
    return math.sqrt(q) - 1


def exponent_floor(q: int, g: int, s: int, k: Sequence[int]) -> float:
    """
    Lower bound on m_(2g) from the first s structure ratios k_1..k_s.

    Args:
        q: Field size
        g: Genus
        s: 1 <= s <= 2g - 1
        k: The s ratios k_i = m_i / m_(i-1)
    """
    if not 1 <= s <= 2 * g - 1:
        raise ArgumentError(f"s must satisfy 1 <= s <= {2 * g - 1}, got {s}")
    if len(k) != s:
        raise ArgumentError(f"expected {s} values of k, got {len(k)}")
    if any(ki < 1 for ki in k):
        raise ArgumentError(f"k must be positive integers, got {tuple(k)}")
    denominator = math.prod(ki ** (s - i) for i, ki in enumerate(k))
    return ((math.sqrt(q) - 1) ** (2 * g) / denominator) ** (1.0 / (2 * g - s))


@dataclass(frozen=True)
class QkBound:
    bound: float
    U: float
    V: float


def _check_k_tuple(g: int, k: Sequence[int]) -> None:
    if g < 1:
        raise ArgumentError(f"genus must be positive, got {g}")
    if len(k) != 2 * g - 1:
        raise ArgumentError(f"genus {g} needs {2 * g - 1} values of k, got {len(k)}")
    if any(ki < 1 for ki in k):
        raise ArgumentError(f"k must be positive integers, got {tuple(k)}")


def qk_bound(x: float, g: int, k: Sequence[int]) -> QkBound:
    """The census bound #Q_k <= U_k V_k."""
    _check_k_tuple(g, k)
    top = math.sqrt(x) + 1
    U = top ** (2 * g)
    for i, ki in enumerate(k, start=1):
        U /= ki ** (2 * g + 1 - i)
    V = 5 * top / math.prod(k[:g]) + 1
    return QkBound(bound=U * V, U=U, V=V)


@dataclass(frozen=True)
class KSetFlags:
    """Which of the three K-set conditions hold."""
    outside_interval: bool
    weighted_first_half: bool
    weighted_all: bool

    @property
    def in_K(self) -> bool:
        return self.outside_interval and self.weighted_first_half and self.weighted_all


def eta_in_range(eta: float, g: int = 1) -> bool:
    """The K-set conditions are defined for 0 < eta < 1/(100g)."""
    return 0 < eta < 1.0 / (100 * g)


def interval_I(x: float, eta: float) -> Tuple[float, float]:
    """I = (x^(1/4 - 3 eta), x^(1/4 + 3 eta)]."""
    return x ** (0.25 - 3 * eta), x ** (0.25 + 3 * eta)


def k_set_membership(x: float, eta: float, g: int, k: Sequence[int]) -> KSetFlags:
    """
    Evaluate the three K-set conditions for the (2g-1)-tuple k:

        k1...kg not in I
        k1^g k2^(g-1) ... kg          >= x^(g/4 - 2g eta)
        k1^(2g-1) k2^(2g-2) ... k_(2g-1) >= x^(g - 3/4 - 2 eta)

    Comparisons are made between logarithms.
    """
    _check_k_tuple(g, k)
    if not eta_in_range(eta, g):
        raise ArgumentError(f"eta must satisfy 0 < eta < 1/(100g) = {1.0 / (100 * g)}, got {eta}")
    log_x = math.log(x)
    logs = [math.log(ki) for ki in k]

    log_product = sum(logs[:g])
    outside = not ((0.25 - 3 * eta) * log_x < log_product <= (0.25 + 3 * eta) * log_x)
    first_half = sum((g - i) * logs[i] for i in range(g))
    weighted_all = sum((2 * g - 1 - i) * logs[i] for i in range(2 * g - 1))

    return KSetFlags(
        outside_interval=outside,
        weighted_first_half=first_half >= (g / 4 - 2 * g * eta) * log_x,
        weighted_all=weighted_all >= (g - 0.75 - 2 * eta) * log_x,
    )
