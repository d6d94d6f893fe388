"""
Curve Scanning
Description: Walks curves over F_p in lexicographic (a, b) order, either one
representative per isomorphism class or every pair, to find curves with a
prescribed order or group structure.

================================================================================
ISOMORPHISM CLASSES
================================================================================
(a, b) and (u^4 a, u^6 b) define isomorphic curves for every u in F_p*, and the
group structure is a class invariant. Every class meets row a = 0 or the row of
the smallest element of a coset of (F_p*)^4, so only those rows are scanned:

    row 0         a = 0
    row r         r = min(r (F_p*)^4), r != 0

Within a row, b runs upward; an unseen nonsingular (r, b) is the
lexicographically least member of its class, and its whole orbit is then
marked in a p x p table. About 2p classes remain out of p^2 pairs.

================================================================================
TWIST-DERIVED ROWS
================================================================================
If r / c = e^2 with e a non-residue, (r, b) is the twist of (c, b e^-3), so

    N(r, b) = 2p + 2 - N(c, b e^-3)

and a row counted once gives the counts of its twin row for free.
================================================================================
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, Tuple, Union

import numpy as np

from ..errors import CapacityError, InternalConsistencyError
from .attainability import OrderKind, waterhouse_attainable
from .elliptic_core import (
    P_EXHAUSTIVE,
    WeierstrassCurve,
    group_structure,
    legendre,
    row_point_counts,
    sqrt_table,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NotAttainable:
    """No curve over F_p has the requested order or structure."""
    p: int
    reason: str


def singular_mask(p: int, a: int) -> np.ndarray:
    """True where 4a^3 + 27b^2 = 0 (mod p), for b in [0, p)."""
    bs = np.arange(p, dtype=np.int64)
    return (4 * pow(a, 3, p) + 27 * (bs * bs % p)) % p == 0


class CurveClassScanner:
    """
    One representative per isomorphism class of curves over F_p.

    Args:
        p: Prime, 5 <= p <= capacity
        capacity: Largest p whose p x p orbit table may be allocated
    """

    def __init__(self, p: int, capacity: int = P_EXHAUSTIVE):
        if p > capacity:
            raise CapacityError(f"class scan over F_{p} exceeds the exhaustive capacity {capacity}")
        WeierstrassCurve(p, 0, 1)  # validates p
        self.p = p
        self._units = np.arange(1, p, dtype=np.int64)
        self._u4 = np.array([pow(int(u), 4, p) for u in self._units], dtype=np.int64)
        self._u6 = np.array([pow(int(u), 6, p) for u in self._units], dtype=np.int64)
        self._rows: Dict[int, np.ndarray] = {}
        self.twist_derived_rows = 0

    def rep_rows(self) -> list:
        """0 followed by the least element of each coset of the fourth powers."""
        fourth_powers = set(self._u4.tolist())
        rows, covered = [0], set()
        for r in range(1, self.p):
            if r not in covered:
                rows.append(r)
                covered.update(r * f % self.p for f in fourth_powers)
        return rows

    def row_counts(self, a: int) -> np.ndarray:
        """N(a, b) for all b, derived from an already counted twin row if one exists."""
        if a in self._rows:
            return self._rows[a]
        p = self.p
        counts = None
        if a:
            for c, base in self._rows.items():
                if c == 0:
                    continue
                ratio = a * pow(c, -1, p) % p
                if legendre(ratio, p) != 1:
                    continue
                e = int(sqrt_table(p)[ratio])
                source = (np.arange(p, dtype=np.int64) * pow(e, -3, p)) % p
                if legendre(e, p) == -1:
                    counts = 2 * p + 2 - base[source]
                else:
                    counts = base[source]
                self.twist_derived_rows += 1
                break
        if counts is None:
            counts = row_point_counts(p, a)
        self._rows[a] = counts
        return counts

    def representatives(self) -> Iterator[Tuple[int, int, int]]:
        """
        Yield (a, b, N) for the lexicographically least member of every class,
        in lexicographic order.
        """
        p = self.p
        seen = np.zeros((p, p), dtype=bool)
        for a in self.rep_rows():
            counts = self.row_counts(a)
            singular = singular_mask(p, a)
            for b in range(p):
                if seen[a, b] or singular[b]:
                    continue
                seen[self._u4 * a % p, self._u6 * b % p] = True
                yield a, b, int(counts[b])


# ============================================================================
# FINDING CURVES
# ============================================================================

def _curves_with_order(p: int, N: int, exclude_special_j: bool,
                       p_exhaustive: int) -> Iterator[Tuple[int, int]]:
    """
    (a, b) with N(a, b) = N in lexicographic order.

    Up to p_exhaustive only class representatives are visited (the first
    curve of a class in lexicographic order is its representative). Above it
    every row is walked.
    """
    if p <= p_exhaustive:
        for a, b, n in CurveClassScanner(p, capacity=p_exhaustive).representatives():
            if n == N and not (exclude_special_j and (a == 0 or b == 0)):
                yield a, b
        return
    for a in range(1 if exclude_special_j else 0, p):
        usable = ~singular_mask(p, a)
        if exclude_special_j:
            usable[0] = False
        yield from ((a, b) for b in np.flatnonzero((row_point_counts(p, a) == N) & usable).tolist())


def find_curve_with_order(p: int, N: int, exclude_special_j: bool = False,
                          p_exhaustive: int = P_EXHAUSTIVE) -> Union[WeierstrassCurve, NotAttainable]:
    """
    The lexicographically first curve over F_p with exactly N points.

    Raises:
        InternalConsistencyError: the oracle predicts N but no curve has it
    """
    order = waterhouse_attainable(p, N)
    if order.kind is OrderKind.NOT_ATTAINABLE:
        return NotAttainable(p, f"N={N} is outside the attainable orders (trace {order.trace})")
    for a, b in _curves_with_order(p, N, exclude_special_j, p_exhaustive):
        return WeierstrassCurve(p, a, b)
    if exclude_special_j:
        return NotAttainable(p, f"N={N} only occurs with j in {{0, 1728}}")
    raise InternalConsistencyError(f"N={N} over F_{p} is {order.kind.value} but no curve has it")


def find_curve_with_structure(p: int, m1: int, m2: int, exclude_special_j: bool = False,
                              p_exhaustive: int = P_EXHAUSTIVE
                              ) -> Union[WeierstrassCurve, NotAttainable]:
    """
    The lexicographically first curve over F_p with E(F_p) = Z/m1 x Z/m2.

    Supersingular orders are searched as well, but only ordinary structures
    are predicted; a supersingular miss is reported as NotAttainable.
    """
    N = m1 * m2
    order = waterhouse_attainable(p, N)
    if order.kind is OrderKind.NOT_ATTAINABLE:
        return NotAttainable(p, f"N={N} is outside the attainable orders (trace {order.trace})")
    if m2 % m1 or (p - 1) % m1:
        return NotAttainable(p, f"({m1}, {m2}) needs m1 | m2 and m1 | {p - 1}")

    checked = 0
    for a, b in _curves_with_order(p, N, exclude_special_j, p_exhaustive):
        E = WeierstrassCurve(p, a, b)
        checked += 1
        gs = group_structure(E, order=N, p_exhaustive=p_exhaustive)
        if gs.m1 == m1:
            logger.info("found (%d, %d) over F_%d at (a, b)=(%d, %d) after %d candidates",
                        m1, m2, p, a, b, checked)
            return E
    if order.kind is OrderKind.SUPERSINGULAR or exclude_special_j:
        return NotAttainable(p, f"no curve realises ({m1}, {m2})")
    raise InternalConsistencyError(
        f"({m1}, {m2}) over F_{p} is predicted for an ordinary order but no curve has it")
