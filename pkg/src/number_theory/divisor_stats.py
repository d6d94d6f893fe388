"""
Divisor Statistics
Description: Exact counts H(x, y, z) and H(x, y, z, P_lambda), and the upper
estimate x u^delta (log(2/u))^(-3/2) they are compared against.

================================================================================
COUNTING BY MARKING MULTIPLES
================================================================================
H(x, y, z) is the number of n <= x having a divisor d with y < d <= z. Instead
of factoring every n, each integer d in (y, z] marks its multiples in a
boolean array over [1, x]:

    d = 3:  . . X . . X . . X . . X ...
    d = 4:  . . . X . . . X . . . X ...
    H     = number of marked cells

The work is about x * sum(1/d) = O(x log(z/y)). The array is processed in
segments of SEGMENT_SIZE cells, so memory stays bounded for large x.

H(x, y, z, P_lambda) reuses the same marks: a prime p <= x is counted when the
cell of p + lambda is marked. Shifted values p + lambda <= 0 are never counted.

================================================================================
THE UPPER ESTIMATE
================================================================================
With u defined by y^(1+u) = z and

    delta = 1 - (1 + log log 2) / log 2 = 0.086071...

the estimate is x * u^delta * (log(2/u))^(-3/2), valid for 3 <= y <= sqrt(x)
and 2y <= z <= y^2. The implied constant is unknown, so the value is returned
raw and callers look at ratios.
================================================================================
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from ..errors import ArgumentError, CapacityError, DomainError
from .prime_engine import SEGMENT_SIZE, PrimeSieve, sieve_range

logger = logging.getLogger(__name__)

DELTA = 1.0 - (1.0 + math.log(math.log(2.0))) / math.log(2.0)
H_CEILING = 10**9
DEFAULT_LAMBDA = -1
MAX_SHIFT = 10

SWEEP_HEADER = ['y', 'z', 'u', 'H', 'H_shifted', 'estimate', 'ratio', 'ratio_shifted']


@dataclass(frozen=True)
class DivisorWindow:
    """The parameters (x, y, z) of a divisor count."""
    x: int
    y: float
    z: float

    def validate(self) -> None:
        if self.x < 1:
            raise ArgumentError(f"x must be a positive integer, got {self.x}")
        if not 0 < self.y <= self.z:
            raise ArgumentError(f"window needs 0 < y <= z, got y={self.y}, z={self.z}")
        if self.z > self.x:
            raise ArgumentError(f"window needs z <= x, got z={self.z}, x={self.x}")
        if self.x > H_CEILING:
            raise CapacityError(f"x={self.x} exceeds the counting ceiling {H_CEILING}")

    def estimate_violations(self) -> List[str]:
        """The range conditions of the upper estimate that this window breaks."""
        broken = []
        if self.y < 3:
            broken.append("3 <= y")
        if self.y * self.y > self.x:
            broken.append("y <= sqrt(x)")
        if self.z < 2 * self.y:
            broken.append("2y <= z")
        if self.z > self.y * self.y:
            broken.append("z <= y^2")
        return broken

    @property
    def estimate_valid(self) -> bool:
        return not self.estimate_violations()

    @property
    def u(self) -> float:
        """u with y^(1+u) = z."""
        return math.log(self.z) / math.log(self.y) - 1.0

    def divisor_range(self) -> range:
        """Integers d with y < d <= z."""
        return range(math.floor(self.y) + 1, math.floor(self.z) + 1)


@dataclass(frozen=True)
class DivisorEstimate:
    u: float
    delta: float
    value: float


def _mark_segment(low: int, high: int, divisors: range) -> np.ndarray:
    """Marks for n in [low, high) that are multiples of some d in divisors."""
    mark = np.zeros(high - low, dtype=bool)
    for d in divisors:
        if d >= high:
            break
        start = ((low + d - 1) // d) * d
        mark[start - low::d] = True
    return mark


def count_H(w: DivisorWindow, segment_size: int = SEGMENT_SIZE) -> int:
    """
    H(x, y, z): the number of n <= x with a divisor in (y, z].

    Args:
        w: The window
        segment_size: Cells per marking pass

    Returns:
        int
    """
    w.validate()
    divisors = w.divisor_range()
    if not divisors:
        return 0
    total = 0
    for low in range(1, w.x + 1, segment_size):
        high = min(low + segment_size, w.x + 1)
        total += int(np.count_nonzero(_mark_segment(low, high, divisors)))
    return total


def count_H_shifted(w: DivisorWindow, lam: int = DEFAULT_LAMBDA,
                    sieve: Optional[PrimeSieve] = None,
                    segment_size: int = SEGMENT_SIZE,
                    max_shift: int = MAX_SHIFT) -> int:
    """
    H(x, y, z, P_lambda): the number of primes p <= x such that p + lambda has a
    divisor in (y, z].
    """
    w.validate()
    if lam == 0:
        raise ArgumentError("the shift lambda must be nonzero")
    if abs(lam) > max_shift:
        raise ArgumentError(f"|lambda| must be at most {max_shift}, got {lam}")
    divisors = w.divisor_range()
    if not divisors:
        return 0
    if sieve is None:
        sieve = sieve_range(max(w.x, 2))

    shifted = sieve.primes_up_to(w.x) + lam
    shifted = shifted[shifted >= 1]
    if shifted.size == 0:
        return 0

    top = int(shifted[-1])
    total = 0
    for low in range(1, top + 1, segment_size):
        high = min(low + segment_size, top + 1)
        chunk = shifted[(shifted >= low) & (shifted < high)]
        if chunk.size:
            mark = _mark_segment(low, high, divisors)
            total += int(np.count_nonzero(mark[chunk - low]))
    return total


def divisor_upper_estimate(w: DivisorWindow) -> DivisorEstimate:
    """
    Evaluate x * u^delta * (log(2/u))^(-3/2) for a window in the valid range.

    Raises:
        DomainError: naming every violated range condition
    """
    broken = w.estimate_violations()
    if broken:
        raise DomainError(f"window (x={w.x}, y={w.y}, z={w.z}) violates: {', '.join(broken)}")
    u = w.u
    value = w.x * u ** DELTA * math.log(2.0 / u) ** -1.5
    return DivisorEstimate(u=u, delta=DELTA, value=value)


ford_upper_estimate = divisor_upper_estimate
FordEstimate = DivisorEstimate


# ============================================================================
# RATIO SWEEP
# ============================================================================

class ZRule(Enum):
    DOUBLE = 'double'
    SQUARE = 'square'
    FIXED = 'fixed-z'


@dataclass(frozen=True)
class SweepRow:
    y: float
    z: float
    u: float
    H: int
    H_shifted: int
    estimate: float
    ratio: float
    ratio_shifted: float

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in SWEEP_HEADER}


def _z_for(y: float, rule: ZRule, fixed_z: Optional[float]) -> float:
    if rule is ZRule.DOUBLE:
        return 2 * y
    if rule is ZRule.SQUARE:
        return y * y
    if fixed_z is None:
        raise ArgumentError("z rule 'fixed-z' needs a z value")
    return fixed_z


def ratio_sweep(x: int, y_list: Sequence[float], z_rule: ZRule,
                fixed_z: Optional[float] = None,
                lam: int = DEFAULT_LAMBDA,
                sieve: Optional[PrimeSieve] = None) -> List[SweepRow]:
    """
    Compare H and H_shifted with the upper estimate over several windows.

    Rows are sorted by y. ratio = H / estimate and
    ratio_shifted = H_shifted * log(x) / H.
    """
    if not y_list:
        return []
    z_rule = ZRule(z_rule)
    if sieve is None:
        sieve = sieve_range(max(x, 2))

    rows = []
    for y in sorted(y_list):
        w = DivisorWindow(x, y, _z_for(y, z_rule, fixed_z))
        estimate = divisor_upper_estimate(w)
        h = count_H(w)
        h_shifted = count_H_shifted(w, lam, sieve=sieve)
        rows.append(SweepRow(
            y=w.y, z=w.z, u=estimate.u, H=h, H_shifted=h_shifted,
            estimate=estimate.value,
            ratio=h / estimate.value,
            ratio_shifted=h_shifted * math.log(x) / h if h else float('nan'),
        ))
        logger.info("sweep y=%s z=%s H=%d ratio=%.4g", w.y, w.z, h, rows[-1].ratio)
    return rows
