"""
Prime Engine
Description: Segmented sieve, integer factorization, prime counting in arithmetic
progressions and elementary sums over primes.

================================================================================
SEGMENTED SIEVE
================================================================================
The interval [0, limit] is processed in segments of SEGMENT_SIZE integers. Each
segment is a numpy boolean mask; multiples of every base prime p <= sqrt(limit)
are cleared with one strided assignment starting at max(p^2, first multiple in
the segment). The finished mask is packed to one bit per integer, so the
primality table of 10^8 costs 12.5 MB while a segment never exceeds
SEGMENT_SIZE bytes.

    segment k:  [k*S, (k+1)*S)      mask[start - low :: p] = False

The sorted array of primes is kept next to the packed table so that counts
over progressions and sums over (y, z] are vectorised slices.

================================================================================
FACTORIZATION
================================================================================
  1. Trial division by the primes below TRIAL_DIVISION_BOUND (stops early once
     p^2 exceeds the unfactored part).
  2. A cofactor that is prime (sympy.isprime, deterministic below 2^64) is
     recorded as is.
  3. Composite cofactors are split with Brent's variant of Pollard rho. The
     random generator is seeded from RHO_SEED and the cofactor, so every run
     produces the same factorization in the same number of steps.

Interval convention everywhere in this package is half-open: (y, z] means
y < d <= z.
================================================================================
"""

import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Tuple

import numpy as np
from sympy import isprime

from ..errors import ArgumentError, CapacityError

logger = logging.getLogger(__name__)

SIEVE_CEILING = 10**9
SEGMENT_SIZE = 2**20
FACTOR_CEILING = 2**63 - 1
TRIAL_DIVISION_BOUND = 10**6
RHO_SEED = 20070101
# Above this many terms mertens_sum switches from Fraction to math.fsum.
EXACT_RECIPROCAL_TERMS = 500


# ============================================================================
# SIEVE
# ============================================================================

def _simple_sieve(limit: int) -> np.ndarray:
    """Primes <= limit with a plain (unsegmented) numpy sieve."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@dataclass(frozen=True, eq=False)
class PrimeSieve:
    """
    Primality table over [0, limit] plus the sorted primes it contains.

    Immutable after construction, so one sieve can be shared by any number of
    workers.
    """
    limit: int
    primes: np.ndarray
    bits: np.ndarray

    @property
    def primality(self) -> np.ndarray:
        """The unpacked boolean table; primality[n] is True iff n is prime."""
        return np.unpackbits(self.bits, count=self.limit + 1, bitorder='little').astype(bool)

    def covers(self, x: float) -> bool:
        return 0 <= x and math.floor(x) <= self.limit

    def require(self, x: float) -> None:
        if not self.covers(x):
            raise CapacityError(f"sieve covers [0, {self.limit}] but {x} was requested")

    def is_prime(self, n: int) -> bool:
        self.require(n)
        return bool((self.bits[n >> 3] >> (n & 7)) & 1)

    def primes_up_to(self, x: float) -> np.ndarray:
        self.require(x)
        return self.primes[:np.searchsorted(self.primes, math.floor(x), side='right')]

    def primes_in(self, y: float, z: float) -> np.ndarray:
        """Primes p with y < p <= z."""
        if z <= y:
            return self.primes[:0]
        self.require(z)
        lo = np.searchsorted(self.primes, math.floor(y), side='right') if y >= 0 else 0
        hi = np.searchsorted(self.primes, math.floor(z), side='right')
        return self.primes[lo:hi]


def sieve_range(limit: int, segment_size: int = SEGMENT_SIZE) -> PrimeSieve:
    """
    Build a PrimeSieve for [0, limit].

    Args:
        limit: Largest integer covered, 2 <= limit <= SIEVE_CEILING
        segment_size: Integers per segment (a multiple of 8)

    Returns:
        PrimeSieve

    Raises:
        ArgumentError: limit below 2 or segment_size not a positive multiple of 8
        CapacityError: limit above SIEVE_CEILING
    """
    if limit < 2:
        raise ArgumentError(f"sieve limit must be at least 2, got {limit}")
    if limit > SIEVE_CEILING:
        raise CapacityError(f"sieve limit {limit} exceeds the ceiling {SIEVE_CEILING}")
    if segment_size <= 0 or segment_size % 8:
        raise ArgumentError(f"segment size must be a positive multiple of 8, got {segment_size}")

    base = _simple_sieve(math.isqrt(limit)).tolist()
    packed: List[np.ndarray] = []
    found: List[np.ndarray] = []

    for low in range(0, limit + 1, segment_size):
        high = min(low + segment_size, limit + 1)  # exclusive
        mask = np.ones(high - low, dtype=bool)
        if low == 0:
            mask[:2] = False
        for p in base:
            if p * p >= high:
                break
            start = max(p * p, ((low + p - 1) // p) * p)
            mask[start - low::p] = False
        found.append(np.flatnonzero(mask).astype(np.int64) + low)
        packed.append(np.packbits(mask, bitorder='little'))

    primes = np.concatenate(found)
    logger.debug("sieved [0, %d]: %d primes in %d segments", limit, primes.size, len(found))
    return PrimeSieve(limit=limit, primes=primes, bits=np.concatenate(packed))


# ============================================================================
# FACTORIZATION
# ============================================================================

@dataclass(frozen=True)
class Factorization:
    """n together with its (prime, multiplicity) pairs, ascending by prime."""
    n: int
    factors: Tuple[Tuple[int, int], ...]

    def product(self) -> int:
        result = 1
        for p, e in self.factors:
            result *= p ** e
        return result

    def divisors(self) -> List[int]:
        """All positive divisors of n in ascending order."""
        divs = [1]
        for p, e in self.factors:
            divs = [d * p ** k for d in divs for k in range(e + 1)]
        return sorted(divs)


@lru_cache(maxsize=1)
def _trial_primes() -> List[int]:
    return _simple_sieve(TRIAL_DIVISION_BOUND).tolist()


def _brent_split(n: int, rng: random.Random) -> int:
    """Return a nontrivial factor of the odd composite n (Brent's rho)."""
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            # Backtrack one step at a time from the last saved position.
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split_into_primes(n: int, out: List[int]) -> None:
    if n == 1:
        return
    if isprime(n):
        out.append(n)
        return
    d = _brent_split(n, random.Random(RHO_SEED ^ n))
    _split_into_primes(d, out)
    _split_into_primes(n // d, out)


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """
    Factor n by trial division followed by seeded Pollard-Brent splitting.

    Args:
        n: 1 <= n <= FACTOR_CEILING

    Returns:
        Factorization; n = 1 gives the empty factor list

    Raises:
        ArgumentError: n < 1
        CapacityError: n > FACTOR_CEILING
    """
    if n < 1:
        raise ArgumentError(f"factorize needs a positive integer, got {n}")
    if n > FACTOR_CEILING:
        raise CapacityError(f"{n} exceeds the factorization ceiling {FACTOR_CEILING}")

    counts = {}
    rest = n
    for p in _trial_primes():
        if p * p > rest:
            break
        while rest % p == 0:
            counts[p] = counts.get(p, 0) + 1
            rest //= p

    if rest > 1:
        if rest < TRIAL_DIVISION_BOUND ** 2:
            large = [rest]
        else:
            large = []
            _split_into_primes(rest, large)
        for p in large:
            counts[p] = counts.get(p, 0) + 1

    return Factorization(n=n, factors=tuple(sorted(counts.items())))


# ============================================================================
# COUNTS AND SUMS OVER PRIMES
# ============================================================================

def prime_count(sieve: PrimeSieve, x: float, k: int = 1, a: int = 0) -> int:
    """
    pi(x; k, a): the number of primes q <= x with q = a (mod k).

    k = 1 gives pi(x).
    """
    if k < 1:
        raise ArgumentError(f"modulus must be positive, got {k}")
    primes = sieve.primes_up_to(x)
    if k == 1:
        return int(primes.size)
    return int(np.count_nonzero(primes % k == a % k))


def mertens_sum(sieve: PrimeSieve, y: float, z: float) -> float:
    """
    Sum of 1/p over primes y < p <= z.

    Short ranges are summed exactly as fractions; long ones with math.fsum,
    which rounds the sum of the float reciprocals correctly.
    """
    if y < 0 or z < y:
        raise ArgumentError(f"mertens_sum needs 0 <= y <= z, got ({y}, {z}]")
    primes = sieve.primes_in(y, z).tolist()
    if len(primes) <= EXACT_RECIPROCAL_TERMS:
        return float(sum((Fraction(1, p) for p in primes), Fraction(0)))
    return math.fsum(1.0 / p for p in primes)


# ============================================================================
# DIVISORS IN AN INTERVAL
# ============================================================================

def iter_divisors(fac: Factorization, ceiling: float = math.inf) -> Iterator[int]:
    """Yield divisors of fac.n not exceeding ceiling (unordered)."""
    factors = fac.factors

    def walk(i: int, d: int) -> Iterator[int]:
        if i == len(factors):
            yield d
            return
        p, e = factors[i]
        for _ in range(e + 1):
            if d > ceiling:
                return
            yield from walk(i + 1, d)
            d *= p

    yield from walk(0, 1)


def has_divisor_in(n: int, y: float, z: float) -> bool:
    """True iff some divisor d of n satisfies y < d <= z."""
    if n < 1:
        raise ArgumentError(f"has_divisor_in needs n >= 1, got {n}")
    if z <= y or z < 1 or y >= n:
        return False
    return any(d > y for d in iter_divisors(factorize(n), z))
