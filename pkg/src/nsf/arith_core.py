"""Exact integer primitives: primality, Mobius/squarefree sieving, factorization.

Conventions used throughout the package:

* ``mobius(0) == 0`` and 0 is not squarefree, so a representation ``n = p + s``
  with ``p == n`` never counts.
* ``mobius(1) == 1`` and 1 is squarefree but not prime.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityExceeded, FactorizationFailed, OutOfSupportedRange

__all__ = [
    "MR_BASES",
    "MR_EXACT_BOUND",
    "SEGMENT_CAPACITY",
    "TRIAL_DIVISION_BOUND",
    "Factorization",
    "SieveSegment",
    "factorize",
    "is_prime",
    "is_squarefree",
    "mobius",
    "nth_prime",
    "phi_of_square",
    "primes_upto",
    "primorial",
    "sieve_segment",
]

# The first 13 primes form a strong-pseudoprime-free witness set for every
# n below psi_13 (Sorenson and Webster, 2015), which covers all of 2**64.
MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MR_EXACT_BOUND = 3317044064679887385961981

SEGMENT_CAPACITY = 10**7
TRIAL_DIVISION_BOUND = 10**6
RHO_ITERATION_BUDGET = 2_000_000


# --------------------------------------------------------------------------
# prime tables
# --------------------------------------------------------------------------

@lru_cache(maxsize=8)
def primes_upto(limit: int) -> np.ndarray:
    """All primes ``<= limit`` as a read-only int64 array."""
    if limit < 2:
        out = np.zeros(0, dtype=np.int64)
    else:
        mask = np.ones(limit + 1, dtype=bool)
        mask[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if mask[p]:
                mask[p * p::p] = False
        out = np.flatnonzero(mask).astype(np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=1)
def _trial_primes() -> tuple[int, ...]:
    return tuple(primes_upto(TRIAL_DIVISION_BOUND).tolist())


# --------------------------------------------------------------------------
# primality
# --------------------------------------------------------------------------

def _strong_probable_prime(n: int, d: int, r: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Deterministic primality for ``0 <= n < MR_EXACT_BOUND``.

    Raises :class:`OutOfSupportedRange` above the bound rather than answering
    probabilistically.
    """
    if n < 2:
        return False
    for p in MR_BASES:
        if n % p == 0:
            return n == p
    if n < 43 * 43:
        return True
    if n >= MR_EXACT_BOUND:
        raise OutOfSupportedRange(f"no exact primality method configured for n >= {MR_EXACT_BOUND}")
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    return all(_strong_probable_prime(n, d, r, a) for a in MR_BASES)


# --------------------------------------------------------------------------
# factorization
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        primes = [p for p, _ in self.factors]
        if any(a >= b for a, b in zip(primes, primes[1:])):
            raise ValueError("primes must be strictly increasing")
        if any(e < 1 for _, e in self.factors):
            raise ValueError("exponents must be positive")
        if self.value >= 1 and self.product() != self.value:
            raise ValueError("factors do not multiply to value")

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def product(self) -> int:
        return math.prod(p**e for p, e in self.factors)

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def coprime_to(self, a: int) -> bool:
        return all(a % p for p, _ in self.factors)

    @classmethod
    def from_primes(cls, primes) -> "Factorization":
        """Factorization of a squarefree product of distinct primes."""
        ps = sorted(int(p) for p in primes)
        return cls(math.prod(ps), tuple((p, 1) for p in ps))


def _pollard_brent(n: int, rng: random.Random, budget: int) -> int:
    """A non-trivial factor of composite odd ``n``, or 0 when the budget runs out."""
    spent = 0
    while spent < budget:
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
            spent += r
            if spent >= budget:
                break
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return 0


def _split(n: int, rng: random.Random, budget: int, out: dict[int, int]) -> None:
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        try:
            prime = is_prime(m)
        except OutOfSupportedRange:
            prime = False
            if math.isqrt(m) ** 2 == m:
                stack.extend((math.isqrt(m), math.isqrt(m)))
                continue
        if prime:
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_brent(m, rng, budget)
        if not d:
            raise FactorizationFailed(f"could not split cofactor {m} within budget")
        stack.extend((d, m // d))


def factorize(n: int, *, budget: int = RHO_ITERATION_BUDGET, seed: int = 0) -> Factorization:
    """Exact factorization: trial division by primes up to 10**6, then Pollard-Brent.

    Every prime reported is certified by :func:`is_prime`; a cofactor that
    cannot be split or certified raises :class:`FactorizationFailed`.
    """
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    found: dict[int, int] = {}
    m = n
    known_composite = False
    for p in _trial_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            found[p] = e
            known_composite = False
        elif p > 1000 and not known_composite:
            # stop early once the cofactor is itself prime
            if m < MR_EXACT_BOUND and is_prime(m):
                break
            known_composite = True
    if m > 1:
        if m < TRIAL_DIVISION_BOUND**2:
            found[m] = found.get(m, 0) + 1
        else:
            _split(m, random.Random(seed), budget, found)
    return Factorization(n, tuple(sorted(found.items())))


# --------------------------------------------------------------------------
# scalar Mobius / squarefree
# --------------------------------------------------------------------------

def mobius(n: int) -> int:
    if n == 0:
        return 0
    f = factorize(n)
    if not f.is_squarefree():
        return 0
    return -1 if f.omega % 2 else 1


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return factorize(n).is_squarefree()


def phi_of_square(a: int) -> int:
    """Euler's totient of ``a**2``, i.e. ``a * phi(a)``."""
    if a < 1:
        raise ValueError("phi_of_square requires a >= 1")
    phi = a
    for p, _ in factorize(a).factors:
        phi = phi // p * (p - 1)
    return a * phi


def nth_prime(i: int) -> int:
    """The i-th prime, 1-indexed (``nth_prime(1) == 2``)."""
    if i < 1:
        raise ValueError("nth_prime requires i >= 1")
    # Rosser's bound p_i < i(log i + log log i) for i >= 6
    bound = 15 if i < 6 else int(i * (math.log(i) + math.log(math.log(i)))) + 1
    return int(primes_upto(bound)[i - 1])


def primorial(N: int) -> int:
    """Product of all primes ``<= N``, exact."""
    if N < 2:
        raise ValueError("primorial requires N >= 2")
    return math.prod(primes_upto(N).tolist())


# --------------------------------------------------------------------------
# segmented sieve
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SieveSegment:
    """Per-element annotations of the half-open interval ``[lo, hi)``."""

    lo: int
    hi: int
    prime_mask: np.ndarray
    squarefree_mask: np.ndarray
    mobius: np.ndarray | None = None

    def __len__(self) -> int:
        return self.hi - self.lo

    def primes(self) -> np.ndarray:
        return np.flatnonzero(self.prime_mask).astype(np.int64) + self.lo

    def non_squarefree(self) -> np.ndarray:
        return np.flatnonzero(~self.squarefree_mask).astype(np.int64) + self.lo


def _first_multiple(lo: int, m: int) -> int:
    return -(-lo // m) * m


def prime_mask(lo: int, hi: int) -> np.ndarray:
    """Boolean primality mask for ``[lo, hi)``."""
    mask = np.ones(hi - lo, dtype=bool)
    mask[: max(0, min(2, hi) - lo)] = False
    for p in primes_upto(math.isqrt(hi - 1)).tolist():
        start = max(p * p, _first_multiple(lo, p))
        mask[start - lo::p] = False
    return mask


def squarefree_mask(lo: int, hi: int) -> np.ndarray:
    """Boolean squarefree mask for ``[lo, hi)``; 0 is not squarefree."""
    mask = np.ones(hi - lo, dtype=bool)
    if lo == 0:
        mask[0] = False
    for p in primes_upto(math.isqrt(hi - 1)).tolist():
        q = p * p
        mask[_first_multiple(lo, q) - lo::q] = False
    return mask


def _mobius_values(lo: int, hi: int, sqf: np.ndarray) -> np.ndarray:
    mu = np.ones(hi - lo, dtype=np.int8)
    radical = np.ones(hi - lo, dtype=np.int64)
    for p in primes_upto(math.isqrt(hi - 1)).tolist():
        start = _first_multiple(lo, p) - lo
        mu[start::p] *= -1
        radical[start::p] *= p
    # one prime factor above sqrt(hi) remains wherever the small part falls short
    values = np.arange(lo, hi, dtype=np.int64)
    mu[radical != values] *= -1
    mu[~sqf] = 0
    return mu


def sieve_segment(lo: int, hi: int, want_mobius: bool = False, *,
                  capacity: int = SEGMENT_CAPACITY) -> SieveSegment:
    if not 0 <= lo < hi:
        raise ValueError(f"need 0 <= lo < hi, got [{lo}, {hi})")
    if hi - lo > capacity:
        raise CapacityExceeded(f"segment width {hi - lo} exceeds capacity {capacity}")
    sqf = squarefree_mask(lo, hi)
    mu = _mobius_values(lo, hi, sqf) if want_mobius else None
    return SieveSegment(lo, hi, prime_mask(lo, hi), sqf, mu)
