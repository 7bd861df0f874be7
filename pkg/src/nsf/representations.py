"""Counting functions for representations n = p + s.

``R(n)`` weights each prime ``p <= n`` by ``log p`` when ``n - p`` is
squarefree, ``theta`` is the Chebyshev function, and ``deficit(n)`` is the
Mobius-weighted sum over progressions modulo ``a**2`` that is negative exactly
when ``n`` is a prime plus a non-squarefree integer.

All log-sums are accumulated with :func:`math.fsum`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith_core import is_prime, is_squarefree, primes_upto, sieve_segment, squarefree_mask

__all__ = [
    "RepresentationWitness",
    "ThetaValue",
    "R",
    "R_decomposed",
    "T",
    "deficit",
    "exceptions",
    "find_witness",
    "g",
    "theta",
    "theta_ap",
]


@dataclass(frozen=True)
class ThetaValue:
    value: float
    term_count: int

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class RepresentationWitness:
    n: int
    p: int
    s: int

    def check(self) -> bool:
        """Re-verify the certificate from scratch."""
        return (self.p + self.s == self.n and self.s >= 4
                and is_prime(self.p) and not is_squarefree(self.s))


# --------------------------------------------------------------------------
# cached tables
# --------------------------------------------------------------------------

@lru_cache(maxsize=4)
def _log_table(limit: int) -> tuple[np.ndarray, np.ndarray]:
    primes = primes_upto(limit)
    logs = np.log(primes.astype(np.float64))
    logs.setflags(write=False)
    return primes, logs


def _primes_and_logs(x: int) -> tuple[np.ndarray, np.ndarray]:
    limit = max(1 << 16, 1 << (max(x, 1) - 1).bit_length())
    primes, logs = _log_table(limit)
    k = int(np.searchsorted(primes, x, side="right"))
    return primes[:k], logs[:k]


@lru_cache(maxsize=4)
def _squarefree_table(limit: int) -> np.ndarray:
    mask = squarefree_mask(0, limit + 1)
    mask.setflags(write=False)
    return mask


def _squarefree_upto(x: int) -> np.ndarray:
    limit = max(1 << 16, 1 << max(x, 1).bit_length())
    return _squarefree_table(limit)[: x + 1]


@lru_cache(maxsize=4)
def _mobius_table(limit: int) -> np.ndarray:
    mu = sieve_segment(0, limit + 1, want_mobius=True).mobius
    mu.setflags(write=False)
    return mu


def _mobius_upto(x: int) -> np.ndarray:
    limit = max(1 << 12, 1 << max(x, 1).bit_length())
    return _mobius_table(limit)[: x + 1]


# --------------------------------------------------------------------------
# theta and friends
# --------------------------------------------------------------------------

def theta(x: int) -> ThetaValue:
    """Chebyshev's theta: sum of log p over primes p <= x."""
    _, logs = _primes_and_logs(x)
    return ThetaValue(math.fsum(logs), len(logs))


def theta_ap(x: int, modulus: int, residue: int) -> ThetaValue:
    """Sum of log p over primes p <= x with p = residue (mod modulus)."""
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    primes, logs = _primes_and_logs(x)
    sel = logs[primes % modulus == residue % modulus]
    return ThetaValue(math.fsum(sel), len(sel))


def R(n: int) -> ThetaValue:
    """Weighted count of primes p <= n with n - p squarefree (by definition)."""
    if n < 2:
        raise ValueError("R requires n >= 2")
    primes, logs = _primes_and_logs(n)
    sel = logs[_squarefree_upto(n)[n - primes]]
    return ThetaValue(math.fsum(sel), len(sel))


def _progression_sum(n: int, start: int) -> float:
    # primes p < n only: p = n would give s = 0, which mu(0) = 0 already drops
    # from R, and mu^2(m) = sum_{a^2 | m} mu(a) needs m >= 1
    primes, logs = _primes_and_logs(n - 1)
    mu = _mobius_upto(math.isqrt(n))
    terms = []
    for a in range(start, math.isqrt(n) + 1):
        if mu[a]:
            q = a * a
            terms.append(int(mu[a]) * math.fsum(logs[primes % q == n % q]))
    return math.fsum(terms)


def R_decomposed(n: int) -> float:
    """R(n) through the expansion sum_{a <= sqrt n} mu(a) theta(n - 1, a^2, n)."""
    if n < 2:
        raise ValueError("R requires n >= 2")
    return _progression_sum(n, 1)


def deficit(n: int) -> float:
    """Sum over 1 < a <= sqrt(n) of mu(a) theta(n - 1, a^2, n).

    Equals R(n) - theta(n - 1), which is R(n) - theta(n) unless n is prime.
    Negative exactly when n is a prime plus a non-squarefree integer.
    """
    if n < 2:
        raise ValueError("deficit requires n >= 2")
    return _progression_sum(n, 2)


def T(n: int) -> int:
    """Ordered representations n = p + s with p prime and s >= 1 squarefree."""
    if n < 2:
        raise ValueError("T requires n >= 2")
    primes, _ = _primes_and_logs(n - 1)
    return int(np.count_nonzero(_squarefree_upto(n)[n - primes]))


def g(n: int) -> int:
    """Goldbach representations n = p + q with primes p >= q."""
    if n < 2:
        raise ValueError("g requires n >= 2")
    primes, _ = _primes_and_logs(n // 2)
    if not len(primes):
        return 0
    big, _ = _primes_and_logs(n)
    hit = np.isin(n - primes, big, assume_unique=True)
    return int(np.count_nonzero(hit))


# --------------------------------------------------------------------------
# witnesses and exceptions
# --------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _small_non_squarefree() -> tuple[int, ...]:
    mask = _squarefree_upto(1 << 16)
    return tuple(int(s) for s in np.flatnonzero(~mask) if s >= 4)


def _non_squarefree_from_4():
    cached = _small_non_squarefree()
    yield from cached
    s = cached[-1] + 1
    while True:
        if not is_squarefree(s):
            yield s
        s += 1


def find_witness(n: int) -> RepresentationWitness | None:
    """The representation n = p + s with smallest non-squarefree s, or None."""
    if n < 2:
        raise ValueError("find_witness requires n >= 2")
    for s in _non_squarefree_from_4():
        if s > n - 2:
            return None
        if is_prime(n - s):
            return RepresentationWitness(n, n - s, s)
    return None


EXCEPTION_CHUNK = 1 << 20
_PRIME_SCAN = 1 << 16


def _chunk_exceptions(a: int, b: int) -> list[int]:
    wlo = max(0, a - _PRIME_SCAN)
    sqf = squarefree_mask(wlo, b)
    rem = np.arange(a, b, dtype=np.int64)
    scanned_below = _PRIME_SCAN + 1
    for p in primes_upto(_PRIME_SCAN).tolist():
        if not len(rem):
            break
        if p >= rem[-1]:
            scanned_below = p
            break
        s = rem - p
        hit = (s >= 1) & ~sqf[np.maximum(s, wlo) - wlo]
        rem = rem[~hit]
    out = []
    for n in rem.tolist():
        # every prime below n scanned already, or settle it exhaustively
        if n <= scanned_below or find_witness(n) is None:
            out.append(n)
    return out


def exceptions(lo: int, hi: int) -> list[int]:
    """All n in [lo, hi) that are not a prime plus a non-squarefree integer.

    Scans primes p in ascending order and tests n - p against a squarefree
    sieve, so it shares no code path with the s-ordered searches.
    """
    if not 1 <= lo < hi:
        raise ValueError("exceptions requires 1 <= lo < hi")
    out: list[int] = []
    for a in range(lo, hi, EXCEPTION_CHUNK):
        out.extend(_chunk_exceptions(a, min(hi, a + EXCEPTION_CHUNK)))
    return out
