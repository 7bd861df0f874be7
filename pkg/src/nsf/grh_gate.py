"""Least-prime gate for 8e9 < n < q_20#, conditional on GRH.

If some prime q <= 71 does not divide n and n exceeds 4 (q (q-1) log q)^2,
the least prime p = n (mod q^2) lies below n, so q^2 divides n - p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .arith_core import is_prime, primes_upto, primorial
from .errors import NotPrime

GATE_PRIMES = tuple(primes_upto(71).tolist())
Q20_PRIMORIAL = primorial(71)
GATE_LOWER = 8 * 10**9


@dataclass(frozen=True)
class GateWitness:
    n: int
    q: int
    bound: float

    def check(self) -> bool:
        return (is_prime(self.q) and self.q <= 71 and math.gcd(self.n, self.q * self.q) == 1
                and self.n > self.bound)

    def to_json(self) -> dict:
        return {"n": self.n, "q": self.q, "bound": self.bound}


def least_prime_bound(q: int) -> float:
    """4 (q (q - 1) log q)^2, the GRH bound for the least prime in a class mod q^2."""
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    return 4 * (q * (q - 1) * math.log(q)) ** 2


_BOUNDS = {q: least_prime_bound(q) for q in GATE_PRIMES}


def gate(n: int) -> GateWitness | None:
    """Smallest prime q <= 71 with q not dividing n and n above its bound.

    Returns None exactly when every prime up to 71 divides n.
    """
    if n <= GATE_LOWER:
        raise ValueError(f"gate requires n > {GATE_LOWER}")
    for q in GATE_PRIMES:
        if n % q and n > _BOUNDS[q]:
            return GateWitness(n, q, _BOUNDS[q])
    return None
