"""Explicit criteria certifying that n is a prime plus a non-squarefree integer.

The criterion compares a left-hand side (1, 1/2 for odd n, or ``W(n)``) with
a sum of error terms:

* ``e_sum``: the normalised prime-number-theorem error over squarefree
  ``1 < a <= c`` coprime to n,
* ``bt_tail``: the Brun-Titchmarsh factor times the tail bound ``4/(c - 1)``,
* ``theta_tail``: ``3 log n / n**A``,
* plus ``W**2/2`` (general n) or the product ``P(n)`` itself.

Everything takes ``log n`` rather than n so arguments of the size of the
20th primorial need no wide arithmetic here.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Literal, Mapping

import mpmath
import numpy as np

from .arith_core import (
    SEGMENT_CAPACITY,
    Factorization,
    factorize,
    nth_prime,
    primes_upto,
    primorial,
    sieve_segment,
    squarefree_mask,
)
from .errors import DomainError, UnsupportedEBound

__all__ = [
    "ARTIN_PRINTED",
    "BENNETT_LOG_X0",
    "PROP2_LOG_THRESHOLD",
    "CriterionBreakdown",
    "CriterionParams",
    "artin_constant",
    "artin_partial_product",
    "bt_factor",
    "criterion_generic",
    "criterion_grh",
    "criterion_odd",
    "engine_bound",
    "optimize_A",
    "P_exact",
    "pi_bounds",
    "prime_square_tail_lower",
    "prop2_upper_bound",
    "qbound_check",
    "ramare_tail",
    "robin_omega_bound",
    "series_partial",
    "tail_oracle",
    "W",
]

ARTIN_PRINTED = 0.3739558136
BENNETT_LOG_X0 = math.log(8e9)
PROP2_LOG_THRESHOLD = 28.05
ROBIN_CONSTANT = 1.3841
Q_FACTOR = 2.11
DECISION_EPS = 1e-9


# --------------------------------------------------------------------------
# Artin's constant and P(n)
# --------------------------------------------------------------------------

def _artin_log_terms(primes: np.ndarray) -> np.ndarray:
    p = primes.astype(np.float64)
    return np.log1p(-1.0 / (p * (p - 1.0)))


def artin_partial_product(cutoff: int) -> float:
    """The product of (1 - 1/(p(p-1))) over primes p <= cutoff, no tail correction.

    Overestimates the constant by a relative amount below ``1/cutoff``.
    """
    return math.exp(math.fsum(_artin_log_terms(primes_upto(cutoff))))


def _lucas(k: int) -> int:
    a, b = 2, 1
    for _ in range(k):
        a, b = b, a + b
    return a


@lru_cache(maxsize=4)
def artin_constant(cutoff: int = 10**6, series_terms: int = 8) -> float:
    """Artin's constant: explicit product to ``cutoff`` plus a prime-zeta tail.

    With x = 1/p, log(1 - 1/(p(p-1))) = -sum_{k>=2} (L_k - 1) x**k / k where
    L_k are Lucas numbers, so the tail over p > cutoff is a fast series in the
    tail prime zeta sums.  Truncating that series after ``series_terms``
    leaves an error below ``L_{K+1} cutoff**-K``, about 1e-47 by default.
    """
    primes = primes_upto(cutoff)
    head = math.fsum(_artin_log_terms(primes))
    pf = primes.astype(np.float64)
    tail = []
    for k in range(2, series_terms + 2):
        pz_tail = float(mpmath.primezeta(k)) - math.fsum(pf ** -k)
        tail.append((_lucas(k) - 1) / k * max(pz_tail, 0.0))
    return math.exp(head - math.fsum(tail))


def P_exact(factors: Factorization | int) -> float:
    """P(n), the product of (1 - 1/(p(p-1))) over primes p not dividing n."""
    if not isinstance(factors, Factorization):
        factors = factorize(factors)
    divisor_part = math.prod(1 - 1 / (p * (p - 1)) for p in factors.primes)
    return artin_constant() / divisor_part


def engine_bound(omega: int) -> float:
    """Upper bound for P(n) depending only on omega(n): the worst case where
    n is divisible by the first omega primes."""
    if omega < 0:
        raise DomainError("omega must be non-negative")
    if omega == 0:
        return artin_constant()
    primes = primes_upto(nth_prime(omega)).tolist()
    return artin_constant() * math.prod(1 + 1 / (p * p - p - 1) for p in primes)


def case_ii_constant() -> float:
    """(12/5) C_Artin, the omega(n) <= 2 bound for P(n)."""
    return 12 / 5 * artin_constant()


# --------------------------------------------------------------------------
# W(n) and the general upper bound on P(n)
# --------------------------------------------------------------------------

def W(log_n: float) -> float:
    y = Q_FACTOR * log_n
    if y <= 1:
        raise DomainError(f"W needs 2.11 log n > 1, got log n = {log_n}")
    ly = math.log(y)
    return (1 - 5 / (2 * ly)) / (y * ly)


def prop2_upper_bound(log_n: float) -> float:
    """1 - W + W**2/2, an upper bound for P(n) once log n >= 28.05."""
    if log_n < PROP2_LOG_THRESHOLD:
        raise DomainError(f"bound needs log n >= {PROP2_LOG_THRESHOLD}, got {log_n}")
    w = W(log_n)
    return 1 - w + w * w / 2


# --------------------------------------------------------------------------
# tails and series over a
# --------------------------------------------------------------------------

@lru_cache(maxsize=2)
def _totients(limit: int) -> np.ndarray:
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in primes_upto(limit).tolist():
        phi[p::p] -= phi[p::p] // p
    phi.setflags(write=False)
    return phi


@lru_cache(maxsize=2)
def _squarefree_weights(limit: int) -> tuple[np.ndarray, np.ndarray]:
    """(mu(a), 1/phi(a^2)) for 0 <= a <= limit."""
    mu = sieve_segment(0, limit + 1, want_mobius=True, capacity=limit + 1).mobius
    a = np.arange(limit + 1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        inv_phi_sq = 1.0 / (a * _totients(limit).astype(np.float64))
    inv_phi_sq[0] = 0.0
    for arr in (mu, inv_phi_sq):
        arr.setflags(write=False)
    return mu, inv_phi_sq


def ramare_tail(c: float) -> float:
    """Upper bound 4/(c - 1) for the sum of mu(a)^2/phi(a^2) over a > c."""
    if c <= 1:
        raise DomainError("c must exceed 1")
    return 4 / (c - 1)


def tail_oracle(c: float, cutoff: int) -> float:
    """Direct sum of mu(a)^2/phi(a^2) over c < a <= cutoff."""
    mu, w = _squarefree_weights(cutoff)
    start = math.floor(c) + 1
    sel = w[start:][mu[start:] != 0]
    return math.fsum(sel)


def series_partial(factors: Factorization | int, cutoff: int) -> float:
    """Sum of mu(a)/phi(a^2) over 1 < a <= cutoff with gcd(a, n) = 1.

    Converges to P(n) - 1 with error at most ``ramare_tail(cutoff)``.
    """
    if not isinstance(factors, Factorization):
        factors = factorize(factors)
    mu, w = _squarefree_weights(cutoff)
    keep = mu != 0
    keep[:2] = False
    for p in factors.primes:
        if p <= cutoff:
            keep[p::p] = False
    return math.fsum(mu[keep] * w[keep])


def bt_factor(A: float) -> float:
    """Brun-Titchmarsh inflation (1 + 2A)/(1 - 2A) for moduli up to n**A."""
    if not 0 < A < 0.5:
        raise DomainError(f"A must lie in (0, 1/2), got {A}")
    return (1 + 2 * A) / (1 - 2 * A)


# --------------------------------------------------------------------------
# criteria
# --------------------------------------------------------------------------

Mode = Literal["general", "odd"]


@dataclass(frozen=True)
class CriterionBreakdown:
    mode: str
    lhs: float
    terms: dict[str, float] = field(hash=False)
    rhs: float = 0.0
    margin: float = 0.0
    verdict: bool = False

    @classmethod
    def build(cls, mode: str, lhs: float, terms: dict[str, float]) -> "CriterionBreakdown":
        rhs = math.fsum(terms.values())
        margin = lhs - rhs
        # precision is never decision-critical: require a clear positive margin
        verdict = margin > DECISION_EPS * max(1.0, abs(lhs))
        return cls(mode, lhs, dict(terms), rhs, margin, verdict)

    def to_json(self) -> dict:
        return asdict(self)


def _check_A(A: float) -> None:
    if not 0 < A < 0.5:
        raise DomainError(f"A must lie in (0, 1/2), got {A}")


def _theta_tail(log_n: float, A: float) -> float:
    return 3 * log_n * math.exp(-A * log_n)


def criterion_odd(log_n: float, A: float) -> CriterionBreakdown:
    """Odd-n criterion with c = 316 and the Bennett et al. error bound.

    The 315 squarefree-or-not moduli 1 < a <= 316 are bounded crudely by
    316 copies of n/(160 log n), exactly as displayed in the literature.
    """
    _check_A(A)
    if log_n < BENNETT_LOG_X0:
        raise DomainError(f"Bennett bound needs n >= 8e9 (log n >= {BENNETT_LOG_X0:.6f})")
    return CriterionBreakdown.build("odd", 0.5, {
        "e_sum": 316 / (160 * log_n),
        "bt_tail": bt_factor(A) * 4 / 315,
        "theta_tail": _theta_tail(log_n, A),
    })


def _grh_closed_e_sum(log_n: float, A: float) -> float:
    return math.exp((A - 0.5) * log_n) * (
        (1 + 8 * A) / (8 * math.pi) * log_n**2 + 4 * A * log_n + 3.43)


def criterion_grh(log_n: float, A: float) -> CriterionBreakdown:
    """General-n criterion under GRH with c = n**A, against W(n)."""
    _check_A(A)
    if log_n < PROP2_LOG_THRESHOLD:
        raise DomainError(f"W(n) bound needs log n >= {PROP2_LOG_THRESHOLD}")
    w = W(log_n)
    return CriterionBreakdown.build("general", w, {
        "w_squared_half": w * w / 2,
        "e_sum": _grh_closed_e_sum(log_n, A),
        "bt_tail": bt_factor(A) * 4 / math.expm1(A * log_n),
        "theta_tail": _theta_tail(log_n, A),
    })


# E(a, n)/n as a function of (a array, log n)
def _bennett(a: np.ndarray, log_n: float) -> np.ndarray:
    if len(a) and a[-1] ** 2 > 10**5:
        raise UnsupportedEBound("Bennett et al. bound only covers a^2 <= 1e5 (c <= 316)")
    return np.full(len(a), 1 / (160 * log_n))


def _grh(a: np.ndarray, log_n: float) -> np.ndarray:
    per_a = log_n**2 / (8 * math.pi) + (log_n / math.pi + 4) * np.log(a) + 3.43
    return per_a * math.exp(-log_n / 2)


_E_BOUNDS = {"bennett": (_bennett, math.log(8e9)), "grh": (_grh, math.log(2))}


@dataclass(frozen=True)
class CriterionParams:
    """``e_bound`` is "bennett", "grh", or a mapping a -> E(a, n)/n."""

    A: float
    c: float
    e_bound: str | Mapping[int, float] = "bennett"
    x0: float | None = None

    def __post_init__(self):
        _check_A(self.A)
        if not self.c > 1:
            raise DomainError(f"c must exceed 1, got {self.c}")
        if self.x0 is not None and not self.x0 > 0:
            raise DomainError("x0 must be positive")
        if isinstance(self.e_bound, str) and self.e_bound not in _E_BOUNDS:
            raise UnsupportedEBound(f"unknown E-bound {self.e_bound!r}")

    @property
    def log_x0(self) -> float:
        if self.x0 is not None:
            return math.log(self.x0)
        if isinstance(self.e_bound, str):
            return _E_BOUNDS[self.e_bound][1]
        return 0.0

    def relative_errors(self, a: np.ndarray, log_n: float) -> np.ndarray:
        if isinstance(self.e_bound, str):
            return _E_BOUNDS[self.e_bound][0](a, log_n)
        try:
            return np.array([self.e_bound[int(x)] for x in a], dtype=np.float64)
        except KeyError as exc:
            raise UnsupportedEBound(f"custom E-bound table has no entry for a = {exc.args[0]}") from None


def _coprime_squarefree(c: float, factors: Factorization) -> np.ndarray:
    top = math.floor(c)
    if top + 1 > SEGMENT_CAPACITY:
        raise DomainError(f"c = {c:.4g} exceeds the enumerable range")
    keep = squarefree_mask(0, top + 1)
    keep[:2] = False
    for p in factors.primes:
        keep[p::p] = False
    return np.flatnonzero(keep)


def criterion_generic(log_n: float, params: CriterionParams, factors: Factorization,
                      mode: Mode = "general", p_route: Literal["exact", "prop2"] = "exact",
                      ) -> CriterionBreakdown:
    """Evaluate the criterion with the exact sum over squarefree a in (1, c]
    coprime to n.

    ``mode="odd"`` replaces P(n) by its bound 1/2 (lhs 1/2); ``mode="general"``
    keeps lhs 1 and adds P(n), either exactly or through ``prop2_upper_bound``.
    """
    if log_n < params.log_x0:
        raise DomainError(f"E-bound valid only for log n >= {params.log_x0:.6f}")
    a = _coprime_squarefree(params.c, factors)
    terms = {}
    if mode == "general":
        terms["p_term"] = P_exact(factors) if p_route == "exact" else prop2_upper_bound(log_n)
        lhs = 1.0
    elif mode == "odd":
        if 2 in factors.primes:
            raise DomainError("odd mode needs odd n")
        lhs = 0.5
    else:
        raise DomainError(f"unknown mode {mode!r}")
    terms["e_sum"] = math.fsum(params.relative_errors(a, log_n))
    terms["bt_tail"] = bt_factor(params.A) * ramare_tail(params.c)
    terms["theta_tail"] = _theta_tail(log_n, params.A)
    return CriterionBreakdown.build(mode, lhs, terms)


# --------------------------------------------------------------------------
# parameter optimisation
# --------------------------------------------------------------------------

A_LO, A_HI = 0.01, 0.49
_INV_PHI = (math.sqrt(5) - 1) / 2


def _golden_section(f, a: float, b: float, tol: float) -> float:
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (a + b) / 2


def optimize_A(log_n: float, mode: Literal["odd", "grh"], *, tol: float = 1e-5,
               grid: int = 97) -> tuple[float, float]:
    """Minimise the criterion's right-hand side over A in [0.01, 0.49].

    A grid pre-scan checks unimodality; if the grid values are not
    decreasing-then-increasing the grid argmin is returned instead.
    """
    crit = {"odd": criterion_odd, "grh": criterion_grh}.get(mode)
    if crit is None:
        raise DomainError(f"unknown mode {mode!r}")

    def rhs(A: float) -> float:
        return crit(log_n, float(A)).rhs

    xs = np.linspace(A_LO, A_HI, grid)
    ys = np.array([rhs(x) for x in xs])
    k = int(np.argmin(ys))
    dy = np.diff(ys)
    if not (np.all(dy[:k] < 0) and np.all(dy[k:] > 0)):
        return float(xs[k]), float(ys[k])
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, grid - 1)]
    best = float(_golden_section(rhs, float(lo), float(hi), tol))
    return best, rhs(best)


# --------------------------------------------------------------------------
# auxiliary explicit facts used for P(n)
# --------------------------------------------------------------------------

def robin_omega_bound(log_n: float) -> float:
    """Upper bound 1.3841 log n / log log n for omega(n), valid for n >= 3."""
    if log_n <= 1:
        raise DomainError("need log n > 1")
    return ROBIN_CONSTANT * log_n / math.log(log_n)


def qbound_check(k: int) -> bool:
    """q_k < 2.11 log(q_k#): the worst n with omega(n) = k still obeys the
    prime bound."""
    if k < 3:
        raise DomainError("qbound_check needs k >= 3")
    q = nth_prime(k)
    return q < Q_FACTOR * math.log(primorial(q))


def pi_bounds(y: float) -> tuple[float, float]:
    """Rosser-Schoenfeld bracket for pi(y), valid for y >= 59."""
    if y < 59:
        raise DomainError("bracket needs y >= 59")
    ly = math.log(y)
    return y / ly + y / (2 * ly * ly), y / ly + 3 * y / (2 * ly * ly)


def prime_square_tail_lower(y: float) -> float:
    """Lower bound (1 - 5/(2 log y))/(y log y) for the sum of 1/p^2 over p > y."""
    if y < 59:
        raise DomainError("bound needs y >= 59")
    ly = math.log(y)
    return (1 - 5 / (2 * ly)) / (y * ly)
