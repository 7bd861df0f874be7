"""Range verification that every n > 24 is a prime plus a non-squarefree integer.

Each segment ``[lo, hi)`` goes through three stages, and every n is credited
to the first stage that verifies it:

1. covering: ``p + s`` is marked for every prime ``p`` in the prime window and
   every non-squarefree ``s`` in S1;
2. targeted: for each unmarked n, S2 is scanned in ascending order testing
   whether ``n - s`` is prime;
3. fallback: exhaustive :func:`~nsf.representations.find_witness`.

Whatever survives all three is reported as an exception.
"""
from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .arith_core import SEGMENT_CAPACITY, is_prime, prime_mask, squarefree_mask
from .errors import InvalidRange
from .representations import RepresentationWitness, find_witness

log = logging.getLogger(__name__)

VERIFY_UPPER = 8 * 10**9


@dataclass(frozen=True)
class VerifierConfig:
    segment_width: int = 10**7
    s1_bound: int = 10**5
    s2_bound: int = 10**4
    thread_count: int = 1
    # covering primes start s1_bound below the segment; False restricts them
    # to the segment itself, which leaves work for the targeted stage
    cover_left_extension: bool = True

    def __post_init__(self):
        if self.s2_bound > self.s1_bound:
            raise ValueError("s2_bound must not exceed s1_bound")
        if min(self.s1_bound, self.s2_bound) < 4:
            raise ValueError("table bounds must be >= 4")
        if not 1 <= self.segment_width <= SEGMENT_CAPACITY:
            raise ValueError(f"segment_width must be in [1, {SEGMENT_CAPACITY}]")
        if self.thread_count < 1:
            raise ValueError("thread_count must be >= 1")


@dataclass(frozen=True, eq=False)
class Tables:
    s1_mask: np.ndarray  # s1_mask[m] is True iff 1 < m <= s1_bound is non-squarefree
    s1: np.ndarray
    s2: np.ndarray

    def __contains__(self, m: int) -> bool:
        return 0 <= m < len(self.s1_mask) and bool(self.s1_mask[m])


def build_tables(cfg: VerifierConfig) -> Tables:
    mask = ~squarefree_mask(0, cfg.s1_bound + 1)
    mask[:2] = False
    s1 = np.flatnonzero(mask).astype(np.int64)
    s2 = s1[s1 <= cfg.s2_bound].copy()
    for arr in (mask, s1, s2):
        arr.setflags(write=False)
    return Tables(mask, s1, s2)


@dataclass(frozen=True)
class VerificationReport:
    lo: int
    hi: int
    covered: int
    targeted: int
    fallback: int
    exceptions: tuple[int, ...] = ()
    elapsed: float = field(default=0.0, compare=False)

    def __post_init__(self):
        total = self.covered + self.targeted + self.fallback + len(self.exceptions)
        if total != self.hi - self.lo:
            raise AssertionError(
                f"accounting broken on [{self.lo}, {self.hi}): {total} != {self.hi - self.lo}")
        if list(self.exceptions) != sorted(self.exceptions):
            raise AssertionError("exceptions must be sorted")

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        """Combine reports on adjacent ranges (order-independent)."""
        a, b = sorted((self, other), key=lambda r: r.lo)
        if a.hi != b.lo:
            raise ValueError(f"ranges [{a.lo}, {a.hi}) and [{b.lo}, {b.hi}) are not adjacent")
        return VerificationReport(
            a.lo, b.hi,
            a.covered + b.covered,
            a.targeted + b.targeted,
            a.fallback + b.fallback,
            a.exceptions + b.exceptions,
            a.elapsed + b.elapsed,
        )

    def to_json(self) -> dict:
        return {
            "lo": self.lo, "hi": self.hi,
            "covered": self.covered, "targeted": self.targeted, "fallback": self.fallback,
            "exceptions": list(self.exceptions),
            "ms": round(self.elapsed * 1000, 3),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "VerificationReport":
        return cls(obj["lo"], obj["hi"], obj["covered"], obj["targeted"], obj["fallback"],
                   tuple(obj["exceptions"]), obj.get("ms", 0.0) / 1000)


def merge_reports(reports: Iterable[VerificationReport]) -> VerificationReport:
    reports = sorted(reports, key=lambda r: r.lo)
    if not reports:
        raise ValueError("nothing to merge")
    out = reports[0]
    for r in reports[1:]:
        out = out.merge(r)
    return out


def verify_segment(lo: int, hi: int, cfg: VerifierConfig, tables: Tables) -> VerificationReport:
    if not 24 < lo < hi:
        raise InvalidRange(f"need 24 < lo < hi, got [{lo}, {hi})")
    if hi - lo > cfg.segment_width:
        raise InvalidRange(f"segment [{lo}, {hi}) wider than {cfg.segment_width}")
    t0 = time.perf_counter()
    plo = max(0, lo - cfg.s1_bound) if cfg.cover_left_extension else lo
    pm = prime_mask(plo, hi)

    # covering, evaluated per unmarked n: n = p + s for a window prime p and s in S1
    rem = np.arange(lo, hi, dtype=np.int64)
    for s in tables.s1.tolist():
        if not len(rem):
            break
        k = rem - s
        if k[-1] < plo:
            break
        hit = (k >= plo) & pm[np.maximum(k, plo) - plo]
        rem = rem[~hit]
    covered = (hi - lo) - len(rem)

    targeted = fallback = 0
    exc = []
    s2 = tables.s2.tolist()
    for n in rem.tolist():
        if _targeted_hit(n, s2, pm, plo):
            targeted += 1
        elif find_witness(n) is not None:
            fallback += 1
        else:
            exc.append(n)
    return VerificationReport(lo, hi, covered, targeted, fallback, tuple(exc),
                              time.perf_counter() - t0)


def _targeted_hit(n: int, s2: list[int], pm: np.ndarray, plo: int) -> bool:
    for s in s2:
        m = n - s
        if m < 2:
            return False
        if pm[m - plo] if m >= plo else is_prime(m):
            return True
    return False


def reconstruct_witness(n: int, tables: Tables) -> RepresentationWitness | None:
    """Rebuild a certificate for n, trying S1 first (as the covering stage does)."""
    for s in tables.s1:
        s = int(s)
        if s > n - 2:
            break
        if is_prime(n - s):
            return RepresentationWitness(n, n - s, s)
    return find_witness(n)


def partition(lo: int, hi: int, width: int) -> list[tuple[int, int]]:
    """Split [lo, hi) at multiples of width."""
    out = []
    a = lo
    while a < hi:
        b = min(hi, (a // width + 1) * width)
        out.append((a, b))
        a = b
    return out


def _load_checkpoint(path: Path) -> dict[tuple[int, int], VerificationReport]:
    done = {}
    if path.exists():
        with path.open() as fh:
            for line in fh:
                line = line.strip()
                if line:
                    r = VerificationReport.from_json(json.loads(line))
                    done[r.lo, r.hi] = r
    return done


def verify_range(lo: int, hi: int, cfg: VerifierConfig | None = None, *,
                 checkpoint: str | os.PathLike | None = None,
                 on_segment: Callable[[VerificationReport], None] | None = None,
                 ) -> VerificationReport:
    """Verify [lo, hi) segment by segment and merge the reports.

    With ``checkpoint`` set, each finished segment is appended to a JSONL file
    and segments already recorded there are not recomputed.
    """
    cfg = cfg or VerifierConfig()
    if not 24 < lo < hi:
        raise InvalidRange(f"need 24 < lo < hi, got [{lo}, {hi})")
    tables = build_tables(cfg)
    segments = partition(lo, hi, cfg.segment_width)

    ckpt = Path(checkpoint) if checkpoint is not None else None
    done = _load_checkpoint(ckpt) if ckpt else {}
    todo = [seg for seg in segments if seg not in done]
    if done:
        log.info("resuming: %d of %d segments already checkpointed",
                 len(segments) - len(todo), len(segments))

    reports = []
    with ThreadPoolExecutor(max_workers=cfg.thread_count) as pool:
        fresh = pool.map(lambda seg: verify_segment(seg[0], seg[1], cfg, tables), todo)
        for seg in segments:
            rep = done.get(seg)
            if rep is None:
                rep = next(fresh)
                if ckpt:
                    with ckpt.open("a") as fh:
                        fh.write(json.dumps(rep.to_json()) + "\n")
            log.debug("segment [%d, %d): %d exceptions", rep.lo, rep.hi, len(rep.exceptions))
            if on_segment:
                on_segment(rep)
            reports.append(rep)
    return merge_reports(reports)
