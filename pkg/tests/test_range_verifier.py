import json
import random

import pytest

from nsf.errors import InvalidRange
from nsf.range_verifier import (
    VerificationReport,
    VerifierConfig,
    build_tables,
    merge_reports,
    partition,
    reconstruct_witness,
    verify_range,
    verify_segment,
)
from nsf.representations import exceptions

from oracles import bf_exceptions, td_is_prime, td_squarefree

SMALL = VerifierConfig(segment_width=10**4, s1_bound=2000, s2_bound=200)


class TestTables:
    def test_s2_twenty(self):
        t = build_tables(VerifierConfig(s1_bound=100, s2_bound=20))
        assert t.s2.tolist() == [4, 8, 9, 12, 16, 18, 20]

    def test_s1_four(self):
        t = build_tables(VerifierConfig(s1_bound=4, s2_bound=4))
        assert t.s1.tolist() == [4]
        assert 4 in t and 5 not in t and 0 not in t

    def test_s2_size_default(self):
        # counted by trial division
        expected = sum(1 for m in range(2, 10**4 + 1) if not td_squarefree(m))
        assert expected == 3917
        assert len(build_tables(VerifierConfig()).s2) == 3917

    def test_config_validation(self):
        with pytest.raises(ValueError):
            VerifierConfig(s1_bound=10, s2_bound=20)
        with pytest.raises(ValueError):
            VerifierConfig(thread_count=0)
        with pytest.raises(ValueError):
            VerifierConfig(segment_width=0)


class TestSegment:
    def test_25_35(self):
        cfg = VerifierConfig()
        t = build_tables(cfg)
        a = verify_segment(25, 35, cfg, t)
        b = verify_segment(25, 35, cfg, t)
        assert a == b
        assert a.exceptions == ()
        assert a.covered + a.targeted + a.fallback == 10

    def test_rejects_small_n(self):
        cfg = VerifierConfig()
        with pytest.raises(InvalidRange):
            verify_segment(2, 25, cfg, build_tables(cfg))
        with pytest.raises(InvalidRange):
            verify_range(2, 25, cfg)

    def test_width_limit(self):
        with pytest.raises(InvalidRange):
            verify_segment(25, 25 + 10**4 + 1, SMALL, build_tables(SMALL))

    def test_without_left_extension_uses_later_stages(self):
        cfg = VerifierConfig(segment_width=1000, s1_bound=2000, s2_bound=200,
                             cover_left_extension=False)
        rep = verify_range(25, 20_000, cfg)
        assert rep.exceptions == ()
        assert rep.targeted + rep.fallback > 0
        full = verify_range(25, 20_000, VerifierConfig(segment_width=1000, s1_bound=2000, s2_bound=200))
        assert full.covered >= rep.covered

    def test_fallback_reached_with_tiny_tables(self):
        cfg = VerifierConfig(segment_width=500, s1_bound=4, s2_bound=4, cover_left_extension=False)
        rep = verify_range(25, 3000, cfg)
        assert rep.exceptions == ()
        assert rep.fallback > 0


class TestReports:
    def test_merge_adjacent(self):
        cfg = VerifierConfig()
        t = build_tables(cfg)
        a = verify_segment(25, 50, cfg, t)
        b = verify_segment(50, 75, cfg, t)
        whole = verify_segment(25, 75, cfg, t)
        assert a.merge(b) == whole
        assert b.merge(a) == whole

    def test_merge_rejects_gap(self):
        a = VerificationReport(25, 30, 5, 0, 0)
        b = VerificationReport(31, 40, 9, 0, 0)
        with pytest.raises(ValueError):
            a.merge(b)

    def test_accounting_enforced(self):
        with pytest.raises(AssertionError):
            VerificationReport(25, 30, 4, 0, 0)

    def test_merge_associative(self):
        parts = [VerificationReport(a, b, b - a, 0, 0) for a, b in partition(25, 1000, 100)]
        rng = random.Random(1)
        shuffled = parts[:]
        rng.shuffle(shuffled)
        assert merge_reports(parts) == merge_reports(shuffled)

    def test_json_round_trip(self):
        r = VerificationReport(25, 40, 10, 3, 1, (31,), 0.5)
        assert VerificationReport.from_json(json.loads(json.dumps(r.to_json()))) == r

    def test_partition(self):
        assert partition(25, 250, 100) == [(25, 100), (100, 200), (200, 250)]


class TestRange:
    def test_completeness_against_prime_ordered_scan(self):
        rep = verify_range(25, 10**5, SMALL)
        assert list(rep.exceptions) == exceptions(25, 10**5) == []
        assert rep.lo == 25 and rep.hi == 10**5

    def test_completeness_against_brute_force(self):
        assert list(verify_range(25, 3000, SMALL).exceptions) == bf_exceptions(25, 3000)

    @pytest.mark.parametrize("threads", [2, 8])
    def test_thread_determinism(self, threads):
        cfg = VerifierConfig(segment_width=3000, s1_bound=2000, s2_bound=200)
        base = verify_range(25, 50_000, cfg)
        other = verify_range(25, 50_000, VerifierConfig(
            segment_width=3000, s1_bound=2000, s2_bound=200, thread_count=threads))
        assert base == other

    def test_segments_stream_in_order(self):
        seen = []
        verify_range(25, 10_000, VerifierConfig(segment_width=1000, thread_count=4),
                     on_segment=lambda r: seen.append(r.lo))
        assert seen == sorted(seen)
        assert seen[0] == 25

    @pytest.mark.slow
    def test_soundness_spot_checks(self):
        cfg = VerifierConfig()
        t = build_tables(cfg)
        rng = random.Random(11)
        for n in [25, 26, 27, 100, 10**6 + 3] + [rng.randint(25, 8 * 10**9) for _ in range(10**5)]:
            w = reconstruct_witness(n, t)
            assert w is not None and w.check()
        # independent recheck of a sample by trial division
        for n in [rng.randint(25, 10**9) for _ in range(200)]:
            w = reconstruct_witness(n, t)
            assert td_is_prime(w.p) and not td_squarefree(w.s) and w.p + w.s == n

    def test_checkpoint_resume(self, tmp_path):
        path = tmp_path / "ck.jsonl"
        cfg = VerifierConfig(segment_width=1000)
        first = verify_range(25, 5000, cfg, checkpoint=path)
        lines = path.read_text().splitlines()
        assert len(lines) == 5
        # drop the last two segments and resume
        path.write_text("\n".join(lines[:3]) + "\n")
        fresh = []
        second = verify_range(25, 5000, cfg, checkpoint=path, on_segment=fresh.append)
        assert second == first
        assert len(path.read_text().splitlines()) == 5
        assert [r.lo for r in fresh] == [25, 1000, 2000, 3000, 4000]
