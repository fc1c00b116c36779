"""Acceptance gate: one test per criterion, each reporting PASS/FAIL lines."""

import math
import random
import time
from collections import Counter

import numpy as np
import pytest

from rangemode.dynamic import DynamicRangeMode, ModeConfig, Snapshot
from rangemode.exponents import (
    DEFAULT_T2,
    RECT_MM_BOUNDS,
    balance_exponents,
    linear_omega,
    interpolated_omega,
)
from rangemode.harness.instances import (
    bounded_diff_instance,
    bucketed_instance,
    monotone_instance,
    random_forbidden,
    small_instance,
)
from rangemode.harness.oracle import oracle_minplus, oracle_query
from rangemode.harness.runner import NaiveMode, apply
from rangemode.harness.trace import generate_trace
from rangemode.mpq import BoundedDiffMPQ, BucketedMPQ, MonotoneMPQ, SmallEntriesMPQ, lth_smallest_close


# -- 1. exponent balance -------------------------------------------------------------


def test_exponent_balance(verdict):
    start = time.perf_counter()
    per_op, rebuild = balance_exponents(DEFAULT_T2)
    omega2 = linear_omega(2.0)
    elapsed = time.perf_counter() - start
    checks = [
        verdict(1, abs(per_op - rebuild) <= 1e-3,
                f"exponents {per_op:.6f} and {rebuild:.6f} differ by {abs(per_op - rebuild):.1e} (<= 1e-3)"),
        verdict(1, abs(per_op - 0.656) <= 1e-3 and abs(rebuild - 0.656) <= 1e-3,
                "both within 1e-3 of 0.656"),
        verdict(1, abs(omega2 - RECT_MM_BOUNDS[2.0]) <= 1e-6,
                f"linear bound at s=2 gives {omega2:.7f} vs tabulated {RECT_MM_BOUNDS[2.0]:.6f}, "
                f"gap {abs(omega2 - RECT_MM_BOUNDS[2.0]):.1e} (<= 1e-6 required; "
                f"unrounded interpolation gives {interpolated_omega(2.0):.7f})"),
        verdict(1, elapsed < 1.0, f"runtime {elapsed * 1e3:.2f} ms"),
    ]
    assert all(checks)


# -- 2 and 6. min-plus structures against the oracle ----------------------------------


def _small_case(rng):
    W = int(rng.integers(1, 5))
    n1, c, n2 = (int(x) for x in rng.integers(1, [13, 25, 13]))
    A, B = small_instance(rng, n1, c, n2, W)
    return A, B, SmallEntriesMPQ(A, B, W), c + 1


def _bucketed_case(rng):
    W = int(rng.integers(1, 5))
    n1, c, n2 = (int(x) for x in rng.integers(1, [13, 25, 13]))
    A, B = bucketed_instance(rng, n1, c, n2, W)
    P = int(rng.integers(1, c + 1))
    return A, B, BucketedMPQ(A, B, W, P), c + 1


def _bounded_case(rng):
    n1, c, n2 = (int(x) for x in rng.integers(1, [13, 25, 13]))
    delta = int(rng.integers(1, 5))
    W = int(rng.integers(1, 5))
    L = int(rng.integers(1, 13))
    A, B = bounded_diff_instance(rng, n1, c, n2, delta, W)
    return A, B, BoundedDiffMPQ(A, B, delta, W, L, seed=int(rng.integers(1 << 30))), L


def _monotone_case(rng):
    n1, c, n2 = (int(x) for x in rng.integers(1, [13, 25, 13]))
    L = int(rng.integers(1, 13))
    D = int(rng.integers(1, 40))
    A, B = monotone_instance(rng, n1, c, n2, D, spikes=int(rng.integers(0, 4)))
    delta = None if rng.random() < 0.3 else int(rng.integers(1, 5))
    return A, B, MonotoneMPQ(A, B, L, D, seed=int(rng.integers(1 << 30)), delta=delta), L


CASES = {
    "small": _small_case,
    "bucketed": _bucketed_case,
    "bounded_diff": _bounded_case,
    "monotone": _monotone_case,
}


@pytest.mark.parametrize("name", list(CASES))
def test_mpq_oracle_equivalence(name, verdict):
    make = CASES[name]
    mismatches = bad_witness = impure = queries = 0
    for seed in range(5):
        rng = np.random.default_rng(1000 * seed + len(name))
        for _ in range(20):
            A, B, d, limit = make(rng)
            Al, Bl = A.tolist(), B.tolist()
            n1, c = A.shape
            n2 = B.shape[1]
            for _ in range(200):
                i, j = int(rng.integers(n1)), int(rng.integers(n2))
                S = random_forbidden(rng, c, limit)
                before = d.checksum()
                got = d.query(i, j, S)
                if d.checksum() != before:
                    impure += 1
                want = oracle_minplus(Al, Bl, i, j, S)
                queries += 1
                if name == "small":
                    want = None if want is None else want[0]
                    mismatches += got != want
                    continue
                if got != want:
                    mismatches += 1
                if got is not None and (got[1] in S or Al[i][got[1]] + Bl[got[1]][j] != got[0]):
                    bad_witness += 1
    ok2 = verdict(2, mismatches == 0 and bad_witness == 0,
                  f"{name}: {queries} queries over 100 instances, {mismatches} mismatches, "
                  f"{bad_witness} invalid witnesses")
    ok6 = verdict(6, impure == 0, f"{name}: {impure} checksum changes across {queries} queries")
    assert ok2 and ok6


# -- 3, 5, 6, 7. dynamic structure against the recount oracle ---------------------------

DYNAMIC_CONFIGS = {
    "default": {},
    "T3=1": {"t3": 0.0},
    "T3=N": {"t3": 1.0},
    "deamortized": {"deamortize": True},
}


def _replay(trace, kw):
    dm = DynamicRangeMode(ModeConfig(trace.N, seed=trace.seed, **kw), debug=True)
    ref = NaiveMode(trace.N)
    stats = Counter()
    for op in trace.ops:
        if op[0] != "Q":
            apply(dm, op)
            apply(ref, op)
            continue
        l, r = op[1], op[2]
        stats["queries"] += 1
        stats["mid_stage"] += dm.staging
        before = dm.checksum()
        value, freq = dm.query(l, r)
        stats["impure"] += dm.checksum() != before
        expected = oracle_query(ref.seq, l, r)[1]
        stats["wrong_freq"] += freq != expected
        stats["bad_value"] += ref.seq[l - 1:r].count(value) != freq
    stats["violations"] += len(dm.violations)
    stats["budget"] += dm.max_forbidden >= dm.T2
    stats["rebuilds"] += dm.rebuilds
    return stats


@pytest.fixture(scope="module")
def dynamic_runs():
    results = {}
    for name, kw in DYNAMIC_CONFIGS.items():
        total = Counter()
        start = time.perf_counter()
        for seed in range(50):
            trace = generate_trace(2000, 1000, "zipf:1.1", seed=seed)
            total += _replay(trace, kw)
        total["seconds"] = round(time.perf_counter() - start)
        results[name] = total
    return results


def test_dynamic_oracle_equivalence(dynamic_runs, verdict):
    oks = []
    for name, s in dynamic_runs.items():
        oks.append(verdict(
            3, s["wrong_freq"] == 0 and s["bad_value"] == 0,
            f"{name}: 50 seeds x 2000 ops, {s['queries']} queries, {s['wrong_freq']} wrong "
            f"frequencies, {s['bad_value']} values not recounting ({s['seconds']} s)",
        ))
    assert all(oks)


def test_claim_property(verdict):
    rng = np.random.default_rng(4)
    failures = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 257))
        W = int(rng.integers(0, 17))
        a = rng.integers(-1000, 1001, size=n)
        b = a + rng.integers(-W, W + 1, size=n)
        L = int(rng.integers(1, n + 1))
        failures += not lth_smallest_close(a.tolist(), b.tolist(), W, L)
    assert verdict(4, failures == 0, f"10000 paired sequences, {failures} failures")


def test_structural_invariants(dynamic_runs, verdict):
    oks = []
    for name, s in dynamic_runs.items():
        oks.append(verdict(
            5, s["violations"] == 0 and s["budget"] == 0,
            f"{name}: {s['rebuilds']} rebuilds, {s['violations']} invariant violations, "
            f"{s['budget']} runs with |S| >= L",
        ))
    assert all(oks)


def test_dynamic_query_purity(dynamic_runs, verdict):
    oks = []
    for name, s in dynamic_runs.items():
        oks.append(verdict(6, s["impure"] == 0, f"dynamic {name}: {s['impure']} checksum changes"))
    assert all(oks)


def _schedule(kind, rng):
    if kind == "unit":
        return lambda: 1
    if kind == "random":
        return lambda: rng.randint(1, 40)
    return lambda: math.inf


def test_deamortization_equivalence(dynamic_runs, verdict):
    mismatched = mid_queries = wrong = 0
    rng = random.Random(7)
    for seed in range(10):
        for kind in ("unit", "random", "all"):
            trace = generate_trace(1200, 1000, "zipf:1.1", seed=seed)
            dm = DynamicRangeMode(ModeConfig(1000, deamortize=True, seed=seed))
            ref = NaiveMode(1000)
            for op in trace.ops:
                if op[0] != "Q":
                    apply(dm, op)
                    apply(ref, op)
            dm.start_rebuild()
            staged = dm._staged
            one_shot = Snapshot(
                list(dm.seq.handles()), dm.N, dm.T1, dm.T2, dm.T3, leaf=dm.config.leaf,
                seed=staged.seed, stamp=staged.stamp, serial=staged.serial,
            )
            budget = _schedule(kind, rng)
            while dm.rebuild_step(budget()):
                if ref.seq:
                    l = rng.randint(1, len(ref.seq))
                    r = rng.randint(l, len(ref.seq))
                    mid_queries += 1
                    wrong += dm.query(l, r)[1] != oracle_query(ref.seq, l, r)[1]
            mismatched += staged.checksum() != one_shot.checksum()
    s = dynamic_runs["deamortized"]
    ok_a = verdict(7, mismatched == 0, f"30 staged builds, {mismatched} checksum mismatches vs one-shot")
    ok_b = verdict(7, wrong == 0 and s["wrong_freq"] == 0 and s["mid_stage"] > 0,
                   f"{mid_queries + s['mid_stage']} queries during staged builds, "
                   f"{wrong + s['wrong_freq']} wrong")
    assert ok_a and ok_b


# -- 8. counting backends ----------------------------------------------------------------


def test_backend_equivalence(verdict):
    differing = 0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        W = int(rng.integers(1, 4))
        if seed % 2:
            A, B = small_instance(rng, 8, 16, 8, W)
        else:
            A, B = small_instance(rng, 16, 8, 16, W)
        direct = SmallEntriesMPQ(A, B, W, backend="direct")
        bigint = SmallEntriesMPQ(A, B, W, backend="bigint")
        differing += not np.array_equal(direct.counts, bigint.counts)
    assert verdict(8, differing == 0, f"50 instances, {differing} with differing tables")


# -- 9. bucketed query work -----------------------------------------------------------------


def test_bucketed_query_work(verdict):
    rng = np.random.default_rng(9)
    A, B = bucketed_instance(rng, 12, 64, 12, 2)
    worst = {}
    fitted = {}
    for P in (1, 2, 4, 8, 16):
        d = BucketedMPQ(A, B, 2, P)
        xs, ys = [], []
        for _ in range(1000):
            S = random_forbidden(rng, 64, 48)
            d.query(int(rng.integers(12)), int(rng.integers(12)), S)
            xs.append(len(S) + P)
            ys.append(d.last_work)
        xs, ys = np.array(xs, float), np.array(ys, float)
        worst[P] = float((ys / xs).max())
        fitted[P] = float(xs @ ys / (xs @ xs))
    ok = max(worst.values()) <= 8
    detail = ", ".join(f"P={P}: fit {fitted[P]:.2f} max {worst[P]:.2f}" for P in worst)
    assert verdict(9, ok, f"work / (|S| + P) {detail} (<= 8)")
