"""Trace replay, oracle verification and benchmarking."""

import csv
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..dynamic import DynamicRangeMode, ModeConfig
from .oracle import oracle_query
from .trace import generate_trace

IMPLS = ("naive", "mpq")
CSV_FIELDS = [
    "n_ops", "N", "t1", "t2", "t3", "impl", "op_type",
    "count", "mean_ns", "p50_ns", "p95_ns", "total_ms",
]
OP_NAMES = {"I": "insert", "D": "delete", "Q": "query"}


class NaiveMode:
    """Plain list with a full recount per query."""

    def __init__(self, N):
        self.N = N
        self.seq = []

    def __len__(self):
        return len(self.seq)

    def insert(self, pos, value):
        if len(self.seq) >= self.N:
            raise OverflowError("capacity exceeded")
        if not 1 <= pos <= len(self.seq) + 1:
            raise IndexError(pos)
        self.seq.insert(pos - 1, value)

    def delete(self, pos):
        if not 1 <= pos <= len(self.seq):
            raise IndexError(pos)
        del self.seq[pos - 1]

    def query(self, l, r):
        return oracle_query(self.seq, l, r)


def make_impl(impl, N, t1=None, t2=None, t3=None, deamortize=False, seed=0, debug=False):
    if impl == "naive":
        return NaiveMode(N)
    if impl == "mpq":
        kwargs = {k: v for k, v in (("t1", t1), ("t2", t2), ("t3", t3)) if v is not None}
        return DynamicRangeMode(ModeConfig(N, deamortize=deamortize, seed=seed, **kwargs), debug=debug)
    raise ValueError(f"unknown implementation {impl!r}; choose from {', '.join(IMPLS)}")


def apply(ds, op):
    kind = op[0]
    if kind == "I":
        ds.insert(op[1], op[2])
    elif kind == "D":
        ds.delete(op[1])
    else:
        return ds.query(op[1], op[2])
    return None


@dataclass
class BenchRecord:
    impl: str
    op_type: str
    count: int
    mean_ns: float
    p50_ns: float
    p95_ns: float
    total_ms: float
    config: dict = field(default_factory=dict)

    def row(self, n_ops):
        c = self.config
        return {
            "n_ops": n_ops, "N": c.get("N"), "t1": c.get("t1"), "t2": c.get("t2"),
            "t3": c.get("t3"), "impl": self.impl, "op_type": self.op_type,
            "count": self.count, "mean_ns": round(self.mean_ns, 1),
            "p50_ns": round(self.p50_ns, 1), "p95_ns": round(self.p95_ns, 1),
            "total_ms": round(self.total_ms, 3),
        }


def summarize(impl, timings, config):
    records = []
    for kind in "IDQ":
        ns = timings.get(kind, [])
        if not ns:
            continue
        arr = np.array(ns, dtype=np.float64)
        records.append(BenchRecord(
            impl, OP_NAMES[kind], len(ns), float(arr.mean()),
            float(np.percentile(arr, 50)), float(np.percentile(arr, 95)),
            float(arr.sum() / 1e6), dict(config),
        ))
    return records


def _config_of(ds, N):
    if isinstance(ds, DynamicRangeMode):
        c = ds.config
        return {"N": N, "t1": c.t1, "t2": c.t2, "t3": c.t3}
    return {"N": N, "t1": "", "t2": "", "t3": ""}


def run_trace(trace, impl="mpq", **kwargs):
    """Replay ``trace``; return the query answers and per-op-type timing records."""
    ds = make_impl(impl, trace.N, seed=kwargs.pop("seed", trace.seed), **kwargs)
    answers = []
    timings = {}
    clock = time.perf_counter_ns
    for op in trace.ops:
        start = clock()
        out = apply(ds, op)
        timings.setdefault(op[0], []).append(clock() - start)
        if out is not None:
            answers.append(out)
    return answers, summarize(impl, timings, _config_of(ds, trace.N))


@dataclass
class Report:
    ok: bool
    queries: int = 0
    divergence: dict = None

    def describe(self):
        if self.ok:
            return f"pass ({self.queries} queries)"
        d = self.divergence
        return (
            f"divergence at op {d['index']} {d['op']}: expected frequency {d['expected']}, "
            f"got {d['got']}; seed={d['seed']} N={d['N']} config={d['config']}"
        )


def verify(trace, t1=None, t2=None, t3=None, deamortize=False, check_purity=False, debug=False):
    """Replay ``trace`` on the structure and the naive reference side by side.

    Frequencies must match; the returned value must recount to that
    frequency.  Returns a :class:`Report` with the first divergence.
    """
    ds = make_impl("mpq", trace.N, t1, t2, t3, deamortize, trace.seed, debug=debug)
    ref = NaiveMode(trace.N)
    config = {"t1": ds.config.t1, "t2": ds.config.t2, "t3": ds.config.t3, "deamortize": deamortize}
    queries = 0

    def fail(index, op, expected, got, reason):
        return Report(False, queries, {
            "index": index, "op": op, "expected": expected, "got": got, "reason": reason,
            "seed": trace.seed, "N": trace.N, "config": config, "prefix": trace.ops[: index + 1],
        })

    for index, op in enumerate(trace.ops):
        if op[0] != "Q":
            apply(ds, op)
            apply(ref, op)
            continue
        queries += 1
        before = ds.checksum() if check_purity else None
        got = ds.query(op[1], op[2])
        if check_purity and ds.checksum() != before:
            return fail(index, op, None, got, "query changed the structure")
        expected = ref.query(op[1], op[2])
        if got[1] != expected[1]:
            return fail(index, op, expected, got, "frequency")
        recount = Counter(ref.seq[op[1] - 1: op[2]])[got[0]]
        if recount != got[1]:
            return fail(index, op, expected, got, "value does not recount")
    if ds.violations:
        return fail(len(trace.ops) - 1, None, None, ds.violations[:5], "invariant")
    return Report(True, queries)


def verify_seeds(n_ops, N, seeds, dist="zipf:1.1", mix=(0.5, 0.2, 0.3), **kwargs):
    """Verify generated traces for each seed; stop at the first failure."""
    reports = []
    for seed in seeds:
        trace = generate_trace(n_ops, N, dist, mix, seed)
        report = verify(trace, **kwargs)
        reports.append((seed, report))
        if not report.ok:
            break
    return reports


def bench(n_ops, N, impls=IMPLS, seed=0, dist="zipf:1.1", mix=(0.5, 0.2, 0.3),
          repeats=1, warmup=1, **kwargs):
    """Benchmark each implementation on one generated trace; returns CSV rows."""
    trace = generate_trace(n_ops, N, dist, mix, seed)
    rows = []
    for impl in impls:
        make_impl(impl, N, **kwargs)  # reject unknown ids before timing anything
        for _ in range(warmup):
            run_trace(trace, impl, **kwargs)
        merged = {}
        for _ in range(repeats):
            _, records = run_trace(trace, impl, **kwargs)
            for rec in records:
                best = merged.get(rec.op_type)
                if best is None or rec.total_ms < best.total_ms:
                    merged[rec.op_type] = rec
        rows.extend(rec.row(n_ops) for rec in merged.values())
    return rows


def write_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
