import math
import random

import pytest

from rangemode.dynamic import DynamicRangeMode, ModeConfig, Snapshot
from rangemode.errors import CapacityError
from rangemode.harness.oracle import oracle_query
from rangemode.harness.runner import verify
from rangemode.harness.trace import generate_trace


def build(values, **kw):
    dm = DynamicRangeMode(ModeConfig(kw.pop("N", 100), **kw))
    for v in values:
        dm.insert(len(dm) + 1, v)
    return dm


def replay(dm, ops, ref, rng):
    """Random ops against ``dm`` and the list ``ref``; checks every query."""
    for _ in range(ops):
        u = rng.random()
        if (u < 0.5 or not ref) and len(ref) < dm.N:
            pos = rng.randint(1, len(ref) + 1)
            value = rng.choice([1, 1, 1, 2, 2, 3, 4, 5, rng.randint(6, 40)])
            dm.insert(pos, value)
            ref.insert(pos - 1, value)
        elif u < 0.7 and ref:
            pos = rng.randint(1, len(ref))
            dm.delete(pos)
            del ref[pos - 1]
        elif ref:
            l = rng.randint(1, len(ref))
            r = rng.randint(l, len(ref))
            value, freq = dm.query(l, r)
            assert freq == oracle_query(ref, l, r)[1]
            assert ref[l - 1:r].count(value) == freq


def test_config_defaults():
    cfg = ModeConfig(1000)
    assert cfg.t2 == pytest.approx(0.655994)
    assert cfg.t1 == pytest.approx(1 - cfg.t2 / 2)
    assert cfg.t3 == cfg.t2
    T1, T2, T3 = cfg.sizes
    assert (T1, T2, T3) == tuple(math.ceil(1000 ** t) for t in (cfg.t1, cfg.t2, cfg.t3))
    with pytest.raises(ValueError):
        ModeConfig(10, t2=1.5)


def test_worked_example():
    dm = build([1, 2, 1, 3, 1, 2])
    assert dm.query(1, 6) == (1, 3)
    assert dm.query(3, 3) == (1, 1)
    value, freq = dm.query(2, 4)
    assert freq == 1 and value in {1, 2, 3}


def test_occurrences_and_pairs():
    dm = build([1, 2, 1, 3, 1, 2])
    ranks = [dm.seq.rank(h) for h in dm.occ[1]]
    assert ranks == [1, 3, 5]
    assert (1, 3) in dm.pair_set(2)


def test_delete_edge_removes_pairs():
    dm = build([1, 2, 1])
    dm.delete(3)
    assert len(dm.occ[1]) == 1
    assert dm.pair_set(2) == []
    dm.delete(1)
    assert 1 not in dm.occ
    assert dm.query(1, 1) == (2, 1)


def test_delete_then_reinsert():
    dm = build([4, 4, 5, 4, 6])
    dm.delete(2)
    dm.insert(2, 4)
    assert dm.query(1, 5) == (4, 3)
    assert dm.query(2, 3) == (4, 1)


def test_errors():
    dm = build([1, 2], N=2)
    with pytest.raises(CapacityError):
        dm.insert(1, 3)
    with pytest.raises(IndexError):
        dm.delete(3)
    with pytest.raises(IndexError):
        dm.query(2, 1)
    empty = DynamicRangeMode(ModeConfig(5))
    with pytest.raises(IndexError):
        empty.delete(1)
    with pytest.raises(IndexError):
        empty.query(1, 1)
    with pytest.raises(RuntimeError):
        empty.rebuild_step(1)


def test_empty_rebuild():
    dm = DynamicRangeMode(ModeConfig(10))
    dm.rebuild()
    assert dm.snapshot.root is None
    dm.insert(1, 7)
    assert dm.query(1, 1) == (7, 1)


def test_pairs_match_definition():
    rng = random.Random(3)
    dm = DynamicRangeMode(ModeConfig(300))
    ref = []
    replay(dm, 800, ref, rng)
    for k in range(1, dm.K + 1):
        want = []
        for value in set(ref):
            pos = [i + 1 for i, v in enumerate(ref) if v == value]
            want.extend((pos[x], pos[x + k - 1]) for x in range(len(pos) - k + 1))
        assert dm.pair_set(k) == sorted(want)


CONFIGS = [
    {},
    {"t3": 0.0},
    {"t3": 1.0},
    {"deamortize": True},
    {"t1": 0.5, "t2": 0.3},
    {"t2": 0.9, "leaf": 4},
]


@pytest.mark.parametrize("kw", CONFIGS)
def test_random_ops_match_oracle(kw):
    rng = random.Random(len(kw))
    dm = DynamicRangeMode(ModeConfig(400, **kw), debug=True)
    replay(dm, 2000, [], rng)
    assert dm.violations == []
    assert dm.rebuilds > 1


def test_frequent_value_deleted_everywhere():
    values = [1] * 40 + [2] * 30 + list(range(3, 33))
    random.Random(1).shuffle(values)
    dm = build(values, N=200)
    dm.rebuild()
    assert 1 in dm.snapshot.frequent
    ref = list(values)
    while 1 in ref:
        pos = ref.index(1) + 1
        dm.delete(pos)
        del ref[pos - 1]
    for l, r in [(1, len(ref)), (5, 60), (30, 31)]:
        assert dm.query(l, r)[1] == oracle_query(ref, l, r)[1]


def test_rebuild_does_not_change_answers():
    rng = random.Random(5)
    dm = DynamicRangeMode(ModeConfig(300))
    ref = []
    replay(dm, 500, ref, rng)
    ranges = [(l, rng.randint(l, len(ref))) for l in (rng.randint(1, len(ref)) for _ in range(40))]
    before = [dm.query(l, r) for l, r in ranges]
    dm.rebuild()
    assert [dm.query(l, r) for l, r in ranges] == before


def test_snapshot_matrices_valid():
    rng = random.Random(6)
    dm = DynamicRangeMode(ModeConfig(600, t3=0.4))
    replay(dm, 1200, [], rng)
    dm.rebuild()
    assert dm.snapshot.nodes
    for node in dm.snapshot.nodes:
        B = node.B
        for k in range(B.shape[0]):
            assert all(B[k, j] >= B[k, j + 1] for j in range(B.shape[1] - 1))
        sums = B.sum(axis=0)
        assert all(sums[j] - sums[j + 1] <= dm.T3 for j in range(B.shape[1] - 1))
    assert dm.violations == []


def test_infrequent_path_alone():
    rng = random.Random(8)
    dm = DynamicRangeMode(ModeConfig(500))
    ref = []
    replay(dm, 1500, ref, rng)
    dm.sources = frozenset({1})
    checked = 0
    for _ in range(300):
        l = rng.randint(1, len(ref))
        r = rng.randint(l, min(len(ref), l + 60))
        want = oracle_query(ref, l, r)[1]
        if want <= dm.K:
            assert dm.query(l, r)[1] == want
            checked += 1
    assert checked > 100


def test_queries_are_pure():
    rng = random.Random(9)
    dm = DynamicRangeMode(ModeConfig(300))
    ref = []
    replay(dm, 600, ref, rng)
    deep = dm.snapshot.checksum()
    state = dm.checksum()
    for _ in range(200):
        l = rng.randint(1, len(ref))
        dm.query(l, rng.randint(l, len(ref)))
    assert dm.checksum() == state
    assert dm.snapshot.checksum() == deep


@pytest.mark.parametrize("budget", [1, 3, 17, math.inf])
def test_staged_snapshot_equals_one_shot(budget):
    rng = random.Random(10)
    dm = DynamicRangeMode(ModeConfig(400, deamortize=True))
    replay(dm, 700, [], rng)
    dm.start_rebuild()
    staged = dm._staged
    handles = list(dm.seq.handles())
    one_shot = Snapshot(
        handles, dm.N, dm.T1, dm.T2, dm.T3, leaf=dm.config.leaf, seed=staged.seed,
        stamp=staged.stamp, serial=staged.serial,
    )
    calls = 0
    while dm.rebuild_step(budget):
        calls += 1
    assert dm.snapshot is staged
    assert staged.checksum() == one_shot.checksum()
    if budget == math.inf:
        assert calls == 0


def test_queries_during_staged_rebuild():
    rng = random.Random(11)
    dm = DynamicRangeMode(ModeConfig(400, deamortize=True))
    ref = []
    replay(dm, 600, ref, rng)
    dm.start_rebuild()
    dm.rebuild_step(2)
    assert dm.staging
    replay(dm, 30, ref, rng)
    for _ in range(50):
        l = rng.randint(1, len(ref))
        r = rng.randint(l, len(ref))
        assert dm.query(l, r)[1] == oracle_query(ref, l, r)[1]


def test_deamortized_never_blocks_long():
    rng = random.Random(12)
    dm = DynamicRangeMode(ModeConfig(600, deamortize=True))
    staged_ops = 0
    for _ in range(600):
        dm.insert(rng.randint(1, len(dm) + 1), rng.randint(0, 4))
        staged_ops += dm.staging
    assert dm.rebuilds > 3
    assert staged_ops > 0
    assert len(dm.modified) < dm.T2


@pytest.mark.parametrize("seed", range(3))
def test_verify_generated(seed):
    trace = generate_trace(1500, 300, "zipf:1.1", seed=seed)
    report = verify(trace, check_purity=True, debug=True)
    assert report.ok, report.describe()
