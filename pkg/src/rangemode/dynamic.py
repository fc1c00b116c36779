"""Dynamic range mode: insertions, deletions and most-frequent-value range queries.

A query combines four candidate sources:

1. windowed pair trees: ``pairs[k]`` holds ``(i_x, i_{x+k-1})`` for the
   occurrences of every value, so the largest ``k`` with a pair inside the
   range is the mode frequency whenever it is at most ``K = ceil(N / T1)``;
2. values touched since the last rebuild, recounted directly;
3. elements near the split point of a snapshot node, scanned;
4. values that were frequent at the last rebuild and are untouched since,
   answered by a min-plus query over per-segment prefix counts.

The snapshot is rebuilt once enough values have been modified.  With
``deamortize`` the next snapshot is built a few work units per update while
the previous one keeps serving queries.
"""

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .core import OccurrenceTree, OrderTree, PairTree
from .errors import CapacityError
from .exponents import DEFAULT_T2, derived_sizes, default_omega
from .mpq._matrix import digest
from .mpq.monotone import MonotoneMPQ

ALL_SOURCES = frozenset({1, 2, 3, 4})


@dataclass(frozen=True)
class ModeConfig:
    N: int
    t1: float = None
    t2: float = DEFAULT_T2
    t3: float = None
    deamortize: bool = False
    seed: int = 0
    leaf: int = 16

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("capacity N must be positive")
        if self.t1 is None:
            object.__setattr__(self, "t1", 1 - self.t2 / 2)
        if self.t3 is None:
            object.__setattr__(self, "t3", self.t2)
        for name in ("t1", "t2", "t3"):
            t = getattr(self, name)
            if not 0 <= t <= 1:
                raise ValueError(f"{name}={t} outside [0, 1]")
        if self.leaf < 2:
            raise ValueError("leaf size must be at least 2")

    @property
    def sizes(self):
        return derived_sizes(self.N, self.t1, self.t2, self.t3)


# -- snapshot ------------------------------------------------------------------


class _Node:
    __slots__ = (
        "lo", "mid", "hi", "left", "right", "mid_handle",
        "starts", "ends", "start_idx", "end_idx", "A", "B", "mpq", "seed",
    )

    def __init__(self, lo, mid, hi):
        self.lo, self.mid, self.hi = lo, mid, hi
        self.left = self.right = None
        self.mpq = None


class Snapshot:
    """Static structure over the sequence as it was at capture time.

    ``handles`` is the captured element list; frequent values are those with
    more than ``N / T1`` occurrences in it.  The hierarchy halves the list
    recursively down to ``leaf`` elements; each node cuts both halves into
    segments of at most ``T3`` elements starting at its midpoint.
    """

    def __init__(self, handles, N, T1, T2, T3, leaf=16, seed=0, stamp=0, serial=0,
                 omega_fn=default_omega, staged=False):
        self.handles = handles
        self.N, self.T1, self.T2, self.T3 = N, T1, T2, T3
        self.leaf = leaf
        self.seed = seed
        self.stamp = stamp
        self.serial = serial
        self.omega_fn = omega_fn
        self.violations = []
        values = [h.value for h in handles]
        counts = Counter(values)
        self.frequent = sorted(v for v, n in counts.items() if n > N / T1)
        self.column = {v: k for k, v in enumerate(self.frequent)}
        self.codes = np.array([self.column.get(v, -1) for v in values], dtype=np.int64)
        self.index = None
        self.root = None
        self.nodes = []
        if self.frequent:
            self.root = self._plan(0, len(handles))
        self.units = 0
        self._pending = list(self.nodes)
        self.steps = self._build()
        if not staged:
            for _ in self.steps:
                pass

    def _plan(self, lo, hi):
        if hi - lo <= self.leaf:
            return None
        mid = (lo + hi) // 2
        node = _Node(lo, mid, hi)
        node.seed = self.seed * 1000003 + len(self.nodes)
        self.nodes.append(node)
        node.left = self._plan(lo, mid)
        node.right = self._plan(mid, hi)
        return node

    @property
    def remaining(self):
        return len(self._pending)

    @property
    def done(self):
        return not self._pending

    def _build(self):
        for node in list(self._pending):
            for unit in self._build_node(node):
                self.units += 1
                yield unit
            self._pending.pop(0)
            self.units += 1
            yield 1

    def _build_node(self, node):
        H, T3, F = self.handles, self.T3, len(self.frequent)
        lo, mid, hi = node.lo, node.mid, node.hi
        node.mid_handle = H[mid]
        m_left = -(-(mid - lo) // T3)
        m_right = -(-(hi - mid) // T3)
        node.start_idx = [max(lo, mid - x * T3) for x in range(1, m_left + 1)]
        node.end_idx = [min(hi, mid + y * T3) - 1 for y in range(1, m_right + 1)]
        node.starts = [H[i] for i in node.start_idx]
        node.ends = [H[i] for i in node.end_idx]

        codes = self.codes[lo:mid]
        seg = (mid - 1 - np.arange(lo, mid)) // T3
        ok = codes >= 0
        left = np.bincount(seg[ok] * F + codes[ok], minlength=m_left * F).reshape(m_left, F)
        codes = self.codes[mid:hi]
        seg = np.arange(hi - mid) // T3
        ok = codes >= 0
        right = np.bincount(seg[ok] * F + codes[ok], minlength=m_right * F).reshape(m_right, F)

        A = np.zeros((m_left + 1, F))
        A[1:] = -np.cumsum(left, axis=0)
        B = np.zeros((F, m_right + 1))
        B[:, 1:] = -np.cumsum(right, axis=0).T
        node.A, node.B = A, B
        self._validate(node)
        yield 1
        mpq = MonotoneMPQ(A, B, self.T2, self.T3, omega_fn=self.omega_fn, seed=node.seed, staged=True)
        yield from mpq.steps
        for b, rows in mpq.clipped.items():
            if len(rows) > mpq.delta * mpq.D / mpq.W:
                self.violations.append(("clipped", node.mid, b))
        node.mpq = mpq

    def _validate(self, node):
        B = node.B
        if B.shape[1] > 1:
            if (np.diff(B, axis=1) > 0).any():
                self.violations.append(("monotone", node.mid))
            if (-np.diff(B.sum(axis=0)) > self.T3).any():
                self.violations.append(("drop", node.mid))

    def finish(self):
        for _ in self.steps:
            pass

    def step(self, budget):
        """Advance by at most ``budget`` work units; return the number of unbuilt nodes."""
        if budget == math.inf:
            self.finish()
            return 0
        for _ in range(int(budget)):
            if next(self.steps, None) is None:
                break
        return self.remaining

    def index_of(self, handle):
        if self.index is None:
            self.index = {h: i for i, h in enumerate(self.handles)}
        return self.index.get(handle)

    def checksum(self):
        parts = [self.N, self.T1, self.T2, self.T3, self.leaf, self.seed,
                 [h.serial for h in self.handles], self.frequent]
        for node in self.nodes:
            parts.append((node.lo, node.mid, node.hi))
            if node.mpq is not None:
                parts.extend([node.A, node.B, node.mpq.checksum()])
        return digest(*parts)


# -- dynamic structure ---------------------------------------------------------


class DynamicRangeMode:
    """Sequence of unsigned integers supporting insert, delete and range-mode queries.

    Positions are 1-based.  ``query(l, r)`` returns ``(value, frequency)``;
    among several modes the smallest value found is returned.
    """

    def __init__(self, config, omega_fn=default_omega, debug=False):
        self.config = config
        self.N = config.N
        self.T1, self.T2, self.T3 = config.sizes
        self.K = -(-self.N // self.T1)
        self.omega_fn = omega_fn
        self.debug = debug
        self.sources = ALL_SOURCES
        self.seq = OrderTree()
        pos = self.seq.before
        self.occ = {}
        self.pairs = [PairTree(pos) for _ in range(self.K)]
        self.modified = set()
        self.ops = 0
        self.clock = 0
        self.rebuilds = 0
        self.violations = []
        self.max_forbidden = 0
        self._tombs = []  # (kill stamp, handle)
        self._staged = None
        self._staged_modified = None
        self._last_units = 1
        self.snapshot = self._capture(staged=False)

    def __len__(self):
        return len(self.seq)

    def values(self):
        return list(self.seq)

    # -- updates ---------------------------------------------------------------

    def insert(self, pos, value):
        if len(self.seq) >= self.N:
            raise CapacityError(f"sequence already holds N = {self.N} elements")
        handle = self.seq.insert(pos, value)
        tree = self.occ.get(value)
        if tree is None:
            tree = self.occ[value] = OccurrenceTree(self.seq.before)
        q = tree.insert(handle)
        window = tree.window(q - self.K + 1, q + self.K - 1)
        self._restitch([h for h in window if h is not handle], window)
        self._touched(value)

    def delete(self, pos):
        n = len(self.seq)
        if n == 0:
            raise IndexError("delete from an empty sequence")
        if not 1 <= pos <= n:
            raise IndexError(f"delete position {pos} outside 1..{n}")
        handle = self.seq.select(pos)
        value = handle.value
        tree = self.occ[value]
        q = tree.index_of(handle)
        window = tree.window(q - self.K + 1, q + self.K - 1)
        self._restitch(window, [h for h in window if h is not handle])
        tree.remove(handle)
        if not len(tree):
            del self.occ[value]
        self._retire(handle)
        self._touched(value)

    def _retire(self, handle):
        newest = self.snapshot.serial
        if self._staged is not None:
            newest = max(newest, self._staged.serial)
        if handle.serial >= newest:
            self.seq.remove(handle)
        else:
            self.seq.kill(handle)
            self._tombs.append((self.clock, handle))

    def _restitch(self, old, new):
        """Replace the windowed pairs of ``old`` occurrences by those of ``new``."""
        before = _window_pairs(old, self.K)
        after = _window_pairs(new, self.K)
        pairs = self.pairs
        for key in before:
            if key not in after:
                pairs[key[0] - 1].remove(key[1])
        for key, second in after.items():
            prev = before.get(key)
            if prev is None:
                pairs[key[0] - 1].insert(key[1], second)
            elif prev is not second:
                pairs[key[0] - 1].update(key[1], second)

    def _touched(self, value):
        self.ops += 1
        self.clock += 1
        self.modified.add(value)
        if self._staged is not None:
            self._staged_modified.add(value)
        if self.config.deamortize:
            self._advance_staged()
        elif len(self.modified) >= self.T2 or self.ops >= self.T2:
            self.rebuild()

    # -- rebuilding ------------------------------------------------------------

    def _capture(self, staged):
        snap = Snapshot(
            list(self.seq.handles()),
            self.N, self.T1, self.T2, self.T3, leaf=self.config.leaf,
            seed=self.config.seed * 7919 + self.rebuilds, stamp=self.clock,
            serial=self.seq.next_serial, omega_fn=self.omega_fn, staged=staged,
        )
        return snap

    def _install(self, snap, modified):
        self.snapshot = snap
        self.modified = modified
        self.ops = len(modified)
        self.rebuilds += 1
        self._last_units = max(1, snap.units)
        self.violations.extend(snap.violations)
        keep = []
        for stamp, handle in self._tombs:
            if stamp < snap.stamp:
                self.seq.remove(handle)
            else:
                keep.append((stamp, handle))
        self._tombs = keep

    def rebuild(self):
        """Build a fresh snapshot now, discarding any staged one."""
        self._staged = None
        self._staged_modified = None
        snap = self._capture(staged=False)
        self._install(snap, set())

    def start_rebuild(self):
        """Capture the sequence and begin a staged build of the next snapshot."""
        self._staged = self._capture(staged=True)
        self._staged_modified = set()

    def rebuild_step(self, budget):
        """Advance the staged build by at most ``budget`` units; return nodes left.

        When the build completes it replaces the active snapshot.
        """
        if not self.config.deamortize:
            raise RuntimeError("rebuild_step needs a deamortized configuration")
        if self._staged is None:
            self.start_rebuild()
        left = self._staged.step(budget)
        if self._staged.done:
            self._staged.finish()
            snap, modified = self._staged, self._staged_modified
            self._staged = self._staged_modified = None
            self._install(snap, modified)
            return 0
        return left

    @property
    def staging(self):
        return self._staged is not None

    def _advance_staged(self):
        half = max(1, self.T2 // 2)
        if self._staged is None:
            if len(self.modified) >= self.T2:
                self.rebuild()
                return
            if len(self.modified) < half and self.ops < half:
                return
            self.start_rebuild()
        if len(self.modified) >= self.T2:
            self.rebuild_step(math.inf)
            return
        budget = -(-2 * self._last_units // half) + 1
        self.rebuild_step(budget)

    # -- queries ---------------------------------------------------------------

    def query(self, l, r):
        n = len(self.seq)
        if n == 0:
            raise IndexError("query on an empty sequence")
        if not 1 <= l <= r <= n:
            raise IndexError(f"range [{l}, {r}] outside 1..{n}")
        best = None

        def offer(value, freq):
            nonlocal best
            if best is None or freq > best[1] or (freq == best[1] and value < best[0]):
                best = (value, freq)

        sources = self.sources
        if 1 in sources:
            found = self._infrequent(l, r)
            if found is not None:
                offer(*found)
        if 2 in sources:
            for value in self.modified:
                tree = self.occ.get(value)
                if tree is not None:
                    freq = tree.count_in_range(l, r)
                    if freq:
                        offer(value, freq)
        if 3 in sources or 4 in sources:
            for value, freq in self._snapshot_candidates(l, r, sources):
                offer(value, freq)
        return best

    def _infrequent(self, l, r):
        lo_pos, hi_pos = l - 1, r - 1
        pairs = self.pairs
        lo, hi = 1, self.K
        found = pairs[0].find_within(lo_pos, hi_pos)
        if found is None:
            return None
        while lo < hi:
            k = (lo + hi + 1) // 2
            hit = pairs[k - 1].find_within(lo_pos, hi_pos)
            if hit is not None:
                lo, found = k, hit
            else:
                hi = k - 1
        value = found[0].value
        if lo < self.K:
            return value, lo
        return value, self.occ[value].count_in_range(l, r)

    def _snapshot_candidates(self, l, r, sources):
        snap = self.snapshot
        before = self.seq.before
        node = snap.root
        if not snap.frequent:
            return []
        while node is not None:
            p = before(node.mid_handle)
            if r <= p:
                node = node.left
            elif l > p:
                node = node.right
            else:
                break
        if node is None:
            if 3 not in sources:
                return []
            counts = Counter(self.seq.values(l, r))
            top = max(counts.values())
            return [(min(v for v, c in counts.items() if c == top), top)]

        starts, ends = node.starts, node.ends
        # largest i with P_1..P_i inside [l, r]
        a, b = 0, len(starts)
        while a < b:
            x = (a + b + 1) // 2
            if before(starts[x - 1]) + 1 >= l:
                a = x
            else:
                b = x - 1
        i = a
        a, b = 0, len(ends)
        while a < b:
            y = (a + b + 1) // 2
            e = ends[y - 1]
            if before(e) + e.live <= r:
                a = y
            else:
                b = y - 1
        j = a
        left_hi = before(starts[i - 1]) if i else p
        right_lo = before(ends[j - 1]) + ends[j - 1].live + 1 if j else p + 1

        out = []
        if 3 in sources:
            seen = set()
            for lo_rank, hi_rank in ((l, left_hi), (right_lo, r)):
                if lo_rank <= hi_rank:
                    seen.update(self.seq.values(lo_rank, hi_rank))
            for value in seen:
                out.append((value, self.occ[value].count_in_range(l, r)))
        if self.debug:
            self._account(node, snap, l, r, i, j, left_hi, right_lo)
        if 4 in sources and (i or j):
            S = sorted(snap.column[v] for v in self.modified if v in snap.column)
            self.max_forbidden = max(self.max_forbidden, len(S))
            if len(S) >= node.mpq.L:
                self.violations.append(("budget", len(S), node.mpq.L))
            res = node.mpq.query(i, j, S)
            if res is not None and res[0] < 0:
                value = snap.frequent[res[1]]
                tree = self.occ.get(value)
                if tree is not None:
                    out.append((value, tree.count_in_range(l, r)))
        return out

    def _account(self, node, snap, l, r, i, j, left_hi, right_lo):
        """Check that every element of [l, r] is scanned or in a covered segment."""
        scanned = max(0, left_hi - l + 1) + max(0, r - right_lo + 1)
        covered = right_lo - 1 - left_hi
        if scanned + covered != r - l + 1:
            self.violations.append(("accounting", l, r))
        first = node.start_idx[i - 1] if i else node.mid
        last = node.end_idx[j - 1] if j else node.mid - 1
        if covered:
            for h in self.seq.handles(left_hi + 1, right_lo - 1):
                if h.serial >= snap.serial:
                    if h.value not in self.modified:
                        self.violations.append(("unseen", h.value))
                    continue
                idx = snap.index_of(h)
                if idx is None or not first <= idx <= last:
                    self.violations.append(("covered", l, r, idx))

    # -- diagnostics -----------------------------------------------------------

    def pair_set(self, k):
        """Windowed pairs of ``pairs[k]`` as (rank, rank) tuples."""
        rank = self.seq.rank
        return sorted((rank(a), rank(b)) for a, b in self.pairs[k - 1])

    def checksum(self):
        """Digest of the observable state; queries must leave it unchanged."""
        snap = self.snapshot
        stale = 0
        for node in snap.nodes:
            if node.mpq is not None:
                stale += _stale(node.mpq)
        return digest(
            list(self.seq), self.seq.tombstones, sorted(self.modified), self.ops,
            [len(p) for p in self.pairs], len(self.occ), snap.serial, snap.stamp,
            snap.frequent, stale, self.staging,
        )


def _stale(mpq):
    count = sum(1 for t in mpq._trees.values() if t.dirty)
    for inner in mpq.inner.inner:
        count += sum(1 for t in inner._small_trees.values() if t.dirty)
        count += sum(1 for t in inner._large_trees.values() if t.dirty)
        for d in inner.D:
            if d is not None:
                count += sum(1 for t in d._trees.values() if t.dirty)
    return count


def _window_pairs(items, K):
    out = {}
    n = len(items)
    for k in range(1, min(K, n) + 1):
        for x in range(n - k + 1):
            out[(k, items[x])] = items[x + k - 1]
    return out
