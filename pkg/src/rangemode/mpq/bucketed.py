"""Min-plus query-with-witness when only ``A`` has small entries.

Each column of ``B`` is cut into buckets of ``P`` consecutive ranks.  A
bucket whose values span at most ``2W`` is *small*: shifted down by its
minimum it becomes a small-entry matrix and is answered by
:class:`SmallEntriesMPQ`.  Among *large* buckets only the first two that
still hold an admissible index can contain the optimum, so those two are
scanned directly.
"""

import math

import numpy as np

from ..core import CountTree, KeyedMinTree
from ._matrix import (
    as_matrix,
    check_index,
    check_shapes,
    check_window,
    digest,
    forbidden,
    to_rows,
)
from .small import SmallEntriesMPQ

INF = math.inf


class BucketedMPQ:
    def __init__(self, A, B, W, P, staged=False):
        if W < 1:
            raise ValueError("W must be positive")
        self.A = as_matrix(A, "A")
        self.B = as_matrix(B, "B", allow_inf=False)
        check_shapes(self.A, self.B)
        check_window(self.A, W, "A")
        self.n1, self.c = self.A.shape
        self.n2 = self.B.shape[1]
        if not 1 <= P <= max(self.c, 1):
            raise ValueError(f"bucket size P={P} outside 1..{self.c}")
        self.W = int(W)
        self.P = int(P)
        self.nb = -(-self.c // self.P)
        self.work = 0
        self.last_work = 0
        self._small_trees = {}
        self._large_trees = {}
        self.steps = self._build()
        if not staged:
            for _ in self.steps:
                pass

    # -- preprocessing -----------------------------------------------------

    def _build(self):
        A, B, W, P = self.A, self.B, self.W, self.P
        n1, c, n2, nb = self.n1, self.c, self.n2, self.nb
        order = np.argsort(B, axis=0, kind="stable")  # (c, n2): k by rank
        ranked = np.take_along_axis(B, order, axis=0)
        bucket_of = np.empty((c, n2), dtype=np.int64)
        np.put_along_axis(bucket_of, order, (np.arange(c) // P)[:, None].repeat(n2, 1), axis=0)
        starts = np.arange(nb) * P
        ends = np.minimum(starts + P, c) - 1
        self.order = order
        self.bucket_of = bucket_of
        self.lo = ranked[starts].T.copy() if c else np.zeros((n2, 0))  # (n2, nb)
        self.hi = ranked[ends].T.copy() if c else np.zeros((n2, 0))
        self.small = (self.hi - self.lo) <= 2 * W
        yield 1

        finiteA = np.isfinite(A)
        self.small_best = np.full((n1, n2, nb), INF)
        self.small_arg = np.full((n1, n2, nb), -1, dtype=np.int64)
        self.large_count = np.zeros((n1, n2, nb), dtype=np.int64)
        self.D = [None] * nb
        cols = np.arange(n2)
        for ell in range(nb):
            K = order[starts[ell]:ends[ell] + 1]  # (p, n2)
            small_col = self.small[:, ell]
            sums = A[:, K] + B[K, cols][None]  # (n1, p, n2)
            best = sums.min(axis=1)
            hit = sums == best[:, None, :]
            arg = np.where(hit, K[None], c).min(axis=1)
            keep = small_col[None, :] & np.isfinite(best)
            self.small_best[:, :, ell] = np.where(keep, best, INF)
            self.small_arg[:, :, ell] = np.where(keep, arg, -1)
            self.large_count[:, :, ell] = np.where(
                small_col[None, :], 0, finiteA[:, K].sum(axis=1)
            )
            if small_col.any():
                Bl = np.full((c, n2), INF)
                js = cols[small_col]
                Ks = K[:, small_col]
                Bl[Ks, js[None]] = B[Ks, js[None]] - self.lo[js, ell][None] - W
                self.D[ell] = SmallEntriesMPQ(A, Bl, W, staged=True)
                yield from self.D[ell].steps
            yield 1

        self._Arows = to_rows(A)
        self._Brows = to_rows(B)
        self._members = [
            [order[starts[ell]:ends[ell] + 1, j].tolist() for ell in range(nb)] for j in range(n2)
        ]
        self._bucket_min = [[min(b) for b in row] for row in self._members]
        self._bucket_rows = bucket_of.tolist()
        self._lo_rows = self.lo.tolist()
        self._small_rows = self.small.tolist()

    # -- query -------------------------------------------------------------

    def _small_tree(self, i, j):
        tree = self._small_trees.get((i, j))
        if tree is None:
            vals = self.small_best[i, j]
            args = self.small_arg[i, j]
            items = {
                ell: (float(vals[ell]), int(args[ell]))
                for ell in range(self.nb)
                if args[ell] >= 0
            }
            tree = self._small_trees[(i, j)] = KeyedMinTree(items)
        return tree

    def _large_tree(self, i, j):
        tree = self._large_trees.get((i, j))
        if tree is None:
            tree = self._large_trees[(i, j)] = CountTree(self.large_count[i, j].tolist())
        return tree

    def query(self, i, j, S=()):
        """``(value, k)`` minimising ``A[i,k] + B[k,j]`` over ``k not in S``, or None.

        Ties go to the smallest ``k``.
        """
        check_index(i, j, self.n1, self.n2)
        ks = forbidden(S, self.c)
        banned = set(ks)
        arow = self._Arows[i]
        Brows = self._Brows
        bucket_row = self._bucket_rows
        small_row = self._small_rows[j]
        work = len(ks)

        hits = {}
        large_drop = {}
        for k in ks:
            ell = bucket_row[k][j]
            if small_row[ell]:
                hits.setdefault(ell, []).append(k)
            elif arow[k] != INF:
                large_drop[ell] = large_drop.get(ell, 0) + 1

        stree = self._small_tree(i, j)
        masked = []
        try:
            for ell, sub in hits.items():
                stree.mask(ell)
                value = self.D[ell].query(i, j, sub)
                if value is not None:
                    masked.append((value + self._lo_rows[j][ell] + self.W, ell))
            top = stree.min()
        finally:
            stree.rollback()
        best = top[0] if top is not None else None

        ltree = self._large_tree(i, j)
        try:
            for ell, drop in large_drop.items():
                ltree.add(ell, -drop)
            scan = ltree.first_two_nonzero()
        finally:
            ltree.rollback()
        members = self._members[j]
        for ell in scan:
            for k in members[ell]:
                work += 1
                a = arow[k]
                if a != INF and k not in banned:
                    cand = (a + Brows[k][j], k)
                    if best is None or cand < best:
                        best = cand

        for value, ell in sorted(masked):
            if best is not None and value > best[0]:
                break
            if best is not None and value == best[0] and self._bucket_min[j][ell] > best[1]:
                continue
            for k in members[ell]:
                work += 1
                a = arow[k]
                if a != INF and k not in banned and a + Brows[k][j] == value:
                    if best is None or (value, k) < best:
                        best = (value, k)

        self.last_work = work
        self.work += work
        if best is None:
            return None
        return int(best[0]), int(best[1])

    # -- diagnostics -------------------------------------------------------

    def bucket(self, j, ell):
        return list(self._members[j][ell])

    def self_check(self):
        """List violations of the bucket metadata and the two-bucket argument.

        Checks that ``lo``/``hi``/``small`` describe the stored buckets and
        that for large buckets ``l1 < l2 < l3`` of one column every finite
        candidate of ``l1`` sits at most at ``W + lo[l2]`` while every
        candidate of ``l3`` sits at least at ``hi[l2] - W``, with the strict
        gap of a large bucket in between.
        """
        violations = []
        W = self.W
        for j in range(self.n2):
            members = self._members[j]
            for ell in range(self.nb):
                vals = [self._Brows[k][j] for k in members[ell]]
                if min(vals) != self.lo[j, ell] or max(vals) != self.hi[j, ell]:
                    violations.append(("bounds", j, ell))
                if bool(self.small[j, ell]) != (self.hi[j, ell] - self.lo[j, ell] <= 2 * W):
                    violations.append(("class", j, ell))
            large = [ell for ell in range(self.nb) if not self.small[j, ell]]
            for l2 in large[1:-1]:
                if not self.lo[j, l2] < self.hi[j, l2] - 2 * W:
                    violations.append(("gap", j, l2))
            for i in range(self.n1):
                arow = self._Arows[i]
                top, bottom = {}, {}
                for ell in large:
                    sums = [arow[k] + self._Brows[k][j] for k in members[ell] if arow[k] != INF]
                    if sums:
                        top[ell], bottom[ell] = max(sums), min(sums)
                for a, l1 in enumerate(large):
                    if l1 not in top:
                        continue
                    for b in range(a + 1, len(large) - 1):
                        l2 = large[b]
                        lo2, hi2 = self.lo[j, l2], self.hi[j, l2]
                        if top[l1] > W + lo2:
                            violations.append(("upper", i, j, l1, l2))
                        for l3 in large[b + 1:]:
                            if l3 in bottom and bottom[l3] < hi2 - W:
                                violations.append(("lower", i, j, l2, l3))
                            if l3 in bottom and not top[l1] < bottom[l3]:
                                violations.append(("dominance", i, j, l1, l3))
        return violations

    def checksum(self):
        stale = sum(1 for t in self._small_trees.values() if t.dirty)
        stale += sum(1 for t in self._large_trees.values() if t.dirty)
        for (i, j), t in self._large_trees.items():
            if list(t.counts) != self.large_count[i, j].tolist():
                stale += 1
        inner = [d.checksum() if d is not None else None for d in self.D]
        return digest(
            self.W, self.P, self.A, self.B, self.lo, self.hi,
            self.small_best, self.small_arg, self.large_count, inner, stale,
        )
