"""Min-plus query-with-witness for ``B`` with non-increasing rows.

Rows of ``B`` fall from left to right and the column sums fall by at most
``D`` per step.  Inside a column block of width ``delta`` only a few rows can
drop by more than ``W = delta**2``; those rows are replaced by a large
sentinel ``M`` for the whole block, which leaves a bounded-difference matrix
for :class:`BoundedDiffMPQ`.  The true sums of the replaced rows are kept in
small per-cell minimum trees.
"""

import math

import numpy as np

from ..core import KeyedMinTree
from ..errors import DropBoundError, MonotonicityError, PreconditionError, QueryBudgetError
from ..exponents import default_omega
from ._matrix import as_matrix, check_index, check_shapes, digest, forbidden, to_rows
from .bounded_diff import BoundedDiffMPQ

INF = math.inf


def check_monotone(B, D):
    """Raise on the first increasing step of a row or an oversized column-sum drop."""
    if B.shape[1] < 2:
        return
    steps = np.diff(B, axis=1)
    bad = np.argwhere(steps > 0)
    if bad.size:
        k, j = bad[0]
        raise MonotonicityError(int(k), int(j))
    drops = -np.diff(B.sum(axis=0))
    over = np.flatnonzero(drops > D)
    if over.size:
        j = int(over[0])
        raise DropBoundError(j, int(drops[j]), D)


def block_width(L, n1, c, n2, omega_fn=default_omega):
    """``max(1, floor(L**(1/5) * n**((2 - omega(s)) / 5)))`` with ``s = log_n c``."""
    n = max(n1, n2)
    if n < 2 or c < 2:
        s = 1.0
    else:
        s = math.log(c) / math.log(n)
    scale = max(n, 2) ** ((2 - omega_fn(s)) / 5)
    return max(1, math.floor(L ** 0.2 * scale))


def clip_rows(B, delta, W, M):
    """Copy of ``B`` with rows dropping more than ``W`` in a block set to ``M`` there.

    Returns the clipped matrix and ``{block: [k, ...]}`` of replaced rows.
    """
    Bhat = B.copy()
    clipped = {}
    for b, start in enumerate(range(0, B.shape[1], delta)):
        end = min(start + delta, B.shape[1]) - 1
        rows = np.flatnonzero(B[:, start] - B[:, end] > W)
        if rows.size:
            Bhat[rows, start:end + 1] = M
            clipped[b] = rows.tolist()
    return Bhat, clipped


class MonotoneMPQ:
    def __init__(self, A, B, L, D, omega_fn=default_omega, seed=0, staged=False, delta=None):
        if L < 1:
            raise ValueError("query budget L must be >= 1")
        if D < 1:
            raise ValueError("drop bound D must be >= 1")
        self.A = as_matrix(A, "A")
        self.B = as_matrix(B, "B", allow_inf=False)
        check_shapes(self.A, self.B)
        self.n1, self.c = self.A.shape
        self.n2 = self.B.shape[1]
        self.L = int(L)
        self.D = int(D)
        check_monotone(self.B, self.D)
        if delta is None:
            delta = block_width(self.L, self.n1, self.c, self.n2, omega_fn)
        self.delta = int(delta)
        self.W = self.delta ** 2
        finite = np.abs(np.concatenate([self.A[np.isfinite(self.A)], self.B.ravel()]))
        self.maxabs = int(finite.max()) if finite.size else 0
        self.M = 4 * self.maxabs + 4 * self.W + 1
        self.seed = seed
        self._trees = {}
        self.steps = self._build()
        if not staged:
            for _ in self.steps:
                pass

    def _build(self):
        self.Bhat, self.clipped = clip_rows(self.B, self.delta, self.W, self.M)
        bound = self.delta * self.D / self.W
        for b, rows in self.clipped.items():
            if len(rows) > bound:
                raise PreconditionError(
                    f"block {b} clips {len(rows)} rows, above delta*D/W = {bound:g}"
                )
        yield 1
        self.inner = BoundedDiffMPQ(
            self.A, self.Bhat, self.delta, self.W, self.L, seed=self.seed, staged=True
        )
        yield from self.inner.steps
        self._Arows = to_rows(self.A)
        self._Brows = to_rows(self.B)
        # legitimate sums never exceed this; anything above went through M
        self._cutoff = 2 * self.maxabs

    def exceptions(self, j):
        """Rows replaced by the sentinel in the block of column ``j``."""
        return self.clipped.get(j // self.delta, [])

    def _tree(self, i, j):
        tree = self._trees.get((i, j))
        if tree is None:
            arow = self._Arows[i]
            items = {
                k: arow[k] + self._Brows[k][j]
                for k in self.exceptions(j)
                if arow[k] != INF
            }
            tree = self._trees[(i, j)] = KeyedMinTree(items)
        return tree

    def query(self, i, j, S=()):
        """``(value, k)`` minimising ``A[i,k] + B[k,j]`` over ``k not in S``, or None."""
        check_index(i, j, self.n1, self.n2)
        ks = forbidden(S, self.c)
        if len(ks) >= self.L:
            raise QueryBudgetError(f"|S| = {len(ks)} must be below L = {self.L}")
        best = self.inner.query(i, j, ks)
        if best is not None and best[0] > self._cutoff:
            best = None
        if self.exceptions(j):
            tree = self._tree(i, j)
            try:
                for k in ks:
                    tree.mask(k)
                top = tree.min()
            finally:
                tree.rollback()
            if top is not None and (best is None or top < best):
                best = top
        if best is None:
            return None
        return int(best[0]), int(best[1])

    def checksum(self):
        stale = sum(1 for t in self._trees.values() if t.dirty)
        return digest(
            self.delta, self.W, self.M, self.A, self.B, self.Bhat,
            sorted(self.clipped.items()), self.inner.checksum(), stale,
        )
