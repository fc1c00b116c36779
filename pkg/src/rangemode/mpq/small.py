"""Min-plus queries when both matrices have entries in ``{-W..W} ∪ {inf}``.

For every output cell ``(i, j)`` the structure keeps the histogram
``r[t] = #{k : A[i,k] + B[k,j] = t - 2W}``.  A query knocks the forbidden
``k`` out of the histogram, reads off the first nonzero slot and restores
the histogram.
"""

import numpy as np

from ..core import CountTree
from ._matrix import (
    as_matrix,
    check_index,
    check_shapes,
    check_window,
    digest,
    forbidden,
    to_rows,
)

BACKENDS = ("direct", "bigint")

# Elements of the (n1, c, n2) sum cube materialised per counting pass.
_CHUNK = 1 << 21


class SmallEntriesMPQ:
    """Min-plus query structure for small-entry matrices (values only).

    ``A`` is ``n1 x c`` and ``B`` is ``c x n2``; indices are 0-based.
    """

    def __init__(self, A, B, W, backend="direct", staged=False):
        if W < 1:
            raise ValueError("W must be positive")
        if backend not in BACKENDS:
            raise ValueError(f"unknown backend {backend!r}")
        self.A = as_matrix(A, "A")
        self.B = as_matrix(B, "B")
        check_shapes(self.A, self.B)
        check_window(self.A, W, "A")
        check_window(self.B, W, "B")
        self.W = int(W)
        self.backend = backend
        self.n1, self.c = self.A.shape
        self.n2 = self.B.shape[1]
        self.slots = 4 * self.W + 1
        self.counts = None
        self._trees = {}
        self.steps = self._build()
        if not staged:
            for _ in self.steps:
                pass

    @property
    def shape(self):
        return self.n1, self.c, self.n2

    def _build(self):
        if self.backend == "bigint":
            self.counts = bigint_tables(self.A, self.B, self.W)
            yield 1
        else:
            yield from self._count_direct()
        self._Arows = to_rows(self.A)
        self._Brows = to_rows(self.B)

    def _count_direct(self):
        n1, c, n2, T = self.n1, self.c, self.n2, self.slots
        flat = np.zeros(n1 * n2 * T, dtype=np.int64)
        step = max(1, _CHUNK // max(1, n1 * n2))
        base = (np.arange(n1)[:, None, None] * n2 + np.arange(n2)[None, None, :]) * T
        for k0 in range(0, c, step):
            sums = self.A[:, k0:k0 + step, None] + self.B[None, k0:k0 + step, :]
            ok = np.isfinite(sums)
            idx = np.broadcast_to(base, sums.shape)[ok] + (sums[ok].astype(np.int64) + 2 * self.W)
            flat += np.bincount(idx, minlength=flat.size)
            yield 1
        self.counts = flat.reshape(n1, n2, T)

    def _tree(self, i, j):
        tree = self._trees.get((i, j))
        if tree is None:
            tree = CountTree(self.counts[i, j].tolist())
            self._trees[(i, j)] = tree
        return tree

    def query(self, i, j, S=()):
        """``min_{k not in S} A[i,k] + B[k,j]`` as an int, or None."""
        check_index(i, j, self.n1, self.n2)
        ks = forbidden(S, self.c)
        tree = self._tree(i, j)
        row = self._Arows[i]
        Brows = self._Brows
        shift = 2 * self.W
        inf = float("inf")
        try:
            for k in ks:
                a = row[k]
                b = Brows[k][j]
                if a != inf and b != inf:
                    tree.add(int(a + b) + shift, -1)
            slot = tree.first_nonzero()
        finally:
            tree.rollback()
        return None if slot is None else slot - shift

    def count_at(self, i, j, value):
        """Number of ``k`` with ``A[i,k] + B[k,j] == value``."""
        check_index(i, j, self.n1, self.n2)
        if not -2 * self.W <= value <= 2 * self.W:
            raise ValueError(f"value {value} outside [-{2 * self.W}, {2 * self.W}]")
        return int(self.counts[i, j, value + 2 * self.W])

    def table(self, i, j):
        return tuple(int(x) for x in self.counts[i, j])

    def checksum(self):
        """Digest of the logical state; lazily built trees must match it."""
        stale = sum(
            1
            for (i, j), tree in self._trees.items()
            if tree.dirty or list(tree.counts) != self.counts[i, j].tolist()
        )
        return digest(self.W, self.counts, self.A, self.B, stale)


def bigint_tables(A, B, W):
    """Count tables via the base-(c+1) big-integer product.

    ``A'[i,k] = (c+1)**(A[i,k]+W)`` (0 for inf) and likewise for ``B``; the
    digits of ``(A'B')[i,j]`` in base ``c+1`` are exactly the histogram.
    """
    n1, c = A.shape
    n2 = B.shape[1]
    base = c + 1
    T = 4 * W + 1

    def encode(M):
        return [[0 if x == float("inf") else base ** (int(x) + W) for x in row] for row in M.tolist()]

    Ap = encode(A)
    Bp = encode(B)
    Bcols = [[Bp[k][j] for k in range(c)] for j in range(n2)]
    counts = np.zeros((n1, n2, T), dtype=np.int64)
    powers = [base ** t for t in range(T)]
    for i in range(n1):
        arow = Ap[i]
        for j in range(n2):
            x = sum(a * b for a, b in zip(arow, Bcols[j]))
            for t in range(T - 1, -1, -1):
                digit, x = divmod(x, powers[t])
                counts[i, j, t] = digit
    return counts
