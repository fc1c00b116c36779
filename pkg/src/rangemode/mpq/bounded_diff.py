"""Min-plus query-with-witness for ``B`` with bounded differences inside column blocks.

Columns are grouped into blocks of width ``delta`` in which every row of
``B`` moves by at most ``W``.  The answer for ``(i, j, S)`` with
``|S| < L`` is the best of three candidate sources:

* sampled rounds: rows of ``A`` are shifted by a sampled column of ``B``
  and the L-th smallest threshold so that entries close to the threshold
  become small, and handed to :class:`BucketedMPQ`;
* indices far below the threshold, read from a sorted list;
* indices near the threshold that no round covered, kept explicitly.

Every source only proposes genuine sums ``A[i,k] + B[k,j]`` with
``k not in S``, and the case analysis guarantees the optimum is proposed, so
the result is exact whatever columns were sampled.
"""

import math

import numpy as np

from ..errors import BoundedDifferenceError, PreconditionError, QueryBudgetError
from ._matrix import as_matrix, check_index, check_shapes, digest, forbidden, to_rows
from .bucketed import BucketedMPQ

INF = math.inf


def lth_smallest_close(a, b, W, L):
    """True iff the ``L``-th smallest entries of ``a`` and ``b`` differ by at most ``W``.

    Requires ``|a[k] - b[k]| <= W`` elementwise.
    """
    if len(a) != len(b):
        raise PreconditionError("sequences differ in length")
    if not 1 <= L <= len(a):
        raise PreconditionError(f"L={L} outside 1..{len(a)}")
    if any(abs(x - y) > W for x, y in zip(a, b)):
        raise PreconditionError("sequences are not within W of each other")
    return abs(sorted(a)[L - 1] - sorted(b)[L - 1]) <= W


def block_layout(n2, delta):
    """Block index per column and the representative (last) column per block."""
    nblocks = -(-n2 // delta)
    block_of = np.arange(n2) // delta
    reps = np.minimum((np.arange(nblocks) + 1) * delta, n2) - 1
    return block_of, reps


def check_bounded_difference(B, delta, W):
    """Raise :class:`BoundedDifferenceError` on the first offending ``(k, j1, j2)``."""
    n2 = B.shape[1]
    for start in range(0, n2, delta):
        block = B[:, start:start + delta]
        spread = block.max(axis=1) - block.min(axis=1)
        bad = np.flatnonzero(spread > W)
        if bad.size:
            k = int(bad[0])
            j1 = start + int(block[k].argmax())
            j2 = start + int(block[k].argmin())
            raise BoundedDifferenceError(k, j1, j2, spread[k], W)


def lth_smallest(V, L):
    """Row-wise ``L``-th smallest value (inf when a row has fewer than ``L`` entries)."""
    if L > V.shape[1]:
        return np.full(V.shape[0], INF)
    return np.partition(V, L - 1, axis=1)[:, L - 1]


class BoundedDiffMPQ:
    def __init__(self, A, B, delta, W, L, seed=0, columns=None, staged=False):
        if delta < 1:
            raise ValueError("block width delta must be >= 1")
        if W < 1:
            raise ValueError("W must be positive")
        if L < 1:
            raise ValueError("query budget L must be >= 1")
        self.A = as_matrix(A, "A")
        self.B = as_matrix(B, "B", allow_inf=False)
        check_shapes(self.A, self.B)
        self.n1, self.c = self.A.shape
        self.n2 = self.B.shape[1]
        self.delta = int(delta)
        self.W = int(W)
        self.L = int(L)
        self.rho = self.delta if columns is None else len(columns)
        self.P = min(max(1, -(-self.L // self.delta)), max(self.c, 1))
        self.seed = seed
        check_bounded_difference(self.B, self.delta, self.W)
        if columns is not None and any(not 0 <= j < self.n2 for j in columns):
            raise ValueError("sampled column outside the matrix")
        self._columns = None if columns is None else [int(j) for j in columns]
        self.steps = self._build()
        if not staged:
            for _ in self.steps:
                pass

    # -- preprocessing -----------------------------------------------------

    def _build(self):
        A, B, W, L = self.A, self.B, self.W, self.L
        n1, c, n2 = self.n1, self.c, self.n2
        block_of, reps = block_layout(n2, self.delta)
        self.block_of = block_of
        self.reps = reps
        nblocks = len(reps)

        # estimation matrix and thresholds at representative columns
        self.Bhat = B[:, reps[block_of]] if n2 else B.copy()
        self.thresholds = np.full((n1, nblocks), INF)
        self.small_order = np.zeros((n1, nblocks, c), dtype=np.int64)
        self.small_len = np.zeros((n1, nblocks), dtype=np.int64)
        estimates = []
        for b, rep in enumerate(reps):
            V = A + B[:, rep][None, :]
            chat = lth_smallest(V, L)
            self.thresholds[:, b] = chat
            self.small_order[:, b] = np.argsort(V, axis=1, kind="stable")
            self.small_len[:, b] = (V < (chat - 2 * W)[:, None]).sum(axis=1)
            estimates.append(V)
            yield 1

        # sampled shift rounds
        if self._columns is None:
            rng = np.random.default_rng(self.seed)
            self._columns = rng.integers(0, n2, size=self.rho).tolist() if n2 and c else []
        self.columns = list(self._columns)
        self.covered = np.full((n1, c), -1, dtype=np.int64)
        self.inner = []
        with np.errstate(invalid="ignore"):
            for r, jr in enumerate(self.columns):
                chat = self.thresholds[:, block_of[jr]]
                shifted = A + B[:, jr][None, :] - chat[:, None]
                keep = np.isfinite(shifted) & (np.abs(shifted) <= 3 * W) & (self.covered < 0)
                self.covered[keep] = r
                Ar = np.where(keep, shifted, INF)
                Br = B - B[:, jr][:, None]
                inner = BucketedMPQ(Ar, Br, 3 * W, self.P, staged=True)
                yield from inner.steps
                self.inner.append(inner)

        # uncovered indices near the threshold, best L per actual column
        self.triples = [[() for _ in range(n2)] for _ in range(n1)]
        self.uncovered_triples = 0
        uncovered = self.covered < 0
        with np.errstate(invalid="ignore"):
            for b, rep in enumerate(reps):
                cols = np.flatnonzero(block_of == b)
                shifted = estimates[b] - self.thresholds[:, b][:, None]
                cand = np.isfinite(shifted) & (np.abs(shifted) <= 2 * W) & uncovered
                for i in range(n1):
                    ks = np.flatnonzero(cand[i])
                    if not ks.size:
                        continue
                    self.uncovered_triples += ks.size * cols.size
                    if ks.size <= L:
                        shared = tuple(ks.tolist())
                        for j in cols:
                            self.triples[i][j] = shared
                        continue
                    for j in cols:
                        exact = A[i, ks] + B[ks, j]
                        best = np.lexsort((ks, exact))[:L]
                        self.triples[i][j] = tuple(ks[best].tolist())
                yield 1

        self._Arows = to_rows(A)
        self._Brows = to_rows(B)
        self._covered_rows = self.covered.tolist()
        self._chat_rows = self.thresholds.tolist()
        self._block_rows = block_of.tolist()
        self._small_prefix = [
            [self.small_order[i, b, : self.small_len[i, b]].tolist() for b in range(nblocks)]
            for i in range(n1)
        ]

    # -- query -------------------------------------------------------------

    def query(self, i, j, S=()):
        """``(value, k)`` minimising ``A[i,k] + B[k,j]`` over ``k not in S``, or None."""
        check_index(i, j, self.n1, self.n2)
        ks = forbidden(S, self.c)
        if len(ks) >= self.L:
            raise QueryBudgetError(f"|S| = {len(ks)} must be below L = {self.L}")
        banned = set(ks)
        arow = self._Arows[i]
        Brows = self._Brows
        best = None

        if self.inner:
            cov = self._covered_rows[i]
            per_round = {}
            for k in ks:
                if cov[k] >= 0:
                    per_round.setdefault(cov[k], []).append(k)
            chat_row = self._chat_rows[i]
            for r, inner in enumerate(self.inner):
                found = inner.query(i, j, per_round.get(r, ()))
                if found is not None:
                    cand = (found[0] + chat_row[self._block_rows[self.columns[r]]], found[1])
                    if best is None or cand < best:
                        best = cand

        for k in self._small_prefix[i][self._block_rows[j]]:
            if k not in banned:
                cand = (arow[k] + Brows[k][j], k)
                if best is None or cand < best:
                    best = cand

        for k in self.triples[i][j]:
            if k not in banned:
                cand = (arow[k] + Brows[k][j], k)
                if best is None or cand < best:
                    best = cand

        if best is None:
            return None
        return int(best[0]), int(best[1])

    # -- diagnostics -------------------------------------------------------

    def true_thresholds(self):
        """``L``-th smallest of ``A[i,k] + B[k,j]`` per cell, from the exact ``B``."""
        out = np.empty((self.n1, self.n2))
        for j in range(self.n2):
            out[:, j] = lth_smallest(self.A + self.B[:, j][None, :], self.L)
        return out

    def checksum(self):
        return digest(
            self.delta, self.W, self.L, self.columns, self.A, self.B, self.thresholds,
            self.covered, self.triples, [inner.checksum() for inner in self.inner],
        )
