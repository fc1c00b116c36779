"""Reference answers by direct recount and direct scan."""

import math
from collections import Counter


def oracle_query(seq, l, r):
    """Mode of ``seq[l-1:r]`` (1-based, inclusive) as ``(value, frequency)``.

    Ties go to the smallest value.
    """
    if not 1 <= l <= r <= len(seq):
        raise IndexError(f"range [{l}, {r}] outside 1..{len(seq)}")
    counts = Counter(seq[l - 1:r])
    best = max(counts.values())
    return min(v for v, c in counts.items() if c == best), best


def oracle_minplus(A, B, i, j, S=()):
    """``(value, k)`` minimising ``A[i][k] + B[k][j]`` over ``k not in S``.

    Plain scan over ``k``; ties go to the smallest ``k``; None when every
    admissible sum is infinite.
    """
    banned = set(S)
    best = None
    for k in range(len(B)):
        if k in banned:
            continue
        total = A[i][k] + B[k][j]
        if math.isinf(total):
            continue
        if best is None or total < best[0]:
            best = (total, k)
    if best is None:
        return None
    return int(best[0]), best[1]


def minplus_counts(A, B, i, j):
    """Histogram ``{sum: multiplicity}`` of finite ``A[i][k] + B[k][j]``."""
    hist = Counter()
    for k in range(len(B)):
        total = A[i][k] + B[k][j]
        if not math.isinf(total):
            hist[int(total)] += 1
    return dict(hist)
