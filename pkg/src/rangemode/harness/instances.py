"""Random matrices meeting the preconditions of each min-plus structure."""

import math

import numpy as np

INF = math.inf


def _sprinkle_inf(rng, M, p_inf):
    if p_inf > 0:
        M = M.astype(np.float64)
        M[rng.random(M.shape) < p_inf] = INF
    return M


def small_instance(rng, n1, c, n2, W, p_inf=0.1):
    A = _sprinkle_inf(rng, rng.integers(-W, W + 1, size=(n1, c)), p_inf)
    B = _sprinkle_inf(rng, rng.integers(-W, W + 1, size=(c, n2)), p_inf)
    return A, B


def bucketed_instance(rng, n1, c, n2, W, spread=None, p_inf=0.1):
    """Small-entry ``A`` and arbitrary finite ``B`` with mixed small and large buckets."""
    spread = spread if spread is not None else 10 * W
    A = _sprinkle_inf(rng, rng.integers(-W, W + 1, size=(n1, c)), p_inf)
    B = rng.integers(-spread, spread + 1, size=(c, n2)).astype(np.float64)
    # clustered rows make some buckets small
    clustered = rng.random(c) < 0.5
    B[clustered] = rng.integers(-W, W + 1, size=(int(clustered.sum()), n2))
    return A, B


def bounded_diff_instance(rng, n1, c, n2, delta, W, span=50, p_inf=0.1):
    """Arbitrary ``A``; ``B`` moves by at most ``W`` inside each block of ``delta`` columns."""
    A = _sprinkle_inf(rng, rng.integers(-span, span + 1, size=(n1, c)), p_inf)
    B = np.empty((c, n2))
    for start in range(0, n2, delta):
        end = min(start + delta, n2)
        base = rng.integers(-span, span + 1, size=(c, 1))
        B[:, start:end] = base + rng.integers(0, W + 1, size=(c, end - start))
    return A, B


def monotone_instance(rng, n1, c, n2, D, span=20, p_inf=0.1, spikes=0):
    """``B`` with non-increasing rows and column sums falling by at most ``D`` per step.

    ``spikes`` rows receive their whole budget in single steps, which forces
    large drops inside a block.
    """
    A = _sprinkle_inf(rng, rng.integers(-span, span + 1, size=(n1, c)), p_inf)
    B = np.zeros((c, n2))
    B[:, 0] = rng.integers(-span, span + 1, size=c)
    spike_rows = rng.choice(c, size=min(spikes, c), replace=False) if spikes else []
    for j in range(1, n2):
        drop = np.zeros(c, dtype=np.int64)
        budget = int(rng.integers(0, D + 1))
        if len(spike_rows) and rng.random() < 0.3:
            drop[rng.choice(spike_rows)] += budget
        else:
            np.add.at(drop, rng.integers(0, c, size=budget), 1)
        B[:, j] = B[:, j - 1] - drop
    return A, B


def random_forbidden(rng, c, limit):
    """Random forbidden set of size below ``limit`` (and at most ``c``)."""
    size = int(rng.integers(0, max(1, min(limit, c + 1))))
    return sorted(rng.choice(c, size=size, replace=False).tolist()) if size else []
