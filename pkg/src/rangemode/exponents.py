"""Rectangular matrix multiplication exponents and the update-time balance.

``omega(s)`` is the exponent for multiplying an ``n x n**s`` matrix by an
``n**s x n`` matrix.  It only tunes block widths; no answer depends on it.
"""

import math

# known upper bounds on omega(s) at tabulated s
RECT_MM_BOUNDS = {1.75: 3.021591, 2.0: 3.251640}

LINEAR_SLOPE = 0.920196
LINEAR_INTERCEPT = 1.41125
LINEAR_RANGE = (1.75, 2.0)

DEFAULT_T2 = 0.655994


def linear_omega(s):
    """Linear bound ``0.920196 s + 1.41125`` (meant for ``s`` in [1.75, 2])."""
    return LINEAR_SLOPE * s + LINEAR_INTERCEPT


def interpolated_omega(s):
    """Convex interpolation between the two tabulated bounds, without rounding."""
    (p, wp), (q, wq) = sorted(RECT_MM_BOUNDS.items())
    return (s - p) / (q - p) * wq + (q - s) / (q - p) * wp


def fallback_omega(s):
    """Crude stand-in outside the tabulated range, kept inside ``[2, s + 2]``."""
    return min(max(max(2.0, s + 1) * 1.2, 2.0), s + 2)


def default_omega(s):
    lo, hi = LINEAR_RANGE
    if lo <= s <= hi:
        return linear_omega(s)
    return fallback_omega(s)


def naive_omega(s):
    """Schoolbook multiplication: ``s + 2``."""
    return s + 2


def balance_exponents(t2, omega_fn=default_omega):
    """Per-operation and rebuild exponents for ``t2`` with ``t1 = 1 - t2/2``, ``t3 = t2``.

    Returns ``(max(2 - 2 t1, t2, t3), (1 - t3)(8/5 + s + omega(s)/5) - 6/5 t2)``
    where ``s = t1 / (1 - t3)``.
    """
    if not 0 < t2 < 1:
        raise ValueError(f"t2={t2} must lie strictly between 0 and 1")
    t1 = 1 - t2 / 2
    t3 = t2
    s = (1 - 0.5 * t2) / (1 - t2)
    per_op = max(2 - 2 * t1, t2, t3)
    rebuild = (1 - t3) * (8 / 5 + s + omega_fn(s) / 5) - 6 / 5 * t2
    return per_op, rebuild


def derived_sizes(N, t1, t2, t3):
    """``(T1, T2, T3) = (ceil(N**t1), ceil(N**t2), ceil(N**t3))``."""
    return tuple(max(1, math.ceil(N ** t)) for t in (t1, t2, t3))
