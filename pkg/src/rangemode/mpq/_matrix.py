import hashlib
import math

import numpy as np

from ..errors import EntryRangeError, PreconditionError

INF = math.inf


def as_matrix(M, name, allow_inf=True):
    """Float64 copy of an integer matrix whose only non-integer entry is +inf."""
    arr = np.array(M, dtype=np.float64)
    if arr.size == 0:
        arr = arr.reshape(arr.shape if arr.ndim == 2 else (0, 0))
    if arr.ndim != 2:
        raise PreconditionError(f"{name} must be two-dimensional")
    finite = np.isfinite(arr)
    if np.isnan(arr).any() or np.isneginf(arr).any():
        raise PreconditionError(f"{name} contains NaN or -inf")
    if not allow_inf and not finite.all():
        raise PreconditionError(f"{name} must not contain infinite entries")
    if (arr[finite] != np.round(arr[finite])).any():
        raise PreconditionError(f"{name} must contain integers")
    return arr


def check_shapes(A, B):
    if A.shape[1] != B.shape[0]:
        raise PreconditionError(
            f"inner dimensions differ: A is {A.shape[0]}x{A.shape[1]}, "
            f"B is {B.shape[0]}x{B.shape[1]}"
        )


def check_window(M, W, name):
    finite = M[np.isfinite(M)]
    if finite.size and (finite.min() < -W or finite.max() > W):
        raise EntryRangeError(f"{name} has finite entries outside [-{W}, {W}]")


def to_rows(M):
    """Nested Python lists for fast scalar access on the query path."""
    return M.tolist()


def forbidden(S, size):
    ks = sorted(set(S))
    if ks and (ks[0] < 0 or ks[-1] >= size):
        raise IndexError(f"forbidden index outside 0..{size - 1}")
    return ks


def check_index(i, j, n1, n2):
    if not (0 <= i < n1 and 0 <= j < n2):
        raise IndexError(f"entry ({i}, {j}) outside {n1}x{n2}")


def as_int(x):
    return int(x) if math.isfinite(x) else x


def digest(*parts):
    h = hashlib.blake2b(digest_size=16)
    for part in parts:
        if isinstance(part, np.ndarray):
            h.update(str(part.shape).encode())
            h.update(np.ascontiguousarray(part).tobytes())
        else:
            h.update(repr(part).encode())
    return h.hexdigest()
