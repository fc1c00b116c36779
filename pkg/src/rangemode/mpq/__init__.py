"""Min-plus query structures, from small-entry matrices up to monotone ``B``."""

from ._matrix import INF
from .bounded_diff import BoundedDiffMPQ, lth_smallest_close
from .bucketed import BucketedMPQ
from .monotone import MonotoneMPQ
from .small import SmallEntriesMPQ

__all__ = [
    "INF",
    "BoundedDiffMPQ",
    "BucketedMPQ",
    "MonotoneMPQ",
    "SmallEntriesMPQ",
    "lth_smallest_close",
]
