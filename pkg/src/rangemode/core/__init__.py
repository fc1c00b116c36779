"""Augmented ordered collections underlying every other module."""

from .counttree import CountTree, KeyedMinTree
from .occurrence import OccurrenceTree
from .ordertree import ElementHandle, OrderTree
from .pairtree import PairTree

__all__ = [
    "CountTree",
    "ElementHandle",
    "KeyedMinTree",
    "OccurrenceTree",
    "OrderTree",
    "PairTree",
]
