"""Pairs of positions keyed by the first component, augmented with min-second."""

from .avl import AVLNode, AVLTree


class _PairNode(AVLNode):
    __slots__ = ("first", "second", "minsec")

    def __init__(self, first, second):
        super().__init__()
        self.first = first
        self.second = second
        self.minsec = second


class PairTree(AVLTree):
    """Ordered pairs ``(first, second)`` with ``first`` unique.

    Every subtree remembers the ``second`` of smallest position, so
    :meth:`find_within` decides in one root-to-leaf walk whether some pair
    lies inside a range.  Items are compared through ``position`` at use
    time; nothing caches positions, so the tree stays valid while the
    underlying sequence shifts.
    """

    def __init__(self, position):
        super().__init__()
        self._position = position
        self._index = {}

    def __len__(self):
        return len(self._index)

    def __contains__(self, first):
        return first in self._index

    def __iter__(self):
        for node in self._nodes():
            yield node.first, node.second

    def second_of(self, first):
        return self._index[first].second

    def _pull(self, node):
        left, right = node.left, node.right
        lh = rh = 0
        best = node.second
        position = self._position
        bp = position(best)
        if left is not None:
            lh = left.height
            p = position(left.minsec)
            if p < bp:
                best, bp = left.minsec, p
        if right is not None:
            rh = right.height
            p = position(right.minsec)
            if p < bp:
                best = right.minsec
        node.height = (lh if lh > rh else rh) + 1
        node.minsec = best

    def insert(self, first, second):
        if first in self._index:
            raise ValueError("pair with this first component already present")
        node = _PairNode(first, second)
        self._index[first] = node
        key = self._position(first)
        parent, cur, left = None, self.root, True
        while cur is not None:
            parent = cur
            left = key < self._position(cur.first)
            cur = cur.left if left else cur.right
        self._attach(parent, node, left)

    def remove(self, first):
        self._detach(self._index.pop(first))

    def update(self, first, second):
        """Replace the second component of an existing pair in place."""
        node = self._index[first]
        node.second = second
        while node is not None:
            old = node.minsec
            self._pull(node)
            if node.minsec is old:
                break
            node = node.parent

    def find_within(self, lo, hi):
        """Some pair with ``lo <= pos(first)`` and ``pos(second) <= hi``, or None."""
        position = self._position
        node = self.root
        while node is not None:
            if position(node.first) >= lo:
                if position(node.second) <= hi:
                    return node.first, node.second
                right = node.right
                if right is not None and position(right.minsec) <= hi:
                    return self._descend_min(right, hi)
                node = node.left
            else:
                node = node.right
        return None

    def _descend_min(self, node, hi):
        position = self._position
        while True:
            if position(node.second) <= hi:
                return node.first, node.second
            left = node.left
            if left is not None and position(left.minsec) <= hi:
                node = left
            else:
                node = node.right

    def exists_within(self, lo, hi):
        return self.find_within(lo, hi) is not None
