"""Order-maintenance sequence with stable element handles."""

from .avl import AVLNode, AVLTree


class ElementHandle(AVLNode):
    """One element of the sequence.

    The handle stays valid while other elements come and go.  Deleting an
    element either unlinks it or leaves it in place as a tombstone
    (``live = False``) that still has a well defined position between live
    elements; tombstones are what frozen snapshots point at.
    """

    __slots__ = ("value", "live", "size", "serial")

    def __init__(self, value, serial):
        super().__init__()
        self.value = value
        self.live = 1
        self.size = 1
        self.serial = serial

    def __repr__(self):
        state = "" if self.live else ", dead"
        return f"ElementHandle({self.value}{state})"


class OrderTree(AVLTree):
    """Balanced tree over the sequence; ``rank``/``select`` are 1-based.

    ``size`` on each node counts live elements of its subtree.  Position
    lookups walk parent pointers and are memoised until the next mutation, so
    a burst of comparisons between mutations costs one walk per handle.
    """

    def __init__(self, values=()):
        super().__init__()
        self._serial = 0
        self._dead = 0
        self._before_cache = {}
        for value in values:
            self.insert(len(self) + 1, value)

    def __len__(self):
        return self.root.size if self.root is not None else 0

    def __iter__(self):
        for node in self._nodes():
            if node.live:
                yield node.value

    @property
    def tombstones(self):
        return self._dead

    @property
    def next_serial(self):
        """Serial the next inserted handle will receive."""
        return self._serial

    def _pull(self, node):
        left, right = node.left, node.right
        lh = rh = 0
        size = node.live
        if left is not None:
            lh = left.height
            size += left.size
        if right is not None:
            rh = right.height
            size += right.size
        node.height = (lh if lh > rh else rh) + 1
        node.size = size

    def _touch(self):
        if self._before_cache:
            self._before_cache = {}

    # -- mutation ----------------------------------------------------------

    def insert(self, pos, value):
        """Insert ``value`` so that it becomes the live element at rank ``pos``."""
        n = len(self)
        if not 1 <= pos <= n + 1:
            raise IndexError(f"insert position {pos} outside 1..{n + 1}")
        handle = ElementHandle(value, self._serial)
        self._serial += 1
        self._touch()
        if self.root is None:
            self._attach(None, handle, True)
        elif pos == n + 1:
            self._attach(self._rightmost(self.root), handle, False)
        else:
            anchor = self.select(pos)
            if anchor.left is None:
                self._attach(anchor, handle, True)
            else:
                self._attach(self._rightmost(anchor.left), handle, False)
        return handle

    def kill(self, handle):
        """Mark ``handle`` deleted but keep its position (tombstone)."""
        if not handle.live:
            raise ValueError("element already deleted")
        self._touch()
        handle.live = 0
        self._dead += 1
        node = handle
        while node is not None:
            node.size -= 1
            node = node.parent

    def remove(self, handle):
        """Physically unlink ``handle`` (live or tombstone)."""
        self._touch()
        if not handle.live:
            self._dead -= 1
        self._detach(handle)
        handle.live = 0

    # -- queries -----------------------------------------------------------

    def before(self, handle):
        """Number of live elements strictly before ``handle``."""
        cached = self._before_cache.get(handle)
        if cached is not None:
            return cached
        node = handle
        count = node.left.size if node.left is not None else 0
        parent = node.parent
        while parent is not None:
            if parent.right is node:
                count += parent.live
                if parent.left is not None:
                    count += parent.left.size
            node = parent
            parent = node.parent
        self._before_cache[handle] = count
        return count

    def rank(self, handle):
        if not handle.live:
            raise ValueError("rank of a deleted element")
        return self.before(handle) + 1

    def select(self, index):
        """Live element with rank ``index``."""
        if not 1 <= index <= len(self):
            raise IndexError(f"rank {index} outside 1..{len(self)}")
        node = self.root
        while True:
            left = node.left
            ls = left.size if left is not None else 0
            if index <= ls:
                node = left
                continue
            index -= ls
            if node.live:
                if index == 1:
                    return node
                index -= 1
            node = node.right

    def handles(self, lo=1, hi=None):
        """Live handles with ranks ``lo..hi`` in order."""
        hi = len(self) if hi is None else hi
        if lo > hi:
            return
        node = self.select(lo)
        remaining = hi - lo + 1
        while remaining:
            if node.live:
                yield node
                remaining -= 1
            node = self._successor(node)

    def values(self, lo=1, hi=None):
        for handle in self.handles(lo, hi):
            yield handle.value
