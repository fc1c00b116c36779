"""Per-value ordered occurrence lists."""

from .avl import AVLNode, AVLTree


class _OccNode(AVLNode):
    __slots__ = ("item", "count")

    def __init__(self, item):
        super().__init__()
        self.item = item
        self.count = 1


class OccurrenceTree(AVLTree):
    """Occurrences of one value, ordered by their position in the sequence.

    ``position`` maps an item (usually an :class:`ElementHandle`) to a
    number that orders items and equals ``rank - 1`` for live elements;
    :meth:`OrderTree.before` is the intended choice.
    """

    def __init__(self, position):
        super().__init__()
        self._position = position
        self._index = {}

    def __len__(self):
        return self.root.count if self.root is not None else 0

    def __contains__(self, item):
        return item in self._index

    def __iter__(self):
        for node in self._nodes():
            yield node.item

    def _pull(self, node):
        left, right = node.left, node.right
        lh = rh = 0
        count = 1
        if left is not None:
            lh = left.height
            count += left.count
        if right is not None:
            rh = right.height
            count += right.count
        node.height = (lh if lh > rh else rh) + 1
        node.count = count

    def insert(self, item):
        """Add ``item``; return its 1-based index among the occurrences."""
        if item in self._index:
            raise ValueError("item already present")
        node = _OccNode(item)
        self._index[item] = node
        key = self._position(item)
        parent, cur, left = None, self.root, True
        while cur is not None:
            parent = cur
            left = key < self._position(cur.item)
            cur = cur.left if left else cur.right
        self._attach(parent, node, left)
        return self.index_of(item)

    def remove(self, item):
        """Drop ``item``; return the index it had."""
        index = self.index_of(item)
        self._detach(self._index.pop(item))
        return index

    def index_of(self, item):
        node = self._index[item]
        idx = (node.left.count if node.left is not None else 0) + 1
        while node.parent is not None:
            if node.parent.right is node:
                idx += 1 + (node.parent.left.count if node.parent.left is not None else 0)
            node = node.parent
        return idx

    def select(self, index):
        """Item with 1-based occurrence index ``index``."""
        if not 1 <= index <= len(self):
            raise IndexError(f"occurrence index {index} outside 1..{len(self)}")
        node = self.root
        while True:
            ls = node.left.count if node.left is not None else 0
            if index <= ls:
                node = node.left
            elif index == ls + 1:
                return node.item
            else:
                index -= ls + 1
                node = node.right

    def window(self, lo, hi):
        """Items with occurrence indices ``lo..hi`` (clipped to the valid range)."""
        lo = max(lo, 1)
        hi = min(hi, len(self))
        if lo > hi:
            return []
        node = self._index[self.select(lo)]
        out = []
        for _ in range(hi - lo + 1):
            out.append(node.item)
            node = self._successor(node)
        return out

    def count_before(self, pos):
        """Number of occurrences whose position is < ``pos``."""
        count = 0
        node = self.root
        position = self._position
        while node is not None:
            if position(node.item) < pos:
                count += 1 + (node.left.count if node.left is not None else 0)
                node = node.right
            else:
                node = node.left
        return count

    def count_in_range(self, lo, hi):
        """Occurrences with 1-based rank in ``[lo, hi]``."""
        if lo > hi:
            return 0
        return self.count_before(hi) - self.count_before(lo - 1)
