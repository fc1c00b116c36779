"""Parent-linked AVL tree skeleton shared by the ordered collections.

Nodes keep their identity for their whole lifetime (deletion relinks nodes
instead of copying payloads), which is what lets callers hold on to nodes as
stable handles.  Subclasses add payload slots and extend ``_pull`` to
maintain subtree augmentations.
"""


class AVLNode:
    __slots__ = ("left", "right", "parent", "height")

    def __init__(self):
        self.left = None
        self.right = None
        self.parent = None
        self.height = 1


def _h(node):
    return node.height if node is not None else 0


class AVLTree:
    def __init__(self):
        self.root = None

    # -- augmentation hook -------------------------------------------------

    def _pull(self, node):
        lh = node.left.height if node.left is not None else 0
        rh = node.right.height if node.right is not None else 0
        node.height = (lh if lh > rh else rh) + 1

    # -- structure ---------------------------------------------------------

    def _replace_child(self, parent, old, new):
        if parent is None:
            self.root = new
        elif parent.left is old:
            parent.left = new
        else:
            parent.right = new
        if new is not None:
            new.parent = parent

    def _rotate_left(self, x):
        y = x.right
        x.right = y.left
        if y.left is not None:
            y.left.parent = x
        self._replace_child(x.parent, x, y)
        y.left = x
        x.parent = y
        self._pull(x)
        self._pull(y)
        return y

    def _rotate_right(self, x):
        y = x.left
        x.left = y.right
        if y.right is not None:
            y.right.parent = x
        self._replace_child(x.parent, x, y)
        y.right = x
        x.parent = y
        self._pull(x)
        self._pull(y)
        return y

    def _rebalance(self, node):
        balance = _h(node.left) - _h(node.right)
        if balance > 1:
            if _h(node.left.left) < _h(node.left.right):
                self._rotate_left(node.left)
            return self._rotate_right(node)
        if balance < -1:
            if _h(node.right.right) < _h(node.right.left):
                self._rotate_right(node.right)
            return self._rotate_left(node)
        return node

    def _retrace(self, node):
        while node is not None:
            self._pull(node)
            node = self._rebalance(node)
            node = node.parent

    def _attach(self, parent, node, left):
        """Hang ``node`` (a fresh leaf) under ``parent`` and rebalance."""
        node.left = node.right = None
        node.height = 1
        node.parent = parent
        if parent is None:
            self.root = node
        elif left:
            parent.left = node
        else:
            parent.right = node
        self._pull(node)
        self._retrace(parent)

    def _detach(self, node):
        """Unlink ``node`` from the tree, keeping every other node object."""
        if node.left is not None and node.right is not None:
            succ = node.right
            while succ.left is not None:
                succ = succ.left
            if succ.parent is node:
                start = succ
            else:
                start = succ.parent
                start.left = succ.right
                if succ.right is not None:
                    succ.right.parent = start
                succ.right = node.right
                succ.right.parent = succ
            succ.left = node.left
            succ.left.parent = succ
            self._replace_child(node.parent, node, succ)
        else:
            child = node.left if node.left is not None else node.right
            start = node.parent
            self._replace_child(node.parent, node, child)
        node.left = node.right = node.parent = None
        node.height = 1
        self._retrace(start)

    # -- navigation --------------------------------------------------------

    @staticmethod
    def _leftmost(node):
        while node.left is not None:
            node = node.left
        return node

    @staticmethod
    def _rightmost(node):
        while node.right is not None:
            node = node.right
        return node

    @staticmethod
    def _successor(node):
        if node.right is not None:
            node = node.right
            while node.left is not None:
                node = node.left
            return node
        while node.parent is not None and node.parent.right is node:
            node = node.parent
        return node.parent

    @staticmethod
    def _predecessor(node):
        if node.left is not None:
            node = node.left
            while node.right is not None:
                node = node.right
            return node
        while node.parent is not None and node.parent.left is node:
            node = node.parent
        return node.parent

    def _nodes(self):
        node = self._leftmost(self.root) if self.root is not None else None
        while node is not None:
            yield node
            node = self._successor(node)

    def _check_balance(self, node=None):
        """Debug helper: verify AVL heights and parent links below ``node``."""
        node = self.root if node is None else node
        if node is None:
            return 0
        for child in (node.left, node.right):
            if child is not None and child.parent is not node:
                raise AssertionError("broken parent link")
        lh = self._check_balance(node.left) if node.left is not None else 0
        rh = self._check_balance(node.right) if node.right is not None else 0
        if abs(lh - rh) > 1 or node.height != max(lh, rh) + 1:
            raise AssertionError("AVL invariant violated")
        return node.height
