"""Rollback-able histograms and minimum trees used by the query structures."""


class CountTree:
    """Dense non-negative histogram over slots ``0..T-1``.

    A segment-tree overlay counts nonzero slots per subtree, so the first
    (or second) nonzero slot is found in O(log T).  Every :meth:`add` is
    journaled; :meth:`rollback` undoes everything since the last
    :meth:`checkpoint`.
    """

    __slots__ = ("_counts", "_nz", "_base", "_journal")

    def __init__(self, counts):
        counts = [int(c) for c in counts]
        if any(c < 0 for c in counts):
            raise ValueError("counts must be non-negative")
        base = 1
        while base < max(len(counts), 1):
            base *= 2
        nz = [0] * (2 * base)
        for idx, c in enumerate(counts):
            if c:
                nz[base + idx] = 1
        for node in range(base - 1, 0, -1):
            nz[node] = nz[2 * node] + nz[2 * node + 1]
        self._counts = counts
        self._nz = nz
        self._base = base
        self._journal = []

    def __len__(self):
        return len(self._counts)

    @property
    def counts(self):
        return tuple(self._counts)

    @property
    def dirty(self):
        return bool(self._journal)

    def __getitem__(self, idx):
        return self._counts[idx]

    def _set_flag(self, idx, flag):
        node = self._base + idx
        delta = flag - self._nz[node]
        if delta:
            while node:
                self._nz[node] += delta
                node //= 2

    def add(self, idx, delta):
        if not 0 <= idx < len(self._counts):
            raise IndexError(f"slot {idx} outside 0..{len(self._counts) - 1}")
        new = self._counts[idx] + delta
        if new < 0:
            raise ValueError(f"count at slot {idx} would become negative")
        self._counts[idx] = new
        self._set_flag(idx, 1 if new else 0)
        self._journal.append((idx, delta))

    def checkpoint(self):
        self._journal = []

    def rollback(self):
        journal = self._journal
        counts = self._counts
        while journal:
            idx, delta = journal.pop()
            counts[idx] -= delta
            self._set_flag(idx, 1 if counts[idx] else 0)

    def nth_nonzero(self, n):
        """Slot of the ``n``-th nonzero count (1-based), or None."""
        nz = self._nz
        if nz[1] < n:
            return None
        node = 1
        base = self._base
        while node < base:
            node *= 2
            if nz[node] < n:
                n -= nz[node]
                node += 1
        return node - base

    def first_nonzero(self):
        return self.nth_nonzero(1)

    def first_two_nonzero(self):
        first = self.nth_nonzero(1)
        if first is None:
            return ()
        second = self.nth_nonzero(2)
        return (first,) if second is None else (first, second)


class KeyedMinTree:
    """Minimum over a fixed key set with journaled masking.

    ``items`` maps keys to comparable values; :meth:`min` returns the
    ``(value, key)`` with smallest value, ties going to the smallest key.
    """

    __slots__ = ("_keys", "_slot", "_base", "_tree", "_journal")

    def __init__(self, items):
        keys = sorted(items)
        base = 1
        while base < max(len(keys), 1):
            base *= 2
        tree = [None] * (2 * base)
        for idx, key in enumerate(keys):
            tree[base + idx] = (items[key], key)
        for node in range(base - 1, 0, -1):
            tree[node] = _smaller(tree[2 * node], tree[2 * node + 1])
        self._keys = keys
        self._slot = {key: idx for idx, key in enumerate(keys)}
        self._base = base
        self._tree = tree
        self._journal = []

    def __len__(self):
        return len(self._keys)

    def __contains__(self, key):
        return key in self._slot

    @property
    def dirty(self):
        return bool(self._journal)

    def entries(self):
        return [self._tree[self._base + i] for i in range(len(self._keys))]

    def _write(self, slot, entry):
        tree = self._tree
        node = self._base + slot
        tree[node] = entry
        node //= 2
        while node:
            tree[node] = _smaller(tree[2 * node], tree[2 * node + 1])
            node //= 2

    def mask(self, key):
        """Hide ``key`` until the next rollback; unknown keys are ignored."""
        slot = self._slot.get(key)
        if slot is None:
            return
        old = self._tree[self._base + slot]
        if old is None:
            return
        self._journal.append((slot, old))
        self._write(slot, None)

    def min(self):
        return self._tree[1]

    def checkpoint(self):
        self._journal = []

    def rollback(self):
        journal = self._journal
        while journal:
            slot, entry = journal.pop()
            self._write(slot, entry)


def _smaller(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if a <= b else b
