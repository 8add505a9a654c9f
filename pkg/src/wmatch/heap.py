"""Mergeable priority queue with decrease-key and lazy deletion.

Pairing heap.  All mutating operations are O(1) outside of the delete-min
pass, which is where the logarithmic work is paid; a comparison counter
backs the amortized-cost tests.  Keys may be ints, Fractions or math.inf.
Ties break on insertion sequence number, so runs are deterministic.

Entries are removed lazily: ``lazy_delete`` marks an entry dead, and
``extract_min_live`` pops dead minima off the top before reporting the live
minimum (which stays in the heap).
"""

from __future__ import annotations

import math
from typing import Any, Optional


class HeapNode:
    __slots__ = ("key", "payload", "seq", "dead", "child", "sibling", "prev")

    def __init__(self, key, payload, seq):
        self.key = key
        self.payload = payload
        self.seq = seq
        self.dead = False
        self.child: Optional[HeapNode] = None
        # sibling: next node in the parent's child list; prev: previous
        # sibling, or the parent if this node heads the list
        self.sibling: Optional[HeapNode] = None
        self.prev: Optional[HeapNode] = None

    def __repr__(self):
        flag = " dead" if self.dead else ""
        return f"<HeapNode {self.key}:{self.payload!r}{flag}>"


class ContractViolation(Exception):
    """A heap precondition was broken (e.g. decrease_key tried to increase)."""


class Heap:
    def __init__(self):
        self.root: Optional[HeapNode] = None
        self._seq = 0
        self._live = 0
        self.comparisons = 0

    def __len__(self):
        return self._live

    def _less(self, a: HeapNode, b: HeapNode) -> bool:
        self.comparisons += 1
        return (a.key, a.seq) < (b.key, b.seq)

    def _link(self, a: HeapNode, b: HeapNode) -> HeapNode:
        # meld two roots; the loser becomes the winner's first child
        if self._less(b, a):
            a, b = b, a
        b.prev = a
        b.sibling = a.child
        if a.child is not None:
            a.child.prev = b
        a.child = b
        a.sibling = None
        a.prev = None
        return a

    def _cut(self, node: HeapNode) -> None:
        # detach node from its parent's child list
        if node.prev is not None:
            if node.prev.child is node:
                node.prev.child = node.sibling
            else:
                node.prev.sibling = node.sibling
        if node.sibling is not None:
            node.sibling.prev = node.prev
        node.sibling = None
        node.prev = None

    def insert(self, key, payload: Any = None) -> HeapNode:
        node = HeapNode(key, payload, self._seq)
        self._seq += 1
        self._live += 1
        self.root = node if self.root is None else self._link(self.root, node)
        return node

    def decrease_key(self, node: HeapNode, key) -> None:
        if node.dead:
            raise ContractViolation("decrease_key on deleted entry")
        if key > node.key:
            raise ContractViolation(f"key increase {node.key} -> {key}")
        node.key = key
        if node is self.root:
            return
        self._cut(node)
        self.root = self._link(self.root, node)

    def lazy_delete(self, node: HeapNode) -> None:
        if node.dead:
            raise ContractViolation("double delete")
        node.dead = True
        self._live -= 1

    def meld(self, other: "Heap") -> None:
        """Absorb all entries of `other`, leaving it empty."""
        if other.root is not None:
            self.root = other.root if self.root is None else self._link(self.root, other.root)
        self._seq = max(self._seq, other._seq)
        self._live += other._live
        self.comparisons += other.comparisons
        other.root = None
        other._live = 0
        other.comparisons = 0

    def _pop_root(self) -> None:
        # two-pass pairing of the root's children
        node = self.root
        assert node is not None
        first = node.child
        node.child = None
        pairs = []
        cur = first
        while cur is not None:
            a = cur
            b = cur.sibling
            nxt = b.sibling if b is not None else None
            a.sibling = a.prev = None
            if b is not None:
                b.sibling = b.prev = None
                pairs.append(self._link(a, b))
            else:
                pairs.append(a)
            cur = nxt
        new_root = None
        for sub in reversed(pairs):
            new_root = sub if new_root is None else self._link(new_root, sub)
        self.root = new_root

    def extract_min_live(self) -> Optional[tuple]:
        """Physically remove dead minima, then peek the live minimum.

        Returns (key, payload) or None when no live entry remains.
        """
        while self.root is not None and self.root.dead:
            self._pop_root()
        if self.root is None:
            return None
        return (self.root.key, self.root.payload)

    def find_min_node(self) -> Optional[HeapNode]:
        while self.root is not None and self.root.dead:
            self._pop_root()
        return self.root

    def pop_min(self) -> Optional[tuple]:
        """Remove and return the live minimum, or None."""
        top = self.extract_min_live()
        if top is None:
            return None
        self._pop_root()
        self._live -= 1
        return top

    def min_key(self):
        top = self.extract_min_live()
        return math.inf if top is None else top[0]
