"""Nested blossoms: cycles of sub-blossoms with base vertices and base edges.

A blossom is stored as a node whose children form the ring C(B); link i of
the ring joins child i to child i+1 (mod k).  A single child with a loop
edge is a loop blossom.  Each blossom records its base vertex, its base
edge eta (an incident edge of opposite M-type, or None at the top of a free
chain), and a dual value z.  The M-type (heavy/light) is derived, never
stored, so rematching the underlying edges keeps it consistent for free.

Alternating trails from any vertex of a blossom to its base are produced by
``compute_trail``; augmenting rematches flip the matched bits along a trail
and rebase every blossom the trail crosses.  Expanded blossoms are
tombstoned, never reused, so certificates can reference them by id.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Optional, Union


class EdgeCopy:
    """One concrete copy of an instance edge; `matched` is the live state."""

    __slots__ = ("slot", "u", "v", "w", "matched", "cid")
    _ids = itertools.count()

    def __init__(self, slot: int, u: int, v: int, w: int, matched: bool = False):
        self.slot = slot
        self.u = u
        self.v = v
        self.w = w
        self.matched = matched
        self.cid = next(EdgeCopy._ids)

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u

    def is_loop(self) -> bool:
        return self.u == self.v

    def touches(self, x: int) -> bool:
        return x == self.u or x == self.v

    def __repr__(self):
        m = "+" if self.matched else "-"
        return f"<e{self.cid} {self.u}-{self.v} w={self.w} {m}>"


#: trail item: (edge, tail vertex, head vertex); loops have tail == head
TrailStep = tuple[EdgeCopy, int, int]


class Leaf:
    __slots__ = ("vertex", "parent")

    def __init__(self, vertex: int):
        self.vertex = vertex
        self.parent: Optional[Blossom] = None

    def __repr__(self):
        return f"<Leaf {self.vertex}>"


class Blossom:
    __slots__ = ("id", "children", "ring", "base", "eta", "z", "parent", "dead")
    _ids = itertools.count()

    def __init__(self, children, ring, base, eta):
        self.id = next(Blossom._ids)
        self.children: list[Node] = children
        self.ring: list[EdgeCopy] = ring
        self.base: int = base
        self.eta: Optional[EdgeCopy] = eta
        self.z = 0
        self.parent: Optional[Blossom] = None
        self.dead = False

    def __repr__(self):
        return f"<B{self.id} base={self.base} k={len(self.children)} z={self.z}>"


Node = Union[Leaf, Blossom]


def node_base(node: Node) -> int:
    return node.vertex if isinstance(node, Leaf) else node.base


class BlossomForest:
    def __init__(self, n: int):
        self.n = n
        self.leaves = [Leaf(v) for v in range(n)]
        self.blossoms: list[Blossom] = []

    # -- membership ---------------------------------------------------------

    def top(self, v: int) -> Node:
        """Maximal node containing vertex v."""
        node: Node = self.leaves[v]
        while node.parent is not None:
            node = node.parent
        return node

    def chain(self, v: int) -> list[Blossom]:
        """Blossoms containing v, innermost first."""
        out = []
        node = self.leaves[v].parent
        while node is not None:
            out.append(node)
            node = node.parent
        return out

    def contains(self, B: Blossom, v: int) -> bool:
        node = self.leaves[v].parent
        while node is not None:
            if node is B:
                return True
            node = node.parent
        return False

    def child_containing(self, B: Blossom, v: int) -> Node:
        node: Node = self.leaves[v]
        while node.parent is not B:
            node = node.parent
            if node is None:
                raise ValueError(f"vertex {v} not in blossom {B}")
        return node

    def vertices(self, node: Node) -> list[int]:
        if isinstance(node, Leaf):
            return [node.vertex]
        out = []
        stack = [node]
        while stack:
            cur = stack.pop()
            if isinstance(cur, Leaf):
                out.append(cur.vertex)
            else:
                stack.extend(cur.children)
        return out

    def alpha(self, B: Blossom) -> Node:
        """First child of the cycle: the one containing the base vertex."""
        return self.child_containing(B, B.base)

    def all_nodes(self, node: Node) -> Iterable[Node]:
        stack = [node]
        while stack:
            cur = stack.pop()
            yield cur
            if isinstance(cur, Blossom):
                stack.extend(cur.children)

    # -- M-type ---------------------------------------------------------------

    def is_heavy(self, node: Node) -> bool:
        """M-type of a blossom: heavy = matched type.

        Derived from the base edge when present (opposite M-type), else from
        the cycle edges at the base inside the minimal enclosing blossom.
        """
        assert isinstance(node, Blossom)
        if node.eta is not None:
            return not node.eta.matched
        b0 = self.leaves[node.base].parent
        assert b0 is not None
        ring_edges = self._ring_edges_at(b0, self.child_containing(b0, node.base))
        kinds = {e.matched for e in ring_edges}
        assert len(kinds) == 1, "base-incident cycle edges must share M-type"
        return kinds.pop()

    def _ring_edges_at(self, B: Blossom, child: Node) -> list[EdgeCopy]:
        k = len(B.children)
        idx = B.children.index(child)
        if k == 1:
            return [B.ring[0]]
        return [B.ring[(idx - 1) % k], B.ring[idx]]

    # -- trails ----------------------------------------------------------------

    def compute_trail(self, B: Node, x: int, i: int, reverse: bool = False) -> list[TrailStep]:
        """Alternating trail of parity i from x to the base of B.

        The trail ends with an edge of B's M-type and starts with one iff
        i == 1; (x, 0) with x the base gives the empty trail.  With reverse
        the steps run base-to-x.
        """
        t = self._trail(B, x, i)
        if reverse:
            t = [(e, b, a) for (e, a, b) in reversed(t)]
        return t

    def _trail(self, node: Node, x: int, i: int) -> list[TrailStep]:
        if isinstance(node, Leaf):
            if x != node.vertex or i != 0:
                raise ValueError("leaf trail must be (base, 0)")
            return []
        A = self.child_containing(node, x)
        al = self.alpha(node)
        if A is al:
            if isinstance(al, Leaf):
                if i == 0:
                    return []
                return self._ring_walk(node, al, node.ring[node.children.index(al)])
            return self._trail(al, x, i)
        heavy = self.is_heavy(node)
        if isinstance(A, Leaf):
            # pick the ring edge at x whose M-type matches the parity rule:
            # the first edge has B's M-type iff i == 1
            want = heavy if i == 1 else not heavy
            cands = [e for e in self._ring_edges_at(node, A) if e.matched == want]
            assert len(cands) == 1, "interior atom edges must alternate"
            return self._ring_walk(node, A, cands[0])
        a_heavy = self.is_heavy(A)
        k = 0 if a_heavy == heavy else 1
        j = (k + i) % 2
        seg = self._trail(A, x, j)
        assert A.eta is not None, "non-alpha child must carry a base edge"
        return seg + self._ring_walk(node, A, A.eta)

    def _ring_walk(self, B: Blossom, start: Node, first: EdgeCopy) -> list[TrailStep]:
        """Walk C(B) from `start` along `first` until the alpha child, expanding
        interior children into their own trails."""
        children, ring = B.children, B.ring
        k = len(children)
        idx = children.index(start)
        al = self.alpha(B)
        al_idx = children.index(al)
        if first is ring[idx]:
            step = 1
        else:
            assert first is ring[(idx - 1) % k], "first edge must be a ring link of start"
            step = -1
        out: list[TrailStep] = []
        cur = idx
        e = first
        while True:
            nxt = (cur + step) % k
            child = children[nxt]
            frm = self._endpoint_in(e, children[cur]) if not e.is_loop() else e.u
            to = self._endpoint_in(e, child) if not e.is_loop() else e.u
            out.append((e, frm, to))
            if nxt == al_idx:
                if isinstance(al, Leaf):
                    assert to == B.base
                    return out
                ip = 0 if e.matched == self.is_heavy(al) else 1
                out.extend(self._trail(al, to, ip))
                return out
            nxt_edge = ring[nxt] if step == 1 else ring[(nxt - 1) % k]
            if isinstance(child, Leaf):
                assert e.matched != nxt_edge.matched, "interior atom must alternate"
            else:
                if child.eta is nxt_edge:
                    ip = 0 if e.matched == self.is_heavy(child) else 1
                    out.extend(self._trail(child, to, ip))
                else:
                    assert child.eta is e, "one ring link of a child must be its base edge"
                    x2 = self._endpoint_in(nxt_edge, child)
                    ip = 0 if nxt_edge.matched == self.is_heavy(child) else 1
                    inner = self._trail(child, x2, ip)
                    out.extend((ee, bb, aa) for (ee, aa, bb) in reversed(inner))
            cur = nxt
            e = nxt_edge

    def _endpoint_in(self, e: EdgeCopy, node: Node) -> int:
        if isinstance(node, Leaf):
            assert e.touches(node.vertex)
            return node.vertex
        if self.contains_node(node, e.u):
            return e.u
        assert self.contains_node(node, e.v)
        return e.v

    def contains_node(self, node: Node, v: int) -> bool:
        if isinstance(node, Leaf):
            return node.vertex == v
        return self.contains(node, v)

    # -- contraction / expansion ----------------------------------------------

    def contract(self, children: list[Node], ring: list[EdgeCopy], base: int,
                 eta: Optional[EdgeCopy]) -> Blossom:
        B = Blossom(children, ring, base, eta)
        for c in children:
            assert c.parent is None, "children of a new blossom must be maximal"
            c.parent = B
        self.blossoms.append(B)
        return B

    def splice_expand(self, B: Blossom) -> tuple[list[Node], list[EdgeCopy]]:
        """Dissolve a maximal zero-dual blossom; children become maximal."""
        if B.parent is not None:
            raise ValueError("can only expand a maximal blossom")
        if B.z != 0:
            raise ValueError("expanding a blossom with positive dual breaks feasibility")
        if B.dead:
            raise ValueError("blossom already expanded")
        for c in B.children:
            c.parent = None
        B.dead = True
        return (list(B.children), list(B.ring))

    # -- rematching --------------------------------------------------------------

    def rematch_augment(self, trail: list[TrailStep]) -> None:
        """Flip the matching along an augmenting trail and rebase every blossom
        the trail crosses.

        The new base edge of a crossed blossom is the unique incident trail
        edge other than its old base edge; the new base vertex is that
        edge's endpoint inside the blossom.  Trails must be edge-simple.
        """
        edges = [e for (e, _a, _b) in trail]
        assert len(set(id(e) for e in edges)) == len(edges), "trail repeats an edge"

        incident: dict[int, tuple[Blossom, list[EdgeCopy]]] = {}
        for e in edges:
            if e.is_loop():
                continue
            cu = self.chain(e.u)
            cv = self.chain(e.v)
            cu_ids = set(id(b) for b in cu)
            cv_ids = set(id(b) for b in cv)
            for b in cu:
                if id(b) not in cv_ids:
                    incident.setdefault(id(b), (b, []))[1].append(e)
            for b in cv:
                if id(b) not in cu_ids:
                    incident.setdefault(id(b), (b, []))[1].append(e)

        for e in edges:
            e.matched = not e.matched

        for _bid, (B, cross) in incident.items():
            assert len(cross) <= 2, f"trail passes {B} more than once"
            cand = [e for e in cross if e is not B.eta]
            if len(cand) == 1:
                new_eta = cand[0]
                B.eta = new_eta
                B.base = new_eta.u if self.contains(B, new_eta.u) else new_eta.v
            else:
                # closed sub-trail in and out at the base: the base vertex
                # stays, only the base edge flips to a rematched incident edge
                assert len(cand) == 2 and B.eta not in cross
                for e in cand:
                    assert e.touches(B.base), "double crossing must happen at the base"
                assert cand[0].matched == cand[1].matched
                B.eta = cand[0]

    # -- maturity ------------------------------------------------------------------

    def interior_matched_degree(self, B: Blossom, adj: dict[int, list[EdgeCopy]]) -> dict[int, int]:
        verts = set(self.vertices(B))
        deg = {v: 0 for v in verts}
        seen = set()
        for v in verts:
            for e in adj.get(v, ()):
                if not e.matched or id(e) in seen:
                    continue
                if e.u in verts and e.v in verts:
                    seen.add(id(e))
                    if e.is_loop():
                        deg[e.u] += 2
                    else:
                        deg[e.u] += 1
                        deg[e.v] += 1
        return deg

    def is_mature(self, B: Blossom, adj: dict[int, list[EdgeCopy]],
                  constraint, mode: str) -> bool:
        """Maturity test.

        bmatch: the matched edges inside V(B) saturate every vertex, short
        exactly one unit at the base.  ffactor: total matched degrees are
        exact everywhere except possibly one unit at the base, and the base
        edge is present exactly when the base is saturated.
        """
        if mode == "bmatch":
            deg = self.interior_matched_degree(B, adj)
            for v, d in deg.items():
                want = constraint(v) - 1 if v == B.base else constraint(v)
                if d != want:
                    return False
            return True
        if mode == "ffactor":
            for v in self.vertices(B):
                d = sum((2 if e.is_loop() else 1) for e in adj.get(v, ()) if e.matched)
                if v == B.base:
                    if B.eta is not None:
                        if d != constraint(v):
                            return False
                    elif d != constraint(v) - 1:
                        return False
                elif d != constraint(v):
                    return False
            return True
        raise ValueError(f"unknown mode {mode!r}")

    # -- serialization -----------------------------------------------------------

    def node_record(self, node: Node) -> dict:
        if isinstance(node, Leaf):
            return {"vertex": node.vertex}
        return {
            "id": node.id,
            "mtype": "heavy" if self.is_heavy(node) else "light",
            "beta": node.base,
            "eta": None if node.eta is None else node.eta.cid,
            "z": node.z,
            "ring": [e.cid for e in node.ring],
            "children": [self.node_record(c) for c in node.children],
        }

    # -- debug checks -----------------------------------------------------------------

    def check_trail(self, B: Node, x: int, i: int, trail: list[TrailStep]) -> None:
        """Structural assertions on a computed trail."""
        assert len(trail) % 2 == i % 2
        assert len(set(id(e) for (e, _, _) in trail)) == len(trail)
        if not trail:
            assert isinstance(B, Leaf) or node_base(B) == x
            return
        assert trail[0][1] == x
        assert trail[-1][2] == node_base(B)
        for (e, a, b) in trail:
            assert e.touches(a) and e.touches(b)
        for s0, s1 in zip(trail, trail[1:]):
            assert s0[2] == s1[1], "consecutive edges must share an endpoint"
            assert s0[0].matched != s1[0].matched, "trail must alternate"
        if isinstance(B, Blossom):
            heavy = self.is_heavy(B)
            assert trail[-1][0].matched == heavy
            assert (trail[0][0].matched == heavy) == (i == 1)
