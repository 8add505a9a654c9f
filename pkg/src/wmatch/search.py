"""Shared search machinery of the b-matching and f-factor solvers.

One search grows an alternating forest over the contracted graph, with every
deficient atom or blossom an outer root.  Tight eligible edges trigger grow,
blossom (contract) and augment steps; inner blossoms whose dual hits zero
are expanded.  When nothing is tight the duals move: every y in an outer
node drops by delta, every y in an inner node rises, blossom duals move by
2*delta the other way.

Duals are never updated edge-by-edge.  The engine keeps the running total
Delta of all adjustments and per-vertex offsets Y with y = Y -/+ Delta, so
a dual adjustment is just an advance of Delta to the key of the next event:

* grow events live in a heap keyed by the Delta at which the best edge to a
  non-forest node becomes tight;
* blossom/augment events (edges eligible at both ends) live in the
  tree-blossom-merging structure, keyed by Delta + slack/2, since each
  adjustment closes such an edge's slack by 2*delta;
* expand events are keyed by Delta + z(B)/2;
* loops at forest atoms get their own small heap (a loop never joins two
  distinct nodes, so it bypasses the merging structure).

Weights are doubled on the way in so uniform initial duals stay integral;
warm starts with mixed-parity duals fall back to exact fractions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

from .blossoms import Blossom, BlossomForest, EdgeCopy, Leaf, Node, TrailStep, node_base
from .heap import Heap
from .multigraph import DegreeFn, Multigraph, UNBOUNDED
from .tree_merge import TreeMerge

INF = math.inf

OUT, INNER, OUTER = "out", "inner", "outer"


def half(x):
    """Exact x/2, staying in int when possible."""
    if isinstance(x, int):
        return x // 2 if x % 2 == 0 else Fraction(x, 2)
    return x / 2


class Slot:
    """One instance edge record, engine side: doubled weight, its copies."""

    __slots__ = ("idx", "u", "v", "w", "cap", "copies")

    def __init__(self, idx, u, v, w, cap):
        self.idx = idx
        self.u = u
        self.v = v
        self.w = w          # doubled weight
        self.cap = cap      # None = unlimited (bmatch)
        self.copies: list[EdgeCopy] = []

    def matched_count(self) -> int:
        return sum(1 for c in self.copies if c.matched)


class Deficiency(Exception):
    """Raised through solve() when no perfect solution exists; carries the
    witness produced by the failed search."""

    def __init__(self, witness: dict):
        super().__init__(f"no perfect solution: max size {witness['max_size']}")
        self.witness = witness


class _Augmented(Exception):
    pass


class InternalError(AssertionError):
    pass


class SearchEngine:
    """Weighted matching search over a multigraph with degree constraints.

    mode is "bmatch" (unlimited unmatched copies, matched edges stay tight)
    or "ffactor" (bounded copies, matched edges may become underrated).
    In bmatch mode declared multiplicities are ignored: the model gives
    every edge unlimited copies.
    """

    def __init__(self, graph: Multigraph, constraint: DegreeFn, mode: str,
                 debug: bool = False):
        assert mode in ("bmatch", "ffactor")
        self.mode = mode
        self.debug = debug
        self.n = graph.n
        self.graph = graph
        self.constraint = constraint
        self.slots: list[Slot] = []
        self.slot_incidence: dict[int, list[int]] = {v: [] for v in range(self.n)}
        for i, e in enumerate(graph.edges):
            if mode == "ffactor":
                cap = e.mult if e.mult != UNBOUNDED else max(1, min(constraint(e.u), constraint(e.v)))
            else:
                cap = None
            s = Slot(i, e.u, e.v, 2 * e.w, cap)
            self.slots.append(s)
            self.slot_incidence[e.u].append(i)
            if e.v != e.u:
                self.slot_incidence[e.v].append(i)
        self.forest = BlossomForest(self.n)
        self.adj: dict[int, list[EdgeCopy]] = {v: [] for v in range(self.n)}
        self.copy_slot: dict[int, Slot] = {}
        self.deg = [0] * self.n
        self.in_ring: set[int] = set()
        # duals: raw values outside the forest, offsets inside
        self.y_raw: list = [0] * self.n
        self.Y: dict[int, object] = {}
        self.ysign: dict[int, int] = {}   # -1 outer, +1 inner
        self.delta = 0
        # per maximal forest node state
        self.status: dict = {}
        self.tau: dict = {}
        self.par: dict = {}
        self.zoff: dict = {}              # Blossom -> Z with z = Z +/- 2 Delta
        self.searches = 0
        self.augmentations = 0
        self.counters = {"scans": 0, "events": 0, "steps": 0, "work": 0}
        self.per_search_work: list[int] = []
        self.trace: Optional[list[str]] = None
        self._elig_seen: set = set()
        self._tau_cids: set[int] = set()
        if mode == "ffactor":
            for s in self.slots:
                for _ in range(s.cap):
                    self._new_copy(s)

    # -- copies ----------------------------------------------------------------

    def _new_copy(self, slot: Slot) -> EdgeCopy:
        c = EdgeCopy(slot.idx, slot.u, slot.v, slot.w)
        slot.copies.append(c)
        self.copy_slot[c.cid] = slot
        self.adj[c.u].append(c)
        if c.v != c.u:
            self.adj[c.v].append(c)
        return c

    def _available(self, c: EdgeCopy) -> bool:
        return not c.matched and c.cid not in self.in_ring and c.cid not in self._tau_cids

    def _rep_unmatched(self, slot: Slot) -> Optional[EdgeCopy]:
        """An unmatched copy free for structural use; bmatch slots mint new
        copies on demand (unlimited parallel edges)."""
        for c in slot.copies:
            if self._available(c):
                return c
        if slot.cap is None:
            return self._new_copy(slot)
        return None

    def _fresh_copy_like(self, e: EdgeCopy) -> EdgeCopy:
        slot = self.copy_slot[e.cid]
        assert slot.cap is None, "fresh copies only exist in bmatch mode"
        return self._new_copy(slot)

    # -- duals ------------------------------------------------------------------

    def y(self, v: int):
        s = self.ysign.get(v)
        if s is None:
            return self.y_raw[v]
        return self.Y[v] - self.delta if s < 0 else self.Y[v] + self.delta

    def z_of(self, B: Blossom):
        Z = self.zoff.get(B)
        if Z is None:
            return B.z
        sign = -1 if self.status.get(B) == INNER else 1
        return Z + 2 * self.delta * sign

    def _freeze_vertex(self, v: int) -> None:
        if v in self.ysign:
            self.y_raw[v] = self.y(v)
            del self.ysign[v]
            del self.Y[v]

    def _activate_vertex(self, v: int, outer: bool) -> None:
        self._freeze_vertex(v)
        self.ysign[v] = -1 if outer else 1
        self.Y[v] = self.y_raw[v] + (self.delta if outer else -self.delta)

    def _freeze_blossom(self, B: Blossom) -> None:
        if B in self.zoff:
            B.z = self.z_of(B)
            del self.zoff[B]

    def _activate_blossom(self, B: Blossom, outer: bool) -> None:
        self._freeze_blossom(B)
        self.zoff[B] = B.z - (2 * self.delta if outer else -2 * self.delta)

    def hyz(self, e: EdgeCopy):
        val = self.y(e.u) + self.y(e.v)
        chain_u = self.forest.chain(e.u)
        if e.is_loop():
            for B in chain_u:
                val += self.z_of(B)
            return val
        chain_v = self.forest.chain(e.v)
        chain_v_ids = set(id(b) for b in chain_v)
        chain_u_ids = set(id(b) for b in chain_u)
        for B in chain_u:
            if id(B) in chain_v_ids:
                val += self.z_of(B)          # e in gamma(B)
            elif self.mode == "ffactor" and (e.matched != (B.eta is e)):
                val += self.z_of(B)          # e in I(B)
        if self.mode == "ffactor":
            for B in chain_v:
                if id(B) not in chain_u_ids and (e.matched != (B.eta is e)):
                    val += self.z_of(B)
        return val

    def slack(self, e: EdgeCopy):
        s = self.hyz(e) - e.w
        return -s if e.matched else s

    # -- eligibility ----------------------------------------------------------

    def eligible_at(self, e: EdgeCopy, x: int) -> bool:
        node = self.forest.top(x)
        st = self.status.get(node)
        if st not in (INNER, OUTER):
            return False
        if e.cid in self._tau_cids:
            return False
        if e.is_loop() and not isinstance(node, Leaf):
            return False     # loops vanish inside a contracted blossom
        if isinstance(node, Leaf):
            return (not e.matched) if st == OUTER else e.matched
        if st == OUTER:
            return True
        if self.mode == "ffactor":
            return node.eta is e
        return e.matched

    # -- search setup ------------------------------------------------------------

    def _reset_search(self) -> None:
        self.status.clear()
        self.tau.clear()
        self.par.clear()
        self.grow_heap = Heap()
        self.expand_heap = Heap()
        self.loop_heap = Heap()
        self.best_grow: dict = {}
        self.tm = TreeMerge(self.n + 1)
        self.tm.add_leaf(None, self.n)   # virtual root of the supporting forest
        self._in_T: set[int] = set()
        self._anchor: dict[int, int] = {}
        self._registered: set[int] = set()
        self._tau_cids = set()
        self._work0 = self.counters["work"]

    def _tick(self, k: int = 1) -> None:
        self.counters["work"] += k

    def _log(self, msg: str) -> None:
        if self.trace is not None:
            self.trace.append(msg)

    def free_nodes(self) -> list[Node]:
        out = []
        seen = set()
        for v in range(self.n):
            if self.deg[v] < self.constraint(v):
                node = self.forest.top(v)
                if id(node) in seen:
                    continue
                seen.add(id(node))
                if isinstance(node, Blossom):
                    assert node.base == v, "only the base of a blossom may be deficient"
                out.append(node)
        return out

    def root_of(self, node: Node) -> Node:
        while self.par.get(node) is not None:
            node = self.par[node]
        return node

    # -- supporting tree helpers ----------------------------------------------

    def _t_add(self, parent_vertex: Optional[int], v: int) -> None:
        if v in self._in_T:
            return
        if parent_vertex is not None and parent_vertex not in self._in_T:
            parent_vertex = None
        self.tm.add_leaf(self.n if parent_vertex is None else parent_vertex, v)
        self._in_T.add(v)

    def _enter_outer_tree(self, node: Node, attach: int,
                          anchor_parent: Optional[int]) -> None:
        """Put all vertices of an outer node into the supporting tree and one
        tree-merge blossom; `attach` hangs from anchor_parent in T."""
        verts = self.forest.vertices(node) if isinstance(node, Blossom) else [node.vertex]
        self._t_add(anchor_parent, attach)
        for v in verts:
            if v != attach:
                self._t_add(self._anchor.get(v, attach), v)
        for v in verts:
            if self.tm.find(attach) != self.tm.find(v):
                self.tm.merge(attach, v)

    def _enter_inner_tree(self, node: Node, entry_vertex: int,
                          anchor_parent: Optional[int]) -> None:
        """Add the collapsed trail through an inner node to T."""
        if isinstance(node, Leaf):
            self._t_add(anchor_parent, node.vertex)
            return
        i = 0 if self.tau[node].matched == self.forest.is_heavy(node) else 1
        trail = self.forest.compute_trail(node, entry_vertex, i)
        seq = [entry_vertex] + [b for (_e, _a, b) in trail]
        # collapse closed excursions: a revisited vertex closes a P1(beta,beta)
        # subtrail whose interior vertices anchor at the revisit vertex
        out: list[int] = []
        pos: dict[int, int] = {}
        for v in seq:
            if v in pos:
                for skipped in out[pos[v] + 1:]:
                    self._anchor[skipped] = v
                    pos.pop(skipped, None)
                del out[pos[v] + 1:]
            else:
                pos[v] = len(out)
                out.append(v)
        prev = anchor_parent
        for v in out:
            self._t_add(prev, v)
            prev = v

    # -- event generation ----------------------------------------------------------

    def _edges_to_consider(self, v: int, include_matched: bool, include_unmatched: bool):
        for si in self.slot_incidence[v]:
            s = self.slots[si]
            if include_matched:
                for c in s.copies:
                    if c.matched:
                        yield c
            if include_unmatched:
                rep = self._rep_unmatched(s)
                if rep is not None:
                    yield rep

    def _grow_event(self, e: EdgeCopy, x: int, w: int, node: Node) -> None:
        key = self.delta + self.slack(e)
        cur = self.best_grow.get(id(node))
        if cur is None or key < cur[0]:
            hn = self.grow_heap.insert(key, (e, x, w, node))
            self.best_grow[id(node)] = (key, hn)

    def _scan_vertex(self, v: int, matched_only=False, unmatched_only=False,
                     only_edge: Optional[EdgeCopy] = None) -> None:
        """(Re)examine edges at v that may just have become eligible at v."""
        if only_edge is not None:
            cands = [only_edge]
        else:
            cands = self._edges_to_consider(
                v, include_matched=not unmatched_only, include_unmatched=not matched_only)
        for e in cands:
            self.counters["scans"] += 1
            self._tick()
            if e.cid in self._tau_cids or e.cid in self.in_ring:
                continue
            x = v
            w = e.other(x)
            if not self.eligible_at(e, x):
                continue
            if self.debug:
                self._elig_seen.add((e.cid, x))
            if e.is_loop():
                node = self.forest.top(x)
                if isinstance(node, Leaf):
                    self.loop_heap.insert(self.delta + half(self.slack(e)), e)
                continue
            nw = self.forest.top(w)
            if self.forest.top(x) is nw:
                continue
            stw = self.status.get(nw)
            if stw not in (INNER, OUTER):
                self._grow_event(e, x, w, nw)
            elif self.eligible_at(e, w):
                if e.cid not in self._registered:
                    self._registered.add(e.cid)
                    self.tm.make_edge(x, w, self.delta + half(self.slack(e)), payload=e)

    def _scan_node_newly(self, node: Node, new_status: str) -> None:
        """Generate events for edge classes whose eligibility switched on."""
        if isinstance(node, Leaf):
            v = node.vertex
            if new_status == OUTER:
                self._scan_vertex(v, unmatched_only=True)
            else:
                self._scan_vertex(v, matched_only=True)
            return
        if new_status == OUTER:
            for v in self.forest.vertices(node):
                self._scan_vertex(v)
        else:
            if self.mode == "ffactor":
                if node.eta is not None:
                    self._scan_vertex(node.base, only_edge=node.eta)
            else:
                for v in self.forest.vertices(node):
                    self._scan_vertex(v, matched_only=True)

    def _rescan_towards(self, verts: list[int]) -> None:
        """Vertices left the forest: rebuild grow events pointing at them."""
        for w in verts:
            nw = self.forest.top(w)
            if self.status.get(nw) in (INNER, OUTER):
                continue
            for si in self.slot_incidence[w]:
                s = self.slots[si]
                self._tick()
                if s.u == s.v:
                    continue
                for e in s.copies + ([] if (rep := self._rep_unmatched(s)) is None
                                     or rep in s.copies else [rep]):
                    if e.cid in self._tau_cids or e.cid in self.in_ring:
                        continue
                    if not e.matched and not self._available(e):
                        continue
                    x = e.other(w)
                    if self.eligible_at(e, x):
                        self._grow_event(e, x, w, nw)

    # -- node state transitions -----------------------------------------------------

    def _make_node(self, node: Node, status: str, tau: Optional[EdgeCopy],
                   parent: Optional[Node]) -> None:
        self.status[node] = status
        self.tau[node] = tau
        self.par[node] = parent
        if tau is not None:
            self._tau_cids.add(tau.cid)
        outer = status == OUTER
        for v in (self.forest.vertices(node) if isinstance(node, Blossom) else [node.vertex]):
            self._activate_vertex(v, outer)
        if isinstance(node, Blossom):
            self._activate_blossom(node, outer)
            if status == INNER:
                self.expand_heap.insert(self.delta + half(self.z_of(node)), node)

    def _drop_node(self, node: Node, freeze: bool = True) -> None:
        if node not in self.status:
            return
        if freeze:
            for v in (self.forest.vertices(node) if isinstance(node, Blossom) else [node.vertex]):
                self._freeze_vertex(v)
            if isinstance(node, Blossom):
                self._freeze_blossom(node)
        elif isinstance(node, Blossom):
            self._freeze_blossom(node)
        for d in (self.status, self.tau, self.par):
            d.pop(node, None)

    # -- steps ---------------------------------------------------------------------

    def _grow_step(self, e: EdgeCopy, x: int, w: int, node: Node) -> None:
        self.counters["steps"] += 1
        self._log(f"grow {e} -> {node}")
        parent = self.forest.top(x)
        if self.mode == "ffactor" and isinstance(node, Blossom):
            st = OUTER if node.eta is e else INNER
        else:
            st = OUTER if e.matched else INNER
        self._make_node(node, st, e, parent)
        if st == OUTER:
            self._enter_outer_tree(node, attach=w, anchor_parent=x)
        else:
            self._enter_inner_tree(node, entry_vertex=w, anchor_parent=x)
        self._scan_node_newly(node, st)

    def _contract_cycle(self, nodes: list[Node], ring: list[EdgeCopy],
                        tau: Optional[EdgeCopy], parent: Optional[Node]) -> Blossom:
        """nodes[0] is the cycle's first vertex; ring[i] joins nodes i, i+1."""
        self.counters["steps"] += 1
        alpha = nodes[0]
        base = node_base(alpha)
        statuses = {id(X): self.status.get(X) for X in nodes}
        for X in nodes:
            self._drop_node(X, freeze=False)
        for e in ring:
            self.in_ring.add(e.cid)
        NB = self.forest.contract(list(nodes), list(ring), base, tau)
        self._log(f"blossom {NB} over {len(nodes)} nodes")
        self.status[NB] = OUTER
        self.tau[NB] = tau
        self.par[NB] = parent
        self._activate_blossom(NB, outer=True)
        # forest children that hung off absorbed nodes now hang off NB
        for child, p in list(self.par.items()):
            if p in nodes and child is not NB:
                self.par[child] = NB
        rep = base
        for X in nodes:
            verts = self.forest.vertices(X) if isinstance(X, Blossom) else [X.vertex]
            for v in verts:
                if v not in self._in_T:
                    self._t_add(self._anchor.get(v, node_base(X)), v)
                if self.tm.find(rep) != self.tm.find(v):
                    self.tm.merge(rep, v)
                self._activate_vertex(v, outer=True)
            prev = statuses[id(X)]
            if prev == INNER:
                if isinstance(X, Leaf):
                    self._scan_vertex(X.vertex, unmatched_only=True)
                else:
                    for v in verts:
                        self._scan_vertex(v)
            elif prev == OUTER and isinstance(X, Leaf):
                self._scan_vertex(X.vertex, matched_only=True)
            elif prev is None:
                for v in verts:
                    self._scan_vertex(v)
        return NB

    def _nca(self, a: Node, b: Node) -> Node:
        seen = set()
        x = a
        while x is not None:
            seen.add(id(x))
            x = self.par.get(x)
        x = b
        while x is not None:
            if id(x) in seen:
                return x
            x = self.par.get(x)
        raise InternalError("nodes in the same tree share no ancestor")

    def _path_up(self, node: Node, stop: Node) -> list[Node]:
        out = [node]
        while out[-1] is not stop:
            out.append(self.par[out[-1]])
        return out

    def _blossom_step(self, e: EdgeCopy) -> None:
        nu = self.forest.top(e.u)
        nv = self.forest.top(e.v)
        if nu is nv:
            assert e.is_loop() and isinstance(nu, Leaf)
            self._loop_step(e, nu)
            return
        if self.root_of(nu) is not self.root_of(nv):
            self._augment_across(e, nu, nv)
            return
        alpha = self._nca(nu, nv)
        up_u = self._path_up(nu, alpha)
        up_v = self._path_up(nv, alpha)
        nodes = list(reversed(up_u)) + up_v[:-1]
        ring = ([self.tau[x] for x in reversed(up_u[:-1])] + [e]
                + [self.tau[x] for x in up_v[:-1]])
        if self.mode == "bmatch" and self.status[alpha] == INNER:
            assert isinstance(alpha, Leaf)
            self._wrap_heavy(nodes, ring, alpha)
            return
        if (isinstance(alpha, Leaf)
                and self.deg[alpha.vertex] <= self.constraint(alpha.vertex) - 2):
            self._augment_closed(nodes, ring)
            return
        self._contract_cycle(nodes, ring, self.tau[alpha], self.par[alpha])

    def _loop_step(self, e: EdgeCopy, node: Leaf) -> None:
        v = node.vertex
        if self.deg[v] <= self.constraint(v) - 2:
            self._augment_closed([node], [e])
            return
        if self.mode == "bmatch" and self.status[node] == INNER:
            self._wrap_heavy([node], [e], node)
            return
        self._contract_cycle([node], [e], self.tau[node], self.par[node])

    def _wrap_heavy(self, nodes: list[Node], ring: list[EdgeCopy], alpha: Leaf) -> None:
        """b-matching: a cycle closing at an inner atom contracts to a heavy
        blossom, immediately hidden inside a light one over the tree edge."""
        f = self.tau[alpha]
        assert f is not None and not f.matched
        parent = self.par[alpha]
        grandpar = self.par[parent]
        tau_p = self.tau[parent]
        for X in nodes:
            self._drop_node(X, freeze=True)
        for e in ring:
            self.in_ring.add(e.cid)
        H = self.forest.contract(list(nodes), list(ring), alpha.vertex, f)
        self._log(f"heavy blossom {H} wrapped via {f}")
        for child, p in list(self.par.items()):
            if p in nodes:
                self.par[child] = H   # reattached below through the wrap
        u = f.other(alpha.vertex)
        if isinstance(parent, Leaf) and self.deg[u] <= self.constraint(u) - 2:
            trail = [(f, u, alpha.vertex)]
            trail += self.forest.compute_trail(H, alpha.vertex, 1)
            f2 = self._fresh_copy_like(f)
            trail += [(f2, alpha.vertex, u)]
            self._finish_augment(trail)
            raise _Augmented()
        f2 = self._fresh_copy_like(f)
        NB = self._contract_cycle([parent, H], [f, f2], tau_p, grandpar)
        for child, p in list(self.par.items()):
            if p is H and child is not NB:
                self.par[child] = NB

    # -- augments -----------------------------------------------------------------

    def _through(self, node: Node, a: Optional[EdgeCopy],
                 b: Optional[EdgeCopy]) -> list[TrailStep]:
        """Trail through a forest node between incident edges a and b,
        oriented a-side to b-side; None marks a trail end (at the base)."""
        if isinstance(node, Leaf):
            return []
        fr = self.forest
        eta = node.eta
        if a is None or (b is not None and b is eta):
            lead = b if a is None else a
            x = lead.u if fr.contains(node, lead.u) else lead.v
            j = 0 if lead.matched == fr.is_heavy(node) else 1
            return fr.compute_trail(node, x, j, reverse=(a is None))
        if b is None or a is eta:
            lead = a if b is None else b
            x = lead.u if fr.contains(node, lead.u) else lead.v
            j = 0 if lead.matched == fr.is_heavy(node) else 1
            return fr.compute_trail(node, x, j, reverse=(b is not None))
        # both edges meet the base with equal M-type: closed inner trail
        assert a.touches(node.base) and b.touches(node.base) and a.matched == b.matched
        return fr.compute_trail(node, node.base, 1)

    def _chain_trail(self, chain: list[Node], edges: list[Optional[EdgeCopy]]) -> list[TrailStep]:
        """Trail along forest nodes chain[i] between edges[i] and edges[i+1];
        edges has length len(chain)+1 with None at the free ends."""
        trail: list[TrailStep] = []
        for i, X in enumerate(chain):
            a, b = edges[i], edges[i + 1]
            if a is not None and i > 0:
                frm = (a.u if self.forest.contains_node(chain[i - 1], a.u) else a.v)
                trail.append((a, frm, a.other(frm)))
            trail += self._through(X, a, b)
        last = edges[-1]
        if last is not None:
            frm = last.u if self.forest.contains_node(chain[-1], last.u) else last.v
            trail.append((last, frm, last.other(frm)))
        return trail

    def _augment_across(self, e: EdgeCopy, nu: Node, nv: Node) -> None:
        self.counters["steps"] += 1
        self._log(f"augment via {e}")
        left = list(reversed(self._path_up(nu, self.root_of(nu))))   # root .. nu
        right = self._path_up(nv, self.root_of(nv))                  # nv .. root
        chain = left + right
        edges: list[Optional[EdgeCopy]] = [None]
        for X in left[1:]:
            edges.append(self.tau[X])
        edges.append(e)
        for X in right[:-1]:
            edges.append(self.tau[X])
        edges.append(None)
        trail = self._chain_trail(chain, edges)
        self._finish_augment(trail)
        raise _Augmented()

    def _augment_closed(self, nodes: list[Node], ring: list[EdgeCopy]) -> None:
        """Closed augmenting trail around a cycle rooted at a deficient atom."""
        self.counters["steps"] += 1
        self._log("closed augment")
        alpha = nodes[0]
        assert isinstance(alpha, Leaf)
        trail: list[TrailStep] = []
        k = len(nodes)
        for i, e in enumerate(ring):
            X = nodes[i]
            if i > 0:
                trail += self._through(X, ring[i - 1], e)
            if e.is_loop():
                frm = e.u
            else:
                frm = e.u if self.forest.contains_node(X, e.u) else e.v
            trail.append((e, frm, e.other(frm)))
        self._finish_augment(trail)
        raise _Augmented()

    def _finish_augment(self, trail: list[TrailStep]) -> None:
        if self.debug:
            self._assert_valid_augment(trail)
        for (e, _a, _b) in trail:
            d = 2 if e.is_loop() else 1
            if e.matched:
                self.deg[e.u] -= d
                if not e.is_loop():
                    self.deg[e.v] -= 1
            else:
                self.deg[e.u] += d
                if not e.is_loop():
                    self.deg[e.v] += 1
        self.forest.rematch_augment(trail)
        self.augmentations += 1

    def _assert_valid_augment(self, trail) -> None:
        assert trail, "empty augmenting trail"
        assert not trail[0][0].matched and not trail[-1][0].matched
        for s0, s1 in zip(trail, trail[1:]):
            assert s0[0].matched != s1[0].matched, "augmenting trail must alternate"
            assert s0[2] == s1[1], "augmenting trail must be connected"
        for (e, _a, _b) in trail:
            assert self.slack(e) == 0, f"augmenting trail edge {e} not tight"

    # -- expand steps ---------------------------------------------------------------

    def _set_eta_chain(self, B: Blossom, e: Optional[EdgeCopy]) -> None:
        cur: Node = B
        while isinstance(cur, Blossom):
            cur.eta = e
            cur = self.forest.alpha(cur)

    def _forest_child(self, B: Node) -> Optional[Node]:
        for c, p in self.par.items():
            if p is B:
                return c
        return None

    def _expand_step(self, B: Blossom) -> None:
        self.counters["steps"] += 1
        self._log(f"expand {B}")
        if self.mode == "ffactor":
            self._expand_f(B)
        else:
            self._expand_b(B)

    def _ring_path(self, B: Blossom, start: Node, first: EdgeCopy):
        """Nodes and connecting ring edges from `start` to the alpha child,
        leaving `start` through `first`."""
        children, ring = B.children, B.ring
        k = len(children)
        idx = children.index(start)
        alpha = self.forest.alpha(B)
        step = 1 if first is ring[idx] else -1
        if step == -1:
            assert first is ring[(idx - 1) % k]
        nodes = [start]
        edges = []
        cur, ecur = idx, first
        while True:
            nxt = (cur + step) % k
            edges.append(ecur)
            nodes.append(children[nxt])
            if children[nxt] is alpha:
                return nodes, edges
            cur = nxt
            ecur = ring[cur] if step == 1 else ring[(cur - 1) % k]

    def _exit_edge(self, B: Blossom, start: Node, e: EdgeCopy) -> EdgeCopy:
        """Ring edge through which the trail alternating with e leaves start."""
        if isinstance(start, Leaf):
            i = 0 if e.matched == self.forest.is_heavy(B) else 1
            want = self.forest.is_heavy(B) if i == 1 else not self.forest.is_heavy(B)
            cands = [x for x in self.forest._ring_edges_at(B, start) if x.matched == want]
            assert cands, "no alternating exit from atom"
            return cands[0]
        assert start.eta is not None
        return start.eta

    def _attach_path(self, path_nodes: list[Node], links: list[EdgeCopy],
                     parent: Optional[Node]) -> Node:
        """Insert a path of restored nodes into the forest (f-factor rules)."""
        prev = parent
        for X, g in zip(path_nodes, links):
            if isinstance(X, Leaf):
                st = OUTER if g.matched else INNER
            else:
                st = OUTER if X.eta is g else INNER
            self._make_node(X, st, g, prev)
            entry = g.u if self.forest.contains_node(X, g.u) else g.v
            if st == OUTER:
                self._enter_outer_tree(X, attach=entry, anchor_parent=None)
            else:
                self._enter_inner_tree(X, entry_vertex=entry, anchor_parent=None)
            self._scan_node_newly(X, st)
            prev = X
        return prev

    def _release_nodes(self, gone_children: list[Node]) -> None:
        gone_verts: list[int] = []
        for c in gone_children:
            gone_verts.extend(
                self.forest.vertices(c) if isinstance(c, Blossom) else [c.vertex])
        for w in gone_verts:
            self._freeze_vertex(w)
        if self.mode == "bmatch":
            for c in gone_children:
                self._discard_tree(c)
        self._rescan_towards(gone_verts)

    # ..... f-factors .....

    def _expand_f(self, B: Blossom) -> None:
        fr = self.forest
        e = self.tau[B]
        v = e.u if fr.contains(B, e.u) else e.v
        child_node = self._forest_child(B)
        parent = self.par[B]
        A_v = fr.child_containing(B, v)
        al = fr.alpha(B)
        if A_v is al and v == B.base and e.matched != fr.is_heavy(B):
            # the trail is the whole inner cycle: B itself turns outer
            self._drop_node(B, freeze=True)
            self._set_eta_chain(B, e)
            self._make_node(B, OUTER, e, parent)
            self._enter_outer_tree(B, attach=B.base, anchor_parent=None)
            self._scan_node_newly(B, OUTER)
            return
        if A_v is al:
            path_nodes, path_edges = [al], []
        else:
            path_nodes, path_edges = self._ring_path(B, A_v, self._exit_edge(B, A_v, e))
        self._drop_node(B, freeze=True)
        children, ring = fr.splice_expand(B)
        for re_ in ring:
            self.in_ring.discard(re_.cid)
        on_path = set(id(x) for x in path_nodes)
        last = self._attach_path(path_nodes, [e] + path_edges, parent)
        if child_node is not None:
            self.par[child_node] = last
        self._release_nodes([c for c in children if id(c) not in on_path])

    # ..... b-matching .....

    def _expand_b(self, B: Blossom) -> None:
        e = self.tau[B]
        f = B.eta
        assert f is not None and f.matched
        child_node = self._forest_child(B)
        parent = self.par[B]
        self._drop_node(B, freeze=True)
        last = self._expand_b_rec(B, e, f, parent)
        if child_node is not None:
            self.par[child_node] = last

    def _expand_b_rec(self, node: Node, e: EdgeCopy, f: EdgeCopy, prev: Node) -> Node:
        """Rebuild the forest path through `node` joining e to f; returns the
        forest node the trail ends in (where f attaches)."""
        fr = self.forest
        if isinstance(node, Leaf) or node.z > 0:
            st = OUTER if e.matched else INNER
            self._make_node(node, st, e, prev)
            entry = e.u if fr.contains_node(node, e.u) else e.v
            if st == OUTER:
                self._enter_outer_tree(node, attach=entry, anchor_parent=None)
            else:
                self._enter_inner_tree(node, entry_vertex=entry, anchor_parent=None)
            self._scan_node_newly(node, st)
            return node
        heavy = fr.is_heavy(node)
        base = node.base
        if (not heavy) and e.matched and e.touches(base):
            self._set_eta_chain(node, e)
            self._make_node(node, OUTER, e, prev)
            self._enter_outer_tree(node, attach=base, anchor_parent=None)
            self._scan_node_newly(node, OUTER)
            return node
        if (not e.matched) and (not f.matched) and e.touches(base) and f.touches(base):
            u = e.other(base)
            P = prev
            if isinstance(P, Leaf) and self.deg[u] <= self.constraint(u) - 2:
                trail = [(e, u, base)] + fr.compute_trail(node, base, 1)
                f2 = self._fresh_copy_like(e)
                trail += [(f2, base, u)]
                self._finish_augment(trail)
                raise _Augmented()
            f2 = self._fresh_copy_like(e)
            self._set_eta_chain(node, e)
            tau_p = self.tau.get(P)
            grand = self.par.get(P)
            return self._contract_cycle([P, node], [e, f2], tau_p, grand)
        # general case: path through the cycle from e's entry to the base child
        entry_vertex = e.u if fr.contains(node, e.u) else e.v
        A_v = fr.child_containing(node, entry_vertex)
        al = fr.alpha(node)
        if A_v is al:
            path_nodes, path_edges = [al], []
        else:
            path_nodes, path_edges = self._ring_path(node, A_v, self._exit_edge(node, A_v, e))
        children, ring = fr.splice_expand(node)
        for re_ in ring:
            self.in_ring.discard(re_.cid)
        on_path = set(id(x) for x in path_nodes)
        links = [e] + path_edges + [f]
        cur_prev = prev
        for i, X in enumerate(path_nodes):
            cur_prev = self._expand_b_rec(X, links[i], links[i + 1], cur_prev)
        self._release_nodes([c for c in children if id(c) not in on_path])
        return cur_prev

    def _discard_tree(self, node: Node) -> None:
        """Dissolve maximal blossoms that are not light and mature."""
        if isinstance(node, Leaf):
            return
        if (not self.forest.is_heavy(node)) and self.forest.is_mature(
                node, self.adj, self.constraint, self.mode):
            return
        assert node.z == 0, "a blossom with positive dual must be light and mature"
        children, ring = self.forest.splice_expand(node)
        for e in ring:
            self.in_ring.discard(e.cid)
        self._log(f"discard {node}")
        for c in children:
            self._discard_tree(c)

    def discard_all(self) -> None:
        seen = set()
        for v in range(self.n):
            node = self.forest.top(v)
            if id(node) in seen:
                continue
            seen.add(id(node))
            self._discard_tree(node)

    # -- deficiency witnesses ----------------------------------------------------

    def _witness(self) -> dict:
        inner_atoms = sorted(
            x.vertex for x, st in self.status.items() if isinstance(x, Leaf) and st == INNER)
        outer_atoms = sorted(
            x.vertex for x, st in self.status.items() if isinstance(x, Leaf) and st == OUTER)
        size = sum(s.matched_count() for s in self.slots)
        if self.mode == "bmatch":
            bound = bmatch_formula_value(self.graph, self.constraint, set(inner_atoms))
            wit = {"kind": "bmatch", "I": inner_atoms, "max_size": size, "bound": bound}
        else:
            bound = ffactor_formula_value(
                self.graph, self.constraint, set(inner_atoms), set(outer_atoms))
            wit = {"kind": "ffactor", "I": inner_atoms, "O": outer_atoms,
                   "max_size": size, "bound": bound}
        if bound != size:
            raise InternalError(f"witness value {bound} != matching size {size}")
        return wit

    # -- main loop -------------------------------------------------------------------

    def run_search(self) -> str:
        """One search: "augmented", or raises Deficiency on failure."""
        self.searches += 1
        self._reset_search()
        roots = self.free_nodes()
        if not roots:
            raise InternalError("search started with no free nodes")
        for node in roots:
            self._make_node(node, OUTER, None, None)
            self._enter_outer_tree(node, attach=node_base(node), anchor_parent=None)
            self._scan_node_newly(node, OUTER)
        guard = 0
        limit = 400 * (self.n + sum(len(s.copies) for s in self.slots) + 10) ** 2
        try:
            while True:
                guard += 1
                if guard > limit:
                    raise InternalError("search did not terminate")
                k1 = self.grow_heap.min_key()
                k2 = self.tm.min_key()
                k3 = self.expand_heap.min_key()
                k4 = self.loop_heap.min_key()
                k = min(k1, k2, k3, k4)
                if k == INF:
                    self._freeze_all()
                    raise Deficiency(self._witness())
                if k > self.delta:
                    self._advance(k)
                self.counters["events"] += 1
                self._tick()
                if k == k1:
                    _key, (e, x, w, node) = self.grow_heap.pop_min()
                    if self.status.get(node) in (INNER, OUTER):
                        continue
                    self.best_grow.pop(id(node), None)
                    if (self.forest.top(w) is not node or not self.eligible_at(e, x)
                            or e.cid in self._tau_cids or not (e.matched or self._available(e))):
                        self._rescan_towards(
                            self.forest.vertices(node) if isinstance(node, Blossom)
                            else [node.vertex])
                        continue
                    if self.debug:
                        assert self.slack(e) == 0, f"grow edge {e} slack {self.slack(e)}"
                    self._grow_step(e, x, w, node)
                elif k == k4:
                    _key, e = self.loop_heap.pop_min()
                    node = self.forest.top(e.u)
                    if not isinstance(node, Leaf) or not self.eligible_at(e, e.u):
                        continue
                    if not e.matched and not self._available(e):
                        continue
                    if self.debug:
                        assert self.slack(e) == 0
                    self._blossom_step(e)
                elif k == k2:
                    found = self.tm.find_min()
                    if found is None:
                        continue
                    entry, _key = found
                    e = entry.payload
                    nu = self.forest.top(e.u)
                    nv = self.forest.top(e.v)
                    ok = (nu is not nv
                          and e.cid not in self._tau_cids
                          and (e.matched or self._available(e))
                          and self.eligible_at(e, e.u)
                          and self.eligible_at(e, e.v))
                    self.tm.discard_min()
                    if not ok:
                        continue
                    if self.debug:
                        assert self.slack(e) == 0, f"blossom edge {e} slack {self.slack(e)}"
                    self._blossom_step(e)
                else:
                    _key, B = self.expand_heap.pop_min()
                    if self.status.get(B) != INNER:
                        continue
                    zb = self.z_of(B)
                    if zb != 0:
                        if zb > 0:
                            self.expand_heap.insert(self.delta + half(zb), B)
                        continue
                    self._expand_step(B)
                if self.debug:
                    self._check_invariants()
        except _Augmented:
            self._freeze_all()
            if self.mode == "bmatch":
                self.discard_all()
            if self.debug:
                self._check_invariants(post_augment=True)
            return "augmented"
        finally:
            self.per_search_work.append(
                self.counters["work"] - self._work0
                + self.tm.counters.charged_units
                + self.grow_heap.comparisons + self.tm.heap.comparisons)

    def _advance(self, k) -> None:
        before = None
        if self.debug:
            before = {
                c.cid: self.slack(c)
                for s in self.slots for c in s.copies if c.cid not in self._tau_cids
            }
        d = k - self.delta
        assert d > 0
        self.delta = k
        self._log(f"adjust duals by {d}")
        if self.debug:
            self._check_2delta(before, d)

    def _freeze_all(self) -> None:
        for v in list(self.ysign.keys()):
            self._freeze_vertex(v)
        for B in list(self.zoff.keys()):
            self._freeze_blossom(B)

    def solve(self, max_searches: Optional[int] = None) -> None:
        """Run searches until every vertex is saturated (or Deficiency)."""
        while self.free_nodes():
            if max_searches is not None and self.searches >= max_searches:
                return
            self.run_search()

    # -- results / initialization ------------------------------------------------

    def matching_vector(self) -> list[int]:
        return [s.matched_count() for s in self.slots]

    def weight(self) -> int:
        return sum(s.matched_count() * s.w for s in self.slots) // 2

    def set_initial_duals(self, y2) -> None:
        """Install initial vertex duals, already in doubled units."""
        self.y_raw = list(y2)

    def init_matching(self, x: list[int]) -> None:
        """Install an initial partial matching (per-slot copy counts)."""
        for s, k in zip(self.slots, x):
            assert k >= 0 and (s.cap is None or k <= s.cap)
            while len(s.copies) < k:
                self._new_copy(s)
            took = 0
            for c in s.copies:
                if took == k:
                    break
                if not c.matched:
                    c.matched = True
                    took += 1
            assert took == k
            self.deg[s.u] += 2 * k if s.u == s.v else k
            if s.u != s.v:
                self.deg[s.v] += k

    def validate_init(self) -> None:
        """Dual feasibility of the starting state (no blossoms assumed)."""
        for s in self.slots:
            for c in s.copies:
                if self.slack(c) < 0:
                    raise ValueError(f"initial duals infeasible on {c}")
                if self.mode == "bmatch" and c.matched and self.slack(c) != 0:
                    raise ValueError(f"matched edge {c} not tight at init")
            if (s.cap is None or len(s.copies) < s.cap or
                    any(not c.matched for c in s.copies)):
                if self.y(s.u) + self.y(s.v) - s.w < 0:
                    raise ValueError(f"initial duals infeasible on slot {s.idx}")

    # -- debug invariants ---------------------------------------------------------

    def _check_2delta(self, before: dict, d) -> None:
        for s in self.slots:
            for c in s.copies:
                if c.cid not in before or c.cid in self._tau_cids:
                    continue
                nu, nv = self.forest.top(c.u), self.forest.top(c.v)
                if nu is nv and not c.is_loop():
                    continue
                if not c.matched and not self._available(c):
                    continue
                both = self.eligible_at(c, c.u) and self.eligible_at(c, c.v)
                after = self.slack(c)
                if both:
                    assert after == before[c.cid] - 2 * d, (
                        f"{c}: slack {before[c.cid]} -> {after}, expected -2*{d}")

    def _check_invariants(self, post_augment: bool = False) -> None:
        for s in self.slots:
            for c in s.copies:
                sl = self.slack(c)
                assert sl >= 0, f"negative slack on {c}: {sl}"
                if self.mode == "bmatch" and c.matched:
                    assert sl == 0, f"matched edge {c} not tight"
                if c.cid in self._tau_cids and not post_augment:
                    assert sl == 0, f"forest edge {c} not tight"
        for B in self.forest.blossoms:
            if B.dead:
                continue
            for e in B.ring:
                assert self.slack(e) == 0, f"blossom ring edge {e} not tight"
            assert self.z_of(B) >= 0
            if B.z > 0 and B not in self.zoff and self.mode == "bmatch":
                assert not self.forest.is_heavy(B)
                assert self.forest.is_mature(B, self.adj, self.constraint, self.mode)
        for (cid, x) in list(self._elig_seen):
            slot = self.copy_slot.get(cid)
            c = None
            if slot is not None:
                c = next((cc for cc in slot.copies if cc.cid == cid), None)
            if (c is None or cid in self._tau_cids or cid in self.in_ring
                    or post_augment):
                self._elig_seen.discard((cid, x))
                continue
            nu, nv = self.forest.top(c.u), self.forest.top(c.v)
            if c.is_loop() and isinstance(nu, Blossom):
                self._elig_seen.discard((cid, x))   # loop left the contracted graph
                continue
            if ((nu is nv and not c.is_loop())
                    or self.status.get(self.forest.top(x)) not in (INNER, OUTER)):
                self._elig_seen.discard((cid, x))
                continue
            assert self.eligible_at(c, x), f"edge {c} lost eligibility at {x}"
        if post_augment:
            return
        for node, st in self.status.items():
            t = self.tau.get(node)
            if t is None:
                continue
            if isinstance(node, Leaf):
                assert (st == OUTER) == t.matched
            elif self.mode == "ffactor":
                assert (st == OUTER) == (node.eta is t)


def components(n: int, edges, removed: set[int]) -> list[list[int]]:
    seen = set()
    adj = {v: [] for v in range(n)}
    for e in edges:
        if e.u in removed or e.v in removed:
            continue
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)
    out = []
    for v in range(n):
        if v in removed or v in seen:
            continue
        comp = [v]
        seen.add(v)
        stack = [v]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        out.append(sorted(comp))
    return out


def bmatch_formula_value(g: Multigraph, b: DegreeFn, I: set[int]) -> int:
    """b(I) + sum over nontrivial components C of G - I of floor(b(C)/2)."""
    val = sum(b(v) for v in I)
    has_loop = {e.u for e in g.edges if e.is_loop()}
    for comp in components(g.n, g.edges, I):
        if len(comp) == 1 and comp[0] not in has_loop:
            continue
        val += sum(b(v) for v in comp) // 2
    return val


def ffactor_formula_value(g: Multigraph, f: DegreeFn, I: set[int], O: set[int]) -> int:
    """f(I) + |gamma(O)| + sum over components C of G-I-O of
    floor((f(C) + |E[C,O]|) / 2), multiplicities counted."""
    val = sum(f(v) for v in I)
    for e in g.edges:
        if e.u in O and e.v in O:
            val += e.mult
    removed = I | O
    for comp in components(g.n, g.edges, removed):
        cs = set(comp)
        cross = 0
        for e in g.edges:
            if e.u == e.v:
                continue
            if (e.u in cs and e.v in O) or (e.v in cs and e.u in O):
                cross += e.mult
        val += (sum(f(v) for v in comp) + cross) // 2
    return val
