"""Tree-blossom-merging: make_edge / merge / find_min over a supporting tree.

Vertices live in a tree that grows by ``add_leaf``; each vertex starts as a
singleton blossom and blossoms combine by ``merge``.  ``make_edge`` hands in
a weighted edge between tree vertices and ``find_min`` reports a minimum-key
edge joining two distinct current blossoms, in amortized O(m + n log n)
total work.

The accounting works through edge *ranks*.  An edge gets classified long /
short / down against the blossoms containing its ends; the classification
names an end u and a rank r such that any blossom spanning both ends has
rank >= r > r(A_u).  Edges wait in per-blossom ``loose`` lists, then settle
into per-(blossom, rank) packets; a merge only reopens packets of rank at
most the merged rank, concatenating the higher packets untouched.  A global
heap of per-blossom minima, with lazy deletion, answers ``find_min``.
"""

from __future__ import annotations

import math
from typing import Any, Optional

from .heap import Heap

LONG, SHORT, DOWN = "l", "s", "d"

INF = math.inf


def classify(r_e: int, r_av: int, r_aw: int) -> tuple[str, str, int]:
    """Edge type per the rank table.

    Returns (kind, end, rank) where end is "v" or "w", the end the edge is
    associated with.  Always rank > r(A_end).
    """
    if r_e > r_av:
        return (LONG, "v", r_e)
    if r_av <= r_aw:
        return (SHORT, "v", max(r_av + 1, r_aw))
    return (DOWN, "w", r_av)


class TbmEdge:
    __slots__ = (
        "v", "w", "key", "payload", "seq",
        "kind", "u", "rank", "credits",
        "next", "prev", "home",
    )

    def __init__(self, v, w, key, payload, seq):
        self.v = v              # deeper end
        self.w = w
        self.key = key
        self.payload = payload
        self.seq = seq
        self.kind = None
        self.u = None           # vertex the edge is associated with
        self.rank = None
        self.credits = 0
        self.next: Optional[TbmEdge] = None
        self.prev: Optional[TbmEdge] = None
        self.home = None        # Packet or ("loose", blossom-root)

    def __repr__(self):
        return f"<TbmEdge {self.v}-{self.w} key={self.key} {self.kind}:{self.rank}>"


class Packet:
    """Ring of same-rank edges of one blossom, with its own minimum."""

    __slots__ = ("rank", "head", "count", "smallest")

    def __init__(self, rank: int):
        self.rank = rank
        self.head: Optional[TbmEdge] = None
        self.count = 0
        self.smallest: Optional[TbmEdge] = None

    def add(self, e: TbmEdge) -> None:
        if self.head is None:
            self.head = e
            e.next = e.prev = e
        else:
            h = self.head
            e.prev = h.prev
            e.next = h
            h.prev.next = e
            h.prev = e
        e.home = self
        self.count += 1
        if self.smallest is None or (e.key, e.seq) < (self.smallest.key, self.smallest.seq):
            self.smallest = e

    def concat(self, other: "Packet") -> None:
        """Splice other's ring onto this one in O(1)."""
        if other.head is None:
            return
        if self.head is None:
            self.head = other.head
        else:
            a_tail = self.head.prev
            b_head = other.head
            b_tail = b_head.prev
            a_tail.next = b_head
            b_head.prev = a_tail
            b_tail.next = self.head
            self.head.prev = b_tail
        cur = other.head
        for _ in range(other.count):
            cur.home = self
            cur = cur.next
        self.count += other.count
        if other.smallest is not None and (
            self.smallest is None
            or (other.smallest.key, other.smallest.seq) < (self.smallest.key, self.smallest.seq)
        ):
            self.smallest = other.smallest
        other.head = None
        other.count = 0
        other.smallest = None

    def edges(self) -> list[TbmEdge]:
        out = []
        cur = self.head
        for _ in range(self.count):
            out.append(cur)
            cur = cur.next
        return out


class BlossomRec:
    __slots__ = ("root", "size", "rank", "packets", "loose", "smallest", "hnode")

    def __init__(self, root: int):
        self.root = root
        self.size = 1
        self.rank = 0
        self.packets: list[Packet] = []    # unsorted, empty packets dropped
        self.loose: list[TbmEdge] = []
        self.smallest: Optional[TbmEdge] = None
        self.hnode = None

    def lists_min(self) -> Optional[TbmEdge]:
        best = None
        for p in self.packets:
            e = p.smallest
            if e is not None and (best is None or (e.key, e.seq) < (best.key, best.seq)):
                best = e
        for e in self.loose:
            if best is None or (e.key, e.seq) < (best.key, best.seq):
                best = e
        return best


class GatherArray:
    """Bucket array I[0..n) with a touched-index list, cleared after use."""

    def __init__(self, n: int):
        self.buckets: list[list] = [[] for _ in range(n)]
        self.touched: list[int] = []

    def add(self, i: int, item) -> None:
        b = self.buckets[i]
        if not b:
            self.touched.append(i)
        b.append(item)

    def drain(self) -> list[tuple[int, list]]:
        out = []
        for i in self.touched:
            out.append((i, self.buckets[i]))
            self.buckets[i] = []
        self.touched.clear()
        return out


class Counters:
    __slots__ = ("make_edges", "merges", "charged_units", "stem_charges", "find_mins")

    def __init__(self):
        self.make_edges = 0
        self.merges = 0
        self.charged_units = 0
        self.stem_charges = 0
        self.find_mins = 0

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__slots__}


class TreeMerge:
    """One instance manages one supporting forest and its blossom partition."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.parent: dict[int, Optional[int]] = {}
        self.depth: dict[int, int] = {}
        # floor(log2 s) table, s in [1..capacity]
        self._logs = [0] * (capacity + 2)
        for s in range(2, capacity + 2):
            self._logs[s] = self._logs[s >> 1] + 1
        self.log_n = self._logs[max(capacity, 1)]
        self._uf: dict[int, int] = {}
        self._recs: dict[int, BlossomRec] = {}
        self.heap = Heap()
        self._gather = GatherArray(capacity + 1)
        self._rank_gather = GatherArray(self.log_n + 2)
        self._seq = 0
        self.counters = Counters()

    # -- supporting tree ---------------------------------------------------

    def add_leaf(self, x: Optional[int], y: int) -> None:
        """Add vertex y under x (x None makes y a root)."""
        if y in self.depth:
            raise ValueError(f"vertex {y} already in tree")
        if x is None:
            self.parent[y] = None
            self.depth[y] = 0
        else:
            if x not in self.depth:
                raise ValueError(f"parent {x} not in tree")
            self.parent[y] = x
            self.depth[y] = self.depth[x] + 1
        self._uf[y] = y
        rec = BlossomRec(y)
        self._recs[y] = rec
        rec.hnode = self.heap.insert(INF, y)

    # -- blossom partition -------------------------------------------------

    def find(self, v: int) -> int:
        uf = self._uf
        root = v
        while uf[root] != root:
            root = uf[root]
        while uf[v] != root:
            uf[v], v = root, uf[v]
        return root

    def _rec(self, v: int) -> BlossomRec:
        return self._recs[self.find(v)]

    def _log(self, s: int) -> int:
        return self._logs[s]

    # -- make_edge ---------------------------------------------------------

    def make_edge(self, v: int, w: int, key, payload: Any = None) -> Optional[TbmEdge]:
        """Register edge vw with the given key; discarded if intra-blossom."""
        self.counters.make_edges += 1
        self.counters.charged_units += 1
        rv, rw = self.find(v), self.find(w)
        if rv == rw:
            return None
        if self.depth[v] < self.depth[w]:
            v, w = w, v
            rv, rw = rw, rv
        e = TbmEdge(v, w, key, payload, self._seq)
        self._seq += 1
        self._classify_and_file(e, rv, rw, into_packet_of=None)
        return e

    def _edge_rank(self, e: TbmEdge) -> int:
        span = self.depth[e.v] - self.depth[e.w]
        return self._log(span) if span >= 1 else 0

    def _classify_and_file(self, e: TbmEdge, rv: int, rw: int, into_packet_of) -> None:
        """(Re)classify e and put it on the right list.

        into_packet_of: blossom root whose packets may receive e (the freshly
        merged blossom), or None to force the loose list (make_edge path).
        """
        av, aw = self._recs[rv], self._recs[rw]
        kind, end, rank = classify(self._edge_rank(e), av.rank, aw.rank)
        e.kind, e.rank = kind, rank
        e.u = e.v if end == "v" else e.w
        ru = rv if end == "v" else rw
        if into_packet_of is not None and ru == into_packet_of:
            self._rank_gather.add(rank, e)
            e.credits = 2 if kind == DOWN else 0
        else:
            rec = self._recs[ru]
            rec.loose.append(e)
            e.home = ("loose", ru)
            e.credits = 3 if kind == DOWN else 1
            self._maybe_improve(rec, e)

    def _maybe_improve(self, rec: BlossomRec, e: TbmEdge) -> None:
        if rec.smallest is None or (e.key, e.seq) < (rec.smallest.key, rec.smallest.seq):
            rec.smallest = e
            self.heap.decrease_key(rec.hnode, e.key)

    # -- merge ---------------------------------------------------------------

    def merge(self, a: int, b: int) -> int:
        """Combine the blossoms of vertices a and b; returns the new root."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            raise ValueError("merge of a blossom with itself")
        self.counters.merges += 1
        self.counters.charged_units += self.log_n + 1
        x, y = self._recs[ra], self._recs[rb]
        if x.size < y.size:
            x, y = y, x
            ra, rb = rb, ra
        # union by size, path halving in find()
        self._uf[rb] = ra
        z = x
        z.size = x.size + y.size
        new_rank = self._log(z.size)

        # collect R_0: both loose lists plus packets of rank <= new rank
        r0: list[TbmEdge] = []
        r0.extend(x.loose)
        r0.extend(y.loose)
        x.loose = []
        y.loose = []
        keep_x: list[Packet] = []
        for p in x.packets:
            if p.rank <= new_rank:
                r0.extend(p.edges())
            else:
                keep_x.append(p)
        high: dict[int, Packet] = {}
        for p in keep_x:
            high[p.rank] = p
        for p in y.packets:
            if p.rank <= new_rank:
                r0.extend(p.edges())
            elif p.rank in high:
                high[p.rank].concat(p)
            else:
                high[p.rank] = p
        x.packets = []
        y.packets = []
        z.rank = new_rank

        # prune: keep one cheapest edge per neighbouring blossom
        self.counters.charged_units += len(r0)
        survivors: list[TbmEdge] = []
        for e in r0:
            if e.credits > 0:
                e.credits -= 1
            else:
                self.counters.stem_charges += 1
            rv, rw = self.find(e.v), self.find(e.w)
            if rv == rw:
                continue
            other = rw if rv == ra else rv
            self._gather.add(other, e)
        for _other, bucket in self._gather.drain():
            best = bucket[0]
            for e in bucket[1:]:
                if (e.key, e.seq) < (best.key, best.seq):
                    best = e
            survivors.append(best)

        # reclassify survivors: into Z's packets or a neighbour's loose list
        for e in survivors:
            rv, rw = self.find(e.v), self.find(e.w)
            self._classify_and_file(e, rv, rw, into_packet_of=ra)

        # form Z's packets: gathered fresh edges plus untouched high packets
        packets: list[Packet] = []
        for rank, bucket in self._rank_gather.drain():
            p = high.pop(rank, None)
            if p is None:
                p = Packet(rank)
            for e in bucket:
                p.add(e)
            packets.append(p)
        packets.extend(high.values())
        z.packets = [p for p in packets if p.count > 0]
        z.root = ra
        self._recs[ra] = z
        if rb in self._recs:
            del self._recs[rb]

        # refresh the global heap entry
        if x.hnode is not None and not x.hnode.dead:
            self.heap.lazy_delete(x.hnode)
        if y.hnode is not None and not y.hnode.dead:
            self.heap.lazy_delete(y.hnode)
        z.smallest = z.lists_min()
        z.hnode = self.heap.insert(z.smallest.key if z.smallest else INF, ra)
        return ra

    # -- find_min ------------------------------------------------------------

    def find_min(self) -> Optional[tuple[TbmEdge, Any]]:
        """Minimum-key edge joining two current blossoms: (edge, key)."""
        self.counters.find_mins += 1
        top = self.heap.extract_min_live()
        if top is None or top[0] == INF:
            return None
        key, root = top
        e = self._recs[root].smallest
        return (e, key)

    def min_key(self):
        top = self.heap.extract_min_live()
        return INF if top is None or top[0] == INF else top[0]

    def discard_min(self) -> None:
        """Drop the edge find_min would return (engine-level staleness)."""
        top = self.heap.extract_min_live()
        if top is None:
            return
        rec = self._recs[top[1]]
        e = rec.smallest
        assert e is not None
        if isinstance(e.home, Packet):
            p = e.home
            if p.count == 1:
                p.head = None
                p.count = 0
                rec.packets.remove(p)
            else:
                e.prev.next = e.next
                e.next.prev = e.prev
                if p.head is e:
                    p.head = e.next
                p.count -= 1
                if p.smallest is e:
                    p.smallest = None
                    cur = p.head
                    for _ in range(p.count):
                        if p.smallest is None or (cur.key, cur.seq) < (p.smallest.key, p.smallest.seq):
                            p.smallest = cur
                        cur = cur.next
        else:
            rec.loose.remove(e)
        e.home = None
        self.heap.lazy_delete(rec.hnode)
        rec.smallest = rec.lists_min()
        rec.hnode = self.heap.insert(rec.smallest.key if rec.smallest else INF, rec.root)

    # -- debugging -----------------------------------------------------------

    def dump(self) -> dict:
        out = {}
        for root, rec in self._recs.items():
            out[root] = {
                "size": rec.size,
                "rank": rec.rank,
                "loose": len(rec.loose),
                "packet_ranks": sorted(p.rank for p in rec.packets),
                "smallest": None if rec.smallest is None else rec.smallest.key,
            }
        return out

    def blossom_edges(self) -> list[TbmEdge]:
        out = []
        for rec in self._recs.values():
            out.extend(rec.loose)
            for p in rec.packets:
                out.extend(p.edges())
        return out
