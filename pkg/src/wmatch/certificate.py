"""Certificate extraction: matching + duals + blossom family, JSON-shaped.

All dual values are stored at twice their LP value (`dual_scale` = 2), which
keeps them integral for every uniformly initialized solve; warm starts can
produce exact rationals, serialized as "p/q" strings.  Edge copies are
referenced by a stable copy id so base edges can be told apart from the
other copies of their slot.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .blossoms import Blossom, Leaf
from .multigraph import UNBOUNDED


def num_to_json(x):
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return f"{x.numerator}/{x.denominator}"
    return x


def num_from_json(x):
    if isinstance(x, str):
        p, q = x.split("/")
        return Fraction(int(p), int(q))
    return x


def _edge_ref(e):
    return None if e is None else {"cid": e.cid, "slot": e.slot, "matched": e.matched}


def _blossom_record(engine, node):
    if isinstance(node, Leaf):
        return {"vertex": node.vertex}
    fr = engine.forest
    verts = sorted(fr.vertices(node))
    vset = set(verts)
    crossing_matched = []
    seen = set()
    for v in verts:
        for c in engine.adj[v]:
            if c.matched and c.cid not in seen and ((c.u in vset) != (c.v in vset)):
                seen.add(c.cid)
                crossing_matched.append(c)
    iset = {c.cid: c for c in crossing_matched}
    if node.eta is not None:
        if node.eta.cid in iset:
            del iset[node.eta.cid]
        else:
            iset[node.eta.cid] = node.eta
    return {
        "id": node.id,
        "mtype": "heavy" if fr.is_heavy(node) else "light",
        "beta": node.base,
        "eta": _edge_ref(node.eta),
        "z": num_to_json(node.z),
        "I": [_edge_ref(c) for c in sorted(iset.values(), key=lambda c: c.cid)],
        "ring": [_edge_ref(e) for e in node.ring],
        "children": [_blossom_record(engine, c) for c in node.children],
    }


def build_certificate(engine) -> dict:
    """Snapshot the solved engine state into a self-contained certificate."""
    g = engine.graph
    seen = set()
    tops = []
    for v in range(engine.n):
        node = engine.forest.top(v)
        if isinstance(node, Blossom) and id(node) not in seen:
            seen.add(id(node))
            tops.append(node)
    matched_cids = {s.idx: sorted(c.cid for c in s.copies if c.matched)
                    for s in engine.slots if s.matched_count()}
    return {
        "kind": engine.mode,
        "n": engine.n,
        "dual_scale": 2,
        "edges": [[e.u, e.v, e.w, ("*" if e.mult == UNBOUNDED else e.mult)]
                  for e in g.edges],
        "constraint": list(engine.constraint.values),
        "x": engine.matching_vector(),
        "matched_cids": matched_cids,
        "y": [num_to_json(engine.y(v)) for v in range(engine.n)],
        "blossoms": [_blossom_record(engine, b) for b in tops],
    }


def dump_certificate(cert: dict) -> str:
    return json.dumps(cert, indent=1, sort_keys=True) + "\n"


def load_certificate(text: str) -> dict:
    return json.loads(text)
