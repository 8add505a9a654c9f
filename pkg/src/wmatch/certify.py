"""Independent optimality verification and brute-force oracles.

The verifier recomputes every dual edge value from the certificate alone
(no solver offsets, no solver code paths) and reports each violated
complementary-slackness or feasibility condition with its slack amount.
The brute-force enumerators are the ground truth for the test suite.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .certificate import num_from_json
from .multigraph import DegreeFn, Multigraph, UNBOUNDED


# ---------------------------------------------------------------------------
# certificate verification

class _Blossom:
    def __init__(self, rec, parent=None):
        self.rec = rec
        self.parent = parent
        self.z = num_from_json(rec["z"])
        self.beta = rec["beta"]
        self.eta = rec.get("eta")
        self.mtype = rec["mtype"]
        self.children = []
        self.verts: set[int] = set()
        for c in rec["children"]:
            if "vertex" in c:
                self.verts.add(c["vertex"])
            else:
                sub = _Blossom(c, self)
                self.children.append(sub)
                self.verts |= sub.verts

    def all(self):
        yield self
        for c in self.children:
            yield from c.all()


def verify_certificate(graph: Multigraph, constraint: DegreeFn, cert: dict) -> list[str]:
    """Check a certificate against an instance; returns a list of violations
    (empty = optimal).  Dual values are read at cert["dual_scale"] times
    their LP value; weights are scaled to match."""
    v0 = []

    def bad(msg):
        v0.append(msg)

    scale = cert.get("dual_scale", 2)
    n = graph.n
    if cert["n"] != n or len(cert["x"]) != len(graph.edges):
        return ["certificate does not match the instance shape"]
    for i, (e, ce) in enumerate(zip(graph.edges, cert["edges"])):
        mult = UNBOUNDED if ce[3] == "*" else ce[3]
        if [e.u, e.v, e.w] != ce[:3] or e.mult != mult:
            bad(f"edge {i}: certificate edge {ce} differs from instance {e}")
    if list(cert["constraint"]) != list(constraint.values):
        bad("degree constraints differ from instance")
    if v0:
        return v0

    x = list(cert["x"])
    y = [num_from_json(t) for t in cert["y"]]
    kind = cert["kind"]
    blossoms: list[_Blossom] = []
    for rec in cert["blossoms"]:
        blossoms.append(_Blossom(rec))
    every = [b for top in blossoms for b in top.all()]

    # matched copy ids per slot, and the eta copy registry
    matched_cids = {int(k): set(vv) for k, vv in cert.get("matched_cids", {}).items()}
    for i, cnt in enumerate(x):
        if cnt < 0:
            bad(f"x[{i}] negative")
        cap = graph.edges[i].mult
        if cap != UNBOUNDED and kind == "ffactor" and cnt > cap:
            bad(f"x[{i}] = {cnt} exceeds multiplicity {cap}")
        if len(matched_cids.get(i, ())) != cnt:
            bad(f"slot {i}: {cnt} matched copies but {len(matched_cids.get(i, ()))} ids")

    # degrees
    deg = [0] * n
    for i, e in enumerate(graph.edges):
        if e.is_loop():
            deg[e.u] += 2 * x[i]
        else:
            deg[e.u] += x[i]
            deg[e.v] += x[i]
    for v in range(n):
        if deg[v] != constraint(v):
            bad(f"vertex {v}: matched degree {deg[v]} != {constraint(v)}")

    # structural checks and z sign
    for b in every:
        if b.z < 0:
            bad(f"blossom {b.rec['id']}: negative dual {b.z}")
        if b.beta not in b.verts:
            bad(f"blossom {b.rec['id']}: base outside the blossom")
        if b.eta is not None:
            s = b.eta["slot"]
            eu, ev = graph.edges[s].u, graph.edges[s].v
            if (eu in b.verts) == (ev in b.verts):
                bad(f"blossom {b.rec['id']}: base edge does not leave the blossom")
            if b.beta not in (eu, ev):
                bad(f"blossom {b.rec['id']}: base edge misses the base vertex")
            if b.eta["matched"] and b.eta["cid"] not in matched_cids.get(s, ()):
                bad(f"blossom {b.rec['id']}: base edge claims an unknown matched copy")
            want = "light" if b.eta["matched"] else "heavy"
            if b.mtype != want:
                bad(f"blossom {b.rec['id']}: M-type {b.mtype} inconsistent with base edge")

    # per-copy-class complementary slackness
    def crossing(bl: _Blossom, i: int) -> bool:
        e = graph.edges[i]
        return (e.u in bl.verts) != (e.v in bl.verts)

    def inside(bl: _Blossom, i: int) -> bool:
        e = graph.edges[i]
        return e.u in bl.verts and e.v in bl.verts

    for i, e in enumerate(graph.edges):
        w2 = scale * e.w
        zg = sum(b.z for b in every if inside(b, i))
        base_val = y[e.u] + y[e.v] + zg
        cross = [b for b in every if crossing(b, i)]
        # matched copies
        for cid in sorted(matched_cids.get(i, ())):
            h = base_val
            if kind == "ffactor":
                h += sum(b.z for b in cross
                         if not (b.eta is not None and b.eta["cid"] == cid))
            sl = w2 - h
            if kind == "bmatch":
                if sl != 0:
                    bad(f"matched copy {cid} of edge {i} not tight (slack {sl})")
            elif sl < 0:
                bad(f"matched copy {cid} of edge {i} not underrated (by {-sl})")
        # unmatched eta copies
        unmatched_eta = {}
        for b in every:
            if b.eta is not None and b.eta["slot"] == i and not b.eta["matched"]:
                unmatched_eta.setdefault(b.eta["cid"], []).append(b)
        for cid in sorted(unmatched_eta):
            h = base_val
            if kind == "ffactor":
                h += sum(b.z for b in cross
                         if b.eta is not None and b.eta["cid"] == cid)
            if h - w2 < 0:
                bad(f"unmatched base-edge copy {cid} of edge {i} dominated by {w2 - h}")
        # a generic unmatched copy, when the multiplicity leaves room
        room = True
        if kind == "ffactor" and e.mult != UNBOUNDED:
            room = x[i] + len(unmatched_eta) < e.mult
        if room and base_val - w2 < 0:
            bad(f"edge {i} not dominated (slack {base_val - w2})")

    # blossom-side complementary slackness
    for b in every:
        if b.z <= 0:
            continue
        bsum = sum(constraint(v) for v in b.verts)
        gamma_m = sum(x[i] for i in range(len(graph.edges)) if inside(b, i))
        if kind == "bmatch":
            if bsum != 2 * gamma_m + 1:
                bad(f"blossom {b.rec['id']}: z>0 but b(B)={bsum} != 2*{gamma_m}+1")
            if b.mtype != "light":
                bad(f"blossom {b.rec['id']}: z>0 on a heavy blossom")
            # maturity: interior degrees are b, short one unit at the base
            din = {v: 0 for v in b.verts}
            for i, e in enumerate(graph.edges):
                if inside(b, i):
                    if e.is_loop():
                        din[e.u] += 2 * x[i]
                    else:
                        din[e.u] += x[i]
                        din[e.v] += x[i]
            for v in b.verts:
                want = constraint(v) - 1 if v == b.beta else constraint(v)
                if din[v] != want:
                    bad(f"blossom {b.rec['id']}: z>0 but interior degree {din[v]} at {v}")
        else:
            iset = b.rec["I"]
            # I(B) = delta(B, M) xor eta(B)
            want = {}
            for j in matched_cids:
                if crossing(b, j):
                    for cid in matched_cids[j]:
                        want[cid] = (j, True)
            if b.eta is not None:
                key = b.eta["cid"]
                if key in want:
                    del want[key]
                else:
                    want[key] = (b.eta["slot"], b.eta["matched"])
            got = {r["cid"]: (r["slot"], r["matched"]) for r in iset}
            if got != want:
                bad(f"blossom {b.rec['id']}: I(B) != delta(B,M) xor eta(B)")
            i_m = sum(1 for r in iset if r["matched"])
            fsum = sum(constraint(v) for v in b.verts)
            lhs = 2 * (gamma_m + i_m)
            rhs = fsum + len(iset) - 1
            if lhs != rhs:
                bad(f"blossom {b.rec['id']}: pair tightness {lhs} != {rhs}")
    return v0


# ---------------------------------------------------------------------------
# brute-force oracles

BRUTE_CAP = 10 ** 7


def _caps(graph: Multigraph, constraint: DegreeFn, kind: str) -> list[int]:
    caps = []
    for e in graph.edges:
        if kind == "ffactor" and e.mult != UNBOUNDED:
            c = e.mult
        else:
            c = min(constraint(e.u), constraint(e.v))
        if e.is_loop():
            c = min(c, constraint(e.u) // 2)
        else:
            c = min(c, constraint(e.u), constraint(e.v))
        caps.append(max(c, 0))
    return caps


def brute_force(graph: Multigraph, constraint: DegreeFn, kind: str):
    """Exhaustive optimum of the perfect matching problem.

    Returns (weight, x) or None when no perfect solution exists.  Guarded by
    a product-of-caps budget; instances beyond it are rejected.
    """
    caps = _caps(graph, constraint, kind)
    m = len(graph.edges)
    inc = {v: [] for v in range(graph.n)}
    for i, e in enumerate(graph.edges):
        inc[e.u].append(i)
        if e.v != e.u:
            inc[e.v].append(i)
    rem = [constraint(v) for v in range(graph.n)]
    x = [0] * m
    best: list = [None, None]
    steps = [0]

    def extend(weight):
        steps[0] += 1
        if steps[0] > BRUTE_CAP:
            raise ValueError("instance too large for brute force")
        v = -1
        for u in range(graph.n):
            if rem[u] > 0:
                v = u
                break
        if v < 0:
            if best[0] is None or weight > best[0]:
                best[0], best[1] = weight, list(x)
            return
        for i in inc[v]:
            e = graph.edges[i]
            if x[i] >= caps[i]:
                continue
            if e.is_loop():
                if rem[v] < 2:
                    continue
                rem[v] -= 2
            else:
                o = e.v if e.u == v else e.u
                if rem[o] < 1:
                    continue
                rem[v] -= 1
                rem[o] -= 1
            x[i] += 1
            extend(weight + e.w)
            x[i] -= 1
            if e.is_loop():
                rem[v] += 2
            else:
                rem[v] += 1
                rem[o] += 1

    extend(0)
    if best[0] is None:
        return None
    return best[0], best[1]


def max_cardinality_size(graph: Multigraph, constraint: DegreeFn, kind: str) -> int:
    """Maximum number of edges of a partial solution, by enumeration."""
    caps = _caps(graph, constraint, kind)
    m = len(graph.edges)
    rem = [constraint(v) for v in range(graph.n)]
    best = [0]

    def extend(i, size):
        if size + sum(caps[i:]) <= best[0]:
            return
        if i == m:
            best[0] = max(best[0], size)
            return
        e = graph.edges[i]
        hi = caps[i]
        if e.is_loop():
            hi = min(hi, rem[e.u] // 2)
        else:
            hi = min(hi, rem[e.u], rem[e.v])
        for k in range(hi, -1, -1):
            if e.is_loop():
                rem[e.u] -= 2 * k
            else:
                rem[e.u] -= k
                rem[e.v] -= k
            extend(i + 1, size + k)
            if e.is_loop():
                rem[e.u] += 2 * k
            else:
                rem[e.u] += k
                rem[e.v] += k

    extend(0, 0)
    return best[0]


def eval_min_max(graph: Multigraph, constraint: DegreeFn, kind: str) -> int:
    """Exact minimum of the max-size formula by full enumeration: over I for
    b-matching (2^n), over disjoint (I, O) for f-factors (3^n)."""
    from .search import bmatch_formula_value, ffactor_formula_value
    n = graph.n
    if kind in ("bmatch", "matching"):
        if n > 14:
            raise ValueError("too large for I-enumeration")
        best = None
        for mask in range(1 << n):
            I = {v for v in range(n) if mask >> v & 1}
            val = bmatch_formula_value(graph, constraint, I)
            if best is None or val < best:
                best = val
        return best
    if n > 10:
        raise ValueError("too large for (I,O)-enumeration")
    best = None
    for assign in itertools.product((0, 1, 2), repeat=n):
        I = {v for v in range(n) if assign[v] == 1}
        O = {v for v in range(n) if assign[v] == 2}
        val = ffactor_formula_value(graph, constraint, I, O)
        if best is None or val < best:
            best = val
    return best
