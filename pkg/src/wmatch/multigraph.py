"""Multigraph model and the on-disk instance format.

An instance is a weighted multigraph (loops allowed), a per-vertex degree
constraint, and a problem kind.  Instances are immutable once built; all
solvers share this representation.

The text format uses one directive per line, 1-based vertex ids::

    p {matching|bmatch|ffactor|tjoin|sssp} <n> <m>
    d <v> <k>            degree constraint (default 1)
    e <u> <v> <w> [mult] edge; mult defaults to 1, "*" means unbounded
                         (unbounded only in bmatch mode)
    t <v>                T-join terminal
    s <v>                shortest-path source

Internally ids are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

#: multiplicity marker for b-matching edges with unlimited copies
UNBOUNDED = -1

#: weights must fit in a signed 64-bit word, like the solvers assume
WEIGHT_LIMIT = 2**62

PROBLEM_KINDS = ("matching", "bmatch", "ffactor", "tjoin", "sssp")


class ParseError(ValueError):
    """Malformed instance text; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Edge:
    """One edge record.  u == v is a loop.  mult is >= 1 or UNBOUNDED."""

    u: int
    v: int
    w: int
    mult: int = 1

    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class Multigraph:
    n: int
    edges: tuple[Edge, ...]

    def check(self, allow_unbounded: bool = False) -> None:
        for e in self.edges:
            if not (0 <= e.u < self.n and 0 <= e.v < self.n):
                raise ValueError(f"edge {e} has endpoint out of range")
            if e.mult != UNBOUNDED and e.mult < 1:
                raise ValueError(f"edge {e} has nonpositive multiplicity")
            if e.mult == UNBOUNDED and not allow_unbounded:
                raise ValueError("unbounded multiplicity outside bmatch mode")
            if abs(e.w) >= WEIGHT_LIMIT:
                raise ValueError(f"edge weight {e.w} exceeds 64-bit budget")

    def incident(self, v: int) -> list[int]:
        """Indices of edge records touching v (loops once)."""
        return [i for i, e in enumerate(self.edges) if v in (e.u, e.v)]

    def negate_weights(self) -> "Multigraph":
        return Multigraph(self.n, tuple(Edge(e.u, e.v, -e.w, e.mult) for e in self.edges))


@dataclass(frozen=True)
class DegreeFn:
    """Per-vertex nonnegative degree constraint (b or f, depending on mode)."""

    values: tuple[int, ...]

    def __call__(self, v: int) -> int:
        return self.values[v]

    def total(self) -> int:
        return sum(self.values)

    @staticmethod
    def uniform(n: int, k: int) -> "DegreeFn":
        return DegreeFn((k,) * n)


@dataclass
class MatchingVec:
    """Per-edge-record matched multiplicities x(e)."""

    x: list[int]

    def weight(self, g: Multigraph) -> int:
        return sum(k * e.w for k, e in zip(self.x, g.edges))

    def size(self) -> int:
        return sum(self.x)


@dataclass(frozen=True)
class Instance:
    graph: Multigraph
    constraint: DegreeFn
    kind: str
    terminals: tuple[int, ...] = ()
    source: Optional[int] = None


def degree(g: Multigraph, v: int, m: MatchingVec) -> int:
    """Matched degree of v: x(delta(v)) + 2 x(gamma(v)); loops count twice."""
    d = 0
    for i, e in enumerate(g.edges):
        if e.u == v and e.v == v:
            d += 2 * m.x[i]
        elif v in (e.u, e.v):
            d += m.x[i]
    return d


def _sort_parallel(edges: list[Edge]) -> list[Edge]:
    # parallel records kept adjacent and ordered by decreasing weight so the
    # engines can consume copies greedily; the sort is stable on input order
    order = {}
    for i, e in enumerate(edges):
        key = (min(e.u, e.v), max(e.u, e.v))
        order.setdefault(key, i)
    return sorted(
        edges,
        key=lambda e: (order[(min(e.u, e.v), max(e.u, e.v))], -e.w),
    )


def parse_instance(text: str) -> Instance:
    """Parse instance text.  Raises ParseError with a line number on bad input."""
    n = None
    m_declared = None
    kind = None
    edges: list[Edge] = []
    deg: dict[int, int] = {}
    terminals: list[int] = []
    source: Optional[int] = None

    def vertex(tok: str, lineno: int) -> int:
        try:
            v = int(tok)
        except ValueError:
            raise ParseError(lineno, f"bad vertex id {tok!r}") from None
        if n is None:
            raise ParseError(lineno, "directive before problem line")
        if not (1 <= v <= n):
            raise ParseError(lineno, f"vertex id {v} out of range 1..{n}")
        return v - 1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        tag = toks[0]
        if tag == "p":
            if n is not None:
                raise ParseError(lineno, "duplicate problem line")
            if len(toks) != 4 or toks[1] not in PROBLEM_KINDS:
                raise ParseError(lineno, "expected: p <kind> <n> <m>")
            try:
                n, m_declared = int(toks[2]), int(toks[3])
            except ValueError:
                raise ParseError(lineno, "bad counts on problem line") from None
            if n < 0 or m_declared < 0:
                raise ParseError(lineno, "negative counts on problem line")
            kind = toks[1]
        elif tag == "d":
            if len(toks) != 3:
                raise ParseError(lineno, "expected: d <v> <k>")
            v = vertex(toks[1], lineno)
            try:
                k = int(toks[2])
            except ValueError:
                raise ParseError(lineno, f"bad constraint {toks[2]!r}") from None
            if k < 0:
                raise ParseError(lineno, "degree constraint must be >= 0")
            deg[v] = k
        elif tag == "e":
            if len(toks) not in (4, 5):
                raise ParseError(lineno, "expected: e <u> <v> <w> [mult]")
            u = vertex(toks[1], lineno)
            v = vertex(toks[2], lineno)
            try:
                w = int(toks[3])
            except ValueError:
                raise ParseError(lineno, f"bad weight {toks[3]!r}") from None
            if abs(w) >= WEIGHT_LIMIT:
                raise ParseError(lineno, f"weight {w} exceeds 64-bit budget")
            mult = 1
            if len(toks) == 5:
                if toks[4] == "*":
                    if kind != "bmatch":
                        raise ParseError(lineno, 'mult "*" is only valid in bmatch mode')
                    mult = UNBOUNDED
                else:
                    try:
                        mult = int(toks[4])
                    except ValueError:
                        raise ParseError(lineno, f"bad multiplicity {toks[4]!r}") from None
                    if mult < 1:
                        raise ParseError(lineno, "multiplicity must be >= 1")
            edges.append(Edge(u, v, w, mult))
        elif tag == "t":
            if len(toks) != 2:
                raise ParseError(lineno, "expected: t <v>")
            terminals.append(vertex(toks[1], lineno))
        elif tag == "s":
            if len(toks) != 2:
                raise ParseError(lineno, "expected: s <v>")
            source = vertex(toks[1], lineno)
        else:
            raise ParseError(lineno, f"unknown directive {tag!r}")

    if n is None or kind is None:
        raise ParseError(1, "missing problem line")
    if m_declared != len(edges):
        raise ParseError(1, f"problem line declares {m_declared} edges, found {len(edges)}")

    graph = Multigraph(n, tuple(_sort_parallel(edges)))
    graph.check(allow_unbounded=(kind == "bmatch"))
    constraint = DegreeFn(tuple(deg.get(v, 1) for v in range(n)))
    return Instance(graph, constraint, kind, tuple(sorted(set(terminals))), source)


def serialize_instance(inst: Instance) -> str:
    out = [f"p {inst.kind} {inst.graph.n} {len(inst.graph.edges)}"]
    for v, k in enumerate(inst.constraint.values):
        if k != 1:
            out.append(f"d {v + 1} {k}")
    for e in inst.graph.edges:
        mult = "*" if e.mult == UNBOUNDED else str(e.mult)
        if mult == "1":
            out.append(f"e {e.u + 1} {e.v + 1} {e.w}")
        else:
            out.append(f"e {e.u + 1} {e.v + 1} {e.w} {mult}")
    for t in inst.terminals:
        out.append(f"t {t + 1}")
    if inst.source is not None:
        out.append(f"s {inst.source + 1}")
    return "\n".join(out) + "\n"
