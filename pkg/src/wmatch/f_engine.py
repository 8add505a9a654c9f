"""Maximum weight f-factors on multigraphs with bounded multiplicities.

Unlike b-matching, a matched edge here can be strictly underrated, blossoms
carry pendant-edge sets I(B) in the duals, and heavy blossoms appear as
first-class citizens.  The search machinery lives in search.py; this module
is the public face plus the f-specific pieces the spec names.
"""

from __future__ import annotations

from typing import Optional

from .b_engine import SolveResult
from .certificate import build_certificate
from .multigraph import DegreeFn, MatchingVec, Multigraph
from .search import Deficiency, SearchEngine


def make_engine(graph: Multigraph, f: DegreeFn, debug: bool = False,
                init: Optional[dict] = None) -> SearchEngine:
    eng = SearchEngine(graph, f, "ffactor", debug=debug)
    if init is None:
        wmax = max((e.w for e in graph.edges), default=0)
        eng.set_initial_duals([wmax] * graph.n)
    else:
        if init.get("y") is not None:
            eng.set_initial_duals([2 * yv for yv in init["y"]])
        if init.get("y2") is not None:
            eng.set_initial_duals(list(init["y2"]))
        if init.get("x"):
            eng.init_matching(init["x"])
        eng.validate_init()
    return eng


def solve_f_factor(graph: Multigraph, f: DegreeFn, init: Optional[dict] = None,
                   debug: bool = False, trace: Optional[list] = None,
                   engine: Optional[SearchEngine] = None) -> SolveResult:
    """Maximum weight f-factor, or a deficiency witness (I, O, max_size)."""
    eng = engine if engine is not None else make_engine(graph, f, debug=debug, init=init)
    eng.trace = trace
    try:
        eng.solve()
    except Deficiency as d:
        return SolveResult("infeasible", MatchingVec(eng.matching_vector()),
                           None, None, witness=d.witness, engine=eng)
    mv = MatchingVec(eng.matching_vector())
    return SolveResult("optimal", mv, mv.weight(graph), build_certificate(eng),
                       engine=eng)


def h_yz(engine: SearchEngine, copy) -> object:
    """Dual edge value y(e) + z{B : e in gamma(B) or I(B)} (doubled units)."""
    return engine.hyz(copy)


def slack(engine: SearchEngine, copy) -> object:
    """sigma * (h_yz - w): nonnegative under the running invariants."""
    return engine.slack(copy)


def eligible(engine: SearchEngine, copy, x: int) -> bool:
    """Edge-end eligibility: outer atoms take unmatched edges, inner atoms
    matched ones, outer blossoms everything, inner blossoms their base edge."""
    return engine.eligible_at(copy, x)


def deficiency_witness_f(result: SolveResult) -> dict:
    if result.status != "infeasible":
        raise ValueError("witness only exists for failed solves")
    return result.witness
