import pytest

from wmatch.multigraph import (
    DegreeFn, MatchingVec, ParseError, UNBOUNDED, degree,
    parse_instance, serialize_instance,
)


def test_smallest_instance():
    inst = parse_instance("p matching 2 1\ne 1 2 5\n")
    assert inst.graph.n == 2
    assert inst.graph.edges[0].w == 5
    assert inst.constraint.values == (1, 1)


def test_loop_syntax():
    inst = parse_instance("p ffactor 1 1\nd 1 2\ne 1 1 3 1\n")
    e = inst.graph.edges[0]
    assert e.is_loop() and e.w == 3
    assert inst.constraint(0) == 2


def test_out_of_range_id():
    with pytest.raises(ParseError) as ei:
        parse_instance("p matching 2 1\ne 1 3 5\n")
    assert "line 2" in str(ei.value)


def test_bad_multiplicity():
    with pytest.raises(ParseError):
        parse_instance("p ffactor 2 1\ne 1 2 5 0\n")
    with pytest.raises(ParseError):
        parse_instance("p ffactor 2 1\ne 1 2 5 *\n")  # unbounded outside bmatch
    inst = parse_instance("p bmatch 2 1\ne 1 2 5 *\n")
    assert inst.graph.edges[0].mult == UNBOUNDED


def test_roundtrip():
    text = (
        "p tjoin 4 3\n"
        "d 2 3\n"
        "e 1 2 -4\n"
        "e 2 3 7 2\n"
        "e 3 3 0\n"
        "t 1\n"
        "t 4\n"
    )
    inst = parse_instance(text)
    again = parse_instance(serialize_instance(inst))
    assert again == inst


def test_parallel_records_sorted_by_weight():
    inst = parse_instance("p ffactor 2 3\ne 1 2 1\ne 1 2 9\ne 1 2 5\n")
    ws = [e.w for e in inst.graph.edges]
    assert ws == [9, 5, 1]


def test_degree_counts_loops_twice():
    inst = parse_instance("p ffactor 2 2\nd 1 2\ne 1 1 3\ne 1 2 1 2\n")
    m = MatchingVec([1, 0])
    assert degree(inst.graph, 0, m) == 2
    assert degree(inst.graph, 1, m) == 0
    m2 = MatchingVec([0, 2])
    assert degree(inst.graph, 0, m2) == 2
    assert degree(inst.graph, 1, m2) == 2


def test_missing_problem_line():
    with pytest.raises(ParseError):
        parse_instance("e 1 2 3\n")
