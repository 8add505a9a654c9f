import math
import random

from wmatch.tree_merge import TreeMerge, classify


def test_classify_table_values():
    # (edge rank, rank A_v, rank A_w) -> (kind, end, rank), from the rank table
    assert classify(2, 2, 2) == ("s", "v", 3)
    assert classify(2, 3, 2) == ("d", "w", 3)
    assert classify(2, 2, 4) == ("s", "v", 4)
    assert classify(4, 2, 5) == ("l", "v", 4)


def test_classify_rank_exceeds_end_rank():
    rng = random.Random(0)
    for _ in range(500):
        re_, rv, rw = rng.randrange(6), rng.randrange(6), rng.randrange(6)
        kind, end, rank = classify(re_, rv, rw)
        r_end = rv if end == "v" else rw
        assert rank > r_end


def _chain(tm, k):
    tm.add_leaf(None, 0)
    for i in range(1, k):
        tm.add_leaf(i - 1, i)


def test_add_leaf_depths():
    tm = TreeMerge(8)
    _chain(tm, 5)
    assert [tm.depth[i] for i in range(5)] == [0, 1, 2, 3, 4]
    try:
        tm.add_leaf(0, 3)
        assert False
    except ValueError:
        pass


def test_make_edge_and_find_min():
    tm = TreeMerge(8)
    _chain(tm, 4)
    assert tm.find_min() is None
    tm.make_edge(3, 0, 7, payload="e")
    e, key = tm.find_min()
    assert key == 7 and e.payload == "e"
    # intra-blossom edges are discarded
    tm.merge(3, 0)
    assert tm.make_edge(0, 3, 1) is None


def test_cheaper_duplicate_decreases_minimum():
    tm = TreeMerge(8)
    _chain(tm, 4)
    tm.make_edge(3, 1, 9)
    assert tm.find_min()[1] == 9
    tm.make_edge(3, 1, 4)
    assert tm.find_min()[1] == 4


def test_merge_of_empty_singletons():
    tm = TreeMerge(8)
    _chain(tm, 2)
    tm.merge(0, 1)
    rec = tm._recs[tm.find(0)]
    assert rec.size == 2 and rec.rank == 1
    assert rec.loose == [] and rec.packets == []
    assert tm.find_min() is None


class NaiveMerger:
    """Reference implementation: flat edge list + union-find."""

    def __init__(self):
        self.parent = {}
        self.edges = []

    def add_leaf(self, v):
        self.parent[v] = v

    def find(self, v):
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def make_edge(self, v, w, key, seq):
        self.edges.append((key, seq, v, w))

    def merge(self, a, b):
        self.parent[self.find(a)] = self.find(b)

    def find_min(self):
        best = None
        live = []
        for (key, seq, v, w) in self.edges:
            if self.find(v) == self.find(w):
                continue
            live.append((key, seq, v, w))
            if best is None or (key, seq) < (best[0], best[1]):
                best = (key, seq, v, w)
        self.edges = live
        return None if best is None else (best[0], best[1])


def run_trace(seed, nops, nmax, weights=10**6):
    rng = random.Random(seed)
    tm = TreeMerge(nmax)
    naive = NaiveMerger()
    tm.add_leaf(None, 0)
    naive.add_leaf(0)
    verts = [0]
    seq = 0
    checks = 0
    for _ in range(nops):
        r = rng.random()
        if (r < 0.3 and len(verts) < nmax) or len(verts) < 3:
            v = len(verts)
            tm.add_leaf(rng.choice(verts), v)
            naive.add_leaf(v)
            verts.append(v)
        elif r < 0.7:
            v, w = rng.choice(verts), rng.choice(verts)
            key = rng.randrange(weights)
            got = tm.make_edge(v, w, key, payload=seq)
            if tm.find(v) != tm.find(w):
                naive.make_edge(v, w, key, seq)
                assert got is not None
            seq += 1
        elif r < 0.85:
            v, w = rng.choice(verts), rng.choice(verts)
            if tm.find(v) != tm.find(w):
                tm.merge(v, w)
                naive.merge(v, w)
        else:
            got = tm.find_min()
            want = naive.find_min()
            checks += 1
            if want is None:
                assert got is None
            else:
                assert got is not None
                assert got[1] == want[0], f"find_min key {got[1]} != naive {want[0]}"
                assert got[0].payload == want[1]
    return tm, checks


def test_random_traces_match_naive_oracle():
    total_checks = 0
    for seed in range(6):
        _tm, checks = run_trace(seed, nops=1500, nmax=400)
        total_checks += checks
    assert total_checks > 300


def test_duplicate_pruning_keeps_min_per_pair():
    tm = TreeMerge(16)
    _chain(tm, 8)
    for k in (9, 3, 5):
        tm.make_edge(7, 2, k)
    tm.merge(7, 6)
    tm.merge(7, 5)
    e, key = tm.find_min()
    assert key == 3


def test_charged_work_bound():
    # total charged units <= C (make_edges + n ceil(log n)) across sizes
    ratios = []
    for exp in (6, 8, 10):
        n = 2 ** exp
        tm, _ = run_trace(seed=exp, nops=6 * n, nmax=n)
        c = tm.counters
        denom = c.make_edges + n * math.ceil(math.log2(n))
        ratios.append(c.charged_units / denom)
    assert max(ratios) <= 3 * min(ratios) + 1e-9
    assert max(ratios) < 8
