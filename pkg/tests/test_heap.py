import math
import random

import pytest

from wmatch.heap import ContractViolation, Heap


def test_insert_mins():
    h = Heap()
    h.insert(5, "a")
    h.insert(3, "b")
    assert h.extract_min_live() == (3, "b")


def test_decrease_key():
    h = Heap()
    n = h.insert(5, "a")
    h.insert(4, "b")
    h.decrease_key(n, 1)
    assert h.extract_min_live() == (1, "a")
    with pytest.raises(ContractViolation):
        h.decrease_key(n, 9)


def test_lazy_delete_only_entry():
    h = Heap()
    n = h.insert(7, "x")
    h.lazy_delete(n)
    assert h.extract_min_live() is None


def test_dead_min_physically_removed():
    h = Heap()
    a = h.insert(3, "dead")
    h.insert(7, "live")
    h.lazy_delete(a)
    assert h.extract_min_live() == (7, "live")
    assert h.root.payload == "live"
    # repeated peeks return the same live minimum
    assert h.extract_min_live() == (7, "live")


def test_all_dead():
    h = Heap()
    nodes = [h.insert(k) for k in (2, 9, 4)]
    for n in nodes:
        h.lazy_delete(n)
    assert h.extract_min_live() is None


def test_meld_empties_other():
    a, b = Heap(), Heap()
    a.insert(5)
    b.insert(2)
    b.insert(8)
    a.meld(b)
    assert len(b) == 0 and b.extract_min_live() is None
    assert a.extract_min_live()[0] == 2
    assert len(a) == 3


def test_tie_break_by_insertion_order():
    h = Heap()
    h.insert(4, "first")
    h.insert(4, "second")
    assert h.pop_min() == (4, "first")
    assert h.pop_min() == (4, "second")


def test_inf_keys():
    h = Heap()
    h.insert(math.inf, "empty-marker")
    assert h.min_key() == math.inf
    h.insert(3, "real")
    assert h.min_key() == 3


def _oracle_mix(seed, nops=2000):
    rng = random.Random(seed)
    h = Heap()
    alive = {}   # node -> key
    idx = 0
    for _ in range(nops):
        op = rng.random()
        if op < 0.45 or not alive:
            key = rng.randrange(1000)
            node = h.insert(key, idx)
            alive[node] = key
            idx += 1
        elif op < 0.65:
            node = rng.choice(list(alive))
            nk = rng.randrange(node.key + 1)
            h.decrease_key(node, nk)
            alive[node] = nk
        elif op < 0.8:
            node = rng.choice(list(alive))
            h.lazy_delete(node)
            del alive[node]
        else:
            got = h.extract_min_live()
            if not alive:
                assert got is None
            else:
                want = min((k, n.seq) for n, k in alive.items())
                assert (got[0], got[1]) == (want[0], {n.seq: n.payload for n in alive}[want[1]])
    return h


def test_against_naive_oracle():
    for seed in range(8):
        _oracle_mix(seed)


def test_comparison_counter_contract():
    # total comparisons <= C (inserts + melds + decrease_keys + deletes*log maxsize)
    rng = random.Random(7)
    h = Heap()
    nodes = []
    ops = {"insert": 0, "dec": 0, "del": 0}
    maxsize = 1
    for _ in range(20000):
        r = rng.random()
        if r < 0.5 or not nodes:
            nodes.append(h.insert(rng.randrange(10**6)))
            ops["insert"] += 1
            maxsize = max(maxsize, len(h))
        elif r < 0.75:
            n = rng.choice(nodes)
            if not n.dead:
                h.decrease_key(n, n.key - rng.randrange(100))
                ops["dec"] += 1
        else:
            got = h.pop_min()
            if got is not None:
                ops["del"] += 1
                nodes = [n for n in nodes if not n.dead and n is not h.root or True]
    budget = ops["insert"] + ops["dec"] + ops["del"] * max(1, math.log2(maxsize))
    assert h.comparisons <= 6 * budget
