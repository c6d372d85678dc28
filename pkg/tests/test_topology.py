import itertools
import random

from wrebeca.parser import parse_constraint, parse_model
from wrebeca.syntax import ConAnd, ConLink, ConTrue
from wrebeca.topology import (Topology, enumerate_valid, equivalence_classes,
                              is_static, satisfies,
                              topologically_equivalent)

N4 = {f"n{i+1}": i for i in range(4)}  # paper-style one-based names


def con(a, b, neg=False):
    return ConLink(a, b, neg)


def test_satisfies_true_on_anything():
    for bits in range(2 ** 6):
        assert satisfies(Topology(4, bits), ConTrue())


def test_satisfies_negated_link():
    gamma = Topology.from_edges(4, [(0, 1)])
    assert satisfies(gamma, con("n2", "n3", neg=True), N4)
    assert not satisfies(gamma, con("n2", "n3"), N4)


def test_satisfies_fig2_matrix():
    # all links present except n2-n3
    gamma = Topology.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)])
    c = ConAnd(con("n1", "n2"), con("n1", "n3"))
    assert satisfies(gamma, c, N4)
    assert not satisfies(gamma, con("n2", "n3"), N4)


def test_satisfies_distributes_over_and():
    rng = random.Random(7)
    names = {f"n{i}": i for i in range(4)}
    for _ in range(200):
        gamma = Topology(4, rng.randrange(2 ** 6))
        def rand_leaf():
            i, j = rng.sample(range(4), 2)
            return con(f"n{i}", f"n{j}", neg=rng.random() < 0.5)
        a, b = rand_leaf(), rand_leaf()
        assert satisfies(gamma, ConAnd(a, b), names) == (
            satisfies(gamma, a, names) and satisfies(gamma, b, names))


def test_enumerate_true_counts():
    assert len(enumerate_valid(ConTrue(), 4)) == 64
    for n in range(1, 6):
        assert len(enumerate_valid(ConTrue(), n)) == 2 ** (n * (n - 1) // 2)


def test_enumerate_single_pin():
    names = {f"node{i}": i for i in range(4)}
    out = enumerate_valid(con("node0", "node1"), 4, names)
    assert len(out) == 32
    assert all(g.connected(0, 1) for g in out)


def test_enumerate_table_row_one():
    names = {f"node{i}": i for i in range(4)}
    c = parse_constraint("and(and(con(node0,node1),con(node0,node3)),"
                         "and(con(node2,node3),con(node1,node3)))")
    out = enumerate_valid(c, 4, names)
    assert len(out) == 4


def test_enumerate_contradiction_is_empty():
    names = {"a": 0, "b": 1}
    c = ConAnd(con("a", "b"), con("a", "b", neg=True))
    assert enumerate_valid(c, 2, names) == []


def test_enumerate_canonical_order():
    out = enumerate_valid(ConTrue(), 3)
    assert [g.bits for g in out] == sorted(g.bits for g in out)


def test_is_static_cases(corpus):
    m = corpus("flooding4")
    ids = {r.name: i for i, r in enumerate(m.rebecs)}
    assert is_static(m.constraint, m.initial_topology, ids)

    assert not is_static(ConTrue(), Topology.disconnected(2))

    fig5 = corpus("flooding_ip4")
    ids5 = {r.name: i for i, r in enumerate(fig5.rebecs)}
    assert len(enumerate_valid(fig5.constraint, 4, ids5)) == 16
    assert not is_static(fig5.constraint, fig5.initial_topology, ids5)


def test_equivalence_classes_fig2():
    gamma = Topology.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)])
    part = equivalence_classes(gamma)
    assert set(part.blocks) == {frozenset({0, 3}), frozenset({1, 2})}


def test_equivalence_classes_complete():
    for n in (2, 3, 5):
        part = equivalence_classes(Topology.fully_connected(n))
        assert part.blocks == (frozenset(range(n)),)


def brute_force_blocks(gamma):
    """Greedy maximal pairwise-equivalent grouping, written independently."""
    blocks = []
    placed = set()
    for i in range(gamma.n):
        if i in placed:
            continue
        blk = {i}
        for j in range(i + 1, gamma.n):
            if j in placed:
                continue
            if all(topologically_equivalent(gamma, m, j) for m in blk):
                blk.add(j)
        placed |= blk
        blocks.append(frozenset(blk))
    return blocks


def test_equivalence_classes_fig6a_by_oracle():
    # edges 1-2, 1-3, 2-4, 3-4 in one-based names
    gamma = Topology.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    part = equivalence_classes(gamma)
    assert list(part.blocks) == brute_force_blocks(gamma)
    assert set(part.blocks) == {frozenset({0, 3}), frozenset({1, 2})}


def test_blocks_pairwise_and_maximal():
    rng = random.Random(13)
    for _ in range(150):
        n = rng.randint(2, 5)
        gamma = Topology(n, rng.randrange(2 ** Topology.pair_count(n)))
        part = equivalence_classes(gamma)
        ids = sorted(x for blk in part.blocks for x in blk)
        assert ids == list(range(n))
        for blk in part.blocks:
            for i, j in itertools.combinations(sorted(blk), 2):
                assert topologically_equivalent(gamma, i, j)
        for b1, b2 in itertools.combinations(part.blocks, 2):
            merged = sorted(b1 | b2)
            assert not all(topologically_equivalent(gamma, i, j)
                           for i, j in itertools.combinations(merged, 2))


def test_rows_include_diagonal():
    gamma = Topology.from_edges(3, [(0, 2)])
    rows = gamma.rows()
    assert rows[0] == 0b101 and rows[1] == 0b010 and rows[2] == 0b101
