import random
from fractions import Fraction
from itertools import combinations, permutations
from math import comb, factorial

import pytest

from splitspace.errors import CapacityError, SplitIndexError
from splitspace.polygon import PolygonRep, crossing_diagonal, diagonals_cross, polygon_from, twist
from splitspace.space import (
    Census,
    LinkCell,
    NetworkPoint,
    census,
    chambers,
    chambers_containing,
    classify_cell,
    complete_one_skeleton,
    count_cells,
    delta,
    empty_triangle_witness,
    in_tree_subspace,
    is_cell,
    link_cells,
    max_shared_face_dim,
    nontrivial_splits,
    one_skeleton_connected,
    shared_face_dims,
    split_at,
    split_index,
    to_network_point,
)
from splitspace.splits import (
    CircularOrdering,
    Split,
    SplitSystem,
    WeightedSplitSystem,
    all_orderings,
    buneman_tree,
    is_arc,
    pairwise_compatible,
    split_from_block,
)


def S(block, n):
    return split_from_block(block, n)


def jointly_circular(splits, n):
    """Permutation scan: is there any cyclic arrangement making every split an arc?"""
    for rest in permutations(range(2, n + 1)):
        seq = (1,) + rest
        if all(is_arc(s.mask, seq) for s in splits):
            return True
    return False


def brute_cells(n, size):
    return {frozenset(c) for c in combinations(nontrivial_splits(n), size) if jointly_circular(c, n)}


# ---------------------------------------------------------------------------
# coordinates
# ---------------------------------------------------------------------------


def test_delta_values():
    assert [delta(n) for n in (3, 4, 5, 6, 7, 8)] == [0, 3, 10, 25, 56, 119]
    with pytest.raises(ValueError):
        delta(2)


@pytest.mark.parametrize("n", range(4, 9))
def test_delta_counts_nontrivial_splits(n):
    masks = {min(m, (1 << n) - 1 ^ m) for m in range(1, (1 << n) - 1)}
    nontrivial = [m for m in masks if 2 <= bin(m).count("1") <= n - 2]
    assert len(nontrivial) == delta(n) == len(nontrivial_splits(n))


def test_split_index_examples():
    assert [split_index(S(b, 4)) for b in ([1, 2], [1, 3], [2, 3])] == [0, 1, 2]
    with pytest.raises(SplitIndexError):
        split_index(S([1], 5))


def test_split_index_round_trip():
    for i in range(delta(6)):
        assert split_index(split_at(6, i)) == i
    blocks = [split_at(6, i).block for i in range(delta(6))]
    assert blocks == sorted(blocks)


# ---------------------------------------------------------------------------
# network points
# ---------------------------------------------------------------------------


def test_network_point_validation():
    with pytest.raises(ValueError):
        NetworkPoint(4, {S([1, 2], 4): -1})
    with pytest.raises(SplitIndexError):
        NetworkPoint(4, {S([1], 4): 1})
    with pytest.raises(ValueError):
        NetworkPoint(4, {S([1, 2], 4): 1, S([1, 3], 4): 1, S([2, 3], 4): 1})
    p = NetworkPoint(5, {S([1, 2], 5): "1/2", S([1, 3], 5): 0})
    assert p.support == {S([1, 2], 5)}
    assert p.total() == Fraction(1, 2)
    assert p.vector()[split_index(S([1, 2], 5))] == Fraction(1, 2)


def test_network_point_support_is_circular():
    rng = random.Random(0)
    pool = nontrivial_splits(6)
    for _ in range(300):
        sub = rng.sample(pool, rng.randint(1, 5))
        coords = {s: rng.randint(1, 5) for s in sub}
        if jointly_circular(sub, 6):
            assert NetworkPoint(6, coords).support == frozenset(sub)
        else:
            with pytest.raises(ValueError):
                NetworkPoint(6, coords)


def test_to_network_point_examples():
    hexagon = CircularOrdering((1, 2, 3, 4, 5, 6))
    assert to_network_point(polygon_from(SplitSystem(6, frozenset()), hexagon)) == NetworkPoint.origin(6)
    P = polygon_from(WeightedSplitSystem(6, {S([1, 2, 3], 6): 1}), hexagon)
    assert to_network_point(P).coords == {S([1, 2, 3], 6): 1}


def test_to_network_point_twist_invariant():
    rng = random.Random(1)
    for _ in range(100):
        n = rng.randint(5, 7)
        pi = rng.choice(list(all_orderings(n)))
        weights = {s: Fraction(rng.randint(1, 9), rng.randint(1, 4)) for s in pi.circular_splits() if rng.random() < 0.4}
        P = polygon_from(WeightedSplitSystem(n, weights), pi)
        for chord in pi.circular_splits():
            if crossing_diagonal(P, chord) is None:
                assert to_network_point(twist(P, chord)) == to_network_point(P)


def test_in_tree_subspace():
    assert in_tree_subspace(NetworkPoint.origin(5))
    assert not in_tree_subspace(NetworkPoint(4, {S([1, 2], 4): 1, S([1, 4], 4): 1}))
    rng = random.Random(2)
    for _ in range(30):
        pool = list(nontrivial_splits(6))
        rng.shuffle(pool)
        chosen = []
        for s in pool:
            if all(pairwise_compatible(s, t) for t in chosen):
                chosen.append(s)
        tree = buneman_tree(SplitSystem(6, frozenset(chosen)))
        x = NetworkPoint(6, {s: 1 for s in tree.internal_splits()})
        assert in_tree_subspace(x)


# ---------------------------------------------------------------------------
# chambers and cells
# ---------------------------------------------------------------------------


def test_chamber_counts():
    assert [len(chambers(n)) for n in (4, 5, 6)] == [3, 12, 60]
    assert chambers(6) == sorted(chambers(6))
    with pytest.raises(CapacityError):
        chambers(12)


def test_link_cells_n4_is_triangle():
    assert len(link_cells(4, 0)) == 3
    assert len(link_cells(4, 1)) == 3
    with pytest.raises(ValueError):
        link_cells(4, 2)


def test_link_cells_n5_counts():
    assert [count_cells(5, k) for k in range(5)] == [10, 45, 90, 60, 12]


@pytest.mark.parametrize("n", [4, 5])
def test_link_cells_against_subset_scan(n):
    top = n * (n - 3) // 2
    for size in range(1, top + 1):
        cells = link_cells(n, size - 1)
        assert {frozenset(c.splits) for c in cells} == brute_cells(n, size)
        assert cells == sorted(cells)


def test_link_cells_n6_low_dims():
    assert count_cells(6, 0) == 25
    assert count_cells(6, 1) == 300
    sample = random.Random(3).sample(list(combinations(nontrivial_splits(6), 3)), 150)
    cells = {frozenset(c.splits) for c in link_cells(6, 2)}
    for triple in sample:
        assert (frozenset(triple) in cells) == jointly_circular(triple, 6)


def test_link_cell_identity_is_split_set():
    a = LinkCell((S([1, 2], 5), S([1, 2, 3], 5)), 5)
    b = LinkCell((S([1, 2, 3], 5), S([1, 2], 5), S([1, 2], 5)), 5)
    assert a == b and a.dim == 1
    with pytest.raises(ValueError):
        LinkCell((), 5)


def test_chambers_containing_examples():
    pent = CircularOrdering((1, 2, 3, 4, 5))
    assert chambers_containing(LinkCell(pent.circular_splits(), 5)) == [pent]
    assert len(chambers_containing(LinkCell((S([1, 2, 3], 6),), 6))) == 18


def test_chambers_containing_two_at_n8():
    octagon = CircularOrdering(tuple(range(1, 9)))
    chord = S([1, 2, 3, 4], 8)
    splits = [s for s in octagon.circular_splits() if not diagonals_cross(s, chord)]
    found = chambers_containing(LinkCell(tuple(splits), 8))
    assert len(found) == 2
    P = PolygonRep(octagon, frozenset(splits))
    assert sorted([octagon, twist(P, chord).ordering]) == found


@pytest.mark.parametrize("n", [5, 6])
def test_chambers_containing_brute(n):
    rng = random.Random(n)
    for c in rng.sample(link_cells(n, 1), 20):
        brute = [pi for pi in all_orderings(n) if all(is_arc(s.mask, pi.seq) for s in c.splits)]
        assert chambers_containing(c) == brute


# ---------------------------------------------------------------------------
# census and shared faces
# ---------------------------------------------------------------------------


def test_census_formulas():
    f = Census.formulas(6)
    assert f == {"chambers": 60, "dimension": 8, "ridges": 540, "vertices": 25, "edges": 300}


@pytest.mark.parametrize("n", [5, 6])
def test_census_matches_formulas(n):
    c = census(n)
    assert c.matches_formulas()
    assert c.ridges_in_one_chamber
    assert c.chambers == factorial(n - 1) // 2
    assert c.cells_by_dim[0] == delta(n) and c.cells_by_dim[1] == comb(delta(n), 2)


def test_census_n4_ridge_formula_fails():
    c = census(4)
    assert (c.chambers, c.vertices, c.edges) == (3, 3, 3)
    assert c.ridges == 3 != Census.formulas(4)["ridges"]
    assert not c.ridges_in_one_chamber


def test_complete_one_skeleton_and_connected():
    for n in (4, 5, 6):
        assert complete_one_skeleton(n)
        assert one_skeleton_connected(n)


def test_max_shared_face_dims():
    assert [max_shared_face_dim(n) for n in (4, 5, 6)] == [0, 2, 5]


def test_shared_face_dims_pairwise_brute():
    table = shared_face_dims(5)
    for (a, b), d in table.items():
        common = set(a.circular_splits()) & set(b.circular_splits())
        assert d == len(common) - 1
    # no pair of pentagon chambers meets along a tetrahedron
    assert all(d < 3 for d in table.values())


# ---------------------------------------------------------------------------
# empty triangles
# ---------------------------------------------------------------------------


def _replay(triple, n):
    pairs_ok = all(jointly_circular(pair, n) for pair in combinations(triple, 2))
    return pairs_ok and not jointly_circular(triple, n)


def test_empty_triangle_n4():
    w = empty_triangle_witness(4)
    # all three splits of four taxa pairwise share an ordering but never all three
    assert w == (S([1, 2], 4), S([1, 3], 4), S([2, 3], 4))
    assert _replay(w, 4)


@pytest.mark.parametrize("n", [5, 6])
def test_empty_triangle_witness_replays(n):
    w = empty_triangle_witness(n)
    assert w is not None and _replay(w, n)
    assert not is_cell(w, n)


def test_empty_triangle_is_least():
    w = empty_triangle_witness(5)
    for triple in combinations(nontrivial_splits(5), 3):
        if triple == w:
            break
        assert not _replay(triple, 5)


# ---------------------------------------------------------------------------
# cell types
# ---------------------------------------------------------------------------


def test_classify_cell_seven_types_at_n5():
    types = {classify_cell(c) for k in range(5) for c in link_cells(5, k)}
    assert len(types) == 7
    assert len({classify_cell(c) for c in link_cells(5, 4)}) == 1
    assert len({classify_cell(c) for c in link_cells(5, 0)}) == 1


def test_classify_cell_relabeling_invariant():
    rng = random.Random(4)
    for c in rng.sample(link_cells(6, 2), 30):
        perm = list(range(1, 7))
        rng.shuffle(perm)
        relabeled = [Split.from_mask(sum(1 << (perm[t - 1] - 1) for t in s.block), 6) for s in c.splits]
        assert classify_cell(relabeled) == classify_cell(c)
