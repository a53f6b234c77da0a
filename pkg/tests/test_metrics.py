import random
from fractions import Fraction
from itertools import combinations

import pytest

from splitspace.errors import CapacityError, InfeasibleFit, MalformedMatrix
from splitspace.metrics import (
    DissimilarityMatrix,
    circular_split_weights,
    find_kalmanson_ordering,
    four_point_check,
    kalmanson_check,
    metric_from_network,
    recover_split_weights,
)
from splitspace.splits import (
    CircularOrdering,
    Split,
    WeightedSplitSystem,
    all_orderings,
    buneman_tree,
    pairwise_compatible,
    split_from_block,
)


def S(block, n):
    return split_from_block(block, n)


QUARTET = DissimilarityMatrix.from_pairs(4, {(1, 2): 2, (3, 4): 2, (1, 3): 3, (1, 4): 3, (2, 3): 3, (2, 4): 3})
VIOLATOR = DissimilarityMatrix.from_pairs(4, {(1, 2): 2, (3, 4): 2, (1, 3): 2, (2, 4): 3, (1, 4): 3, (2, 3): 3})
CROSSING = WeightedSplitSystem(4, {S([1, 2], 4): 1, S([1, 4], 4): 1})


def naive_kalmanson(D, seq):
    """Both inequalities over every increasing quadruple of positions."""
    n = len(seq)
    for a, b, c, e in combinations(range(n), 4):
        i, j, k, l = seq[a], seq[b], seq[c], seq[e]
        if D(i, j) + D(k, l) > D(i, k) + D(j, l) + D.tol:
            return False
        if D(i, l) + D(j, k) > D(i, k) + D(j, l) + D.tol:
            return False
    return True


def naive_four_point(D):
    for q in combinations(range(1, D.n + 1), 4):
        i, j, k, l = q
        sums = sorted([D(i, j) + D(k, l), D(i, k) + D(j, l), D(i, l) + D(j, k)])
        if abs(sums[2] - sums[1]) > D.tol:
            return False
    return True


def random_tree_system(n, rng):
    pool = [s for s in (Split.from_mask(m, n) for m in range(1, 2 ** (n - 1))) if not s.is_trivial()]
    rng.shuffle(pool)
    chosen = []
    for s in pool:
        if all(pairwise_compatible(s, t) for t in chosen):
            chosen.append(s)
    weights = {s: Fraction(rng.randint(1, 20), rng.randint(1, 6)) for s in chosen}
    weights.update({S([t], n): Fraction(rng.randint(0, 10), rng.randint(1, 3)) for t in range(1, n + 1)})
    return WeightedSplitSystem(n, weights)


def random_circular_system(n, rng, density=0.6):
    seq = list(range(1, n + 1))
    rng.shuffle(seq)
    pi = CircularOrdering(tuple(seq))
    weights = {s: Fraction(rng.randint(1, 30), rng.randint(1, 7)) for s in pi.circular_splits(nontrivial=False) if rng.random() < density}
    return WeightedSplitSystem(n, weights), pi


# ---------------------------------------------------------------------------
# matrix validation
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "rows",
    [
        [[0, 1], [2, 0]],
        [[0, -1], [-1, 0]],
        [[1, 1], [1, 0]],
        [[0, 1, 2], [1, 0]],
    ],
)
def test_malformed_matrices(rows):
    with pytest.raises(MalformedMatrix):
        DissimilarityMatrix(rows)


def test_exact_and_float_modes():
    assert DissimilarityMatrix([[0, Fraction(1, 3)], [Fraction(1, 3), 0]]).exact
    D = DissimilarityMatrix([[0, 1.0], [1.0 + 1e-12, 0]])
    assert not D.exact and D.tol == pytest.approx(1e-9 * (1.0 + 1e-12))


def test_needs_four_taxa():
    with pytest.raises(MalformedMatrix):
        four_point_check(DissimilarityMatrix.zeros(3))


# ---------------------------------------------------------------------------
# four-point
# ---------------------------------------------------------------------------


def test_four_point_examples():
    assert four_point_check(DissimilarityMatrix.zeros(5))
    assert four_point_check(QUARTET)
    r = four_point_check(VIOLATOR)
    assert not r
    assert r.witness["quadruple"] == [1, 2, 3, 4]
    assert sorted(r.witness["sums"]) == [4, 5, 6]


def test_four_point_float_tolerance():
    rows = [[float(v) for v in r] for r in QUARTET.rows]
    rows[0][2] += 1e-12
    rows[2][0] += 1e-12
    assert four_point_check(DissimilarityMatrix(rows))


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_tree_metrics_pass_four_point_and_admit_kalmanson(n):
    rng = random.Random(n)
    for _ in range(8 if n == 7 else 20):
        D = metric_from_network(random_tree_system(n, rng))
        assert four_point_check(D)
        assert naive_four_point(D)
        pi = find_kalmanson_ordering(D)
        assert pi is not None and naive_kalmanson(D, pi.seq)


def test_four_point_agrees_with_naive_on_random_matrices():
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randint(4, 6)
        pairs = {(i, j): rng.randint(0, 4) for i, j in combinations(range(1, n + 1), 2)}
        D = DissimilarityMatrix.from_pairs(n, pairs)
        assert bool(four_point_check(D)) == naive_four_point(D)


# ---------------------------------------------------------------------------
# Kalmanson
# ---------------------------------------------------------------------------


def test_kalmanson_examples():
    assert kalmanson_check(DissimilarityMatrix.zeros(4), (1, 3, 2, 4))
    D = metric_from_network(CROSSING)
    assert D(1, 3) == D(2, 4) == 2 and D(1, 2) == D(1, 4) == D(2, 3) == D(3, 4) == 1
    assert kalmanson_check(D, (1, 2, 3, 4))
    r = four_point_check(D)
    assert not r and sorted(r.witness["sums"]) == [2, 2, 4]


def test_kalmanson_witness_shape():
    D = metric_from_network(CROSSING)
    r = kalmanson_check(D, (1, 3, 2, 4))
    assert not r
    assert r.witness["inequality"] in (1, 2)
    assert r.witness["lhs"] > r.witness["rhs"]


def test_find_kalmanson_ordering_examples():
    assert find_kalmanson_ordering(metric_from_network(CROSSING)) == CircularOrdering((1, 2, 3, 4))
    assert find_kalmanson_ordering(DissimilarityMatrix.zeros(6)) == CircularOrdering((1, 2, 3, 4, 5, 6))
    # brute force over the three orderings of four taxa decides this one
    passing = [pi for pi in all_orderings(4) if naive_kalmanson(VIOLATOR, pi.seq)]
    assert find_kalmanson_ordering(VIOLATOR) == (passing[0] if passing else None)
    assert find_kalmanson_ordering(VIOLATOR) == CircularOrdering((1, 2, 4, 3))


def test_find_kalmanson_capacity():
    with pytest.raises(CapacityError):
        find_kalmanson_ordering(DissimilarityMatrix.zeros(10))


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_circular_systems_pass_kalmanson(n):
    rng = random.Random(100 + n)
    for _ in range(15):
        W, pi = random_circular_system(n, rng)
        D = metric_from_network(W)
        assert kalmanson_check(D, pi)
        for k in range(n):
            rot = pi.seq[k:] + pi.seq[:k]
            assert kalmanson_check(D, rot)
            assert kalmanson_check(D, rot[::-1])


def test_kalmanson_agrees_with_naive():
    rng = random.Random(2)
    for _ in range(150):
        n = rng.randint(4, 6)
        pairs = {(i, j): rng.randint(0, 5) for i, j in combinations(range(1, n + 1), 2)}
        D = DissimilarityMatrix.from_pairs(n, pairs)
        for pi in list(all_orderings(n))[:5]:
            assert bool(kalmanson_check(D, pi)) == naive_kalmanson(D, pi.seq)


def test_scaling_preserves_verdicts():
    rng = random.Random(4)
    for _ in range(50):
        n = rng.randint(4, 6)
        pairs = {(i, j): rng.randint(0, 5) for i, j in combinations(range(1, n + 1), 2)}
        D = DissimilarityMatrix.from_pairs(n, pairs)
        E = D.scaled(Fraction(7, 3))
        assert bool(four_point_check(D)) == bool(four_point_check(E))
        pi = next(iter(all_orderings(n)))
        assert bool(kalmanson_check(D, pi)) == bool(kalmanson_check(E, pi))


# ---------------------------------------------------------------------------
# split metric and recovery
# ---------------------------------------------------------------------------


def test_metric_from_network_examples():
    assert metric_from_network(WeightedSplitSystem(5)) == DissimilarityMatrix.zeros(5)
    rng = random.Random(8)
    for _ in range(20):
        W = random_tree_system(6, rng)
        D = metric_from_network(W)
        tree = buneman_tree(W)
        for i, j in combinations(range(1, 7), 2):
            assert D(i, j) == tree.distance(i, j)


def test_recover_unit_quartet():
    fit = recover_split_weights(QUARTET, (1, 2, 3, 4))
    expected = {S([1, 2], 4): 1, **{S([t], 4): 1 for t in range(1, 5)}}
    assert fit.system == WeightedSplitSystem(4, expected)
    assert S([1, 4], 4) not in fit.system.weights
    assert fit.residual == 0


def test_recover_zero_matrix():
    fit = recover_split_weights(DissimilarityMatrix.zeros(5), (1, 2, 3, 4, 5))
    assert len(fit.system) == 0


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_recover_inverts_metric(n):
    rng = random.Random(200 + n)
    for _ in range(15):
        W, pi = random_circular_system(n, rng)
        fit = recover_split_weights(metric_from_network(W), pi)
        assert fit.system == W


def test_recover_infeasible_reports_offending():
    # triangle inequality fails between 1, 2, 3: a pendant weight goes negative
    D = DissimilarityMatrix.from_pairs(4, {(1, 2): 10, (1, 3): 1, (2, 3): 1, (1, 4): 5, (2, 4): 5, (3, 4): 5})
    with pytest.raises(InfeasibleFit) as info:
        recover_split_weights(D, (1, 2, 3, 4))
    assert info.value.offending


def test_circular_split_weights_linear_system():
    """The closed-form weights solve the linear system split by split."""
    rng = random.Random(9)
    for n in (4, 5, 6):
        pairs = {(i, j): Fraction(rng.randint(0, 9)) for i, j in combinations(range(1, n + 1), 2)}
        D = DissimilarityMatrix.from_pairs(n, pairs)
        pi = CircularOrdering(tuple(range(1, n + 1)))
        w = circular_split_weights(D, pi)
        assert len(w) == n * (n - 1) // 2
        for i, j in combinations(range(1, n + 1), 2):
            assert sum(v for s, v in w.items() if s.separates(i, j)) == D(i, j)


def test_recover_float_input():
    W, pi = random_circular_system(6, random.Random(11))
    D = metric_from_network(W)
    F = DissimilarityMatrix([[float(v) for v in r] for r in D.rows])
    fit = recover_split_weights(F, pi)
    for s, w in W.items():
        assert float(fit.system.weight(s)) == pytest.approx(float(w), abs=1e-9)
