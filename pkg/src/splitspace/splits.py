"""Splits, split systems, circular orderings and the Buneman tree.

A split of the taxa ``1..n`` is stored by the side that does not contain
taxon ``n`` (its *block*), sorted ascending.  This fixes a total order on
splits (lexicographic on the block) that every coordinate system in the
package relies on.  Taxon sets are also kept as bitmasks, bit ``t - 1`` for
taxon ``t``, because nearly every predicate reduces to a few mask operations.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .errors import AmbientMismatch, IncompatibleSplits, MalformedPartition


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(taxa: Iterable[int]) -> int:
    m = 0
    for t in taxa:
        m |= 1 << (t - 1)
    return m


def taxa_of(mask: int) -> tuple[int, ...]:
    out = []
    t = 1
    while mask:
        if mask & 1:
            out.append(t)
        mask >>= 1
        t += 1
    return tuple(out)


@dataclass(frozen=True, order=True)
class Split:
    """A bipartition of ``{1..n}`` keyed by the side without taxon ``n``."""

    block: tuple[int, ...]
    n: int
    mask: int = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        block = tuple(self.block)
        object.__setattr__(self, "block", block)
        n = self.n
        if n < 2:
            raise MalformedPartition(f"need at least two taxa, got n={n}")
        if not block:
            raise MalformedPartition("split block is empty")
        if any(b >= a for a, b in zip(block[1:], block)):
            raise MalformedPartition(f"block {block} is not strictly ascending")
        if block[0] < 1 or block[-1] >= n:
            raise MalformedPartition(
                f"block {block} must lie in 1..{n - 1} (taxon {n} is on the other side)"
            )
        object.__setattr__(self, "mask", mask_of(block))
        object.__setattr__(self, "_hash", hash((self.mask, n)))

    def __hash__(self) -> int:
        # splits key every coordinate table, so hash once
        return self._hash

    @classmethod
    def from_mask(cls, mask: int, n: int) -> Split:
        full = full_mask(n)
        if mask & ~full or mask in (0, full):
            raise MalformedPartition(f"mask {mask:b} is not a proper nonempty subset")
        if mask >> (n - 1) & 1:
            mask ^= full
        return cls(taxa_of(mask), n)

    @property
    def complement(self) -> tuple[int, ...]:
        return taxa_of(full_mask(self.n) ^ self.mask)

    @property
    def sides(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.block, self.complement

    def is_trivial(self) -> bool:
        return len(self.block) in (1, self.n - 1)

    def separates(self, i: int, j: int) -> bool:
        return bool((self.mask >> (i - 1) ^ self.mask >> (j - 1)) & 1)

    def side_mask(self, taxon: int) -> int:
        """Mask of the side containing ``taxon``."""
        if self.mask >> (taxon - 1) & 1:
            return self.mask
        return full_mask(self.n) ^ self.mask

    def __str__(self) -> str:
        sep = "," if self.n >= 10 else ""
        return sep.join(map(str, self.block)) + "|" + sep.join(map(str, self.complement))


def canonicalize(side_a: Iterable[int], side_b: Iterable[int], n: int) -> Split:
    """Build the canonical split from the two sides of a partition of ``1..n``."""
    a, b = set(side_a), set(side_b)
    if not a or not b:
        raise MalformedPartition("both sides of a split must be nonempty")
    if a & b:
        raise MalformedPartition(f"sides overlap on {sorted(a & b)}")
    if a | b != set(range(1, n + 1)):
        missing = set(range(1, n + 1)) - (a | b)
        extra = (a | b) - set(range(1, n + 1))
        raise MalformedPartition(
            f"sides do not partition 1..{n}: missing {sorted(missing)}, extra {sorted(extra)}"
        )
    block = b if n in a else a
    return Split(tuple(sorted(block)), n)


def split_from_block(block: Iterable[int], n: int) -> Split:
    """Canonical split given either side of the partition."""
    side = set(block)
    return canonicalize(side, set(range(1, n + 1)) - side, n)


def is_trivial(s: Split) -> bool:
    return s.is_trivial()


def pairwise_compatible(s1: Split, s2: Split) -> bool:
    """True iff one of the four cross intersections of the two splits is empty."""
    if s1.n != s2.n:
        raise AmbientMismatch(f"splits on {s1.n} and {s2.n} taxa")
    full = full_mask(s1.n)
    a1, a2 = s1.mask, s2.mask
    b1, b2 = full ^ a1, full ^ a2
    return not (a1 & a2) or not (a1 & b2) or not (a2 & b1) or not (b1 & b2)


@dataclass(frozen=True)
class SplitSystem:
    n: int
    splits: frozenset[Split]

    def __post_init__(self) -> None:
        splits = frozenset(self.splits)
        for s in splits:
            if s.n != self.n:
                raise AmbientMismatch(f"split {s} has n={s.n}, system has n={self.n}")
        object.__setattr__(self, "splits", splits)

    @classmethod
    def of(cls, n: int, blocks: Iterable[Iterable[int]]) -> SplitSystem:
        return cls(n, frozenset(split_from_block(b, n) for b in blocks))

    def __iter__(self) -> Iterator[Split]:
        return iter(sorted(self.splits))

    def __len__(self) -> int:
        return len(self.splits)

    def __contains__(self, s: object) -> bool:
        return s in self.splits

    def nontrivial(self) -> SplitSystem:
        return SplitSystem(self.n, frozenset(s for s in self.splits if not s.is_trivial()))

    def is_pairwise_compatible(self) -> bool:
        return all(pairwise_compatible(a, b) for a, b in combinations(self.splits, 2))


class WeightedSplitSystem:
    """Immutable map from splits to positive rational weights.

    Zero weights are dropped on construction; negative weights are rejected.
    """

    __slots__ = ("n", "_weights")

    def __init__(self, n: int, weights: Mapping[Split, object] | Iterable[tuple[Split, object]] = ()):
        items = weights.items() if isinstance(weights, Mapping) else weights
        table: dict[Split, Fraction] = {}
        for s, w in items:
            if s.n != n:
                raise AmbientMismatch(f"split {s} has n={s.n}, system has n={n}")
            if s in table:
                raise MalformedPartition(f"duplicate split {s}")
            w = Fraction(w)
            if w < 0:
                raise ValueError(f"negative weight {w} on split {s}")
            if w:
                table[s] = w
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "_weights", dict(sorted(table.items())))

    def __setattr__(self, name, value):
        raise AttributeError("WeightedSplitSystem is immutable")

    @property
    def weights(self) -> dict[Split, Fraction]:
        return dict(self._weights)

    @property
    def system(self) -> SplitSystem:
        return SplitSystem(self.n, frozenset(self._weights))

    def weight(self, s: Split) -> Fraction:
        return self._weights.get(s, Fraction(0))

    def items(self):
        return self._weights.items()

    def __iter__(self) -> Iterator[Split]:
        return iter(self._weights)

    def __len__(self) -> int:
        return len(self._weights)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedSplitSystem):
            return NotImplemented
        return self.n == other.n and self._weights == other._weights

    def __hash__(self) -> int:
        return hash((self.n, tuple(self._weights.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{s}: {w}" for s, w in self._weights.items())
        return f"WeightedSplitSystem(n={self.n}, {{{body}}})"

    def nontrivial(self) -> WeightedSplitSystem:
        return WeightedSplitSystem(self.n, {s: w for s, w in self._weights.items() if not s.is_trivial()})


# ---------------------------------------------------------------------------
# circular orderings
# ---------------------------------------------------------------------------


def canonical_cycle(seq: Iterable[int]) -> tuple[int, ...]:
    """Rotate ``seq`` to start at its minimum, then fix the reflection."""
    seq = tuple(seq)
    k = seq.index(min(seq))
    rot = seq[k:] + seq[:k]
    if len(rot) > 2 and rot[1] > rot[-1]:
        rot = (rot[0],) + tuple(reversed(rot[1:]))
    return rot


@dataclass(frozen=True, order=True)
class CircularOrdering:
    """A cyclic order of ``1..n`` up to rotation and reflection.

    The stored sequence starts with taxon 1 and has its second entry smaller
    than its last, so equal classes compare equal.
    """

    seq: tuple[int, ...]

    def __post_init__(self) -> None:
        seq = tuple(self.seq)
        n = len(seq)
        if n < 3 or sorted(seq) != list(range(1, n + 1)):
            raise MalformedPartition(f"{seq} is not a permutation of 1..n with n >= 3")
        object.__setattr__(self, "seq", canonical_cycle(seq))

    @property
    def n(self) -> int:
        return len(self.seq)

    def __iter__(self) -> Iterator[int]:
        return iter(self.seq)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.seq)) + ")"

    def arcs(self) -> Iterator[tuple[int, ...]]:
        """Every proper contiguous arc of length 1..n-1 (both sides of each split)."""
        seq, n = self.seq, self.n
        for length in range(1, n):
            for start in range(n):
                yield tuple(seq[(start + i) % n] for i in range(length))

    def circular_splits(self, nontrivial: bool = True) -> list[Split]:
        """All splits circular for this ordering, sorted."""
        n = self.n
        out = {Split.from_mask(mask_of(arc), n) for arc in self.arcs()}
        if nontrivial:
            out = {s for s in out if not s.is_trivial()}
        return sorted(out)


def is_arc(mask: int, seq: tuple[int, ...]) -> bool:
    """True iff the taxa in ``mask`` are contiguous in the cyclic sequence."""
    n = len(seq)
    boundaries = 0
    prev = mask >> (seq[-1] - 1) & 1
    for t in seq:
        cur = mask >> (t - 1) & 1
        if cur and not prev:
            boundaries += 1
        prev = cur
    return boundaries <= 1 and 0 < mask


def is_circular(splits: Iterable[Split], ordering: CircularOrdering | Iterable[int]) -> bool:
    """True iff every split is a contiguous arc of ``ordering``."""
    seq = ordering.seq if isinstance(ordering, CircularOrdering) else tuple(ordering)
    for s in splits:
        if s.n != len(seq):
            raise AmbientMismatch(f"split {s} on {s.n} taxa vs ordering on {len(seq)}")
        if not is_arc(s.mask, seq):
            return False
    return True


def circular_orderings(splits: Iterable[Split], n: int) -> Iterator[CircularOrdering]:
    """Yield every canonical ordering for which all ``splits`` are circular.

    Depth-first over linear sequences starting with taxon 1; each split
    contributes its side without taxon 1, which must stay a contiguous run.
    Yields in lexicographic order of the canonical sequence.
    """
    full = full_mask(n)
    sides = []
    for s in splits:
        if s.n != n:
            raise AmbientMismatch(f"split {s} on {s.n} taxa, expected {n}")
        side = s.mask if not s.mask & 1 else full ^ s.mask
        if side and side != full and bin(side).count("1") > 1:
            sides.append(side)
    sides = sorted(set(sides))
    seq = [1]
    placed = 1

    def ok(t: int) -> bool:
        bit = 1 << (t - 1)
        prev_bit = 1 << (seq[-1] - 1)
        for side in sides:
            if side & bit:
                # entering or continuing the run; reopening is illegal
                if side & placed and not side & prev_bit:
                    return False
            elif side & prev_bit and (side & ~placed):
                # leaving the run before it is complete
                return False
        return True

    def extend() -> Iterator[CircularOrdering]:
        nonlocal placed
        if len(seq) == n:
            if n < 3 or seq[1] < seq[-1]:
                yield CircularOrdering(tuple(seq))
            return
        for t in range(2, n + 1):
            bit = 1 << (t - 1)
            if placed & bit or not ok(t):
                continue
            seq.append(t)
            placed |= bit
            yield from extend()
            placed &= ~bit
            seq.pop()

    yield from extend()


def all_orderings(n: int) -> Iterator[CircularOrdering]:
    """All ``(n-1)!/2`` canonical circular orderings, lexicographically."""
    return circular_orderings((), n)


# ---------------------------------------------------------------------------
# Buneman tree of a pairwise compatible system
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TreeEdge:
    u: int
    v: int
    length: Fraction
    split: Split


@dataclass(frozen=True)
class LeafLabeledTree:
    """Unrooted tree whose leaves ``1..n`` are the taxa.

    Internal vertices are numbered from ``n + 1``.  Pendant edges carry the
    weight of the corresponding trivial split (zero when it is absent).
    """

    n: int
    edges: tuple[TreeEdge, ...]

    @property
    def vertices(self) -> list[int]:
        vs = {e.u for e in self.edges} | {e.v for e in self.edges}
        return sorted(vs | set(range(1, self.n + 1)))

    def adjacency(self) -> dict[int, list[tuple[int, Fraction]]]:
        adj: dict[int, list[tuple[int, Fraction]]] = {v: [] for v in self.vertices}
        for e in self.edges:
            adj[e.u].append((e.v, e.length))
            adj[e.v].append((e.u, e.length))
        return adj

    def internal_splits(self) -> dict[Split, Fraction]:
        return {e.split: e.length for e in self.edges if e.u > self.n and e.v > self.n}

    def distance(self, i: int, j: int) -> Fraction:
        adj = self.adjacency()
        stack = [(i, 0, Fraction(0))]
        while stack:
            v, parent, dist = stack.pop()
            if v == j:
                return dist
            for w, length in adj[v]:
                if w != parent:
                    stack.append((w, v, dist + length))
        raise ValueError(f"taxa {i} and {j} are not connected")

    def path_metric(self) -> list[list[Fraction]]:
        n = self.n
        d = [[Fraction(0)] * n for _ in range(n)]
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                d[i - 1][j - 1] = d[j - 1][i - 1] = self.distance(i, j)
        return d


def buneman_tree(system: WeightedSplitSystem | SplitSystem) -> LeafLabeledTree:
    """Build the tree realising a pairwise compatible split system.

    Blocks (sides without taxon ``n``) of compatible splits form a laminar
    family, so each block hangs below the smallest block containing it and
    the root block ``{1..n-1}`` connects to leaf ``n``.  Unweighted systems
    get unit weights on their splits.
    """
    if isinstance(system, SplitSystem):
        system = WeightedSplitSystem(system.n, {s: 1 for s in system.splits})
    n = system.n
    weights = system.weights
    splits = sorted(weights)
    for a, b in combinations(splits, 2):
        if not pairwise_compatible(a, b):
            raise IncompatibleSplits(a, b)

    internal = [s for s in splits if not s.is_trivial()]
    # largest blocks first so parents receive ids before their children
    internal.sort(key=lambda s: (-len(s.block), s.block))
    root = n + 1
    node_of = {s: n + 2 + i for i, s in enumerate(internal)}

    def parent_of(mask: int) -> Split | None:
        best = None
        for s in internal:
            if s.mask != mask and s.mask & mask == mask:
                if best is None or len(s.block) < len(best.block):
                    best = s
        return best

    edges = []
    for s in internal:
        p = parent_of(s.mask)
        edges.append(TreeEdge(root if p is None else node_of[p], node_of[s], weights[s], s))
    for t in range(1, n):
        p = parent_of(1 << (t - 1))
        leaf_split = Split((t,), n)
        edges.append(TreeEdge(root if p is None else node_of[p], t, weights.get(leaf_split, Fraction(0)), leaf_split))
    n_split = Split(tuple(range(1, n)), n)
    edges.append(TreeEdge(root, n, weights.get(n_split, Fraction(0)), n_split))
    return LeafLabeledTree(n, tuple(sorted(edges, key=lambda e: (e.u, e.v))))
