"""Signed-domain permutation arithmetic, pairing enumeration, and orbits.

Everything downstream runs on the signed index set {-m, ..., -1, 1, ..., m}
(zero excluded): +k is the "front" copy of letter k and -k its "back"
copy on the orientation double cover.  A :class:`SignedPermutation` is an
arbitrary bijection of that set.  Purely positive permutations (factor
rotations, pairings) embed into it by fixing the negative half.

Canonical forms are load-bearing: pairing enumeration order fixes term
indices across runs, and the cycle canonical form (rotate each cycle so
its element of smallest absolute value comes first, positive preferred
when both signs occur; sort cycles by that leading element) keeps golden
output stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union


def _slot(k: int, m: int) -> int:
    """Array slot of signed element k: -m..-1 map to 0..m-1, 1..m to m..2m-1."""
    return k + m if k < 0 else k + m - 1


def signed_domain(m: int) -> tuple[int, ...]:
    """The signed index set in slot order: (-m, ..., -1, 1, ..., m)."""
    return tuple(range(-m, 0)) + tuple(range(1, m + 1))


@dataclass(frozen=True)
class SignedPermutation:
    """A bijection of {-m, ..., -1, 1, ..., m}, stored as a total image map.

    ``images[i]`` is the image of the element occupying slot ``i`` (slots
    run -m..-1 then 1..m).  Instances are immutable and safe to share.
    """

    m: int
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.m < 0:
            raise ValueError(f"half-domain size must be >= 0, got {self.m}")
        dom = signed_domain(self.m)
        if len(self.images) != 2 * self.m:
            raise ValueError(
                f"expected {2 * self.m} images for m={self.m}, got {len(self.images)}"
            )
        if sorted(self.images) != list(dom):
            raise ValueError("images do not form a bijection of the signed domain")

    @classmethod
    def identity(cls, m: int) -> "SignedPermutation":
        return cls(m, signed_domain(m))

    @classmethod
    def from_mapping(cls, m: int, mapping: dict[int, int]) -> "SignedPermutation":
        """Build from a partial map; unlisted elements are fixed."""
        images = list(signed_domain(m))
        for k, v in mapping.items():
            images[_slot(k, m)] = v
        return cls(m, tuple(images))

    @classmethod
    def from_cycles(cls, m: int, cycles: Iterable[Sequence[int]]) -> "SignedPermutation":
        """Build from disjoint cycles over the signed domain; others fixed.

        >>> SignedPermutation.from_cycles(2, [(1, 2)])(1)
        2
        >>> SignedPermutation.from_cycles(2, [(1, 2)])(-1)
        -1
        """
        mapping: dict[int, int] = {}
        for cyc in cycles:
            for a, b in zip(cyc, tuple(cyc[1:]) + (cyc[0],)):
                if a in mapping:
                    raise ValueError(f"element {a} appears in more than one cycle")
                mapping[a] = b
        return cls.from_mapping(m, mapping)

    def __call__(self, k: int) -> int:
        return self.images[_slot(k, self.m)]

    def domain(self) -> tuple[int, ...]:
        return signed_domain(self.m)

    def __mul__(self, other: "SignedPermutation") -> "SignedPermutation":
        return compose(self, other)


def compose(s: SignedPermutation, t: SignedPermutation) -> SignedPermutation:
    """Right-to-left product: (s*t)(k) = s(t(k)).

    >>> s = SignedPermutation.from_cycles(2, [(1, 2)])
    >>> compose(s, SignedPermutation.identity(2)) == s
    True
    """
    if s.m != t.m:
        raise ValueError(f"half-domain sizes differ: {s.m} != {t.m}")
    m = s.m
    s_img = s.images
    return SignedPermutation(m, tuple(s_img[_slot(v, m)] for v in t.images))


def inverse(s: SignedPermutation) -> SignedPermutation:
    m = s.m
    images = [0] * (2 * m)
    for i, v in enumerate(s.images):
        k = i - m if i < m else i - m + 1
        images[_slot(v, m)] = k
    return SignedPermutation(m, tuple(images))


def conjugate(s: SignedPermutation, t: SignedPermutation) -> SignedPermutation:
    """t * s * t^-1: relabels s by t."""
    return compose(t, compose(s, inverse(t)))


def cycles(s: SignedPermutation) -> tuple[tuple[int, ...], ...]:
    """Canonical cycle decomposition, fixed points included.

    Each cycle is rotated so its element of smallest absolute value comes
    first (positive preferred if both k and -k lie in the cycle); cycles
    are sorted by (|leading|, sign of leading).

    >>> cycles(SignedPermutation.identity(1))
    ((1,), (-1,))
    """
    m = s.m
    seen = [False] * (2 * m)
    out = []
    for start in range(1, m + 1):
        for lead in (start, -start):
            i = _slot(lead, m)
            if seen[i]:
                continue
            cyc = []
            k = lead
            while True:
                j = _slot(k, m)
                if seen[j]:
                    break
                seen[j] = True
                cyc.append(k)
                k = s.images[j]
            out.append(_canonical_rotation(tuple(cyc)))
    out.sort(key=lambda c: (abs(c[0]), c[0] < 0))
    return tuple(out)


def _canonical_rotation(cyc: tuple[int, ...]) -> tuple[int, ...]:
    best = min(range(len(cyc)), key=lambda i: (abs(cyc[i]), cyc[i] < 0))
    return cyc[best:] + cyc[:best]


def cycle_string(cyc_list: Iterable[Sequence[int]]) -> str:
    """Render cycles as e.g. ``(1,-9)(-1,9)(2,7)``."""
    return "".join("(" + ",".join(str(k) for k in c) + ")" for c in cyc_list)


@dataclass(frozen=True)
class Pairing:
    """A fixed-point-free involution of {1, ..., m} (m even): one Wick term.

    ``partner`` is 1-indexed via ``partner[k - 1]``.
    """

    m: int
    partner: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.m % 2:
            raise ValueError(f"pairings need an even ground set, got m={self.m}")
        if len(self.partner) != self.m:
            raise ValueError("partner map has wrong length")
        for k in range(1, self.m + 1):
            p = self.partner[k - 1]
            if not 1 <= p <= self.m or p == k or self.partner[p - 1] != k:
                raise ValueError("partner map is not a fixed-point-free involution")

    @classmethod
    def from_blocks(cls, m: int, blocks: Iterable[Sequence[int]]) -> "Pairing":
        partner = [0] * m
        for a, b in blocks:
            partner[a - 1] = b
            partner[b - 1] = a
        return cls(m, tuple(partner))

    def __call__(self, k: int) -> int:
        return self.partner[k - 1]

    def blocks(self) -> tuple[tuple[int, int], ...]:
        """Blocks as (min, max) pairs sorted by first element."""
        return tuple(
            (k, self.partner[k - 1])
            for k in range(1, self.m + 1)
            if k < self.partner[k - 1]
        )

    def as_signed(self) -> SignedPermutation:
        """Embed into the signed domain, fixing every negative element."""
        neg = tuple(range(-self.m, 0))
        return SignedPermutation(self.m, neg + self.partner)


def pairing_count(m: int) -> int:
    """(m-1)!! for even m, the number of pairings; 0 for odd m, 1 for m=0."""
    if m % 2:
        return 0
    count = 1
    for k in range(m - 1, 0, -2):
        count *= k
    return count


def enumerate_pairings(m: int) -> Iterator[Pairing]:
    """All pairings of [m] in canonical order.

    The smallest unpaired element is paired with each larger unpaired
    element in increasing order, recursively; this yields exactly
    (m-1)!! pairings and fixes the term indexing used everywhere.
    Odd m yields nothing; m = 0 yields the single empty pairing.

    >>> [p.blocks() for p in enumerate_pairings(4)][:2]
    [((1, 2), (3, 4)), ((1, 3), (2, 4))]
    """
    if m % 2:
        return
    partner = [0] * m

    def rec(avail: tuple[int, ...]) -> Iterator[Pairing]:
        if not avail:
            yield Pairing(m, tuple(partner))
            return
        a = avail[0]
        for i in range(1, len(avail)):
            b = avail[i]
            partner[a - 1] = b
            partner[b - 1] = a
            yield from rec(avail[1:i] + avail[i + 1 :])
        partner[a - 1] = 0

    yield from rec(tuple(range(1, m + 1)))


def crossings(p: Pairing) -> int:
    """Number of interleaved block pairs {i,j}, {k,l} with i < k < j < l.

    >>> crossings(Pairing.from_blocks(4, [(1, 3), (2, 4)]))
    1
    """
    blocks = p.blocks()
    n = 0
    for x in range(len(blocks)):
        i, j = blocks[x]
        for y in range(x + 1, len(blocks)):
            k, l = blocks[y]
            if i < k < j < l or k < i < l < j:
                n += 1
    return n


class _UnionFind:
    def __init__(self, elements: Iterable[int]):
        self.parent = {x: x for x in elements}

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx


@dataclass(frozen=True)
class SetPartition:
    """A partition of an ordered ground set into non-empty disjoint blocks.

    ``block_index[i]`` is the block of ``elements[i]``; blocks are numbered
    0, 1, ... in order of first appearance, which makes equality structural.
    """

    elements: tuple[int, ...]
    block_index: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.elements) != len(self.block_index):
            raise ValueError("block assignment length mismatch")
        seen: list[int] = []
        for b in self.block_index:
            if b == len(seen):
                seen.append(b)
            elif b > len(seen):
                raise ValueError("blocks must be numbered by first appearance")

    @classmethod
    def from_blocks(
        cls, elements: Sequence[int], blocks: Iterable[Iterable[int]]
    ) -> "SetPartition":
        where = {}
        for bi, block in enumerate(blocks):
            for e in block:
                where[e] = bi
        if set(where) != set(elements):
            raise ValueError("blocks must cover the ground set exactly")
        renumber: dict[int, int] = {}
        idx = []
        for e in elements:
            b = where[e]
            renumber.setdefault(b, len(renumber))
            idx.append(renumber[b])
        return cls(tuple(elements), tuple(idx))

    @classmethod
    def singletons(cls, elements: Sequence[int]) -> "SetPartition":
        return cls(tuple(elements), tuple(range(len(elements))))

    def block_count(self) -> int:
        return max(self.block_index, default=-1) + 1

    def block_of(self, e: int) -> int:
        return self.block_index[self.elements.index(e)]

    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.block_count())]
        for e, b in zip(self.elements, self.block_index):
            out[b].append(e)
        return tuple(tuple(b) for b in out)


Generator = Union[SignedPermutation, Pairing]


def orbits(generators: Iterable[Generator], domain: Sequence[int]) -> SetPartition:
    """Orbit partition of the group generated by ``generators`` on ``domain``.

    Computed by union-find over generator images; pairings act on positive
    elements only and fix everything else.
    """
    uf = _UnionFind(domain)
    dom = set(domain)
    for g in generators:
        for x in domain:
            if isinstance(g, Pairing):
                y = g(x) if 1 <= x <= g.m else x
            else:
                y = g(x)
            if y not in dom:
                raise ValueError(f"generator maps {x} outside the domain")
            uf.union(x, y)
    roots = {}
    idx = []
    for x in domain:
        r = uf.find(x)
        roots.setdefault(r, len(roots))
        idx.append(roots[r])
    return SetPartition(tuple(domain), tuple(idx))


def induced_partition(
    gamma: SignedPermutation, p: Pairing, lengths: Sequence[int]
) -> SetPartition:
    """Partition of the factor indices [1..r] induced by gluing.

    Factors i and j share a block iff their letter ranges meet the same
    orbit of the group generated by the factor rotation and the pairing.
    """
    m = sum(lengths)
    if p.m != m:
        raise ValueError(f"pairing is over {p.m} letters, factors supply {m}")
    orb = orbits([gamma, p], tuple(range(1, m + 1)))
    starts = []
    acc = 1
    for length in lengths:
        starts.append(acc)
        acc += length
    factor_ids = tuple(range(1, len(lengths) + 1))
    block_of_factor = [orb.block_of(s) for s in starts]
    renumber: dict[int, int] = {}
    idx = []
    for b in block_of_factor:
        renumber.setdefault(b, len(renumber))
        idx.append(renumber[b])
    return SetPartition(factor_ids, tuple(idx))


def set_partitions(n: int) -> Iterator[SetPartition]:
    """All partitions of [1..n] via restricted-growth strings.

    >>> sum(1 for _ in set_partitions(3))
    5
    """
    elements = tuple(range(1, n + 1))
    if n == 0:
        yield SetPartition((), ())
        return

    def rec(prefix: list[int], used: int) -> Iterator[SetPartition]:
        if len(prefix) == n:
            yield SetPartition(elements, tuple(prefix))
            return
        for b in range(used + 1):
            prefix.append(b)
            yield from rec(prefix, max(used, b + 1))
            prefix.pop()

    yield from rec([], 0)
