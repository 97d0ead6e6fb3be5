"""Pairing-sum evaluation of trace-word moments and cumulants.

The moment of a product of normalized trace factors is the sum, over all
pairings of the word's letters, of a per-pairing weight times the trace
product read off the particular vertex cycles, scaled by the global
prefactor N^(-m/2 - r).  Cumulants restrict the sum to pairings that
connect all factors (one orbit together with the factor rotation) and
carry the same prefactor, which is what makes moment-cumulant inversion
hold numerically.

Weights cover the generalized models: q^crossings for q-commutative
families and a Gram factor per block for Hilbert-indexed families; the
single-matrix model is q = 1 with a rank-one unit Gram.  Wigner letters
are averaged over both transpose signs with weight 1/2 per letter, which
requires square X.

Float evaluation reduces with error-free summation in canonical pairing
order, so results are bit-identical regardless of the thread count;
exact mode keeps everything in integers and rationals.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

from .gluing import (
    SurfaceReport,
    WordShape,
    particular_cycles,
    slot_dimensions,
    surface_census,
    vertex_permutation,
)
from .matrices import DimensionError, MatrixSet, trace_along
from .perm import Pairing, crossings, enumerate_pairings, orbits

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class Gram:
    """Symmetric matrix of inner products between matrix-family labels."""

    labels: tuple[str, ...]
    entries: tuple[tuple[Number, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValueError("gram labels must be distinct")
        if len(self.entries) != n or any(len(row) != n for row in self.entries):
            raise ValueError("gram matrix must be square over the labels")
        for i in range(n):
            for j in range(i):
                if self.entries[i][j] != self.entries[j][i]:
                    raise ValueError("gram matrix must be symmetric")

    @classmethod
    def identity(cls, labels: Sequence[str]) -> "Gram":
        n = len(labels)
        return cls(
            tuple(labels),
            tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)),
        )

    @classmethod
    def ones(cls, labels: Sequence[str]) -> "Gram":
        n = len(labels)
        return cls(tuple(labels), tuple(tuple(1 for _ in range(n)) for _ in range(n)))

    def value(self, a: str, b: str) -> Number:
        try:
            i, j = self.labels.index(a), self.labels.index(b)
        except ValueError as exc:
            raise KeyError(f"unknown matrix family {exc}") from None
        return self.entries[i][j]

    def covers(self, labels: Sequence[str]) -> bool:
        return set(labels) <= set(self.labels)


def _distinct_in_order(labels: Sequence[str]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for lab in labels:
        seen.setdefault(lab)
    return tuple(seen)


@dataclass(frozen=True)
class MomentSpec:
    """A fully bound trace-word problem ready for evaluation.

    X-type letters are m_dim x n_dim; traces are always normalized by
    n_dim.  ``wigner`` names the families averaged over both transpose
    signs (square case only).  The default Gram makes distinct families
    independent with unit norm, which for a single family is the plain
    single-matrix model.
    """

    shape: WordShape
    matrices: MatrixSet
    n_dim: int
    m_dim: int
    q: Number = 1
    gram: Optional[Gram] = None
    wigner: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.n_dim < 1 or self.m_dim < 1:
            raise ValueError("matrix dimensions must be positive")
        if not -1 <= float(self.q) <= 1:
            raise ValueError(f"q must lie in [-1, 1], got {self.q}")
        object.__setattr__(self, "wigner", frozenset(self.wigner))
        if self.gram is None:
            object.__setattr__(
                self, "gram", Gram.identity(_distinct_in_order(self.shape.labels))
            )
        elif not self.gram.covers(self.shape.labels):
            missing = sorted(set(self.shape.labels) - set(self.gram.labels))
            raise ValueError(f"gram matrix does not cover families: {missing}")
        unknown = self.wigner - set(self.shape.labels)
        if unknown:
            raise ValueError(f"wigner families not in the word: {sorted(unknown)}")
        if self.wigner and self.n_dim != self.m_dim:
            raise DimensionError("Wigner letters need square X, so N must equal M")
        if self.matrices.count != self.shape.m:
            raise ValueError(
                f"word has {self.shape.m} slots, matrix set has {self.matrices.count}"
            )
        profile = slot_dimensions(self.shape, self.n_dim, self.m_dim)
        for k, want in enumerate(profile, start=1):
            got = self.matrices.dims(k)
            if got != want:
                raise DimensionError(
                    f"slot {k} expected {want[0]}x{want[1]}, got {got[0]}x{got[1]}"
                )

    def fingerprint(self) -> str:
        """Stable content hash for reproducibility metadata."""
        h = hashlib.sha256()
        parts = [
            repr(self.shape.lengths),
            repr(self.shape.epsilon),
            repr(self.shape.labels),
            repr((self.n_dim, self.m_dim)),
            repr(str(self.q)),
            repr(self.gram.labels),
            repr(tuple(tuple(str(x) for x in row) for row in self.gram.entries)),
            repr(sorted(self.wigner)),
        ]
        for mat in self.matrices.matrices:
            parts.append(repr(tuple(tuple(str(x) for x in row) for row in mat.entries)))
        h.update("|".join(parts).encode())
        return h.hexdigest()


@dataclass(frozen=True)
class TermReport:
    """One summand of the pairing sum, before the global prefactor."""

    index: int
    blocks: tuple[tuple[int, int], ...]
    weight: Number
    cycles: tuple[tuple[int, ...], ...]
    surface: SurfaceReport
    order_exponent: int
    value: Number
    epsilon: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class MomentResult:
    """Total with its term decomposition and run metadata.

    ``total`` equals n_dim**prefactor_exponent times the sum of term
    values (up to float accumulation).  ``prefactor_exponent`` is only
    meaningful when terms exist; an odd letter count yields total 0 with
    no terms.
    """

    total: Number
    prefactor_exponent: int
    terms: tuple[TermReport, ...]
    metadata: dict = field(default_factory=dict, compare=False)


def pairing_weight(p: Pairing, spec: MomentSpec, exact: bool = False) -> Number:
    """q^crossings(p) times the product of Gram entries over the blocks.

    The convention q**0 = 1 applies for every q including 0, so q = 0
    keeps exactly the noncrossing pairings.
    """
    q = _as_number(spec.q, exact)
    weight = q ** crossings(p)
    labels = spec.shape.labels
    for a, b in p.blocks():
        weight *= _as_number(spec.gram.value(labels[a - 1], labels[b - 1]), exact)
    return weight


def _as_number(x: Number, exact: bool) -> Number:
    if exact:
        return x if isinstance(x, (int, Fraction)) else Fraction(x)
    return float(x)


def moment(spec: MomentSpec, *, exact: bool = False, threads: int = 1) -> MomentResult:
    """Expected value of the product of the word's normalized trace factors.

    Odd letter counts give exactly 0 with an empty term list.  Wigner
    families are averaged over both transpose signs per occurrence.
    """
    return _evaluate(spec, transitive_only=False, exact=exact, threads=threads)


def cumulant(spec: MomentSpec, *, exact: bool = False, threads: int = 1) -> MomentResult:
    """Joint cumulant of the word's factors: the pairing sum restricted to
    pairings connecting all factors, with the same global prefactor."""
    return _evaluate(spec, transitive_only=True, exact=exact, threads=threads)


def wigner_moment(spec: MomentSpec, *, exact: bool = False, threads: int = 1) -> MomentResult:
    """Moment of a word containing Wigner letters (explicit-name variant)."""
    if not spec.wigner:
        raise ValueError("spec declares no Wigner families")
    return moment(spec, exact=exact, threads=threads)


def is_transitive(p: Pairing, shape: WordShape) -> bool:
    """True when the pairing connects all factors: the factor rotation and
    the pairing together have a single orbit on the letters."""
    from .gluing import front_rotation

    if shape.m == 0:
        return shape.r <= 1
    orb = orbits([front_rotation(shape), p], tuple(range(1, shape.m + 1)))
    return orb.block_count() == 1


@lru_cache(maxsize=65536)
def _combinatorics(p: Pairing, shape: WordShape):
    """Particular cycles and census for one pairing; independent of the
    matrices and dimensions, so worth caching across evaluations."""
    parts = particular_cycles(vertex_permutation(p, shape))
    return parts, surface_census(p, shape, particular=parts)


def _evaluate(
    spec: MomentSpec, transitive_only: bool, exact: bool, threads: int = 1
) -> MomentResult:
    start = time.perf_counter()
    shape = spec.shape
    m, r = shape.m, shape.r
    prefactor_exp = -(m // 2) - r
    statistic = "cumulant" if transitive_only else "moment"

    wigner_pos = tuple(
        k for k, lab in enumerate(shape.labels, start=1) if lab in spec.wigner
    )
    w = len(wigner_pos)

    metadata = {
        "statistic": statistic,
        "mode": "exact" if exact else "float",
        "m": m,
        "r": r,
        "n_dim": spec.n_dim,
        "m_dim": spec.m_dim,
        "wigner_letters": w,
        "spec_hash": spec.fingerprint(),
    }

    if m % 2:
        metadata["elapsed_s"] = time.perf_counter() - start
        return MomentResult(
            total=Fraction(0) if exact else 0.0,
            prefactor_exponent=prefactor_exp,
            terms=(),
            metadata=metadata,
        )

    assignments = list(itertools.product((1, -1), repeat=w))
    share: Number = Fraction(1, 2**w) if exact else 0.5**w

    def shape_with(assign: tuple[int, ...]) -> WordShape:
        if not w:
            return shape
        eps = list(shape.epsilon)
        for pos, sign in zip(wigner_pos, assign):
            eps[pos - 1] = sign
        return WordShape(shape.lengths, tuple(eps), shape.labels)

    shapes = [shape_with(a) for a in assignments]
    pairings = list(enumerate_pairings(m))

    def terms_for(span: tuple[int, int]) -> list[TermReport]:
        out = []
        for idx in range(*span):
            p = pairings[idx]
            if transitive_only and not is_transitive(p, shape):
                continue
            base_weight = pairing_weight(p, spec, exact)
            weight = base_weight * share
            for shape_a in shapes:
                parts, census = _combinatorics(p, shape_a)
                if weight == 0:
                    value: Number = weight
                else:
                    value = weight * trace_along(parts, spec.matrices, exact)
                out.append(
                    TermReport(
                        index=idx,
                        blocks=p.blocks(),
                        weight=weight,
                        cycles=parts,
                        surface=census,
                        order_exponent=census.order_exponent,
                        value=value,
                        epsilon=shape_a.epsilon if w else None,
                    )
                )
        return out

    if threads > 1 and len(pairings) > 1:
        nchunks = min(threads * 4, len(pairings))
        bounds = [
            (i * len(pairings) // nchunks, (i + 1) * len(pairings) // nchunks)
            for i in range(nchunks)
        ]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(terms_for, bounds))
        terms = [t for chunk in chunks for t in chunk]
    else:
        terms = terms_for((0, len(pairings)))

    if exact:
        prefactor: Number = Fraction(1, spec.n_dim ** (m // 2 + r))
        total: Number = prefactor * sum(t.value for t in terms)
    else:
        total = float(spec.n_dim) ** prefactor_exp * math.fsum(t.value for t in terms)

    metadata["elapsed_s"] = time.perf_counter() - start
    return MomentResult(
        total=total,
        prefactor_exponent=prefactor_exp,
        terms=tuple(terms),
        metadata=metadata,
    )


def leading_terms(result: MomentResult, mode: str) -> tuple[TermReport, ...]:
    """Terms achieving the order bound: exponent 0 for moments (all-sphere
    surfaces), 2 - 2r for cumulants (a connected sphere)."""
    r = result.metadata["r"]
    if mode == "moment":
        target = 0
    elif mode == "cumulant":
        target = 2 - 2 * r
    else:
        raise ValueError(f"mode must be 'moment' or 'cumulant', got {mode!r}")
    return tuple(t for t in result.terms if t.order_exponent == target)


def subspec(spec: MomentSpec, factors: Sequence[int]) -> MomentSpec:
    """Restrict a spec to the given 1-based factors (repeats allowed).

    Letter, transpose, label and matrix data for each chosen factor are
    copied in order; dimensions and model parameters carry over.
    """
    ranges = spec.shape.factor_ranges()
    lengths, eps, labels, mats = [], [], [], []
    for f in factors:
        if not 1 <= f <= spec.shape.r:
            raise ValueError(f"factor {f} outside 1..{spec.shape.r}")
        a, b = ranges[f - 1]
        lengths.append(b - a + 1)
        eps.extend(spec.shape.epsilon[a - 1 : b])
        labels.extend(spec.shape.labels[a - 1 : b])
        mats.extend(spec.matrices.matrices[a - 1 : b])
    return MomentSpec(
        shape=WordShape(tuple(lengths), tuple(eps), tuple(labels)),
        matrices=MatrixSet(mats),
        n_dim=spec.n_dim,
        m_dim=spec.m_dim,
        q=spec.q,
        gram=spec.gram,
        wigner=spec.wigner,
    )


def concat_specs(a: MomentSpec, b: MomentSpec) -> MomentSpec:
    """Join two words over the same model into one multi-factor word."""
    for attr in ("n_dim", "m_dim", "q", "wigner"):
        if getattr(a, attr) != getattr(b, attr):
            raise ValueError(f"cannot combine specs with different {attr}")
    labels = _distinct_in_order(a.shape.labels + b.shape.labels)
    gram = a.gram if a.gram.covers(labels) else b.gram
    if not gram.covers(labels):
        raise ValueError("neither gram matrix covers the combined families")
    return MomentSpec(
        shape=WordShape(
            a.shape.lengths + b.shape.lengths,
            a.shape.epsilon + b.shape.epsilon,
            a.shape.labels + b.shape.labels,
        ),
        matrices=MatrixSet(a.matrices.matrices + b.matrices.matrices),
        n_dim=a.n_dim,
        m_dim=a.m_dim,
        q=a.q,
        gram=gram,
        wigner=a.wigner,
    )


@dataclass(frozen=True)
class CltReport:
    """Finite-N fluctuation covariances for a list of trace factors.

    ``full[i][j]`` is N^2 times the joint cumulant of factors i and j;
    ``leading[i][j]`` keeps only the terms at the cumulant order bound
    (connected spheres), i.e. the finite-N evaluation of the limit
    covariance.
    """

    full: tuple[tuple[Number, ...], ...]
    leading: tuple[tuple[Number, ...], ...]


def clt_report(specs: Sequence[MomentSpec], *, exact: bool = False) -> CltReport:
    """Pairwise N^2 * k_2 table for single-factor specs."""
    for s in specs:
        if s.shape.r != 1:
            raise ValueError("clt_report expects single-factor specs")
    n = len(specs)
    full = [[None] * n for _ in range(n)]
    lead = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            pair = concat_specs(specs[i], specs[j])
            res = cumulant(pair, exact=exact)
            scale = pair.n_dim**2
            full_ij = scale * res.total
            chosen = leading_terms(res, "cumulant")
            if exact:
                prefac: Number = Fraction(1, pair.n_dim ** (-res.prefactor_exponent))
                lead_ij = scale * prefac * sum((t.value for t in chosen), start=Fraction(0))
            else:
                prefac = float(pair.n_dim) ** res.prefactor_exponent
                lead_ij = scale * prefac * math.fsum(t.value for t in chosen)
            full[i][j] = full[j][i] = full_ij
            lead[i][j] = lead[j][i] = lead_ij
    return CltReport(
        full=tuple(tuple(row) for row in full),
        leading=tuple(tuple(row) for row in lead),
    )
