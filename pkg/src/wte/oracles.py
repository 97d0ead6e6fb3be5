"""Independent verification paths for the pairing-sum engine.

``wick_oracle`` evaluates trace-word moments straight from the entries:
for every pairing it sums the constrained index assignments (row and
column indices identified across each paired letter) of the product of
constant-matrix entries.  It shares only pairing enumeration and matrix
storage with the engine -- no double-cover permutations, no vertex
cycles, and its own crossing counter -- so agreement is meaningful.

``mc_oracle`` samples the Gaussian matrix families directly and averages
the trace-word product.  Sampling is counter-based (Philox keyed by the
seed) with a fixed chunk size and fixed draw order, and the reductions
are exactly rounded, so a given (seed, samples) pair reproduces the same
estimate bit for bit no matter how the evaluation is scheduled.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .engine import MomentSpec
from .gluing import _rotation_arrays
from .perm import enumerate_pairings, pairing_count

Number = Union[int, float, Fraction]

DEFAULT_BUDGET = 100_000_000
BUDGET_ENV_VAR = "WTE_BUDGET"


class BudgetError(RuntimeError):
    """The requested brute-force evaluation exceeds the work budget."""


def _budget_limit(budget: int | None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get(BUDGET_ENV_VAR)
    return int(env) if env else DEFAULT_BUDGET


def _local_crossings(blocks: Sequence[tuple[int, int]]) -> int:
    # Deliberately re-derived here so the oracle's weight path is
    # independent of the engine's.
    n = 0
    for x in range(len(blocks)):
        i, j = blocks[x]
        for y in range(x + 1, len(blocks)):
            k, l = blocks[y]
            if i < k < j < l or k < i < l < j:
                n += 1
    return n


def is_noncrossing(blocks: Sequence[tuple[int, int]]) -> bool:
    """Stack-based noncrossing test (independent of the crossing counter).

    >>> is_noncrossing([(1, 4), (2, 3)])
    True
    >>> is_noncrossing([(1, 3), (2, 4)])
    False
    """
    partner: dict[int, int] = {}
    for a, b in blocks:
        partner[a] = b
        partner[b] = a
    stack: list[int] = []
    for k in sorted(partner):
        if stack and stack[-1] == k:
            stack.pop()
        elif partner[k] > k:
            stack.append(partner[k])
        else:
            return False
    return not stack


def wick_oracle(
    spec: MomentSpec, *, exact: bool = True, budget: int | None = None
) -> Number:
    """Moment of the word by direct Wick expansion over matrix entries.

    For each pairing, row indices (in [m_dim]) and column indices (in
    [n_dim]) of the two paired letters are identified, and the product of
    the constant-matrix entries they select is summed over the free
    indices, one row/column pair per block.  Gram and q weights multiply
    the per-pairing sum; Wigner families average over transpose signs.
    The result carries the same n_dim^(-m/2 - r) prefactor as the engine.
    """
    shape = spec.shape
    m, r = shape.m, shape.r
    if m % 2:
        return Fraction(0) if exact else 0.0

    wigner_pos = tuple(
        k for k, lab in enumerate(shape.labels, start=1) if lab in spec.wigner
    )
    w = len(wigner_pos)
    work = pairing_count(m) * (spec.n_dim * spec.m_dim) ** (m // 2) * max(m, 1) * 2**w
    limit = _budget_limit(budget)
    if work > limit:
        raise BudgetError(
            f"wick expansion needs ~{work} operations, budget is {limit} "
            f"(set {BUDGET_ENV_VAR} to raise it)"
        )

    if exact and not spec.matrices.is_exact:
        raise ValueError("exact mode requires integer or rational matrix entries")

    entries = []
    for mat in spec.matrices.matrices:
        if exact:
            entries.append(mat.entries)
        else:
            entries.append(tuple(tuple(float(x) for x in row) for row in mat.entries))

    gamma, _ = _rotation_arrays(shape.lengths)
    assignments = list(itertools.product((1, -1), repeat=w))
    share: Number = Fraction(1, 2**w) if exact else 0.5**w

    def eps_for(assign: tuple[int, ...]) -> list[int]:
        eps = [0] + list(shape.epsilon)
        for pos, sign in zip(wigner_pos, assign):
            eps[pos] = sign
        return eps

    labels = shape.labels
    q = spec.q if exact and isinstance(spec.q, (int, Fraction)) else (
        Fraction(spec.q) if exact else float(spec.q)
    )

    index_pairs = list(itertools.product(range(spec.m_dim), range(spec.n_dim)))
    total: Number = Fraction(0) if exact else 0.0

    for p in enumerate_pairings(m):
        blocks = p.blocks()
        weight: Number = q ** _local_crossings(blocks)
        for a, b in blocks:
            g = spec.gram.value(labels[a - 1], labels[b - 1])
            weight = weight * (g if exact else float(g))
        if weight == 0:
            continue
        block_of = [0] * (m + 1)
        for bi, (a, b) in enumerate(blocks):
            block_of[a] = block_of[b] = bi

        for assign in assignments:
            eps = eps_for(assign)
            # Per letter: which block supplies each index of its slot's
            # entry, and whether that index is the shared row (in [m_dim])
            # or the shared column (in [n_dim]).
            plan = []
            for k in range(1, m + 1):
                j = gamma[k]
                plan.append(
                    (
                        block_of[k],
                        eps[k] == -1,
                        block_of[j],
                        eps[j] == 1,
                        entries[k - 1],
                    )
                )
            acc: Number = Fraction(0) if exact else 0.0
            for choice in itertools.product(index_pairs, repeat=len(blocks)):
                prod: Number = 1
                for bf, first_row, bs, second_row, ent in plan:
                    c1 = choice[bf]
                    i1 = c1[0] if first_row else c1[1]
                    c2 = choice[bs]
                    i2 = c2[0] if second_row else c2[1]
                    prod = prod * ent[i1][i2]
                    if prod == 0:
                        break
                acc = acc + prod
            total = total + weight * share * acc

    if exact:
        return Fraction(total) / Fraction(spec.n_dim ** (m // 2 + r))
    return float(total) * float(spec.n_dim) ** (-(m // 2) - r)


@dataclass(frozen=True)
class McReport:
    """Monte Carlo estimate with its standard error and diagnostics."""

    estimate: float
    stderr: float
    samples: int
    seed: int
    factor_means: tuple[float, ...]
    statistic: str

    def zscore(self, exact_value: float) -> float:
        if self.stderr == 0:
            return 0.0 if self.estimate == exact_value else math.inf
        return abs(self.estimate - exact_value) / self.stderr


_MC_CHUNK = 16384  # fixed so the draw order never depends on scheduling


def _gram_factor(spec: MomentSpec, families: Sequence[str]) -> np.ndarray:
    g = np.array(
        [[float(spec.gram.value(a, b)) for b in families] for a in families]
    )
    try:
        return np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(g)
        if w.min() < -1e-9 * max(w.max(), 1.0):
            raise ValueError("gram matrix is not positive semi-definite") from None
        return v @ np.diag(np.sqrt(np.clip(w, 0.0, None)))


def mc_oracle(
    spec: MomentSpec, samples: int, seed: int = 0, statistic: str = "moment"
) -> McReport:
    """Sample the Gaussian model and estimate the moment (or, for words of
    at most two factors, the plug-in cumulant).

    Only q = 1 has a matrix sampling model; the gram matrix must be
    positive semi-definite.  Wigner families are sampled as the symmetric
    part (X + X^T)/2 of a square Gaussian matrix.
    """
    if float(spec.q) != 1.0:
        raise ValueError("Monte Carlo sampling requires q = 1")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    shape = spec.shape
    r = shape.r
    if statistic not in ("moment", "cumulant"):
        raise ValueError(f"unknown statistic {statistic!r}")
    if statistic == "cumulant" and r > 2:
        raise ValueError("plug-in cumulants are available up to r = 2 only")

    families = _distinct(shape.labels)
    chol = _gram_factor(spec, families)
    n_dim, m_dim = spec.n_dim, spec.m_dim
    const = [mat.as_array() for mat in spec.matrices.matrices]
    eps = shape.epsilon
    ranges = shape.factor_ranges()
    fam_index = {f: i for i, f in enumerate(families)}

    rng = np.random.Generator(np.random.Philox(key=seed))
    factor_vals = [np.empty(samples) for _ in range(r)]
    done = 0
    while done < samples:
        count = min(_MC_CHUNK, samples - done)
        raw = rng.standard_normal((count, len(families), m_dim, n_dim))
        correlated = np.einsum("gh,shmn->sgmn", chol, raw) / math.sqrt(n_dim)
        letter_mats = {}
        for fam, gi in fam_index.items():
            x = correlated[:, gi]
            if fam in spec.wigner:
                x = 0.5 * (x + np.swapaxes(x, -1, -2))
            letter_mats[fam] = x
        for fi, (a, b) in enumerate(ranges):
            prod = None
            for k in range(a, b + 1):
                x = letter_mats[shape.labels[k - 1]]
                if shape.labels[k - 1] not in spec.wigner and eps[k - 1] == -1:
                    x = np.swapaxes(x, -1, -2)
                prod = x if prod is None else prod @ x
                prod = prod @ const[k - 1]
            traces = np.einsum("sii->s", prod) / n_dim
            factor_vals[fi][done : done + count] = traces
        done += count

    if r == 0:
        values = np.ones(samples)
    else:
        values = factor_vals[0].copy()
        for fv in factor_vals[1:]:
            values *= fv
    factor_means = tuple(math.fsum(fv.tolist()) / samples for fv in factor_vals)

    if statistic == "moment" or r <= 1:
        vals = values.tolist()
        mean = math.fsum(vals) / samples
        var = math.fsum((v - mean) ** 2 for v in vals) / (samples - 1)
        return McReport(
            estimate=mean,
            stderr=math.sqrt(var / samples),
            samples=samples,
            seed=seed,
            factor_means=factor_means,
            statistic=statistic,
        )

    # Plug-in covariance of the two factors, stderr via its influence values.
    y1, y2 = factor_vals[0], factor_vals[1]
    m1, m2 = factor_means[0], factor_means[1]
    psi = ((y1 - m1) * (y2 - m2)).tolist()
    cov = math.fsum(psi) / (samples - 1)
    psi_mean = math.fsum(psi) / samples
    psi_var = math.fsum((x - psi_mean) ** 2 for x in psi) / (samples - 1)
    return McReport(
        estimate=cov,
        stderr=math.sqrt(psi_var / samples),
        samples=samples,
        seed=seed,
        factor_means=factor_means,
        statistic=statistic,
    )


def _distinct(labels: Sequence[str]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for lab in labels:
        seen.setdefault(lab)
    return tuple(seen)
