"""Dense matrix storage, bindings, and traces along signed cycles.

Matrices are immutable after construction and carry their entries as
plain Python numbers, so the same object serves the float path (via a
cached numpy view) and the exact path (integer / rational arithmetic for
integer inputs).  A negative index into a :class:`MatrixSet` denotes the
transpose of the corresponding slot; transposes are never materialized,
evaluation just swaps the index order.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .gluing import WordShape, slot_dimensions

Number = Union[int, float, Fraction]


class DimensionError(ValueError):
    """Matrix dimensions do not chain or do not match the slot profile."""


class MatrixFormatError(ValueError):
    """A matrix or bindings file could not be parsed."""


class UnboundSlotError(LookupError):
    """A matrix slot in the word has no binding."""


def _parse_number(token: str) -> Number:
    if "/" in token:
        return Fraction(token)
    try:
        return int(token)
    except ValueError:
        return float(token)


class Matrix:
    """A rows x cols real matrix with row-major entries."""

    __slots__ = ("rows", "cols", "entries", "_arr")

    def __init__(self, entries: Sequence[Sequence[Number]]):
        rows = tuple(tuple(row) for row in entries)
        if not rows or not rows[0]:
            raise ValueError("matrices must have at least one row and column")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("all rows must have the same length")
        self.rows = len(rows)
        self.cols = len(rows[0])
        self.entries = rows
        self._arr = None

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def is_exact(self) -> bool:
        """True when every entry is an integer or rational (no floats)."""
        return all(isinstance(x, (int, Fraction)) for row in self.entries for x in row)

    def as_array(self) -> np.ndarray:
        if self._arr is None:
            self._arr = np.array(self.entries, dtype=float)
        return self._arr

    def transpose(self) -> "Matrix":
        return Matrix(tuple(zip(*self.entries)))

    def scale(self, c: Number) -> "Matrix":
        return Matrix(tuple(tuple(c * x for x in row) for row in self.entries))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols})"


def parse_matrix(text: str) -> Matrix:
    """Parse the plain-text format: first line "rows cols", then the rows.

    Entries may be integers, fractions like 3/4, or floats.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MatrixFormatError("empty matrix text")
    header = lines[0].split()
    if len(header) != 2:
        raise MatrixFormatError(f'expected header "rows cols", got {lines[0]!r}')
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise MatrixFormatError(f'expected integer header "rows cols", got {lines[0]!r}')
    if len(lines) != rows + 1:
        raise MatrixFormatError(f"expected {rows} rows after the header, got {len(lines) - 1}")
    data = []
    for i, ln in enumerate(lines[1:], start=1):
        tokens = ln.split()
        if len(tokens) != cols:
            raise MatrixFormatError(f"row {i}: expected {cols} entries, got {len(tokens)}")
        try:
            data.append(tuple(_parse_number(t) for t in tokens))
        except ValueError:
            raise MatrixFormatError(f"row {i}: unparseable entry in {ln!r}")
    return Matrix(data)


def load_matrix(path: str) -> Matrix:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix(fh.read())


class MatrixSet:
    """Constant matrices for slots 1..m with signed (transpose) lookup."""

    __slots__ = ("matrices",)

    def __init__(self, matrices: Sequence[Matrix]):
        self.matrices = tuple(matrices)

    @property
    def count(self) -> int:
        return len(self.matrices)

    def matrix(self, k: int) -> tuple[Matrix, bool]:
        """Slot lookup: negative k selects the transpose of slot |k|."""
        if k == 0 or abs(k) > self.count:
            raise IndexError(f"slot {k} outside 1..{self.count}")
        return self.matrices[abs(k) - 1], k < 0

    def dims(self, k: int) -> tuple[int, int]:
        mat, transposed = self.matrix(k)
        return (mat.cols, mat.rows) if transposed else (mat.rows, mat.cols)

    @property
    def is_exact(self) -> bool:
        return all(mat.is_exact for mat in self.matrices)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MatrixSet) and self.matrices == other.matrices

    def __hash__(self) -> int:
        return hash(self.matrices)


def bind_matrices(
    bindings: Mapping[str, Matrix],
    slot_names: Sequence[str],
    shape: WordShape,
    n_dim: int,
    m_dim: int,
) -> MatrixSet:
    """Assemble and validate the matrix set for a word.

    ``slot_names[k-1]`` names slot k; the same name may label several
    slots (aliasing).  Every slot must resolve to a matrix of the
    dimensions the word's profile requires.
    """
    profile = slot_dimensions(shape, n_dim, m_dim)
    matrices = []
    for k, name in enumerate(slot_names, start=1):
        if name not in bindings:
            raise UnboundSlotError(f"unbound matrix slot {name}")
        mat = bindings[name]
        want = profile[k - 1]
        if (mat.rows, mat.cols) != want:
            raise DimensionError(
                f"slot {name} (position {k}) expected {want[0]}x{want[1]}, "
                f"got {mat.rows}x{mat.cols}"
            )
        matrices.append(mat)
    return MatrixSet(matrices)


def slot_identity_fill(
    bindings: Mapping[str, Matrix],
    slot_names: Sequence[str],
    shape: WordShape,
    n_dim: int,
    m_dim: int,
) -> dict[str, Matrix]:
    """Copy of ``bindings`` with every unbound slot bound to the identity
    of its required size; rejects slots whose profile is rectangular."""
    out = dict(bindings)
    profile = slot_dimensions(shape, n_dim, m_dim)
    for k, name in enumerate(slot_names, start=1):
        if name in out:
            continue
        rows, cols = profile[k - 1]
        if rows != cols:
            raise DimensionError(
                f"slot {name} needs {rows}x{cols}; identity fill requires square slots"
            )
        out[name] = Matrix.identity(rows)
    return out


# Bindings-file support: lines "Dk = <path>", "Dk = I <dim>", "Dk = Dj".


def parse_bindings(text: str, loader=load_matrix) -> dict[str, Matrix]:
    """Parse a bindings file into name -> Matrix, resolving aliases.

    Alias targets may reference names bound anywhere in the file, so a
    single token matching another bound name is an alias and anything
    else is a file path.
    """
    entries: dict[str, str] = {}
    for lineno, ln in enumerate(text.splitlines(), start=1):
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if "=" not in ln:
            raise MatrixFormatError(f"bindings line {lineno}: expected 'name = target'")
        name, target = (part.strip() for part in ln.split("=", 1))
        if not name or not target:
            raise MatrixFormatError(f"bindings line {lineno}: empty name or target")
        entries[name] = target

    raw: dict[str, tuple[str, str]] = {}
    for name, target in entries.items():
        tokens = target.split()
        if tokens[0] == "I":
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise MatrixFormatError(f"binding {name}: use 'I <dim>'")
            raw[name] = ("identity", tokens[1])
        elif len(tokens) == 1 and tokens[0] in entries:
            raw[name] = ("alias", tokens[0])
        else:
            raw[name] = ("file", target)

    resolved: dict[str, Matrix] = {}

    def resolve(name: str, trail: tuple[str, ...]) -> Matrix:
        if name in resolved:
            return resolved[name]
        if name in trail:
            raise MatrixFormatError(f"circular alias involving {name}")
        kind, arg = raw[name]
        if kind == "identity":
            mat = Matrix.identity(int(arg))
        elif kind == "alias":
            mat = resolve(arg, trail + (name,))
        else:
            mat = loader(arg)
        resolved[name] = mat
        return mat

    for name in raw:
        resolve(name, ())
    return resolved


def trace_along(
    cyc_list: Iterable[Sequence[int]], ms: MatrixSet, exact: bool = False
) -> Number:
    """Product over cycles of the trace of the slot matrices multiplied in
    cycle order, negative indices meaning transposes.

    Each slot may appear at most once across all cycles.  The float path
    accumulates each trace with error-free summation; the exact path
    needs integer or rational entries throughout.
    """
    seen: set[int] = set()
    for cyc in cyc_list:
        for k in cyc:
            if abs(k) in seen:
                raise ValueError(f"slot {abs(k)} appears in more than one cycle position")
            seen.add(abs(k))

    if exact and not ms.is_exact:
        raise ValueError("exact mode requires integer or rational matrix entries")

    total: Number = 1 if exact else 1.0
    for cyc in cyc_list:
        _check_chain(cyc, ms)
        total = total * (_cycle_trace_exact(cyc, ms) if exact else _cycle_trace_float(cyc, ms))
    return total


def _check_chain(cyc: Sequence[int], ms: MatrixSet) -> None:
    dims = [ms.dims(k) for k in cyc]
    for i in range(len(cyc)):
        j = (i + 1) % len(cyc)
        if dims[i][1] != dims[j][0]:
            raise DimensionError(
                f"cycle {tuple(cyc)}: slot {cyc[i]} has {dims[i][0]}x{dims[i][1]} "
                f"but slot {cyc[j]} expects {dims[i][1]} rows, has {dims[j][0]}"
            )


def _cycle_trace_float(cyc: Sequence[int], ms: MatrixSet) -> float:
    views = []
    for k in cyc:
        mat, transposed = ms.matrix(k)
        arr = mat.as_array()
        views.append(arr.T if transposed else arr)
    prod = views[0]
    for v in views[1:]:
        prod = prod @ v
    return math.fsum(np.diagonal(prod).tolist())


def _cycle_trace_exact(cyc: Sequence[int], ms: MatrixSet) -> Number:
    def entry(k: int, i: int, j: int) -> Number:
        mat, transposed = ms.matrix(k)
        return mat.entries[j][i] if transposed else mat.entries[i][j]

    def dims(k: int) -> tuple[int, int]:
        return ms.dims(k)

    first = cyc[0]
    rows0, cols0 = dims(first)
    prod = [[entry(first, i, j) for j in range(cols0)] for i in range(rows0)]
    for k in cyc[1:]:
        rk, ck = dims(k)
        nxt = [[0] * ck for _ in range(len(prod))]
        for i in range(len(prod)):
            row = prod[i]
            out = nxt[i]
            for t in range(rk):
                coeff = row[t]
                if coeff:
                    for j in range(ck):
                        out[j] += coeff * entry(k, t, j)
        prod = nxt
    return sum(prod[i][i] for i in range(len(prod)))
