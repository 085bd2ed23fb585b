"""
Exact sparse linear algebra over Q.

Vectors are sparse ``dict[int, Fraction]`` (column index -> nonzero value).
Elimination runs on primitive integer rows (fraction-free): every row is
rescaled to coprime integers before it enters the echelon, and each
elimination step ``a*r - b*p`` is followed by division by the row content.
Fractions only appear when a reduced echelon form is exported.

Subspaces are stored by their reduced row echelon basis, so two subspaces
are equal exactly when their data is equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Mapping, Sequence

from .errors import NotWellDefinedError

Vector = dict  # dict[int, Fraction]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def to_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def sparse(v) -> dict:
    """Dense sequence or mapping -> sparse dict without zeros."""
    if isinstance(v, Mapping):
        return {int(k): to_fraction(x) for k, x in v.items() if x != 0}
    return {i: to_fraction(x) for i, x in enumerate(v) if x != 0}


def dense(v: Mapping[int, Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    for k, x in v.items():
        out[k] = x
    return out


def axpy(y: dict, a, x: Mapping) -> dict:
    """In place ``y += a*x``; returns y."""
    if a == 0:
        return y
    for k, v in x.items():
        s = y.get(k, 0) + a * v
        if s:
            y[k] = s
        else:
            y.pop(k, None)
    return y


def _primitive(row: Mapping) -> dict[int, int]:
    """Scale a rational row to coprime integers (sign unchanged)."""
    if not row:
        return {}
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = _lcm(den, v.denominator)
    ints = {k: int(v * den) for k, v in row.items() if v}
    g = reduce(gcd, (abs(v) for v in ints.values()), 0)
    if g > 1:
        ints = {k: v // g for k, v in ints.items()}
    return ints


def _eliminate(row: dict[int, int], prow: dict[int, int], col: int) -> dict[int, int]:
    """Fraction-free step: cancel ``col`` of ``row`` against pivot row ``prow``."""
    a = prow[col]
    b = row[col]
    g = gcd(a, b)
    a //= g
    b //= g
    out = {k: a * v for k, v in row.items()}
    for k, v in prow.items():
        s = out.get(k, 0) - b * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    c = reduce(gcd, (abs(v) for v in out.values()), 0)
    if c > 1:
        out = {k: v // c for k, v in out.items()}
    return out


class Echelon:
    """Incremental fraction-free row echelon form.

    ``pivots`` maps pivot column -> primitive integer row whose smallest
    column is that pivot.
    """

    def __init__(self):
        self.pivots: dict[int, dict[int, int]] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    def reduce_int(self, row: dict[int, int]) -> dict[int, int]:
        pivots = self.pivots
        while True:
            hits = [c for c in row if c in pivots]
            if not hits:
                return row
            c = min(hits)
            row = _eliminate(row, pivots[c], c)

    def add(self, row: Mapping) -> bool:
        """Insert a row; True when it increased the rank."""
        r = self.reduce_int(_primitive(row))
        if not r:
            return False
        c = min(r)
        if r[c] < 0:
            r = {k: -v for k, v in r.items()}
        self.pivots[c] = r
        return True

    def rref(self) -> list[dict[int, Fraction]]:
        """Back-substitute and normalise: the reduced echelon basis."""
        rows = {c: dict(r) for c, r in self.pivots.items()}
        order = sorted(rows)
        for c in reversed(order):
            prow = rows[c]
            for c2 in order:
                if c2 >= c:
                    break
                r = rows[c2]
                if c in r:
                    rows[c2] = _eliminate(r, prow, c)
        out = []
        for c in order:
            r = rows[c]
            p = r[c]
            out.append({k: Fraction(v, p) for k, v in r.items()})
        return out


def _row_sort_key(row: Mapping) -> tuple:
    # sparsest, smallest-entry rows enter the echelon first
    if not row:
        return (0, 0)
    return (len(row), max(abs(v) for v in row.values()))


@dataclass(frozen=True)
class SparseMatrix:
    rows: int
    cols: int
    entries: Mapping = field(default_factory=dict)  # (i, j) -> Fraction

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise IndexError(f"entry ({i},{j}) outside {self.rows}x{self.cols}")
            if v != 0:
                clean[(i, j)] = to_fraction(v)
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], cols: int | None = None) -> "SparseMatrix":
        nrows = len(data)
        ncols = cols if cols is not None else (len(data[0]) if nrows else 0)
        return cls(nrows, ncols, {(i, j): v for i, r in enumerate(data) for j, v in enumerate(r) if v})

    @classmethod
    def from_columns(cls, columns: Sequence[Mapping], rows: int) -> "SparseMatrix":
        return cls(rows, len(columns), {(i, j): v for j, c in enumerate(columns) for i, v in c.items()})

    @classmethod
    def from_rows(cls, rows: Sequence[Mapping], cols: int) -> "SparseMatrix":
        return cls(len(rows), cols, {(i, j): v for i, r in enumerate(rows) for j, v in r.items()})

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols, {})

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row_dicts(self) -> list[dict]:
        out = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def column_dicts(self) -> list[dict]:
        out = [dict() for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            out[j][i] = v
        return out

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def apply(self, v: Mapping) -> dict:
        cols = self.column_dicts()
        out: dict = {}
        for j, x in v.items():
            axpy(out, x, cols[j])
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        rows = self.row_dicts()
        orows = other.row_dicts()
        out = {}
        for i, r in enumerate(rows):
            acc: dict = {}
            for k, v in r.items():
                axpy(acc, v, orows[k])
            for j, v in acc.items():
                out[(i, j)] = v
        return SparseMatrix(self.rows, other.cols, out)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return SparseMatrix(self.rows, self.cols, out)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "SparseMatrix":
        return SparseMatrix(self.rows, self.cols, {k: v * c for k, v in self.entries.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(sorted(self.entries.items()))))

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _echelon_of_rows(rows: Iterable[Mapping]) -> Echelon:
    ech = Echelon()
    for r in sorted((r for r in rows if r), key=_row_sort_key):
        ech.add(r)
    return ech


def rank_of_rows(rows: Iterable[Mapping]) -> int:
    return len(_echelon_of_rows(rows))


def rank(m: SparseMatrix) -> int:
    """Rank over Q."""
    if not m.entries:
        return 0
    # eliminate along the shorter side
    rows = m.row_dicts() if m.rows <= m.cols else m.column_dicts()
    return rank_of_rows(rows)


def rref_rows(rows: Iterable[Mapping]) -> list[dict]:
    return _echelon_of_rows(rows).rref()


@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^ambient held as its canonical reduced echelon basis."""

    ambient: int
    basis: tuple  # tuple of tuple((col, Fraction), ...) sorted by column

    @classmethod
    def from_rref(cls, ambient: int, rows: Sequence[Mapping]) -> "Subspace":
        return cls(ambient, tuple(tuple(sorted(r.items())) for r in rows))

    @classmethod
    def span(cls, ambient: int, vectors: Iterable) -> "Subspace":
        vecs = []
        for v in vectors:
            sv = sparse(v)
            if any(k < 0 or k >= ambient for k in sv):
                raise ValueError(f"vector index out of range for ambient dimension {ambient}")
            vecs.append(sv)
        return cls.from_rref(ambient, rref_rows(vecs))

    @classmethod
    def zero(cls, ambient: int) -> "Subspace":
        return cls(ambient, ())

    @classmethod
    def full(cls, ambient: int) -> "Subspace":
        return cls(ambient, tuple(((i, Fraction(1)),) for i in range(ambient)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(r[0][0] for r in self.basis)

    def rows(self) -> list[dict]:
        return [dict(r) for r in self.basis]

    def vectors(self) -> list[list[Fraction]]:
        return [dense(dict(r), self.ambient) for r in self.basis]

    def reduce(self, v: Mapping) -> dict:
        """Normal form of v modulo this subspace (zero at every pivot)."""
        out = dict(v)
        for r in self.basis:
            c = r[0][0]
            x = out.get(c)
            if x:
                for k, y in r:
                    s = out.get(k, 0) - x * y
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
        return out

    def contains(self, v) -> bool:
        return not self.reduce(sparse(v))

    def coordinates(self, v, check: bool = True) -> list[Fraction]:
        """Coefficients of v in the echelon basis (read off at pivots)."""
        sv = sparse(v)
        coords = [sv.get(c, Fraction(0)) for c in self.pivots]
        if check:
            rest = dict(sv)
            for x, r in zip(coords, self.basis):
                axpy(rest, -x, dict(r))
            if rest:
                raise NotWellDefinedError("vector does not lie in the subspace")
        return coords

    def combine(self, coords: Sequence) -> dict:
        out: dict = {}
        for x, r in zip(coords, self.basis):
            axpy(out, x, dict(r))
        return out

    def issubspace(self, other: "Subspace") -> bool:
        return all(not other.reduce(dict(r)) for r in self.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.from_rref(self.ambient, rref_rows(self.rows() + other.rows()))

    def complement_in(self, bigger: "Subspace") -> "Subspace":
        """Canonical complement of self inside ``bigger``: basis vectors of
        ``bigger`` reduced modulo self, put in echelon form. Its pivots avoid
        the pivots of self."""
        return Subspace.from_rref(self.ambient, rref_rows(self.reduce(dict(r)) for r in bigger.basis))


def kernel_basis(m: SparseMatrix) -> Subspace:
    """Canonical basis of the right kernel."""
    rr = rref_rows(m.row_dicts())
    pivots = [min(r) for r in rr]
    pivset = set(pivots)
    vecs = []
    for f in range(m.cols):
        if f in pivset:
            continue
        v = {f: Fraction(1)}
        for p, r in zip(pivots, rr):
            x = r.get(f)
            if x:
                v[p] = -x
        vecs.append(v)
    return Subspace.from_rref(m.cols, rref_rows(vecs))


def image_basis(m: SparseMatrix) -> Subspace:
    """Column space."""
    return Subspace.from_rref(m.rows, rref_rows(m.column_dicts()))


def solve_many(m: SparseMatrix, rhs: Sequence[Mapping]) -> list[dict | None]:
    """For each b, the solution of m x = b whose free variables are zero
    (None when b is not in the column space)."""
    n = m.cols
    k = len(rhs)
    rows = m.row_dicts()
    for j, b in enumerate(rhs):
        for i, v in b.items():
            rows[i][n + j] = v
    rr = rref_rows(rows)
    sols: list[dict | None] = [dict() for _ in range(k)]
    for r in rr:
        if min(r) >= n:
            # a left-kernel functional that does not kill these right-hand sides
            for c in r:
                sols[c - n] = None
    for r in rr:
        p = min(r)
        if p >= n:
            continue
        for c, v in r.items():
            if c >= n and sols[c - n] is not None:
                sols[c - n][p] = v
    return sols


def solve(m: SparseMatrix, b: Mapping) -> dict | None:
    return solve_many(m, [sparse(b)])[0]


def quotient_map(ambient: int, sub: Subspace) -> tuple[int, SparseMatrix]:
    """Projection Q^ambient -> Q^ambient / sub in the basis of non-pivot
    coordinates."""
    if sub.ambient != ambient:
        raise ValueError(f"subspace lives in dimension {sub.ambient}, not {ambient}")
    pivset = set(sub.pivots)
    free = [j for j in range(ambient) if j not in pivset]
    pos = {j: i for i, j in enumerate(free)}
    entries = {}
    for j in range(ambient):
        for k, v in sub.reduce({j: Fraction(1)}).items():
            entries[(pos[k], j)] = v
    return len(free), SparseMatrix(len(free), ambient, entries)


def quotient_basis(sub: Subspace) -> list[int]:
    """Coordinates whose unit vectors form the canonical quotient basis."""
    pivset = set(sub.pivots)
    return [j for j in range(sub.ambient) if j not in pivset]


def induced_map(f: SparseMatrix, source_sub: Subspace, target_sub: Subspace, mode: str = "quotient") -> SparseMatrix:
    """Matrix of the map induced by f.

    mode="quotient": V/source_sub -> W/target_sub (needs f(source_sub) in target_sub).
    mode="sub": source_sub -> target_sub (needs f(source_sub) in target_sub),
    both in echelon-basis coordinates.
    """
    if source_sub.ambient != f.cols or target_sub.ambient != f.rows:
        raise ValueError("subspace dimensions do not match the map")
    for r in source_sub.basis:
        if target_sub.reduce(f.apply(dict(r))):
            raise NotWellDefinedError("f(source_sub) is not contained in target_sub")
    if mode == "sub":
        cols = []
        for r in source_sub.basis:
            img = f.apply(dict(r))
            cols.append(sparse(target_sub.coordinates(img)))
        return SparseMatrix.from_columns(cols, target_sub.dim)
    if mode != "quotient":
        raise ValueError(f"unknown mode {mode!r}")
    src_free = quotient_basis(source_sub)
    _, proj = quotient_map(target_sub.ambient, target_sub)
    cols = []
    for j in src_free:
        img = f.apply({j: Fraction(1)})
        cols.append(proj.apply(img))
    return SparseMatrix.from_columns(cols, proj.rows)
