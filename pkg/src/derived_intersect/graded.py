"""
Multigraded polynomial rings over Q and their degreewise pieces.

Everything here is finite dimensional one multidegree at a time: a degree
piece of R, of a homogeneous ideal, or of a quotient R/J is a subspace or
quotient of the span of the monomials of that degree. Monomials of a given
degree are listed in descending lexicographic order of exponent vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import ParseError, WindowError
from .linalg import SparseMatrix, Subspace, axpy, quotient_map, rref_rows

Exponent = tuple  # tuple[int, ...], entries may be negative for Laurent monomials


class Polynomial:
    """Sparse (Laurent) polynomial with rational coefficients."""

    __slots__ = ("terms", "nvars", "_hash")

    def __init__(self, terms: dict, nvars: int):
        self.terms = {tuple(e): Fraction(c) for e, c in terms.items() if c != 0}
        self.nvars = nvars
        self._hash = None

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls({}, nvars)

    @classmethod
    def constant(cls, c, nvars: int) -> "Polynomial":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff=1) -> "Polynomial":
        return cls({tuple(exp): coeff}, len(exp))

    @classmethod
    def variable(cls, i: int, nvars: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls.monomial(e)

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        axpy(out, 1, other.terms)
        return Polynomial(out, self.nvars)

    def __neg__(self) -> "Polynomial":
        return Polynomial({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return Polynomial({e: c * other for e, c in self.terms.items()}, self.nvars)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Polynomial(out, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial.constant(1, self.nvars)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def derivative(self, i: int) -> "Polynomial":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return Polynomial(out, self.nvars)

    def format(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Polynomial({self.format([f'v{i}' for i in range(self.nvars)])})"


@dataclass(frozen=True)
class GradedRing:
    names: tuple
    grading: tuple  # one multidegree vector per variable

    def __post_init__(self):
        if not self.names:
            raise ValueError("a graded ring needs at least one variable")
        if len(self.names) != len(self.grading):
            raise ValueError("one multidegree per variable")
        g = {len(d) for d in self.grading}
        if len(g) != 1 or 0 in g:
            raise ValueError("all multidegree vectors must share one positive length")
        for d in self.grading:
            if any(x < 0 for x in d) or not any(d):
                raise ValueError("variable degrees must be nonzero and nonnegative")
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "grading", tuple(tuple(d) for d in self.grading))

    @classmethod
    def standard(cls, names: Iterable[str]) -> "GradedRing":
        names = tuple(names)
        return cls(names, tuple((1,) for _ in names))

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def ngrades(self) -> int:
        return len(self.grading[0])

    def degree_of(self, exp: Sequence[int]) -> tuple:
        out = [0] * self.ngrades
        for k, d in zip(exp, self.grading):
            if k:
                for j, x in enumerate(d):
                    out[j] += k * x
        return tuple(out)

    def multidegree(self, p: Polynomial) -> tuple | None:
        """Common multidegree of all terms, None if p is zero or inhomogeneous."""
        degs = {self.degree_of(e) for e in p.terms}
        return degs.pop() if len(degs) == 1 else None

    def var(self, name: str) -> Polynomial:
        return Polynomial.variable(self.names.index(name), self.nvars)

    def one(self) -> Polynomial:
        return Polynomial.constant(1, self.nvars)

    def parse(self, text: str) -> Polynomial:
        return parse_polynomial(self, text)

    def degrees_up_to(self, window: int) -> list[tuple]:
        """Multidegrees with nonnegative entries and total at most ``window``."""
        out = []
        for d in itertools.product(range(window + 1), repeat=self.ngrades):
            if sum(d) <= window:
                out.append(d)
        return sorted(out, key=lambda d: (sum(d), d))

    def monomial_basis(self, degree: Sequence[int]) -> list[tuple]:
        return list(_monomials(self, tuple(degree)))

    def format(self, p: Polynomial) -> str:
        return p.format(self.names)


_MONO_CACHE: dict = {}


def _monomials(ring: GradedRing, degree: tuple) -> tuple:
    key = (ring.grading, degree)
    hit = _MONO_CACHE.get(key)
    if hit is not None:
        return hit
    if any(x < 0 for x in degree) or len(degree) != ring.ngrades:
        out: tuple = ()
    else:
        found = []

        def rec(i: int, remaining: tuple, prefix: list):
            if i == ring.nvars:
                if not any(remaining):
                    found.append(tuple(prefix))
                return
            g = ring.grading[i]
            k = 0
            rem = remaining
            while all(x >= 0 for x in rem):
                prefix.append(k)
                rec(i + 1, rem, prefix)
                prefix.pop()
                k += 1
                rem = tuple(r - x for r, x in zip(rem, g))

        rec(0, degree, [])
        out = tuple(sorted(found, reverse=True))
    _MONO_CACHE[key] = out
    return out


def monomial_basis(ring: GradedRing, degree: Sequence[int]) -> list[tuple]:
    """All monomials of exactly this multidegree, descending lex order."""
    return ring.monomial_basis(degree)


def parse_polynomial(ring: GradedRing, text: str) -> Polynomial:
    """Parse a polynomial string such as ``"x0*y1 - x1*y0"`` or ``"x^2+3/2*y"``."""
    import sympy
    from sympy.parsing.sympy_parser import (
        convert_xor,
        implicit_multiplication_application,
        parse_expr,
        standard_transformations,
    )

    syms = sympy.symbols(list(ring.names))
    local = dict(zip(ring.names, syms))
    try:
        expr = parse_expr(
            text,
            local_dict=local,
            transformations=standard_transformations + (convert_xor, implicit_multiplication_application),
            evaluate=True,
        )
        poly = sympy.Poly(sympy.expand(expr), *syms, domain="QQ")
    except Exception as exc:  # sympy raises a zoo of exception types
        raise ParseError(f"cannot parse polynomial {text!r}: {exc}") from None
    terms = {}
    for mono, coeff in poly.terms():
        terms[tuple(int(k) for k in mono)] = Fraction(int(coeff.p), int(coeff.q))
    return Polynomial(terms, ring.nvars)


@dataclass(frozen=True)
class GradedIdeal:
    ring: GradedRing
    generators: tuple
    declared_regular: bool = False

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            if g.is_zero():
                raise ValueError("zero generator")
            if self.ring.multidegree(g) is None:
                raise ValueError(f"generator {self.ring.format(g)} is not homogeneous")
        if self.declared_regular and len(gens) > self.ring.nvars:
            raise ValueError("a regular sequence has at most as many elements as variables")

    @classmethod
    def parse(cls, ring: GradedRing, texts: Iterable[str], declared_regular: bool = False) -> "GradedIdeal":
        return cls(ring, tuple(ring.parse(t) for t in texts), declared_regular)

    @property
    def degrees(self) -> list[tuple]:
        return [self.ring.multidegree(g) for g in self.generators]

    def power(self, k: int) -> "GradedIdeal":
        if k < 1:
            raise ValueError("power must be positive")
        gens = list(self.generators)
        out = list(gens)
        for _ in range(k - 1):
            nxt = []
            seen = set()
            for combo in out:
                for g in gens:
                    p = combo * g
                    if p not in seen:
                        seen.add(p)
                        nxt.append(p)
            out = nxt
        return GradedIdeal(self.ring, tuple(out))

    def format(self) -> list[str]:
        return [self.ring.format(g) for g in self.generators]


def _poly_times_monomial_vector(p: Polynomial, mono: tuple, index: dict) -> dict:
    out: dict = {}
    for e, c in p.terms.items():
        k = index[tuple(a + b for a, b in zip(e, mono))]
        s = out.get(k, 0) + c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def ideal_piece(ideal: GradedIdeal, degree: Sequence[int]) -> Subspace:
    """Degree piece of the ideal as a subspace of span(monomial_basis(degree))."""
    ring = ideal.ring
    degree = tuple(degree)
    monos = ring.monomial_basis(degree)
    index = {m: i for i, m in enumerate(monos)}
    rows = []
    for g, gd in zip(ideal.generators, ideal.degrees):
        comp = tuple(a - b for a, b in zip(degree, gd))
        for m in ring.monomial_basis(comp):
            rows.append(_poly_times_monomial_vector(g, m, index))
    return Subspace.from_rref(len(monos), rref_rows(rows))


@dataclass
class QuotientPiece:
    degree: tuple
    monomials: list
    index: dict
    relations: Subspace
    standard: list  # positions (in ``monomials``) of the quotient basis

    @property
    def dim(self) -> int:
        return len(self.standard)

    @cached_property
    def _std_pos(self) -> dict:
        return {j: i for i, j in enumerate(self.standard)}

    def project(self, v: dict) -> dict:
        """Monomial-coordinate vector -> quotient coordinates."""
        r = self.relations.reduce(v) if self.relations.dim else v
        pos = self._std_pos
        return {pos[k]: x for k, x in r.items()}


class QuotientRing:
    """R/J for a homogeneous ideal J (J=None means R itself), one degree at a time."""

    def __init__(self, ring: GradedRing, ideal: GradedIdeal | None = None, label: str = "R"):
        self.ring = ring
        self.ideal = ideal
        self.label = label
        self._pieces: dict = {}
        self._mult: dict = {}

    def piece(self, degree: Sequence[int]) -> QuotientPiece:
        degree = tuple(degree)
        hit = self._pieces.get(degree)
        if hit is not None:
            return hit
        monos = self.ring.monomial_basis(degree)
        index = {m: i for i, m in enumerate(monos)}
        if self.ideal is None or not monos:
            rel = Subspace.zero(len(monos))
        else:
            rel = ideal_piece(self.ideal, degree)
        piv = set(rel.pivots)
        std = [j for j in range(len(monos)) if j not in piv]
        qp = QuotientPiece(degree, monos, index, rel, std)
        self._pieces[degree] = qp
        return qp

    def dim(self, degree: Sequence[int]) -> int:
        return self.piece(degree).dim

    def mult_columns(self, p: Polynomial, degree: Sequence[int]) -> list[dict]:
        """Columns of multiplication by homogeneous p: piece(degree) -> piece(degree + deg p)."""
        degree = tuple(degree)
        key = (p, degree)
        hit = self._mult.get(key)
        if hit is not None:
            return hit
        src = self.piece(degree)
        pd = self.ring.multidegree(p)
        if src.dim == 0:
            cols: list = []
        elif pd is None:
            if p.is_zero():
                cols = [{} for _ in range(src.dim)]
            else:
                raise ValueError("multiplication by an inhomogeneous polynomial")
        else:
            tgt = self.piece(tuple(a + b for a, b in zip(degree, pd)))
            cols = []
            for j in src.standard:
                m = src.monomials[j]
                cols.append(tgt.project(_poly_times_monomial_vector(p, m, tgt.index)))
        self._mult[key] = cols
        return cols

    def element_vector(self, p: Polynomial, degree: Sequence[int]) -> dict:
        """Quotient coordinates of a homogeneous polynomial of the given degree."""
        tgt = self.piece(degree)
        v = {tgt.index[e]: c for e, c in p.terms.items()}
        return tgt.project(v)

    def lift(self, degree: Sequence[int], coords: dict) -> Polynomial:
        pc = self.piece(degree)
        return Polynomial({pc.monomials[pc.standard[i]]: c for i, c in coords.items()}, self.ring.nvars)


def quotient_piece(ideal: GradedIdeal, power: int, degree: Sequence[int]) -> tuple[int, SparseMatrix]:
    """Degree piece of R / I^power: its dimension and the projection matrix
    from span(monomial_basis(degree))."""
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    J = ideal if power == 1 else ideal.power(2)
    sub = ideal_piece(J, degree)
    return quotient_map(sub.ambient, sub)


def check_regular_sequence(ideal: GradedIdeal, window: int = 6) -> tuple[bool, dict]:
    """Decide regularity of the generators within a total-degree window.

    True iff the Koszul complex on the generators is exact in every positive
    homological index, in every multidegree of total at most ``window``.
    The certificate lists the degrees checked and any witnesses.
    """
    from .complexes import homology, koszul_complex

    if not ideal.generators:
        return True, {"window": window, "degrees_checked": [], "witnesses": []}
    maxdeg = max(sum(d) for d in ideal.degrees)
    if window < maxdeg:
        raise WindowError(f"window {window} is below the largest generator degree {maxdeg}", suggested_window=maxdeg)
    K = koszul_complex(ideal.ring, list(ideal.generators))
    degrees = ideal.ring.degrees_up_to(window)
    H = homology(K, window, indices=range(1, len(ideal.generators) + 1), with_bases=False)
    witnesses = [[k, list(d), h.dim] for (k, d), h in sorted(H.items()) if h.dim]
    cert = {
        "window": window,
        "degrees_checked": [list(d) for d in degrees],
        "witnesses": witnesses,
    }
    return not witnesses, cert
