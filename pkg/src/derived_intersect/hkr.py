"""
Segre–Veronese embeddings X -> P^N, their pulled-back Euler and conormal
sequences, the connecting map eta, and the line-bundle obstruction
alpha_L = H^1(eta)(c1(L)).

All sheaves live on X and are presented inside four line-bundle sums:

    A0 = O(-l)^{N+1}     TY = O     AX = sum_i O(-e_i)^{n_i+1}     TX = O^g

with maps euler_Y = (m_j): A0 -> TY, the Jacobian jac[(v), j] = dm_j/dx_v:
A0 -> AX and euler_X: AX -> TX. Then i*Omega_Y = ker euler_Y,
Omega_X = ker euler_X and E = ker jac (Euler's identity puts ker jac inside
ker euler_Y). Every entry is a monomial, so the Čech model is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .cech import (
    CechModel,
    CohomologyClass,
    LineBundleSum,
    Morphism,
    ProjProduct,
    SheafMap,
    SheafPresentation,
    ShortExactSequence,
    bott_dims_sum,
    c1_class,
    c1_cocycle,
)
from .errors import ConsistencyError, WindowError
from .graded import Polynomial
from .linalg import SparseMatrix, Subspace, kernel_basis, rank

FAILS = "FAILS"
HOLDS = "HOLDS"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class Embedding:
    source: ProjProduct
    ell: tuple
    monomials: tuple  # exponent vectors in the Cox ring of the source

    @property
    def target_dim(self) -> int:
        return len(self.monomials) - 1

    @property
    def codim(self) -> int:
        return self.target_dim - self.source.dimension

    @property
    def label(self) -> str:
        return f"{self.source.name} -> P{self.target_dim} by O{self.ell}"


def build_embedding(space: ProjProduct, ell: Sequence[int]) -> Embedding:
    """Complete linear system of O(ell): all monomials of multidegree ell."""
    ell = tuple(int(x) for x in ell)
    if len(ell) != space.ngroups:
        raise ValueError(f"multidegree {ell} does not match {space.name}")
    if any(x < 1 for x in ell):
        raise ValueError(f"embedding multidegree must be positive, got {ell}")
    monos = tuple(space.cox_ring().monomial_basis(ell))
    expected = math.prod(math.comb(n + l, n) for n, l in zip(space.dims, ell))
    if len(monos) != expected:
        raise ConsistencyError("monomial count disagrees with the binomial formula")
    return Embedding(space, ell, monos)


def det_conormal(e: Embedding) -> tuple:
    """Multidegree of det E by adjunction: -(N+1) l - K_X with K_X = -(n_i+1)."""
    n1 = len(e.monomials)
    return tuple(-n1 * l + n + 1 for l, n in zip(e.ell, e.source.dims))


@dataclass
class ConormalData:
    embedding: Embedding
    A0: LineBundleSum
    TY: LineBundleSum
    AX: LineBundleSum
    TX: LineBundleSum
    euler_Y: SheafMap
    jac: SheafMap
    euler_X: SheafMap
    pullback_omega: SheafPresentation
    omega_X: SheafPresentation
    conormal: SheafPresentation
    middle: SheafPresentation
    structure_sheaf: SheafPresentation
    euler_sequence: ShortExactSequence
    conormal_sequence: ShortExactSequence

    @property
    def sequences(self) -> list[ShortExactSequence]:
        return [self.euler_sequence, self.conormal_sequence]


def conormal_data(e: Embedding) -> ConormalData:
    space = e.source
    nv = space.nvars
    g = space.ngroups
    n1 = len(e.monomials)
    zero = (0,) * g
    A0 = LineBundleSum(space, tuple(tuple(-x for x in e.ell) for _ in range(n1)), "A0")
    TY = LineBundleSum(space, (zero,), "TY")
    AX = LineBundleSum(space, tuple(tuple(-x for x in space.unit(space.var_factor[v])) for v in range(nv)), "AX")
    TX = LineBundleSum(space, tuple(zero for _ in range(g)), "TX")
    mons = [Polynomial.monomial(m) for m in e.monomials]
    euler_Y = SheafMap.build(A0, TY, {(0, j): m for j, m in enumerate(mons)})
    jac = SheafMap.build(A0, AX, {(v, j): m.derivative(v) for j, m in enumerate(mons) for v in range(nv)})
    euler_X = SheafMap.build(AX, TX, {(space.var_factor[v], v): Polynomial.variable(v, nv) for v in range(nv)})
    ident = SheafMap.identity(A0)
    pull = SheafPresentation.kernel(euler_Y, name="i*Omega_Y")
    omega = SheafPresentation.kernel(euler_X, name="Omega_X")
    conormal = SheafPresentation.kernel(jac, name="E")
    middle = SheafPresentation("sum", A0, None, "A0")
    ox = SheafPresentation("sum", TY, None, "O_X")
    euler_seq = ShortExactSequence(pull, middle, ox, Morphism(pull, middle, ident), Morphism(middle, ox, euler_Y))
    conormal_seq = ShortExactSequence(conormal, pull, omega, Morphism(conormal, pull, ident), Morphism(pull, omega, jac))
    return ConormalData(
        e, A0, TY, AX, TX, euler_Y, jac, euler_X, pull, omega, conormal, middle, ox, euler_seq, conormal_seq
    )


class HKRAnalysis:
    """One Čech model holding every sheaf of an embedding, so that classes,
    connecting maps and Chern classes share bases."""

    def __init__(self, e: Embedding, window: int = 12):
        self.embedding = e
        self.window = window
        self.data = conormal_data(e)
        self.model = CechModel(e.source, window, sequences=self.data.sequences)
        self.exactness = [self.model.check_exact(s) for s in self.data.sequences]
        self._alpha_cache: dict = {}

    @property
    def space(self) -> ProjProduct:
        return self.embedding.source

    def dims(self, sheaf: SheafPresentation) -> list[int]:
        return self.model.dims(sheaf)

    def cotangent_pullback_dims(self) -> dict:
        """dim H^k(X, i*Omega_Y): directly, and from the Euler sequence's long
        exact sequence (Bott dims of the outer terms plus induced-map ranks)."""
        d = self.data
        direct = self.model.dims(d.pullback_omega)
        n = self.space.dimension
        mid = bott_dims_sum(self.space, d.A0.degrees)
        ox = bott_dims_sum(self.space, d.TY.degrees)
        proj = d.euler_sequence.projection
        ranks = [rank(self.model.induced(proj, k)) for k in range(n + 1)]
        les = []
        for k in range(n + 1):
            prev = ox[k - 1] - ranks[k - 1] if k >= 1 else 0
            les.append(mid[k] - ranks[k] + prev)
        if direct != les:
            raise ConsistencyError(f"i*Omega_Y dims: direct {direct} vs long exact sequence {les}")
        return {"direct": direct, "les": les, "induced_ranks": ranks, "middle_bott": mid, "structure_bott": ox}

    @cached_property
    def eta(self) -> SparseMatrix:
        """H^1(Omega_X) -> H^2(E)."""
        return self.model.connecting(self.data.conormal_sequence, 1)

    def eta_k(self, k: int) -> SparseMatrix:
        return self.model.connecting(self.data.conormal_sequence, k)

    def c1(self, degree: Sequence[int]) -> CohomologyClass:
        return c1_class(self.model, self.data.omega_X, tuple(degree))

    def alpha(self, degree: Sequence[int]) -> CohomologyClass:
        degree = tuple(degree)
        hit = self._alpha_cache.get(degree)
        if hit is None:
            c = self.c1(degree)
            img = self.eta.apply({i: x for i, x in enumerate(c.coordinates) if x})
            coords = [img.get(i, Fraction(0)) for i in range(self.eta.rows)]
            hit = CohomologyClass(2, self.data.conormal, coords, {})
            self._alpha_cache[degree] = hit
        return hit

    def eta_kernel(self) -> Subspace:
        return kernel_basis(self.eta)

    def kernel_is_span_of_ell(self) -> bool:
        ker = self.eta_kernel()
        c = self.c1(self.embedding.ell).coordinates
        return ker == Subspace.span(self.eta.cols, [c])

    def grid_check(self, lo: int = -5, hi: int = 5) -> dict:
        """On every multidegree of the grid: alpha vanishes exactly on multiples of l,
        and alpha is additive on all pairs of grid points."""
        ell = self.embedding.ell
        g = self.space.ngroups
        grid = list(itertools.product(range(lo, hi + 1), repeat=g))
        mismatches = []
        for d in grid:
            zero = self.alpha(d).is_zero()
            proportional = all(d[i] * ell[j] == d[j] * ell[i] for i in range(g) for j in range(g))
            if zero != proportional:
                mismatches.append(list(d))
        non_additive = []
        for a in grid:
            for b in grid:
                s = tuple(x + y for x, y in zip(a, b))
                lhs = self.alpha(s).coordinates
                rhs = [x + y for x, y in zip(self.alpha(a).coordinates, self.alpha(b).coordinates)]
                if lhs != rhs:
                    non_additive.append([list(a), list(b)])
        return {
            "grid": [lo, hi],
            "points": len(grid),
            "pairs": len(grid) ** 2,
            "zero_iff_multiple_of_ell": not mismatches,
            "mismatches": mismatches,
            "additive": not non_additive,
            "non_additive": non_additive[:5],
        }

    def condition_star(self) -> dict:
        """Line-bundle level test of the extension condition for the normal bundle."""
        e = self.embedding
        det = det_conormal(e)
        out = {
            "det_conormal": list(det),
            "codim": e.codim,
            "alpha_det_zero": None,
            "alpha_det": None,
            "global_ci": e.codim <= 1,
            "ci_criterion": HOLDS if e.codim <= 1 else None,
        }
        if e.codim == 0:
            out.update(verdict=HOLDS, reason="identity embedding: the normal bundle is zero", alpha_det_zero=True)
            out["alpha_det"] = []
            return out
        a = self.alpha(det)
        out["alpha_det"] = a.coordinates
        out["alpha_det_zero"] = a.is_zero()
        if not a.is_zero():
            out.update(verdict=FAILS, reason="alpha of det E is nonzero, so det E and hence E do not extend")
        elif e.codim <= 1:
            out.update(
                verdict=INCONCLUSIVE,
                reason="alpha of det E vanishes; the image is a hypersurface, so the condition holds by the complete intersection criterion",
            )
        else:
            out.update(verdict=INCONCLUSIVE, reason="alpha of det E vanishes; the full class of E is not computed")
        return out


def cotangent_pullback_dims(e: Embedding, window: int = 12) -> list[int]:
    return HKRAnalysis(e, window).cotangent_pullback_dims()["direct"]


def eta_connecting(e: Embedding, k: int, window: int = 12) -> SparseMatrix:
    return HKRAnalysis(e, window).eta_k(k)


def alpha_line_bundle(e: Embedding, degree: Sequence[int], window: int = 12) -> CohomologyClass:
    return HKRAnalysis(e, window).alpha(degree)


def condition_star_line_level(e: Embedding, window: int = 12) -> dict:
    return HKRAnalysis(e, window).condition_star()


def analyze_embedding(e: Embedding, window: int = 12, grid: tuple | None = (-5, 5), stability_check: bool = True) -> dict:
    """Everything reported for an embedding, as plain data."""
    an = HKRAnalysis(e, window)
    d = an.data
    dims = an.cotangent_pullback_dims()
    omega = an.dims(d.omega_X)
    conormal = an.dims(d.conormal)
    cert = {"window": window, "doubled_window": None, "stable": None, "mode": an.model.mode}
    if stability_check:
        twice = HKRAnalysis(e, 2 * window)
        same = (
            twice.cotangent_pullback_dims()["direct"] == dims["direct"]
            and twice.dims(d.omega_X) == omega
            and twice.dims(d.conormal) == conormal
            and rank(twice.eta) == rank(an.eta)
        )
        cert.update(doubled_window=2 * window, stable=same)
        if not same:
            raise WindowError("embedding results changed on doubling the window", suggested_window=2 * window)
    ell = e.ell
    det = det_conormal(e)
    report = {
        "embedding": {
            "source": e.source.name,
            "ell": list(ell),
            "target_dim": e.target_dim,
            "codim": e.codim,
            "monomials": [e.source.cox_ring().format(Polynomial.monomial(m)) for m in e.monomials],
        },
        "h_pullback_cotangent": dims["direct"],
        "h_pullback_cotangent_les": dims["les"],
        "h_omega_X": omega,
        "h_conormal": conormal,
        "sequences_exact": all(x["exact"] for x in an.exactness),
        "eta_h1": {
            "rows": an.eta.rows,
            "cols": an.eta.cols,
            "rank": rank(an.eta),
            "matrix": [[x for x in row] for row in an.eta.to_dense()],
        },
        "c1": {
            "ell": an.c1(ell).coordinates,
            "det_conormal": an.c1(det).coordinates,
        },
        "alpha": {
            "ell": {"degree": list(ell), "coordinates": an.alpha(ell).coordinates, "zero": an.alpha(ell).is_zero()},
            "det_conormal": {
                "degree": list(det),
                "coordinates": an.alpha(det).coordinates,
                "zero": an.alpha(det).is_zero(),
            },
        },
        "det_conormal": list(det),
        "eta_kernel_is_span_c1_ell": an.kernel_is_span_of_ell() if an.eta.cols else None,
        "condition_star": an.condition_star(),
        "stability": cert,
    }
    if grid is not None and e.source.ngroups >= 1:
        report["grid_check"] = an.grid_check(*grid)
    return report
