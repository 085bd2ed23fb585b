"""
Čech cohomology on products of projective spaces.

Sections of O(a) over an intersection of standard opens are Laurent
monomials of multidegree a, negative only in the inverted coordinates.
A model fixes a pole-order bound t (every exponent >= -t). Polynomial maps
only raise exponents and restrictions keep them, so the bounded sections
form a subcomplex of the full Čech complex for any diagram of polynomial
maps between line-bundle sums.

When every map entry is a single monomial the diagram is torus-equivariant:
each summand gets a weight shift and maps preserve weight. The model then
closes the label set under whole weight blocks, which makes every block a
direct summand of the untruncated complex and the result exact once t
reaches the blocks carrying cohomology. Otherwise the truncation stays a
subcomplex and results are certified by recomputing at 2t.

Labels are (node, summand, u); blocks are the connected components of the
graph of map entries on labels, and all computations run block by block.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ConsistencyError, ExactnessError, NotWellDefinedError, ParseError, WindowError
from .graded import GradedRing, Polynomial
from .linalg import (
    SparseMatrix,
    Subspace,
    axpy,
    kernel_basis,
    quotient_map,
    rank,
    solve,
)

VAR_LETTERS = "xyzwuvst"


# ------------------------------------------------------------------ spaces


@dataclass(frozen=True)
class ProjProduct:
    """P^{n_1} x ... x P^{n_g} with Cox ring variables x0..xn, y0..yn, ..."""

    dims: tuple

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if not dims:
            raise ValueError("need at least one factor")
        if any(n < 1 for n in dims):
            raise ValueError(f"factor dimensions must be >= 1, got {dims}")
        if len(dims) > len(VAR_LETTERS):
            raise ValueError("too many factors")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def parse(cls, text: str) -> "ProjProduct":
        parts = re.split(r"[xX*×]", text.strip().replace(" ", "").upper())
        dims = []
        if not parts or any(not p for p in parts):
            raise ParseError(f"cannot parse projective space {text!r}")
        for p in parts:
            m = re.fullmatch(r"P\^?(\d+)", p)
            if not m:
                raise ParseError(f"cannot parse projective space {text!r}")
            dims.append(int(m.group(1)))
        try:
            return cls(tuple(dims))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc

    @property
    def name(self) -> str:
        return "x".join(f"P{n}" for n in self.dims)

    @property
    def ngroups(self) -> int:
        return len(self.dims)

    @property
    def dimension(self) -> int:
        return sum(self.dims)

    @property
    def nvars(self) -> int:
        return sum(n + 1 for n in self.dims)

    @property
    def var_factor(self) -> tuple:
        return tuple(i for i, n in enumerate(self.dims) for _ in range(n + 1))

    def factor_vars(self, i: int) -> range:
        start = sum(n + 1 for n in self.dims[:i])
        return range(start, start + self.dims[i] + 1)

    @property
    def var_names(self) -> list[str]:
        return [f"{VAR_LETTERS[i]}{k}" for i, n in enumerate(self.dims) for k in range(n + 1)]

    def cox_ring(self) -> GradedRing:
        g = self.ngroups
        grading = tuple(tuple(1 if j == i else 0 for j in range(g)) for i in self.var_factor)
        return GradedRing(tuple(self.var_names), grading)

    def opens(self) -> list[tuple]:
        return list(itertools.product(*[range(n + 1) for n in self.dims]))

    def open_vars(self, J: Sequence[int]) -> tuple:
        return tuple(self.factor_vars(i)[j] for i, j in enumerate(J))

    def degree_of(self, u: Sequence[int]) -> tuple:
        out = [0] * self.ngroups
        for v, e in enumerate(u):
            out[self.var_factor[v]] += e
        return tuple(out)

    def unit(self, i: int) -> tuple:
        return tuple(1 if j == i else 0 for j in range(self.ngroups))


def _bott_single(n: int, m: int) -> list[int]:
    out = [0] * (n + 1)
    if m >= 0:
        out[0] = math.comb(n + m, n)
    elif m <= -n - 1:
        out[n] = math.comb(-m - 1, n)
    return out


def bott_dims(space: ProjProduct, degree: Sequence[int]) -> list[int]:
    """dim H^k(O(degree)) for k = 0..dim, from the closed formula on each
    factor and the Künneth formula."""
    degree = tuple(degree)
    if len(degree) != space.ngroups:
        raise ValueError(f"multidegree {degree} does not match {space.name}")
    total = [1]
    for n, m in zip(space.dims, degree):
        single = _bott_single(n, m)
        out = [0] * (len(total) + n)
        for a, x in enumerate(total):
            for b, y in enumerate(single):
                out[a + b] += x * y
        total = out
    return total


def bott_dims_sum(space: ProjProduct, degrees: Iterable[Sequence[int]]) -> list[int]:
    out = [0] * (space.dimension + 1)
    for d in degrees:
        for k, x in enumerate(bott_dims(space, d)):
            out[k] += x
    return out


def bundle_label(degree: Sequence[int]) -> str:
    return "O(" + ",".join(str(x) for x in degree) + ")"


def required_window(space: ProjProduct, degrees: Iterable[Sequence[int]]) -> int:
    """Smallest pole-order bound whose weights carry all cohomology of the
    given line bundles: O(a) on P^n needs exponents down to a + n."""
    need = 0
    for d in degrees:
        for a, n in zip(d, space.dims):
            need = max(need, -a - n)
    return need


# ------------------------------------------------------------ presentations


@dataclass(frozen=True)
class LineBundleSum:
    """Named direct sum of line bundles O(a_1) + ... + O(a_r)."""

    space: ProjProduct
    degrees: tuple
    name: str = ""

    def __post_init__(self):
        degs = tuple(tuple(int(x) for x in d) for d in self.degrees)
        for d in degs:
            if len(d) != self.space.ngroups:
                raise ValueError(f"multidegree {d} does not match {self.space.name}")
        object.__setattr__(self, "degrees", degs)

    def __len__(self) -> int:
        return len(self.degrees)


@dataclass(frozen=True)
class SheafMap:
    """Matrix of multihomogeneous polynomials between line-bundle sums."""

    source: LineBundleSum
    target: LineBundleSum
    entries: tuple  # sorted ((row, col), Polynomial)

    @classmethod
    def build(cls, source: LineBundleSum, target: LineBundleSum, entries: dict) -> "SheafMap":
        if source.space != target.space:
            raise ValueError("source and target live on different spaces")
        space = source.space
        clean = []
        for (r, c), p in sorted(entries.items()):
            if not (0 <= r < len(target) and 0 <= c < len(source)):
                raise IndexError(f"entry ({r},{c}) outside the map shape")
            if p.is_zero():
                continue
            want = tuple(a - b for a, b in zip(target.degrees[r], source.degrees[c]))
            for e in p.terms:
                if any(x < 0 for x in e) or space.degree_of(e) != want:
                    raise ValueError(f"entry ({r},{c}) must be a polynomial of multidegree {want}")
            clean.append(((r, c), p))
        return cls(source, target, tuple(clean))

    @classmethod
    def identity(cls, node: LineBundleSum) -> "SheafMap":
        one = Polynomial.constant(1, node.space.nvars)
        return cls.build(node, node, {(i, i): one for i in range(len(node))})

    def is_monomial(self) -> bool:
        return all(p.is_monomial() for _, p in self.entries)


@dataclass(frozen=True)
class SheafPresentation:
    """A line-bundle sum, or the kernel / cokernel of a map of such sums."""

    kind: str
    ambient: LineBundleSum
    structure: SheafMap | None = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("sum", "kernel", "cokernel"):
            raise ValueError(f"unknown presentation kind {self.kind!r}")
        if self.kind == "sum" and self.structure is not None:
            raise ValueError("a line-bundle sum has no structure map")
        if self.kind == "kernel" and (self.structure is None or self.structure.source != self.ambient):
            raise ValueError("kernel presentation: ambient must be the source of the structure map")
        if self.kind == "cokernel" and (self.structure is None or self.structure.target != self.ambient):
            raise ValueError("cokernel presentation: ambient must be the target of the structure map")

    @classmethod
    def line_bundles(cls, space: ProjProduct, degrees: Iterable[Sequence[int]], name: str = "") -> "SheafPresentation":
        degrees = tuple(tuple(d) for d in degrees)
        label = name or "+".join(bundle_label(d) for d in degrees)
        return cls("sum", LineBundleSum(space, degrees, label), None, label)

    @classmethod
    def kernel(cls, m: SheafMap, name: str = "") -> "SheafPresentation":
        return cls("kernel", m.source, m, name or f"ker({m.source.name}->{m.target.name})")

    @classmethod
    def cokernel(cls, m: SheafMap, name: str = "") -> "SheafPresentation":
        return cls("cokernel", m.target, m, name or f"coker({m.source.name}->{m.target.name})")

    @property
    def space(self) -> ProjProduct:
        return self.ambient.space


@dataclass(frozen=True)
class Morphism:
    """Sheaf map given by a matrix between the ambient line-bundle sums."""

    source: SheafPresentation
    target: SheafPresentation
    matrix: SheafMap

    def __post_init__(self):
        if self.matrix.source != self.source.ambient or self.matrix.target != self.target.ambient:
            raise ValueError("morphism matrix does not match the ambient sums")


@dataclass(frozen=True)
class ShortExactSequence:
    first: SheafPresentation
    second: SheafPresentation
    third: SheafPresentation
    inclusion: Morphism
    projection: Morphism

    def __post_init__(self):
        for s in (self.first, self.second, self.third):
            if s.kind == "cokernel":
                raise ValueError("short exact sequences take line-bundle sums or kernels")
        if self.inclusion.source != self.first or self.inclusion.target != self.second:
            raise ValueError("inclusion does not go first -> second")
        if self.projection.source != self.second or self.projection.target != self.third:
            raise ValueError("projection does not go second -> third")


@dataclass
class CohomologyClass:
    degree: int
    sheaf: SheafPresentation
    coordinates: list
    representative: dict = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not any(self.coordinates)


# ------------------------------------------------------------ block model


def _exponents(space: ProjProduct, degree: Sequence[int], t: int) -> list[tuple]:
    """Exponent vectors of multidegree ``degree`` with every entry >= -t."""
    per_factor = []
    for n, a in zip(space.dims, degree):
        total = a + (n + 1) * t
        if total < 0:
            return []
        opts = []
        for cuts in itertools.combinations(range(total + n), n):
            parts, prev = [], -1
            for c in cuts:
                parts.append(c - prev - 1)
                prev = c
            parts.append(total + n - prev - 1)
            opts.append(tuple(p - t for p in parts))
        per_factor.append(opts)
    return [tuple(itertools.chain.from_iterable(c)) for c in itertools.product(*per_factor)]


def _negmask(u: Sequence[int]) -> int:
    m = 0
    for i, e in enumerate(u):
        if e < 0:
            m |= 1 << i
    return m


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


@dataclass
class Block:
    labels: list
    index: dict
    negmask: list
    by_node: dict
    edges: dict  # map index -> {src local: [(tgt local, coef)]}
    cache: dict = field(default_factory=dict)

    @property
    def weight(self):
        return self.labels[0]

    def signature(self) -> tuple:
        sig = self.cache.get("sig")
        if sig is None:
            shape = tuple((lab[0], lab[1], nm) for lab, nm in zip(self.labels, self.negmask))
            edges = tuple(
                (mi, tuple((s, tuple(v)) for s, v in sorted(e.items()))) for mi, e in sorted(self.edges.items())
            )
            sig = (shape, edges)
            self.cache["sig"] = sig
        return sig


@dataclass
class BlockCohomology:
    dim: int
    positions: list
    pos_index: dict
    cycles: Subspace | None = None
    boundaries: Subspace | None = None
    basis: Subspace | None = None

    def coordinates(self, z: dict) -> list[Fraction]:
        if self.cycles.reduce(z):
            raise NotWellDefinedError("cochain is not a cocycle")
        return self.basis.coordinates(self.boundaries.reduce(z))


@dataclass
class CohomologyData:
    sheaf: SheafPresentation
    degree: int
    dim: int
    order: list  # (block index, basis index within block)
    blocks: dict  # block index -> BlockCohomology (only nonzero blocks)
    offsets: dict  # block index -> first global coordinate


class CechModel:
    """Bounded Čech complexes of every sheaf in a diagram, split into blocks."""

    def __init__(
        self,
        space: ProjProduct,
        window: int,
        sheaves: Iterable[SheafPresentation] = (),
        morphisms: Iterable[Morphism] = (),
        sequences: Iterable[ShortExactSequence] = (),
        maps: Iterable[SheafMap] = (),
        nodes: Iterable[LineBundleSum] = (),
    ):
        if window < 0:
            raise ValueError("window must be non-negative")
        self.space = space
        self.window = window
        sheaves = list(sheaves)
        morphisms = list(morphisms)
        sequences = list(sequences)
        for ses in sequences:
            sheaves += [ses.first, ses.second, ses.third]
            morphisms += [ses.inclusion, ses.projection]
        for mo in morphisms:
            sheaves += [mo.source, mo.target]
        self.sheaves: list[SheafPresentation] = []
        self.sheaf_index: dict = {}
        for s in sheaves:
            if s.space != space:
                raise ValueError(f"sheaf {s.name} lives on {s.space.name}, not {space.name}")
            if s not in self.sheaf_index:
                self.sheaf_index[s] = len(self.sheaves)
                self.sheaves.append(s)
        self.nodes: list[LineBundleSum] = []
        self.node_index: dict = {}
        self.maps: list[SheafMap] = []
        self.map_index: dict = {}
        all_maps = [s.structure for s in self.sheaves if s.structure is not None]
        all_maps += [mo.matrix for mo in morphisms] + list(maps)
        for s in self.sheaves:
            self._add_node(s.ambient)
        for node in nodes:
            self._add_node(node)
        for m in all_maps:
            self._add_node(m.source)
            self._add_node(m.target)
            if m not in self.map_index:
                self.map_index[m] = len(self.maps)
                self.maps.append(m)
        need = required_window(space, (d for node in self.nodes for d in node.degrees))
        if window < need:
            raise WindowError(
                f"window {window} misses cohomology of the line bundles involved (need {need})",
                suggested_window=need,
            )
        self.morphisms = morphisms
        self.sequences = sequences
        self.opens = space.opens()
        self.nopens = len(self.opens)
        self.sigmas = [list(itertools.combinations(range(self.nopens), p + 1)) for p in range(self.nopens)]
        self.sigma_index = [{s: i for i, s in enumerate(level)} for level in self.sigmas]
        inv = [sum(1 << v for v in space.open_vars(J)) for J in self.opens]
        self.invmask = []
        for level in self.sigmas:
            masks = []
            for s in level:
                mk = 0
                for j in s:
                    mk |= inv[j]
                masks.append(mk)
            self.invmask.append(masks)
        self._memo: dict = {}
        self._cohomology: dict = {}
        self._build()

    def _add_node(self, node: LineBundleSum) -> None:
        if node.space != self.space:
            raise ValueError("node on a different space")
        if node not in self.node_index:
            self.node_index[node] = len(self.nodes)
            self.nodes.append(node)

    # -- construction

    def _shifts(self) -> dict | None:
        """Weight shift per (node, summand) if every map entry is a monomial."""
        nv = self.space.nvars
        adj: dict = {}
        for m in self.maps:
            if not m.is_monomial():
                return None
            si, ti = self.node_index[m.source], self.node_index[m.target]
            for (r, c), p in m.entries:
                (e,) = p.terms
                adj.setdefault((si, c), []).append(((ti, r), tuple(-x for x in e)))
                adj.setdefault((ti, r), []).append(((si, c), e))
        shift: dict = {}
        self.summand_component = {}
        comp = 0
        for ni, node in enumerate(self.nodes):
            for s in range(len(node)):
                if (ni, s) in shift:
                    continue
                shift[(ni, s)] = (0,) * nv
                self.summand_component[(ni, s)] = comp
                stack = [(ni, s)]
                while stack:
                    a = stack.pop()
                    for b, e in adj.get(a, ()):
                        want = tuple(x + y for x, y in zip(shift[a], e))
                        if b in shift:
                            if shift[b] != want:
                                return None
                        else:
                            shift[b] = want
                            self.summand_component[b] = comp
                            stack.append(b)
                comp += 1
        return shift

    def _build(self) -> None:
        t = self.window
        space = self.space
        shifts = self._shifts()
        self.mode = "weight-blocks" if shifts is not None else "pole-order"
        labels = set()
        for ni, node in enumerate(self.nodes):
            for s, d in enumerate(node.degrees):
                for u in _exponents(space, d, t):
                    labels.add((ni, s, u))
        if shifts is not None:
            members: dict = {}
            for key, comp in self.summand_component.items():
                members.setdefault(comp, []).append(key)
            weights = set()
            for ni, s, u in labels:
                h = shifts[(ni, s)]
                weights.add((self.summand_component[(ni, s)], tuple(a + b for a, b in zip(u, h))))
            for comp, w in weights:
                for ni, s in members[comp]:
                    h = shifts[(ni, s)]
                    labels.add((ni, s, tuple(a - b for a, b in zip(w, h))))
        labels = sorted(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        by_summand: dict = {}
        for i, (ni, s, u) in enumerate(labels):
            by_summand.setdefault((ni, s), []).append(i)
        uf = _UnionFind(len(labels))
        edges = []  # (map, src, tgt, coef)
        for mi, m in enumerate(self.maps):
            si, ti = self.node_index[m.source], self.node_index[m.target]
            for (r, c), p in m.entries:
                for i in by_summand.get((si, c), ()):
                    u = labels[i][2]
                    for e, coef in p.terms.items():
                        tgt = (ti, r, tuple(a + b for a, b in zip(u, e)))
                        j = index.get(tgt)
                        if j is None:
                            raise ConsistencyError(f"label {tgt} missing from the bounded model")
                        uf.union(i, j)
                        edges.append((mi, i, j, coef))
        groups: dict = {}
        for i in range(len(labels)):
            groups.setdefault(uf.find(i), []).append(i)
        order = sorted(groups.values(), key=lambda g: g[0])
        self.label_block = {}
        blocks = []
        for bi, members in enumerate(order):
            loc = {g: k for k, g in enumerate(members)}
            blabels = [labels[g] for g in members]
            by_node: dict = {}
            for k, lab in enumerate(blabels):
                by_node.setdefault(lab[0], []).append(k)
                self.label_block[lab] = (bi, k)
            blocks.append(
                Block(
                    blabels,
                    {lab: k for k, lab in enumerate(blabels)},
                    [_negmask(lab[2]) for lab in blabels],
                    by_node,
                    {},
                )
            )
        for mi, i, j, coef in edges:
            bi, si = self.label_block[labels[i]]
            _, sj = self.label_block[labels[j]]
            blocks[bi].edges.setdefault(mi, {}).setdefault(si, []).append((sj, coef))
        self.blocks: list[Block] = blocks
        self.nlabels = len(labels)

    # -- per-block linear algebra

    def _regular(self, block: Block, local: int, p: int, si: int) -> bool:
        return block.negmask[local] & ~self.invmask[p][si] == 0

    def positions(self, block: Block, node: int, p: int) -> tuple[list, dict]:
        key = ("pos", node, p)
        hit = block.cache.get(key)
        if hit is None:
            pos = []
            if 0 <= p < self.nopens:
                labs = block.by_node.get(node, ())
                masks = self.invmask[p]
                for si in range(len(self.sigmas[p])):
                    mk = masks[si]
                    for l in labs:
                        if block.negmask[l] & ~mk == 0:
                            pos.append((si, l))
            hit = (pos, {x: i for i, x in enumerate(pos)})
            block.cache[key] = hit
        return hit

    def delta(self, block: Block, node: int, p: int) -> SparseMatrix:
        """(dc)_tau = sum_i (-1)^i c_{tau minus tau_i}."""
        key = ("delta", node, p)
        hit = block.cache.get(key)
        if hit is not None:
            return hit
        src, _ = self.positions(block, node, p)
        tgt, tidx = self.positions(block, node, p + 1)
        entries = {}
        if tgt and src:
            level = self.sigmas[p + 1]
            sidx = self.sigma_index[p]
            _, sposidx = self.positions(block, node, p)
            for (ti, l), row in tidx.items():
                tau = level[ti]
                for i in range(len(tau)):
                    sigma = tau[:i] + tau[i + 1 :]
                    col = sposidx.get((sidx[sigma], l))
                    if col is not None:
                        entries[(row, col)] = 1 if i % 2 == 0 else -1
        m = SparseMatrix(len(tgt), len(src), entries)
        block.cache[key] = m
        return m

    def apply_map(self, block: Block, mi: int, vec: dict, src_pos: list, tgt_index: dict) -> dict:
        """Apply a map sectionwise to a cochain given on ``src_pos``."""
        out: dict = {}
        e = block.edges.get(mi, {})
        for k, x in vec.items():
            si, l = src_pos[k]
            for l2, c in e.get(l, ()):
                axpy(out, x * c, {tgt_index[(si, l2)]: 1})
        return out

    def _local_map_matrix(self, block: Block, mi: int, cols: list, rows_node: int) -> SparseMatrix:
        """Matrix of a map from the listed local labels to all block labels of a node."""
        e = block.edges.get(mi, {})
        rows = block.by_node.get(rows_node, [])
        ridx = {l: i for i, l in enumerate(rows)}
        entries = {}
        for j, l in enumerate(cols):
            for l2, c in e.get(l, ()):
                entries[(ridx[l2], j)] = entries.get((ridx[l2], j), 0) + c
        return SparseMatrix(len(rows), len(cols), entries)

    def sections(self, block: Block, sheaf: SheafPresentation, p: int) -> tuple[list | None, list]:
        """(basis of the section subspace or None for everything, quotient generators)."""
        key = ("sec", self.sheaf_index[sheaf], p)
        hit = block.cache.get(key)
        if hit is not None:
            return hit
        node = self.node_index[sheaf.ambient]
        pos, pidx = self.positions(block, node, p)
        if sheaf.kind == "sum":
            out = (None, [])
        elif sheaf.kind == "kernel":
            mi = self.map_index[sheaf.structure]
            tnode = self.node_index[sheaf.structure.target]
            S = []
            for si in range(len(self.sigmas[p]) if 0 <= p < self.nopens else 0):
                cols = [l for l in block.by_node.get(node, ()) if self._regular(block, l, p, si)]
                if not cols:
                    continue
                ker = kernel_basis(self._local_map_matrix(block, mi, cols, tnode))
                for r in ker.rows():
                    S.append({pidx[(si, cols[j])]: x for j, x in r.items()})
            out = (S, [])
        else:
            mi = self.map_index[sheaf.structure]
            snode = self.node_index[sheaf.structure.source]
            spos, _ = self.positions(block, snode, p)
            Q = []
            for k in range(len(spos)):
                v = self.apply_map(block, mi, {k: Fraction(1)}, spos, pidx)
                if v:
                    Q.append(v)
            out = (None, Q)
        block.cache[key] = out
        return out

    def _section_matrix(self, block: Block, sheaf: SheafPresentation, p: int) -> SparseMatrix:
        node = self.node_index[sheaf.ambient]
        pos, _ = self.positions(block, node, p)
        S, _ = self.sections(block, sheaf, p)
        if S is None:
            return SparseMatrix.identity(len(pos))
        return SparseMatrix.from_columns(S, len(pos))

    def _block_cohomology(self, block: Block, sheaf: SheafPresentation, k: int, with_bases: bool):
        node = self.node_index[sheaf.ambient]
        pos, pidx = self.positions(block, node, k)
        n_next = len(self.positions(block, node, k + 1)[0])
        V = self._section_matrix(block, sheaf, k)
        Vprev = self._section_matrix(block, sheaf, k - 1)
        _, Qk = self.sections(block, sheaf, k)
        _, Qn = self.sections(block, sheaf, k + 1)
        dV = self.delta(block, node, k) @ V if n_next else SparseMatrix.zero(0, V.cols)
        if Qn:
            qdim, proj = quotient_map(n_next, Subspace.span(n_next, Qn))
            dV = proj @ dV
        bcols = (self.delta(block, node, k - 1) @ Vprev).column_dicts() if k >= 1 and Vprev.cols else []
        bcols = bcols + list(Qk)
        if not with_bases:
            dimZ = V.cols - rank(dV)
            dimB = rank(SparseMatrix.from_columns(bcols, len(pos))) if bcols else 0
            return BlockCohomology(dimZ - dimB, pos, pidx)
        ker = kernel_basis(dV)
        Z = Subspace.span(len(pos), [V.apply(r) for r in ker.rows()])
        B = Subspace.span(len(pos), bcols)
        W = B.complement_in(Z)
        if W.dim != Z.dim - B.dim:
            raise ConsistencyError("coboundaries are not cocycles")
        return BlockCohomology(W.dim, pos, pidx, Z, B, W)

    def block_dim(self, bi: int, sheaf: SheafPresentation, k: int) -> int:
        block = self.blocks[bi]
        key = ("dim", self.sheaf_index[sheaf], k, block.signature())
        hit = self._memo.get(key)
        if hit is None:
            hit = self._block_cohomology(block, sheaf, k, with_bases=False).dim
            self._memo[key] = hit
        return hit

    def block_cohomology(self, bi: int, sheaf: SheafPresentation, k: int) -> BlockCohomology:
        block = self.blocks[bi]
        key = ("coh", self.sheaf_index[sheaf], k)
        hit = block.cache.get(key)
        if hit is None:
            hit = self._block_cohomology(block, sheaf, k, with_bases=True)
            block.cache[key] = hit
        return hit

    # -- global results

    def dim(self, sheaf: SheafPresentation, k: int) -> int:
        if not 0 <= k < self.nopens:
            return 0
        return sum(self.block_dim(bi, sheaf, k) for bi in range(len(self.blocks)))

    def dims(self, sheaf: SheafPresentation) -> list[int]:
        return [self.dim(sheaf, k) for k in range(self.space.dimension + 1)]

    def cohomology(self, sheaf: SheafPresentation, k: int) -> CohomologyData:
        key = (self.sheaf_index[sheaf], k)
        hit = self._cohomology.get(key)
        if hit is not None:
            return hit
        order, blocks, offsets = [], {}, {}
        if 0 <= k < self.nopens:
            for bi in range(len(self.blocks)):
                if self.block_dim(bi, sheaf, k):
                    bc = self.block_cohomology(bi, sheaf, k)
                    offsets[bi] = len(order)
                    blocks[bi] = bc
                    order.extend((bi, j) for j in range(bc.dim))
        data = CohomologyData(sheaf, k, len(order), order, blocks, offsets)
        self._cohomology[key] = data
        return data

    def split_cochain(self, sheaf: SheafPresentation, p: int, cochain: dict) -> dict:
        """{(sigma, label): coef} -> {block: {local position: coef}}."""
        node = self.node_index[sheaf.ambient]
        out: dict = {}
        for (sigma, lab), c in cochain.items():
            if not c:
                continue
            if lab[0] != node:
                raise ValueError("cochain label on the wrong node")
            hit = self.label_block.get(lab)
            if hit is None:
                raise WindowError(f"label {lab} outside the window", suggested_window=2 * self.window)
            bi, l = hit
            _, pidx = self.positions(self.blocks[bi], node, p)
            si = self.sigma_index[p][tuple(sigma)]
            k = pidx.get((si, l))
            if k is None:
                raise NotWellDefinedError(f"label {lab} is not a section over {sigma}")
            axpy(out.setdefault(bi, {}), c, {k: 1})
        return out

    def class_of(self, sheaf: SheafPresentation, k: int, cochain: dict) -> CohomologyClass:
        data = self.cohomology(sheaf, k)
        coords = [Fraction(0)] * data.dim
        for bi, vec in self.split_cochain(sheaf, k, cochain).items():
            if not vec:
                continue
            bc = self.block_cohomology(bi, sheaf, k)
            local = bc.coordinates(vec)
            if bi in data.offsets:
                for j, x in enumerate(local):
                    coords[data.offsets[bi] + j] = x
        return CohomologyClass(k, sheaf, coords, dict(cochain))

    def basis_representative(self, sheaf: SheafPresentation, k: int, index: int) -> dict:
        data = self.cohomology(sheaf, k)
        bi, j = data.order[index]
        bc = data.blocks[bi]
        node_vec = bc.basis.rows()[j]
        block = self.blocks[bi]
        out = {}
        for pos, c in node_vec.items():
            si, l = bc.positions[pos]
            out[(self.sigmas[k][si], block.labels[l])] = c
        return out

    def induced(self, morphism: Morphism, k: int) -> SparseMatrix:
        """Matrix of H^k(source) -> H^k(target); checks that coboundaries map to coboundaries."""
        src, tgt = morphism.source, morphism.target
        H1, H2 = self.cohomology(src, k), self.cohomology(tgt, k)
        mi = self.map_index[morphism.matrix]
        snode, tnode = self.node_index[src.ambient], self.node_index[tgt.ambient]
        entries = {}
        for bi in range(len(self.blocks)):
            if bi not in H1.blocks and bi not in H2.blocks:
                continue
            block = self.blocks[bi]
            spos, _ = self.positions(block, snode, k)
            _, tidx = self.positions(block, tnode, k)
            b1 = self.block_cohomology(bi, src, k)
            b2 = self.block_cohomology(bi, tgt, k)
            for r in b1.boundaries.rows():
                img = self.apply_map(block, mi, r, spos, tidx)
                if b2.boundaries.reduce(img):
                    raise ConsistencyError(f"{src.name} -> {tgt.name}: induced map depends on representatives")
            if bi not in H1.blocks:
                continue
            for j, r in enumerate(b1.basis.rows()):
                img = self.apply_map(block, mi, r, spos, tidx)
                coords = b2.coordinates(img)
                for i, x in enumerate(coords):
                    if x:
                        entries[(H2.offsets[bi] + i, H1.offsets[bi] + j)] = x
        return SparseMatrix(H2.dim, H1.dim, entries)

    # -- short exact sequences

    def _constrained_solve(self, block, sheaf, si, p, mi_main, main_node, rhs_vec: dict):
        """Solve main(y) = rhs on sections of ``sheaf`` over one intersection."""
        node = self.node_index[sheaf.ambient]
        cols = [l for l in block.by_node.get(node, ()) if self._regular(block, l, p, si)]
        A = self._local_map_matrix(block, mi_main, cols, main_node)
        rows = [A]
        if sheaf.kind == "kernel":
            rows.append(self._local_map_matrix(block, self.map_index[sheaf.structure], cols, self.node_index[sheaf.structure.target]))
        nrows = sum(m.rows for m in rows)
        entries, off = {}, 0
        for m in rows:
            for (i, j), v in m.entries.items():
                entries[(off + i, j)] = v
            off += m.rows
        M = SparseMatrix(nrows, len(cols), entries)
        sol = solve(M, rhs_vec)
        if sol is None:
            return None
        return {cols[j]: x for j, x in sol.items()}

    def check_exact(self, ses: ShortExactSequence) -> dict:
        """Degreewise exactness on every intersection, block by block."""
        inc = self.map_index[ses.inclusion.matrix]
        prj = self.map_index[ses.projection.matrix]
        n2 = self.node_index[ses.second.ambient]
        n3 = self.node_index[ses.third.ambient]
        checked = 0
        for bi, block in enumerate(self.blocks):
            key = ("exact", self.sequences.index(ses), block.signature())
            if key in self._memo:
                continue
            for p in range(self.nopens):
                if not block.by_node:
                    continue
                V1 = self._section_matrix(block, ses.first, p)
                V2 = self._section_matrix(block, ses.second, p)
                V3 = self._section_matrix(block, ses.third, p)
                pos1, _ = self.positions(block, self.node_index[ses.first.ambient], p)
                pos2, idx2 = self.positions(block, n2, p)
                pos3, idx3 = self.positions(block, n3, p)
                I = SparseMatrix.from_columns([self.apply_map(block, inc, c, pos1, idx2) for c in V1.column_dicts()], len(pos2))
                P = SparseMatrix.from_columns([self.apply_map(block, prj, c, pos2, idx3) for c in V2.column_dicts()], len(pos3))
                S2 = Subspace.span(len(pos2), V2.column_dicts()) if V2.cols else Subspace.zero(len(pos2))
                S3 = Subspace.span(len(pos3), V3.column_dicts()) if V3.cols else Subspace.zero(len(pos3))
                ok = (
                    rank(I) == V1.cols
                    and all(not S2.reduce(c) for c in I.column_dicts())
                    and all(not S3.reduce(c) for c in P.column_dicts())
                    and rank(P) == S3.dim
                    and S2.dim == V1.cols + S3.dim
                    and all(not self.apply_map(block, prj, c, pos2, idx3) for c in I.column_dicts())
                )
                if not ok:
                    lab = block.labels[0]
                    raise ExactnessError(
                        f"sequence {ses.first.name} -> {ses.second.name} -> {ses.third.name} is not exact "
                        f"on {p + 1}-fold intersections near label {lab[2]} (window {self.window})"
                    )
                checked += 1
            self._memo[key] = True
        return {"exact": True, "blocks": len(self.blocks), "mode": self.mode}

    def connecting(self, ses: ShortExactSequence, k: int) -> SparseMatrix:
        """Snake-lemma map H^k(third) -> H^{k+1}(first)."""
        self.check_exact(ses)
        H3 = self.cohomology(ses.third, k)
        H1 = self.cohomology(ses.first, k + 1)
        n1 = self.node_index[ses.first.ambient]
        n2 = self.node_index[ses.second.ambient]
        n3 = self.node_index[ses.third.ambient]
        inc = self.map_index[ses.inclusion.matrix]
        prj = self.map_index[ses.projection.matrix]
        entries = {}

        def image(block, bi, z: dict, pos3) -> list[Fraction]:
            # lift sectionwise, apply the Čech differential, pull back to the first sheaf
            pos2, idx2 = self.positions(block, n2, k)
            by_sigma: dict = {}
            for q, x in z.items():
                si, l = pos3[q]
                by_sigma.setdefault(si, {})[l] = x
            y: dict = {}
            rows3 = block.by_node.get(n3, [])
            r3 = {l: i for i, l in enumerate(rows3)}
            for si, zs in by_sigma.items():
                lift = self._constrained_solve(block, ses.second, si, k, prj, n3, {r3[l]: x for l, x in zs.items()})
                if lift is None:
                    raise ExactnessError(f"no lift over intersection {self.sigmas[k][si]}")
                for l, x in lift.items():
                    y[idx2[(si, l)]] = x
            dy = self.delta(block, n2, k).apply(y)
            pos2n, _ = self.positions(block, n2, k + 1)
            pos1n, idx1n = self.positions(block, n1, k + 1)
            rows2 = block.by_node.get(n2, [])
            r2 = {l: i for i, l in enumerate(rows2)}
            by_tau: dict = {}
            for q, x in dy.items():
                ti, l = pos2n[q]
                by_tau.setdefault(ti, {})[r2[l]] = x
            xvec: dict = {}
            for ti, rhs in by_tau.items():
                pre = self._constrained_solve(block, ses.first, ti, k + 1, inc, n2, rhs)
                if pre is None:
                    raise ExactnessError(f"boundary does not come from the first sheaf over {self.sigmas[k + 1][ti]}")
                for l, x in pre.items():
                    xvec[idx1n[(ti, l)]] = x
            b1 = self.block_cohomology(bi, ses.first, k + 1)
            return b1.coordinates(xvec)

        for bi in H3.blocks:
            block = self.blocks[bi]
            b3 = H3.blocks[bi]
            if bi not in H1.blocks:
                continue
            for r in b3.boundaries.rows():
                if any(image(block, bi, r, b3.positions)):
                    raise ConsistencyError("connecting map depends on the cocycle representative")
            for j, r in enumerate(b3.basis.rows()):
                for i, x in enumerate(image(block, bi, r, b3.positions)):
                    if x:
                        entries[(H1.offsets[bi] + i, H3.offsets[bi] + j)] = x
        return SparseMatrix(H1.dim, H3.dim, entries)


# -------------------------------------------------------- standard objects


def cotangent_data(space: ProjProduct):
    """Ω¹ as the kernel of the Euler map  sum_i O(-e_i)^{n_i+1} -> O^g.

    The summand of variable v carries the form dv."""
    nv = space.nvars
    AX = LineBundleSum(space, tuple(tuple(-x for x in space.unit(space.var_factor[v])) for v in range(nv)), "AX")
    TX = LineBundleSum(space, tuple((0,) * space.ngroups for _ in range(space.ngroups)), "TX")
    euler = SheafMap.build(AX, TX, {(space.var_factor[v], v): Polynomial.variable(v, nv) for v in range(nv)})
    omega = SheafPresentation.kernel(euler, name="Omega_X")
    return omega, AX, TX, euler


def c1_cocycle(model: CechModel, omega: SheafPresentation, degree: Sequence[int]) -> dict:
    """Čech 1-cocycle of dlog of the transition functions of O(degree):
    on U_J cap U_K it is sum_i a_i (dx_{i,K_i}/x_{i,K_i} - dx_{i,J_i}/x_{i,J_i})."""
    space = model.space
    node = model.node_index[omega.ambient]
    nv = space.nvars
    out: dict = {}
    for a, b in model.sigmas[1]:
        J, K = model.opens[a], model.opens[b]
        vec: dict = {}
        for i, deg in enumerate(degree):
            if not deg or J[i] == K[i]:
                continue
            vk, vj = space.factor_vars(i)[K[i]], space.factor_vars(i)[J[i]]
            axpy(vec, deg, {vk: 1})
            axpy(vec, -deg, {vj: 1})
        for v, c in vec.items():
            u = tuple(-1 if w == v else 0 for w in range(nv))
            out[((a, b), (node, v, u))] = Fraction(c)
    return out


def c1_class(model: CechModel, omega: SheafPresentation, degree: Sequence[int]) -> CohomologyClass:
    return model.class_of(omega, 1, c1_cocycle(model, omega, degree))


def kunneth_coordinates(model: CechModel, omega: SheafPresentation, degree: Sequence[int]) -> list[Fraction]:
    """Coordinates of c1(O(degree)) in the basis c1(O(e_1)), ..., c1(O(e_g))."""
    space = model.space
    basis = [c1_class(model, omega, space.unit(i)).coordinates for i in range(space.ngroups)]
    target = c1_class(model, omega, degree).coordinates
    n = len(target)
    M = SparseMatrix.from_columns([{r: x for r, x in enumerate(b) if x} for b in basis], n)
    sol = solve(M, {r: x for r, x in enumerate(target) if x})
    if sol is None:
        raise ConsistencyError("c1 class outside the span of the Künneth basis")
    return [sol.get(i, Fraction(0)) for i in range(space.ngroups)]


# ------------------------------------------------------------ entry points


def _stable(compute, space, window, stability_check):
    first = compute(window)
    cert = {"window": window, "doubled_window": None, "stable": None}
    if stability_check:
        second = compute(2 * window)
        cert["doubled_window"] = 2 * window
        cert["stable"] = first[0] == second[0]
        if not cert["stable"]:
            raise WindowError(
                f"results changed between windows {window} and {2 * window}", suggested_window=2 * window
            )
    return first, cert


def cech_dims(
    space: ProjProduct, sheaf: SheafPresentation, window: int = 12, stability_check: bool = True
) -> tuple[list[int], dict]:
    """Dims of H^k for all k, with a window-doubling certificate."""

    def compute(t):
        model = CechModel(space, t, [sheaf])
        return model.dims(sheaf), model.mode

    (dims, mode), cert = _stable(compute, space, window, stability_check)
    cert["mode"] = mode
    return dims, cert


def cech_cohomology(
    space: ProjProduct, sheaf: SheafPresentation, k: int, window: int = 12, stability_check: bool = True
) -> tuple[int, list[CohomologyClass], dict]:
    dims, cert = cech_dims(space, sheaf, window, stability_check)
    model = CechModel(space, window, [sheaf])
    data = model.cohomology(sheaf, k)
    basis = []
    for i in range(data.dim):
        coords = [Fraction(int(j == i)) for j in range(data.dim)]
        basis.append(CohomologyClass(k, sheaf, coords, model.basis_representative(sheaf, k, i)))
    if data.dim != (dims[k] if k < len(dims) else 0):
        raise ConsistencyError("basis size differs from the dimension count")
    return data.dim, basis, cert


def line_bundle_dims(
    space: ProjProduct, degree: Sequence[int], window: int = 12, stability_check: bool = True
) -> tuple[list[int], dict]:
    return cech_dims(space, SheafPresentation.line_bundles(space, [tuple(degree)]), window, stability_check)


def induced_on_cohomology(morphism: Morphism, k: int, window: int = 12) -> SparseMatrix:
    model = CechModel(morphism.source.space, window, morphisms=[morphism])
    return model.induced(morphism, k)


def connecting_map(ses: ShortExactSequence, k: int, window: int = 12) -> SparseMatrix:
    model = CechModel(ses.first.space, window, sequences=[ses])
    return model.connecting(ses, k)
