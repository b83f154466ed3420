"""Residue chain of a Jordan splitting and constituent typing.

For each scale i the rescaled form q_i = q/2^i lives on the sublattice
A_i = (+)_j 2^max(0, i-j) L_j, whose Gram in the scaled Jordan basis is
the block sum of 2^|i-j| U_j.  Reducing modulo 2A_i gives kappa-spaces

    B : q_i even                (kernel of the diagonal additive form)
    X : polar pairing even      (kernel of the Gram mod 2)
    W : X + <e>, e the characteristic vector solving G e = sqrt(diag)
    Y : radical of the polar pairing restricted to B
    Z : kernel of the linear functional sqrt(q_i/2) on Y

V = B/Z carries a nonsingular quadratic form; its dimension and Arf
class determine the reductive factor at scale i, and the counts alpha,
beta determine the component group exponent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .base_ring import (
    KappaElem,
    RingDescriptor,
    RingElem,
    additive_form_kernel,
    kappa_linear_solve,
    lift,
)
from .lattice_forms import JordanSymbol, Matrix, QuadLattice, jordan_split


class OddDimension(ValueError):
    """Arf classification requested for an odd-dimensional form."""


# -- linear algebra over kappa ------------------------------------------


def _echelon(vectors):
    """Reduced echelon basis (rows, pivots) of the span, pivot-sorted."""
    rows: list[list[KappaElem]] = []
    pivots: list[int] = []
    for vec in vectors:
        v = list(vec)
        for row, p in zip(rows, pivots):
            if v[p]:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        lead = next((k for k, x in enumerate(v) if x), None)
        if lead is None:
            continue
        inv = v[lead].inverse()
        v = [inv * x for x in v]
        for idx, row in enumerate(rows):
            if row[lead]:
                f = row[lead]
                rows[idx] = [a - f * b for a, b in zip(row, v)]
        rows.append(v)
        pivots.append(lead)
    order = sorted(range(len(rows)), key=lambda k: pivots[k])
    return [rows[k] for k in order], [pivots[k] for k in order]


@dataclass(frozen=True)
class KappaSubspace:
    """Subspace of kappa^n held as a reduced echelon basis."""

    width: int
    rows: tuple[tuple[KappaElem, ...], ...]
    pivots: tuple[int, ...]

    @classmethod
    def span(cls, vectors, width: int) -> "KappaSubspace":
        rows, pivots = _echelon(vectors)
        return cls(width, tuple(tuple(r) for r in rows), tuple(pivots))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, vec):
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            if v[p]:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        return v

    def contains(self, vec) -> bool:
        return not any(self.reduce(vec))

    def contains_space(self, other: "KappaSubspace") -> bool:
        return all(self.contains(r) for r in other.rows)


def _combine(basis, coords, desc: RingDescriptor, width: int):
    zero = desc.kappa(0)
    out = [zero] * width
    for c, vec in zip(coords, basis):
        if not c:
            continue
        out = [a + c * b for a, b in zip(out, vec)]
    return out


# -- quadratic data at one scale ----------------------------------------


@dataclass(frozen=True)
class ResidueSpace:
    """V = B/Z with its nonsingular quadratic form over kappa."""

    scale: int
    dimension: int
    basis: tuple[tuple[KappaElem, ...], ...]  # representatives in kappa^n
    polar: tuple[tuple[KappaElem, ...], ...]
    values: tuple[KappaElem, ...]
    kind: str  # "odd-dim" | "even-split" | "even-nonsplit"


@dataclass(frozen=True)
class ScaleChain:
    """kappa-data of the six sublattices at one scale.

    Coordinates refer to A_i in its scaled Jordan basis; exps[r] is the
    exponent on the r-th Jordan basis vector, so A-bases come out as
    matrices in the original Jordan coordinates.
    """

    descriptor: RingDescriptor
    scale: int
    exps: tuple[int, ...]
    b: KappaSubspace
    w: KappaSubspace
    x: KappaSubspace
    y: KappaSubspace
    z: KappaSubspace
    residue: ResidueSpace

    def _preimage(self, space: KappaSubspace) -> Matrix:
        desc = self.descriptor
        n = len(self.exps)
        zero = desc.zero()
        by_pivot = {p: space.rows[k] for k, p in enumerate(space.pivots)}
        cols = []
        for j in range(n):
            if j in by_pivot:
                col = [lift(c) for c in by_pivot[j]]
            else:
                col = [zero] * n
                col[j] = desc.elem(2)
            cols.append(col)
        return tuple(
            tuple(cols[j][r].shifted(self.exps[r]) for j in range(n))
            for r in range(n))

    def basis_matrix(self, name: str) -> Matrix:
        """Columns generate the named sublattice in Jordan coordinates."""
        if name == "a":
            desc = self.descriptor
            zero = desc.zero()
            n = len(self.exps)
            return tuple(
                tuple(desc.one().shifted(self.exps[r]) if r == j else zero
                      for j in range(n))
                for r in range(n))
        try:
            space = {"b": self.b, "w": self.w, "x": self.x,
                     "y": self.y, "z": self.z}[name]
        except KeyError:
            raise ValueError(f"no sublattice named {name!r}") from None
        return self._preimage(space)


@dataclass(frozen=True)
class ChainLattices:
    descriptor: RingDescriptor
    rank: int
    window: tuple[int, ...]
    scales: tuple[ScaleChain, ...]

    def at(self, i: int) -> ScaleChain:
        for s in self.scales:
            if s.scale == i:
                return s
        raise KeyError(f"scale {i} is outside the computed window")


def _gram_at_scale(symbol: JordanSymbol, i: int) -> tuple[Matrix, tuple[int, ...]]:
    desc = symbol.descriptor
    n = symbol.rank
    zero = desc.zero()
    rows = [[zero] * n for _ in range(n)]
    exps = []
    off = 0
    for c in symbol.constituents:
        for a in range(c.rank):
            exps.append(max(0, i - c.scale))
            for b in range(c.rank):
                rows[off + a][off + b] = c.gram[a][b].shifted(abs(i - c.scale))
        off += c.rank
    return tuple(tuple(r) for r in rows), tuple(exps)


def _qbar(gram: Matrix, vec, desc: RingDescriptor) -> KappaElem:
    """(v^T G v)/2 mod 2 for a residue vector v with even value."""
    lifted = [lift(c) for c in vec]
    n = len(lifted)
    acc = desc.zero()
    for r in range(n):
        if lifted[r].kind == "zero":
            continue
        for s in range(n):
            if lifted[s].kind == "zero":
                continue
            acc = acc + lifted[r] * gram[r][s] * lifted[s]
    return acc.shifted(-1).residue()


def _polar_bar(gbar, u, v, desc: RingDescriptor) -> KappaElem:
    acc = desc.kappa(0)
    for r, ur in enumerate(u):
        if not ur:
            continue
        row = gbar[r]
        for s, vs in enumerate(v):
            if vs:
                acc = acc + ur * row[s] * vs
    return acc


def _scale_chain(symbol: JordanSymbol, i: int) -> ScaleChain:
    desc = symbol.descriptor
    gram, exps = _gram_at_scale(symbol, i)
    n = symbol.rank
    gbar = [[gram[r][c].residue() for c in range(n)] for r in range(n)]
    diag = [gram[k][k].residue() for k in range(n)]

    b_vecs = additive_form_kernel(diag)
    b = KappaSubspace.span(b_vecs, n)

    x_vecs, _ = kappa_linear_solve(gbar)
    x = KappaSubspace.span(x_vecs, n)

    sqrt_diag = [d.sqrt() for d in diag]
    _, char_vec = kappa_linear_solve(gbar, sqrt_diag)
    if char_vec is None:
        raise RuntimeError(
            "characteristic vector missing: diagonal square roots must lie "
            "in the image of the polar form")
    w = KappaSubspace.span(list(x.rows) + [char_vec], n)

    if b.dim:
        pairing = [[_polar_bar(gbar, u, v, desc) for v in b.rows] for u in b.rows]
        y_coords, _ = kappa_linear_solve(pairing, ncols=b.dim)
        y_vecs = [_combine(b.rows, c, desc, n) for c in y_coords]
    else:
        y_vecs = []
    y = KappaSubspace.span(y_vecs, n)

    if y.dim:
        functional = [[_qbar(gram, vec, desc).sqrt() for vec in y.rows]]
        z_coords, _ = kappa_linear_solve(functional, ncols=y.dim)
        z_vecs = [_combine(y.rows, c, desc, n) for c in z_coords]
    else:
        z_vecs = []
    z = KappaSubspace.span(z_vecs, n)

    v_basis = []
    seen = KappaSubspace.span(list(z.rows), n)
    for vec in b.rows:
        if seen.contains(vec):
            continue
        v_basis.append(vec)
        seen = KappaSubspace.span(list(seen.rows) + [vec], n)
    polar = tuple(
        tuple(_polar_bar(gbar, u, v, desc) for v in v_basis) for u in v_basis)
    values = tuple(_qbar(gram, vec, desc) for vec in v_basis)
    k = len(v_basis)
    if k % 2:
        kind = "odd-dim"
    elif k == 0:
        kind = "even-split"
    else:
        kind = "even-" + arf_class(polar, values)
    residue = ResidueSpace(i, k, tuple(tuple(v) for v in v_basis),
                           polar, values, kind)
    return ScaleChain(desc, i, exps, b, w, x, y, z, residue)


def chain_compute(symbol: JordanSymbol) -> ChainLattices:
    scales = [c.scale for c in symbol.constituents]
    window = tuple(range(min(scales) - 1, max(scales) + 2))
    return ChainLattices(
        symbol.descriptor, symbol.rank, window,
        tuple(_scale_chain(symbol, i) for i in window))


# -- Arf classification --------------------------------------------------


def _q_of_coords(coords, polar, values, desc: RingDescriptor) -> KappaElem:
    acc = desc.kappa(0)
    m = len(values)
    for r in range(m):
        if coords[r]:
            acc = acc + coords[r] * coords[r] * values[r]
    for r in range(m):
        if not coords[r]:
            continue
        for s in range(r + 1, m):
            if coords[s]:
                acc = acc + coords[r] * coords[s] * polar[r][s]
    return acc


def arf_class(polar, values) -> str:
    """Arf invariant of a nonsingular even-dimensional form over kappa.

    The form is given by its polar Gram matrix and the values on the
    basis vectors; split means Arf invariant of trace zero.
    """
    dim = len(values)
    if dim % 2:
        raise OddDimension("Arf class needs an even-dimensional form")
    if dim == 0:
        return "split"
    desc = values[0].desc
    zero = desc.kappa(0)

    def pairing(u, v):
        acc = zero
        for r, ur in enumerate(u):
            if not ur:
                continue
            for s, vs in enumerate(v):
                if vs:
                    acc = acc + ur * polar[r][s] * vs
        return acc

    basis = [tuple(desc.kappa(1) if k == j else zero for k in range(dim))
             for j in range(dim)]
    total = zero
    while basis:
        u = basis.pop(0)
        partner = None
        for idx, v in enumerate(basis):
            m = pairing(u, v)
            if m:
                partner = idx
                break
        if partner is None:
            raise ValueError("polar form is degenerate")
        v = basis.pop(partner)
        inv = pairing(u, v).inverse()
        v = tuple(inv * c for c in v)
        reduced = []
        for wv in basis:
            a = pairing(wv, v)
            bcoef = pairing(wv, u)
            nw = tuple(c + a * cu + bcoef * cv
                       for c, cu, cv in zip(wv, u, v))
            reduced.append(nw)
        basis = reduced
        total = total + (_q_of_coords(u, polar, values, desc)
                         * _q_of_coords(v, polar, values, desc))
    return "split" if total.trace() == 0 else "nonsplit"


def arf_class_by_count(polar, values) -> str:
    """Classify by counting zeros; exhaustive, for cross-checks only."""
    dim = len(values)
    if dim % 2:
        raise OddDimension("Arf class needs an even-dimensional form")
    if dim == 0:
        return "split"
    desc = values[0].desc
    q = desc.residue_size
    if q ** dim > 1 << 16:
        raise ValueError("zero count too large; use arf_class")
    m = dim // 2
    zeros = 0
    for bits in itertools.product(range(q), repeat=dim):
        coords = tuple(desc.kappa(x) for x in bits)
        if not _q_of_coords(coords, polar, values, desc):
            zeros += 1
    split_count = q ** (dim - 1) + (q - 1) * q ** (m - 1)
    nonsplit_count = q ** (dim - 1) - (q - 1) * q ** (m - 1)
    if zeros == split_count:
        return "split"
    if zeros == nonsplit_count:
        return "nonsplit"
    raise ValueError(f"zero count {zeros} matches neither class")


# -- constituent types and component counts ------------------------------


@dataclass(frozen=True)
class ConstituentType:
    scale: int
    rank: int
    parity: str
    fine: str  # "Io" | "Ie1" | "Ie2" | "Ie" | "II"
    bound: bool


def classify(symbol: JordanSymbol, chain: ChainLattices) -> list[ConstituentType]:
    by_scale = {c.scale: c for c in symbol.constituents}
    out = []
    for c in symbol.constituents:
        par = c.parity
        bound = any(
            by_scale[c.scale + step].parity == "I"
            for step in (-1, 1) if c.scale + step in by_scale)
        if par == "II":
            fine = "II"
        elif c.rank % 2:
            fine = "Io"
        elif bound:
            fine = "Ie"
        else:
            k = chain.at(c.scale).residue.dimension
            fine = "Ie1" if k % 2 else "Ie2"
        out.append(ConstituentType(c.scale, c.rank, par, fine, bound))
    return out


def expected_residue_dimension(t: ConstituentType) -> int:
    """Residue space dimension predicted from the type alone."""
    if t.bound:
        if t.parity == "II":
            return t.rank + 1
        return t.rank if t.rank % 2 else t.rank - 1
    if t.parity == "II":
        return t.rank
    if t.fine == "Ie2":
        return t.rank - 2
    return t.rank - 1  # Io and Ie1


def alpha(types) -> int:
    """Number of free constituents of the first even kind."""
    return sum(1 for t in types if t.fine == "Ie1" and not t.bound)


def beta_from_parities(parities: dict[int, str]) -> int:
    """Scales j of parity I whose scale j+2 neighbor is parity II."""
    return sum(1 for j, p in parities.items()
               if p == "I" and parities.get(j + 2, "II") == "II")


def beta_runs_from_parities(parities: dict[int, str]) -> int:
    """Maximal runs of parity I inside each mod-2 class of scales."""
    if not parities:
        return 0
    lo, hi = min(parities), max(parities)
    total = 0
    for cls in (0, 1):
        prev = "II"
        for j in range(lo, hi + 1):
            if j % 2 != cls:
                continue
            cur = parities.get(j, "II")
            if cur == "I" and prev == "II":
                total += 1
            prev = cur
    return total


def _parity_map(types) -> dict[int, str]:
    return {t.scale: t.parity for t in types}


def beta(types) -> int:
    return beta_from_parities(_parity_map(types))


def beta_run_count(types) -> int:
    return beta_runs_from_parities(_parity_map(types))


# -- report ---------------------------------------------------------------


@dataclass(frozen=True)
class ChainRow:
    scale: int
    rank: int
    parity: str
    fine: str
    bound: bool
    dim_vbar: int
    vbar_class: str

    def to_json_dict(self) -> dict:
        return {
            "i": self.scale,
            "n_i": self.rank,
            "parity": self.parity,
            "type": self.fine,
            "bound": self.bound,
            "dimVbar": self.dim_vbar,
            "vbarClass": self.vbar_class,
        }


@dataclass(frozen=True)
class ChainReport:
    descriptor: RingDescriptor
    rank: int
    rows: tuple[ChainRow, ...]
    alpha: int
    beta: int

    def to_json_dict(self) -> dict:
        return {
            "scales": [r.to_json_dict() for r in self.rows],
            "alpha": self.alpha,
            "beta": self.beta,
        }


def chain_report(L) -> ChainReport:
    """Full per-scale report for a lattice or a Jordan splitting."""
    symbol = jordan_split(L) if isinstance(L, QuadLattice) else L
    chain = chain_compute(symbol)
    types = classify(symbol, chain)
    by_scale = {t.scale: t for t in types}
    rows = []
    for i in chain.window:
        res = chain.at(i).residue
        t = by_scale.get(i)
        if t is not None:
            rows.append(ChainRow(i, t.rank, t.parity, t.fine, t.bound,
                                 res.dimension, res.kind))
        else:
            bound = any(
                by_scale[i + step].parity == "I"
                for step in (-1, 1) if i + step in by_scale)
            rows.append(ChainRow(i, 0, "II", "II", bound,
                                 res.dimension, res.kind))
    return ChainReport(symbol.descriptor, symbol.rank, tuple(rows),
                       alpha(types), beta(types))
