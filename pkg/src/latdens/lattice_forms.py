"""Gram-matrix model of quadratic lattices over the 2-adic base ring.

The Gram matrix stores the bilinear pairing, with diagonal entries
<e_j, e_j> = q(e_j); the value of the form on a coordinate vector v is
v^T G v.  Provides the elementary ideals (scale, norm, discriminant),
a deterministic Jordan splitting, and a constructive normal form for
unimodular blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .base_ring import (
    PrecisionExhausted,
    RingDescriptor,
    RingElem,
    lift,
    unit_sqrt_mod2,
)

Matrix = tuple[tuple[RingElem, ...], ...]

_PEEL_MARGIN = 4  # valuation headroom kept when refining isotropic vectors


def _coerce_rows(descriptor: RingDescriptor, rows) -> Matrix:
    out = []
    for row in rows:
        out.append(tuple(descriptor.elem(v) for v in row))
    return tuple(out)


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    rows = len(a)
    inner = len(b)
    cols = len(b[0]) if inner else 0
    out = []
    for i in range(rows):
        line = []
        for j in range(cols):
            acc = a[i][0] * b[0][j]
            for k in range(1, inner):
                acc = acc + a[i][k] * b[k][j]
            line.append(acc)
        out.append(tuple(line))
    return tuple(out)


def _transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def _identity(descriptor: RingDescriptor, n: int) -> list[list[RingElem]]:
    one, zero = descriptor.one(), descriptor.zero()
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def _pairing(gram: Sequence[Sequence[RingElem]], u, v) -> RingElem:
    n = len(gram)
    acc = None
    for i in range(n):
        if u[i].kind == "zero":
            continue
        for j in range(n):
            if v[j].kind == "zero":
                continue
            term = u[i] * gram[i][j] * v[j]
            acc = term if acc is None else acc + term
    if acc is None:
        return gram[0][0].desc.zero()
    return acc


def _form(gram, v) -> RingElem:
    return _pairing(gram, v, v)


def _det(descriptor: RingDescriptor, gram) -> RingElem:
    """Determinant by elimination at the minimum-valuation pivot."""
    n = len(gram)
    work = [[e for e in row] for row in gram]
    row_act = list(range(n))
    col_act = list(range(n))
    acc = descriptor.one()
    pivots = []
    while row_act:
        best = None
        for r in row_act:
            for c in col_act:
                e = work[r][c]
                if e.kind != "unit":
                    continue
                key = (e.scale, r, c)
                if best is None or key < best:
                    best = key
        if best is None:
            if all(work[r][c].kind == "zero" for r in row_act for c in col_act):
                return descriptor.zero()
            raise PrecisionExhausted(
                "determinant pivot indistinguishable from zero at working precision")
        _, pr, pc = best
        piv = work[pr][pc]
        acc = acc * piv
        pivots.append((pr, pc))
        row_act.remove(pr)
        col_act.remove(pc)
        for r in row_act:
            f = work[r][pc] / piv
            if f.kind == "zero":
                continue
            for c in col_act:
                work[r][c] = work[r][c] - f * work[pr][c]
    order = [p[0] for p in sorted(pivots, key=lambda p: p[1])]
    inversions = sum(
        1
        for i in range(len(order))
        for j in range(i + 1, len(order))
        if order[i] > order[j]
    )
    return -acc if inversions & 1 else acc


def _min_valuation(entries, shift: int = 0) -> int | None:
    """Minimum valuation over entries, counting each entry at val+shift.

    Exact zeros are skipped; an undecidable near-zero below the current
    minimum raises.  Returns None when every entry is exactly zero.
    """
    best = None
    nears = []
    for e in entries:
        if e.kind == "unit":
            v = e.scale + shift
            if best is None or v < best:
                best = v
        elif e.kind == "near":
            nears.append(e.scale + shift)
    for v in nears:
        if best is None or v < best:
            raise PrecisionExhausted(
                "ideal valuation undecidable: entry indistinguishable from zero")
    return best


@dataclass(frozen=True)
class QuadLattice:
    """A nondegenerate quadratic lattice given by its Gram matrix."""

    descriptor: RingDescriptor
    gram: Matrix

    def __post_init__(self):
        n = len(self.gram)
        if n == 0:
            raise ValueError("empty Gram matrix")
        for row in self.gram:
            if len(row) != n:
                raise ValueError("Gram matrix must be square")
            for e in row:
                if not isinstance(e, RingElem):
                    raise TypeError("Gram entries must be ring elements")
        for i in range(n):
            for j in range(i + 1, n):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("asymmetric Gram matrix")
        d = self.det
        if d.kind == "zero":
            raise ValueError("degenerate lattice: zero determinant")

    @classmethod
    def from_entries(cls, descriptor: RingDescriptor, rows) -> "QuadLattice":
        return cls(descriptor, _coerce_rows(descriptor, rows))

    @property
    def n(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> RingElem:
        return _det(self.descriptor, self.gram)

    def form(self, vec) -> RingElem:
        v = [self.descriptor.elem(x) for x in vec]
        return _form(self.gram, v)

    def pairing(self, u, v) -> RingElem:
        a = [self.descriptor.elem(x) for x in u]
        b = [self.descriptor.elem(x) for x in v]
        return _pairing(self.gram, a, b)

    def scaled(self, k: int) -> "QuadLattice":
        rows = tuple(tuple(e.shifted(k) for e in row) for row in self.gram)
        return QuadLattice(self.descriptor, rows)

    def transformed(self, t) -> "QuadLattice":
        """Lattice with Gram T^T G T; T must be invertible over the ring."""
        tm = _coerce_rows(self.descriptor, t)
        td = _det(self.descriptor, tm)
        if td.kind != "unit" or td.scale != 0:
            raise ValueError("base change matrix is not unimodular")
        g = _mat_mul(_transpose(tm), _mat_mul(self.gram, tm))
        rows = [list(r) for r in g]
        for i in range(len(rows)):
            for j in range(i + 1, len(rows)):
                rows[j][i] = rows[i][j]
        return QuadLattice(self.descriptor, tuple(tuple(r) for r in rows))


def _gram_of(block) -> Matrix:
    if isinstance(block, QuadLattice):
        return block.gram
    if isinstance(block, JordanConstituent):
        return block.gram
    return tuple(tuple(row) for row in block)


def norm_ideal(L) -> int:
    """Valuation of the norm ideal, generated by the values q(x)."""
    gram = _gram_of(L)
    n = len(gram)
    diag = _min_valuation([gram[i][i] for i in range(n)])
    off = _min_valuation(
        [gram[i][j] for i in range(n) for j in range(n) if i != j], shift=1)
    cands = [v for v in (diag, off) if v is not None]
    if not cands:
        raise ValueError("norm ideal of the zero form")
    return min(cands)


def scale_ideal(L) -> int:
    """Valuation of the scale ideal, generated by all pairings."""
    gram = _gram_of(L)
    v = _min_valuation([e for row in gram for e in row])
    if v is None:
        raise ValueError("scale ideal of the zero form")
    return v


def discriminant(L: QuadLattice) -> tuple[int, int | tuple[int, ...]]:
    """Determinant split as 2^v * u, with u reported modulo 8."""
    d = L.det if isinstance(L, QuadLattice) else _det_of_block(L)
    v = d.valuation()
    u = d.shifted(-v)
    if u.prec < 3:
        raise PrecisionExhausted("unit part of the determinant known below mod 8")
    coeffs = u.integer_coeffs(3)
    return (v, coeffs[0] if len(coeffs) == 1 else coeffs)


def _det_of_block(block) -> RingElem:
    gram = _gram_of(block)
    return _det(gram[0][0].desc, gram)


def parity_type(U) -> str:
    """Type I when the block takes unit values, type II otherwise."""
    return "I" if norm_ideal(U) == 0 else "II"


@dataclass(frozen=True)
class JordanConstituent:
    scale: int
    rank: int
    gram: Matrix  # unimodular block, the 2^scale factor removed

    @property
    def parity(self) -> str:
        return parity_type(self.gram)


@dataclass(frozen=True)
class JordanSymbol:
    descriptor: RingDescriptor
    constituents: tuple[JordanConstituent, ...]
    basis: Matrix  # columns express the new basis in input coordinates
    source: Matrix

    @property
    def rank(self) -> int:
        return sum(c.rank for c in self.constituents)

    @property
    def shape(self) -> tuple[tuple[int, int, str], ...]:
        return tuple((c.scale, c.rank, c.parity) for c in self.constituents)

    def scales(self) -> list[int]:
        return [c.scale for c in self.constituents]

    def assembled(self) -> Matrix:
        zero = self.descriptor.zero()
        n = self.rank
        rows = [[zero] * n for _ in range(n)]
        offset = 0
        for c in self.constituents:
            for i in range(c.rank):
                for j in range(c.rank):
                    rows[offset + i][offset + j] = c.gram[i][j].shifted(c.scale)
            offset += c.rank
        return tuple(tuple(r) for r in rows)

    def verify(self, bits: int | None = None) -> bool:
        """Check basis^T source basis = assembly entrywise mod 2^bits."""
        if bits is None:
            bits = self.descriptor.precision - 4
        got = _mat_mul(_transpose(self.basis), _mat_mul(self.source, self.basis))
        want = self.assembled()
        n = self.rank
        for i in range(n):
            for j in range(n):
                if not got[i][j].congruent_mod(want[i][j], bits):
                    return False
        return True


def jordan_split(L: QuadLattice) -> JordanSymbol:
    """Split L into an orthogonal sum of 2^i-modular pieces.

    Pivot rule: among entries of minimal valuation prefer diagonal ones
    (smallest index first); otherwise split off the lexicographically
    first off-diagonal pair as a rank-2 cell.
    """
    desc = L.descriptor
    n = L.n
    work = [[e for e in row] for row in L.gram]
    basis = _identity(desc, n)
    active = list(range(n))
    cells: list[tuple[int, list[int]]] = []

    def col_sub(t: int, p: int, f: RingElem):
        for r in range(n):
            basis[r][t] = basis[r][t] - f * basis[r][p]

    while active:
        minv = None
        for i in active:
            for j in active:
                e = work[i][j]
                if e.kind == "unit" and (minv is None or e.scale < minv):
                    minv = e.scale
        if minv is None:
            if all(work[i][j].kind == "zero" for i in active for j in active):
                raise ValueError("degenerate block in Jordan splitting")
            raise PrecisionExhausted(
                "Jordan pivot indistinguishable from zero at working precision")
        diag = [i for i in active
                if work[i][i].kind == "unit" and work[i][i].scale == minv]
        if diag:
            p = min(diag)
            piv = work[p][p]
            rest = [t for t in active if t != p]
            fs = {}
            for t in rest:
                f = work[t][p] / piv
                fs[t] = f
                if f.kind != "zero":
                    col_sub(t, p, f)
            old_row = {u: work[p][u] for u in rest}
            for t in rest:
                if fs[t].kind == "zero":
                    continue
                for u in rest:
                    work[t][u] = work[t][u] - fs[t] * old_row[u]
            for a_ in range(len(rest)):
                for b_ in range(a_ + 1, len(rest)):
                    work[rest[b_]][rest[a_]] = work[rest[a_]][rest[b_]]
            cells.append((minv, [p]))
            active.remove(p)
        else:
            pair = None
            for i in active:
                for j in active:
                    if i < j and work[i][j].kind == "unit" and work[i][j].scale == minv:
                        pair = (i, j)
                        break
                if pair:
                    break
            i, j = pair
            a, b, m = work[i][i], work[j][j], work[i][j]
            delta = a * b - m * m
            rest = [t for t in active if t not in (i, j)]
            old_i = {u: work[i][u] for u in rest}
            old_j = {u: work[j][u] for u in rest}
            coef = {}
            for t in rest:
                x = (b * old_i[t] - m * old_j[t]) / delta
                y = (a * old_j[t] - m * old_i[t]) / delta
                coef[t] = (x, y)
                if x.kind != "zero":
                    col_sub(t, i, x)
                if y.kind != "zero":
                    col_sub(t, j, y)
            for t in rest:
                x, y = coef[t]
                for u in rest:
                    work[t][u] = work[t][u] - x * old_i[u] - y * old_j[u]
            for a_ in range(len(rest)):
                for b_ in range(a_ + 1, len(rest)):
                    work[rest[b_]][rest[a_]] = work[rest[a_]][rest[b_]]
            cells.append((minv, [i, j]))
            active.remove(i)
            active.remove(j)

    cells.sort(key=lambda c: c[0])  # stable: extraction order within a scale
    constituents = []
    order: list[int] = []
    k = 0
    while k < len(cells):
        scale = cells[k][0]
        idxs: list[list[int]] = []
        while k < len(cells) and cells[k][0] == scale:
            idxs.append(cells[k][1])
            k += 1
        rank = sum(len(c) for c in idxs)
        zero = desc.zero()
        block = [[zero] * rank for _ in range(rank)]
        pos = 0
        for cell in idxs:
            for a_, ia in enumerate(cell):
                for b_, ib in enumerate(cell):
                    block[pos + a_][pos + b_] = work[ia][ib].shifted(-scale)
            order.extend(cell)
            pos += len(cell)
        constituents.append(
            JordanConstituent(scale, rank, tuple(tuple(r) for r in block)))
    perm_basis = tuple(
        tuple(basis[r][c] for c in order) for r in range(n))
    return JordanSymbol(desc, tuple(constituents), perm_basis, L.gram)


# ---------------------------------------------------------------------------
# normal form of a unimodular block


@dataclass(frozen=True)
class UnimodularProfile:
    """Orthogonal decomposition data of a unimodular block.

    planes counts hyperbolic planes [[0,1],[1,0]].  For parity I the
    remaining summands are an optional block [[2,1],[1,lam]] and a
    mandatory odd part: either a single vector of value eps, or a pair
    with Gram [[eps,1],[1,2*gamma]] (eps = 1 mod 2).  For parity II the
    leftover is a terminal pair [[a,1],[1,b]] with a, b in (2).
    """

    descriptor: RingDescriptor
    parity: str
    rank: int
    planes: int
    k_lambda: RingElem | None
    kprime_eps: RingElem | None
    kprime_gamma: RingElem | None
    terminal: tuple[RingElem, RingElem] | None

    @property
    def norm_valuation(self) -> int:
        return 0 if self.parity == "I" else 1

    @property
    def weight_valuation(self) -> int:
        return 1

    @property
    def weight_ideal_valuation(self) -> int:
        return 0 if self.parity == "I" else 1

    @property
    def eps_mod8(self):
        return _report(self.kprime_eps, 3)

    @property
    def gamma_mod2(self):
        return _report(self.kprime_gamma, 1)

    @property
    def lambda_mod4(self):
        return _report(self.k_lambda, 2)

    @property
    def terminal_mod4(self):
        if self.terminal is None:
            return None
        return (_report(self.terminal[0], 2), _report(self.terminal[1], 2))

    def assembled_gram(self) -> Matrix:
        desc = self.descriptor
        zero, one = desc.zero(), desc.one()
        blocks: list[Matrix] = []
        for _ in range(self.planes):
            blocks.append(((zero, one), (one, zero)))
        if self.k_lambda is not None:
            blocks.append(((desc.elem(2), one), (one, self.k_lambda)))
        if self.kprime_eps is not None:
            if self.kprime_gamma is None:
                blocks.append(((self.kprime_eps,),))
            else:
                blocks.append(((self.kprime_eps, one),
                               (one, self.kprime_gamma.shifted(1))))
        if self.terminal is not None:
            a, b = self.terminal
            blocks.append(((a, one), (one, b)))
        n = sum(len(b) for b in blocks)
        rows = [[zero] * n for _ in range(n)]
        off = 0
        for b in blocks:
            for i in range(len(b)):
                for j in range(len(b)):
                    rows[off + i][off + j] = b[i][j]
            off += len(b)
        return tuple(tuple(r) for r in rows)

    def assembled_lattice(self) -> QuadLattice:
        return QuadLattice(self.descriptor, self.assembled_gram())


def _report(e: RingElem | None, bits: int):
    if e is None:
        return None
    coeffs = e.integer_coeffs(bits)
    return coeffs[0] if len(coeffs) == 1 else coeffs


def unit_square_class_is_trivial(x: RingElem) -> bool:
    """Certified test: is the unit x a square in the ring?

    Uses x = s^2 (1 + 4a) with the residue trace of a deciding the
    class of the 1 + 4a factor.
    """
    if x.kind != "unit" or x.scale != 0:
        raise ValueError("square class test needs a unit of valuation 0")
    s0 = unit_sqrt_mod2(x)
    r = x / (s0 * s0)
    d = r - x.desc.one()
    if d.kind == "zero":
        return True
    if d.kind == "unit" and d.scale < 2:
        return False
    if d.scale < 2:
        raise PrecisionExhausted("square class undecidable at working precision")
    return d.shifted(-2).residue().trace() == 0


def _first_unit_index(vals: Sequence[RingElem]) -> int | None:
    for i, e in enumerate(vals):
        if e.kind == "unit" and e.scale == 0:
            return i
    return None


class _Reducer:
    """Working state for the constructive unimodular normal form."""

    def __init__(self, descriptor: RingDescriptor, gram: Matrix):
        self.desc = descriptor
        self.gram = [list(r) for r in gram]
        self.target = descriptor.precision - _PEEL_MARGIN

    @property
    def n(self) -> int:
        return len(self.gram)

    def basis_vec(self, i: int) -> list[RingElem]:
        zero = self.desc.zero()
        v = [zero] * self.n
        v[i] = self.desc.one()
        return v

    def pair(self, u, v) -> RingElem:
        return _pairing(self.gram, u, v)

    def form(self, v) -> RingElem:
        return _form(self.gram, v)

    def strip_diagonal_unit(self) -> RingElem | None:
        """Remove the first unit-valued basis vector, returning its value."""
        p = None
        for i in range(self.n):
            e = self.gram[i][i]
            if e.kind == "unit" and e.scale == 0:
                p = i
                break
        if p is None:
            return None
        piv = self.gram[p][p]
        rest = [t for t in range(self.n) if t != p]
        fs = {t: self.gram[t][p] / piv for t in rest}
        old = {u: self.gram[p][u] for u in rest}
        new = [[self.gram[t][u] - fs[t] * old[u] for u in rest] for t in rest]
        for a in range(len(rest)):
            for b in range(a + 1, len(rest)):
                new[b][a] = new[a][b]
        self.gram = new
        return piv

    def strip_block(self, v, w):
        """Remove the unimodular rank-2 block spanned by v and w."""
        p1 = _first_unit_index(v)
        assert p1 is not None, "block vector is not primitive"
        w = [wi - (w[p1] / v[p1]) * vi for wi, vi in zip(w, v)]
        p2 = _first_unit_index([e if k != p1 else self.desc.zero()
                                for k, e in enumerate(w)])
        assert p2 is not None, "plane completion is not primitive"
        a = self.form(v)
        b = self.form(w)
        m = self.pair(v, w)
        delta = a * b - m * m
        rest = [t for t in range(self.n) if t not in (p1, p2)]
        cv = {t: self.pair(v, self.basis_vec(t)) for t in rest}
        cw = {t: self.pair(w, self.basis_vec(t)) for t in rest}
        zs = {}
        for t in rest:
            x = (b * cv[t] - m * cw[t]) / delta
            y = (a * cw[t] - m * cv[t]) / delta
            zs[t] = (x, y)
        new = []
        for t in rest:
            row = []
            xt, yt = zs[t]
            for u in rest:
                row.append(self.gram[t][u] - xt * cv[u] - yt * cw[u])
            new.append(row)
        for a_ in range(len(rest)):
            for b_ in range(a_ + 1, len(rest)):
                new[b_][a_] = new[a_][b_]
        self.gram = new

    def isotropic_vector(self) -> list[RingElem]:
        """Primitive vector with q(v) = 0 to working precision.

        Requires the current block to be parity II of rank >= 3.
        """
        desc = self.desc
        n = self.n
        pair_idx = None
        for i in range(n):
            for j in range(i + 1, n):
                e = self.gram[i][j]
                if e.kind == "unit" and e.scale == 0:
                    pair_idx = (i, j)
                    break
            if pair_idx:
                break
        if pair_idx is None:
            raise ValueError("no unit pairing in a parity II block")
        i, j = pair_idx
        t0 = next(t for t in range(n) if t not in (i, j))
        a, b, m = self.gram[i][i], self.gram[j][j], self.gram[i][j]
        delta = a * b - m * m
        ct_i = self.gram[i][t0]
        ct_j = self.gram[j][t0]
        x0 = (b * ct_i - m * ct_j) / delta
        y0 = (a * ct_j - m * ct_i) / delta
        y = self.basis_vec(t0)
        y[i] = y[i] - x0
        y[j] = y[j] - y0
        c = self.form(y)
        # residue equation (a/2) X^2 + m X Z + (b/2) Z^2 = c/2 over kappa
        abar = a.shifted(-1).residue()
        bbar = b.shifted(-1).residue()
        mbar = m.residue()
        cbar = c.shifted(-1).residue()
        q = desc.residue_size
        sol = None
        for xb in range(q):
            X = desc.kappa(xb)
            for zb in range(q):
                Z = desc.kappa(zb)
                if (abar * X * X + mbar * X * Z + bbar * Z * Z + cbar).is_zero:
                    sol = (X, Z)
                    break
            if sol:
                break
        assert sol is not None, "binary residue form failed to represent the target"
        X, Z = sol
        v = list(y)
        v[i] = v[i] + lift(X)
        v[j] = v[j] + lift(Z)
        qv = self.form(v)
        assert qv.valuation_at_least(2)
        for _ in range(80):
            if qv.kind != "unit" or qv.scale >= self.target:
                break
            s = None
            for t in range(n):
                p = self.pair(v, self.basis_vec(t))
                if p.kind == "unit" and p.scale == 0:
                    s = (t, p)
                    break
            assert s is not None, "isotropic candidate lost primitivity"
            t, p = s
            step = -(qv.shifted(-1) / p)
            v[t] = v[t] + step
            qv = self.form(v)
        else:
            raise PrecisionExhausted("isotropic refinement failed to converge")
        return v

    def peel_plane(self):
        """Split off one hyperbolic plane from a parity II block."""
        v = self.isotropic_vector()
        s = None
        for t in range(self.n):
            p = self.pair(v, self.basis_vec(t))
            if p.kind == "unit" and p.scale == 0:
                s = (t, p)
                break
        assert s is not None, "isotropic vector is not primitive"
        t, p = s
        w = [e / p for e in self.basis_vec(t)]
        c = self.pair(w, w)
        half = c.shifted(-1)
        w = [wi - half * vi for wi, vi in zip(w, v)]
        self.strip_block(v, w)


def _residue_normalize(u: RingElem) -> RingElem:
    """Scale the value of a unit vector into 1 + 2A."""
    s0 = unit_sqrt_mod2(u)
    return u / (s0 * s0)


def _pair_to_kprime(eps1: RingElem, eps2: RingElem) -> tuple[RingElem, RingElem]:
    """Fold diag(eps1, eps2), both of residue 1, into a pair block.

    Basis g1 = e1, g2 = (e1 + e2)/eps1 has Gram [[eps1, 1], [1, 2*gamma]]
    with gamma = (eps1 + eps2)/(2*eps1^2), integral because the residues
    cancel.
    """
    gamma = ((eps1 + eps2) / (eps1 * eps1)).shifted(-1)
    return eps1, gamma


def _terminal_normalize(gram) -> tuple[RingElem, RingElem]:
    m = gram[0][1]
    a = gram[0][0]
    b = gram[1][1] / (m * m)
    try:
        va = a.valuation()
    except PrecisionExhausted:
        va = None
    try:
        vb = b.valuation()
    except PrecisionExhausted:
        vb = None
    if va is None or (vb is not None and vb < va):
        a, b = b, a
    return a, b


def _terminal_to_k(desc: RingDescriptor, a: RingElem, b: RingElem) -> RingElem:
    """Parameter lam with [[2,1],[1,lam]] in the class of [[a,1],[1,b]]."""
    d = a * b - desc.one()
    for bits in range(desc.residue_size):
        lam = lift(desc.kappa(bits)).shifted(1)
        cand = lam.shifted(1) - desc.one()
        if unit_square_class_is_trivial(cand / d):
            return lam
    raise RuntimeError("no matching parameter for the even terminal block")


def unimodular_normal_form(U, descriptor: RingDescriptor | None = None) -> UnimodularProfile:
    """Constructive orthogonal decomposition of a unimodular block.

    Reduction order: strip unit-valued basis vectors, fold the stripped
    values three at a time from the end of the list, peel hyperbolic
    planes from the even part, then classify the rank <= 2 leftovers.
    """
    if isinstance(U, QuadLattice):
        desc, gram = U.descriptor, U.gram
    elif isinstance(U, JordanConstituent):
        desc, gram = U.gram[0][0].desc, U.gram
    else:
        if descriptor is None:
            raise ValueError("descriptor required for a raw Gram block")
        desc, gram = descriptor, _coerce_rows(descriptor, U)
    n = len(gram)
    if scale_ideal(gram) != 0:
        raise ValueError("block is not unimodular: nonzero scale")
    d = _det(desc, gram)
    if d.kind != "unit" or d.scale != 0:
        raise ValueError("block is not unimodular: determinant not a unit")
    if desc.precision < 8 + 4 * n:
        raise PrecisionExhausted(
            f"normal form needs precision >= {8 + 4 * n}, have {desc.precision}")

    red = _Reducer(desc, gram)
    units: list[RingElem] = []
    while True:
        u = red.strip_diagonal_unit()
        if u is None:
            break
        # (u) = (u / s^2) after rescaling the basis vector; keeping every
        # stripped value in 1 + 2A makes all later sums of two of them even.
        units.append(_residue_normalize(u))
    parity = "I" if units else "II"

    pool: list[Matrix] = []
    if red.n:
        pool.append(tuple(tuple(r) for r in red.gram))
    while len(units) >= 3:
        ua, ub, uc = units[-3], units[-2], units[-1]
        eps_new = ua * (1 + ua / ub + ua / uc)
        block = ((ub + uc, desc.one()),
                 (desc.one(), (ua + ub) / (ub * ub)))
        units[-3:] = [eps_new]
        pool.append(block)

    planes = 0
    terminal: tuple[RingElem, RingElem] | None = None
    if pool:
        total = sum(len(b) for b in pool)
        zero = desc.zero()
        rows = [[zero] * total for _ in range(total)]
        off = 0
        for b in pool:
            for i_ in range(len(b)):
                for j_ in range(len(b)):
                    rows[off + i_][off + j_] = b[i_][j_]
            off += len(b)
        red = _Reducer(desc, tuple(tuple(r) for r in rows))
        while red.n >= 3:
            red.peel_plane()
            planes += 1
        if red.n == 2:
            a, b = _terminal_normalize(red.gram)
            if unit_square_class_is_trivial(desc.one() - a * b):
                planes += 1
            else:
                terminal = (a, b)

    k_lambda = None
    kprime_eps = None
    kprime_gamma = None
    if units:
        if terminal is not None:
            k_lambda = _terminal_to_k(desc, terminal[0], terminal[1])
            terminal = None
        if len(units) == 1:
            kprime_eps = units[0]
        else:
            kprime_eps, kprime_gamma = _pair_to_kprime(units[0], units[1])

    used = 2 * planes + (2 if k_lambda is not None else 0) \
        + (2 if terminal is not None else 0)
    if kprime_eps is not None:
        used += 1 if kprime_gamma is None else 2
    if used != n:
        raise RuntimeError(f"normal form rank bookkeeping failed: {used} != {n}")
    return UnimodularProfile(
        descriptor=desc, parity=parity, rank=n, planes=planes,
        k_lambda=k_lambda, kprime_eps=kprime_eps, kprime_gamma=kprime_gamma,
        terminal=terminal)
