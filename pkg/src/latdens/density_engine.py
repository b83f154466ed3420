"""Local density of a 2-adic quadratic lattice from its residue chain.

Three ingredients are assembled: valuation exponents read off the Jordan
splitting, the order of the special fiber of the smooth group model
(unipotent radical, finite orthogonal factors, component group), and the
normalization

    density = (1/2) * q^(N - n(n-1)/2) * order,

where q is the residue field cardinality and N collects the exponents.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .invariant_chain import ChainReport, chain_report
from .lattice_forms import JordanSymbol, QuadLattice, jordan_split


class NegativeUnipotentDim(ValueError):
    """The unipotent radical came out with negative dimension."""


def _is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    p = 2
    while p * p <= q:
        if q % p == 0:
            while q % p == 0:
                q //= p
            return q == 1
        p += 1
    return True


def finite_orthogonal_order(kind: str, m: int, q: int) -> int:
    """Order of the finite orthogonal group of a residue factor.

    m is the half-dimension: kind "odd-dim" means a space of dimension
    2m+1, the even kinds dimension 2m.  For even q the connected group
    order #SO is returned (the full group coincides with it in odd
    dimension and is twice it in even dimension); for odd q the full
    orthogonal group order, with the sign of the even form picked by
    kind ("even-split" is the plus type).
    """
    if not isinstance(m, int) or m < 0:
        raise ValueError(f"invalid half-dimension {m!r}")
    if not _is_prime_power(q):
        raise ValueError(f"residue cardinality {q} is not a prime power")
    if kind == "odd-dim":
        base = q ** (m * m)
        for i in range(1, m + 1):
            base *= q ** (2 * i) - 1
        return base if q % 2 == 0 else 2 * base
    if kind not in ("even-split", "even-nonsplit"):
        raise ValueError(f"unknown factor kind {kind!r}")
    if m == 0:
        if kind == "even-nonsplit":
            raise ValueError("a zero-dimensional space has no nonsplit form")
        return 1
    sign = -1 if kind == "even-split" else 1
    base = q ** (m * (m - 1)) * (q ** m + sign)
    for i in range(1, m):
        base *= q ** (2 * i) - 1
    return base if q % 2 == 0 else 2 * base


@dataclass(frozen=True)
class ExponentReport:
    """Valuation bookkeeping for the two volume forms.

    d holds (scale, scale*rank*(rank+1)/2) per constituent; cross is the
    sum of i*n_i*n_j over pairs of scales i < j.  The headline number is
    n = n_q - n_m.
    """

    t: int
    b: int
    c: int
    d: tuple[tuple[int, int], ...]
    cross: int
    n_m: int
    n_q: int
    n: int

    def to_json_dict(self) -> dict:
        return {"t": self.t, "b": self.b, "c": self.c,
                "NM": self.n_m, "NQ": self.n_q, "N": self.n}


def exponents(symbol: JordanSymbol, types=None) -> ExponentReport:
    """Exponent data of a Jordan splitting; scales may be negative."""
    parity_of = {c.scale: c.parity for c in symbol.constituents}
    if types is not None:
        for t in types:
            if parity_of.get(t.scale) not in (None, t.parity):
                raise ValueError(f"parity mismatch at scale {t.scale}")
    cells = [(c.scale, c.rank, parity_of[c.scale])
             for c in symbol.constituents]
    t_count = sum(1 for _, _, p in cells if p == "I")
    b_count = sum(1 for s, _, p in cells
                  if p == "I" and parity_of.get(s + 1) == "I")
    c_count = sum(r for _, r, p in cells if p == "II")
    pair_lo = pair_hi = 0
    for (si, ri, _), (sj, rj, _) in itertools.combinations(cells, 2):
        pair_lo += si * ri * rj
        pair_hi += sj * ri * rj
    d = tuple((s, s * r * (r + 1) // 2) for s, r, _ in cells)
    sum_d = sum(x for _, x in d)
    odd_ranks = [r for _, r, p in cells if p == "I"]
    n_m = sum(2 * r - 1 for r in odd_ranks) + (pair_hi - pair_lo) + 2 * b_count
    n_q = (sum(2 * r for r in odd_ranks) + pair_hi + sum_d
           + b_count + c_count)
    return ExponentReport(t_count, b_count, c_count, d, pair_lo,
                          n_m, n_q, n_q - n_m)


@dataclass(frozen=True)
class GroupOrderReport:
    dim_g: int
    factors: tuple[tuple[str, int], ...]  # (kind, half-dimension)
    component_exponent: int
    dim_ru: int
    special_fiber_order: int

    def to_json_dict(self) -> dict:
        return {
            "dimG": self.dim_g,
            "dimRu": self.dim_ru,
            "factors": [{"kind": k, "m": m} for k, m in self.factors],
            "componentExponent": self.component_exponent,
            "order": self.special_fiber_order,
        }


def reductive_quotient(chain: ChainReport):
    """Finite factors (kind, half-dimension) and the component exponent.

    One factor per nonempty constituent.  Window scales without a
    constituent only ever carry residue spaces of dimension at most one,
    whose orthogonal groups are trivial, so they are not listed.
    """
    factors = tuple((r.vbar_class, r.dim_vbar // 2)
                    for r in chain.rows if r.rank > 0)
    return factors, chain.alpha + chain.beta


def special_fiber_order(dim_ru: int, factors, component_exponent: int,
                        q: int) -> int:
    if dim_ru < 0:
        raise NegativeUnipotentDim(
            f"unipotent radical of dimension {dim_ru}")
    order = q ** dim_ru * 2 ** component_exponent
    for kind, m in factors:
        part = finite_orthogonal_order(kind, m, q)
        if kind != "odd-dim" and m > 0:
            part *= 2  # even-dimensional factors are full orthogonal groups
        order *= part
    return order


def group_order_report(chain: ChainReport) -> GroupOrderReport:
    n = chain.rank
    dim_g = n * (n - 1) // 2
    factors, comp = reductive_quotient(chain)
    dim_ru = dim_g - sum(r.dim_vbar * (r.dim_vbar - 1) // 2
                         for r in chain.rows)
    q = chain.descriptor.residue_size
    order = special_fiber_order(dim_ru, factors, comp, q)
    return GroupOrderReport(dim_g, factors, comp, dim_ru, order)


@dataclass(frozen=True)
class DensityReport:
    exponents: ExponentReport
    group: GroupOrderReport
    density: Fraction

    def to_json_dict(self) -> dict:
        return {
            "exponents": self.exponents.to_json_dict(),
            "group": self.group.to_json_dict(),
            "density": f"{self.density.numerator}/{self.density.denominator}",
        }


def density_report(L) -> DensityReport:
    """Density plus all intermediate data for a lattice or Jordan symbol."""
    symbol = jordan_split(L) if isinstance(L, QuadLattice) else L
    chain = chain_report(symbol)
    exp = exponents(symbol)
    grp = group_order_report(chain)
    q = symbol.descriptor.residue_size
    dens = (Fraction(1, 2) * Fraction(q) ** (exp.n - grp.dim_g)
            * grp.special_fiber_order)
    return DensityReport(exp, grp, dens)


def local_density(L) -> Fraction:
    """Exact local density; rank zero gives 1."""
    if L is None or (not isinstance(L, (QuadLattice, JordanSymbol))
                     and len(L) == 0):
        return Fraction(1)
    return density_report(L).density
