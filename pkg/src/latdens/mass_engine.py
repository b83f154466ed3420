"""Global mass assembly from local densities.

The mass of a positive definite lattice over Z is a weighted class count
of its genus, and it factors as an archimedean constant times the product
of local density reciprocals over all primes.  The dyadic density comes
from the residue-chain engine; odd primes contribute finite orthogonal
group orders attached to a p-adic Jordan splitting; the infinite tail of
good primes is folded into special values of zeta and Dirichlet
L-functions, which are rational after a functional-equation rewrite.

Two independent paths to the same number are provided for the standard
lattices I_n (sum of n squares): `mass_via_local` assembles the mass prime
by prime, while `sum_squares_mass_rational` evaluates a closed form in
Bernoulli numbers.  They must agree exactly; `sum_squares_mass_analytic`
re-evaluates the closed form with floating point zeta values as a third
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .base_ring import RingDescriptor, unramified
from .density_engine import finite_orthogonal_order, local_density
from .lattice_forms import QuadLattice


class MissingFieldData(LookupError):
    """A special value needed for the requested field was not supplied."""


# ---------------------------------------------------------------------------
# Bernoulli numbers and characters


@lru_cache(maxsize=None)
def bernoulli_number(k: int) -> Fraction:
    """B_k with the B_1 = -1/2 convention."""
    if k < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    if k == 0:
        return Fraction(1)
    acc = Fraction(0)
    for j in range(k):
        acc += math.comb(k + 1, j) * bernoulli_number(j)
    return -acc / (k + 1)


def _bernoulli_poly(m: int, x: Fraction) -> Fraction:
    return sum((math.comb(m, j) * bernoulli_number(j) * x ** (m - j)
                for j in range(m + 1)), Fraction(0))


def kronecker_symbol(a: int, n: int) -> int:
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    twos = 0
    while n % 2 == 0:
        n //= 2
        twos += 1
    if twos:
        if a % 2 == 0:
            return 0
        if twos % 2 and a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _odd_prime_factors(value: int) -> list[int]:
    value = abs(value)
    while value % 2 == 0:
        value //= 2
    out = []
    d = 3
    while d * d <= value:
        if value % d == 0:
            out.append(d)
            while value % d == 0:
                value //= d
        d += 2
    if value > 1:
        out.append(value)
    return out


def fundamental_discriminant(d: int) -> int:
    """Discriminant of Q(sqrt(d)); d = 1 gives the trivial character."""
    if d == 0:
        raise ValueError("discriminant argument must be nonzero")
    sign = -1 if d < 0 else 1
    d = abs(d)
    core = 1
    for p in [2] + _odd_prime_factors(d):
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        if e % 2:
            core *= p
    core *= sign
    return core if core % 4 == 1 else 4 * core


def generalized_bernoulli(m: int, disc: int) -> Fraction:
    """B_{m,chi} for the quadratic character of discriminant `disc`."""
    f = abs(disc)
    acc = Fraction(0)
    for a in range(1, f + 1):
        chi = kronecker_symbol(disc, a)
        if chi:
            acc += chi * _bernoulli_poly(m, Fraction(a, f))
    return Fraction(f) ** (m - 1) * acc


def special_values(kind: str, arg: int):
    """Exact negative-argument values and float positive-argument values.

    zeta_neg: i -> zeta(1-2i) as a Fraction.
    L_chi4_neg: m -> L(1-m, chi_{-4}) as a Fraction.
    zeta_pos: s -> zeta(s) as a float (s >= 2).
    L_chi4_pos: m -> L(m, chi_{-4}) as a float (m >= 1).
    """
    if kind == "zeta_neg":
        if arg < 1:
            raise ValueError("zeta_neg expects i >= 1")
        return -bernoulli_number(2 * arg) / (2 * arg)
    if kind == "L_chi4_neg":
        if arg < 1:
            raise ValueError("L_chi4_neg expects m >= 1")
        return -generalized_bernoulli(arg, -4) / arg
    if kind == "zeta_pos":
        if arg < 2:
            raise ValueError("zeta_pos expects s >= 2")
        from scipy.special import zeta
        return float(zeta(float(arg)))
    if kind == "L_chi4_pos":
        if arg < 1:
            raise ValueError("L_chi4_pos expects m >= 1")
        if arg == 1:
            return math.pi / 4
        from scipy.special import zeta
        return float(4.0 ** (-arg) * (zeta(float(arg), 0.25) - zeta(float(arg), 0.75)))
    raise ValueError(f"unknown special value kind {kind!r}")


# ---------------------------------------------------------------------------
# Number field data (built-in values exist only for Q)


@dataclass(frozen=True)
class NumberFieldData:
    """A totally real base field, described by the data the mass needs.

    For Q everything is computed; for any other field the exact special
    values must be supplied (there is no Dedekind zeta evaluator here).
    `zeta_neg` maps i to zeta_k(1-2i); `l_neg` maps m to L_k(1-m, chi)
    for the character attached to even rank 2m with m odd, together with
    its conductor norm and root number.
    """
    degree: int = 1
    discriminant: int = 1
    dyadic_degrees: tuple[int, ...] = (1,)
    zeta_neg: Mapping[int, Fraction] | None = None
    l_neg: Mapping[int, Fraction] | None = None
    conductor_norm: int | None = None
    root_number: int | None = None

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("field degree must be at least 1")
        if not self.dyadic_degrees or any(f < 1 for f in self.dyadic_degrees):
            raise ValueError("dyadic residue degrees must be positive")
        object.__setattr__(self, "dyadic_degrees", tuple(self.dyadic_degrees))

    @classmethod
    def rationals(cls) -> "NumberFieldData":
        return cls()

    @property
    def is_rationals(self) -> bool:
        return (self.degree == 1 and self.discriminant == 1
                and self.dyadic_degrees == (1,))

    def zeta_value(self, i: int) -> Fraction:
        """zeta_k(1-2i), exact."""
        if self.is_rationals:
            return special_values("zeta_neg", i)
        if self.zeta_neg is not None and i in self.zeta_neg:
            return Fraction(self.zeta_neg[i])
        raise MissingFieldData(f"zeta_k(1-{2 * i}) not supplied")

    def l_value(self, m: int) -> tuple[Fraction, int, int]:
        """(L_k(1-m, chi), conductor norm, root number) for odd m."""
        if self.is_rationals:
            return special_values("L_chi4_neg", m), 4, 1
        if (self.l_neg is not None and m in self.l_neg
                and self.conductor_norm is not None
                and self.root_number is not None):
            return (Fraction(self.l_neg[m]), self.conductor_norm,
                    self.root_number)
        raise MissingFieldData(f"L_k(1-{m}, chi) data not supplied")

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "NumberFieldData":
        def parse_map(raw):
            if raw is None:
                return None
            return {int(k): Fraction(v) for k, v in raw.items()}

        return cls(
            degree=int(data.get("degree", 1)),
            discriminant=int(data.get("discriminant", 1)),
            dyadic_degrees=tuple(int(f) for f in data.get("dyadicDegrees", (1,))),
            zeta_neg=parse_map(data.get("zetaNeg")),
            l_neg=parse_map(data.get("LNeg")),
            conductor_norm=(int(data["conductorNorm"])
                            if "conductorNorm" in data else None),
            root_number=(int(data["rootNumber"])
                         if "rootNumber" in data else None),
        )


# ---------------------------------------------------------------------------
# Odd-prime local densities


@dataclass(frozen=True)
class OddJordanBlock:
    """One constituent of a p-adic Jordan splitting, p odd.

    `disc` is the Legendre class (+1 or -1) of the unit part of the
    block determinant.
    """
    scale: int
    rank: int
    disc: int

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("block rank must be positive")
        if self.disc not in (1, -1):
            raise ValueError("disc must be a Legendre class, +1 or -1")


def _legendre(a: Fraction | int, p: int) -> int:
    if isinstance(a, Fraction):
        num, den = a.numerator % p, a.denominator % p
        a = num * pow(den, -1, p)
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _vp_fraction(x: Fraction, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def odd_jordan_split(gram: Sequence[Sequence[int]], p: int) -> tuple[OddJordanBlock, ...]:
    """Jordan splitting of an integral Gram matrix over Z_p, p odd.

    Exact symmetric diagonalization with minimal-valuation pivoting; since
    2 is a unit, off-diagonal pivots can always be moved onto the diagonal.
    """
    _check_odd_prime(p)
    n = len(gram)
    m = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]
    if any(m[i][j] != m[j][i] for i in range(n) for j in range(n)):
        raise ValueError("Gram matrix must be symmetric")
    live = list(range(n))
    diag: list[Fraction] = []
    while live:
        best = None
        for i in live:
            for j in live:
                if m[i][j] != 0:
                    v = _vp_fraction(m[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            raise ValueError("Gram matrix is singular")
        v, i, j = best
        if i != j:
            # q(e_i + e_j) or q(e_i - e_j) has the pivot valuation: their
            # difference is 4*m[i][j] and p is odd.
            for sign in (1, -1):
                if _vp_fraction_or_none(m[i][i] + 2 * sign * m[i][j] + m[j][j], p) == v:
                    break
            for t in live:
                m[i][t] += sign * m[j][t]
            for t in live:
                m[t][i] += sign * m[t][j]
        pivot = m[i][i]
        for t in live:
            if t == i:
                continue
            factor = m[t][i] / pivot
            if factor:
                for u in live:
                    m[t][u] -= factor * m[i][u]
                for u in live:
                    m[u][t] -= factor * m[u][i]
        diag.append(pivot)
        live.remove(i)
    by_scale: dict[int, list[Fraction]] = {}
    for d in diag:
        by_scale.setdefault(_vp_fraction(d, p), []).append(d)
    blocks = []
    for scale in sorted(by_scale):
        units = by_scale[scale]
        cls = 1
        for u in units:
            cls *= _legendre(u / Fraction(p) ** scale, p)
        blocks.append(OddJordanBlock(scale, len(units), cls))
    return tuple(blocks)


def _vp_fraction_or_none(x: Fraction, p: int) -> int | None:
    return None if x == 0 else _vp_fraction(x, p)


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0:
        raise ValueError(f"p must be an odd prime, got {p}")
    d = 3
    while d * d <= p:
        if p % d == 0:
            raise ValueError(f"p must be an odd prime, got {p}")
        d += 2


def odd_prime_density(j, p: int) -> Fraction:
    """Local density at an odd prime from a Jordan splitting.

    `j` is a sequence of OddJordanBlock (or a plain integer Gram matrix,
    which is split first).  The density is
    (1/2) * p^(N_p - n(n-1)/2 + dim Ru) * prod #O(block over F_p),
    with N_p summing scale * rank products over constituent pairs and
    scale * rank*(rank+1)/2 over constituents.
    """
    _check_odd_prime(p)
    blocks = tuple(j)
    if not blocks:
        return Fraction(1)
    if not isinstance(blocks[0], OddJordanBlock):
        blocks = odd_jordan_split(j, p)
    n = sum(b.rank for b in blocks)
    n_p = 0
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            lo, hi = blocks[a], blocks[b]
            n_p += min(lo.scale, hi.scale) * lo.rank * hi.rank
    n_p += sum(b.scale * b.rank * (b.rank + 1) // 2 for b in blocks)
    dim_ru = n * (n - 1) // 2 - sum(b.rank * (b.rank - 1) // 2 for b in blocks)
    order = 1
    for b in blocks:
        if b.rank % 2:
            order *= finite_orthogonal_order("odd-dim", b.rank // 2, p)
        else:
            half = b.rank // 2
            eps = _legendre(-1, p) ** half * b.disc
            kind = "even-split" if eps == 1 else "even-nonsplit"
            order *= finite_orthogonal_order(kind, half, p)
    exponent = n_p - n * (n - 1) // 2 + dim_ru
    return Fraction(1, 2) * Fraction(p) ** exponent * order


def _standard_odd_factor(n: int, eps: int, p: int) -> Fraction:
    """Density of a unimodular lattice at odd p, as an Euler factor."""
    m = n // 2
    if n % 2:
        out = Fraction(1)
        for i in range(1, m + 1):
            out *= 1 - Fraction(1, p) ** (2 * i)
        return out
    out = 1 - eps * Fraction(1, p) ** m
    for i in range(1, m):
        out *= 1 - Fraction(1, p) ** (2 * i)
    return out


# ---------------------------------------------------------------------------
# Archimedean constant


def archimedean_constant(n: int) -> tuple[Fraction, int]:
    """The constant mu/lambda as (rational, k) meaning rational * pi^(-k).

    lambda is the product of (2 pi)^d / (d-1)! over the invariant degrees
    of SO(n); mu is 2^n for even n and 2^((n+1)/2) for odd n.
    """
    if n < 2:
        raise ValueError("archimedean constant needs n >= 2")
    m = n // 2
    if n % 2:
        degrees = [2 * i for i in range(1, m + 1)]
        mu = 2 ** (m + 1)
    else:
        degrees = [2 * i for i in range(1, m)] + [m]
        mu = 2 ** n
    total = sum(degrees)
    rational = Fraction(mu, 2 ** total)
    for d in degrees:
        rational *= math.factorial(d - 1)
    return rational, total


# ---------------------------------------------------------------------------
# Mass from local data


@dataclass(frozen=True)
class MassReport:
    """Per-place densities, the archimedean constant, and the mass."""
    local: tuple[tuple[int, Fraction], ...]
    archimedean: tuple[Fraction, int]
    mass: Fraction

    def archimedean_value(self) -> float:
        rational, k = self.archimedean
        return float(rational) * math.pi ** (-k)

    def to_json_dict(self) -> dict:
        rational, k = self.archimedean
        return {
            "local": [{"p": p, "density": _frac_str(d)} for p, d in self.local],
            "archimedean": {"rational": _frac_str(rational), "piPower": k},
            "mass": _frac_str(self.mass),
        }


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _int_rows(gram) -> list[list[int]]:
    rows = [[entry for entry in row] for row in gram]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise ValueError("Gram matrix must be square and nonempty")
    for r in rows:
        for entry in r:
            if not isinstance(entry, int):
                raise ValueError("mass assembly expects an integer Gram matrix")
    if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
        raise ValueError("Gram matrix must be symmetric")
    return rows


def _leading_minors(rows: list[list[int]]) -> list[int]:
    """Exact leading principal minors by fraction-free elimination."""
    n = len(rows)
    m = [row[:] for row in rows]
    minors = []
    prev = 1
    for k in range(n):
        if m[k][k] == 0:
            # Bareiss needs a nonzero pivot; fall back to expansion by
            # Fraction elimination for this minor and all later ones.
            return minors + [_fraction_det([r[:j + 1] for r in rows[:j + 1]])
                             for j in range(k, n)]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
        minors.append(m[k][k])
    return minors


def _fraction_det(rows) -> int:
    n = len(rows)
    m = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for k in range(n):
        pivot = next((i for i in range(k, n) if m[i][k] != 0), None)
        if pivot is None:
            return 0
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            det = -det
        det *= m[k][k]
        inv = 1 / m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] * inv
            if f:
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
    assert det.denominator == 1
    return det.numerator


def _dyadic_descriptor(n: int, det: int) -> RingDescriptor:
    v2 = 0
    d = det
    while d % 2 == 0:
        d //= 2
        v2 += 1
    return unramified(1, precision=max(36, 12 + 3 * n + 4 * v2))


def _fraction_sqrt(x: Fraction) -> Fraction:
    num = math.isqrt(x.numerator)
    den = math.isqrt(x.denominator)
    if num * num != x.numerator or den * den != x.denominator:
        raise ValueError(f"{x} is not a rational square")
    return Fraction(num, den)


def _zeta_shift(i: int) -> Fraction:
    """Rational part of zeta(2i) / zeta(1-2i); the pi power is 2i."""
    return Fraction((-1) ** i * 2 ** (2 * i - 1), math.factorial(2 * i - 1))


def _l_shift(m: int) -> Fraction:
    """Rational part of L(m,chi)/L(1-m,chi) besides pi^m * f^(1/2-m)."""
    if m % 2:
        return Fraction((-4) ** ((m - 1) // 2), math.factorial(m - 1))
    return Fraction((-1) ** (m // 2) * 2 ** (m - 1), math.factorial(m - 1))


def _place_density(rows: list[list[int]], p: int, det: int) -> Fraction:
    if p == 2:
        desc = _dyadic_descriptor(len(rows), det)
        return local_density(QuadLattice.from_entries(desc, rows))
    return odd_prime_density(odd_jordan_split(rows, p), p)


def _density_worker(args):
    return _place_density(*args)


def mass_report(gram, jobs: int = 1) -> MassReport:
    """Assemble the mass of a positive definite integer lattice.

    The bad primes (2 and the odd primes dividing det) get exact local
    densities; the remaining Euler product is evaluated through rational
    special values.  Two good primes are probed to confirm that the
    unimodular density really equals the standard Euler factor there.
    """
    rows = _int_rows(gram)
    n = len(rows)
    if n < 2:
        raise ValueError("mass assembly needs rank at least 2")
    minors = _leading_minors(rows)
    if any(mi <= 0 for mi in minors):
        raise ValueError("Gram matrix is not positive definite")
    det = minors[-1]
    m = n // 2

    bad = _odd_prime_factors(det)
    tasks = [(rows, p, det) for p in [2] + bad]
    if jobs > 1 and len(tasks) > 1:
        import multiprocessing as mp

        with mp.get_context("fork").Pool(min(jobs, len(tasks))) as pool:
            densities = pool.map(_density_worker, tasks)
    else:
        densities = [_place_density(*t) for t in tasks]
    local = tuple(zip([2] + bad, densities))

    c_rational, c_pi = archimedean_constant(n)
    if n % 2:
        zrange = range(1, m + 1)
        disc_char = 1
        mass = c_rational * Fraction(det) ** ((n + 1) // 2)
    else:
        zrange = range(1, m)
        disc_char = fundamental_discriminant((-1) ** m * det)
        # det^((n+1)/2) = det^m * sqrt(det); the square root recombines
        # with the conductor from the L-function shift below.
        ratio = _fraction_sqrt(Fraction(det, abs(disc_char)))
        mass = (c_rational * Fraction(det) ** m * ratio
                * Fraction(abs(disc_char)) ** (1 - m))
        mass *= _l_shift(m) * -generalized_bernoulli(m, disc_char) / m
        c_pi -= m

    for p, density in local:
        mass /= density
    for i in zrange:
        mass *= _zeta_shift(i) * special_values("zeta_neg", i)
        c_pi -= 2 * i
    # Euler factors at the bad primes were not part of the zeta values.
    for p in [2] + bad:
        for i in zrange:
            mass *= 1 - Fraction(1, p) ** (2 * i)
        if n % 2 == 0:
            mass *= 1 - kronecker_symbol(disc_char, p) * Fraction(1, p) ** m
    if c_pi != 0:
        raise RuntimeError("pi powers failed to cancel in mass assembly")

    _probe_good_primes(rows, n, det, disc_char, bad)
    return MassReport(local=local, archimedean=archimedean_constant(n), mass=mass)


def _probe_good_primes(rows, n, det, disc_char, bad) -> None:
    probed = 0
    p = 3
    while probed < 2:
        if det % p and p not in bad:
            blocks = odd_jordan_split(rows, p)
            eps = kronecker_symbol(disc_char, p) if n % 2 == 0 else 0
            expected = _standard_odd_factor(n, eps, p)
            if odd_prime_density(blocks, p) != expected:
                raise RuntimeError(
                    f"unimodular density at good prime {p} is not the "
                    f"standard Euler factor")
            probed += 1
        p += 2
        while any(p % d == 0 for d in range(3, math.isqrt(p) + 1, 2)):
            p += 2


def mass_via_local(gram, jobs: int = 1) -> Fraction:
    return mass_report(gram, jobs=jobs).mass


# ---------------------------------------------------------------------------
# Closed forms for sums of squares


def _dyadic_closed_factor(n: int, f: int) -> Fraction:
    """Per-place dyadic factor of the closed-form mass of I_n.

    `f` is the residue degree of the dyadic place; the case split depends
    on n mod 8 and, in two of the cases, on the parity of f.
    """
    q = 2 ** f
    m = n // 2
    r = n % 8
    odd_degree = f % 2 == 1
    if n % 2:
        if r in (1, 7):
            return Fraction(q ** m + 1, 2 * q ** (m + 1))
        sign = -1 if odd_degree else 1
        return Fraction(q ** m + sign, 2 * q ** (m + 1))
    if r in (2, 6):
        return Fraction(1, 2 * q)
    if r == 0:
        return Fraction((q ** (m - 1) + 1) * (q ** m - 1), 2 * q ** (2 * m))
    sign = -1 if odd_degree else 1
    return Fraction((q ** (m - 1) + sign) * (q ** m - 1), 2 * q ** (2 * m))


def sum_squares_mass_rational(n: int, field: NumberFieldData | None = None) -> Fraction:
    """Exact mass of the sum of n squares over a totally real field."""
    if n < 2:
        raise ValueError("the closed form needs n >= 2")
    field = field or NumberFieldData.rationals()
    d = field.degree
    m = n // 2
    dyadic = Fraction(1)
    for f in field.dyadic_degrees:
        dyadic *= _dyadic_closed_factor(n, f)
    if n % 2:
        sign = (-1) ** (m * (m + 1) * d // 2)
        mass = (sign * Fraction(field.discriminant) ** m
                * Fraction(2) ** d * dyadic)
        for i in range(1, m + 1):
            mass *= field.zeta_value(i)
        return mass
    if m % 2:
        l_val, conductor, eps = field.l_value(m)
        if eps not in (1, -1):
            raise MissingFieldData("root number must be +1 or -1")
    else:
        l_val, conductor, eps = field.zeta_value(m // 2), 1, 1
    mass = Fraction(2) ** (m * d) * dyadic * eps * l_val
    try:
        root = _fraction_sqrt(Fraction(conductor))
    except ValueError:
        raise MissingFieldData(
            "conductor norm must be a perfect square for exact evaluation")
    mass *= root ** (1 - n)
    for i in range(1, m):
        mass *= field.zeta_value(i)
    return mass


def sum_squares_mass_analytic(n: int, field: NumberFieldData | None = None) -> float:
    """Floating evaluation of the same mass via positive zeta values."""
    if n < 2:
        raise ValueError("the closed form needs n >= 2")
    field = field or NumberFieldData.rationals()
    if not field.is_rationals:
        raise MissingFieldData("analytic evaluation is built in only for Q")
    m = n // 2
    dyadic = 1.0
    for f in field.dyadic_degrees:
        dyadic *= float(_dyadic_closed_factor(n, f))
    two_pi = 2.0 * math.pi
    if n % 2:
        arch = 2.0 ** (m + 1)
        for i in range(1, m + 1):
            arch *= math.factorial(2 * i - 1) / two_pi ** (2 * i)
        value = arch * dyadic
        for i in range(1, m + 1):
            value *= special_values("zeta_pos", 2 * i)
        return value
    arch = 2.0 ** (2 * m) * math.factorial(m - 1) / two_pi ** m
    for i in range(1, m):
        arch *= math.factorial(2 * i - 1) / two_pi ** (2 * i)
    if m % 2:
        l_val = special_values("L_chi4_pos", m)
    else:
        l_val = special_values("zeta_pos", m)
    value = arch * dyadic * l_val
    for i in range(1, m):
        value *= special_values("zeta_pos", 2 * i)
    return value
