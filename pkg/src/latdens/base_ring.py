"""Truncated arithmetic over the ring of integers of an unramified 2-adic field.

Elements are stored as 2^scale * unit with a tracked number of reliable unit
digits, so cancellation is detected instead of silently corrupting a result.
The residue field kappa = F_{2^f} has its own lightweight element type and
linear-algebra helpers (Gaussian solve, kernels of additive forms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class DivisionByZero(ZeroDivisionError):
    """Division by an exact zero."""


class PrecisionExhausted(ArithmeticError):
    """The tracked digits cannot certify the requested decision."""


class NegativeValuation(ArithmeticError):
    """An integral operation met an element of negative valuation."""


class NotAUnit(ArithmeticError):
    """A unit (nonzero residue) was required."""


# Monic integer lifts of the Conway polynomials for F_{2^f}, coefficients
# listed from the constant term upward.
_CONWAY = {
    1: (1, 1),
    2: (1, 1, 1),
    3: (1, 1, 0, 1),
    4: (1, 1, 0, 0, 1),
    5: (1, 0, 1, 0, 0, 1),
    6: (1, 1, 0, 1, 1, 0, 1),
    7: (1, 1, 0, 0, 0, 0, 0, 1),
    8: (1, 0, 1, 1, 1, 0, 0, 0, 1),
}

MIN_PRECISION = 10


def _v2(n: int) -> int:
    """2-adic valuation of a nonzero integer."""
    return (n & -n).bit_length() - 1


def _poly_mod2_bits(coeffs: Sequence[int]) -> int:
    bits = 0
    for j, c in enumerate(coeffs):
        if c & 1:
            bits |= 1 << j
    return bits


def _clmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r

def _clmod(x: int, m: int) -> int:
    dm = m.bit_length() - 1
    while x.bit_length() - 1 >= dm and x:
        x ^= m << (x.bit_length() - 1 - dm)
    return x


def _is_irreducible_mod2(coeffs: Sequence[int]) -> bool:
    """Brute-force irreducibility test for a monic polynomial over F_2."""
    f = len(coeffs) - 1
    m = _poly_mod2_bits(coeffs)
    if not (m >> f) & 1:
        return False
    for d in range(1, f // 2 + 1):
        for low in range(1 << d):
            g = (1 << d) | low
            if _clmod(m, g) == 0:
                return False
    return True


@dataclass(frozen=True)
class RingDescriptor:
    """Unramified extension of Z_2 of the given residue degree, truncated
    to `precision` reliable binary digits."""

    degree: int
    precision: int
    modulus: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise ValueError("residue degree must be at least 1")
        if self.precision < MIN_PRECISION:
            raise ValueError(f"precision must be at least {MIN_PRECISION}")
        if len(self.modulus) != self.degree + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree equal to the residue degree")
        if not _is_irreducible_mod2(self.modulus):
            raise ValueError("modulus must be irreducible modulo 2")

    @property
    def residue_size(self) -> int:
        return 1 << self.degree

    @property
    def modulus_bits(self) -> int:
        return _poly_mod2_bits(self.modulus)

    def zero(self) -> "RingElem":
        return RingElem(self, "zero")

    def one(self) -> "RingElem":
        return RingElem.from_int(self, 1)

    def kappa(self, bits: int = 0) -> "KappaElem":
        return KappaElem(self, bits)

    def elem(self, value) -> "RingElem":
        """Coerce an int, Fraction, coefficient sequence, or RingElem."""
        if isinstance(value, RingElem):
            if value.desc is not self and value.desc != self:
                raise ValueError("element belongs to a different ring")
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a ring element")
        if isinstance(value, int):
            return RingElem.from_int(self, value)
        if isinstance(value, Fraction):
            return RingElem.from_fraction(self, value)
        if isinstance(value, (list, tuple)):
            return RingElem.from_coeffs(self, value)
        raise TypeError(f"cannot coerce {type(value).__name__} to a ring element")


def unramified(degree: int, precision: int = 24, modulus: Sequence[int] | None = None) -> RingDescriptor:
    """Descriptor for the unramified extension of Z_2 of the given residue degree."""
    if modulus is None:
        if degree not in _CONWAY:
            raise ValueError(f"no built-in modulus for degree {degree}; pass one explicitly")
        modulus = _CONWAY[degree]
    return RingDescriptor(degree, precision, tuple(int(c) for c in modulus))


@dataclass(frozen=True)
class KappaElem:
    """Element of the residue field kappa = F_{2^f}; bit j is the w^j coefficient."""

    desc: RingDescriptor
    bits: int

    def __post_init__(self) -> None:
        if not 0 <= self.bits < self.desc.residue_size:
            raise ValueError("residue bits out of range")

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    def __bool__(self) -> bool:
        return self.bits != 0

    def __add__(self, other: "KappaElem") -> "KappaElem":
        return KappaElem(self.desc, self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: "KappaElem") -> "KappaElem":
        prod = _clmul(self.bits, other.bits)
        return KappaElem(self.desc, _clmod(prod, self.desc.modulus_bits))

    def __pow__(self, n: int) -> "KappaElem":
        if n < 0:
            return self.inverse() ** (-n)
        result = KappaElem(self.desc, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "KappaElem":
        if self.is_zero:
            raise DivisionByZero("residue field inverse of zero")
        return self ** (self.desc.residue_size - 2)

    def sqrt(self) -> "KappaElem":
        """Every element of kappa is a square; the root is x^(2^(f-1))."""
        return self ** (1 << (self.desc.degree - 1))

    def trace(self) -> int:
        """Absolute trace to F_2, returned as 0 or 1."""
        acc = self.desc.kappa(0)
        frob = self
        for _ in range(self.desc.degree):
            acc = acc + frob
            frob = frob * frob
        if acc.bits not in (0, 1):
            raise AssertionError("trace landed outside the prime field")
        return acc.bits

    def __repr__(self) -> str:
        return f"kappa({self.bits:#x})"


# Bound methods are handier than free functions at call sites; keep module
# aliases for the operations named in the public API.
def kappa_sqrt(x: KappaElem) -> KappaElem:
    return x.sqrt()


class RingElem:
    """Ring element in canonical scaled-unit form.

    kind is one of:
      "zero"  exact zero;
      "unit"  value = 2^scale * unit, trusted modulo 2^(scale + prec);
      "near"  indistinguishable from zero: only valuation >= scale is certified.
    """

    __slots__ = ("desc", "kind", "scale", "coeffs", "prec")

    def __init__(self, desc: RingDescriptor, kind: str, scale: int = 0,
                 coeffs: tuple[int, ...] | None = None, prec: int = 0):
        self.desc = desc
        self.kind = kind
        self.scale = scale
        self.coeffs = coeffs
        self.prec = prec

    # -- construction -------------------------------------------------

    @staticmethod
    def _canonical(desc: RingDescriptor, raw: Sequence[int], shift: int, window: int) -> "RingElem":
        """Normalize a raw coefficient vector trusted modulo 2^(shift + window)."""
        window = min(window, desc.precision)
        if window <= 0:
            return RingElem(desc, "near", shift + max(window, 0))
        mask = (1 << window) - 1
        red = [c & mask for c in raw]
        if not any(red):
            return RingElem(desc, "near", shift + window)
        v = min(_v2(c) for c in red if c)
        prec = window - v
        pmask = (1 << prec) - 1
        coeffs = tuple((c >> v) & pmask for c in red)
        return RingElem(desc, "unit", shift + v, coeffs, prec)

    @classmethod
    def from_int(cls, desc: RingDescriptor, n: int, shift: int = 0) -> "RingElem":
        if n == 0:
            return RingElem(desc, "zero")
        raw = [n] + [0] * (desc.degree - 1)
        return cls._canonical(desc, raw, shift, desc.precision)

    @classmethod
    def from_coeffs(cls, desc: RingDescriptor, coeffs: Sequence[int], shift: int = 0) -> "RingElem":
        if len(coeffs) != desc.degree:
            raise ValueError(f"expected {desc.degree} coefficients, got {len(coeffs)}")
        if all(c == 0 for c in coeffs):
            return RingElem(desc, "zero")
        return cls._canonical(desc, list(coeffs), shift, desc.precision)

    @classmethod
    def from_fraction(cls, desc: RingDescriptor, fr: Fraction) -> "RingElem":
        if fr == 0:
            return RingElem(desc, "zero")
        num, den = fr.numerator, fr.denominator
        k = _v2(den)
        odd = den >> k
        inv = pow(odd, -1, 1 << desc.precision)
        return cls.from_int(desc, num * inv, shift=-k)

    # -- inspection ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    @property
    def is_near_zero(self) -> bool:
        return self.kind == "near"

    @property
    def is_unit_scaled(self) -> bool:
        return self.kind == "unit"

    def valuation(self) -> int | float:
        """Exact valuation of a certified-nonzero element; inf for exact zero."""
        if self.kind == "unit":
            return self.scale
        if self.kind == "zero":
            return math.inf
        raise PrecisionExhausted(
            f"element indistinguishable from zero (valuation >= {self.scale})")

    def valuation_at_least(self, v: int) -> bool:
        """Certified test val(x) >= v; raises when the digits cannot decide."""
        if self.kind == "zero":
            return True
        if self.kind == "unit":
            return self.scale >= v
        if self.scale >= v:
            return True
        raise PrecisionExhausted(
            f"cannot certify valuation >= {v}: only >= {self.scale} is known")

    def require_window(self, bits: int) -> None:
        """Insist the element is trusted modulo 2^(scale + bits)."""
        if self.kind == "unit" and self.prec < bits:
            raise PrecisionExhausted(
                f"{self.prec} reliable digits where {bits} are required")

    def residue(self) -> KappaElem:
        """Image in kappa; requires certified valuation >= 0."""
        if self.kind == "zero":
            return KappaElem(self.desc, 0)
        if self.scale < 0 and self.kind == "unit":
            raise NegativeValuation(f"residue of an element of valuation {self.scale}")
        if self.kind == "near":
            if self.scale >= 1:
                return KappaElem(self.desc, 0)
            raise PrecisionExhausted("residue of an element known only modulo 2")
        if self.scale >= 1:
            return KappaElem(self.desc, 0)
        bits = 0
        for j, c in enumerate(self.coeffs):
            if c & 1:
                bits |= 1 << j
        return KappaElem(self.desc, bits)

    def unit_residue(self) -> KappaElem:
        """Residue of the unit part 2^(-scale) * x; nonzero by construction."""
        if self.kind != "unit":
            raise NotAUnit("no unit part available")
        bits = 0
        for j, c in enumerate(self.coeffs):
            if c & 1:
                bits |= 1 << j
        return KappaElem(self.desc, bits)

    def integer_coeffs(self, bits: int) -> tuple[int, ...]:
        """Coefficient vector of the value modulo 2^bits (valuation >= 0 only)."""
        f = self.desc.degree
        mask = (1 << bits) - 1
        if self.kind == "zero":
            return (0,) * f
        if self.kind == "near":
            if self.scale >= bits:
                return (0,) * f
            raise PrecisionExhausted(
                f"element known modulo 2^{self.scale}, need 2^{bits}")
        if self.scale < 0:
            raise NegativeValuation("not an integral element")
        if self.scale < bits and self.scale + self.prec < bits:
            raise PrecisionExhausted(
                f"element trusted modulo 2^{self.scale + self.prec}, need 2^{bits}")
        if self.scale >= bits:
            return (0,) * f
        return tuple((c << self.scale) & mask for c in self.coeffs)

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RingElem):
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return RingElem.from_int(self.desc, other)
        if isinstance(other, Fraction):
            return RingElem.from_fraction(self.desc, other)
        return None

    def __add__(self, other) -> "RingElem":
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        a = self
        if a.kind == "zero":
            return b
        if b.kind == "zero":
            return a
        if a.kind == "near" and b.kind == "near":
            return RingElem(a.desc, "near", min(a.scale, b.scale))
        if a.kind == "near" or b.kind == "near":
            near, unit = (a, b) if a.kind == "near" else (b, a)
            if near.scale <= unit.scale:
                return RingElem(a.desc, "near", near.scale)
            window = min(near.scale, unit.scale + unit.prec) - unit.scale
            return RingElem._canonical(a.desc, list(unit.coeffs), unit.scale, window)
        e = min(a.scale, b.scale)
        window = min(a.scale + a.prec, b.scale + b.prec) - e
        sa, sb = a.scale - e, b.scale - e
        raw = [(ca << sa) + (cb << sb) for ca, cb in zip(a.coeffs, b.coeffs)]
        return RingElem._canonical(a.desc, raw, e, window)

    __radd__ = __add__

    def __neg__(self) -> "RingElem":
        if self.kind != "unit":
            return self
        mask = (1 << self.prec) - 1
        return RingElem(self.desc, "unit", self.scale,
                        tuple((-c) & mask for c in self.coeffs), self.prec)

    def __sub__(self, other) -> "RingElem":
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return self + (-b)

    def __rsub__(self, other) -> "RingElem":
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return b + (-self)

    def __mul__(self, other) -> "RingElem":
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        a = self
        if a.kind == "zero" or b.kind == "zero":
            return RingElem(a.desc, "zero")
        if a.kind == "near" or b.kind == "near":
            return RingElem(a.desc, "near", a.scale + b.scale)
        prec = min(a.prec, b.prec)
        coeffs = _poly_mul(a.coeffs, b.coeffs, a.desc, prec)
        return RingElem._canonical(a.desc, list(coeffs), a.scale + b.scale, prec)

    __rmul__ = __mul__

    def inverse(self) -> "RingElem":
        if self.kind == "zero":
            raise DivisionByZero("inverse of zero")
        if self.kind == "near":
            raise PrecisionExhausted("inverse of an element indistinguishable from zero")
        inv = _poly_inv(self.coeffs, self.desc, self.prec)
        return RingElem(self.desc, "unit", -self.scale, inv, self.prec)

    def __truediv__(self, other) -> "RingElem":
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        if b.kind == "zero":
            raise DivisionByZero("division by exact zero")
        if b.kind == "near":
            raise PrecisionExhausted("division by an element indistinguishable from zero")
        if self.kind == "zero":
            return self
        if self.kind == "near":
            return RingElem(self.desc, "near", self.scale - b.scale)
        return self * b.inverse()

    def __rtruediv__(self, other) -> "RingElem":
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return b / self

    def shifted(self, k: int) -> "RingElem":
        """Exact multiplication by 2^k."""
        if self.kind == "zero":
            return self
        return RingElem(self.desc, self.kind, self.scale + k, self.coeffs, self.prec)

    def __pow__(self, n: int) -> "RingElem":
        if n < 0:
            return self.inverse() ** (-n)
        result = RingElem.from_int(self.desc, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison and display ----------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingElem):
            other = self._coerce(other)
            if other is None:
                return NotImplemented
        return (self.desc == other.desc and self.kind == other.kind
                and self.scale == other.scale and self.coeffs == other.coeffs
                and self.prec == other.prec)

    __hash__ = None  # type: ignore[assignment]

    def congruent_mod(self, other, bits: int) -> bool:
        """Certified congruence modulo 2^bits; raises if undecidable."""
        b = self._coerce(other)
        d = self - b
        if d.kind == "zero":
            return True
        if d.kind == "unit":
            return d.scale >= bits
        if d.scale >= bits:
            return True
        raise PrecisionExhausted(
            f"difference known modulo 2^{d.scale}, need 2^{bits}")

    def __repr__(self) -> str:
        if self.kind == "zero":
            return "elem(0)"
        if self.kind == "near":
            return f"elem(~0 mod 2^{self.scale})"
        if self.desc.degree == 1:
            body = str(self.coeffs[0])
        else:
            body = "[" + ",".join(str(c) for c in self.coeffs) + "]"
        return f"elem(2^{self.scale}*{body} mod 2^{self.scale + self.prec})"


def _poly_mul(ca: Sequence[int], cb: Sequence[int], desc: RingDescriptor, bits: int) -> tuple[int, ...]:
    """Product of coefficient vectors modulo the ring modulus and 2^bits."""
    f = desc.degree
    if f == 1:
        return ((ca[0] * cb[0]) & ((1 << bits) - 1),)
    prod = [0] * (2 * f - 1)
    for i, x in enumerate(ca):
        if x:
            for j, y in enumerate(cb):
                prod[i + j] += x * y
    mod = desc.modulus
    for d in range(2 * f - 2, f - 1, -1):
        c = prod[d]
        if c:
            prod[d] = 0
            for k in range(f):
                prod[d - f + k] -= c * mod[k]
    mask = (1 << bits) - 1
    return tuple(p & mask for p in prod[:f])


def _poly_inv(coeffs: Sequence[int], desc: RingDescriptor, bits: int) -> tuple[int, ...]:
    """Inverse of a unit coefficient vector modulo 2^bits, by Newton lifting."""
    res_bits = 0
    for j, c in enumerate(coeffs):
        if c & 1:
            res_bits |= 1 << j
    if res_bits == 0:
        raise NotAUnit("inverse of a non-unit")
    k_inv = KappaElem(desc, res_bits).inverse()
    v = tuple((k_inv.bits >> j) & 1 for j in range(desc.degree))
    m = 1
    while m < bits:
        m = min(2 * m, bits)
        cv = _poly_mul(coeffs, v, desc, m)
        mask = (1 << m) - 1
        two_minus = tuple(((2 if j == 0 else 0) - cv[j]) & mask for j in range(desc.degree))
        v = _poly_mul(v, two_minus, desc, m)
    return v


def lift(x: KappaElem) -> RingElem:
    """The 0/1-coefficient representative of a residue class, as an exact element."""
    if x.bits == 0:
        return RingElem(x.desc, "zero")
    coeffs = tuple((x.bits >> j) & 1 for j in range(x.desc.degree))
    return RingElem.from_coeffs(x.desc, coeffs)


def unit_sqrt_mod2(x: RingElem) -> RingElem:
    """A unit v with v^2 congruent to x modulo 2."""
    r = x.residue()
    if r.is_zero:
        raise NotAUnit("square root mod 2 requested for a non-unit")
    return lift(r.sqrt())


def valuation(x: RingElem) -> int | float:
    return x.valuation()


def residue(x: RingElem) -> KappaElem:
    return x.residue()


def ring_arith(op: str, a: RingElem, b: RingElem | None = None) -> RingElem:
    """Dispatcher for the basic ring operations."""
    if op == "neg":
        return -a
    if b is None:
        raise ValueError(f"operation {op!r} needs two operands")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# -- linear algebra over kappa ------------------------------------------


def kappa_linear_solve(
    matrix: Sequence[Sequence[KappaElem]],
    rhs: Sequence[KappaElem] | None = None,
    ncols: int | None = None,
) -> tuple[list[list[KappaElem]], list[KappaElem] | None]:
    """Solve M x = rhs over kappa by Gaussian elimination.

    Returns (kernel basis, particular solution or None if inconsistent).
    With rhs None the particular solution is the zero vector.
    """
    rows = [list(r) for r in matrix]
    m = len(rows)
    if ncols is None:
        if m == 0:
            raise ValueError("pass ncols for an empty matrix")
        ncols = len(rows[0])
    desc = None
    for r in rows:
        if len(r) != ncols:
            raise ValueError("ragged matrix")
        if r and desc is None:
            desc = r[0].desc
    b = list(rhs) if rhs is not None else None
    if b is not None and len(b) != m:
        raise ValueError("rhs length mismatch")
    if desc is None and b:
        desc = b[0].desc
    if ncols == 0:
        if b is not None and any(x for x in b):
            return [], None
        return [], []
    if desc is None:
        raise ValueError("cannot infer the field from an empty system")

    zero = KappaElem(desc, 0)
    one = KappaElem(desc, 1)
    pivots: list[tuple[int, int]] = []  # (row, col)
    prow = 0
    for col in range(ncols):
        sel = None
        for r in range(prow, m):
            if rows[r][col]:
                sel = r
                break
        if sel is None:
            continue
        rows[prow], rows[sel] = rows[sel], rows[prow]
        if b is not None:
            b[prow], b[sel] = b[sel], b[prow]
        inv = rows[prow][col].inverse()
        rows[prow] = [inv * x for x in rows[prow]]
        if b is not None:
            b[prow] = inv * b[prow]
        for r in range(m):
            if r != prow and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[prow])]
                if b is not None:
                    b[r] = b[r] - factor * b[prow]
        pivots.append((prow, col))
        prow += 1
        if prow == m:
            break

    particular: list[KappaElem] | None
    if b is not None:
        for r in range(prow, m):
            if b[r]:
                particular = None
                break
        else:
            particular = [zero] * ncols
            for r, c in pivots:
                particular[c] = b[r]
    else:
        particular = [zero] * ncols

    pivot_cols = {c for _, c in pivots}
    kernel: list[list[KappaElem]] = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        vec = [zero] * ncols
        vec[free] = one
        for r, c in pivots:
            vec[c] = zero - rows[r][free]
        kernel.append(vec)
    return kernel, particular


def additive_form_kernel(diag: Sequence[KappaElem]) -> list[list[KappaElem]]:
    """Kernel of v -> sum d_j v_j^2, an additive form on kappa^n.

    The form equals (sum sqrt(d_j) v_j)^2, so the kernel is the kernel of a
    single linear functional.
    """
    if not diag:
        return []
    row = [d.sqrt() for d in diag]
    kernel, _ = kappa_linear_solve([row], None)
    return kernel
