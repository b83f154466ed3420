from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from latdens.base_ring import (
    DivisionByZero,
    KappaElem,
    NegativeValuation,
    NotAUnit,
    PrecisionExhausted,
    RingElem,
    additive_form_kernel,
    kappa_linear_solve,
    kappa_sqrt,
    lift,
    unit_sqrt_mod2,
    unramified,
)

Z2 = unramified(1)
A2 = unramified(2)  # residue field F_4, generator w with w^2 + w + 1 = 0


def elem(ring, value):
    return ring.elem(value)


def test_descriptor_validation():
    with pytest.raises(ValueError):
        unramified(1, precision=8)
    with pytest.raises(ValueError):
        unramified(2, modulus=(1, 0, 1))  # x^2 + 1 is a square mod 2
    with pytest.raises(ValueError):
        unramified(9)


def test_mul_valuation_additive():
    c = elem(Z2, 3) * elem(Z2, 4)
    assert c.valuation() == 2
    assert c.coeffs == (3,)


def test_inverse_contract():
    inv3 = elem(Z2, 1) / elem(Z2, 3)
    assert (inv3 * 3).congruent_mod(1, Z2.precision)


def test_generator_square_f2():
    w = elem(A2, (0, 1))
    sq = w * w
    assert sq.valuation() == 0
    assert sq.residue().bits == 0b11  # w^2 = w + 1 in F_4


def test_valuation_examples():
    assert elem(Z2, 12).valuation() == 2
    assert elem(Z2, 0).valuation() == math.inf
    assert (elem(A2, (0, 1)) * 2).valuation() == 1


def test_residue_and_lift():
    assert elem(Z2, 5).residue().bits == 1
    assert elem(Z2, 4).residue().bits == 0
    assert elem(A2, (2, 1)).residue().bits == 0b10
    for bits in range(4):
        x = KappaElem(A2, bits)
        assert lift(x).residue() == x


def test_residue_requires_integrality():
    half = RingElem.from_fraction(Z2, Fraction(1, 2))
    with pytest.raises(NegativeValuation):
        half.residue()


def test_kappa_sqrt_exhaustive():
    for f in (1, 2, 3):
        ring = unramified(f)
        for bits in range(ring.residue_size):
            x = KappaElem(ring, bits)
            r = kappa_sqrt(x)
            assert r * r == x
    assert kappa_sqrt(KappaElem(A2, 0b10)).bits == 0b11


def test_unit_sqrt_mod2():
    assert unit_sqrt_mod2(elem(Z2, 3)).residue().bits == 1
    assert unit_sqrt_mod2(elem(Z2, 1)).residue().bits == 1
    v = unit_sqrt_mod2(elem(A2, (0, 1)))
    assert v.residue().bits == 0b11
    with pytest.raises(NotAUnit):
        unit_sqrt_mod2(elem(Z2, 2))
    for f in (1, 2, 3):
        ring = unramified(f)
        for bits in range(1, ring.residue_size):
            u = lift(KappaElem(ring, bits))
            v = unit_sqrt_mod2(u)
            assert (v * v - u).residue().bits == 0


def test_kappa_linear_solve_examples():
    one = Z2.kappa(1)
    kernel, _ = kappa_linear_solve([[one, one]])
    assert len(kernel) == 1
    assert [x.bits for x in kernel[0]] == [1, 1]

    zero = Z2.kappa(0)
    ident = [[one, zero], [zero, one]]
    kernel, sol = kappa_linear_solve(ident, [one, zero])
    assert kernel == []
    assert [x.bits for x in sol] == [1, 0]

    w = A2.kappa(0b10)
    kernel, sol = kappa_linear_solve([[w]], [A2.kappa(1)])
    assert kernel == []
    assert sol[0].bits == 0b11  # 1/w = w + 1 in F_4

    kernel, sol = kappa_linear_solve([[zero, zero]], [one])
    assert sol is None
    assert len(kernel) == 2


def test_additive_form_kernel_examples():
    one, zero = Z2.kappa(1), Z2.kappa(0)
    basis = additive_form_kernel([one, zero])
    assert [[x.bits for x in v] for v in basis] == [[0, 1]]
    basis = additive_form_kernel([one, one])
    assert [[x.bits for x in v] for v in basis] == [[1, 1]]
    w = A2.kappa(0b10)
    basis = additive_form_kernel([w, A2.kappa(1)])
    assert len(basis) == 1
    v = basis[0]
    # (1, sqrt(w)) spans the kernel
    assert v[0].bits != 0 or v[1].bits != 0
    s = v[0] * v[0] * w + v[1] * v[1]
    assert s.bits == 0


def test_additive_form_kernel_dimension_randomized():
    rng = random.Random(7)
    for f in (1, 2, 3):
        ring = unramified(f)
        for _ in range(40):
            n = rng.randrange(1, 6)
            diag = [KappaElem(ring, rng.randrange(ring.residue_size)) for _ in range(n)]
            basis = additive_form_kernel(diag)
            expect = n if all(d.is_zero for d in diag) else n - 1
            assert len(basis) == expect
            for vec in basis:
                s = ring.kappa(0)
                for d, x in zip(diag, vec):
                    s = s + d * x * x
                assert s.is_zero


def test_residue_is_multiplicative_randomized():
    rng = random.Random(11)
    for f in (1, 2):
        ring = unramified(f)
        for _ in range(60):
            a = RingElem.from_coeffs(
                ring, [rng.randrange(1, 1 << 10) | (1 if j == 0 else 0) for j in range(f)])
            b = RingElem.from_coeffs(
                ring, [rng.randrange(1, 1 << 10) | (1 if j == 0 else 0) for j in range(f)])
            if a.valuation() != 0 or b.valuation() != 0:
                continue
            assert (a * b).residue() == a.residue() * b.residue()


def test_cancellation_is_tracked_not_invented():
    a = elem(Z2, 3)
    d = a - a
    assert d.is_near_zero
    with pytest.raises(PrecisionExhausted):
        d.valuation()
    with pytest.raises(PrecisionExhausted):
        elem(Z2, 1) / d
    with pytest.raises(DivisionByZero):
        elem(Z2, 1) / elem(Z2, 0)


def test_near_zero_absorbs_additively():
    a = elem(Z2, 5)
    near = a - a  # valuation >= 24 certified
    s = near + elem(Z2, 8)
    assert s.valuation() == 3
    assert s.prec == Z2.precision - 3


def test_negative_scales_are_exact():
    x = RingElem.from_fraction(Z2, Fraction(3, 8))
    assert x.valuation() == -3
    y = x * 8
    assert y.valuation() == 0 and y.coeffs == (3,)
    assert x.shifted(3).congruent_mod(3, 10)


def test_fraction_with_odd_denominator():
    x = RingElem.from_fraction(Z2, Fraction(1, 3))
    assert (x * 3).congruent_mod(1, Z2.precision)


def test_associativity_spot_checks():
    rng = random.Random(3)
    ring = unramified(2)
    for _ in range(40):
        vals = [RingElem.from_coeffs(ring, [rng.randrange(-64, 64) for _ in range(2)])
                for _ in range(3)]
        a, b, c = vals
        lhs = (a + b) * c
        rhs = a * c + b * c
        diff = lhs - rhs
        assert diff.is_zero or diff.is_near_zero or diff.valuation() >= 10
