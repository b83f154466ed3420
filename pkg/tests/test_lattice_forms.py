from __future__ import annotations

import random
import unittest
from fractions import Fraction

import pytest

from latdens.base_ring import PrecisionExhausted, unramified
from latdens.lattice_forms import (
    QuadLattice,
    discriminant,
    jordan_split,
    norm_ideal,
    parity_type,
    scale_ideal,
    unimodular_normal_form,
    unit_square_class_is_trivial,
)
from latdens.oracle import brute_isometry

Z2 = unramified(1)
F4 = unramified(2)

HYP = [[0, 1], [1, 0]]
EVEN_NONSPLIT = [[2, 1], [1, 2]]


def lat(rows, desc=Z2):
    return QuadLattice.from_entries(desc, rows)


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def unimodular_int_matrix(rng: random.Random, n: int):
    """L*U with unit diagonals, optionally column-permuted; det is a unit."""
    low = [[1 if i == j else (rng.randint(-2, 2) if i > j else 0)
            for j in range(n)] for i in range(n)]
    up = [[1 if i == j else (rng.randint(-2, 2) if i < j else 0)
           for j in range(n)] for i in range(n)]
    prod = [[sum(low[i][k] * up[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)]
    cols = list(range(n))
    rng.shuffle(cols)
    return [[prod[i][c] for c in cols] for i in range(n)]


class IdealExamples(unittest.TestCase):
    def test_norm_ideal(self):
        self.assertEqual(norm_ideal(lat([[1, 0], [0, 2]])), 0)
        self.assertEqual(norm_ideal(lat(HYP)), 1)
        self.assertEqual(norm_ideal(lat(EVEN_NONSPLIT)), 1)

    def test_scale_ideal(self):
        self.assertEqual(scale_ideal(lat([[1, 0], [0, 2]])), 0)
        self.assertEqual(scale_ideal(lat(HYP)), 0)
        self.assertEqual(scale_ideal(lat([[4, 0], [0, 8]])), 2)

    def test_discriminant(self):
        self.assertEqual(discriminant(lat(identity(2))), (0, 1))
        self.assertEqual(discriminant(lat(HYP)), (0, 7))
        self.assertEqual(discriminant(lat([[1, 0], [0, 2]])), (1, 1))

    def test_parity(self):
        self.assertEqual(parity_type(lat([[1]])), "I")
        self.assertEqual(parity_type(lat(HYP)), "II")
        self.assertEqual(parity_type(lat(EVEN_NONSPLIT)), "II")


def test_jordan_split_examples():
    sym = jordan_split(lat([[1, 0, 0], [0, 2, 0], [0, 0, 4]]))
    assert sym.shape == ((0, 1, "I"), (1, 1, "I"), (2, 1, "I"))
    assert sym.verify()

    sym = jordan_split(lat(EVEN_NONSPLIT))
    assert sym.shape == ((0, 2, "II"),)
    assert sym.verify()

    sym = jordan_split(lat([[1, 1, 0], [1, 2, 0], [0, 0, 4]]))
    assert sym.shape == ((0, 2, "I"), (2, 1, "I"))
    assert sym.verify()


def test_jordan_mixed_parity_scales():
    # 2 * hyperbolic next to a unit: off-diagonal pivot at scale 1
    rows = [[1, 0, 0], [0, 0, 2], [0, 2, 0]]
    sym = jordan_split(lat(rows))
    assert sym.shape == ((0, 1, "I"), (1, 2, "II"))
    assert sym.verify()


CELL_LIBRARY_F1 = [
    [[1]], [[3]], [[5]], [[7]],
    HYP, EVEN_NONSPLIT, [[1, 0], [0, 3]], [[0, 1], [1, 2]],
]
CELL_LIBRARY_F2 = [
    [[1]], [[3]], [[[0, 1]]], [[[1, 1]]],
    HYP, EVEN_NONSPLIT, [[[0, 1], 0], [0, 3]],
]


def test_jordan_base_change_invariance():
    rng = random.Random(20240817)
    for trial in range(60):
        desc = Z2 if trial % 2 == 0 else F4
        library = CELL_LIBRARY_F1 if desc is Z2 else CELL_LIBRARY_F2
        scales = sorted(rng.sample(range(4), rng.randint(1, 3)))
        blocks = []
        for s in scales:
            cell = rng.choice(library)
            blocks.append((s, cell))
        n = sum(len(c) for _, c in blocks)
        zero = desc.zero()
        rows = [[zero] * n for _ in range(n)]
        off = 0
        for s, cell in blocks:
            k = len(cell)
            for i in range(k):
                for j in range(k):
                    rows[off + i][off + j] = desc.elem(cell[i][j]).shifted(s)
            off += k
        base = QuadLattice(desc, tuple(tuple(r) for r in rows))
        expected = jordan_split(base).shape
        t = unimodular_int_matrix(rng, n)
        moved = base.transformed(t)
        got = jordan_split(moved)
        assert got.shape == expected, (trial, expected, got.shape)
        assert got.verify(), trial


def test_normal_form_single_unit():
    p = unimodular_normal_form(lat([[3]]))
    assert p.parity == "I"
    assert p.planes == 0 and p.k_lambda is None and p.terminal is None
    assert p.eps_mod8 == 3 and p.gamma_mod2 is None


def test_normal_form_hyperbolic_plane():
    p = unimodular_normal_form(lat(HYP))
    assert p.parity == "II"
    assert p.planes == 1
    assert p.k_lambda is None and p.kprime_eps is None and p.terminal is None


def test_normal_form_even_nonsplit():
    p = unimodular_normal_form(lat(EVEN_NONSPLIT))
    assert p.parity == "II"
    assert p.planes == 0
    assert p.terminal is not None
    a, b = p.terminal_mod4
    assert a == 2 and b == 2


def test_normal_form_identity3():
    p = unimodular_normal_form(lat(identity(3)))
    assert p.parity == "I"
    assert p.planes == 0
    assert p.lambda_mod4 == 2
    assert p.eps_mod8 == 3
    # the decomposition is checkable by exhaustive isometry search mod 8
    candidate = [[2, 1, 0], [1, 2, 0], [0, 0, 3]]
    assert brute_isometry(identity(3), candidate, 3) is not None
    rival = [[0, 1, 0], [1, 0, 0], [0, 0, 7]]  # same determinant class
    assert brute_isometry(identity(3), rival, 3) is None


def test_normal_form_identity4():
    p = unimodular_normal_form(lat(identity(4)))
    assert p.parity == "I"
    assert p.planes == 0
    assert p.lambda_mod4 == 2
    assert p.eps_mod8 == 1 and p.gamma_mod2 == 0


DEEP = unramified(1, precision=36)  # rank 5 wants 8 + 4*5 digits


def test_normal_form_identity5():
    p = unimodular_normal_form(QuadLattice.from_entries(DEEP, identity(5)))
    assert p.parity == "I"
    assert p.planes == 1
    assert p.lambda_mod4 == 2
    assert p.eps_mod8 == 5 and p.gamma_mod2 is None


def test_normal_form_three_three():
    # does not represent 1, so the odd part needs the full pair block
    p = unimodular_normal_form(lat([[3, 0], [0, 3]]))
    assert p.parity == "I"
    assert p.planes == 0 and p.k_lambda is None
    assert p.eps_mod8 == 3
    assert p.gamma_mod2 == 1  # unit gamma


def test_normal_form_f2_even_nonsplit_splits():
    # 1 - 4 is a square once the residue field contains F_4
    p = unimodular_normal_form(QuadLattice.from_entries(F4, EVEN_NONSPLIT))
    assert p.parity == "II"
    assert p.planes == 1 and p.terminal is None


def test_normal_form_f2_identity3():
    p = unimodular_normal_form(QuadLattice.from_entries(F4, identity(3)))
    assert p.parity == "I"
    assert p.planes == 1
    assert p.k_lambda is None
    assert p.eps_mod8 == (3, 0)


def test_normal_form_reassembly_isometric_rank_le3():
    rng = random.Random(77)
    shapes = [
        [[1]], [[5]],
        HYP, EVEN_NONSPLIT, [[3, 0], [0, 7]],
        identity(3), [[3, 0, 0], [0, 3, 0], [0, 0, 5]],
        [[0, 1, 0], [1, 0, 0], [0, 0, 3]],
    ]
    for base_rows in shapes:
        n = len(base_rows)
        base = lat(base_rows)
        t = unimodular_int_matrix(rng, n)
        moved = base.transformed(t)
        p = unimodular_normal_form(moved)
        assert p.parity == parity_type(moved)
        witness = brute_isometry(moved.gram, p.assembled_gram(), 3)
        assert witness is not None, base_rows


def test_normal_form_profile_invariants():
    rng = random.Random(4099)
    shapes_f1 = [
        identity(4), [[1, 0], [0, 7]],
        [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 2, 1], [0, 0, 1, 2]],
        [[2, 1, 0], [1, 2, 0], [0, 0, 5]],
        [[0, 1], [1, 2]],
    ]
    shapes_f2 = [
        identity(3), EVEN_NONSPLIT, [[[0, 1], 0], [0, [1, 1]]],
    ]
    for trial in range(40):
        desc = Z2 if trial % 2 == 0 else F4
        rows = rng.choice(shapes_f1 if desc is Z2 else shapes_f2)
        base = QuadLattice.from_entries(desc, rows)
        moved = base.transformed(unimodular_int_matrix(rng, base.n))
        p = unimodular_normal_form(moved)
        assert p.parity == parity_type(moved), (trial, rows)
        rebuilt = p.assembled_lattice()
        assert rebuilt.n == base.n, (trial, rows)
        assert parity_type(rebuilt) == p.parity, (trial, rows)
        ratio = rebuilt.det / moved.det
        assert unit_square_class_is_trivial(ratio), (trial, rows)


def test_normal_form_deterministic():
    reports = []
    for _ in range(2):
        p = unimodular_normal_form(QuadLattice.from_entries(DEEP, identity(5)))
        reports.append((p.parity, p.planes, p.lambda_mod4, p.eps_mod8,
                        p.gamma_mod2, p.terminal_mod4))
    assert reports[0] == reports[1]


def test_quadlattice_validation():
    with pytest.raises(ValueError):
        lat([[1, 1], [0, 1]])  # asymmetric
    with pytest.raises(ValueError):
        lat([[1, 0], [0, 0]])  # structurally zero determinant
    with pytest.raises(PrecisionExhausted):
        lat([[1, 1], [1, 1]])  # determinant cancels below working precision
    with pytest.raises(ValueError):
        unimodular_normal_form(lat([[2, 0], [0, 2]]))  # scale (2)
    with pytest.raises(ValueError):
        unimodular_normal_form(lat([[1, 0], [0, 2]]))  # determinant not a unit
    shallow = unramified(1, precision=12)
    with pytest.raises(PrecisionExhausted):
        unimodular_normal_form(QuadLattice.from_entries(shallow, identity(2)))


def test_scaled_and_transformed_helpers():
    base = lat([[1, 0], [0, 3]])
    assert scale_ideal(base.scaled(2)) == scale_ideal(base) + 2
    assert norm_ideal(base.scaled(1)) == 1
    with pytest.raises(ValueError):
        base.transformed([[2, 0], [0, 1]])  # determinant 2 is not a unit
    moved = base.transformed([[1, 1], [0, 1]])
    assert moved.form([1, 0]) == base.form([1, 0])
    assert discriminant(moved)[0] == discriminant(base)[0]


def test_fractional_entries_round_trip():
    base = QuadLattice.from_entries(Z2, [[Fraction(1, 3), 0], [0, 3]])
    assert scale_ideal(base) == 0
    assert discriminant(base) == (0, 1)
    p = unimodular_normal_form(base)
    assert p.parity == "I"
    # 1/3 * 3 = 1 is a square, diag(1/3, 3) = diag(3, 3) after rescaling
    assert p.eps_mod8 == 3 and p.gamma_mod2 == 1
