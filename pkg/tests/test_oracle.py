from __future__ import annotations

from fractions import Fraction

import pytest

from latdens.base_ring import RingElem, unramified
from latdens.oracle import (
    BudgetExceeded,
    NotStabilized,
    brute_isometry,
    count_solutions,
    density_estimate,
    naive_count,
)

I2 = [[1, 0], [0, 1]]
HYP = [[0, 1], [1, 0]]
EVEN_NONSPLIT = [[2, 1], [1, 2]]


def test_rank_one_counts_by_level():
    rep = density_estimate([[1]], 2, max_level=6)
    assert rep.levels == [1, 2, 4, 4, 4, 4]
    assert rep.stabilized and rep.value == 4


def test_rank_one_odd_prime_is_rigid():
    rep = density_estimate([[1]], 3, max_level=5)
    assert rep.levels == [2, 2, 2, 2, 2]
    assert rep.value == 2


def test_identity2_count_level5():
    assert count_solutions(I2, 2, 5) == 256  # 2^(N+3)
    for n_lev in (3, 4, 5):
        assert count_solutions(I2, 2, n_lev) == 2 ** (n_lev + 3)


def test_lifting_tree_matches_naive_rank1():
    for g in (1, 3, 5, 7, 2, 12):
        for p, max_n in ((2, 8), (3, 5)):
            for lev in range(1, max_n + 1):
                assert count_solutions([[g]], p, lev) == naive_count([[g]], p, lev), (g, p, lev)


def test_lifting_tree_matches_naive_rank2():
    for g in (I2, HYP, EVEN_NONSPLIT, [[1, 0], [0, 2]], [[1, 0], [0, 4]], [[2, 0], [0, 3]]):
        for lev in range(1, 6):
            assert count_solutions(g, 2, lev) == naive_count(g, 2, lev), (g, lev)
    assert count_solutions([[1, 0], [0, 3]], 3, 3) == naive_count([[1, 0], [0, 3]], 3, 3)


def test_stabilized_values_dyadic_set():
    expected = {
        "(1)": ([[1]], 6, Fraction(4)),
        "(3)": ([[3]], 6, Fraction(4)),
        "I2": (I2, 5, Fraction(8)),
        "hyperbolic": (HYP, 5, Fraction(4)),
        "even nonsplit": (EVEN_NONSPLIT, 5, Fraction(12)),
        "diag(1,2)": ([[1, 0], [0, 2]], 6, Fraction(16)),
        "diag(1,4)": ([[1, 0], [0, 4]], 8, Fraction(32)),
        "diag(2,3)": ([[2, 0], [0, 3]], 6, Fraction(16)),
    }
    for name, (gram, lev, want) in expected.items():
        rep = density_estimate(gram, 2, max_level=lev)
        assert rep.stabilized, name
        assert rep.require_value() == want, name
        for r in rep.ratios:
            assert bin(r.denominator).count("1") == 1  # power of 2


def test_stabilized_value_odd_prime_rank3():
    rep = density_estimate([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 3, max_level=6)
    assert rep.require_value() == Fraction(16, 9)


def test_extension_ring_rank1():
    ring = unramified(2)
    gram = [[RingElem.from_int(ring, 1)]]
    rep = density_estimate(gram, 2, max_level=5)
    assert rep.levels == [1, 4, 8, 8, 8]
    assert rep.require_value() == 8


def test_not_stabilized_is_reported():
    rep = density_estimate([[1]], 2, max_level=2)
    assert not rep.stabilized
    with pytest.raises(NotStabilized):
        rep.require_value()
    rep = density_estimate([[1, 0], [0, 4]], 2, max_level=5)  # threshold is 6
    assert not rep.stabilized


def test_budget_guards():
    big = [[1 if i == j else 0 for j in range(5)] for i in range(5)]
    with pytest.raises(BudgetExceeded):
        count_solutions(big, 2, 3)
    with pytest.raises(BudgetExceeded):
        count_solutions([[1]], 2, 9)
    with pytest.raises(BudgetExceeded):
        brute_isometry([[1]], [[1]], 7)
    big4 = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    with pytest.raises(BudgetExceeded):
        brute_isometry(big4, big4, 2)
    ring = unramified(4)
    gram = [[RingElem.from_int(ring, 1), RingElem.from_int(ring, 0)],
            [RingElem.from_int(ring, 0), RingElem.from_int(ring, 1)]]
    with pytest.raises(BudgetExceeded):
        count_solutions(gram, 2, 3)


def test_parallel_counts_match_serial():
    serial = count_solutions(I2, 2, 5)
    assert count_solutions(I2, 2, 5, jobs=2, split_depth=2) == serial
    rep = density_estimate([[1, 0], [0, 2]], 2, max_level=6, jobs=2, split_depth=2)
    assert rep.value == 16


def test_brute_isometry_square_class_sensitivity():
    # 3 is not a square mod 8, so no isometry (3) -> (1) at three bits,
    # but mod 2 every unit is a square.
    assert brute_isometry([[3]], [[1]], 3) is None
    t = brute_isometry([[3]], [[1]], 1)
    assert t is not None
    assert brute_isometry([[17]], [[1]], 3) is not None  # 17 = 1 mod 8


def test_brute_isometry_identity_and_distinct_classes():
    t = brute_isometry(I2, I2, 3)
    assert t is not None
    a, b, c, d = t[0][0][0], t[0][1][0], t[1][0][0], t[1][1][0]
    assert (a * a + c * c) % 8 == 1
    assert (b * b + d * d) % 8 == 1
    assert (a * b + c * d) % 8 == 0
    assert brute_isometry(HYP, EVEN_NONSPLIT, 2) is None


def test_brute_isometry_extension_ring():
    ring = unramified(2)
    one = RingElem.from_int(ring, 1)
    w = RingElem.from_coeffs(ring, (0, 1))
    # (w) and (1) differ by the unit square class of w mod 8.
    t = brute_isometry([[w]], [[one]], 1)
    assert t is not None


def test_degenerate_gram_rejected_by_density():
    with pytest.raises(ValueError):
        density_estimate([[1, 1], [1, 1]], 2, max_level=4)


def test_asymmetric_gram_rejected():
    with pytest.raises(ValueError):
        count_solutions([[1, 2], [0, 1]], 2, 3)
