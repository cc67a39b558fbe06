import math

import pytest

from gl2kloosterman.field import FieldParams, make_field
from gl2kloosterman.kloosterman import (
    IterationCapError,
    class_number_primitive,
    compare_census_with_class_numbers,
    kloosterman_m_sum,
    kloosterman_sum,
    kloosterman_table,
    kronecker_class_number,
    power_moment,
    reduced_forms,
    theoretical_range,
    twisted_character_sum,
    twisted_character_sum_closed_form,
    value_census,
)
from oracles import NaiveField, kloosterman_m, reduced_forms_unfiltered


def test_q4_values(f4):
    assert kloosterman_sum(f4, 1) == 3
    assert kloosterman_sum(f4, 2) == -1
    assert kloosterman_sum(f4, 3) == -1
    assert kloosterman_m_sum(f4, 2, 1) == 5


def test_zero_argument_rejected(f4):
    with pytest.raises(ValueError):
        kloosterman_sum(f4, 0)
    with pytest.raises(ValueError):
        kloosterman_m_sum(f4, 2, 0)


@pytest.mark.parametrize("r,m", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3), (4, 1), (4, 2)])
def test_against_naive_loops(r, m):
    p = make_field(r)
    F = NaiveField(r, p.modulus)
    table = kloosterman_table(p, m)
    for a in p.nonzero():
        expected = kloosterman_m(F, m, a)
        assert kloosterman_m_sum(p, m, a) == expected
        assert table[a] == expected


def test_iteration_cap():
    with pytest.raises(IterationCapError):
        kloosterman_m_sum(make_field(7), 3, 1)
    with pytest.raises(IterationCapError):
        kloosterman_table(make_field(7), 3)
    assert kloosterman_m_sum(make_field(6), 3, 1) == kloosterman_table(make_field(6), 3)[1]


@pytest.mark.parametrize("r", range(2, 7))
def test_m1_collapses_and_k2_identity(r):
    p = make_field(r)
    k1 = kloosterman_table(p, 1)
    k2 = kloosterman_table(p, 2)
    for a in p.nonzero():
        assert kloosterman_m_sum(p, 1, a) == k1[a]
        assert k2[a] == k1[a] ** 2 - p.q


@pytest.mark.parametrize("r", range(2, 9))
def test_weil_bound_and_frobenius(r):
    p = make_field(r)
    k1 = kloosterman_table(p, 1)
    assert len(k1) == p.q - 1
    for a in p.nonzero():
        assert k1[a] ** 2 <= 4 * p.q
        b = a
        for _ in range(r):
            b = p.mul(b, b)
            assert k1[b] == k1[a]


@pytest.mark.parametrize("r", [2, 3, 4])
def test_frobenius_m2(r):
    p = make_field(r)
    k2 = kloosterman_table(p, 2)
    assert all(k2[p.mul(a, a)] == k2[a] for a in p.nonzero())


def test_moments_q4(f4):
    k1 = kloosterman_table(f4, 1)
    k2 = kloosterman_table(f4, 2)
    assert power_moment(k1, 0) == 3
    assert power_moment(k1, 2) == 11
    assert power_moment(k2, 1) == -1
    assert power_moment(k2, 1) == power_moment(k1, 2) - 4 * 3


@pytest.mark.parametrize("r", range(2, 9))
def test_first_moment_is_one(r):
    assert power_moment(kloosterman_table(make_field(r), 1), 1) == 1


def test_census_examples(f4, f8):
    assert value_census(f4).multiplicity == {-1: 2, 3: 1}
    assert value_census(f8).multiplicity == {-5: 1, -1: 3, 3: 3}


@pytest.mark.parametrize("r", range(2, 9))
def test_census_support_and_total(r):
    p = make_field(r)
    c = value_census(p)
    assert sum(c.multiplicity.values()) == p.q - 1
    assert c.support == theoretical_range(p.q)


def test_theoretical_range():
    assert theoretical_range(4) == [-1, 3]
    assert theoretical_range(8) == [-5, -1, 3]
    for q in (4, 8, 16, 32, 64, 128, 256):
        for t in theoretical_range(q):
            assert abs(t) < 2 * math.sqrt(q) and t % 4 == 3


def test_census_independent_of_modulus():
    a = value_census(make_field(4))
    b = value_census(FieldParams(4, 0b11001))
    assert a.multiplicity == b.multiplicity
    ka = sorted(kloosterman_table(make_field(4), 2).values.values())
    kb = sorted(kloosterman_table(FieldParams(4, 0b11001), 2).values.values())
    assert ka == kb


def test_class_number_examples():
    assert kronecker_class_number(-7) == 1
    assert kronecker_class_number(-15) == 2
    assert kronecker_class_number(-31) == 3
    assert reduced_forms(-15) == [(1, 1, 4), (2, 1, 2)]


def test_class_number_counts_all_forms_once():
    # -63 = -7 * 3^2: four primitive forms plus 3(x^2 + xy + 2y^2)
    assert class_number_primitive(-63) == 4
    assert kronecker_class_number(-63) == 5
    for d in range(-3, -400, -1):
        if d % 4 in (0, 1):
            assert kronecker_class_number(d) == len(reduced_forms(d))


@pytest.mark.parametrize("d", [d for d in range(-3, -160, -1) if d % 4 in (0, 1)])
def test_reduced_forms_against_wide_search(d):
    assert sorted(reduced_forms(d)) == sorted(reduced_forms_unfiltered(d))


def test_class_number_rejects():
    for d in (0, 5, -2, -5):
        with pytest.raises(ValueError):
            kronecker_class_number(d)


@pytest.mark.parametrize("r", [2, 3, 4, 5, 6])
def test_census_matches_class_numbers_at_t2_minus_4q(r):
    cmp_ = compare_census_with_class_numbers(value_census(make_field(r)))
    assert cmp_.matches_4q
    # the t^2 - q reading does not hold (e.g. q = 4, t = 3 gives d = 5 > 0)
    assert not cmp_.matches_q


def test_twisted_examples(f4):
    assert twisted_character_sum(f4, 1, 1) == 5
    assert twisted_character_sum(f4, 1, 0) == 1
    assert twisted_character_sum(f4, 2, 1) == 11
    assert twisted_character_sum_closed_form(f4, 1, 1) == 5
    assert twisted_character_sum_closed_form(f4, 2, 1) == 11


@pytest.mark.parametrize("r", [2, 3])
def test_twisted_naive(r):
    p = make_field(r)
    F = NaiveField(r, p.modulus)
    for m in (1, 2):
        for beta in p.elements():
            expected = sum(F.lam(F.mul(a, beta)) * kloosterman_m(F, m, a) for a in range(1, p.q))
            assert twisted_character_sum(p, m, beta) == expected
