from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gradlie import catalog
from gradlie.catalog import JacobiError, closed_form_derivations
from gradlie.core import AlgebraError, GradedOperator
from gradlie.derivations import (
    build_extension,
    completeness_check,
    derivation_space,
    derivations_by_generators,
    derivations_of_weight,
    h1,
    in_span,
    inner_of_weight,
    inner_space,
    is_derivation,
    is_potentially_nilpotent,
    nil_independent_count,
    span_equal,
)

ONE = Fraction(1)


def ad(L, name):
    return GradedOperator.ad(L, {L.index_of(name): ONE}, f"ad_{name}")


# -- derivation spaces ------------------------------------------------------


def test_n1_dimensions_repeat_with_period_three():
    rep = derivation_space(catalog.build_n1(24), 3)
    dims = rep.dims()
    assert dims[0] == 2
    assert [dims[w] for w in range(0, 15)] == [2, 1, 1] * 5
    assert all(dims[w] == 0 for w in dims if w < 0)


def test_n2_dimensions_repeat_with_period_eight():
    rep = derivation_space(catalog.build_n2(32), 8)
    dims = rep.dims()
    assert [dims[w] for w in range(0, 16)] == [2, 1, 1, 1, 1, 1, 1, 1] * 2


def test_stability_flags_respect_cutoff():
    rep = derivation_space(catalog.build_n1(18), 3, weights=range(-18, 19))
    assert rep.cutoff == 18 - 3 - 2
    assert all(abs(w) <= rep.cutoff for w in rep.stable_weights())
    assert not rep.records[16].stable


def test_abelian_every_linear_map_is_a_derivation(abelian):
    A = abelian(3, 2)
    total = sum(len(derivations_of_weight(A, w)) for w in range(-2, 3))
    assert total == 9


def test_reported_bases_satisfy_leibniz():
    rep = derivation_space(catalog.build_n2(24), 8)
    for w in rep.stable_weights():
        for op in rep.records[w].basis:
            assert op.weight() == w
            assert op.leibniz_defects() == []


def test_inner_derivations_lie_in_derivation_space():
    L = catalog.build_n2(24)
    for w in range(1, 10):
        der = derivations_of_weight(L, w)
        for op in inner_of_weight(L, w):
            assert in_span(op, der)


def test_inner_space_examples(abelian):
    L = catalog.build_n1(12)
    ops = inner_space(L)
    assert len(ops) == L.dim
    assert ops[0]({3: ONE}) == {4: ONE}
    R = catalog.build_Rn1(None, 15)
    adx = inner_space(R)[R.index_of("x") - 1]
    for i in range(1, 6):
        q = R.index_of(f"e{3 * i - 2}")
        assert adx({q: ONE}) == {q: Fraction(-i)}
    assert all(op.is_zero() for op in inner_space(abelian(3, 3)))


# -- H^1 --------------------------------------------------------------------


def test_h1_n1_weight_zero_is_two():
    rep = h1(catalog.build_n1(24), 3, weights=[0, 1, 3])
    assert rep.records[0].h1 == 2
    assert rep.records[0].inner == 0
    assert len(rep.records[0].witnesses) == 2
    assert rep.records[1].h1 == 0
    assert rep.records[3].h1 == 1


@pytest.mark.parametrize("name,N,margin", [("Rn1", 24, 3), ("Rn2", 32, 8)])
def test_h1_vanishes_on_extensions(name, N, margin):
    rep = h1(catalog.build(name, N), margin)
    assert rep.stable_weights()
    assert all(v == 0 for v in rep.values().values())


def test_completeness():
    assert completeness_check(catalog.build_Rn1(None, 24), 3).verdict == "pass"
    rep = completeness_check(catalog.build_n1(24), 3)
    assert rep.verdict == "fail" and not rep.h1_trivial
    assert completeness_check(catalog.build_Rn1(None, 12), 3, min_stable=50).verdict == "indeterminate"


# -- operators --------------------------------------------------------------


def test_potential_nilpotency_examples():
    L = catalog.build_n1(15)
    assert is_potentially_nilpotent(ad(L, "e1"))
    assert is_potentially_nilpotent(GradedOperator(L, {}))
    R = catalog.build_Rn1(None, 15)
    res = is_potentially_nilpotent(ad(R, "x"))
    assert not res
    # the eventual image contains every e_{3i-2}
    support = {k for v in res.eventual_image for k in v}
    assert {R.index_of(f"e{3 * i - 2}") for i in range(1, 6)} <= support


def test_positive_weight_derivations_are_nilpotent():
    rep = derivation_space(catalog.build_n1(18), 3, weights=range(1, 10))
    for w in rep.stable_weights():
        for op in rep.records[w].basis:
            assert is_potentially_nilpotent(op)


def test_nil_independent_count(abelian):
    assert nil_independent_count(catalog.build_n1(24), 3) == 2
    assert nil_independent_count(abelian(1, 4), 1) == 1


def test_nil_independent_count_rejects_non_diagonal_action(abelian):
    with pytest.raises(AlgebraError, match="count undefined"):
        nil_independent_count(abelian(2, 4), 1)


def test_is_derivation():
    L = catalog.build_n2(16)
    assert is_derivation(ad(L, "f3"))
    assert not is_derivation(GradedOperator(L, {1: {1: ONE}}))


# -- extensions -------------------------------------------------------------


def test_build_extension_reproduces_Rn1():
    N = 18
    base = catalog.build_n1(N)
    ds = [closed_form_derivations("n1", p, N) for p in ({"alpha1": 1}, {"alpha1": -1, "beta2": 1})]
    ds = [GradedOperator(base, d.images) for d in ds]
    E = build_extension(base, ds)
    R = catalog.build_Rn1(None, N)
    assert E.table == R.table
    assert [b.label for b in E.basis] == [b.label for b in R.basis]


def test_build_extension_reproduces_Rn2():
    N = 32
    base = catalog.build_n2(N)
    ds = [closed_form_derivations("n2", p, N) for p in ({"alpha1": 1, "beta2": -2}, {"beta2": 1})]
    ds = [GradedOperator(base, d.images) for d in ds]
    E = build_extension(base, ds)
    assert E.table == catalog.build_Rn2(None, N).table


def test_build_extension_rejects_non_derivation():
    base = catalog.build_n1(9)
    with pytest.raises(AlgebraError, match="not a derivation"):
        build_extension(base, [GradedOperator(base, {1: {1: ONE}})])


def test_build_extension_reports_jacobi_witness():
    base = catalog.build_n1(12)
    d1 = GradedOperator(base, closed_form_derivations("n1", {"alpha1": 1}, 12).images)
    d2 = GradedOperator(base, closed_form_derivations("n1", {"beta3": 1}, 12).images)
    # [g0, g1] = e1 is incompatible with the actions
    with pytest.raises(JacobiError) as exc:
        build_extension(base, [d1, d2], {(0, 1): {1: ONE}})
    assert len(exc.value.triple) == 3


# -- generator-image oracle -------------------------------------------------


@pytest.mark.parametrize("name", ["n1", "n2"])
def test_generator_image_method_agrees(name):
    L = catalog.build(name, 12)
    for w in range(-12, 13):
        a = derivations_of_weight(L, w)
        b = derivations_by_generators(L, w)
        assert len(a) == len(b)
        assert span_equal(a, b)


def test_generator_image_method_needs_positive_grading():
    with pytest.raises(AlgebraError):
        derivations_by_generators(catalog.build_Rn1(None, 9), 0)


# -- properties -------------------------------------------------------------

SPACES = {
    "n1": derivation_space(catalog.build_n1(18), 3),
    "n2": derivation_space(catalog.build_n2(24), 8),
    "Rn1": derivation_space(catalog.build_Rn1(None, 18), 3),
}


@given(st.sampled_from(sorted(SPACES)), st.data())
def test_random_combinations_are_derivations(name, data):
    rep = SPACES[name]
    w = data.draw(st.sampled_from(rep.stable_weights()))
    basis = rep.records[w].basis
    if not basis:
        return
    coeffs = data.draw(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4),
                                min_size=len(basis), max_size=len(basis)))
    op = GradedOperator(basis[0].algebra, {})
    for c, b in zip(coeffs, basis):
        op = op + b.scaled(c)
    assert op.leibniz_defects() == []
