from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gradlie import catalog
from gradlie.cohomology import (
    d1_matrix,
    d2_residual,
    h1_via_complex,
    h2,
    h2_slice,
    sliced_cocycle_dims,
    unsliced_cocycle_dim,
)
from gradlie.core import AlgebraError, GradedOperator
from gradlie.derivations import derivation_dim
from gradlie.exactla import rank, solve
from gradlie.weights import C1Slice, C2Slice, apply_d1, cocycle_triples, input_cap

ONE = Fraction(1)


def test_d1_of_abelian_is_zero(abelian):
    A = abelian(3, 3)
    for w in (-1, 0, 1):
        assert d1_matrix(A, w).nnz() == 0


def test_d1_kills_inner_derivation():
    L = catalog.build_n1(12)
    f = GradedOperator.ad(L, {1: ONE})
    assert apply_d1(L, f) == {}
    c1 = C1Slice(L, 1)
    coords = c1.coords(f)
    vec = [coords.get(k, Fraction(0)) for k in range(len(c1))]
    assert not any(d1_matrix(L, 1).dot(vec))


def test_rank_of_d1_by_rank_nullity():
    L = catalog.build_n1(12)
    assert rank(d1_matrix(L, 1)) == len(C1Slice(L, 1)) - derivation_dim(L, 1)


def test_d2_residual_vanishes_on_abelian(abelian):
    A = abelian(3, 3)
    phi = {(1, 2): {1: ONE, 3: Fraction(2)}, (2, 3): {2: ONE}}
    assert d2_residual(A, phi, (1, 2, 3)) == {}


def test_d2_residual_detects_non_cocycle():
    L = catalog.build_n1(10)
    phi = {(1, 2): {3: ONE}}
    residuals = [d2_residual(L, phi, t, 0) for t in cocycle_triples(L, 0)]
    assert any(residuals)


def test_d2_residual_rejects_out_of_window_triple():
    L = catalog.build_n1(10)
    with pytest.raises(AlgebraError):
        d2_residual(L, {}, (3, 4, 5), weight=0)


def test_abelian_h2(abelian):
    A = abelian(2, 2)
    dims, _ = h2_slice(A, -1)
    assert (dims.z2, dims.b2, dims.h2) == (2, 0, 2)
    assert h2_slice(A, 0)[0].z2 == 0


def test_h2_witnesses_are_not_coboundaries():
    L = catalog.build_n1(15)
    rep = h2(L, 3)
    nonzero = [r for r in rep.records.values() if r.h2]
    assert nonzero
    for r in nonzero:
        assert len(r.witnesses) == r.h2
        c2 = C2Slice(L, r.weight)
        d1 = d1_matrix(L, r.weight, c2=c2)
        for phi in r.witnesses:
            dense = [Fraction(0)] * len(c2)
            for (a, b), img in phi.items():
                for t, c in img.items():
                    dense[c2.index[(a, b, t)]] = c
            assert solve(d1, dense) is None
            lead = min(c2.index[(a, b, t)] for (a, b), img in phi.items() for t in img)
            assert dense[lead] == 1


@pytest.mark.parametrize("name,N,margin", [("Rn1", 18, 3), ("Rn2", 24, 8)])
def test_h2_vanishes_on_extensions_small(name, N, margin):
    rep = h2(catalog.build(name, N), margin)
    assert rep.stable_weights()
    assert all(v == 0 for v in rep.values().values())


def test_h1_via_complex_matches_derivations(abelian):
    rep = h1_via_complex(catalog.build_n1(18), 3, weights=range(-3, 7))
    assert rep[0].h1 == 2
    assert rep[3].h1 == 1
    assert rep[1].h1 == 0
    R = h1_via_complex(catalog.build_Rn1(None, 18), 3)
    assert all(r.h1 == 0 for r in R.values() if r.stable)
    A = h1_via_complex(abelian(2, 3), 1, weights=[0])
    assert A[0].h1 == 4


@pytest.mark.parametrize("name,N", [("n1", 8), ("n2", 9), ("m2", 8), ("witt_pos", 7), ("exampleL", 8)])
def test_weight_decomposition_is_exhaustive(name, N):
    L = catalog.build(name, N)
    assert unsliced_cocycle_dim(L) == sum(sliced_cocycle_dims(L).values())


def test_unsliced_refuses_large_algebras():
    with pytest.raises(AlgebraError):
        unsliced_cocycle_dim(catalog.build_n1(20))


def test_window_and_quotient_agree_for_nonnegative_weights():
    L = catalog.build_n2(16)
    for w in range(0, 5):
        assert h2_slice(L, w, "window")[0] == h2_slice(L, w, "quotient")[0]


# -- d^2 = 0 ----------------------------------------------------------------

SMALL = {name: catalog.build(name, 12) for name in catalog.FIXTURES}


@st.composite
def one_cochains(draw):
    name = draw(st.sampled_from(sorted(SMALL)))
    L = SMALL[name]
    w = draw(st.integers(-3, 4))
    c1 = C1Slice(L, w)
    if not len(c1):
        return L, w, GradedOperator(L, {})
    cols = draw(st.lists(st.integers(0, len(c1) - 1), min_size=1, max_size=6, unique=True))
    coeff = st.fractions(min_value=-3, max_value=3, max_denominator=3)
    return L, w, c1.operator({c: draw(coeff) for c in cols})


@given(one_cochains())
def test_coboundaries_are_cocycles(data):
    L, w, f = data
    cap = input_cap(L, w)
    pairs = [(a, b) for a in range(1, L.dim + 1) for b in range(a + 1, L.dim + 1)
             if L.degree(a) + L.degree(b) <= cap]
    psi = apply_d1(L, f, pairs)
    for t in cocycle_triples(L, w):
        assert d2_residual(L, psi, t, w) == {}
