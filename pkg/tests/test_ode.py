"""The associated singular ODE: elimination from a curve family and back,
coefficient transformation under normalized maps, degreewise Cauchy
extension, low-order invariants, and the closed-form slice transfers."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from crnf.hypersurface import RealHypersurface
from crnf.rationals import GaussRat, Q
from crnf.segre import SegreFamily, segre_of_hypersurface
from crnf.series import MultiSeries
from crnf.ode import (
    CauchyData,
    NormalizedMap,
    SingularODE,
    cauchy_extend,
    compose_maps,
    family_ode_residual,
    low_order_invariants,
    low_slice_forms,
    ode_of_segre,
    segre_of_ode,
    transfer_from_h,
    transform_ode,
)

from conftest import rand_cauchy, rand_family, rand_hypersurface, rand_nmap


def wser(pairs, budget):
    """w-series from {degree: coeff} pairs, zeros dropped."""
    return MultiSeries(("w",), budget,
                       {(j,): GaussRat(c) for j, c in pairs.items() if c},
                       _checked=True)


def pipeline_slices(E):
    """The eight low coefficient slices of an ODE, keyed like
    low_slice_forms."""
    return {"A0": E.coeff_A(0), "A1": E.coeff_A(1), "A2": E.coeff_A(2),
            "B0": E.coeff_B(0), "B1": E.coeff_B(1), "B2": E.coeff_B(2),
            "C0": E.coeff_C(0), "C1": E.coeff_C(1)}


def zero_cauchy(m, order):
    return CauchyData(m, order,
                      MultiSeries.zero(("w",), order),
                      MultiSeries.zero(("w",), order - 1),
                      MultiSeries.zero(("w",), order - 1),
                      MultiSeries.zero(("w",), order - m - 1))


# -- elimination: family -> ODE ---------------------------------------------


def test_model_family_m1_gives_pure_square():
    for sign in (1, -1):
        S = SegreFamily(1, sign, 8, {})
        E = ode_of_segre(S)
        assert E.m == 1 and E.order == 6
        assert E.phi == MultiSeries(("z", "w", "zeta"), 6,
                                    {(0, 0, 2): GaussRat(1)})


def test_model_family_m2_diagonal_slice():
    S = SegreFamily(2, 1, 8, {(2, 2): [0, GaussRat(0, Q(1, 2))]})
    E = ode_of_segre(S)
    assert E.coeff_A(0) == wser({1: 2}, 4)
    assert E.coeff_B(1) == wser({2: -2}, 2)
    assert E.coeff_A(1).is_zero() and E.coeff_B(0).is_zero()


def test_all_h_zero_slices():
    for m in (1, 2, 3):
        for eps in (1, -1):
            h = RealHypersurface(m, eps, 10, {})
            E = ode_of_segre(segre_of_hypersurface(h.to_exponential()))
            assert E.coeff_A(0) == wser({m - 1: m}, 6)
            assert E.coeff_B(1) == wser({2 * m - 2: Q(m * (m + 1), 4)}, 4)
            assert E.coeff_A(1).is_zero()
            assert E.coeff_B(0).is_zero()


def test_residual_vanishes_on_random_families(rng):
    for trial in range(6):
        m = rng.choice((1, 2, 3))
        S = rand_family(rng, m, rng.choice((7, 8, 9)))
        E = ode_of_segre(S)
        assert family_ode_residual(S, E).is_zero()


def test_round_trips_random(rng):
    for trial in range(6):
        m = rng.choice((1, 2, 3))
        sign = rng.choice((1, -1))
        S = rand_family(rng, m, rng.choice((6, 7, 8, 9, 10)), sign=sign)
        E = ode_of_segre(S)
        assert segre_of_ode(E, sign) == S
        S2 = segre_of_ode(E, -sign)
        assert ode_of_segre(S2) == E


def test_segre_of_ode_rejects_raw_input():
    E = SingularODE(1, 6, MultiSeries(("z", "w", "zeta"), 6,
                                      {(0, 0, 1): GaussRat(1)}))
    with pytest.raises(ValueError):
        segre_of_ode(E, 1)


# -- the eight closed slice forms -------------------------------------------


def test_low_slice_forms_match_pipeline(rng):
    for trial in range(6):
        m = rng.choice((1, 2, 3))
        sign = rng.choice((1, -1))
        S = rand_family(rng, m, rng.choice((9, 10)), sign=sign, kmax=4)
        E = ode_of_segre(S)
        assert low_slice_forms(S) == pipeline_slices(E)


def test_low_slice_forms_needs_room():
    with pytest.raises(ValueError):
        low_slice_forms(SegreFamily(1, 1, 6, {}))


def test_transfer_matches_pipeline(rng):
    for trial in range(6):
        m = rng.choice((1, 2, 3))
        eps = rng.choice((1, -1))
        h = rand_hypersurface(rng, m, rng.choice((9, 10)), eps=eps)
        E = ode_of_segre(segre_of_hypersurface(h.to_exponential()))
        tr = transfer_from_h(h)
        assert tr["A0"] == E.coeff_A(0)
        assert tr["A1"] == E.coeff_A(1)
        assert tr["B0"] == E.coeff_B(0)
        assert tr["B1"] == E.coeff_B(1)


def test_transfer_constant_h22_m1():
    c = Q(3, 2)
    h = RealHypersurface(1, 1, 8, {(2, 2): [c]})
    tr = transfer_from_h(h)
    assert tr["A0"] == MultiSeries.constant(GaussRat(1, -2 * c), ("w",), 4)


def test_transfer_sign_keying():
    """Only the slices of odd conjugated degree see the sign."""
    h23 = [0, Q(1, 2), Q(-2)]
    h33 = [Q(1), 0, Q(5, 3)]
    per_eps = {}
    for eps in (1, -1):
        h = RealHypersurface(1, eps, 10, {
            (2, 3): h23, (3, 2): [GaussRat(v).conjugate() for v in h23],
            (3, 3): h33})
        per_eps[eps] = transfer_from_h(h)
    assert per_eps[1]["A0"] == per_eps[-1]["A0"]
    assert per_eps[1]["A1"] == per_eps[-1]["A1"]
    assert per_eps[1]["B0"] == per_eps[-1]["B0"].scale(-1)
    assert per_eps[1]["B1"] + per_eps[-1]["B1"] \
        == wser({0: Q(1)}, 4)  # twice the sign-free pure term m(m+1)/4


def test_transfer_needs_room():
    with pytest.raises(ValueError):
        transfer_from_h(RealHypersurface(1, 1, 5, {}))


# -- coefficient transformation ---------------------------------------------


def test_transform_by_identity(rng):
    m = rng.choice((1, 2, 3))
    S = rand_family(rng, m, 8)
    E = ode_of_segre(S)
    H = NormalizedMap.identity(m, E.order + m + 2)
    assert transform_ode(E, H) == E


def test_transform_functorial(rng):
    for trial in range(4):
        m = rng.choice((1, 2, 3))
        S = rand_family(rng, m, 8)
        E = ode_of_segre(S)
        N = E.order
        H1 = rand_nmap(rng, m, N + m + 2)
        H2 = rand_nmap(rng, m, N + m + 2)
        twice = transform_ode(transform_ode(E, H1), H2)
        once = transform_ode(E, compose_maps(H2, H1))
        assert twice.phi.truncate(once.order) == once.phi.truncate(
            twice.order)


def test_transform_low_invariants_raw_break():
    """A raw quadratic map shifts the fourth invariant by -2 times the
    z^2 jet of f times the third invariant; the first three never move."""
    E = SingularODE(1, 6, MultiSeries(("z", "w", "zeta"), 6,
                                      {(0, 0, 3): GaussRat(1)}))
    f = MultiSeries.monomial(1, (2, 0), ("z", "w"), 9)
    H = NormalizedMap(1, 9, f, MultiSeries.zero(("w",), 8),
                      MultiSeries.zero(("z", "w"), 8))
    out = transform_ode(E, H)
    assert low_order_invariants(E) == (GaussRat(0), GaussRat(0),
                                       GaussRat(1), GaussRat(0))
    assert low_order_invariants(out) == (GaussRat(0), GaussRat(0),
                                         GaussRat(1), GaussRat(-2))


def test_low_invariants_zero_ode():
    E = SingularODE(2, 5, MultiSeries.zero(("z", "w", "zeta"), 5))
    assert low_order_invariants(E) == (GaussRat(0),) * 4


# -- Cauchy extension --------------------------------------------------------


def test_cauchy_zero_data_is_identity(rng):
    for m in (1, 2, 3):
        S = rand_family(rng, m, 9 + m)
        E = ode_of_segre(S)
        H, out = cauchy_extend(E, zero_cauchy(m, E.order))
        assert H == NormalizedMap.identity(m, E.order)
        assert out.phi == E.phi.truncate(out.order)


def test_cauchy_random_data(rng):
    for trial in range(4):
        m = rng.choice((1, 2, 3))
        S = rand_family(rng, m, 9 + m)
        E = ode_of_segre(S)
        Y = rand_cauchy(rng, m, E.order)
        H, out = cauchy_extend(E, Y)
        # the pullback is again in class, and is what transform_ode gives
        assert not out.validate()
        redo = transform_ode(E, H)
        assert redo.phi == out.phi
        # boundary data reproduced exactly
        Yb = H.boundary_data()
        assert Yb.f0 == Y.f0.truncate(Yb.f0.order)
        assert Yb.f1 == Y.f1.truncate(Yb.f1.order)
        assert Yb.g0 == Y.g0.truncate(Yb.g0.order)
        assert Yb.g1 == Y.g1.truncate(Yb.g1.order)


def test_cauchy_morphisms_preserve_low_invariants(rng):
    for trial in range(6):
        m = rng.choice((1, 2, 3))
        S = rand_family(rng, m, 9 + m)
        E = ode_of_segre(S)
        H, out = cauchy_extend(E, rand_cauchy(rng, m, E.order))
        assert low_order_invariants(out) == low_order_invariants(E)
        # in-class maps have no z^2 w^0 jet in f, which is what protects
        # the fourth invariant
        assert not H.f.coeff((2, 0))


def test_cauchy_needs_room():
    E = SingularODE(2, 5, MultiSeries.zero(("z", "w", "zeta"), 5))
    with pytest.raises(ValueError):
        cauchy_extend(E, zero_cauchy(2, 5))


# -- maps: algebra and validation ---------------------------------------


def test_series_pair_round_trip(rng):
    for m in (1, 2, 3):
        H = rand_nmap(rng, m, 8)
        zi, wi = H.series_pair()
        assert NormalizedMap.from_series_pair(m, zi, wi) == H


def test_compose_with_identity(rng):
    m = 2
    H = rand_nmap(rng, m, 8)
    E_id = NormalizedMap.identity(m, 8)
    assert compose_maps(H, E_id) == H
    assert compose_maps(E_id, H) == H


def test_map_validation():
    bad_f = MultiSeries.monomial(1, (1, 0), ("z", "w"), 6)
    H = NormalizedMap(1, 6, bad_f, MultiSeries.zero(("w",), 5),
                      MultiSeries.zero(("z", "w"), 5))
    assert H.validate()
    g0 = MultiSeries.monomial(GaussRat(0, 1), (1,), ("w",), 5)
    H = NormalizedMap(2, 6, MultiSeries.zero(("z", "w"), 6), g0,
                      MultiSeries.zero(("z", "w"), 4))
    assert any("real" in line for line in H.validate())


def test_cauchy_data_validation():
    bad = CauchyData(1, 6,
                     MultiSeries.one(("w",), 6),
                     MultiSeries.zero(("w",), 5),
                     MultiSeries.zero(("w",), 5),
                     MultiSeries.zero(("w",), 4))
    assert bad.validate()
    with pytest.raises(ValueError):
        bad.check()


def test_ode_validation():
    stray = MultiSeries(("z", "w", "zeta"), 5, {(1, 1, 1): GaussRat(2)})
    E = SingularODE(1, 5, stray)
    assert E.validate()
    with pytest.raises(ValueError):
        E.check()


# -- serialization ------------------------------------------------------


def test_ode_json_round_trip(rng):
    S = rand_family(rng, 2, 8)
    E = ode_of_segre(S)
    obj = E.to_json()
    assert set(obj) == {"m", "order", "phi"}
    assert SingularODE.from_json(obj) == E


def test_map_json_round_trip(rng):
    H = rand_nmap(rng, 2, 7)
    assert NormalizedMap.from_json(H.to_json()) == H


# -- properties ---------------------------------------------------------


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from((1, 2, 3)))
def test_round_trip_property(seed, m):
    rng = random.Random(seed)
    sign = rng.choice((1, -1))
    S = rand_family(rng, m, rng.choice((6, 7, 8)), sign=sign)
    assert segre_of_ode(ode_of_segre(S), sign) == S


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from((1, 2, 3)))
def test_residual_property(seed, m):
    rng = random.Random(seed)
    S = rand_family(rng, m, rng.choice((6, 7, 8)))
    E = ode_of_segre(S)
    assert family_ode_residual(S, E).is_zero()


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from((1, 2)))
def test_cauchy_class_property(seed, m):
    rng = random.Random(seed)
    S = rand_family(rng, m, 9 + m)
    E = ode_of_segre(S)
    H, out = cauchy_extend(E, rand_cauchy(rng, m, E.order))
    assert not out.validate()
    assert low_order_invariants(out) == low_order_invariants(E)
