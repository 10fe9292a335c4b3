import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkmod.coeffs import CoeffParams, WittElem
from bkmod.errors import ParamsError, UnitError
from bkmod.series import EisensteinP, p_unit_factorization, series_ring, weierstrass_divide

from conftest import setup


def test_geometric_series_inverse():
    _, _, ring = setup(3, 1, 4, 16)
    one_minus_u = ring([1, -1])
    inv = one_minus_u.inv()
    assert inv == ring([1] * 16)
    assert not inv.exact


def test_non_unit_inverse_rejected():
    _, _, ring = setup(2, 1, 4, 8)
    with pytest.raises(UnitError):
        ring([2, 1]).inv()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_multiplication_commutative_associative(seed):
    _, _, ring = setup(2, 2, 5, 12)
    rng = np.random.default_rng(seed)
    a, b, c = (ring.random(rng) for _ in range(3))
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_phi_is_a_ring_map(seed):
    _, _, ring = setup(3, 2, 4, 20)
    rng = np.random.default_rng(seed)
    a, b = ring.random(rng, degree=5), ring.random(rng, degree=5)
    assert (a * b).phi() == a.phi() * b.phi()
    assert (a + b).phi() == a.phi() + b.phi()


def test_phi_sends_u_to_u_to_the_p():
    _, _, ring = setup(5, 1, 3, 30)
    assert ring.u(2).phi() == ring.u(10)


def test_exactness_tracks_degree():
    _, _, ring = setup(2, 1, 4, 10)
    f = ring([1, 1, 1])
    assert f.exact and (f * f).exact
    big = ring.u(6) * ring.u(6)
    assert big.is_zero()


def test_division_by_u_plus_p_remainder_is_value_at_minus_p():
    params, P, ring = setup(2, 1, 8, 24)
    f = ring([5, 0, 3, 1])
    res = weierstrass_divide(f, P)
    # oracle: f(-2) computed with integers
    value = 5 + 3 * 4 - 8
    assert res.remainder == ring([value % 256])
    assert res.quotient * P.series(ring) + res.remainder == f


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_weierstrass_division_identity(seed):
    params, P, ring = setup(3, 1, 5, 32, P=[3, 0, 1])
    rng = np.random.default_rng(seed)
    f = ring.random(rng, degree=8)
    res = weierstrass_divide(f, P)
    assert res.remainder.degree() < 2
    assert res.quotient * P.series(ring) + res.remainder == f


def test_p_unit_factorization_recovers_powers():
    params, P, ring = setup(2, 1, 6, 32, P=[2, 2, 1])
    unit = ring([1, 1, 2])
    f = P.series(ring) ** 3 * unit
    fac = p_unit_factorization(f, P)
    assert fac.exponent == 3
    assert fac.unit
    assert fac.cofactor == unit


def test_eisenstein_checks():
    params = CoeffParams(2, 1, 6)
    EisensteinP(params, [2, 0, 1])
    for bad in ([4, 1], [2, 1, 1], [2, 0, 2], [2]):
        with pytest.raises(ParamsError):
            EisensteinP(params, bad)


def test_power_coeffs_match_series_power():
    params, P, ring = setup(3, 1, 5, 16, P=[3, 3, 1])
    assert ring(P.power_coeffs(3)) == P.series(ring) ** 3


def test_rings_do_not_mix():
    _, _, r1 = setup(2, 1, 4, 8)
    _, _, r2 = setup(3, 1, 4, 8)
    with pytest.raises(ParamsError):
        r1.one() + r2.one()
