import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkmod.coeffs import CoeffParams, WittElem, teichmuller
from bkmod.errors import ParamsError, UnitError


def ext_gcd_inverse(a, m):
    # independent oracle: extended Euclid
    r0, r1, s0, s1 = m, a % m, 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    assert r0 == 1
    return s0 % m


def test_inverse_of_three_mod_sixteen():
    params = CoeffParams(2, 1, 4)
    assert WittElem(params, 3).inv() == WittElem(params, 11)
    assert ext_gcd_inverse(3, 16) == 11


@given(st.integers(0, 3 ** 5 - 1))
def test_prime_field_inverse_matches_euclid(a):
    params = CoeffParams(3, 1, 5)
    x = WittElem(params, a)
    if a % 3 == 0:
        with pytest.raises(UnitError):
            x.inv()
    else:
        assert x.inv() == WittElem(params, ext_gcd_inverse(a, 243))


@settings(max_examples=40)
@given(st.lists(st.integers(0, 63), min_size=2, max_size=2), st.lists(st.integers(0, 63), min_size=2, max_size=2))
def test_ring_axioms_in_unramified_quadratic(a, b):
    params = CoeffParams(2, 2, 6)
    x, y = WittElem(params, a), WittElem(params, b)
    assert x * y == y * x
    assert (x + y) * x == x * x + y * x
    assert (x - y) + y == x


@settings(max_examples=40)
@given(st.lists(st.integers(0, 80), min_size=2, max_size=2), st.lists(st.integers(0, 80), min_size=2, max_size=2))
def test_sigma_is_a_ring_automorphism(a, b):
    params = CoeffParams(3, 2, 4)
    x, y = WittElem(params, a), WittElem(params, b)
    assert (x * y).sigma() == x.sigma() * y.sigma()
    assert (x + y).sigma() == x.sigma() + y.sigma()
    assert x.sigma(2) == x


def test_sigma_is_frobenius_on_residues():
    params = CoeffParams(2, 3, 5)
    for coords in params.residue_field_elements():
        x = WittElem(params, list(coords))
        assert (x.sigma() - x ** 2).valuation() >= 1


def test_generator_is_teichmuller():
    for p, r in ((2, 2), (2, 3), (3, 2)):
        params = CoeffParams(p, r, 6)
        g = params.gen()
        assert g ** (p ** r - 1) == params.one()
        assert g.sigma() == g ** p


def test_teichmuller_lift_is_multiplicative():
    params = CoeffParams(3, 2, 5)
    elems = [WittElem(params, list(c)) for c in params.residue_field_elements()][1:]
    for x in elems[:4]:
        for y in elems[:4]:
            assert teichmuller((x * y).residue()) == teichmuller(x.residue()) * teichmuller(y.residue())


def test_valuation_and_division_by_p():
    params = CoeffParams(5, 1, 6)
    x = WittElem(params, 5 ** 2 * 7)
    assert x.valuation() == 2
    # same ring, meaningful mod p^(N-2)
    assert x.divide_by_p(2) == WittElem(params, 7)
    with pytest.raises(UnitError):
        x.divide_by_p(3)
    assert WittElem(params, 0).valuation() == 6


def test_invalid_parameters_rejected():
    with pytest.raises(ParamsError):
        CoeffParams(4, 1, 3)
    with pytest.raises(ParamsError):
        CoeffParams(2, 1, 0)


def test_mixing_rings_rejected():
    with pytest.raises(ParamsError):
        WittElem(CoeffParams(2, 1, 4), 1) + WittElem(CoeffParams(3, 1, 4), 1)


def test_extension_embeds_the_base():
    base = CoeffParams(2, 2, 5)
    big, cols = base.extension(3)
    assert big.r == 6
    from bkmod.series import extend_witt

    g = base.gen()
    ge = extend_witt(g, big, cols)
    assert ge ** 3 == WittElem(big, 1)
    assert ge * ge + ge + WittElem(big, 1) == WittElem(big, 0) or ge ** 2 != ge
    # the embedding commutes with products
    x, y = WittElem(base, [3, 5]), WittElem(base, [7, 2])
    assert extend_witt(x * y, big, cols) == extend_witt(x, big, cols) * extend_witt(y, big, cols)
