import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkmod.errors import FilError, PrecisionError
from bkmod.series import EisensteinP
from bkmod.sring import divide_by_integer, eval_pi, fil1_test, in_I0, make_sring, n_S, phi1_S, phi_S

from conftest import setup

CASES = [(2, [2, 1]), (2, [2, 0, 1]), (3, [3, 1]), (3, [3, 3, 1]), (2, [2, 2, 0, 1])]


def sring_case(p, P, N=6, M=40):
    params, Pe, ring = setup(p, 1, N, M, P)
    return Pe, ring, make_sring(Pe, M)


@pytest.mark.parametrize("p,P", CASES)
def test_embedding_is_a_ring_map(p, P, rng):
    Pe, ring, S = sring_case(p, P)
    for _ in range(5):
        f, g = ring.random(rng, degree=6), ring.random(rng, degree=6)
        assert S.embed(f * g) == S.embed(f) * S.embed(g)
        assert phi_S(S.embed(f)) == S.embed(f.phi())


@pytest.mark.parametrize("p,P", CASES)
def test_multiplication_associative_on_divided_basis(p, P, rng):
    _, _, S = sring_case(p, P)
    for _ in range(5):
        a, b, c = (S.basis(int(i)) for i in rng.integers(0, 12, size=3))
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a


def test_divided_square_of_u_times_two_is_u_squared():
    _, ring, S = sring_case(2, [2, 1])
    # e = 1: u^2 / 2! doubled is u^2
    assert S.basis(2) + S.basis(2) == S.embed(ring.u(2))
    assert S.basis(1) * S.basis(1) == S.basis(2) + S.basis(2)


def test_gamma_P_times_factorial_is_power():
    Pe, ring, S = sring_case(3, [3, 0, 1])
    P = S.embed(Pe.series(ring))
    g3 = S.gamma_P(3)
    assert g3 + g3 + g3 + g3 + g3 + g3 == P * P * P


@pytest.mark.parametrize("p,P", CASES)
def test_fil1_membership(p, P):
    Pe, ring, S = sring_case(p, P)
    assert fil1_test(S.embed(Pe.series(ring)))
    assert fil1_test(S.gamma_P(2))
    assert not fil1_test(S.one())
    assert not fil1_test(S.embed(ring.u(1)))


@pytest.mark.parametrize("p,P", CASES)
def test_c1_is_phi_of_P_over_p_and_a_unit(p, P):
    Pe, ring, S = sring_case(p, P)
    c = S.c1()
    assert c.constant().is_unit()
    phiP = S.embed(Pe.series(ring).phi())
    assert c * S.const(p) == phiP


def test_c1_for_u_plus_two():
    _, ring, S = sring_case(2, [2, 1])
    # phi(u + 2) / 2 = u^2/2 + 1
    assert S.c1() == S.one() + S.basis(2)


def test_phi1_rejects_non_filtration_elements():
    _, ring, S = sring_case(3, [3, 1])
    with pytest.raises(FilError):
        phi1_S(S.one())


def test_monodromy_is_minus_u_d_du():
    _, ring, S = sring_case(2, [2, 0, 1])
    f = ring([1, 2, 3, 4])
    expected = S.embed(ring([0, -2, -6, -12]))
    assert n_S(S.embed(f)) == expected


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_evaluation_at_pi_is_multiplicative_on_polynomials(seed):
    rng = np.random.default_rng(seed)
    Pe, ring, S = sring_case(2, [2, 0, 1])
    f, g = ring.random(rng, degree=5), ring.random(rng, degree=5)
    assert eval_pi(S.embed(f * g)) == eval_pi(S.embed(f)) * eval_pi(S.embed(g))


def test_truncated_element_may_be_undecided_at_p_two():
    _, ring, S = sring_case(2, [2, 1], N=6, M=20)
    P = S.embed(ring([2, 1]))
    truncated = type(P)(S, P.c.copy(), exact=False)
    with pytest.raises(PrecisionError):
        fil1_test(truncated)


def test_divide_by_integer_lowers_precision():
    _, ring, S = sring_case(3, [3, 1])
    x = S.embed(ring([9, 18]))
    y = divide_by_integer(x, 9)
    assert y.eff_N == S.params.N - 2
    assert y == S.embed(ring([1, 2]))


def test_I0_membership_by_support():
    _, ring, S = sring_case(2, [2, 0, 1])
    assert in_I0(S.basis(2))
    assert in_I0(S.basis(5))
    assert not in_I0(S.basis(1))
