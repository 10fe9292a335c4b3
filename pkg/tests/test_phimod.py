import pytest

from bkmod import matrix as mx
from bkmod import samples as sm
from bkmod.errors import EquivarianceError, HeightError, NotIsogeny, ParamsError, ResidualUnsolvable
from bkmod.phimod import (
    ModuleMap,
    PhiModule,
    as_sum_form,
    change_basis,
    classify,
    coker_of_isogeny,
    connected_etale,
    direct_sum,
    dual,
    mult_unipotent,
    solve_residual,
    tensor,
    trivialize_etale,
    validate_height,
)

from conftest import setup


def named(p=2, P=None, M=32, N=6, r=1):
    params, Pe, ring = setup(p, r, N, M, P)
    return params, Pe, ring, Pe.series(ring)


def test_tate_twist_module_has_verschiebung_one():
    _, P, ring, Ps = named()
    M = PhiModule([[Ps]], P)
    chk = validate_height(M)
    assert chk.det_exponent == 1
    assert mx.mat_equal(chk.V, [[ring.one()]])


def test_P_squared_fails_height_one():
    _, P, ring, Ps = named()
    with pytest.raises(HeightError):
        validate_height(PhiModule([[Ps * Ps]], P))
    # but is fine with h = 2
    assert validate_height(PhiModule([[Ps * Ps]], P, 2)).ok


def test_unit_times_u_is_not_height_bounded():
    _, P, ring, _ = named()
    with pytest.raises(HeightError):
        validate_height(PhiModule([[ring.u(1)]], P))


def test_psi_identity_on_random_modules(rng):
    for p in (2, 3):
        _, P, ring, Ps = named(p, M=24, N=4)
        for n in (1, 2, 3):
            M = sm.random_height_one(ring, P, n, rng)
            chk = validate_height(M)
            I = mx.mat_scale(Ps, mx.identity(ring, n))
            assert mx.mat_equal(mx.mat_mul(M.A, chk.V), I)
            assert mx.mat_equal(mx.mat_mul(chk.V, M.A), I)


def test_classification_of_named_modules():
    _, P, ring, Ps = named()
    one = classify(PhiModule([[ring.one()]], P))
    assert one.etale and not one.multiplicative and not one.nilpotent and one.unipotent
    twist = classify(PhiModule([[Ps]], P))
    assert twist.multiplicative and not twist.etale and twist.nilpotent and not twist.unipotent
    mixed = classify(PhiModule([[ring.one(), ring.u(1)], [ring.zero(), Ps]], P))
    assert not mixed.etale and not mixed.multiplicative and mixed.det_exponent == 1


def test_dual_of_tate_twist_is_etale_and_dual_is_involutive(rng):
    _, P, ring, Ps = named()
    D = dual(PhiModule([[Ps]], P))
    assert classify(D).etale
    assert mx.mat_equal(D.A, [[ring.one()]])
    for _ in range(5):
        M = sm.random_height_one(ring, P, 3, rng)
        assert mx.mat_equal(dual(dual(M)).A, M.A)


def test_change_basis_gives_an_equivariant_isomorphism(rng):
    _, P, ring, _ = named(3)
    M = sm.random_height_one(ring, P, 2, rng)
    X = sm.random_gl(ring, 2, rng)
    N, f = change_basis(M, X)
    assert f.is_equivariant()
    assert mx.det(f.F, ring).is_unit()


def test_non_equivariant_map_detected():
    _, P, ring, Ps = named()
    M1, M2 = PhiModule([[ring.one()]], P), PhiModule([[Ps]], P)
    with pytest.raises(EquivarianceError):
        ModuleMap(M1, M2, [[ring.one()]]).check()


def test_connected_etale_recovers_triangular_blocks():
    _, P, ring, Ps = named()
    A = [[ring.one(), ring.u(1)], [ring.zero(), Ps]]
    dec = connected_etale(PhiModule(A, P))
    assert dec.sub.n == 1 and dec.quotient.n == 1
    assert classify(dec.sub).etale
    assert classify(dec.quotient).nilpotent
    assert dec.inclusion.is_equivariant() and dec.projection.is_equivariant()
    comp = mx.mat_mul(dec.projection.F, dec.inclusion.F)
    assert all(x.is_zero() for row in comp for x in row)


def test_connected_etale_on_random_mixed_modules(rng):
    _, P, ring, _ = named()
    for _ in range(6):
        M, d, _, _ = sm.random_mixed(ring, P, 3, rng)
        dec = connected_etale(M)
        assert dec.sub.n == d
        assert classify(dec.sub).etale
        assert classify(dec.quotient).nilpotent


def test_multiplicative_unipotent_sequence():
    _, P, ring, Ps = named(3)
    A = [[Ps, ring.u(1)], [ring.zero(), ring.one()]]
    dec = mult_unipotent(PhiModule(A, P))
    # dual of the connected-etale sequence: unipotent sub, multiplicative quotient
    assert classify(dec.sub).unipotent
    assert classify(dec.quotient).multiplicative
    assert dec.inclusion.is_equivariant() and dec.projection.is_equivariant()


def test_trivialize_swap_module():
    _, P, ring, _ = named(M=32)
    o, z = ring.one(), ring.zero()
    M = PhiModule([[z, o], [o, z]], P)
    triv = trivialize_etale(M)
    bring = triv.U[0][0].ring
    res = mx.mat_mul(mx.mat_mul(mx.mat_phi(triv.U), triv.A_ext), mx.inverse(triv.U, bring))
    assert mx.mat_equal(res, mx.identity(bring, 2))


def test_trivialize_random_etale(rng):
    _, P, ring, _ = named(2, r=2, M=32, N=4)
    for _ in range(3):
        M = sm.random_etale(ring, P, 2, rng)
        triv = trivialize_etale(M)
        assert triv.iterations <= 6


def test_residual_one_plus_p_needs_a_large_field():
    params, P, ring, _ = named(2, N=4)
    A0 = [[params(3)]]
    # x = sigma(x) * 3 needs 3^d = 1 mod 16, so d = 4
    with pytest.raises(ResidualUnsolvable):
        solve_residual(A0, params, budget=3)
    assert solve_residual(A0, params, budget=4)[3] == 4


def test_trivialize_rejects_non_etale():
    _, P, ring, Ps = named()
    with pytest.raises(ParamsError):
        trivialize_etale(PhiModule([[Ps]], P))


def test_cokernel_of_multiplication_by_p():
    params, P, ring, Ps = named(3)
    M = PhiModule([[ring.one(), ring.zero()], [ring.zero(), Ps]], P)
    F = [[ring.const(3), ring.zero()], [ring.zero(), ring.const(9)]]
    T = coker_of_isogeny(ModuleMap(M, M, F))
    assert T.length == 3 and T.killed_by == 2
    S = as_sum_form(T)
    assert S.exponents == [1, 2]


def test_cokernel_needs_an_isogeny():
    _, P, ring, Ps = named()
    M = PhiModule([[ring.one()]], P)
    with pytest.raises(NotIsogeny):
        coker_of_isogeny(ModuleMap(M, M, [[ring.zero()]]))
    with pytest.raises(NotIsogeny):
        coker_of_isogeny(ModuleMap(M, direct_sum(M, M), [[ring.one()], [ring.zero()]]))


def test_tensor_and_direct_sum_heights():
    _, P, ring, Ps = named()
    T = PhiModule([[Ps]], P)
    E = PhiModule([[ring.one()]], P)
    TE = tensor(T, E)
    # heights add under tensor products
    assert TE.n == 1 and TE.h == 2 and classify(TE).det_exponent == 1
    S = direct_sum(T, E)
    assert S.n == 2 and classify(S).det_exponent == 1
