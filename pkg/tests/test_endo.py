import numpy as np
import pytest
import scipy.stats

from qgeom import endo
from qgeom.errors import DomainError, InputError, UnsupportedDimensionError
from qgeom.hermitian import e_value, embed_real, f_value, eval_f
from qgeom.numerics.linalg import SIGMA, random_hermitean, random_state

S0, S1, S2, S3 = SIGMA


def _random_z(rng):
    z = rng.normal(size=4)
    z[0] = abs(z[0]) + 0.5
    return z


def _cone_z(rng):
    v = rng.normal(size=3)
    return np.concatenate([[np.linalg.norm(v)], v])


# -- lifts ---------------------------------------------------------------------------------


def test_T_identity_is_liouville(rng):
    T, X = endo.lift(np.eye(3))
    w, v = random_state(rng, 3), random_state(rng, 3)
    assert np.array_equal(T(w, v)[1], v)
    assert np.array_equal(X(w)[1], endo.liouville(3)(w)[1])


def test_compose_is_matrix_product(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    C = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    XAC = endo.compose(endo.lift(A)[1], endo.lift(C)[1])
    np.testing.assert_allclose(XAC.matrix(), A @ C, atol=1e-13)
    J = endo.jordan_compose(endo.lift(A)[1], endo.lift(C)[1])
    np.testing.assert_allclose(J.matrix(), (A @ C + C @ A) / 2, atol=1e-13)


def test_zero_lift_and_size_mismatch(rng):
    X0 = endo.lift(np.zeros((2, 2)))[1]
    assert not np.any(X0(random_state(rng, 2))[1])
    with pytest.raises(InputError):
        endo.compose(endo.lift(np.eye(2))[1], endo.lift(np.eye(3))[1])


# -- coordinates ------------------------------------------------------------------------------


def test_hermitian_basis_orthonormal():
    for n in (2, 3, 4):
        B = endo.hermitian_basis(n)
        assert len(B) == n * n
        gram = np.array([[0.5 * np.trace(a @ b) for b in B] for a in B])
        np.testing.assert_allclose(gram, np.eye(n * n), atol=1e-14)
    for a, b in zip(endo.hermitian_basis(2), SIGMA):
        np.testing.assert_allclose(a, b, atol=1e-15)


def test_pauli_coords_examples(rng):
    np.testing.assert_array_equal(endo.pauli_coords(S1).z, [0, 1, 0, 0])
    np.testing.assert_array_equal(endo.pauli_coords(S0).z, [1, 0, 0, 0])
    A, B = random_hermitean(rng, 2), random_hermitean(rng, 2)
    np.testing.assert_allclose(endo.pauli_coords(A + B).z, endo.pauli_coords(A).z + endo.pauli_coords(B).z, atol=1e-14)
    with pytest.raises(UnsupportedDimensionError):
        endo.pauli_coords(np.eye(3))


def test_pauli_roundtrip(rng):
    for _ in range(50):
        A = random_hermitean(rng, 2)
        z = endo.pauli_coords(A)
        assert np.abs(z.matrix() - A).max() <= 1e-12
        assert np.abs(endo.from_pauli_coords(z.z) - A).max() <= 1e-12


def test_dual_point_validation():
    with pytest.raises(InputError):
        endo.DualPoint(np.zeros(3), 2)


# -- canonical tensors ------------------------------------------------------------------------------


def test_tau_jordan_agrees_with_tensor_R(rng):
    b = endo.structure_constants(endo.jordan_product, list(SIGMA))
    tau = endo.tau_from_bilinear(b)
    assert tau.kind == "symmetric"
    for _ in range(100):
        z = rng.normal(size=4)
        R = np.zeros((4, 4))
        R[0, :] = R[:, 0] = z
        R[1:, 1:] = z[0] * np.eye(3)
        np.testing.assert_allclose(tau.at(z), R, atol=1e-14)
        np.testing.assert_allclose(endo.tensor_R(z), R, atol=1e-14)


def test_tau_of_zero_product(rng):
    tau = endo.tau_from_bilinear(np.zeros((4, 4, 4)))
    assert not np.any(tau.at(rng.normal(size=4)))


def test_tau_errors():
    with pytest.raises(InputError):
        endo.tau_from_bilinear(np.zeros((2, 3, 4)))
    with pytest.raises(InputError):
        endo.tau_from_bilinear(np.zeros((4, 4, 4))).at(np.zeros(3))


def test_tau_jordan_plus_lie_is_associative(rng):
    for n in (2, 3):
        basis = endo.hermitian_basis(n)
        tj = endo.tau_from_bilinear(endo.structure_constants(endo.jordan_product, basis))
        tl = endo.tau_from_bilinear(endo.structure_constants(endo.lie_product_complex, basis))
        t0 = endo.tau_from_bilinear(endo.structure_constants(endo.associative_product, basis))
        for _ in range(20):
            z = rng.normal(size=n * n)
            a = rng.normal(size=n * n) + 1j * rng.normal(size=n * n)
            c = rng.normal(size=n * n) + 1j * rng.normal(size=n * n)
            lhs = tj.contract(z, a, c) + tl.contract(z, a, c)
            assert abs(lhs - t0.contract(z, a, c)) <= 1e-12


def test_tensor_I_examples():
    assert not np.any(endo.tensor_I([1, 0, 0, 0]))
    I = endo.tensor_I([0, 0, 0, 1])
    assert I[1, 2] == 1 and I[2, 1] == -1
    assert np.count_nonzero(I) == 2


def test_tensor_I_matches_tau_of_lie_product(rng):
    tau = endo.tau_from_bilinear(endo.structure_constants(endo.lie_product, list(SIGMA)))
    assert tau.kind == "antisymmetric"
    for _ in range(100):
        z = rng.normal(size=4)
        assert np.abs(tau.at(z) - endo.tensor_I(z)).max() <= 1e-12


def test_tensor_R_pauli_pairings(rng):
    z = rng.normal(size=4)
    R = endo.tensor_R(z)
    np.testing.assert_allclose(R[1:, 1:], z[0] * np.eye(3), atol=1e-15)
    np.testing.assert_allclose(R[0], z, atol=1e-15)
    # the ∂₃⊗∂₃ component is present
    assert R[3, 3] == pytest.approx(z[0])


# -- J ---------------------------------------------------------------------------------------------


def test_j_vanishes_on_identity_ray():
    J = endo.j_operator([1.0, 0, 0, 0])
    assert not np.any(J)
    assert endo.j_cubic_defect([1.0, 0, 0, 0]) == 0


def test_j_is_nonzero_generically(rng):
    for _ in range(20):
        assert np.linalg.norm(endo.j_operator(_random_z(rng))) > 1e-3


def test_j_singular_R_domain_error():
    with pytest.raises(DomainError):
        endo.j_operator([1.0, 1.0, 0, 0])
    with pytest.raises(InputError):
        endo.j_operator([1.0, 0, 0, 0], ordering="XY")


@pytest.mark.parametrize("ordering", ["IR", "RI"])
def test_j_cubic_scaling_law(rng, ordering):
    for _ in range(100):
        z = _random_z(rng)
        J = endo.j_operator(z, ordering)
        c = endo.j_cubic_factor(z)
        assert np.linalg.norm(J @ J @ J + c * J) <= 1e-9 * max(1, np.linalg.norm(J) ** 3)


def test_j_cubic_holds_on_pure_state_cone(rng):
    for _ in range(100):
        z = _cone_z(rng)
        assert endo.j_cubic_factor(z) == pytest.approx(1.0, rel=1e-12)
        assert endo.j_cubic_defect(z, pseudo=True) <= 1e-9


def test_j_cubic_fails_off_cone_for_both_orderings():
    z = np.array([1.0, 0.3, 0.0, 0.0])
    assert endo.j_cubic_defect(z, "IR") > 1e-3
    assert endo.j_cubic_defect(z, "RI") > 1e-3


def test_momentum_image_lies_on_cone(rng):
    for _ in range(20):
        z = endo.dual_coords(endo.momentum_map(random_state(rng, 2, normalize=False)))
        assert np.linalg.norm(z[1:]) == pytest.approx(z[0], rel=1e-12)


# -- hat brackets ---------------------------------------------------------------------------------------


def test_hat_bracket_examples(rng):
    assert not np.any(endo.hat_brackets(S1, S2, "jordan"))
    np.testing.assert_allclose(endo.hat_brackets(1j * S1, 1j * S2, "lie"), -2j * S3, atol=1e-15)
    A = random_hermitean(rng, 3)
    np.testing.assert_allclose(endo.hat_brackets(np.eye(3), A, "jordan"), 2 * A, atol=1e-15)
    with pytest.raises(InputError):
        endo.hat_brackets(S1, np.eye(3), "lie")
    with pytest.raises(InputError):
        endo.hat_brackets(S1, S2, "other")


def test_lie_jordan_leibniz(rng):
    for _ in range(100):
        n = int(rng.integers(2, 5))
        A, B, C = (random_hermitean(rng, n) for _ in range(3))
        lie = lambda X, Y: endo.hat_brackets(X, Y, "lie")  # noqa: E731
        jor = lambda X, Y: endo.hat_brackets(X, Y, "jordan")  # noqa: E731
        lhs = lie(A, jor(B, C))
        rhs = jor(lie(A, B), C) + jor(B, lie(A, C))
        assert np.abs(lhs - rhs).max() <= 1e-12 * max(1, np.abs(lhs).max())


# -- momentum map -----------------------------------------------------------------------------------------


def test_momentum_map_examples(rng):
    mu = endo.momentum_map([1, 0])
    np.testing.assert_array_equal(mu.entries, [[1, 0], [0, 0]])
    assert mu.tag == "density"
    psi = random_state(rng, 3, normalize=False)
    assert np.trace(endo.momentum_map(psi).entries) == pytest.approx(np.vdot(psi, psi))


def test_hat_of_momentum_is_f(rng):
    for _ in range(50):
        n = int(rng.integers(2, 5))
        A, psi = random_hermitean(rng, n), random_state(rng, n, normalize=False)
        assert abs(endo.hat(A)(endo.momentum_map(psi).entries) - f_value(A, psi)) <= 1e-12


def test_momentum_map_equivariance(rng):
    for _ in range(50):
        n = int(rng.integers(2, 5))
        U = scipy.stats.unitary_group.rvs(n, random_state=rng)
        psi = random_state(rng, n)
        lhs = endo.momentum_map(U @ psi).entries
        rhs = U @ endo.momentum_map(psi).entries @ U.conj().T
        assert np.abs(lhs - rhs).max() <= 1e-12


# -- μ-relatedness -------------------------------------------------------------------------------------------


def test_mu_scales_calibrate_to_frozen_values(rng):
    g, l = endo.calibrate_mu(rng)
    assert g == pytest.approx(endo.MU_SYMMETRIC_SCALE, rel=1e-10)
    assert l == pytest.approx(endo.MU_POISSON_SCALE, rel=1e-10)


def test_mu_relatedness_examples(rng):
    A = random_hermitean(rng, 3)
    assert endo.mu_relatedness_residual(A, A, 20, rng, kind="antisymmetric") <= 1e-12
    assert endo.mu_relatedness_residual(np.eye(3), A, 20, rng, kind="antisymmetric") <= 1e-12
    assert endo.mu_relatedness_residual(S1, S2, 100, rng) <= 1e-9
    with pytest.raises(InputError):
        endo.mu_relatedness_residual(S1, S2, 1, rng, kind="nope")


@pytest.mark.parametrize("n", [2, 3, 4])
def test_mu_relatedness_random(rng, n):
    for _ in range(5):
        A, B = random_hermitean(rng, n), random_hermitean(rng, n)
        assert endo.mu_relatedness_residual(A, B, 20, rng) <= 1e-9


# -- Heisenberg ------------------------------------------------------------------------------------------------


def test_heisenberg_commuting_is_constant():
    traj = endo.heisenberg_evolve(S3, 2 * S3 + S0, 3.0)
    for A in traj.states:
        np.testing.assert_allclose(A, 2 * S3 + S0, atol=1e-12)


def test_heisenberg_pauli_example():
    traj = endo.heisenberg_evolve(S3, S1, np.pi / 4, tol=1e-10)
    s = endo.HEISENBERG_SIGN
    expected = S1 * np.cos(np.pi / 2) - s * S2 * np.sin(np.pi / 2)
    np.testing.assert_allclose(traj.final, expected, atol=1e-9)
    np.testing.assert_allclose(endo.heisenberg_oracle(S3, S1, np.pi / 4), expected, atol=1e-14)


def test_heisenberg_trace_invariants(rng):
    H, A0 = random_hermitean(rng, 3), random_hermitean(rng, 3)
    traj = endo.heisenberg_evolve(H, A0, 5.0)
    t1 = [np.trace(A) for A in traj.states]
    t2 = [np.trace(A @ A) for A in traj.states]
    assert np.abs(np.array(t1) - t1[0]).max() <= 1e-8
    assert np.abs(np.array(t2) - t2[0]).max() <= 1e-8


def test_heisenberg_matches_oracle(rng):
    for n in (2, 3, 4):
        H, A0 = random_hermitean(rng, n), random_hermitean(rng, n)
        tol = 1e-10
        traj = endo.heisenberg_evolve(H, A0, 2.0, tol)
        assert np.abs(traj.final - endo.heisenberg_oracle(H, A0, 2.0)).max() <= 10 * tol


def test_schrodinger_heisenberg_duality(rng):
    from qgeom.hermitian import schrodinger_evolve, to_complex

    for _ in range(20):
        n = int(rng.integers(2, 4))
        H, A0, psi0 = random_hermitean(rng, n), random_hermitean(rng, n), random_state(rng, n)
        for t in (0.1, 1.0, np.pi):
            At = endo.heisenberg_evolve(H, A0, t).final
            psit = to_complex(schrodinger_evolve(H, psi0, t).final)
            assert abs(e_value(At, psi0) - e_value(A0, psit)) <= 1e-7


# -- GNS -------------------------------------------------------------------------------------------------------


def test_gns_pure_state_character():
    gns = endo.gns_construct(np.diag([1.0, 0.0]))
    assert gns.carrier_dim == 2 and gns.rank == 1
    traces = [np.trace(gns.rep(s)) for s in SIGMA]
    np.testing.assert_allclose(traces, [np.trace(s) for s in SIGMA], atol=1e-12)


def test_gns_full_rank():
    gns = endo.gns_construct(np.eye(2) / 2)
    assert gns.carrier_dim == 4 and gns.rank == 2


def test_gns_state_property(rng):
    for n in (2, 3):
        v = rng.uniform(0.1, 1, size=n)
        rho = np.diag(v / v.sum())
        gns = endo.gns_construct(rho)
        for _ in range(50):
            A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            assert abs(gns.expectation(A) - np.trace(rho @ A)) <= 1e-12 * max(1, np.abs(A).max())


def test_gns_star_multiplicative(rng):
    psi = random_state(rng, 3)
    rho = 0.7 * np.outer(psi, psi.conj()) + 0.3 * np.diag([1.0, 0, 0])
    gns = endo.gns_construct(rho)
    assert gns.carrier_dim == 3 * gns.rank == 6
    assert endo.gns_defect(gns, rng, 50) <= 1e-10


def test_gns_rejects_non_density():
    with pytest.raises(InputError):
        endo.gns_construct(np.diag([1.5, -0.5]))


def test_gns_report_keys(rng):
    rep = endo.gns_report(np.eye(2) / 2, rng)
    assert set(rep) == {"carrier_dim", "rank", "defect"}


# -- C* product on linear functions ---------------------------------------------------------------------------


def test_cstar_positivity(rng):
    for _ in range(20):
        A, psi = random_hermitean(rng, 3), random_state(rng, 3)
        val = endo.hat(endo.cstar_linear(A, A))(endo.momentum_map(psi).entries)
        assert val == pytest.approx(0.5 * np.vdot(psi, A @ A @ psi))
        assert val.real >= 0


def test_cstar_unit_and_associativity(rng):
    for _ in range(50):
        T, S, U = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))
        np.testing.assert_allclose(endo.cstar_linear(np.eye(3), T), T, atol=0)
        np.testing.assert_allclose(endo.cstar_linear(T, np.eye(3)), T, atol=0)
        lhs = endo.cstar_linear(endo.cstar_linear(T, S), U)
        rhs = endo.cstar_linear(T, endo.cstar_linear(S, U))
        assert np.abs(lhs - rhs).max() <= 1e-12 * max(1, np.abs(lhs).max())
        np.testing.assert_allclose(endo.cstar_decomposition(T, S), endo.cstar_linear(T, S), atol=1e-13)
    with pytest.raises(InputError):
        endo.cstar_linear(np.eye(2), np.eye(3))


def test_f_field_is_hat_pullback(rng):
    A, psi = random_hermitean(rng, 2), random_state(rng, 2, normalize=False)
    assert eval_f(A)(embed_real(psi)) == pytest.approx(endo.hat(A)(endo.momentum_map(psi).entries).real)
