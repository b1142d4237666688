import numpy as np
import pytest

from qgeom import hermitian as hm
from qgeom.errors import DomainError, InputError
from qgeom.numerics.fields import ScalarField, constant_field, coordinate_field
from qgeom.numerics.linalg import SIGMA, mat_exp, random_hermitean, random_state

S0, S1, S2, S3 = SIGMA


# -- chart ------------------------------------------------------------------------


def test_embed_real_examples():
    np.testing.assert_array_equal(hm.embed_real([1]), [1, 0])
    np.testing.assert_array_equal(hm.embed_real([1j]), [0, 1])


def test_embed_real_roundtrip_bit_exact(rng):
    z = random_state(rng, 5, normalize=False)
    assert np.array_equal(hm.to_complex(hm.embed_real(z)), z)
    assert np.array_equal(hm.RealPoint.from_complex(z).to_complex(), z)


def test_real_point_validation():
    with pytest.raises(InputError):
        hm.RealPoint(np.zeros(3))
    assert hm.RealPoint(np.zeros(4)).n == 2


# -- fundamental forms ----------------------------------------------------------------


def test_fundamental_forms_examples():
    assert hm.fundamental_forms([1], [1]) == (1.0, 0.0)
    assert hm.fundamental_forms([1], [1j]) == (0.0, 1.0)


def test_fundamental_forms_modulus_and_symmetry(rng):
    for _ in range(20):
        v, w = random_state(rng, 3, False), random_state(rng, 3, False)
        g, om = hm.fundamental_forms(v, w)
        assert g**2 + om**2 == pytest.approx(abs(np.vdot(v, w)) ** 2, rel=1e-12)
        g2, om2 = hm.fundamental_forms(w, v)
        assert g2 == pytest.approx(g, abs=1e-14) and om2 == pytest.approx(-om, abs=1e-14)


def test_real_forms_agree_with_hermitean_product(rng):
    v, w = random_state(rng, 3, False), random_state(rng, 3, False)
    g, om = hm.fundamental_forms(v, w)
    assert hm.g_form(hm.embed_real(v), hm.embed_real(w)) == pytest.approx(g, abs=1e-13)
    assert hm.omega_form(hm.embed_real(v), hm.embed_real(w)) == pytest.approx(om, abs=1e-13)


def test_apply_J_examples(rng):
    np.testing.assert_array_equal(hm.apply_J(np.array([1.0, 0.0])), [0.0, 1.0])
    v = rng.normal(size=6)
    np.testing.assert_array_equal(hm.apply_J(hm.apply_J(v)), -v)


def test_kahler_compatibilities(rng):
    for _ in range(100):
        n = int(rng.integers(1, 5))
        v, w = rng.normal(size=2 * n), rng.normal(size=2 * n)
        Jv, Jw = hm.apply_J(v), hm.apply_J(w)
        assert abs(hm.omega_form(v, w) - hm.g_form(Jv, w)) <= 1e-12
        assert abs(hm.g_form(Jv, Jw) - hm.g_form(v, w)) <= 1e-12
        assert abs(hm.g_form(v, w) + hm.omega_form(Jv, w)) <= 1e-12


def test_omega_is_minus_d_theta(rng):
    for n in (1, 2, 4):
        p = rng.normal(size=2 * n)
        np.testing.assert_allclose(-hm.exterior_derivative(hm.canonical_potential, p), hm.symplectic_matrix(n), atol=1e-10)


# -- f_A and e_A -----------------------------------------------------------------------


def test_eval_f_examples():
    psi = np.array([1.0, 0.0])
    p = hm.embed_real(psi)
    assert hm.eval_f(np.zeros((2, 2)))(p) == 0
    assert hm.eval_f(S0)(p) == pytest.approx(0.5)
    assert hm.eval_f(S3)(p) == pytest.approx(0.5)
    with pytest.raises(InputError):
        hm.eval_f(np.array([[0, 1], [0, 0]]))


def test_eval_f_matches_oracle(rng):
    A, psi = random_hermitean(rng, 4), random_state(rng, 4, False)
    assert hm.eval_f(A)(hm.embed_real(psi)) == pytest.approx(hm.f_value(A, psi).real, rel=1e-13)


def test_expect_e_examples(rng):
    p = hm.embed_real(random_state(rng, 2, False))
    assert hm.expect_e(S0)(p) == pytest.approx(1.0, rel=1e-15)
    assert hm.expect_e(S3)(hm.embed_real(np.array([1, 1]) / np.sqrt(2))) == pytest.approx(0.0, abs=1e-15)


def test_expect_e_homogeneous(rng):
    A = random_hermitean(rng, 3)
    e = hm.expect_e(A)
    for _ in range(20):
        psi = random_state(rng, 3, False)
        lam = complex(*rng.normal(size=2))
        assert e(hm.embed_real(lam * psi)) == pytest.approx(e(hm.embed_real(psi)), rel=1e-12)


def test_expect_e_domain_error():
    with pytest.raises(DomainError):
        hm.expect_e(S1)(np.zeros(4))


# -- brackets --------------------------------------------------------------------------


def test_G_of_coordinate_differentials():
    x1 = coordinate_field(0, dim=4)
    assert hm.symmetric_bracket(x1, x1)(np.array([0.3, 0.1, -2.0, 1.0])) == 1


def test_pauli_brackets(rng):
    f1, f2 = hm.eval_f(S1), hm.eval_f(S2)
    f3x2 = hm.eval_f(2 * S3)
    for _ in range(10):
        p = hm.embed_real(random_state(rng, 2, False))
        assert hm.symmetric_bracket(f1, f2)(p) == pytest.approx(0.0, abs=1e-14)
        # i(σ₁σ₂ − σ₂σ₁) = −2σ₃, so {f_σ1, f_σ2} = f_{s·(−2σ₃)}
        assert hm.poisson_bracket(f1, f2)(p) == pytest.approx(-hm.POISSON_SIGN * f3x2(p), rel=1e-13)


@pytest.mark.parametrize("n", [2, 3, 4, 8])
def test_bracket_identities(rng, n):
    s = hm.POISSON_SIGN
    for _ in range(10):
        A, B = random_hermitean(rng, n), random_hermitean(rng, n)
        fA, fB = hm.eval_f(A), hm.eval_f(B)
        for _ in range(5):
            psi = random_state(rng, n, False)
            p = hm.embed_real(psi)
            sym = hm.f_value(A @ B + B @ A, psi).real
            skew = hm.f_value(s * 1j * (A @ B - B @ A), psi).real
            assert abs(hm.symmetric_bracket(fA, fB)(p) - sym) <= 1e-9 * max(1, abs(sym))
            assert abs(hm.poisson_bracket(fA, fB)(p) - skew) <= 1e-9 * max(1, abs(skew))


def test_bracket_dimension_mismatch():
    with pytest.raises(InputError):
        hm.poisson_bracket(hm.eval_f(S1), hm.eval_f(np.eye(3)))


def test_laplacian_bidiff_examples():
    p = np.array([1.0, 0.0])
    c = constant_field(3.0, dim=2)
    assert hm.laplacian_bidiff(c, c)(p) == 0
    x = coordinate_field(0, dim=2)
    assert hm.laplacian_bidiff(x, x)(p) == 2
    sq = ScalarField(lambda q: q[0] * q[0], dim=2)
    assert hm.laplacian_bidiff(sq, sq)(p) == 8
    assert hm.symmetric_bracket(sq, sq)(p) == 4


def test_laplacian_bidiff_is_twice_G(rng):
    for _ in range(50):
        c = rng.integers(-3, 4, size=6)
        f1 = ScalarField(lambda q, c=c: c[0] * q[0] * q[1] + c[1] * q[1] ** 3 + c[2] * q[0], dim=2)
        f2 = ScalarField(lambda q, c=c: c[3] * q[0] ** 2 + c[4] * q[0] * q[1] ** 2 + c[5], dim=2)
        p = rng.normal(size=2)
        assert hm.laplacian_bidiff(f1, f2)(p) == pytest.approx(2 * hm.symmetric_bracket(f1, f2)(p), rel=1e-12, abs=1e-12)


# -- Hamiltonian vector fields and Schrödinger flow ---------------------------------------------


def test_hamiltonian_vf_examples(rng):
    p = hm.embed_real(random_state(rng, 2, False))
    np.testing.assert_array_equal(hm.hamiltonian_vf(constant_field(1.0, dim=4))(p), np.zeros(4))
    np.testing.assert_allclose(hm.hamiltonian_vf(hm.eval_f(S0))(p), hm.embed_real(-1j * hm.to_complex(p)), atol=1e-15)
    np.testing.assert_allclose(hm.hamiltonian_vf(hm.eval_f(S3))(hm.embed_real([1, 0])), [0, 0, -1, 0], atol=0)


def test_hamiltonian_vf_is_schrodinger(rng):
    for n in (2, 3, 5):
        H = random_hermitean(rng, n)
        psi = random_state(rng, n, False)
        X = hm.hamiltonian_vf(hm.eval_f(H))(hm.embed_real(psi))
        np.testing.assert_allclose(X, hm.embed_real(-1j * H @ psi), atol=1e-13)
        np.testing.assert_allclose(X, hm.linear_vf(-1j * H)(hm.embed_real(psi)), atol=1e-13)


def test_schrodinger_examples():
    psi0 = np.array([1, 1]) / np.sqrt(2)
    traj = hm.schrodinger_evolve(np.zeros((2, 2)), psi0, 1.0)
    assert np.all(traj.states == hm.embed_real(psi0))
    traj = hm.schrodinger_evolve(S3, psi0, np.pi / 2)
    np.testing.assert_allclose(hm.to_complex(traj.final), np.array([-1j, 1j]) / np.sqrt(2), atol=1e-9)


def test_schrodinger_conserves_norm_and_energy(rng):
    H = random_hermitean(rng, 4)
    psi = random_state(rng, 4)
    traj = hm.schrodinger_evolve(H, psi, 10.0)
    f = hm.eval_f(H)
    norms = np.sum(traj.states**2, axis=1)
    assert np.abs(norms - 1).max() <= 1e-8
    assert max(abs(f(s) - f(traj.states[0])) for s in traj.states) <= 1e-8


def test_schrodinger_matches_oracle(rng):
    for n in (2, 3, 4, 8):
        H = random_hermitean(rng, n)
        H *= 5 / np.linalg.norm(H, 2)
        psi = random_state(rng, n)
        traj = hm.schrodinger_evolve(H, psi, 10.0, tol=1e-10)
        assert np.abs(hm.to_complex(traj.final) - mat_exp(-10j * H) @ psi).max() <= 1e-9


# -- Lie derivatives ----------------------------------------------------------------------------


def test_lie_derivative_of_zero_field(rng):
    p = rng.normal(size=4)
    assert hm.lie_derivative_residual(lambda q: q * 0.0, hm.metric_matrix(2), p) == 0


def test_hamiltonian_fields_are_killing_and_symplectic(rng):
    for _ in range(5):
        H = random_hermitean(rng, 3)
        X = hm.hamiltonian_vf(hm.eval_f(H))
        for _ in range(10):
            p = hm.embed_real(random_state(rng, 3))
            Lg, Lw = hm.lie_derivatives(X, [hm.metric_matrix(3), hm.symplectic_matrix(3)], p)
            assert np.linalg.norm(Lg) <= 1e-7 and np.linalg.norm(Lw) <= 1e-7


def test_dilation_is_not_killing(rng):
    p = hm.embed_real(random_state(rng, 2))
    res = hm.lie_derivative_residual(hm.dilation_field, hm.metric_matrix(2), p)
    assert res == pytest.approx(np.linalg.norm(2 * hm.metric_matrix(2)), rel=1e-8)
