"""Realified Hilbert space ℂⁿ ≅ ℝ²ⁿ with its Kähler data.

Conventions used throughout the package:

* the inner product ``⟨v, w⟩ = Σ conj(v_k) w_k`` is antilinear in the first slot;
* real chart ``p = (x¹…xⁿ, y¹…yⁿ)`` with ``ψ = x + i y``;
* ``g = Re⟨·,·⟩``, ``ω = Im⟨·,·⟩ = Σ dxᵏ∧dyᵏ``, ``J(x, y) = (-y, x)``;
* ``G = Σ ∂x⊗∂x + ∂y⊗∂y`` and ``Λ = Σ ∂x∧∂y`` with
  ``Λ(df, dg) = ∂f/∂x·∂g/∂y − ∂f/∂y·∂g/∂x``;
* Hamiltonian fields are ``X_f = Λ(·, df)``, which makes ``X_{f_H}(ψ) = −iHψ``;
* ``f_A(ψ) = ½⟨ψ|A|ψ⟩`` and ``e_A(ψ) = ⟨ψ|A|ψ⟩ / ⟨ψ|ψ⟩``; ℏ = 1.

With these choices ``G(df_A, df_B) = f_{AB+BA}`` and
``Λ(df_A, df_B) = f_{s·i(AB−BA)}`` with ``s = POISSON_SIGN = −1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from qgeom.errors import DomainError, InputError
from qgeom.numerics import dual
from qgeom.numerics.fields import ScalarField, TwoTensorField
from qgeom.numerics.linalg import as_matrix, mat_exp, require_hermitean
from qgeom.numerics.ode import DEFAULT_TOL, Trajectory, integrate, rk4_flow

POISSON_SIGN = -1


@dataclass(frozen=True)
class RealPoint:
    """Point of ℝ²ⁿ in the chart (x¹…xⁿ, y¹…yⁿ)."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 1 or len(c) % 2:
            raise InputError("a real chart point needs an even number of coordinates")
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return len(self.coords) // 2

    @classmethod
    def from_complex(cls, z) -> "RealPoint":
        return cls(embed_real(z))

    def to_complex(self) -> np.ndarray:
        return to_complex(self.coords)


def embed_real(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag])


def to_complex(p):
    n = len(p) // 2
    return p[:n] + 1j * p[n:]


def realify(A) -> np.ndarray:
    """Real 2n×2n matrix acting on (x, y) as A acts on x + iy."""
    A = as_matrix(A)
    return np.block([[A.real, -A.imag], [A.imag, A.real]])


# -- fundamental tensors ------------------------------------------------------


def metric_matrix(n: int) -> np.ndarray:
    return np.eye(2 * n)


def symplectic_matrix(n: int) -> np.ndarray:
    """Ω with ω(v, w) = vᵀ Ω w; also the component matrix of Λ."""
    I, Z = np.eye(n), np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def complex_structure(n: int) -> np.ndarray:
    I, Z = np.eye(n), np.zeros((n, n))
    return np.block([[Z, -I], [I, Z]])


def G_tensor(n: int) -> TwoTensorField:
    return TwoTensorField("symmetric", metric_matrix(n))


def Lambda_tensor(n: int) -> TwoTensorField:
    return TwoTensorField("antisymmetric", symplectic_matrix(n))


def fundamental_forms(v, w) -> tuple[float, float]:
    """(g(v, w), ω(v, w)) for complex tangent vectors at the same point."""
    h = np.vdot(np.asarray(v, dtype=complex), np.asarray(w, dtype=complex))
    return float(h.real), float(h.imag)


def g_form(v, w) -> float:
    return float(np.dot(v, w))


def omega_form(v, w) -> float:
    return float(v @ symplectic_matrix(len(v) // 2) @ w)


def apply_J(v):
    """Multiplication by i; real vectors are treated in the (x, y) chart."""
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return 1j * v
    n = len(v) // 2
    return np.concatenate([-v[n:], v[:n]])


def canonical_potential(p):
    """θ = ½ Σ (y dx − x dy), the potential with ω = −dθ."""
    n = len(p) // 2
    x, y = p[:n], p[n:]
    return np.concatenate([y * 0.5, x * -0.5])


def exterior_derivative(one_form: Callable, p) -> np.ndarray:
    """(dθ)_{ab} = ∂_a θ_b − ∂_b θ_a, derivatives exact."""
    Jm = dual.jacobian(one_form, p)  # Jm[b, a] = ∂_a θ_b
    return Jm.T - Jm


# -- quadratic function families -----------------------------------------------


def _nonzero(p) -> None:
    if not any(complex(dual.primal(c)) != 0 for c in p):
        raise DomainError("undefined at ψ = 0")


def eval_f(A) -> ScalarField:
    """f_A(ψ) = ½⟨ψ|A|ψ⟩ for hermitean A."""
    A = require_hermitean(A)
    M = realify(A)
    return ScalarField(
        lambda p: (p @ (M @ p)) * 0.5,
        lambda p: M @ p,
        label="f_A",
        dim=M.shape[0],
    )


def expect_e(A) -> ScalarField:
    """e_A(ψ) = ⟨ψ|A|ψ⟩/⟨ψ|ψ⟩ for hermitean A; raises DomainError at ψ = 0."""
    A = require_hermitean(A)
    M = realify(A)

    def value(p):
        _nonzero(p)
        return (p @ (M @ p)) / (p @ p)

    def grad(p):
        _nonzero(p)
        N = p @ p
        Mp = M @ p
        return Mp * (2 / N) - p * (2 * (p @ Mp) / (N * N))

    return ScalarField(value, grad, label="e_A", dim=M.shape[0])


def expect_e_complex(C) -> ScalarField:
    """Complexified expectation function e_C = e_{H1} + i e_{H2}, C = H1 + i H2."""
    C = as_matrix(C)
    H1 = (C + C.conj().T) / 2
    H2 = (C - C.conj().T) / 2j
    e1, e2 = expect_e(H1), expect_e(H2)
    return ScalarField(
        lambda p: e1(p) + 1j * e2(p),
        lambda p: e1.differential(p) + e2.differential(p) * 1j,
        label="e_C",
        dim=e1.dim,
    )


def f_value(A, psi) -> complex:
    """Oracle: ½⟨ψ|A|ψ⟩ by complex matrix arithmetic."""
    psi = np.asarray(psi, dtype=complex)
    return 0.5 * np.vdot(psi, as_matrix(A) @ psi)


def e_value(A, psi) -> complex:
    """Oracle: ⟨ψ|A|ψ⟩/⟨ψ|ψ⟩ by complex matrix arithmetic."""
    psi = np.asarray(psi, dtype=complex)
    N = np.vdot(psi, psi).real
    if N == 0:
        raise DomainError("undefined at ψ = 0")
    return np.vdot(psi, as_matrix(A) @ psi) / N


# -- brackets ------------------------------------------------------------------


def contract(T: TwoTensorField, f1: ScalarField, f2: ScalarField) -> ScalarField:
    """Pointwise T(df1, df2)."""
    if T.is_constant:
        for f in (f1, f2):
            if f.dim is not None and f.dim != T.components.shape[0]:
                raise InputError(f"field of dimension {f.dim} vs tensor {T.components.shape}")
    return ScalarField(lambda p: T.contract(p, f1.differential(p), f2.differential(p)), dim=f1.dim)


def symmetric_bracket(f1: ScalarField, f2: ScalarField) -> ScalarField:
    return contract(G_tensor(_dim(f1, f2) // 2), f1, f2)


def poisson_bracket(f1: ScalarField, f2: ScalarField) -> ScalarField:
    return contract(Lambda_tensor(_dim(f1, f2) // 2), f1, f2)


def _dim(f1: ScalarField, f2: ScalarField) -> int:
    if f1.dim is None or f2.dim is None:
        raise InputError("fields need a known chart dimension")
    if f1.dim != f2.dim:
        raise InputError(f"dimension mismatch {f1.dim} vs {f2.dim}")
    return f1.dim


def laplacian(f: Callable) -> Callable:
    """Flat Laplacian Σ ∂²/∂x² + ∂²/∂y² as an operator on functions."""
    return lambda p: np.trace(dual.hessian(f, p))


def laplacian_bidiff(f1: ScalarField, f2: ScalarField) -> ScalarField:
    """[[Δ, f1], f2] applied to the constant function 1."""

    def comm(f, h):  # ([Δ, f] h) as a function
        lap_fh = laplacian(lambda q: f(q) * h(q))
        lap_h = laplacian(h)
        return lambda p: lap_fh(p) - f(p) * lap_h(p)

    one = lambda q: 1.0  # noqa: E731
    outer = comm(f1, lambda q: f2(q) * one(q))
    inner = comm(f1, one)
    return ScalarField(lambda p: outer(p) - f2(p) * inner(p), dim=f1.dim)


# -- dynamics --------------------------------------------------------------------


def hamiltonian_vf(f: ScalarField) -> Callable:
    """X_f = Λ(·, df); X_{f_H}(ψ) = −iHψ in the real chart."""

    def X(p):
        df = f.differential(p)
        n = len(df) // 2
        return np.concatenate([df[n:], -df[:n]])

    return X


def linear_vf(A) -> Callable:
    """The field ψ ↦ Aψ in the real chart."""
    M = realify(A)
    return lambda p: M @ p


def schrodinger_evolve(H, psi0, T: float, tol: float = DEFAULT_TOL) -> Trajectory:
    """Integrate the Hamiltonian field of f_H; states are real chart points."""
    H = require_hermitean(H)
    p0 = embed_real(psi0)
    if len(p0) != 2 * H.shape[0]:
        raise InputError("state and Hamiltonian sizes differ")
    return integrate(hamiltonian_vf(eval_f(H)), p0, T, tol)


def schrodinger_oracle(H, psi0, T: float) -> np.ndarray:
    return mat_exp(-1j * T * as_matrix(H)) @ np.asarray(psi0, dtype=complex)


# -- Lie derivatives by flow pull-back ---------------------------------------------


def _tensor_at(T, p):
    if isinstance(T, TwoTensorField):
        return T.at(p)
    if callable(T):
        return np.asarray(T(p))
    return np.asarray(T)


def _pullback(field, tensors, p, t, variance):
    q, D = dual.value_and_jacobian(lambda z: rk4_flow(field, z, t), p)
    q, D = q.astype(float), D.astype(float)
    if variance == "covariant":
        return [D.T @ _tensor_at(T, q) @ D for T in tensors]
    Dinv = np.linalg.inv(D)
    return [Dinv @ _tensor_at(T, q) @ Dinv.T for T in tensors]


def lie_derivatives(field, tensors: Sequence, p, h: float = 1e-4, variance: str = "covariant"):
    """Lie derivatives of several rank-2 tensors along ``field`` at ``p``.

    Central differences of the flow pull-back at ±h and ±h/2, combined by
    Richardson extrapolation (error O(h⁴)).
    """
    if variance not in ("covariant", "contravariant"):
        raise InputError("variance must be 'covariant' or 'contravariant'")
    p = np.asarray(p, dtype=float)
    P = {s: _pullback(field, tensors, p, s, variance) for s in (h, -h, h / 2, -h / 2)}
    out = []
    for k in range(len(tensors)):
        d1 = (P[h][k] - P[-h][k]) / (2 * h)
        d2 = (P[h / 2][k] - P[-h / 2][k]) / h
        out.append((4 * d2 - d1) / 3)
    return out


def lie_derivative_residual(field, T, p, h: float = 1e-4, variance: str = "covariant") -> float:
    """Frobenius norm of L_X T at p."""
    return float(np.linalg.norm(lie_derivatives(field, [T], p, h, variance)[0]))


def dilation_field(p):
    """Liouville field Δ(p) = p."""
    return p * 1.0
