"""Lagrangian mechanics on the velocity phase space TQ.

Points are ordered ``(x¹…x^q, v¹…v^q)``.  The soldering tensor is
``S = dx^j ⊗ ∂/∂v^j`` and the Liouville field is ``Δ = v^j ∂/∂v^j``.
Forms and bivectors are evaluated pointwise with exact derivatives from
dual numbers, so nested brackets (Jacobi) are exact up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from qgeom.errors import DomainError, InputError
from qgeom.hermitian import contract, lie_derivative_residual
from qgeom.numerics import dual
from qgeom.numerics.fields import ScalarField, TwoTensorField

DEGENERACY_TOL = 1e-10
SECOND_ORDER_TOL = 1e-12


@dataclass(frozen=True)
class TangentChart:
    dim_q: int

    def split(self, p):
        if len(p) != 2 * self.dim_q:
            raise InputError(f"point has {len(p)} coordinates, chart needs {2 * self.dim_q}")
        return p[: self.dim_q], p[self.dim_q :]


@dataclass(frozen=True)
class SecondOrderField:
    """Γ = v ∂x + F(x, v) ∂v."""

    force: Callable
    dim_q: int

    def __call__(self, p):
        x, v = TangentChart(self.dim_q).split(p)
        return np.concatenate([np.asarray(v), np.asarray(self.force(x, v))])


def liouville(p):
    """Δ(x, v) = (0, v)."""
    q = len(p) // 2
    return np.concatenate([np.zeros(q), np.asarray(p[q:])])


def second_order_defect(field: Callable, p) -> float:
    """‖S(Γ) − Δ‖ at p, i.e. how far the x-components of Γ are from v."""
    p = np.asarray(p, dtype=float)
    q = len(p) // 2
    return float(np.linalg.norm(np.asarray(field(p), dtype=float)[:q] - p[q:]))


def _q(p) -> int:
    if len(p) % 2:
        raise InputError("tangent-bundle points have even length (x then v)")
    return len(p) // 2


def cartan_one_form(L: Callable, p) -> np.ndarray:
    """θ_L = S*(dL) = (∂L/∂v^j) dx^j."""
    q = _q(p)
    dL = dual.gradient(L, p)
    return np.concatenate([dL[q:], np.zeros(q, dtype=dL.dtype)])


def lagrangian_two_form(L: Callable, p) -> np.ndarray:
    """ω_L = −dθ_L from the blocks ∂²L/∂x∂v and ∂²L/∂v∂v of the exact Hessian."""
    q = _q(p)
    H = dual.hessian(L, p)
    # D[a, b] = ∂_a θ_b, with θ_b = ∂L/∂v^b for the x-slots b and 0 for v-slots
    D = np.zeros_like(H)
    D[:, :q] = H[:, q:]
    return D.T - D


def is_degenerate(omega) -> bool:
    s = np.linalg.svd(np.asarray(omega, dtype=float), compute_uv=False)
    return bool(s[0] == 0 or s[-1] < DEGENERACY_TOL * s[0])


def energy(L: Callable) -> ScalarField:
    """E_L = ΔL − L = v^j ∂L/∂v^j − L."""

    def E(p):
        q = _q(p)
        dL = dual.gradient(L, p)
        return sum(p[q + j] * dL[q + j] for j in range(q)) - L(p)

    return ScalarField(E, label="energy")


def dynamics_residual(L: Callable, gamma: Callable, p) -> float:
    """‖i(Γ)ω_L − dE_L‖ at p."""
    p = np.asarray(p, dtype=float)
    defect = second_order_defect(gamma, p)
    if defect > SECOND_ORDER_TOL * max(1.0, np.abs(p).max()):
        raise InputError(f"field is not second order at p (defect {defect:.3g})")
    omega = lagrangian_two_form(L, p)
    dE = energy(L).differential(p)
    return float(np.linalg.norm(np.asarray(gamma(p), dtype=float) @ omega - dE))


def poisson_from_lagrangian(L: Callable, q: int) -> TwoTensorField:
    """Λ = −ω_L⁻¹ as a point-dependent bivector ({x, v} = 1 for L = ½v²).

    The inverse is taken with dual-aware elimination so that the components
    can themselves be differentiated.
    """

    def components(p):
        if len(p) != 2 * q:
            raise InputError(f"point has {len(p)} coordinates, expected {2 * q}")
        omega = lagrangian_two_form(L, p)
        if is_degenerate(_primal_array(omega)):
            raise DomainError("ω_L is degenerate at this point")
        return -dual.inv(omega) if omega.dtype == object else -np.linalg.inv(omega)

    return TwoTensorField("antisymmetric", components)


def _primal_array(M) -> np.ndarray:
    M = np.asarray(M)
    if M.dtype == object:
        return np.vectorize(lambda c: float(dual.primal(c)), otypes=[float])(M)
    return M.astype(float)


def jacobi_residual(Lam: TwoTensorField, f1: ScalarField, f2: ScalarField, f3: ScalarField, p) -> float:
    """|{{f1,f2},f3} + {{f2,f3},f1} + {{f3,f1},f2}| at p."""
    br = lambda a, b: contract(Lam, a, b)  # noqa: E731
    total = br(br(f1, f2), f3)(p) + br(br(f2, f3), f1)(p) + br(br(f3, f1), f2)(p)
    return float(abs(dual.primal(total)))


def localization_residual(Lam: TwoTensorField, g1: ScalarField, g2: ScalarField, p) -> float:
    """|Λ(dg1, dg2)| for basepoint functions g1, g2."""
    p = np.asarray(p, dtype=float)
    q = _q(p)
    dg = []
    for g in (g1, g2):
        d = np.asarray(g.differential(p), dtype=float)
        if np.any(d[q:] != 0):
            raise InputError("localization needs functions of the basepoint x only")
        dg.append(d)
    return float(abs(Lam.contract(p, dg[0], dg[1])))


def invariance_residual(Lam, gamma: Callable, p, h: float = 1e-4) -> float:
    """Norm of L_Γ Λ at p by flow pull-back."""
    return lie_derivative_residual(gamma, Lam, p, h, variance="contravariant")


# -- fixture systems -------------------------------------------------------------------------


def free_particle(q: int = 1):
    """L = ½|v|² with Γ: F = 0."""
    L = lambda p: sum(p[q + j] * p[q + j] for j in range(q)) * 0.5  # noqa: E731
    return L, SecondOrderField(lambda x, v: np.zeros(q), q)


def harmonic_oscillator(q: int = 1):
    """L = ½(|v|² − |x|²) with Γ: F = −x."""
    L = lambda p: sum(p[q + j] * p[q + j] - p[j] * p[j] for j in range(q)) * 0.5  # noqa: E731
    return L, SecondOrderField(lambda x, v: -np.asarray(x), q)


def linear_lagrangian(q: int = 1):
    """L = Σ v^j: degenerate, ω_L = 0."""
    return lambda p: sum(p[q + j] for j in range(q))
