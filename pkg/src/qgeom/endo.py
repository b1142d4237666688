"""Endomorphism algebras as geometry on the dual of the hermitean matrices.

Dual points ξ are hermitean matrices paired with operators by
``Â(ξ) = ½ Tr(A ξ)``.  Coordinates come from a hermitean basis ``λ_μ``
orthonormal for that pairing (``½ Tr(λ_μ λ_ν) = δ_μν``); for n = 2 it is
the Pauli basis σ₀…σ₃ and ``z_μ(A) = ½ Tr(σ_μ A)``.

A bilinear map ``B`` with structure constants ``b[a, b, c]`` induces the
linear contravariant tensor ``τ_B^{ab}(z) = b[a, b, c] z_c``.  With the Jordan
product ``A∘C = ½(AC + CA)`` this is ``R``; with the hermitean Lie product
``[A, C]/(2i)`` it is ``I``; and ``τ_{AC} = R + iI``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from qgeom.errors import DomainError, InputError, UnsupportedDimensionError
from qgeom.hermitian import eval_f, poisson_bracket, symmetric_bracket, embed_real
from qgeom.numerics.fields import TwoTensorField
from qgeom.numerics.linalg import (
    SIGMA,
    ComplexOperator,
    anticommutator,
    as_matrix,
    commutator,
    mat_exp,
    random_hermitean,
    random_state,
    require_density,
    require_hermitean,
    require_same_size,
)
from qgeom.numerics.ode import DEFAULT_TOL, Trajectory, integrate

# Heisenberg flow dA/dt = HEISENBERG_SIGN · i[H, A]; +1 makes e_{A(t)}(ψ₀) = e_{A₀}(ψ(t)).
HEISENBERG_SIGN = 1
# Λ(df_A, df_B)(ψ) = MU_POISSON_SCALE · I(dÂ, dB̂)(μ(ψ)), and likewise G vs R.
MU_POISSON_SCALE = 2.0
MU_SYMMETRIC_SCALE = 2.0
# Contraction order of the frozen J construction: J = I · R⁻¹.
J_ORDERING = "IR"
GNS_RANK_TOL = 1e-10


# -- lifts of endomorphisms ---------------------------------------------------------------


@dataclass(frozen=True)
class VerticalField:
    """Linear vector field w ↦ (w, F(w)) on TV, read through its fibre part F."""

    fiber: Callable
    dim: int

    def __call__(self, w):
        return (w, self.fiber(w))

    def matrix(self) -> np.ndarray:
        """The endomorphism generating this field (columns F(e_k))."""
        return np.column_stack([self.fiber(e) for e in np.eye(self.dim, dtype=complex)])


def lift(A) -> tuple[Callable, VerticalField]:
    """(T_A, X_A) with T_A(w, v) = (w, Av) and X_A = T_A ∘ Δ."""
    A = as_matrix(A)

    def T(w, v):
        return (w, A @ v)

    return T, VerticalField(lambda w: T(w, w)[1], A.shape[0])


def liouville(n: int) -> VerticalField:
    """Δ(w) = (w, w)."""
    return VerticalField(lambda w: w, n)


def compose(XA: VerticalField, XC: VerticalField) -> VerticalField:
    """X_A · X_C: apply T_A to the fibre part of X_C, giving X_{AC}."""
    if XA.dim != XC.dim:
        raise InputError(f"fields on spaces of dimension {XA.dim} and {XC.dim}")
    return VerticalField(lambda w: XA.fiber(XC.fiber(w)), XA.dim)


def jordan_compose(XA: VerticalField, XC: VerticalField) -> VerticalField:
    """X_A ∘ X_C = X_{A∘C} with A∘C = ½(AC + CA)."""
    ac, ca = compose(XA, XC), compose(XC, XA)
    return VerticalField(lambda w: (ac.fiber(w) + ca.fiber(w)) / 2, XA.dim)


# -- bases, coordinates and products ----------------------------------------------------------


def hermitian_basis(n: int) -> list[np.ndarray]:
    """Hermitean basis with ½ Tr(λ_μ λ_ν) = δ_μν; equals (σ₀, σ₁, σ₂, σ₃) for n = 2."""
    basis = [np.sqrt(2.0 / n) * np.eye(n, dtype=complex)]
    for j in range(n):
        for k in range(j + 1, n):
            S = np.zeros((n, n), dtype=complex)
            S[j, k] = S[k, j] = 1
            A = np.zeros((n, n), dtype=complex)
            A[j, k], A[k, j] = -1j, 1j
            basis += [S, A]
    for l in range(1, n):
        d = np.zeros(n)
        d[:l] = 1
        d[l] = -l
        basis.append(np.sqrt(2.0 / (l * (l + 1))) * np.diag(d).astype(complex))
    return basis


def dual_coords(A, basis=None) -> np.ndarray:
    """z_μ = ½ Tr(λ_μ A); real for hermitean A."""
    A = as_matrix(A)
    basis = hermitian_basis(A.shape[0]) if basis is None else basis
    z = np.array([0.5 * np.trace(L @ A) for L in basis])
    return z.real if np.allclose(z.imag, 0, atol=1e-15 * max(1.0, np.abs(z).max())) else z


def from_dual_coords(z, n: int) -> np.ndarray:
    basis = hermitian_basis(n)
    if len(z) != len(basis):
        raise InputError(f"{len(z)} coordinates for a basis of size {len(basis)}")
    return sum(c * L for c, L in zip(z, basis))


@dataclass(frozen=True)
class DualPoint:
    """Point of the dual of the hermitean n×n matrices, in basis coordinates."""

    z: np.ndarray
    dim_n: int

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if z.shape != (self.dim_n**2,):
            raise InputError(f"expected {self.dim_n ** 2} coordinates, got {z.shape}")
        object.__setattr__(self, "z", z)

    def matrix(self) -> np.ndarray:
        return from_dual_coords(self.z, self.dim_n)


def pauli_coords(A) -> DualPoint:
    A = require_hermitean(A)
    if A.shape != (2, 2):
        raise UnsupportedDimensionError("Pauli coordinates need 2×2 matrices")
    return DualPoint(dual_coords(A, list(SIGMA)), 2)


def from_pauli_coords(z) -> np.ndarray:
    return sum(c * s for c, s in zip(z, SIGMA))


def jordan_product(A, C) -> np.ndarray:
    return anticommutator(A, C) / 2


def lie_product(A, C) -> np.ndarray:
    """Hermitean Lie product [A, C]/(2i)."""
    return commutator(A, C) / 2j


def lie_product_complex(A, C) -> np.ndarray:
    """½[A, C], the Lie bracket of the complexified algebra."""
    return commutator(A, C) / 2


def associative_product(A, C) -> np.ndarray:
    return as_matrix(A) @ as_matrix(C)


def structure_constants(product: Callable, basis) -> np.ndarray:
    """b[a, b, c] with product(λ_a, λ_b) = Σ_c b[a, b, c] λ_c."""
    m = len(basis)
    b = np.zeros((m, m, m), dtype=complex)
    for i, La in enumerate(basis):
        for j, Lb in enumerate(basis):
            P = product(La, Lb)
            b[i, j] = [0.5 * np.trace(Lc @ P) for Lc in basis]
    return b.real if np.allclose(b.imag, 0, atol=1e-14) else b


def tau_from_bilinear(b) -> TwoTensorField:
    """τ_B with τ_B(df1, df2)(α) = α(B(df1(α), df2(α))), components b[a, b, c] z_c."""
    b = np.asarray(b)
    if b.ndim != 3 or len(set(b.shape)) != 1:
        raise InputError(f"structure constants must be an m×m×m array, got {b.shape}")
    m = b.shape[0]
    if np.allclose(b, np.swapaxes(b, 0, 1), atol=1e-14):
        kind = "symmetric"
    elif np.allclose(b, -np.swapaxes(b, 0, 1), atol=1e-14):
        kind = "antisymmetric"
    else:
        kind = "mixed"

    def components(z):
        z = np.asarray(z)
        if z.shape != (m,):
            raise InputError(f"dual point has {z.shape} coordinates, tensor needs {m}")
        return b @ z

    return TwoTensorField(kind, components)


_EPS = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPS[_i, _j, _k], _EPS[_i, _k, _j] = 1, -1


def tensor_I(z) -> np.ndarray:
    """I = ε_{jkl} z_j ∂_k∧∂_l as a 4×4 antisymmetric component matrix."""
    z = getattr(z, "z", z)
    z = np.asarray(z, dtype=float)
    M = np.zeros((4, 4))
    M[1:, 1:] = np.einsum("jkl,j->kl", _EPS, z[1:])
    return M


def tensor_R(z) -> np.ndarray:
    """Symmetric Jordan tensor from the τ recipe on the Pauli basis."""
    z = getattr(z, "z", z)
    b = structure_constants(jordan_product, list(SIGMA))
    return np.real(tau_from_bilinear(b).at(np.asarray(z, dtype=float)))


def j_operator(z, ordering: str = J_ORDERING, pseudo: bool = False) -> np.ndarray:
    """(1,1) tensor built from I and R⁻¹ (``"IR"``: I·R⁻¹, ``"RI"``: R⁻¹·I).

    With ``pseudo=True`` the Moore-Penrose inverse is used, which is what the
    pure-state cone |z⃗| = |z₀| (where R is singular) needs.
    """
    if ordering not in ("IR", "RI"):
        raise InputError("ordering must be 'IR' or 'RI'")
    I, R = tensor_I(z), tensor_R(z)
    s = np.linalg.svd(R, compute_uv=False)
    if pseudo:
        Rinv = np.linalg.pinv(R, rcond=1e-10)
    else:
        if s[-1] < 1e-10 * max(s[0], 1e-300):
            raise DomainError("R is singular at this dual point")
        Rinv = np.linalg.inv(R)
    return I @ Rinv if ordering == "IR" else Rinv @ I


def j_cubic_defect(z, ordering: str = J_ORDERING, pseudo: bool = False) -> float:
    J = j_operator(z, ordering, pseudo)
    return float(np.linalg.norm(J @ J @ J + J))


def j_cubic_factor(z) -> float:
    """c with J³ = −c J off the cone: c = |z⃗|²/z₀²; equals 1 exactly on the cone."""
    z = np.asarray(getattr(z, "z", z), dtype=float)
    return float(z[1:] @ z[1:] / z[0] ** 2)


# -- hats, brackets and the momentum map -------------------------------------------------------


def hat(A) -> Callable:
    """Â(ξ) = ½ Tr(A ξ)."""
    A = as_matrix(A)
    return lambda xi: 0.5 * np.trace(A @ as_matrix(xi))


def hat_brackets(T1, T2, kind: str) -> np.ndarray:
    """Operator whose hat is the bracket: commutator (lie) or anticommutator (jordan)."""
    require_same_size(T1, T2)
    if kind == "lie":
        return commutator(T1, T2)
    if kind == "jordan":
        return anticommutator(T1, T2)
    raise InputError("kind must be 'lie' or 'jordan'")


def momentum_map(psi) -> ComplexOperator:
    """μ(ψ) = |ψ⟩⟨ψ| (density-tagged for unit ψ)."""
    psi = np.asarray(psi, dtype=complex)
    M = np.outer(psi, psi.conj())
    unit = abs(np.vdot(psi, psi).real - 1) <= 1e-12
    return ComplexOperator(M, "density" if unit else "hermitean")


def _dual_tensors(n: int) -> tuple[TwoTensorField, TwoTensorField]:
    basis = hermitian_basis(n)
    R = tau_from_bilinear(structure_constants(jordan_product, basis))
    I = tau_from_bilinear(structure_constants(lie_product, basis))
    return R, I


def _mu_pairs(A, B, psi, R, I):
    """(Λ-bracket upstairs, I-bracket downstairs, G-bracket upstairs, R-bracket downstairs)."""
    p = embed_real(psi)
    fA, fB = eval_f(A), eval_f(B)
    z = dual_coords(momentum_map(psi))
    a, b = dual_coords(A), dual_coords(B)
    return (
        poisson_bracket(fA, fB)(p),
        I.contract(z, a, b),
        symmetric_bracket(fA, fB)(p),
        R.contract(z, a, b),
    )


def mu_relatedness_residual(A, B, samples: int = 100, rng: np.random.Generator | None = None, kind: str = "both") -> float:
    """Max over random ψ of |Λ(df_A, df_B)(ψ) − c·I(dÂ, dB̂)(μψ)| (and the G/R analogue)."""
    A, B = require_hermitean(A), require_hermitean(B)
    n = require_same_size(A, B)
    if kind not in ("both", "antisymmetric", "symmetric"):
        raise InputError("kind must be 'both', 'antisymmetric' or 'symmetric'")
    rng = np.random.default_rng() if rng is None else rng
    R, I = _dual_tensors(n)
    worst = 0.0
    for _ in range(samples):
        up_l, down_i, up_g, down_r = _mu_pairs(A, B, random_state(rng, n, normalize=False), R, I)
        if kind in ("both", "antisymmetric"):
            worst = max(worst, abs(up_l - MU_POISSON_SCALE * down_i))
        if kind in ("both", "symmetric"):
            worst = max(worst, abs(up_g - MU_SYMMETRIC_SCALE * down_r))
    return float(worst)


def calibrate_mu(rng: np.random.Generator, dims=(2, 3, 4), samples: int = 30) -> tuple[float, float]:
    """Least-squares (symmetric, Poisson) scales relating upstairs and downstairs brackets."""
    ups_g, downs_r, ups_l, downs_i = [], [], [], []
    for n in dims:
        R, I = _dual_tensors(n)
        for _ in range(samples):
            A, B = random_hermitean(rng, n), random_hermitean(rng, n)
            up_l, down_i, up_g, down_r = _mu_pairs(A, B, random_state(rng, n, normalize=False), R, I)
            ups_l.append(up_l)
            downs_i.append(down_i)
            ups_g.append(up_g)
            downs_r.append(down_r)
    fit = lambda u, d: float(np.dot(u, d) / np.dot(d, d))  # noqa: E731
    return fit(np.array(ups_g), np.array(downs_r)), fit(np.array(ups_l), np.array(downs_i))


# -- Heisenberg picture ---------------------------------------------------------------------------


def heisenberg_evolve(H, A0, T: float, tol: float = DEFAULT_TOL) -> Trajectory:
    """Integrate dA/dt = i[H, A]; states are complex n×n matrices."""
    H = require_hermitean(H)
    A0 = as_matrix(A0)
    n = require_same_size(H, A0)

    def field(y):
        A = (y[: n * n] + 1j * y[n * n :]).reshape(n, n)
        dA = HEISENBERG_SIGN * 1j * (H @ A - A @ H)
        return np.concatenate([dA.real.ravel(), dA.imag.ravel()])

    y0 = np.concatenate([A0.real.ravel(), A0.imag.ravel()])
    traj = integrate(field, y0, T, tol)
    states = np.array([(y[: n * n] + 1j * y[n * n :]).reshape(n, n) for y in traj.states])
    return Trajectory(traj.times, states, tol)


def heisenberg_oracle(H, A0, T: float) -> np.ndarray:
    U = mat_exp(-1j * T * as_matrix(H))
    return U.conj().T @ as_matrix(A0) @ U


# -- GNS construction ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class GnsRepresentation:
    """Representation of M_n on the quotient of (M_n, Tr(ρA†B)) by its null space."""

    rho: np.ndarray
    rank: int
    carrier_dim: int
    cyclic_vector: np.ndarray
    _gram: np.ndarray = field(repr=False)
    _basis: np.ndarray = field(repr=False)

    def rep(self, A) -> np.ndarray:
        A = as_matrix(A)
        n = self.rho.shape[0]
        if A.shape != (n, n):
            raise InputError(f"operator of size {A.shape[0]} on a GNS space of M_{n}")
        left = np.kron(A, np.eye(n))
        U = self._basis
        return U.conj().T @ self._gram @ left @ U

    def expectation(self, A) -> complex:
        Om = self.cyclic_vector
        return complex(np.vdot(Om, self.rep(A) @ Om))


def gns_construct(rho) -> GnsRepresentation:
    rho = require_density(rho)
    n = rho.shape[0]
    K = np.kron(np.eye(n), rho.T)  # ⟨A, B⟩_ρ = vec(A)† K vec(B), row-major vec
    K = (K + K.conj().T) / 2
    w, V = np.linalg.eigh(K)
    keep = w > GNS_RANK_TOL * w.max()
    U = V[:, keep] / np.sqrt(w[keep])
    ev = np.linalg.eigvalsh(rho)
    rank = int(np.sum(ev > GNS_RANK_TOL * ev.max()))
    omega = U.conj().T @ K @ np.eye(n, dtype=complex).ravel()
    return GnsRepresentation(rho, rank, int(keep.sum()), omega, K, U)


def gns_defect(gns: GnsRepresentation, rng: np.random.Generator, samples: int = 20) -> float:
    """Max residual of multiplicativity, *-preservation and the state property."""
    n = gns.rho.shape[0]
    worst = 0.0
    for _ in range(samples):
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        rA, rB = gns.rep(A), gns.rep(B)
        worst = max(
            worst,
            np.abs(gns.rep(A @ B) - rA @ rB).max(),
            np.abs(gns.rep(A.conj().T) - rA.conj().T).max(),
            abs(gns.expectation(A) - np.trace(gns.rho @ A)),
        )
    return float(worst)


def gns_report(rho, rng: np.random.Generator | None = None, samples: int = 20) -> dict:
    gns = gns_construct(rho)
    rng = np.random.default_rng(0) if rng is None else rng
    return {"carrier_dim": gns.carrier_dim, "rank": gns.rank, "defect": gns_defect(gns, rng, samples)}


# -- C*-algebra of linear functions ---------------------------------------------------------------------


def cstar_linear(T, S) -> np.ndarray:
    """Product of linear functions: (T̂)⋆(Ŝ) = (TS)^ for complex operators T, S."""
    require_same_size(T, S)
    return as_matrix(T) @ as_matrix(S)


def cstar_decomposition(T, S) -> np.ndarray:
    """½ (jordan hat bracket) + ½ (lie hat bracket); equals :func:`cstar_linear`."""
    return hat_brackets(T, S, "jordan") / 2 + hat_brackets(T, S, "lie") / 2
