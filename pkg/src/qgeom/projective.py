"""Ray-space geometry computed upstairs on ℂⁿ∖{0} and certified projectable.

The rescaled tensors ``G̃ = ⟨ψ|ψ⟩G`` and ``Λ̃ = ⟨ψ|ψ⟩Λ`` contract differentials
of expectation functions into functions that are invariant under ψ ↦ λψ.
For n = 2 the ray space is the Bloch sphere, charted by ``u_k = e_{σ_k}``.

Frozen constants (conventions of :mod:`qgeom.hermitian`):

* ``VARIANCE_KAPPA = 4``:  G̃(de_A, de_A) = 4 (⟨A²⟩ − ⟨A⟩²);
* ``STAR_CONSTANTS = (¼, ¼, 1)``:  ¼ G̃(de_A, de_B) + i¼ Λ̃(de_A, de_B) + e_A e_B = e_{AB};
* ``SPHERE_SYMPLECTIC_AREA = π``:  ∫ ω over the Bloch sphere, positive orientation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from qgeom.errors import CalibrationError, DomainError, InputError, NumericalError, UnsupportedDimensionError
from qgeom.hermitian import (
    RealPoint,
    e_value,
    embed_real,
    expect_e,
    expect_e_complex,
    symplectic_matrix,
    to_complex,
)
from qgeom.numerics import dual
from qgeom.numerics.fields import ScalarField, TwoTensorField
from qgeom.numerics.linalg import SIGMA, as_matrix, random_hermitean, random_state, require_hermitean
from qgeom.numerics.ode import Trajectory

VARIANCE_KAPPA = 4.0
SPHERE_SYMPLECTIC_AREA = math.pi
PROJECTABILITY_TOL = 1e-10


@dataclass(frozen=True)
class BlochPoint:
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.shape != (3,):
            raise InputError("a Bloch point has three coordinates")
        if abs(np.linalg.norm(u) - 1) > 1e-12:
            raise InputError(f"Bloch vector has norm {np.linalg.norm(u)!r}, not 1")
        object.__setattr__(self, "u", u)


@dataclass(frozen=True)
class StarConstants:
    alpha: float
    beta: float
    gamma: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


STAR_CONSTANTS = StarConstants(0.25, 0.25, 1.0)


def _norm2(p):
    N = p @ p
    if dual.primal(N) == 0:
        raise DomainError("undefined at ψ = 0")
    return N


# -- rescaled tensors --------------------------------------------------------------


def rescaled_tensors(p) -> tuple[np.ndarray, np.ndarray]:
    """(G̃, Λ̃) component matrices at the real chart point p."""
    p = np.asarray(p, dtype=float)
    N = _norm2(p)
    n = len(p) // 2
    return N * np.eye(2 * n), N * symplectic_matrix(n)


def rescaled_G(n: int) -> TwoTensorField:
    return TwoTensorField("symmetric", lambda p: np.eye(2 * n) * _norm2(p))


def rescaled_Lambda(n: int) -> TwoTensorField:
    return TwoTensorField("antisymmetric", lambda p: symplectic_matrix(n) * _norm2(p))


def projected_contract(kind: str, f1: ScalarField, f2: ScalarField) -> ScalarField:
    """G̃(df1, df2) or Λ̃(df1, df2); complex-bilinear in the differentials."""
    if kind not in ("symmetric", "antisymmetric"):
        raise InputError("kind must be 'symmetric' or 'antisymmetric'")
    if f1.dim != f2.dim:
        raise InputError(f"dimension mismatch {f1.dim} vs {f2.dim}")

    def value(p):
        N = _norm2(p)
        a, b = f1.differential(p), f2.differential(p)
        if kind == "symmetric":
            return (a @ b) * N
        n = len(p) // 2
        return (a[:n] @ b[n:] - a[n:] @ b[:n]) * N

    return ScalarField(value, dim=f1.dim, label=f"projected-{kind}")


def projected_bracket(A, B, kind: str) -> ScalarField:
    """G̃(de_A, de_B) or Λ̃(de_A, de_B) for hermitean A, B."""
    return projected_contract(kind, expect_e(A), expect_e(B))


# -- projectability ------------------------------------------------------------------


def scale_point(p, lam: complex) -> np.ndarray:
    return embed_real(lam * to_complex(np.asarray(p, dtype=float)))


def random_scalar(rng: np.random.Generator) -> complex:
    """λ ∈ ℂ* with modulus log-uniform in [0.1, 10] and uniform phase."""
    r = 10 ** rng.uniform(-1, 1)
    return r * np.exp(1j * rng.uniform(0, 2 * np.pi))


def projectability_defect(f: Callable, n: int, samples: int, rng: np.random.Generator) -> float:
    """max |f(λψ) − f(ψ)| / max(1, |f(ψ)|) over random (ψ, λ)."""
    worst = 0.0
    for _ in range(samples):
        p = embed_real(random_state(rng, n))
        lam = random_scalar(rng)
        a, b = f(p), f(scale_point(p, lam))
        worst = max(worst, abs(b - a) / max(1.0, abs(a)))
    return worst


def projectability_test(
    f: ScalarField,
    samples: int = 200,
    rng: np.random.Generator | None = None,
    n: int | None = None,
    tol: float = PROJECTABILITY_TOL,
) -> bool:
    """True iff f(λψ) = f(ψ) within ``tol`` on ``samples`` random (ψ, λ)."""
    if n is None:
        if f.dim is None:
            raise InputError("field has no chart dimension; pass n")
        n = f.dim // 2
    rng = np.random.default_rng() if rng is None else rng
    return projectability_defect(f, n, samples, rng) <= tol


# -- Bloch sphere ------------------------------------------------------------------------


def _complex_state(psi) -> np.ndarray:
    if isinstance(psi, RealPoint):
        return psi.to_complex()
    return np.asarray(psi, dtype=complex)


def bloch_map(psi) -> BlochPoint:
    """u_k = ⟨ψ|σ_k|ψ⟩/⟨ψ|ψ⟩ for a state of ℂ² (complex vector or :class:`RealPoint`)."""
    z = _complex_state(psi)
    if z.shape != (2,):
        raise UnsupportedDimensionError("the Bloch chart exists only for n = 2")
    return BlochPoint(np.array([e_value(SIGMA[k], z).real for k in (1, 2, 3)]))


def bloch_trajectory(traj: Trajectory) -> np.ndarray:
    """Rows (t, u1, u2, u3) for a trajectory of real chart states."""
    return np.array([[t, *bloch_map(to_complex(s)).u] for t, s in zip(traj.times, traj.states)])


def write_bloch_csv(fh, rows: Iterable) -> None:
    """CSV with header ``t,u1,u2,u3``; 17 significant digits per value."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "u1", "u2", "u3"])
    for row in rows:
        w.writerow([f"{float(v):.17g}" for v in row])


# -- variance -----------------------------------------------------------------------------


def variance(A, psi) -> float:
    """⟨A²⟩ − ⟨A⟩² in the normalized state ψ (matrix arithmetic)."""
    A = require_hermitean(A)
    z = _complex_state(psi)
    if not np.any(z):
        raise DomainError("variance undefined at ψ = 0")
    return float((e_value(A @ A, z) - e_value(A, z) ** 2).real)


def calibrate_variance(rng: np.random.Generator, dims=(2, 3, 4), samples: int = 50, tol: float = 1e-9) -> float:
    """Least-squares κ in G̃(de_A, de_A) = κ·Var; raises if not a single constant."""
    lhs, rhs = [], []
    for n in dims:
        for _ in range(samples):
            A = random_hermitean(rng, n)
            p = embed_real(random_state(rng, n, normalize=False))
            lhs.append(projected_bracket(A, A, "symmetric")(p))
            rhs.append(variance(A, to_complex(p)))
    lhs, rhs = np.array(lhs), np.array(rhs)
    kappa = float(lhs @ rhs / (rhs @ rhs))
    rel = np.max(np.abs(lhs - kappa * rhs) / np.maximum(np.abs(lhs), 1e-300))
    if rel > tol:
        raise CalibrationError(f"no single variance constant (relative residual {rel:.3g})", rel)
    return kappa


# -- star product --------------------------------------------------------------------------


def star(f: ScalarField, g: ScalarField, c: StarConstants = STAR_CONSTANTS) -> ScalarField:
    """α G̃(df, dg) + iβ Λ̃(df, dg) + γ f g on complexified fields."""
    sym = projected_contract("symmetric", f, g)
    skew = projected_contract("antisymmetric", f, g)
    return ScalarField(
        lambda p: sym(p) * c.alpha + skew(p) * (1j * c.beta) + f(p) * g(p) * c.gamma,
        dim=f.dim,
        label="star",
    )


def _star_columns(A, B, p):
    fA, fB = expect_e_complex(A), expect_e_complex(B)
    return np.array(
        [
            projected_contract("symmetric", fA, fB)(p),
            1j * projected_contract("antisymmetric", fA, fB)(p),
            fA(p) * fB(p),
        ]
    )


def calibrate_star(
    rng: np.random.Generator | None = None,
    dims=(2, 3, 4),
    pairs: int = 50,
    tol: float = 1e-8,
) -> StarConstants:
    """Fit (α, β, γ) so that e_A ⋆ e_B = e_{AB} on random hermitean pairs.

    The fit is a real least-squares solve over real and imaginary parts; the
    returned constants are then checked sample by sample.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    rows, targets = [], []
    for n in dims:
        for _ in range(pairs):
            A, B = random_hermitean(rng, n), random_hermitean(rng, n)
            psi = random_state(rng, n, normalize=False)
            rows.append(_star_columns(A, B, embed_real(psi)))
            targets.append(e_value(A @ B, psi))
    X, y = np.array(rows), np.array(targets)
    Xr = np.vstack([X.real, X.imag])
    yr = np.concatenate([y.real, y.imag])
    coef, *_ = np.linalg.lstsq(Xr, yr, rcond=None)
    resid = float(np.max(np.abs(X @ coef - y) / np.maximum(1.0, np.abs(y))))
    if resid > tol:
        raise CalibrationError(f"star constants do not close (residual {resid:.3g})", resid)
    return StarConstants(*map(float, coef))


# -- observables ----------------------------------------------------------------------------


def projected_hamiltonian_vf(f: ScalarField) -> Callable:
    """X̃_f = Λ̃(·, df)."""

    def X(p):
        N = _norm2(p)
        df = f.differential(p)
        n = len(df) // 2
        return np.concatenate([df[n:], -df[:n]]) * N

    return X


def observable_residual(A, B, C, p) -> float:
    """(L_X G̃)(de_B, de_C) at p for X the projected Hamiltonian field of e_A.

    Evaluated as X(G̃(de_B, de_C)) − G̃(d(X e_B), de_C) − G̃(de_B, d(X e_C)) with
    exact derivatives.
    """
    eA, eB, eC = expect_e(A), expect_e(B), expect_e(C)
    X = projected_hamiltonian_vf(eA)
    h = projected_contract("symmetric", eB, eC)
    XeB = ScalarField(lambda q: eB.differential(q) @ X(q), dim=eB.dim)
    XeC = ScalarField(lambda q: eC.differential(q) @ X(q), dim=eC.dim)
    p = np.asarray(p, dtype=float)
    lhs = dual.gradient(h.func, p) @ X(p)
    rhs = projected_contract("symmetric", XeB, eC)(p) + projected_contract("symmetric", eB, XeC)(p)
    return float(abs(lhs - rhs))


# -- symplectic area of the Bloch sphere --------------------------------------------------------


def _section(w: np.ndarray, chart: str):
    """Section of ℂ²∖{0} → S³ over a stereographic chart, with ∂x and ∂y derivatives."""
    one = np.ones_like(w)
    zero = np.zeros_like(w)
    num = np.stack([one, w], axis=1) if chart == "north" else np.stack([w, one], axis=1)
    dnum_x = np.stack([zero, one], axis=1) if chart == "north" else np.stack([one, zero], axis=1)
    dnum_y = 1j * dnum_x
    q = 1 + np.abs(w) ** 2
    f = q ** -0.5
    fx = -w.real * q ** -1.5
    fy = -w.imag * q ** -1.5
    S = num * f[:, None]
    Sx = dnum_x * f[:, None] + num * fx[:, None]
    Sy = dnum_y * f[:, None] + num * fy[:, None]
    return S, Sx, Sy


def _disc_nodes(n_radial: int, n_angular: int):
    x, wts = np.polynomial.legendre.leggauss(n_radial)
    r = (x + 1) / 2
    wr = wts / 2
    th = np.arange(n_angular) * (2 * np.pi / n_angular)
    R, TH = np.meshgrid(r, th, indexing="ij")
    W = (wr * r)[:, None] * np.full(n_angular, 2 * np.pi / n_angular)[None, :]
    return (R * np.exp(1j * TH)).ravel(), W.ravel()


def integrate_sphere_two_form(
    form: Callable,
    orientation: int = 1,
    n_radial: int = 64,
    n_angular: int = 128,
) -> float:
    """∫ over the Bloch sphere of a phase-invariant 2-form on S³ ⊂ ℂ².

    ``form(S, V, W)`` receives row-stacked states and two tangent vectors and
    returns the form's values.  The sphere is covered by the closed unit discs
    of the two stereographic charts ψ ∝ (1, w) and ψ ∝ (w, 1), which share
    their boundary circle.
    """
    if orientation not in (1, -1):
        raise InputError("orientation must be +1 or -1")
    w, wts = _disc_nodes(n_radial, n_angular)
    total = 0.0
    for chart in ("north", "south"):
        S, Sx, Sy = _section(w, chart)
        vals = form(S, Sx, Sy) if orientation == 1 else form(S, Sy, Sx)
        vals = np.asarray(vals, dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NumericalError("non-finite integrand in sphere quadrature")
        total += float(vals @ wts)
    return total


def omega_form_rows(S, V, W) -> np.ndarray:
    return np.imag(np.sum(np.conj(V) * W, axis=1))


def symplectic_area(orientation: int = 1, n_radial: int = 64, n_angular: int = 128) -> float:
    """Integral of the projected symplectic form over the Bloch sphere (≈ π)."""
    return integrate_sphere_two_form(omega_form_rows, orientation, n_radial, n_angular)


def expectation_differential_rows(A, S, V) -> np.ndarray:
    """de_A(ψ)[v] for row-stacked ψ and v."""
    A = as_matrix(A)
    N = np.sum(np.abs(S) ** 2, axis=1)
    AS = S @ A.T
    eA = np.real(np.sum(np.conj(S) * AS, axis=1)) / N
    return 2 * np.real(np.sum(np.conj(AS) * V, axis=1)) / N - 2 * eA * np.real(np.sum(np.conj(S) * V, axis=1)) / N


def exact_two_form(A, B) -> Callable:
    """d(e_A de_B) = de_A ∧ de_B, an exact form with zero integral over the sphere."""

    def form(S, V, W):
        return expectation_differential_rows(A, S, V) * expectation_differential_rows(B, S, W) - expectation_differential_rows(
            A, S, W
        ) * expectation_differential_rows(B, S, V)

    return form
