"""Verification suites: named, seeded property checks with residuals and tolerances."""

from __future__ import annotations

import itertools
import zlib
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterator

import numpy as np

from qgeom import endo, frobenius, hermitian, lagrangian, projective
from qgeom.errors import CalibrationError, QGeomError, UndecidedError
from qgeom.numerics.fields import ScalarField, coordinate_field
from qgeom.numerics.linalg import (
    SIGMA,
    random_density,
    random_hermitean,
    random_state,
    random_unitary,
)
from qgeom.numerics.ode import integrate

SUITES = ("hermitian", "projective", "endo", "frobenius", "lagrangian")
DEFAULT_DIMS = (2, 3)


@dataclass
class Case:
    id: str
    status: str
    residual: float
    tolerance: float
    bound: str = "upper"
    note: str = ""


@dataclass
class SuiteReport:
    suite: str
    seed: int
    dims: list
    samples: int
    cases: list = field(default_factory=list)
    wall_time: float | None = None

    @property
    def status(self) -> str:
        if any(c.status == "fail" for c in self.cases):
            return "fail"
        if any(c.status == "undecided" for c in self.cases):
            return "undecided"
        return "pass"

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "suite": self.suite,
            "status": self.status,
            "seed": self.seed,
            "dims": list(self.dims),
            "samples": self.samples,
            "cases": [_case_dict(c) for c in sorted(self.cases, key=lambda c: c.id)],
        }
        if timing and self.wall_time is not None:
            out["wall_time"] = self.wall_time
        return out


def _case_dict(c: Case) -> dict:
    d = asdict(c)
    if not np.isfinite(d["residual"]):
        d["residual"] = None
    return d


def _judge(residual: float, tol: float, bound: str) -> str:
    if not np.isfinite(residual):
        return "fail"
    return "pass" if (residual <= tol if bound == "upper" else residual >= tol) else "fail"


def case(id: str, residual: float, tol: float, bound: str = "upper", note: str = "") -> Case:
    residual = float(residual)
    return Case(id, _judge(residual, tol, bound), residual, tol, bound, note)


def case_rng(seed: int, case_id: str) -> np.random.Generator:
    """Independent stream per case, so results do not depend on case order."""
    return np.random.default_rng([seed, zlib.crc32(case_id.encode())])


def _rel(a, b) -> float:
    return float(abs(a - b) / max(1.0, abs(b)))


# -- hermitian --------------------------------------------------------------------------------------------


def hermitian_cases(dims, seed: int, samples: int) -> Iterator[Case]:
    pairs, points = max(1, samples // 5), 5
    for n in dims:
        cid = f"hermitian.brackets.n{n}"
        rng = case_rng(seed, cid)
        sym = skew = 0.0
        for _ in range(pairs):
            A, B = random_hermitean(rng, n), random_hermitean(rng, n)
            fA, fB = hermitian.eval_f(A), hermitian.eval_f(B)
            gb, pb = hermitian.symmetric_bracket(fA, fB), hermitian.poisson_bracket(fA, fB)
            for _ in range(points):
                psi = random_state(rng, n, normalize=False)
                p = hermitian.embed_real(psi)
                sym = max(sym, _rel(gb(p), hermitian.f_value(A @ B + B @ A, psi).real))
                comm = hermitian.POISSON_SIGN * 1j * (A @ B - B @ A)
                skew = max(skew, _rel(pb(p), hermitian.f_value(comm, psi).real))
        yield case(cid + ".symmetric", sym, 1e-9)
        yield case(cid + ".poisson", skew, 1e-9)

        cid = f"hermitian.killing.n{n}"
        rng = case_rng(seed, cid)
        worst = 0.0
        G, W = hermitian.metric_matrix(n), hermitian.symplectic_matrix(n)
        for _ in range(max(1, samples // 20)):
            X = hermitian.hamiltonian_vf(hermitian.eval_f(random_hermitean(rng, n)))
            p = hermitian.embed_real(random_state(rng, n))
            worst = max(worst, *map(np.linalg.norm, hermitian.lie_derivatives(X, [G, W], p)))
        yield case(cid, worst, 1e-7)

        cid = f"hermitian.schrodinger.n{n}"
        rng = case_rng(seed, cid)
        H = random_hermitean(rng, n)
        H *= 5 / np.linalg.norm(H, 2)
        psi = random_state(rng, n)
        traj = hermitian.schrodinger_evolve(H, psi, 10.0)
        err = np.abs(hermitian.to_complex(traj.final) - hermitian.schrodinger_oracle(H, psi, 10.0)).max()
        yield case(cid, err, 1e-8)

    rng = case_rng(seed, "hermitian.dilation")
    p = hermitian.embed_real(random_state(rng, 2))
    res = hermitian.lie_derivative_residual(hermitian.dilation_field, hermitian.metric_matrix(2), p)
    yield case("hermitian.dilation.not_killing", res, 1e-2, "lower")


# -- projective -------------------------------------------------------------------------------------------


def projective_cases(dims, seed: int, samples: int) -> Iterator[Case]:
    rng = case_rng(seed, "projective.variance")
    try:
        kappa = projective.calibrate_variance(rng, dims, samples, tol=1e-9)
        yield case("projective.variance.kappa", abs(kappa - projective.VARIANCE_KAPPA), 1e-9, note=f"kappa={kappa!r}")
    except CalibrationError as exc:
        yield case("projective.variance.kappa", exc.residual, 1e-9, note=str(exc))

    for n in dims:
        cid = f"projective.projectable.n{n}"
        rng = case_rng(seed, cid)
        A, B = random_hermitean(rng, n), random_hermitean(rng, n)
        worst = 0.0
        for kind in ("symmetric", "antisymmetric"):
            worst = max(worst, projective.projectability_defect(projective.projected_bracket(A, B, kind), n, samples, rng))
        yield case(cid + ".brackets", worst, projective.PROJECTABILITY_TOL)
        yield case(cid + ".e_A", projective.projectability_defect(hermitian.expect_e(A), n, samples, rng), 1e-10)
        yield case(cid + ".f_A_fails", projective.projectability_defect(hermitian.eval_f(A), n, samples, rng), 1e-3, "lower")

    area = projective.symplectic_area()
    yield case("projective.sphere.area", abs(area), 1.0, "lower", note=f"area={area!r}")
    rng = case_rng(seed, "projective.sphere.stokes")
    A, B = random_hermitean(rng, 2), random_hermitean(rng, 2)
    yield case("projective.sphere.stokes", abs(projective.integrate_sphere_two_form(projective.exact_two_form(A, B))), 1e-6)

    rng = case_rng(seed, "projective.star")
    try:
        c = projective.calibrate_star(rng, dims=tuple(dims), pairs=max(5, samples // 2), tol=1e-8)
        yield case("projective.star.calibration", max(abs(a - b) for a, b in zip(c.as_tuple(), projective.STAR_CONSTANTS.as_tuple())), 1e-8)
    except CalibrationError as exc:
        yield case("projective.star.calibration", exc.residual, 1e-8, note=str(exc))
    yield case("projective.star.associativity", star_associativity(rng, dims, max(2, samples // 20)), 1e-9)


def star_associativity(rng: np.random.Generator, dims, triples: int) -> float:
    worst = 0.0
    for n in dims:
        for _ in range(triples):
            eA, eB, eC = (hermitian.expect_e_complex(random_hermitean(rng, n)) for _ in range(3))
            p = hermitian.embed_real(random_state(rng, n, normalize=False))
            left = projective.star(projective.star(eA, eB), eC)(p)
            right = projective.star(eA, projective.star(eB, eC))(p)
            worst = max(worst, _rel(left, right))
    return worst


# -- endo ---------------------------------------------------------------------------------------------------


def endo_cases(dims, seed: int, samples: int) -> Iterator[Case]:
    rng = case_rng(seed, "endo.pauli")
    tau_I = endo.tau_from_bilinear(endo.structure_constants(endo.lie_product, list(SIGMA)))
    i_err = r_err = 0.0
    for _ in range(samples):
        z = rng.normal(size=4)
        i_err = max(i_err, np.abs(tau_I.at(z) - endo.tensor_I(z)).max())
        R = endo.tensor_R(z)
        expect = np.zeros((4, 4))
        expect[0, :] = expect[:, 0] = z
        expect[1:, 1:] = z[0] * np.eye(3)
        r_err = max(r_err, np.abs(R - expect).max())
    yield case("endo.pauli.I_tau", i_err, 1e-12)
    yield case("endo.pauli.R_derived", r_err, 1e-12)

    cone = law = 0.0
    for _ in range(samples):
        u = rng.normal(size=3)
        z0 = rng.uniform(0.5, 2.0)
        cone = max(cone, endo.j_cubic_defect(np.concatenate([[z0], z0 * u / np.linalg.norm(u)]), pseudo=True))
        z = rng.normal(size=4)
        J = endo.j_operator(z)
        law = max(law, np.abs(J @ J @ J + endo.j_cubic_factor(z) * J).max() / max(1.0, np.abs(J).max() ** 3))
    yield case("endo.j.cubic.restricted", cone, 1e-9, note=f"ordering={endo.J_ORDERING}; domain: pure-state cone |z_vec| = z0")
    yield case("endo.j.cubic.scaling_law", law, 1e-9, note="J^3 = -(|z_vec|/z0)^2 J off the cone")

    for n in dims:
        cid = f"endo.mu.n{n}"
        rng = case_rng(seed, cid)
        A, B = random_hermitean(rng, n), random_hermitean(rng, n)
        yield case(cid, endo.mu_relatedness_residual(A, B, samples, rng), 1e-9)

        cid = f"endo.gns.n{n}"
        rng = case_rng(seed, cid)
        worst_dim = worst_def = 0.0
        for rank in range(1, n + 1):
            g = endo.gns_construct(random_density(rng, n, rank))
            worst_dim = max(worst_dim, abs(g.carrier_dim - n * rank))
            worst_def = max(worst_def, endo.gns_defect(g, rng, max(2, samples // 10)))
        yield case(cid + ".carrier_dim", worst_dim, 0)
        yield case(cid + ".defect", worst_def, 1e-10)

        cid = f"endo.duality.n{n}"
        rng = case_rng(seed, cid)
        H, A0, psi = random_hermitean(rng, n), random_hermitean(rng, n), random_state(rng, n)
        worst = 0.0
        for t in (0.1, 1.0, np.pi):
            At = endo.heisenberg_evolve(H, A0, t).final
            psit = hermitian.to_complex(hermitian.schrodinger_evolve(H, psi, t).final)
            worst = max(worst, abs(np.vdot(psi, At @ psi) - np.vdot(psit, A0 @ psit)))
        yield case(cid, worst, 1e-7)

        cid = f"endo.momentum.n{n}"
        rng = case_rng(seed, cid)
        worst = 0.0
        for _ in range(max(1, samples // 10)):
            U, psi = random_unitary(rng, n), random_state(rng, n)
            worst = max(worst, np.abs(endo.momentum_map(U @ psi).entries - U @ endo.momentum_map(psi).entries @ U.conj().T).max())
        yield case(cid + ".equivariance", worst, 1e-12)

    rng = case_rng(seed, "endo.hat.leibniz")
    worst = 0.0
    for _ in range(samples):
        n = int(rng.choice(list(dims)))
        A, B, C = (random_hermitean(rng, n) for _ in range(3))
        lhs = endo.hat_brackets(A, endo.hat_brackets(B, C, "jordan"), "lie")
        rhs = endo.hat_brackets(endo.hat_brackets(A, B, "lie"), C, "jordan") + endo.hat_brackets(
            B, endo.hat_brackets(A, C, "lie"), "jordan"
        )
        worst = max(worst, np.abs(lhs - rhs).max() / max(1.0, np.abs(lhs).max()))
    yield case("endo.hat.leibniz", worst, 1e-12)


# -- frobenius ------------------------------------------------------------------------------------------------


def _verdicts(b) -> tuple:
    r = frobenius.frobenius_report(b)
    return r["associative"], r["curvature_flat"], r["ideal_closed"]


def frobenius_cases(dims, seed: int, samples: int) -> Iterator[Case]:
    fixtures = {
        "dual_numbers": (frobenius.dual_numbers(), (True, True, True)),
        "nonassociative_d2": (frobenius.nonassociative_d2(), (False, False, False)),
        "zero_product": (frobenius.zero_product(2), (True, True, True)),
    }
    for name, (b, expected) in fixtures.items():
        got = _verdicts(b)
        if "undecided" in got:
            yield Case(f"frobenius.fixture.{name}", "undecided", 1.0, 0.0, note=f"verdicts={got}")
        else:
            yield case(f"frobenius.fixture.{name}", sum(g != e for g, e in zip(got, expected)), 0, note=f"verdicts={got}")

    got = _verdicts(frobenius.x_dependent_example())
    status = "undecided" if "undecided" in got else "pass"
    yield Case("frobenius.fixture.x_dependent.decided", status, 0.0, 0.0, note=f"verdicts={got}")

    rng = case_rng(seed, "frobenius.random")
    disagree = flat_mismatch = undecided = 0
    count = max(1, samples // 2)
    for _ in range(count):
        d = int(rng.integers(1, 5))
        got = _verdicts(frobenius.random_constant_commutative(rng, d))
        undecided += "undecided" in got
        flat_mismatch += got[0] != got[1]
        disagree += len(set(got)) > 1
    yield case("frobenius.random.curvature_vs_associator", flat_mismatch, 0)
    if undecided:
        yield Case("frobenius.random.three_way", "undecided", float(undecided), 0.0)
    else:
        yield case("frobenius.random.three_way", disagree, 0, note=f"{disagree} of {count} disagree")


# -- lagrangian -------------------------------------------------------------------------------------------------


def lagrangian_cases(dims, seed: int, samples: int) -> Iterator[Case]:
    systems = {"free": lagrangian.free_particle(1), "oscillator": lagrangian.harmonic_oscillator(1)}
    for name, (L, G) in systems.items():
        rng = case_rng(seed, f"lagrangian.{name}")
        pts = rng.normal(size=(samples, 2))
        yield case(f"lagrangian.{name}.dynamics", max(lagrangian.dynamics_residual(L, G, p) for p in pts), 1e-10)
        E = lagrangian.energy(L)
        traj = integrate(G, pts[0], 10.0)
        drift = max(abs(E(s) - E(traj.states[0])) for s in traj.states)
        yield case(f"lagrangian.{name}.energy_drift", drift, 1e-8)
        Lam = lagrangian.poisson_from_lagrangian(L, 1)
        inv = max(lagrangian.invariance_residual(Lam, G, p) for p in pts[:5])
        yield case(f"lagrangian.{name}.invariance", inv, 1e-7)

    L = regular_lagrangian()
    Lam = lagrangian.poisson_from_lagrangian(L, 2)
    rng = case_rng(seed, "lagrangian.regular")
    fs = [coordinate_field(i) for i in range(4)] + [ScalarField(lambda p: p[0] * p[3] + p[2] * p[2] * p[1])]
    jac = loc = 0.0
    for _ in range(max(1, samples // 10)):
        p = rng.normal(size=4) * 0.5
        for f1, f2, f3 in itertools.combinations(fs, 3):
            jac = max(jac, lagrangian.jacobi_residual(Lam, f1, f2, f3, p))
        loc = max(loc, lagrangian.localization_residual(Lam, fs[0], fs[1], p))
    yield case("lagrangian.regular.jacobi", jac, 1e-9)
    yield case("lagrangian.regular.localization", loc, 1e-12)

    omega = lagrangian.lagrangian_two_form(lagrangian.linear_lagrangian(1), np.array([0.3, -0.2]))
    yield case("lagrangian.degenerate.flagged", 0.0 if lagrangian.is_degenerate(omega) else 1.0, 0)


def regular_lagrangian() -> Callable:
    """A q = 2 Lagrangian with position-dependent kinetic term and cross coupling."""

    def L(p):
        x1, x2, v1, v2 = p
        return (1 + x1 * x1) * v1 * v1 * 0.5 + (2 + x1 * x2 * 0.5) * v2 * v2 * 0.5 + v1 * v2 * x2 * 0.3 - x1 * x1 * x2

    return L


_RUNNERS = {
    "hermitian": hermitian_cases,
    "projective": projective_cases,
    "endo": endo_cases,
    "frobenius": frobenius_cases,
    "lagrangian": lagrangian_cases,
}


def run_suite(name: str, dims=DEFAULT_DIMS, seed: int = 0, samples: int = 20) -> SuiteReport:
    """Run one suite (or "all"); errors inside a case become failed cases, never crashes."""
    names = SUITES if name == "all" else (name,)
    if any(n not in _RUNNERS for n in names):
        raise KeyError(name)
    report = SuiteReport(name, seed, list(dims), samples)
    for n in names:
        try:
            report.cases.extend(_RUNNERS[n](tuple(dims), seed, samples))
        except UndecidedError as exc:
            report.cases.append(Case(f"{n}.error", "undecided", float("nan"), 0.0, note=str(exc)))
        except QGeomError as exc:
            report.cases.append(Case(f"{n}.error", "fail", float("nan"), 0.0, note=str(exc)))
    return report
