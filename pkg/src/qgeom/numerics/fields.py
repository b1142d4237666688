"""Scalar and rank-2 tensor fields on a coordinate chart."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from qgeom.errors import DomainError, InputError
from qgeom.numerics import dual


@dataclass(frozen=True)
class ScalarField:
    """Function on a chart together with its exact differential.

    ``grad`` is an optional closed form; without it the differential comes from
    forward-mode dual numbers.  Both ``func`` and ``grad`` should be written
    with ring operations only so that they accept dual-valued points (this is
    what makes brackets of brackets differentiable).
    """

    func: Callable
    grad: Optional[Callable] = None
    label: str = "generic"
    dim: Optional[int] = None

    def __call__(self, p):
        return self.func(p)

    def differential(self, p):
        if self.grad is not None:
            return self.grad(p)
        return dual.gradient(self.func, p)

    # pointwise algebra; differentials follow the Leibniz rule through duals
    def __add__(self, other):
        g = _as_field(other)
        return ScalarField(lambda p: self(p) + g(p), dim=self.dim)

    __radd__ = __add__

    def __sub__(self, other):
        g = _as_field(other)
        return ScalarField(lambda p: self(p) - g(p), dim=self.dim)

    def __mul__(self, other):
        g = _as_field(other)
        return ScalarField(lambda p: self(p) * g(p), dim=self.dim)

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(lambda p: -self(p), dim=self.dim)


def _as_field(x) -> ScalarField:
    if isinstance(x, ScalarField):
        return x
    return ScalarField(lambda p, c=x: c, lambda p: np.zeros(len(p)), label="constant")


def constant_field(c, dim: Optional[int] = None) -> ScalarField:
    return ScalarField(lambda p: c, lambda p: np.zeros(len(p)), label="constant", dim=dim)


def coordinate_field(i: int, dim: Optional[int] = None) -> ScalarField:
    def grad(p):
        g = np.zeros(len(p))
        g[i] = 1.0
        return g

    return ScalarField(lambda p: p[i], grad, label=f"coordinate[{i}]", dim=dim)


def exact_gradient(f: ScalarField, p) -> np.ndarray:
    """df(p), closed form when available, otherwise by dual numbers."""
    try:
        with np.errstate(divide="raise", invalid="raise", over="raise"):
            g = f.differential(p)
    except (ZeroDivisionError, ValueError, ArithmeticError) as exc:
        if isinstance(exc, (DomainError, InputError)):
            raise
        raise DomainError(f"differential undefined at point: {exc}") from exc
    if np.asarray(g).dtype != object and not np.all(np.isfinite(g)):
        raise DomainError("differential is not finite at point")
    return g


def central_difference_gradient(f: Callable, p, h: float = 1e-6) -> np.ndarray:
    """Independent finite-difference cross-check (never used on the main path)."""
    p = np.asarray(p, dtype=float)
    out = []
    for i in range(len(p)):
        e = np.zeros_like(p)
        e[i] = h
        out.append((f(p + e) - f(p - e)) / (2 * h))
    return np.array(out)


Components = Union[np.ndarray, Callable]


@dataclass(frozen=True)
class TwoTensorField:
    """Contravariant (or covariant) rank-2 tensor field given by component matrices."""

    kind: str
    components: Components

    def __post_init__(self):
        if self.kind not in ("symmetric", "antisymmetric", "mixed"):
            raise InputError(f"unknown tensor kind {self.kind!r}")
        if not callable(self.components):
            M = np.array(self.components)
            M.setflags(write=False)
            object.__setattr__(self, "components", M)
            self._check(M)

    def _check(self, M):
        if M.dtype == object:
            return
        if self.kind == "symmetric" and np.max(np.abs(M - M.T), initial=0) > 1e-12:
            raise InputError("symmetric tensor has a skew part")
        if self.kind == "antisymmetric" and np.max(np.abs(M + M.T), initial=0) > 1e-12:
            raise InputError("antisymmetric tensor has a symmetric part")

    @property
    def is_constant(self) -> bool:
        return not callable(self.components)

    def at(self, p):
        if callable(self.components):
            M = np.asarray(self.components(p))
            self._check(M)
            return M
        return self.components

    def contract(self, p, a, b):
        """T(a, b) = a_i T^{ij} b_j at p for covectors a, b (complex-bilinear)."""
        M = self.at(p)
        if len(a) != M.shape[0] or len(b) != M.shape[1]:
            raise InputError(f"covector lengths {len(a)}, {len(b)} do not match tensor {M.shape}")
        return a @ M @ b

    def symmetric_part(self, p):
        M = self.at(p)
        return (M + M.T) / 2

    def antisymmetric_part(self, p):
        M = self.at(p)
        return (M - M.T) / 2

