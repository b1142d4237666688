"""Forward-mode automatic differentiation with tagged dual numbers.

A :class:`Dual` is ``val + eps * ε`` with ``ε² = 0``.  Each seeding call draws a
fresh integer tag; a dual number only combines its ``ε`` part with duals of the
same tag and treats lower-tagged duals as constants.  Nesting (derivatives of
functions that themselves take derivatives) therefore never confuses two
perturbations, and second/third derivatives come from plain recursion.

Components may be any ring-like scalar: ``float``, ``complex``, ``Fraction``
(exact results for rational functions) or :class:`~qgeom.numerics.poly.Polynomial`
(symbolic derivatives by coefficient arithmetic).
"""

from __future__ import annotations

import cmath
import itertools
import math
import numbers
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

_TAGS = itertools.count(1)


def _new_tag() -> int:
    return next(_TAGS)


class Dual:
    __slots__ = ("val", "eps", "tag")

    def __init__(self, val, eps, tag: int):
        self.val = val
        self.eps = eps
        self.tag = tag

    def __repr__(self) -> str:
        return f"Dual({self.val!r}, {self.eps!r}, tag={self.tag})"

    # -- arithmetic ------------------------------------------------------
    # Rule: a dual with a larger tag is the outer structure; anything else
    # (plain scalar or lower-tagged dual) is a constant for this tag.

    def _outer(self, other) -> bool:
        return isinstance(other, Dual) and other.tag > self.tag

    def __add__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if self._outer(other):
            return other.__radd__(self)
        if isinstance(other, Dual) and other.tag == self.tag:
            return Dual(self.val + other.val, self.eps + other.eps, self.tag)
        return Dual(self.val + other, self.eps, self.tag)

    def __radd__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if self._outer(other):
            return other.__add__(self)
        return Dual(other + self.val, self.eps, self.tag)

    def __sub__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if self._outer(other):
            return other.__rsub__(self)
        if isinstance(other, Dual) and other.tag == self.tag:
            return Dual(self.val - other.val, self.eps - other.eps, self.tag)
        return Dual(self.val - other, self.eps, self.tag)

    def __rsub__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if self._outer(other):
            return other.__sub__(self)
        return Dual(other - self.val, -self.eps, self.tag)

    def __mul__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if self._outer(other):
            return other.__rmul__(self)
        if isinstance(other, Dual) and other.tag == self.tag:
            return Dual(
                self.val * other.val,
                self.val * other.eps + self.eps * other.val,
                self.tag,
            )
        return Dual(self.val * other, self.eps * other, self.tag)

    def __rmul__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if self._outer(other):
            return other.__mul__(self)
        return Dual(other * self.val, other * self.eps, self.tag)

    def __truediv__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if self._outer(other):
            return other.__rtruediv__(self)
        if isinstance(other, Dual) and other.tag == self.tag:
            return Dual(
                self.val / other.val,
                (self.eps * other.val - self.val * other.eps) / (other.val * other.val),
                self.tag,
            )
        return Dual(self.val / other, self.eps / other, self.tag)

    def __rtruediv__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if self._outer(other):
            return other.__truediv__(self)
        q = other / self.val
        return Dual(q, -q * self.eps / self.val, self.tag)

    def __neg__(self):
        return Dual(-self.val, -self.eps, self.tag)

    def __pos__(self):
        return self

    def __pow__(self, k):
        if isinstance(k, Dual):
            return (k * self.log()).exp()
        if isinstance(k, numbers.Integral):
            k = int(k)
            if k == 0:
                return Dual(self.val * 0 + 1, self.eps * 0, self.tag)
            if k > 0:
                return Dual(self.val**k, k * self.val ** (k - 1) * self.eps, self.tag)
            return 1 / self ** (-k)
        return Dual(self.val**k, k * self.val ** (k - 1) * self.eps, self.tag)

    def __rpow__(self, base):
        return (self * _log(base)).exp()

    # -- elementary functions (numpy object ufuncs call these by name) ------

    def sqrt(self):
        r = _sqrt(self.val)
        return Dual(r, self.eps / (2 * r), self.tag)

    def exp(self):
        e = _exp(self.val)
        return Dual(e, e * self.eps, self.tag)

    def log(self):
        return Dual(_log(self.val), self.eps / self.val, self.tag)

    def sin(self):
        return Dual(_sin(self.val), _cos(self.val) * self.eps, self.tag)

    def cos(self):
        return Dual(_cos(self.val), -_sin(self.val) * self.eps, self.tag)

    def conjugate(self):
        # Differentiation variables are real, so conjugation commutes with d/dε.
        return Dual(_conj(self.val), _conj(self.eps), self.tag)

    @property
    def real(self):
        return Dual(_re(self.val), _re(self.eps), self.tag)

    @property
    def imag(self):
        return Dual(_im(self.val), _im(self.eps), self.tag)

    def __abs__(self):
        s = 1 if primal(self).real >= 0 else -1
        return self * s

    # ordering by primal value (used for pivoting only)
    def __lt__(self, other):
        return primal(self) < primal(other)

    def __gt__(self, other):
        return primal(self) > primal(other)


def _dispatch(name, fallback):
    def f(x):
        if isinstance(x, Dual):
            return getattr(x, name)()
        return fallback(x)

    return f


_sqrt = _dispatch("sqrt", lambda x: cmath.sqrt(x) if isinstance(x, complex) else math.sqrt(x))
_exp = _dispatch("exp", lambda x: cmath.exp(x) if isinstance(x, complex) else math.exp(x))
_log = _dispatch("log", lambda x: cmath.log(x) if isinstance(x, complex) else math.log(x))
_sin = _dispatch("sin", lambda x: cmath.sin(x) if isinstance(x, complex) else math.sin(x))
_cos = _dispatch("cos", lambda x: cmath.cos(x) if isinstance(x, complex) else math.cos(x))

sqrt, exp, log, sin, cos = _sqrt, _exp, _log, _sin, _cos


def _conj(x):
    return x.conjugate() if hasattr(x, "conjugate") else x


def _re(x):
    return x.real if hasattr(x, "real") else x


def _im(x):
    return x.imag if hasattr(x, "imag") else 0


def primal(x):
    """Innermost (non-dual) value of ``x``."""
    while isinstance(x, Dual):
        x = x.val
    return x


def tangent(x, tag: int):
    """ε-coefficient of ``x`` for the perturbation ``tag`` (0 if independent)."""
    if isinstance(x, np.ndarray) and x.ndim == 0:
        x = x.item()
    if isinstance(x, Dual) and x.tag == tag:
        return x.eps
    return 0


def _pack(values: list):
    """Array of results: numeric dtype when possible, object otherwise."""
    plain = True
    cplx = False
    for v in values:
        if isinstance(v, (bool, Fraction)) or not isinstance(v, numbers.Number):
            plain = False
            break
        if isinstance(v, numbers.Complex) and not isinstance(v, numbers.Real):
            cplx = True
    if plain:
        return np.array(values, dtype=complex if cplx else float)
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = v
    return out


def _unit_basis(p, one):
    """Seed vectors e_i; object dtype keeps exact scalars (Fraction, Polynomial) exact."""
    m = len(p)
    numeric = isinstance(p, np.ndarray) and p.dtype != object and one == 1
    if numeric:
        return np.eye(m)
    basis = []
    for i in range(m):
        e = np.empty(m, dtype=object)
        e[:] = one * 0
        e[i] = one
        basis.append(e)
    return basis


def _seed_all(p, tag: int, one=1):
    basis = _unit_basis(p, one)
    q = np.empty(len(p), dtype=object)
    for i, v in enumerate(p):
        q[i] = Dual(v, basis[i], tag)
    return q


def _vector_tangent(x, tag: int, m: int) -> list:
    t = tangent(x, tag)
    return list(t) if isinstance(t, np.ndarray) else [0] * m


def derivative(f: Callable, x, one=1):
    """df/dx at a scalar point."""
    tag = _new_tag()
    return tangent(f(Dual(x, one, tag)), tag)


def gradient(f: Callable, p: Sequence, one=1) -> np.ndarray:
    """Exact gradient of a scalar function of a coordinate vector.

    All coordinates are seeded at once with vector-valued ε-parts, so ``f`` is
    evaluated a single time.  ``f`` receives an object array and must use only
    ring operations and the elementary functions of this module (numpy object
    arithmetic qualifies).
    """
    p = p if isinstance(p, np.ndarray) else _as_array(p)
    tag = _new_tag()
    return _pack(_vector_tangent(f(_seed_all(p, tag, one)), tag, len(p)))


def value_and_jacobian(F: Callable, p: Sequence, one=1):
    """``(F(p), J)`` from a single dual evaluation."""
    p = p if isinstance(p, np.ndarray) else _as_array(p)
    tag = _new_tag()
    r = np.asarray(F(_seed_all(p, tag, one)), dtype=object).ravel()
    vals = _pack([v.val if isinstance(v, Dual) and v.tag == tag else v for v in r])
    rows = [_vector_tangent(v, tag, len(p)) for v in r]
    flat = [x for row in rows for x in row]
    return vals, _pack(flat).reshape(len(r), len(p))


def jacobian(F: Callable, p: Sequence, one=1) -> np.ndarray:
    """Exact Jacobian ``J[a, i] = ∂F_a/∂p_i`` of a vector-valued function."""
    return value_and_jacobian(F, p, one)[1]


def _as_array(p) -> np.ndarray:
    vals = list(p)
    if all(isinstance(v, (float, int, np.floating, np.integer)) and not isinstance(v, bool) for v in vals) and any(
        isinstance(v, (float, np.floating)) for v in vals
    ):
        return np.asarray(vals, dtype=float)
    out = np.empty(len(vals), dtype=object)
    out[:] = vals
    return out


def hessian(f: Callable, p: Sequence) -> np.ndarray:
    """Exact Hessian via nested dual numbers."""
    return jacobian(lambda q: gradient(f, q), p)


def inv(M) -> np.ndarray:
    """Matrix inverse by Gauss-Jordan elimination; works on object arrays of duals."""
    M = np.array(M, dtype=object)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("inv needs a square matrix")
    A = np.empty((n, 2 * n), dtype=object)
    A[:, :n] = M
    for i in range(n):
        for j in range(n):
            A[i, n + j] = 1.0 if i == j else 0.0
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(complex(primal(A[r, c]))))
        if abs(complex(primal(A[piv, c]))) == 0:
            raise ZeroDivisionError("singular matrix")
        if piv != c:
            A[[c, piv]] = A[[piv, c]]
        A[c] = A[c] / A[c, c]
        for r in range(n):
            if r != c:
                A[r] = A[r] - A[r, c] * A[c]
    return A[:, n:]
