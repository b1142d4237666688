"""Sparse multivariate polynomials with exact rational (or float) coefficients."""

from __future__ import annotations

import numbers
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from qgeom.errors import InputError


def _coerce_coeff(c):
    if isinstance(c, bool):
        c = int(c)
    if isinstance(c, numbers.Integral):
        return Fraction(int(c))
    if isinstance(c, (Fraction, float, complex)):
        return c
    if isinstance(c, numbers.Rational):
        return Fraction(c.numerator, c.denominator)
    if isinstance(c, numbers.Real):
        return float(c)
    if isinstance(c, numbers.Complex):
        return complex(c)
    raise InputError(f"unsupported polynomial coefficient {c!r}")


class Polynomial:
    """Polynomial over an ordered variable list.

    ``terms`` maps exponent tuples (one entry per variable) to non-zero
    coefficients.  Integer coefficients are stored as ``Fraction`` so that
    arithmetic stays exact.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.vars = tuple(vars)
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(self.vars):
                raise InputError(
                    f"exponent tuple {exps} does not match {len(self.vars)} variables"
                )
            if any(e < 0 for e in exps):
                raise InputError(f"negative exponent in {exps}")
            c = _coerce_coeff(c)
            if c != 0:
                clean[exps] = clean.get(exps, 0) + c
                if clean[exps] == 0:
                    del clean[exps]
        self.terms = clean

    # -- constructors ----------------------------------------------------

    @classmethod
    def constant(cls, c, vars: Sequence[str]) -> "Polynomial":
        return cls(vars, {(0,) * len(tuple(vars)): c})

    @classmethod
    def variable(cls, name: str, vars: Sequence[str]) -> "Polynomial":
        vars = tuple(vars)
        if name not in vars:
            raise InputError(f"{name!r} is not one of {vars}")
        exps = tuple(1 if v == name else 0 for v in vars)
        return cls(vars, {exps: 1})

    @classmethod
    def variables(cls, vars: Sequence[str]) -> tuple["Polynomial", ...]:
        return tuple(cls.variable(v, vars) for v in vars)

    # -- structure ---------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self, among: Iterable[int] | None = None) -> int:
        """Total degree (optionally counting only the variable indices ``among``)."""
        if not self.terms:
            return -1
        idx = list(range(self.nvars)) if among is None else list(among)
        return max(sum(e[i] for i in idx) for e in self.terms)

    def coefficient(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), 0)

    def _check(self, other: "Polynomial") -> None:
        if other.vars != self.vars:
            raise InputError(f"variable mismatch: {self.vars} vs {other.vars}")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, numbers.Number):
            return Polynomial.constant(other, self.vars)
        return None

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in o.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(self.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(self.vars, terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            c = _coerce_coeff(other)
            return Polynomial(self.vars, {e: v / c for e, v in self.terms.items()})
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, numbers.Integral) or k < 0:
            raise InputError("polynomial powers must be non-negative integers")
        out = Polynomial.constant(1, self.vars)
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, numbers.Number):
            return self == Polynomial.constant(other, self.vars)
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # -- calculus and evaluation -------------------------------------------

    def partial(self, var) -> "Polynomial":
        """Partial derivative with respect to a variable name or index."""
        i = self.vars.index(var) if isinstance(var, str) else int(var)
        if not 0 <= i < self.nvars:
            raise InputError(f"no variable with index {i}")
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                terms[tuple(e2)] = c * e[i]
        return Polynomial(self.vars, terms)

    def evaluate(self, point):
        """Value at ``point`` (a sequence aligned with ``vars``, or a name→value map)."""
        if isinstance(point, Mapping):
            point = [point[v] for v in self.vars]
        point = list(point)
        if len(point) != self.nvars:
            raise InputError(f"expected {self.nvars} coordinates, got {len(point)}")
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            total = total + term
        return total

    __call__ = evaluate

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")
