"""JSON file formats for operators, states, structure fields and Lagrangian systems.

Matrices: ``{"n": int, "re": [[...]], "im": [[...]]}``; vectors use flat
``re``/``im`` lists.  Structure fields list non-zero entries with 1-based
indices ``j, k, l`` and polynomial terms ``[[exponents], num, den]``.
Parse failures raise :class:`SchemaError`, whose message starts with the
source line it refers to.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

import numpy as np

from qgeom.errors import InputError
from qgeom.frobenius import StructureField, default_vars
from qgeom.lagrangian import SecondOrderField
from qgeom.numerics.linalg import is_density, is_hermitean
from qgeom.numerics.poly import Polynomial


class SchemaError(InputError):
    def __init__(self, message: str, line: int = 1, source: str = "<input>"):
        super().__init__(f"{source}:{line}: {message}")
        self.line = line


class _Doc:
    """Parsed JSON plus the raw text, for locating keys when reporting errors."""

    def __init__(self, text: str, source: str):
        self.text, self.source = text, source
        try:
            self.data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(exc.msg, exc.lineno, source) from None

    def line_of(self, key: str) -> int:
        m = re.search(rf'"{re.escape(key)}"\s*:', self.text)
        return self.text.count("\n", 0, m.start()) + 1 if m else 1

    def fail(self, message: str, key: str | None = None):
        raise SchemaError(message, self.line_of(key) if key else 1, self.source)

    def field(self, key: str, obj=None):
        obj = self.data if obj is None else obj
        if not isinstance(obj, dict) or key not in obj:
            self.fail(f"missing field {key!r}", None)
        return obj[key]


def _read(path) -> _Doc:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read file: {exc.strerror}", 1, str(p)) from None
    return _Doc(text, str(p))


def _numeric(doc: _Doc, key: str, shape: tuple) -> np.ndarray:
    raw = doc.field(key)
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError):
        doc.fail(f"{key!r} must contain only numbers", key)
    if arr.shape != shape:
        doc.fail(f"{key!r} has shape {arr.shape}, expected {shape}", key)
    return arr


def _size(doc: _Doc) -> int:
    n = doc.field("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        doc.fail("'n' must be a positive integer", "n")
    return n


def parse_matrix(text: str, source: str = "<input>", require: str | None = None) -> np.ndarray:
    """Matrix from JSON text; ``require`` may be "hermitean" or "density"."""
    doc = _Doc(text, source)
    n = _size(doc)
    M = _numeric(doc, "re", (n, n)) + 1j * _numeric(doc, "im", (n, n))
    if require == "hermitean" and not is_hermitean(M):
        doc.fail("matrix is not hermitean", "re")
    if require == "density" and not is_density(M):
        doc.fail("matrix is not a density matrix (hermitean, PSD, unit trace)", "re")
    return M


def parse_vector(text: str, source: str = "<input>") -> np.ndarray:
    doc = _Doc(text, source)
    n = _size(doc)
    return _numeric(doc, "re", (n,)) + 1j * _numeric(doc, "im", (n,))


def load_matrix(path, require: str | None = None) -> np.ndarray:
    doc = _read(path)
    return parse_matrix(doc.text, doc.source, require)


def load_vector(path) -> np.ndarray:
    doc = _read(path)
    return parse_vector(doc.text, doc.source)


def matrix_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"n": M.shape[0], "re": M.real.tolist(), "im": M.imag.tolist()}


def vector_json(v) -> dict:
    v = np.asarray(v, dtype=complex)
    return {"n": len(v), "re": v.real.tolist(), "im": v.imag.tolist()}


# -- polynomials and structure fields ------------------------------------------------------------------


def _poly(doc: _Doc, terms, vars, key: str) -> Polynomial:
    if not isinstance(terms, list):
        doc.fail(f"{key!r} must be a list of [exponents, num, den] terms", key)
    out = {}
    for t in terms:
        if not (isinstance(t, list) and len(t) == 3 and isinstance(t[0], list)):
            doc.fail("polynomial term must be [[e1, ...], num, den]", key)
        exps, num, den = t
        if len(exps) != len(vars) or not all(isinstance(e, int) and e >= 0 for e in exps):
            doc.fail(f"exponent list {exps} does not match {len(vars)} variables", key)
        if not isinstance(num, int) or not isinstance(den, int) or den == 0:
            doc.fail("coefficients need integer numerator and non-zero integer denominator", key)
        out[tuple(exps)] = out.get(tuple(exps), 0) + Fraction(num, den)
    return Polynomial(vars, out)


def parse_structure_field(text: str, source: str = "<input>") -> StructureField:
    doc = _Doc(text, source)
    d = doc.field("dim")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        doc.fail("'dim' must be a positive integer", "dim")
    vars = tuple(doc.data.get("vars", default_vars(d)))
    if len(vars) != d or not all(isinstance(v, str) for v in vars):
        doc.fail(f"'vars' must list {d} variable names", "vars")
    entries = doc.field("entries")
    if not isinstance(entries, list):
        doc.fail("'entries' must be a list", "entries")
    b = np.empty((d, d, d), dtype=object)
    for idx in np.ndindex(b.shape):
        b[idx] = Polynomial(vars)
    for e in entries:
        try:
            j, k, l = (e[c] for c in "jkl")
            terms = e["poly"]
        except (KeyError, TypeError):
            doc.fail("entry needs keys j, k, l and poly", "entries")
        if not all(isinstance(i, int) and 1 <= i <= d for i in (j, k, l)):
            doc.fail(f"entry indices must be integers in 1..{d}", "entries")
        b[j - 1, k - 1, l - 1] = b[j - 1, k - 1, l - 1] + _poly(doc, terms, vars, "poly")
    commutative = all(b[j, k, l] == b[k, j, l] for j, k, l in np.ndindex(b.shape))
    return StructureField(d, b, commutative)


def load_structure_field(path) -> StructureField:
    doc = _read(path)
    return parse_structure_field(doc.text, doc.source)


def structure_field_json(sf: StructureField) -> dict:
    entries = []
    for j, k, l in np.ndindex(sf.b.shape):
        p = sf.b[j, k, l]
        if not p.is_zero():
            terms = [[list(e), Fraction(c).numerator, Fraction(c).denominator] for e, c in sorted(p.terms.items())]
            entries.append({"j": j + 1, "k": k + 1, "l": l + 1, "poly": terms})
    return {"dim": sf.dim, "vars": list(sf.vars), "entries": entries}


# -- Lagrangian systems ---------------------------------------------------------------------------------


def parse_system(text: str, source: str = "<input>"):
    """(q, L, Γ) from ``{"q": int, "lagrangian": terms, "force": [terms, ...]}`` in variables x1..xq, v1..vq."""
    doc = _Doc(text, source)
    q = doc.field("q")
    if not isinstance(q, int) or isinstance(q, bool) or q < 1:
        doc.fail("'q' must be a positive integer", "q")
    vars = tuple(f"x{i + 1}" for i in range(q)) + tuple(f"v{i + 1}" for i in range(q))
    L = _poly(doc, doc.field("lagrangian"), vars, "lagrangian")
    force = doc.field("force")
    if not isinstance(force, list) or len(force) != q:
        doc.fail(f"'force' must list {q} polynomials", "force")
    F = [_poly(doc, f, vars, "force") for f in force]

    def lagrangian(p):
        return L.evaluate(list(p))

    def f(x, v):
        pt = list(x) + list(v)
        return np.array([Fi.evaluate(pt) for Fi in F], dtype=object if _any_object(pt) else float)

    return q, lagrangian, SecondOrderField(f, q)


def _any_object(values) -> bool:
    return any(not isinstance(v, (int, float, np.floating, np.integer)) for v in values)
