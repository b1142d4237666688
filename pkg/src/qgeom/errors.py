"""Exception hierarchy shared by all qgeom modules."""


class QGeomError(Exception):
    """Base class for every error raised by qgeom."""


class InputError(QGeomError, ValueError):
    """Malformed or structurally invalid input (wrong shape, not hermitean, ...)."""


class DomainError(QGeomError, ValueError):
    """Input lies outside the domain where the quantity is defined."""


class UnsupportedDimensionError(QGeomError, ValueError):
    """Operation only exists for a specific dimension (e.g. the Bloch chart needs n = 2)."""


class StiffnessError(QGeomError, RuntimeError):
    """Adaptive integrator could not keep the step size above its floor."""


class NumericalError(QGeomError, RuntimeError):
    """A numerical procedure (quadrature, factorisation) failed."""


class CalibrationError(QGeomError, RuntimeError):
    """A calibrated constant did not reproduce its target within tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UndecidedError(QGeomError, RuntimeError):
    """A decision procedure could not reach a verdict; carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
