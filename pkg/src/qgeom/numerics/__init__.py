"""Shared numeric kernel: dual numbers, linear algebra, ODEs, polynomials."""

from qgeom.numerics.dual import Dual, derivative, gradient, hessian, jacobian
from qgeom.numerics.fields import (
    ScalarField,
    TwoTensorField,
    central_difference_gradient,
    constant_field,
    coordinate_field,
    exact_gradient,
)
from qgeom.numerics.linalg import ComplexOperator, mat_exp
from qgeom.numerics.ode import Trajectory, integrate
from qgeom.numerics.poly import Polynomial

__all__ = [
    "ComplexOperator",
    "Dual",
    "Polynomial",
    "ScalarField",
    "Trajectory",
    "TwoTensorField",
    "central_difference_gradient",
    "constant_field",
    "coordinate_field",
    "derivative",
    "exact_gradient",
    "gradient",
    "hessian",
    "integrate",
    "jacobian",
    "mat_exp",
]
