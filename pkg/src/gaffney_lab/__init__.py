"""Exterior calculus on R^n with executable checks of Gaffney-type identities.

Modules: ``multiindex`` (index combinatorics), ``exterior`` (pointwise
k-form algebra), ``fields`` (form fields with exact derivatives),
``geometry`` (domains, normals, principal curvatures), ``quadrature``
(volume and boundary rules), ``verify`` (identity residuals and quotients),
``suite`` and ``cli`` (batch runs and reports).
"""

__version__ = "0.1.0"

from .errors import (
    BoundaryConditionError,
    CoverageError,
    DomainError,
    FrameError,
    SingularGradientError,
)
from .exterior import KForm, dx, hodge, inner, interior, wedge

__all__ = [
    "BoundaryConditionError",
    "CoverageError",
    "DomainError",
    "FrameError",
    "KForm",
    "SingularGradientError",
    "__version__",
    "dx",
    "hodge",
    "inner",
    "interior",
    "wedge",
]
