"""Numerical laboratory for reparameterizations of the second moment
of Z(t) = e^{i theta(t)} zeta(1/2 + it) along the critical line.

The central object is the increasing solution phi(T) of

    integral_0^{mu(phi)} Z(t)^2 e^{-2t/phi} dt = integral_0^T Z(t)^2 dt

for admissible cutoff functions mu.  The package provides the Z engine,
checkpointed quadrature of Z^2, the nonlinear solver for phi, exact
asymptotic coefficient series, and a command line interface that drives
the full verification suite.
"""

from .constants import Constants, default_constants
from .errors import (
    BracketError,
    DomainError,
    LadderlabError,
    PreconditionError,
    RangeError,
    StateError,
)

__version__ = "0.1.0"

__all__ = [
    "Constants",
    "default_constants",
    "LadderlabError",
    "DomainError",
    "RangeError",
    "PreconditionError",
    "StateError",
    "BracketError",
    "__version__",
]
