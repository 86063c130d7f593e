"""Numerical laboratory for the degenerate hyperbolic equation
d^2u/dt^2 - t*Laplacian(u) = |u|^p: exact frequency-space propagation,
blowup machinery, and mixed-norm Strichartz benches."""

__version__ = "0.1.0"

from . import exponents, specfun, grids, propagator, shapes  # noqa: F401
from . import strichartz, nonlinear, blowup  # noqa: F401
