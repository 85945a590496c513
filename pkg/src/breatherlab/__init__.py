"""Numerical laboratory for breather solutions of integrable dispersive equations.

The package evaluates closed-form breather and soliton families through
exact jet arithmetic, verifies the variational elliptic identities they
satisfy, projects their linearized operators onto Hermite or trigonometric
bases, and computes the periodic-family stability diagnostics.
"""

from . import breathers, functionals, galerkin, jets, linops, quadrature, specfun, stability

__all__ = [
    "breathers",
    "functionals",
    "galerkin",
    "jets",
    "linops",
    "quadrature",
    "specfun",
    "stability",
]

__version__ = "0.1.0"
