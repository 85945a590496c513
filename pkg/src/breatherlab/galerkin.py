"""Galerkin projection of the linearized operators and spectral classification.

The matrix entries are the basis-projected operator, assembled by literal
application (never in pre-symmetrized form): the pre-symmetrization asymmetry
is a genuine quality metric for the operator coefficients and the quadrature.
Assembly runs at two node densities; the entry drift between them is reported
and must stay below 1e-9 for a healthy run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linops import ScalarOperator, SgBlockOperator
from .quadrature import LinePlan, TorusPlan
from .specfun import FourierBasis, HermiteBasis

ASYMMETRY_FLAG = 1e-6
DRIFT_FLAG = 1e-9


class AssemblyError(RuntimeError):
    """Raised when asymmetry or quadrature drift exceeds the quality gates."""


@dataclass(frozen=True)
class GalerkinProblem:
    operator: object
    basis: object
    plan: object

    @property
    def dimension(self) -> int:
        size = self.basis.size
        return 2 * size if isinstance(self.operator, SgBlockOperator) else size


def default_hermite_plan(operator, n_basis: int) -> LinePlan:
    """Truncation and density adapted to both the basis and the potential.

    The half width covers the outer Hermite turning point plus the slow
    exponential reach of the potential; the density resolves the fastest
    basis-product oscillation with superexponential margin.
    """
    fam = operator.family
    beta_eff = getattr(fam, "decay_rate", 1.0)
    freq = getattr(fam, "osc_frequency", 1.0)
    half_width = math.sqrt(2.0 * (n_basis + 5)) + 40.0 / beta_eff
    peak = 2.0 * math.sqrt(2.0 * (n_basis + 5)) + freq
    order = max(10, math.ceil(0.36 * 0.5 * peak) + 8)
    return LinePlan(
        center=0.0,
        half_width=half_width,
        nodes_per_unit=max(8.0, 4.0 * freq),
        panel_width=0.5,
        order=order,
    )


def hermite_problem(operator, n_max: int, plan: Optional[LinePlan] = None) -> GalerkinProblem:
    """Problem over Hermite functions f_0..f_{n_max}."""
    basis = HermiteBasis(count=n_max + 1)
    plan = plan or default_hermite_plan(operator, n_max)
    return GalerkinProblem(operator, basis, plan)


def fourier_problem(operator, n_max: int, plan: Optional[TorusPlan] = None) -> GalerkinProblem:
    """Problem over the 2 n_max + 1 trig functions on the operator's period."""
    period = operator.family.period
    basis = FourierBasis(period=period, count_n=n_max)
    plan = plan or TorusPlan(period=period)
    return GalerkinProblem(operator, basis, plan)


@dataclass(frozen=True)
class AssembledMatrix:
    matrix: np.ndarray  # symmetrized
    asymmetry: float    # max |M - M^T| before symmetrization, relative to max |entry|
    drift: float        # max entry change under node doubling, relative to max |entry|

    def require_quality(self):
        if self.asymmetry > ASYMMETRY_FLAG:
            raise AssemblyError(f"matrix asymmetry {self.asymmetry:.3e} flags an operator or quadrature bug")
        if self.drift > DRIFT_FLAG:
            raise AssemblyError(f"assembly drift {self.drift:.3e} under node doubling")


def _weighted_product(rows, w_c, cols):
    return (rows * w_c[None, :]) @ cols.T


def _assemble_scalar(op: ScalarOperator, basis, x, w) -> np.ndarray:
    stack = basis.stack(x, 4)
    c0, c1, c2 = op.coefficients(x)
    m = _weighted_product(stack[0], w, stack[4])
    m += _weighted_product(stack[0], w * c2, stack[2])
    m += _weighted_product(stack[0], w * c1, stack[1])
    m += _weighted_product(stack[0], w * c0, stack[0])
    return m


def _assemble_block(op: SgBlockOperator, basis, x, w) -> np.ndarray:
    stack = basis.stack(x, 4)
    c = op.coefficients(x)
    a11 = _weighted_product(stack[0], w, stack[4])
    a11 += _weighted_product(stack[0], w * c["l1_2"], stack[2])
    a11 += _weighted_product(stack[0], w * c["l1_1"], stack[1])
    a11 += _weighted_product(stack[0], w * c["l1_0"], stack[0])
    a22 = -_weighted_product(stack[0], w, stack[2])
    a22 += _weighted_product(stack[0], w * c["l2_0"], stack[0])
    a12 = _weighted_product(stack[0], w * c["b1_0"], stack[0])
    a12 += _weighted_product(stack[0], w * c["b1_1"], stack[1])
    a21 = _weighted_product(stack[0], w * c["b2_0"], stack[0])
    a21 += _weighted_product(stack[0], w * c["b2_1"], stack[1])
    return np.block([[a11, a12], [a21, a22]])


def assemble(problem: GalerkinProblem, check_quality: bool = True) -> AssembledMatrix:
    """Dense projected matrix, symmetrized after the asymmetry is recorded."""
    mats = []
    for refine in (1, 2):
        x, w = problem.plan.nodes_weights(refine)
        if isinstance(problem.operator, SgBlockOperator):
            mats.append(_assemble_block(problem.operator, problem.basis, x, w))
        else:
            mats.append(_assemble_scalar(problem.operator, problem.basis, x, w))
    m = mats[1]
    scale = max(1.0, float(np.max(np.abs(m))))
    drift = float(np.max(np.abs(mats[1] - mats[0]))) / scale
    asymmetry = float(np.max(np.abs(m - m.T))) / scale
    out = AssembledMatrix(matrix=0.5 * (m + m.T), asymmetry=asymmetry, drift=drift)
    if check_quality:
        out.require_quality()
    return out


# ---------------------------------------------------------------------------
# symmetric eigensolve and classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray
    vectors: Optional[np.ndarray] = None
    residual: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values)
        if np.any(np.diff(v) < 0):
            raise ValueError("eigenvalues must be sorted ascending")


def eig_sym(matrix: np.ndarray, vectors: bool = False) -> Spectrum:
    """Eigen-decomposition of a symmetric matrix, values ascending.

    Backed by the LAPACK symmetric solver; when vectors are requested the
    max residual ||M v - lambda v|| is verified against 1e-9 ||M||.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if float(np.max(np.abs(m - m.T))) > 1e-12 * max(1.0, float(np.max(np.abs(m)))):
        raise ValueError("matrix must be symmetric; symmetrize before solving")
    if not vectors:
        vals = np.linalg.eigvalsh(m)
        return Spectrum(values=vals)
    vals, vecs = np.linalg.eigh(m)
    resid = float(np.max(np.abs(m @ vecs - vecs * vals[None, :])))
    scale = float(np.linalg.norm(m, 2))
    if resid > 1e-9 * max(scale, 1.0):
        raise ArithmeticError(f"eigenpair residual {resid:.3e} exceeds 1e-9 ||M||")
    return Spectrum(values=vals, vectors=vecs, residual=resid)


@dataclass(frozen=True)
class Classification:
    n_neg: int
    kernel_dim: int
    gap: float
    kernel_tol: float


DEFAULT_KERNEL_TOL = {"hermite": 0.1, "fourier": 1e-5}


def classify(spectrum: Spectrum, kernel_tol: float) -> Classification:
    """Split the spectrum into negative part, numerical kernel and gap."""
    if kernel_tol <= 0:
        raise ValueError("kernel tolerance must be positive")
    vals = spectrum.values
    n_neg = int(np.sum(vals < -kernel_tol))
    kernel = int(np.sum(np.abs(vals) <= kernel_tol))
    above = vals[vals > kernel_tol]
    gap = float(above[0]) if above.size else math.inf
    return Classification(n_neg=n_neg, kernel_dim=kernel, gap=gap, kernel_tol=kernel_tol)


def solve_problem(problem: GalerkinProblem, kernel_tol: Optional[float] = None,
                  vectors: bool = False):
    """Assemble, diagonalize and classify in one step."""
    assembled = assemble(problem)
    spectrum = eig_sym(assembled.matrix, vectors=vectors)
    if kernel_tol is None:
        key = "fourier" if isinstance(problem.basis, FourierBasis) else "hermite"
        kernel_tol = DEFAULT_KERNEL_TOL[key]
    return assembled, spectrum, classify(spectrum, kernel_tol)


def rayleigh_quotient(problem: GalerkinProblem, matrix: np.ndarray, values: np.ndarray) -> float:
    """Rayleigh quotient of a sampled field projected onto the basis."""
    x, w = problem.plan.nodes_weights(2)
    if len(values) != len(x):
        raise ValueError("sample the field on plan.nodes_weights(2) nodes")
    coeff = problem.basis.stack(x, 0)[0] @ (w * values)
    denom = float(coeff @ coeff)
    if isinstance(problem.operator, SgBlockOperator):
        raise ValueError("use the block variant for pair fields")
    return float(coeff @ matrix @ coeff) / denom


def matrix_csv(assembled: AssembledMatrix, n_basis: int, family_tag: str) -> str:
    """Row-major CSV dump of the assembled matrix for external cross-checks."""
    lines = [f"# galerkin N={n_basis} family={family_tag}"]
    for row in assembled.matrix:
        lines.append(",".join(repr(v) for v in row))
    return "\n".join(lines) + "\n"
