"""Linearized operators around the breather profiles and their quadratic forms.

Scalar families share one fourth-order template

    L[z] = z_4x + c2(x) z_xx + c1(x) z_x + c0(x) z,

whose coefficients come from the frozen profile snapshot; the wave-equation
family gets the 2x2 block operator (fourth order on the first slot, second
order on the second, first-order couplers).  All operators are formally
self-adjoint: c1 = c2' for the scalar template, and the two couplers are
mutual adjoints.

Quadratic forms are offered through two routes: applying the operator under
the integral (needs four derivatives of the test field) and the
integrated-by-parts expression (needs two).  The routes agree for decaying
fields, which is one of the module's self-checks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import breathers
from .breathers import FieldJet, PairFieldJet
from .quadrature import LinePlan


def field_derivatives(fj: FieldJet, max_order: int, n1: int = 0, n2: int = 0):
    """x-derivative grids of a field (optionally of its shift derivative)."""
    return tuple(fj.partial(nx=j, n1=n1, n2=n2) for j in range(max_order + 1))


def _central_fields(make_family, h: float, t, x, max_order: int, slot=None):
    """Central finite difference of field derivative grids across a parameter."""
    out_p = make_family(+h).eval(t, x, deg=max(max_order, 2))
    out_m = make_family(-h).eval(t, x, deg=max(max_order, 2))
    if isinstance(out_p, PairFieldJet):
        out_p = getattr(out_p, slot)
        out_m = getattr(out_m, slot)
    return tuple(
        (out_p.partial(nx=j) - out_m.partial(nx=j)) / (2.0 * h) for j in range(max_order + 1)
    )


# ---------------------------------------------------------------------------
# scalar operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarOperator:
    """Fourth-order linearization of the scalar stationary equations.

    ``a1`` multiplies the (z_xx + 3 B^2 z) block, ``a2`` is the constant
    zeroth-order coefficient, ``mu`` switches on the quadratic-nonlinearity
    terms.  ``zero_potential`` drops the profile, leaving the constant-
    coefficient operator (useful as a continuum-spectrum reference).
    """

    family: object
    a1: float
    a2: float
    mu: float = 0.0
    zero_potential: bool = False

    label: str = "scalar"

    @property
    def domain(self) -> str:
        return self.family.domain

    def coefficients(self, x):
        """(c0, c1, c2) grids; the leading coefficient is identically 1."""
        x = np.asarray(x, dtype=float)
        if self.zero_potential:
            zero = np.zeros_like(x)
            return self.a2 + zero, zero.copy(), -self.a1 + zero
        f = self.family.eval(0.0, x, deg=2)
        B, Bx, Bxx = f.value, f.partial(nx=1), f.partial(nx=2)
        c2 = -self.a1 + 5.0 * B**2
        c1 = 10.0 * B * Bx
        c0 = self.a2 + 5.0 * Bx**2 + 10.0 * B * Bxx + 7.5 * B**4 - 3.0 * self.a1 * B**2
        if self.mu:
            mu = self.mu
            c2 = c2 + (10.0 / 3.0) * mu * B
            c1 = c1 + (10.0 / 3.0) * mu * Bx
            c0 = c0 + mu * (
                10.0 * B**3 - 2.0 * self.a1 * B + (10.0 / 3.0) * Bxx + (10.0 / 3.0) * mu * B**2
            )
        return c0, c1, c2

    def apply(self, x, z):
        """Pointwise L[z] from the derivative grids z = (z, z', ..., z'''')."""
        if len(z) < 5:
            raise ValueError("insufficient jet degree: scalar operator needs 4 derivatives")
        c0, c1, c2 = self.coefficients(x)
        return z[4] + c2 * z[2] + c1 * z[1] + c0 * z[0]

    def quadratic_form(self, x, w_quad, z):
        """integral of z L[z] by direct application."""
        return float(np.dot(w_quad, z[0] * self.apply(x, z)))


def mkdv_operator(family, t: float = 0.0, zero_potential: bool = False) -> ScalarOperator:
    fam = breathers.normal_form(family, t)
    a1 = 2.0 * (fam.beta**2 - fam.alpha**2)
    a2 = (fam.alpha**2 + fam.beta**2) ** 2
    return ScalarOperator(fam, a1=a1, a2=a2, zero_potential=zero_potential, label="mkdv")


def gardner_operator(family, t: float = 0.0, mu=None, zero_potential: bool = False) -> ScalarOperator:
    fam = breathers.normal_form(family, t)
    a1 = 2.0 * (fam.beta**2 - fam.alpha**2)
    a2 = (fam.alpha**2 + fam.beta**2) ** 2
    mu = fam.mu if mu is None else mu
    return ScalarOperator(fam, a1=a1, a2=a2, mu=mu, zero_potential=zero_potential, label="gardner")


def kksh_operator(family, t: float = 0.0, a1a2=None) -> ScalarOperator:
    from . import stability

    fam = breathers.normal_form(family, t)
    if a1a2 is None:
        a1a2 = stability.coeffs_a1a2(fam.beta, fam.k)
    return ScalarOperator(fam, a1=a1a2[0], a2=a1a2[1], label="kksh")


# ---------------------------------------------------------------------------
# wave-equation block operator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SgBlockOperator:
    """2x2 block operator: fourth order on z, second order on w, coupled."""

    family: object

    label: str = "sg"
    domain: str = "line"

    def fields(self, x):
        pair = self.family.eval(0.0, np.asarray(x, dtype=float), deg=2)
        B, Bt = pair.b, pair.bt
        u = B.value
        return {
            "B": u,
            "Bx": B.partial(nx=1),
            "Bxx": B.partial(nx=2),
            "Bt": Bt.value,
            "Btx": Bt.partial(nx=1),
            "cos": np.cos(u),
            "sin": np.sin(u),
        }

    def coefficients(self, x):
        f = self.fields(x)
        a, b = self.family.a, self.family.b
        Bx, Bxx, Bt, Btx = f["Bx"], f["Bxx"], f["Bt"], f["Btx"]
        cu, su = f["cos"], f["sin"]
        grad2 = Bx**2 + Bt**2
        return {
            "l1_2": -(a - (3.0 / 8.0) * grad2 + 1.25 * cu),
            "l1_1": 0.75 * (Bx * Bxx + Bt * Btx) + 1.25 * su * Bx,
            "l1_0": a * cu
            + (5.0 / 8.0) * Bx**2 * cu
            + 1.25 * Bxx * su
            + 0.25 * np.cos(2.0 * f["B"])
            - Bt**2 * cu / 8.0,
            "l2_0": a + 0.25 * cu - (3.0 / 8.0) * grad2,
            "b1_0": 0.25 * (3.0 * Btx * Bx + 3.0 * Bt * Bxx - Bt * su),
            "b1_1": 0.25 * (3.0 * Bt * Bx - 2.0 * b),
            "b2_1": 0.5 * (b - 1.5 * Bt * Bx),
            "b2_0": -0.25 * Bt * su,
        }

    def apply(self, x, z, w):
        """Row values (L1 z + B1 w, B2 z + L2 w) on the grid."""
        if len(z) < 5 or len(w) < 3:
            raise ValueError(
                "insufficient jet degree: block operator needs (4, 2) derivatives"
            )
        c = self.coefficients(x)
        row1 = (
            z[4]
            + c["l1_2"] * z[2]
            + c["l1_1"] * z[1]
            + c["l1_0"] * z[0]
            + c["b1_0"] * w[0]
            + c["b1_1"] * w[1]
        )
        row2 = c["b2_1"] * z[1] + c["b2_0"] * z[0] - w[2] + c["l2_0"] * w[0]
        return row1, row2

    def quadratic_form_apply(self, x, w_quad, z, w):
        row1, row2 = self.apply(x, z, w)
        return float(np.dot(w_quad, z[0] * row1 + w[0] * row2))

    def quadratic_form(self, x, w_quad, z, w):
        """Integrated-by-parts route: only two derivatives of z, one of w."""
        c = self.coefficients(x)
        f = self.fields(x)
        cross = (self.family.b - 1.5 * f["Bt"] * f["Bx"]) * z[1] * w[0]
        cross = cross - 0.5 * f["Bt"] * f["sin"] * z[0] * w[0]
        vals = (
            z[2] ** 2
            + w[1] ** 2
            - c["l1_2"] * z[1] ** 2
            + c["l1_0"] * z[0] ** 2
            + c["l2_0"] * w[0] ** 2
            + cross
        )
        return float(np.dot(w_quad, vals))


def sg_operator(family, t: float = 0.0) -> SgBlockOperator:
    return SgBlockOperator(breathers.normal_form(family, t))


def operator_for(family, t: float = 0.0):
    kind = family.kind
    if kind == "mkdv":
        return mkdv_operator(family, t)
    if kind == "gardner":
        return gardner_operator(family, t)
    if kind == "kksh":
        return kksh_operator(family, t)
    if kind == "sg":
        return sg_operator(family, t)
    raise ValueError(f"no linearized operator for family kind {kind!r}")


# ---------------------------------------------------------------------------
# scaling directions and identity checks
# ---------------------------------------------------------------------------


def _fd_step(beta: float, h: float | None) -> float:
    return h if h is not None else 1e-5 * max(1.0, beta)


def sg_scaling_direction(family, x, h: float | None = None):
    """(dB/dbeta, dB_t/dbeta) derivative grids by central differences.

    The shift and velocity parameters stay fixed while every derived
    constant follows the scaling.
    """
    h = _fd_step(family.beta, h)
    z = _central_fields(lambda s: replace(family, beta=family.beta + s), h, 0.0, x, 4, "b")
    w = _central_fields(lambda s: replace(family, beta=family.beta + s), h, 0.0, x, 2, "bt")
    return z, w


def sg_scaling_relation_residuals(family, x=None, h: float | None = None):
    """Residuals of the two operator identities satisfied by the scaling
    direction: row1 = a'(B_xx - sin B) + b'/2 B_tx, row2 = -a' B_t - b'/2 B_x.
    """
    if x is None:
        x = np.linspace(-25.0 / family.beta, 25.0 / family.beta, 301)
    op = sg_operator(family)
    fam = op.family
    z, w = sg_scaling_direction(fam, x, h)
    row1, row2 = op.apply(x, z, w)
    f = op.fields(x)
    aprime = 2.0 * (1.0 + fam.v**2) * fam.beta
    bprime = -8.0 * fam.v * fam.beta
    rhs1 = aprime * (f["Bxx"] - f["sin"]) + 0.5 * bprime * f["Btx"]
    rhs2 = -aprime * f["Bt"] - 0.5 * bprime * f["Bx"]
    return float(np.max(np.abs(row1 - rhs1))), float(np.max(np.abs(row2 - rhs2)))


def sg_variational_direction_residual(family, x=None, h: float | None = None) -> float:
    """Componentwise defect of L[(B0, B0t)] = (A, At) for the scaled scaling
    direction (B0, B0t) = -(1/2 beta)(dB/dbeta, dB_t/dbeta), with
    A = (1+v^2)(sin B - B_xx) + 2 v B_tx and At = (1+v^2) B_t - 2 v B_x.
    """
    if x is None:
        x = np.linspace(-25.0 / family.beta, 25.0 / family.beta, 301)
    op = sg_operator(family)
    fam = op.family
    z, w = sg_scaling_direction(fam, x, h)
    s = -0.5 / fam.beta
    z = tuple(s * zi for zi in z)
    w = tuple(s * wi for wi in w)
    row1, row2 = op.apply(x, z, w)
    f = op.fields(x)
    v = fam.v
    a_row = (1.0 + v**2) * (f["sin"] - f["Bxx"]) + 2.0 * v * f["Btx"]
    at_row = (1.0 + v**2) * f["Bt"] - 2.0 * v * f["Bx"]
    return float(max(np.max(np.abs(row1 - a_row)), np.max(np.abs(row2 - at_row))))


def _sg_line_plan(family) -> LinePlan:
    return LinePlan(center=0.0, half_width=30.0 / family.beta + 10.0, nodes_per_unit=8.0)


def sg_scaling_quadratic_form(family, h: float | None = None) -> float:
    """Q[dB/dbeta, dB_t/dbeta]; equals -32 (1 + 3 v^2) beta for every breather."""
    op = sg_operator(family)
    fam = op.family
    plan = _sg_line_plan(fam)
    x, w_quad = plan.nodes_weights(2)
    z, w = sg_scaling_direction(fam, x, h)
    return op.quadratic_form(x, w_quad, z, w)


def sg_scaled_direction_pairing(beta: float, v: float, h: float | None = None) -> float:
    """-(integral of (B0, B0t) . L[(B0, B0t)]); equals (8/beta)(1 + 3 v^2) > 0."""
    family = breathers.SgBreather(beta=beta, v=v)
    op = sg_operator(family)
    fam = op.family
    plan = _sg_line_plan(fam)
    x, w_quad = plan.nodes_weights(2)
    z, w = sg_scaling_direction(fam, x, h)
    s = -0.5 / fam.beta
    z = tuple(s * zi for zi in z)
    w = tuple(s * wi for wi in w)
    return -op.quadratic_form_apply(x, w_quad, z, w)


def sg_quadratic_form_of_callables(family, z_fun, w_fun, plan=None) -> float:
    """Q on perturbations given as jet callables (position jet in, jet out)."""
    from .jets import Jet2

    op = sg_operator(family)
    plan = plan or _sg_line_plan(op.family)
    x, w_quad = plan.nodes_weights(2)
    zj = z_fun(Jet2.variable(np.asarray(x, dtype=float), 0, deg=2))
    wj = w_fun(Jet2.variable(np.asarray(x, dtype=float), 0, deg=2))
    z = tuple(zj.partial(i, 0) for i in range(3))
    w = tuple(wj.partial(i, 0) for i in range(2))
    return op.quadratic_form(x, w_quad, z, w)


# ---------------------------------------------------------------------------
# periodic analog of the inverse scaling direction
# ---------------------------------------------------------------------------


def kksh_parameter_direction(beta: float, k: float, x, hk: float = 1e-6, hb: float = 1e-6):
    """Derivative grids of the periodic profile along k and along beta.

    The commensurability constraint is re-solved at every displaced k, so the
    k-direction follows the constrained family.
    """
    def fam(b, kk):
        return breathers.KkshBreather(beta=b, k=kk)

    dk = _central_fields(lambda s: fam(beta, k + s), hk, 0.0, x, 4)
    db = _central_fields(lambda s: fam(beta + s, k), hb, 0.0, x, 4)
    return dk, db


def kksh_inverse_direction_residual(beta: float, k: float, n_points: int = 200) -> float:
    """Max defect of L[B0] = -B for the discriminant-normalised direction
    built from the two parameter derivatives of the periodic profile."""
    from . import stability

    family = breathers.KkshBreather(beta=beta, k=k)
    x = np.linspace(0.0, family.period, n_points, endpoint=False)
    dk, db = kksh_parameter_direction(beta, k, x)
    # the direction must follow the constrained solution family, so the
    # coefficient partials re-solve the period lock at every displaced k
    d, _ = stability.discriminant_and_hg(beta, k, constraint="resolved")
    a1 = lambda b, kk: stability.coeffs_a1a2(b, kk)[0]
    da1_dk = stability._central(lambda kk: a1(beta, kk), k, 1e-6)
    da1_db = stability._central(lambda b: a1(b, k), beta, 1e-6)
    b0 = tuple((da1_dk * dbj - da1_db * dkj) / d for dkj, dbj in zip(dk, db))
    op = kksh_operator(family)
    image = op.apply(x, b0)
    B = family.eval(0.0, x, deg=0).value
    return float(np.max(np.abs(image + B)))
