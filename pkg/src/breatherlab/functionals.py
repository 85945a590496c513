"""Conserved functionals, stationary residuals and the Lyapunov expansion.

Functionals are evaluated by quadrature on derivative grids extracted from
the family jets; every integral is verified by node doubling.  Stationary
residuals are reported relative to the largest single term of the equation at
each grid point, since term magnitudes vary over orders of magnitude across
parameter ranges.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .breathers import FieldJet, PairFieldJet
from .quadrature import LinePlan, TorusPlan, checked_integral

SQRT2 = math.sqrt(2.0)


def family_plan(family, t: float = 0.0, nodes_per_unit: float = 8.0):
    """Default quadrature plan: torus trapezoid or a line window that tracks
    the envelope centre at the evaluation time.  The node density scales with
    the family's oscillation frequency."""
    if family.domain == "torus":
        return TorusPlan(period=family.period)
    freq = getattr(family, "osc_frequency", 1.0)
    # sixth-power integrands carry harmonics of the profile frequency, so the
    # panel order grows with it
    return LinePlan(
        center=family.envelope_center(t),
        half_width=30.0 / family.decay_rate + 10.0,
        nodes_per_unit=max(nodes_per_unit, 4.0 * freq),
        order=max(10, math.ceil(4.0 * freq) + 8),
    )


def field_arrays(family, t, x, deg: int = 2) -> dict:
    """Grids of the field (and, for wave families, its time derivative)."""
    out = family.eval(t, x, deg=deg)
    if isinstance(out, PairFieldJet):
        return {
            "u": out.b.value,
            "ux": out.b.partial(nx=1),
            "uxx": out.b.partial(nx=2),
            "ut": out.bt.value,
            "utx": out.bt.partial(nx=1),
        }
    return {"u": out.value, "ux": out.partial(nx=1), "uxx": out.partial(nx=2)}


# ---------------------------------------------------------------------------
# functional integrands
# ---------------------------------------------------------------------------


def _mkdv_integrands(mu: float = 0.0):
    def mass(f):
        return 0.5 * f["u"] ** 2

    def energy(f):
        u, ux = f["u"], f["ux"]
        out = 0.5 * ux**2 - 0.25 * u**4
        if mu:
            out = out - (mu / 3.0) * u**3
        return out

    def third(f):
        u, ux, uxx = f["u"], f["ux"], f["uxx"]
        out = 0.5 * uxx**2 - 2.5 * u**2 * ux**2 + 0.25 * u**6
        if mu:
            out = out + (
                -(5.0 / 3.0) * mu * u * ux**2
                + (5.0 / 18.0) * mu**2 * u**4
                + 0.5 * mu * u**5
            )
        return out

    return {"mass": mass, "energy": energy, "f": third}


def _sg_integrands():
    def energy(f):
        return 0.5 * (f["ux"] ** 2 + f["ut"] ** 2) + (1.0 - np.cos(f["u"]))

    def momentum(f):
        return 0.5 * f["ut"] * f["ux"]

    def third(f):
        u, ux, uxx, ut, utx = f["u"], f["ux"], f["uxx"], f["ut"], f["utx"]
        cu, su = np.cos(u), np.sin(u)
        return (
            0.5 * (uxx**2 + utx**2)
            - (ut**4 + ux**4) / 32.0
            - (3.0 / 16.0) * ut**2 * ux**2
            + (5.0 / 8.0) * ux**2 * cu
            + (su**2 + ut**2 * cu) / 8.0
        )

    return {"energy": energy, "momentum": momentum, "f": third}


def _shifted_mkdv_integrands(mu: float):
    """Background-level forms: powers of (u - mu) except in the gradient terms."""

    def mass(f):
        return 0.5 * (f["u"] - mu) ** 2

    def energy(f):
        w, ux = f["u"] - mu, f["ux"]
        return 0.5 * ux**2 - mu * w**3 - 0.25 * w**4

    def third(f):
        w, ux, uxx = f["u"] - mu, f["ux"], f["uxx"]
        return (
            0.5 * uxx**2
            - 5.0 * mu * w * ux**2
            + 2.5 * mu**2 * w**4
            - 2.5 * w**2 * ux**2
            + 1.5 * mu * w**5
            + 0.25 * w**6
        )

    return {"mass": mass, "energy": energy, "f": third}


def _lyapunov_coefficients(family) -> dict:
    kind = family.kind
    if kind in ("mkdv", "gardner"):
        c_e = 2.0 * (family.beta**2 - family.alpha**2)
        c_m = (family.alpha**2 + family.beta**2) ** 2
        return {"f": 1.0, "energy": c_e, "mass": c_m}
    if kind == "kksh":
        from . import stability

        a1, a2 = stability.coeffs_a1a2(family.beta, family.k)
        return {"f": 1.0, "energy": a1, "mass": a2}
    if kind == "nonzero-mean":
        c1, c2, mu = family.c1, family.c2, family.mu
        return {
            "f": 1.0,
            "energy": c1 + c2 - 4.0 * mu**2,
            "mass": (c1 - 2.0 * mu**2) * (c2 - 2.0 * mu**2),
        }
    if kind in ("sg", "sg-kink"):
        return {"f": 1.0, "energy": family.a, "momentum": family.b}
    raise ValueError(f"no Lyapunov combination for family kind {kind!r}")


def _integrand_table(family) -> dict:
    kind = family.kind
    if kind in ("mkdv", "mkdv-soliton", "kksh"):
        return _mkdv_integrands()
    if kind in ("gardner", "gardner-soliton"):
        return _mkdv_integrands(mu=family.mu)
    if kind == "nonzero-mean":
        return _shifted_mkdv_integrands(family.mu)
    if kind in ("sg", "sg-kink"):
        return _sg_integrands()
    raise ValueError(f"unknown family kind {kind!r}")


def evaluate_functional(kind: str, family, t: float = 0.0, plan=None) -> float:
    """Quadrature value of a conserved functional on the family at time t.

    kind is one of mass / energy / momentum / f / lyapunov (availability
    depends on the family).  The quadrature is verified by node doubling.
    """
    plan = plan or family_plan(family, t)
    table = _integrand_table(family)
    if kind == "lyapunov":
        coeff = _lyapunov_coefficients(family)

        def integrand(x):
            f = field_arrays(family, t, x)
            return sum(c * table[name](f) for name, c in coeff.items())

    else:
        if kind not in table:
            raise ValueError(f"functional {kind!r} not defined for family {family.kind!r}")

        def integrand(x):
            return table[kind](field_arrays(family, t, x))

    value, _ = checked_integral(integrand, plan)
    return value


def conservation_in_time(kind: str, family, times, shifts=None, plan=None) -> float:
    """Max drift of a functional across the given times.

    ``shifts`` may provide time-dependent translation parameters (t -> (x1,
    x2)); the functional values must stay put since every piece is invariant
    under phase translations.
    """
    times = list(times)
    if len(times) < 3:
        raise ValueError("need at least three distinct times")
    values = []
    for t in times:
        fam = family
        if shifts is not None:
            x1, x2 = shifts(t)
            fam = replace(family, x1=x1, x2=x2)
        values.append(evaluate_functional(kind, fam, t=t, plan=plan))
    return max(abs(v - values[0]) for v in values[1:])


# ---------------------------------------------------------------------------
# stationary equations
# ---------------------------------------------------------------------------


def _relative_residual(terms: list[np.ndarray]) -> float:
    total = np.zeros_like(terms[0])
    scale = np.zeros_like(terms[0])
    for term in terms:
        total = total + term
        scale = np.maximum(scale, np.abs(term))
    scale = np.maximum(scale, 1e-300)
    return float(np.max(np.abs(total) / scale))


def _default_grid(family, t):
    if family.domain == "torus":
        return np.linspace(0.0, family.period, 200, endpoint=False)
    return family.envelope_center(t) + np.linspace(-10.0, 10.0, 200)


def _mkdv_terms(f: FieldJet, c_e: float, c_m: float, mu: float = 0.0) -> list:
    B = f.value
    Bx, Bxx, B4 = f.partial(nx=1), f.partial(nx=2), f.partial(nx=4)
    terms = [
        B4,
        -c_e * (Bxx + mu * B**2 + B**3),
        c_m * B,
        5.0 * B * Bx**2,
        5.0 * B**2 * Bxx,
        1.5 * B**5,
    ]
    if mu:
        terms += [
            (5.0 / 3.0) * mu * Bx**2,
            (10.0 / 3.0) * mu * B * Bxx,
            (10.0 / 9.0) * mu**2 * B**3,
            2.5 * mu * B**4,
        ]
    return terms


def _sg_terms(pair: PairFieldJet, a: float, b: float):
    B, Bt = pair.b, pair.bt
    u = B.value
    ux, uxx, u4 = B.partial(nx=1), B.partial(nx=2), B.partial(nx=4)
    ut, utx, utxx = Bt.value, Bt.partial(nx=1), Bt.partial(nx=2)
    cu, su = np.cos(u), np.sin(u)
    first = [
        utxx,
        ut**3 / 8.0,
        (3.0 / 8.0) * ux**2 * ut,
        -0.25 * ut * cu,
        -a * ut,
        -0.5 * b * ux,
    ]
    second = [
        u4,
        (3.0 / 8.0) * ux**2 * uxx,
        0.75 * ut * utx * ux,
        (3.0 / 8.0) * ut**2 * uxx,
        (5.0 / 8.0) * ux**2 * su,
        -1.25 * uxx * cu,
        0.25 * su * cu,
        -ut**2 * su / 8.0,
        -a * (uxx - su),
        -0.5 * b * utx,
    ]
    return first, second


def stationary_residual(family, x=None, t: float = 0.0, ab=None):
    """Max relative residual of the family's stationary elliptic equation(s).

    Wave-equation families return the residual pair of their two coupled
    equations; ``ab`` overrides the variational constants (used for the kink,
    which carries none of its own).
    """
    if x is None:
        x = _default_grid(family, t)
    kind = family.kind
    if kind in ("mkdv", "gardner"):
        f = family.eval(t, x, deg=4)
        c_e = 2.0 * (family.beta**2 - family.alpha**2)
        c_m = (family.alpha**2 + family.beta**2) ** 2
        mu = family.mu if kind == "gardner" else 0.0
        return _relative_residual(_mkdv_terms(f, c_e, c_m, mu))
    if kind == "kksh":
        from . import stability

        a1, a2 = stability.coeffs_a1a2(family.beta, family.k)
        f = family.eval(t, x, deg=4)
        return _relative_residual(_mkdv_terms(f, a1, a2))
    if kind == "nonzero-mean":
        f = family.eval(t, x, deg=4)
        mu, c1, c2 = family.mu, family.c1, family.c2
        B = f.value
        Bx, Bxx, B4 = f.partial(nx=1), f.partial(nx=2), f.partial(nx=4)
        W = B - mu
        terms = [
            B4,
            -(c1 + c2 - 4 * mu**2) * (Bxx + 3 * mu * W**2 + W**3),
            (c1 - 2 * mu**2) * (c2 - 2 * mu**2) * W,
            5.0 * W * Bx**2,
            5.0 * W**2 * Bxx,
            1.5 * W**5,
            5.0 * mu * Bx**2,
            7.5 * mu * W**4,
            10.0 * mu * W * Bxx,
            10.0 * mu**2 * W**3,
        ]
        return _relative_residual(terms)
    if kind in ("mkdv-soliton", "gardner-soliton"):
        f = family.eval(t, x, deg=2)
        Q, Qxx = f.value, f.partial(nx=2)
        terms = [Qxx, -family.c * Q, Q**3]
        if kind == "gardner-soliton":
            terms.insert(2, family.mu * Q**2)
        return _relative_residual(terms)
    if kind in ("sg", "sg-kink"):
        if ab is None:
            if kind == "sg-kink":
                raise ValueError("the kink carries no (a, b); pass ab explicitly")
            ab = (family.a, family.b)
        pair = family.eval(t, x, deg=4)
        first, second = _sg_terms(pair, *ab)
        return _relative_residual(first), _relative_residual(second)
    raise ValueError(f"no stationary equation for family kind {kind!r}")


def pde_residual(family, n_points: int = 100, seed: int = 0, t_span: float = 2.0) -> float:
    """Max absolute defect of the evolution equation at random (t, x) points."""
    rng = np.random.default_rng(seed)
    ts = rng.uniform(-t_span, t_span, size=n_points)
    if family.domain == "torus":
        xs = rng.uniform(0.0, family.period, size=n_points)
    else:
        xs = rng.uniform(-8.0, 8.0, size=n_points)
    worst = 0.0
    for t, x in zip(ts, xs):
        out = family.eval(t, np.asarray([x]), deg=4)
        if isinstance(out, PairFieldJet):
            B = out.b
            r = B.partial(nt=2) - B.partial(nx=2) + np.sin(B.value)
        else:
            u = out.value
            mu = family.mu if family.kind in ("gardner", "gardner-soliton") else 0.0
            r = (
                out.partial(nt=1)
                + out.partial(nx=3)
                + 2.0 * mu * u * out.partial(nx=1)
                + 3.0 * u**2 * out.partial(nx=1)
            )
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


def mean_value(family, t: float = 0.0, n_nodes: int = 8192) -> float:
    """Spatial mean of a periodic family over one period."""
    if family.domain != "torus":
        raise ValueError("mean value is defined for periodic families")
    x = np.arange(n_nodes) * (family.period / n_nodes)
    return float(np.mean(family.eval(t, x, deg=0).value))


# ---------------------------------------------------------------------------
# quadratic expansion of the wave-equation Lyapunov functional
# ---------------------------------------------------------------------------


def _sg_h_from_arrays(f: dict, a: float, b: float, w_quad: np.ndarray) -> float:
    table = _sg_integrands()
    vals = table["f"](f) + a * table["energy"](f) + b * table["momentum"](f)
    return float(np.dot(w_quad, vals))


def sg_lyapunov_of_perturbed(family, z_fun, w_fun, eps: float, plan=None) -> float:
    """H evaluated on (B + eps z, B_t + eps w) by direct quadrature."""
    plan = plan or family_plan(family, 0.0)
    x, w_quad = plan.nodes_weights(2)
    pair = family.eval(0.0, x, deg=2)
    z0, z1, z2 = _eval_perturbation(z_fun, x, 2)
    w0, w1, _ = _eval_perturbation(w_fun, x, 2)
    f = {
        "u": pair.b.value + eps * z0,
        "ux": pair.b.partial(nx=1) + eps * z1,
        "uxx": pair.b.partial(nx=2) + eps * z2,
        "ut": pair.bt.value + eps * w0,
        "utx": pair.bt.partial(nx=1) + eps * w1,
    }
    return _sg_h_from_arrays(f, family.a, family.b, w_quad)


def _eval_perturbation(fun, x, orders: int):
    """Evaluate a jet-callable perturbation and its x-derivatives on a grid."""
    from .jets import Jet2

    jet = fun(Jet2.variable(np.asarray(x, dtype=float), 0, deg=orders))
    return tuple(jet.partial(i, 0) for i in range(orders + 1))


def expansion_remainder(family, z_fun, w_fun, eps: float, plan=None) -> float:
    """Closed-form cubic-and-higher remainder of the Lyapunov expansion.

    This is the exact difference H[B+eps z, B_t+eps w] - H[B, B_t]
    - (eps^2/2) Q[z, w], written term by term so that no large quantities
    cancel; its leading order is cubic in eps.
    """
    plan = plan or family_plan(family, 0.0)
    x, w_quad = plan.nodes_weights(2)
    pair = family.eval(0.0, x, deg=2)
    B = pair.b.value
    Bx = pair.b.partial(nx=1)
    Bt = pair.bt.value
    z0, z1, _ = _eval_perturbation(z_fun, x, 2)
    w0, w1, _ = _eval_perturbation(w_fun, x, 2)
    z, zx, w = eps * z0, eps * z1, eps * w0

    cb, sb = np.cos(B), np.sin(B)
    cz, sz = np.cos(z), np.sin(z)
    c1 = cz - 1.0
    s2 = sz - z
    c2 = cz - 1.0 + 0.5 * z * z

    t1 = -(4.0 * Bt * w**3 + w**4 + 4.0 * Bx * zx**3 + zx**4) / 32.0
    t2 = -(3.0 / 16.0) * (2.0 * Bt * w * zx**2 + 2.0 * Bx * w**2 * zx + w**2 * zx**2)
    t3 = (5.0 / 8.0) * (
        Bx**2 * (cb * c2 - sb * s2)
        + 2.0 * Bx * zx * (cb * c1 - sb * s2)
        + zx**2 * (cb * c1 - sb * sz)
    )
    c2b, s2b = np.cos(2.0 * B), np.sin(2.0 * B)
    t4 = (c2b * (0.5 * (1.0 - np.cos(2.0 * z)) - z * z) + s2b * (0.5 * np.sin(2.0 * z) - z)) / 8.0
    t5 = (
        Bt**2 * (cb * c2 - sb * s2)
        + 2.0 * Bt * w * (cb * c1 - sb * s2)
        + w**2 * (cb * c1 - sb * sz)
    ) / 8.0
    t6 = family.a * (sb * s2 - cb * c2)
    return float(np.dot(w_quad, t1 + t2 + t3 + t4 + t5 + t6))


def expansion_check(family, z_fun, w_fun, eps: float, plan=None) -> tuple[float, float]:
    """(H-difference minus half the quadratic form, explicit remainder).

    The two must agree: the difference route relies on the stationary
    equations killing the linear term and on the quadratic-form
    normalisation, while the explicit remainder contains neither.
    """
    from . import linops

    plan = plan or family_plan(family, 0.0)
    h0 = sg_lyapunov_of_perturbed(family, z_fun, w_fun, 0.0, plan)
    h1 = sg_lyapunov_of_perturbed(family, z_fun, w_fun, eps, plan)
    q = linops.sg_quadratic_form_of_callables(family, z_fun, w_fun, plan)
    lhs = h1 - h0 - 0.5 * eps * eps * q
    return lhs, expansion_remainder(family, z_fun, w_fun, eps, plan)
