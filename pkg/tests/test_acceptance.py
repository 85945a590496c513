"""Acceptance suite: one test (or test pair) per numbered criterion.

Each criterion is asserted at its stated tolerance and prints a PASS/FAIL
line.  Three clauses are implemented faithfully but are expected to fail;
each carries its blocking analysis in its docstring:

* criterion 1, kink clause: the first stationary equation evaluated on the
  static kink reduces to -(b/2) B_x, which is nonzero for every b != 0, so
  "both residuals vanish for arbitrary (a, b)" is unattainable (only the
  second equation is (a, b)-free).
* criteria 3 and 4, eigenvalue tables: the quoted line-case reference values
  lie BELOW the variational bound of the printed operator (Rayleigh-Ritz
  projections cannot undershoot the true minimum); a converged composite-
  Gauss assembly, an independent sparse finite-difference eigensolver and
  the printed periodic small-k limit all agree on different values.
* criterion 9, slope window: the fitted log-log slope of |lambda_1| vs the
  oscillation scaling over [0.5, 2.0] is ~1.7 (it approaches 2 only at the
  top of the range); even the quoted reference pairs give 1.5.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from breatherlab import breathers as br
from breatherlab import functionals as fn
from breatherlab import galerkin as gk
from breatherlab import jets, linops
from breatherlab import stability as st


def report(num, label, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {num} ({label}): {status}{' - ' + detail if detail else ''}")


def spectrum_for(family, n):
    """n is the basis cutoff, except for the block case where it is the
    total matrix dimension (two slots)."""
    op = linops.operator_for(family)
    if family.kind == "sg":
        problem = gk.hermite_problem(op, n // 2 - 1)
    elif family.kind == "kksh":
        problem = gk.fourier_problem(op, n)
    else:
        problem = gk.hermite_problem(op, n)
    return gk.solve_problem(problem)


# ---------------------------------------------------------------------------
# criterion 1: exact identities
# ---------------------------------------------------------------------------

SCALAR_FAMILIES = [
    br.MkdvBreather(alpha=2.5, beta=1.0, x1=0.3, x2=-0.1),
    br.MkdvBreather(alpha=0.5, beta=0.7),
    br.MkdvBreather(alpha=1.2, beta=1.4, x1=1.0, x2=0.2),
    br.GardnerBreather(alpha=0.5, beta=1.0, mu=0.1, x1=0.1),
    br.GardnerBreather(alpha=1.0, beta=0.8, mu=-0.4),
    br.GardnerBreather(alpha=0.7, beta=1.2, mu=1.0, x1=0.5),
    br.KkshBreather(beta=1.0, k=0.03, x1=0.1),
    br.KkshBreather(beta=0.7, k=0.01),
    br.KkshBreather(beta=1.3, k=0.055, x1=0.4),
    br.NonzeroMeanBreather(mu=1.3, c1=0.9, p=2, q=3),
    br.NonzeroMeanBreather(mu=2.9096582464459835, c1=1.65, p=22, q=23),
    br.NonzeroMeanBreather(mu=1.0, c1=1.2, p=3, q=5),
]

SG_FAMILIES = [
    br.SgBreather(beta=0.5, v=0.7, x1=0.2),
    br.SgBreather(beta=0.3, v=0.0),
    br.SgBreather(beta=0.9, v=-0.5, x2=0.3),
]


def test_criterion1_stationary_and_pde_identities():
    worst_stat, worst_pde = 0.0, 0.0
    for fam in SCALAR_FAMILIES:
        worst_stat = max(worst_stat, fn.stationary_residual(fam, t=0.3))
        worst_pde = max(worst_pde, fn.pde_residual(fam, n_points=100))
    for fam in SG_FAMILIES:
        r1, r2 = fn.stationary_residual(fam, t=0.3)
        worst_stat = max(worst_stat, r1, r2)
        worst_pde = max(worst_pde, fn.pde_residual(fam, n_points=100))
    ok = worst_stat <= 1e-8 and worst_pde <= 1e-9
    report(1, "stationary + evolution identities", ok,
           f"max stationary {worst_stat:.2e}, max pde {worst_pde:.2e}")
    assert worst_stat <= 1e-8
    assert worst_pde <= 1e-9


def test_criterion1_kink_arbitrary_constants():
    """Kink satisfies the stationary pair for two arbitrary (a, b) pairs.

    Unattainable as stated: the first equation on the static kink reduces to
    -(b/2) B_x exactly, so only b = 0 works there (the second equation is
    genuinely (a, b)-free).
    """
    kink = br.SgKink(v=0.0)
    worst = 0.0
    for ab in ((0.37, -1.2), (-0.8, 0.55)):
        r1, r2 = fn.stationary_residual(kink, ab=ab)
        worst = max(worst, r1, r2)
    report(1, "kink with arbitrary constants", worst <= 1e-9, f"max residual {worst:.2e}")
    assert worst <= 1e-9, (
        "static kink fails the first stationary equation for b != 0: residual "
        f"{worst:.3e}; only b = 0 can satisfy it (see docstring)"
    )


# ---------------------------------------------------------------------------
# criterion 2: closed-form functionals
# ---------------------------------------------------------------------------


def test_criterion2_closed_form_functionals():
    h = 1e-5
    worst = {"exact": 0.0, "fd": 0.0}
    for beta in (0.3, 0.5, 0.8):
        for v in (0.0, 0.4, 0.7):
            fam = br.SgBreather(beta=beta, v=v)
            e = fn.evaluate_functional("energy", fam)
            p = fn.evaluate_functional("momentum", fam)
            worst["exact"] = max(
                worst["exact"],
                abs(e - 16 * beta) / (16 * beta),
                abs(p - (-8 * beta * v)) / max(abs(8 * beta * v), 1.0),
            )
            de = (
                fn.evaluate_functional("energy", replace(fam, beta=beta + h))
                - fn.evaluate_functional("energy", replace(fam, beta=beta - h))
            ) / (2 * h)
            dp = (
                fn.evaluate_functional("momentum", replace(fam, beta=beta + h))
                - fn.evaluate_functional("momentum", replace(fam, beta=beta - h))
            ) / (2 * h)
            worst["fd"] = max(
                worst["fd"], abs(de - 16) / 16, abs(dp + 8 * v) / max(8 * abs(v), 1.0)
            )
            q = linops.sg_scaling_quadratic_form(fam)
            q_ref = -32 * (1 + 3 * v * v) * beta
            pairing = linops.sg_scaled_direction_pairing(beta, v)
            pairing_ref = (8.0 / beta) * (1 + 3 * v * v)
            worst["exact"] = max(
                worst["exact"], abs(q - q_ref) / abs(q_ref),
                abs(pairing - pairing_ref) / pairing_ref,
            )
    for beta in (0.3, 0.5, 0.8):
        fam = br.MkdvBreather(alpha=1.1, beta=beta)
        m = fn.evaluate_functional("mass", fam)
        worst["exact"] = max(worst["exact"], abs(m - 4 * beta) / (4 * beta))
    ok = worst["exact"] <= 1e-6 and worst["fd"] <= 1e-4
    report(2, "closed-form functionals", ok,
           f"exact {worst['exact']:.2e}, fd-limited {worst['fd']:.2e}")
    assert worst["exact"] <= 1e-6
    assert worst["fd"] <= 1e-4


# ---------------------------------------------------------------------------
# criteria 3 and 4: line spectra
# ---------------------------------------------------------------------------

FIG2_SHIFTS = (0.09, 0.81, 1.53, 2.15, 3.14)
FIG2_LAMBDA1 = (-4.226, -4.191, -3.491, -2.557, -1.507)
FIG2_LAMBDA4 = (1.776, 1.862, 1.886, 1.901, 1.915)


@pytest.fixture(scope="module")
def mkdv_table_spectra():
    out = {}
    for x1 in FIG2_SHIFTS:
        fam = br.MkdvBreather(alpha=0.5, beta=1.0, x1=x1)
        out[x1] = spectrum_for(fam, 160)
    return out


def test_criterion3_classification(mkdv_table_spectra):
    ok = True
    for x1, (_, spec, cls) in mkdv_table_spectra.items():
        n_small = int(np.sum(np.abs(spec.values) <= 0.1))
        ok = ok and (n_small == 2) and (cls.n_neg == 1) and (cls.kernel_dim == 2)
    report(3, "unique negative eigenvalue + two-dimensional kernel", ok)
    assert ok


def test_criterion3_reference_eigenvalue_tables(mkdv_table_spectra):
    """Line-case reference values (implemented faithfully).

    The quoted first eigenvalues lie below the variational bound of the
    printed operator -- a converged assembly, a sparse finite-difference
    oracle and the printed periodic small-k limit agree on shallower values
    (e.g. -3.706 at shift 0.09, not -4.226) -- so this table cannot be
    reproduced from the printed equations.
    """
    errs1, errs4 = [], []
    for x1, l1_ref, l4_ref in zip(FIG2_SHIFTS, FIG2_LAMBDA1, FIG2_LAMBDA4):
        _, spec, _ = mkdv_table_spectra[x1]
        errs1.append(abs(spec.values[0] - l1_ref))
        errs4.append(abs(spec.values[3] - l4_ref))
    fam4 = br.MkdvBreather(alpha=1.5, beta=1.0, x1=0.0)
    _, spec4, _ = spectrum_for(fam4, 164)
    err_fig4 = abs(spec4.values[0] - (-22.067))
    ok = max(errs1) <= 0.05 and max(errs4) <= 0.1 and err_fig4 <= 0.5
    report(3, "reference eigenvalue tables", ok,
           f"max |dl1| {max(errs1):.3f}, max |dl4| {max(errs4):.3f}, fig-4 spot {err_fig4:.3f}")
    assert ok, (
        "reference table irreproducible from the printed operator "
        f"(max first-eigenvalue deviation {max(errs1):.3f}); see docstring"
    )


@pytest.fixture(scope="module")
def gardner_table_spectra():
    out = {}
    for mu in (0.01, 0.1):
        fam = br.GardnerBreather(alpha=0.5, beta=1.0, mu=mu)
        out[mu] = spectrum_for(fam, 50)
    return out


def test_criterion4_unique_negative_direction(gardner_table_spectra):
    ok = True
    for mu, (_, spec, _) in gardner_table_spectra.items():
        ok = ok and int(np.sum(spec.values < -0.05)) == 1
    report(4, "unique negative eigenvalue", ok)
    assert ok


def test_criterion4_reference_eigenvalue_tables(gardner_table_spectra):
    """Gardner reference values (implemented faithfully).

    Unattainable like criterion 3: the quoted values even contradict the
    printed operator's own small-mu limit (the mu -> 0 operator is the line
    operator of criterion 3, whose quoted value is -4.2, yet -2.19 is quoted
    here).  The quoted kernel accuracy at this basis size also requires a
    different effective basis scale than the printed one.
    """
    refs = {0.01: (-2.192, 1.909), 0.1: (-2.228, 1.923)}
    ok = True
    detail = []
    for mu, (_, spec, _) in gardner_table_spectra.items():
        l1, l4 = refs[mu]
        kernel_pair = np.sort(np.abs(spec.values))[:2]
        ok = ok and abs(spec.values[0] - l1) <= 0.05
        ok = ok and abs(spec.values[3] - l4) <= 0.05
        ok = ok and np.all(kernel_pair <= 0.05)
        detail.append(f"mu={mu}: l1={spec.values[0]:.3f} (ref {l1})")
    report(4, "reference eigenvalue tables", ok, "; ".join(detail))
    assert ok, "reference table irreproducible from the quoted operator; see docstring"


# ---------------------------------------------------------------------------
# criterion 5: wave-equation spectra
# ---------------------------------------------------------------------------


def test_criterion5_sg_spectra():
    checks = []
    left_cols = {}
    for v in [round(0.1 * i, 1) for i in range(8)]:
        fam = br.SgBreather(beta=0.5, v=v, x1=0.1)
        left_cols[v] = spectrum_for(fam, 50)
    _, spec0, _ = left_cols[0.0]
    checks.append(abs(spec0.values[0] - (-0.3932)) <= 0.02)
    checks.append(abs(spec0.values[3] - 0.2783) <= 0.02)
    _, spec7, _ = left_cols[0.7]
    checks.append(abs(spec7.values[0] - (-2.4203)) <= 0.1)
    right_cols = {}
    for x1 in [round(-0.4 + 0.1 * i, 1) for i in range(8)]:
        fam = br.SgBreather(beta=0.8, v=0.7, x1=x1)
        right_cols[x1] = spectrum_for(fam, 50)
    _, spec_r, _ = right_cols[0.0]
    checks.append(abs(spec_r.values[0] - (-5.194)) <= 0.1)
    class_ok = all(
        cls.n_neg == 1 and cls.kernel_dim == 2
        for _, _, cls in list(left_cols.values()) + list(right_cols.values())
    )
    checks.append(class_ok)
    ok = all(checks)
    report(5, "wave-equation spectra", ok,
           f"l1(v=0)={spec0.values[0]:.4f}, l1(v=0.7)={spec7.values[0]:.4f}, "
           f"l1(right)={spec_r.values[0]:.4f}")
    assert ok


# ---------------------------------------------------------------------------
# criterion 6: periodic spectra
# ---------------------------------------------------------------------------


def test_criterion6_periodic_spectra():
    k_half = st.solve_commensurability_from_m(0.5).k
    fam = br.KkshBreather(beta=1.0, k=k_half)
    _, spec, _ = spectrum_for(fam, 40)
    ok = abs(spec.values[0] - (-4.86)) <= 0.1
    ok = ok and abs(spec.values[1]) <= 1e-5 and abs(spec.values[2]) <= 1e-5
    ok = ok and abs(spec.values[3] - 35.35) <= 0.5
    fam22 = br.KkshBreather(beta=1.0, k=0.03, x1=0.1)
    _, spec22, _ = spectrum_for(fam22, 50)
    ok = ok and abs(spec22.values[0] - (-8.216)) <= 0.3
    ok = ok and abs(spec22.values[3] - 5.067) <= 0.3
    report(6, "periodic spectra", ok,
           f"first four at m=0.5: {np.round(spec.values[:4], 4)}")
    assert ok


# ---------------------------------------------------------------------------
# criterion 7: stability machinery
# ---------------------------------------------------------------------------


def test_criterion7_stability_machinery():
    pair = st.solve_commensurability_from_m(0.5)
    checks = {
        "m solve": abs(pair.k - 0.057) <= 1e-3,
        "k limit": abs(st.find_kstar() - 0.058836) <= 1e-4,
        "mass limit": abs(st.periodic_mass(1.0, 1e-4) / 4.0 - 1.0) <= 1e-3,
        "root": abs(st.discriminant_root() - 0.0545) <= 0.002,
        "sign high": st.discriminant_and_hg(1.0, 0.057)[1] < 0,
        "sign low": st.discriminant_and_hg(1.0, 0.03)[1] > 0,
    }
    fam = br.KkshBreather(beta=1.0, k=0.03)
    direct = fn.evaluate_functional("mass", fam)
    checks["mass quadrature"] = abs(direct - st.periodic_mass(1.0, 0.03)) <= 1e-7 * abs(direct)
    ok = all(checks.values())
    report(7, "periodic stability machinery", ok,
           ", ".join(f"{k}={'ok' if v else 'BAD'}" for k, v in checks.items()))
    assert ok, checks


# ---------------------------------------------------------------------------
# criterion 8: quadratic expansion
# ---------------------------------------------------------------------------


def test_criterion8_expansion():
    fam = br.SgBreather(beta=0.5, v=0.3)
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(5):
        a, b, w0, w1, s = rng.uniform(0.3, 1.5, size=5)
        x0, x1 = rng.uniform(-1.0, 1.0, size=2)

        def zf(X, a=a, w0=w0, x0=x0):
            return jets.exp(-a * (X - x0) * (X - x0)) * jets.sin(w0 * X)

        def wf(X, b=b, w1=w1, x1=x1, s=s):
            return jets.exp(-b * (X - x1) * (X - x1)) * jets.cos(w1 * X + s)

        lhs, rem = fn.expansion_check(fam, zf, wf, 1e-3)
        worst = max(worst, abs(lhs - rem))

    def zf(X):
        return jets.exp(-0.25 * (X - 0.4) * (X - 0.4)) * jets.sin(X * 1.1)

    def wf(X):
        return jets.exp(-0.3 * X * X) * jets.cos(X * 0.7 + 0.2)

    values = [abs(fn.expansion_check(fam, zf, wf, eps)[0]) for eps in (1e-2, 1e-3, 1e-4)]
    slope = (math.log(values[0]) - math.log(values[2])) / (math.log(1e-2) - math.log(1e-4))
    ok = worst <= 1e-10 and slope >= 2.7
    report(8, "quadratic expansion", ok, f"max mismatch {worst:.2e}, slope {slope:.3f}")
    assert worst <= 1e-10
    assert slope >= 2.7


# ---------------------------------------------------------------------------
# criterion 9: qualitative spectral curves
# ---------------------------------------------------------------------------

ALPHA_GRID = (0.5, 0.8, 1.2, 1.6, 2.0)


@pytest.fixture(scope="module")
def alpha_sweep():
    out = {}
    for alpha in ALPHA_GRID:
        fam = br.MkdvBreather(alpha=alpha, beta=1.0, x1=0.0)
        _, spec, _ = spectrum_for(fam, 160)
        out[alpha] = spec.values[0]
    return out


def test_criterion9_monotone_and_shift_period(alpha_sweep):
    mags = [abs(alpha_sweep[a]) for a in ALPHA_GRID]
    monotone = all(b > a for a, b in zip(mags, mags[1:]))
    period = 2 * math.pi / 0.5
    spectra = []
    for x1 in (0.7, 0.7 + period):
        fam = br.MkdvBreather(alpha=0.5, beta=1.0, x1=x1)
        _, spec, _ = spectrum_for(fam, 60)
        spectra.append(spec.values)
    shift_ok = float(np.max(np.abs(spectra[0] - spectra[1]))) <= 1e-8
    ok = monotone and shift_ok
    report(9, "monotone growth + shift periodicity", ok)
    assert ok


def test_criterion9_slope_window(alpha_sweep):
    """Log-log slope of |lambda_1| vs the oscillation scaling in [2, 3].

    Unattainable as stated: the fitted slope over [0.5, 2.0] is ~1.7 with
    converged values (the local slope only reaches ~2.3 at the top of the
    range, and the quoted reference pairs themselves give 1.5).
    """
    logs_a = np.log(ALPHA_GRID)
    logs_l = np.log([abs(alpha_sweep[a]) for a in ALPHA_GRID])
    slope = float(np.polyfit(logs_a, logs_l, 1)[0])
    ok = 2.0 <= slope <= 3.0
    report(9, "growth-exponent window", ok, f"fitted slope {slope:.3f}")
    assert ok, f"fitted slope {slope:.3f} outside [2, 3]; see docstring"


# ---------------------------------------------------------------------------
# criterion 10: substitutions
# ---------------------------------------------------------------------------


def test_criterion10_substitution_notes(tmp_path):
    # raw eigenvalue-vs-shift data is emitted instead of polynomial fits
    from breatherlab import cli

    out = tmp_path / "curve.csv"
    rc = cli.main([
        "sweep", "--family", "mkdv", "--alpha", "0.5", "--n", "24",
        "--param", "x1", "--values", "0.0,1.0,2.0", "--out", str(out),
    ])
    rows = [l for l in out.read_text().split("\n") if l and not l.startswith("#")]
    ok = rc == 0 and len(rows) == 4
    report(10, "property substitutions", ok,
           "digit-exact table reproduction and fit curves are out of contract; "
           "raw eigenvalue data is emitted instead")
    assert ok
