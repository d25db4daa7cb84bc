"""Acceptance criteria.

Each test is tagged with ``@pytest.mark.criterion(n)``; the terminal summary
prints one PASS/FAIL line per criterion (see conftest.py). Published
expressions that disagree with independent evaluation are kept as strict
xfails so the discrepancy stays visible and is re-checked on every run.
"""

import io
import math

import numpy as np
import pytest

from wvarent import cli
from wvarent.datasets import COVID, NANO
from wvarent.distributions import (Exponential, LogisticExponential, LogUniform, Lomax, Power,
                                   Uniform, Weibull)
from wvarent.erratum import collect
from wvarent.estimation import bootstrap_study, monte_carlo_study
from wvarent.measures import (DiscreteModel, closed_form_wve, discrete_varentropy,
                              discrete_weighted_varentropy, weighted_varentropy, wve_upper_bound)
from wvarent.phr import (PHRModel, gamma_exponential, gamma_fn, phr_exponential_wrve, wrve_phr)
from wvarent.residual import (closed_form_wrve, rve, wrve, wrve_lower_bound, wrve_upper_bound)
from wvarent.systems import (DistortionFunction, closed_form_parallel2_power, distortion_k_of_n,
                             wve_coherent, wve_coherent_bounds, wve_comparison_condition,
                             wve_system_direct)
from wvarent.transforms import (MonotoneMap, TransformedDistribution, wrve_affine, wrve_monotone,
                                wve_affine, wve_location, wve_monotone, wve_scale)

CRITERIA = {
    1: ("Discrete exactness (three-point example digits)",
        "weighted values differ from exact finite sums by 2.6e-8 / 2.0e-8 (> 1e-9); "
        "unweighted value matches to 1e-12. See ERRATUM.md, discrete-digits."),
    2: ("Closed forms vs quadrature (uniform, exponential, power; WVE and WRVE)",
        "power closed forms asserted in corrected form; published forms fail (strict xfail)."),
    3: ("Simulation-table true values", ""),
    4: ("Simulation-table trend (500 replications, Silverman bandwidth)", ""),
    5: ("Published constants (Weibull WVE, exponential WVE ceiling, RVE)", ""),
    6: ("Bound suites (unconditional, residual upper/lower, coherent systems)", ""),
    7: ("Transformation identities on the 3x3x3 lattice",
        "location-shift and affine-residual identities asserted in re-derived form; "
        "published forms fail (strict xfail); decreasing branch and derivative logged."),
    8: ("Coherent systems: closed form vs u-form, identity reduction",
        "u-form differs from the true system WVE for q != identity (strict xfail)."),
    9: ("PHR dual route, exponential closed forms, monotone trend", ""),
    10: ("Real-data anchors and bootstrap bias signs", ""),
    11: ("Determinism of simulate/estimate output", ""),
}


def close(a, b, rel, abs_=1e-12):
    return abs(a - b) <= max(rel * abs(b), abs_)


# -- 1 -------------------------------------------------------------------------------


@pytest.mark.criterion(1)
def test_c1_discrete_varentropy_both_orderings():
    for p in [(0.5, 0.2, 0.3), (0.3, 0.2, 0.5)]:
        assert abs(discrete_varentropy(DiscreteModel((1, 2, 3), p)) - 0.13296441046) <= 1e-9


@pytest.mark.criterion(1)
@pytest.mark.parametrize("p,quoted", [((0.5, 0.2, 0.3), 1.92508326678),
                                      ((0.3, 0.2, 0.5), 0.48838794637)])
def test_c1_discrete_weighted_varentropy_digits(p, quoted):
    value = discrete_weighted_varentropy(DiscreteModel.with_identity_weights((1, 2, 3), p))
    assert abs(value - quoted) <= 1e-9, f"exact sum {value!r} vs quoted {quoted}"


# -- 2 -------------------------------------------------------------------------------


def _wve_grids():
    uni = [Uniform(a, a + w) for a in (0.0, 0.5, 2.0, 5.0) for w in (0.3, 0.7, 1.5, 2.5, 4.0)]
    exp = [Exponential(l) for l in np.geomspace(0.2, 20, 20)]
    pw = [Power(k, b) for k in (0.5, 1.5, 2.0, 3.0, 5.0) for b in (0.5, 1.0, 2.0, 3.0)]
    return uni, exp, pw


@pytest.mark.criterion(2)
@pytest.mark.parametrize("family", ["uniform", "exponential", "power"])
def test_c2_wve_closed_form_grid(family):
    grids = dict(zip(["uniform", "exponential", "power"], _wve_grids()))
    dists = grids[family]
    assert len(dists) >= 20
    for d in dists:
        assert close(closed_form_wve(d), weighted_varentropy(d), 1e-6), d


@pytest.mark.criterion(2)
@pytest.mark.parametrize("family", ["uniform", "exponential", "power"])
def test_c2_wrve_closed_form_grid(family):
    if family == "uniform":
        cases = [(Uniform(0.0, b), t) for b in (0.5, 2.0, 4.0, 6.0) for t in (0.0, 0.1, 0.2, 0.35, 0.45)]
    elif family == "exponential":
        cases = [(Exponential(l), t) for l in (0.5, 1.0, 2.0, 5.5) for t in (0.0, 0.1, 0.3, 1.0, 2.0)]
    else:
        cases = [(Power(k, 1.0), t) for k in (0.5, 1.5, 2.0, 3.0) for t in (0.05, 0.2, 0.4, 0.6, 0.8)]
    assert len(cases) >= 20
    for d, t in cases:
        assert close(closed_form_wrve(d, t), wrve(d, t), 1e-6), (d, t)


@pytest.mark.criterion(2)
@pytest.mark.xfail(strict=True, reason="published power-family WVE closed form (sign and (k+1) power)")
def test_c2_power_wve_published_form():
    d = Power(2.0, 1.0)
    assert close(closed_form_wve(d, printed=True), weighted_varentropy(d), 1e-6)


@pytest.mark.criterion(2)
@pytest.mark.xfail(strict=True, reason="published power-family WRVE closed form (missing +2, (k+1) power)")
def test_c2_power_wrve_published_form():
    d = Power(2.0, 1.0)
    assert close(closed_form_wrve(d, 0.5, printed=True), wrve(d, 0.5), 1e-6)


# -- 3 -------------------------------------------------------------------------------


@pytest.mark.criterion(3)
@pytest.mark.parametrize("t,value", [(0.1, 0.39985), (0.2, 0.51331), (0.3, 0.64677)])
def test_c3_table_true_values(t, value):
    assert abs(wrve(Exponential(5.5), t) - value) <= 5e-5


# -- 4 -------------------------------------------------------------------------------

REFERENCE_BIAS = {
    0.1: [-0.17774, -0.18743, -0.17959, -0.14185, -0.12904],
    0.2: [-0.29152, -0.26200, -0.24604, -0.22374, -0.19449],
    0.3: [-0.41856, -0.36331, -0.35657, -0.30160, -0.28645],
}
N_GRID = [50, 80, 100, 150, 200]


@pytest.fixture(scope="module")
def exp_study():
    return monte_carlo_study(Exponential(5.5), [0.1, 0.2, 0.3], N_GRID, 500, "silverman", seed=20240601)


@pytest.mark.criterion(4)
def test_c4_mse_strictly_decreasing(exp_study):
    for t in (0.1, 0.2, 0.3):
        mse = [exp_study.row(t, n).mse for n in N_GRID]
        assert all(a > b for a, b in zip(mse, mse[1:])), (t, mse)


@pytest.mark.criterion(4)
def test_c4_bias_negative_and_within_factor_three(exp_study):
    for t, ref in REFERENCE_BIAS.items():
        for n, b_ref in zip(N_GRID, ref):
            row = exp_study.row(t, n)
            assert row.failures == 0
            assert row.bias < 0, (t, n)
            assert 1 / 3 <= row.bias / b_ref <= 3, (t, n, row.bias, b_ref)


# -- 5 -------------------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_c5_constants():
    assert 1.85 <= weighted_varentropy(Weibull(2.0)) <= 1.89
    for lam in np.linspace(8.0, 20.0, 241)[1:]:
        assert closed_form_wve(Exponential(lam)) < 0.1201
        assert weighted_varentropy(Exponential(lam)) < 0.1201


@pytest.mark.criterion(5)
def test_c5_rve_exponential_and_uniform():
    for lam in (0.5, 1.0, 5.5):
        for t in np.linspace(0.0, 3.0, 31):
            assert abs(rve(Exponential(lam), t) - 1.0) <= 1e-6
    for b in (0.5, 2.0):
        for t in np.linspace(0.0, 0.95 * b, 31):
            assert abs(rve(Uniform(0.0, b), t)) <= 1e-6


# -- 6 -------------------------------------------------------------------------------

SLACK = 1e-6


@pytest.mark.criterion(6)
@pytest.mark.parametrize("dist,alpha,beta", [(Lomax(1.0, 1.0), 1.0, 0.5), (Lomax(4.0, 4.0), 1.0, 0.5),
                                             (Exponential(1.0), 1.0, 2.0)])
def test_c6_unconditional_upper_bound(dist, alpha, beta):
    r = wve_upper_bound(dist, alpha, beta)
    assert r.condition_holds
    assert r.measure <= r.bound + SLACK


@pytest.mark.criterion(6)
def test_c6_residual_upper_bound_exponential_grid():
    for t in np.linspace(0.05, 5.0, 34):
        r = wrve_upper_bound(Exponential(1.0), t, 1.0, 2.0)
        assert r.condition_holds
        assert r.measure <= r.bound + SLACK
        # closed form of the right-hand side for this example
        closed = (t ** 4 + 4 * t ** 3 + 12 * t ** 2 + 24 * t + 24 - (t ** 3 + 3 * t ** 2 + 6 * t + 6) * (t - 2)
                  - 2 * t * (t * t + 2 * t + 2) + t * t * (t * t + 2 * t + 2))
        assert close(r.bound, closed, 1e-8)


@pytest.mark.criterion(6)
def test_c6_residual_upper_bound_lomax():
    for t in (0.25, 0.5, 1.0, 2.0):
        r = wrve_upper_bound(Lomax(4.0, 4.0), t, 1.0, 0.5)
        assert r.condition_holds and r.measure <= r.bound + SLACK


@pytest.mark.criterion(6)
@pytest.mark.parametrize("dist,ts", [(Exponential(1.0), [0.0, 0.5, 1.0, 2.0, 4.0]),
                                     (Exponential(3.0), [0.0, 0.2, 0.7]),
                                     (Uniform(0.0, 1.0), [0.0, 0.3, 0.6, 0.9]),
                                     (Uniform(0.0, 2.0), [0.0, 0.5, 1.5])])
def test_c6_residual_lower_bound(dist, ts):
    for t in ts:
        r = wrve_lower_bound(dist, t)
        assert r.bound <= r.measure + SLACK, (t, r)


@pytest.mark.criterion(6)
@pytest.mark.parametrize("q,comp", [(DistortionFunction.parallel(2), Uniform(0.0, 1.0)),
                                    (DistortionFunction.series(2), Exponential(1.0)),
                                    (distortion_k_of_n(2, 3), Power(2.0, 1.0)),
                                    (DistortionFunction.identity(), Exponential(2.0))])
def test_c6_comparison_condition(q, comp):
    c = wve_comparison_condition(q, comp)
    assert c.conclusion is None or c.verified


@pytest.mark.criterion(6)
@pytest.mark.parametrize("q,comp,alpha,beta,L", [
    (DistortionFunction.parallel(2), Power(2.0, 1.0), 1.0, 2.0, None),
    (DistortionFunction.parallel(2), LogUniform(1.0, 3.0), 1.0, 0.0, 1 / (3 * math.log(3))),
    (DistortionFunction.identity(), Exponential(1.0), 1.0, 2.0, None),
    (distortion_k_of_n(2, 3), Exponential(1.0), 1.0, 2.0, None),
])
def test_c6_coherent_bounds(q, comp, alpha, beta, L):
    b = wve_coherent_bounds(q, comp, alpha, beta, L)
    assert b.value <= b.bound_wve + SLACK
    if b.condition_holds:
        assert b.value <= b.bound_wse + SLACK
    if b.floor_holds:
        assert b.value <= b.bound_density_floor + SLACK


# -- 7 -------------------------------------------------------------------------------

FAMILIES = [Exponential(1.5), Weibull(2.0), Power(2.0, 1.0)]
INC_MAPS = [MonotoneMap.affine(2.0, 1.0), MonotoneMap.square(), MonotoneMap.power(0.5)]
REL7 = 1e-5


def _direct_wve(d, phi):
    return weighted_varentropy(TransformedDistribution(d, phi))


@pytest.mark.criterion(7)
@pytest.mark.parametrize("d", FAMILIES, ids=str)
def test_c7_affine_wve(d):
    for a in (0.5, 2.0, 3.0):
        for b in (0.0, 0.5, 2.0):
            assert close(wve_affine(d, a, b), _direct_wve(d, MonotoneMap.affine(a, b)), REL7), (a, b)


@pytest.mark.criterion(7)
@pytest.mark.parametrize("d", FAMILIES, ids=str)
def test_c7_scale_and_location(d):
    for a in (0.5, 2.0, 3.0):
        assert close(wve_scale(d, a), _direct_wve(d, MonotoneMap.affine(a, 0.0)), REL7)
    for b in (0.5, 1.0, 2.0):
        assert close(wve_location(d, b), _direct_wve(d, MonotoneMap.affine(1.0, b)), REL7)


@pytest.mark.criterion(7)
@pytest.mark.xfail(strict=True, reason="published location-shift shortcut drops the cross term")
def test_c7_location_published_form():
    d = Exponential(1.0)
    assert close(wve_location(d, 1.0, printed=True), _direct_wve(d, MonotoneMap.affine(1.0, 1.0)), REL7)


@pytest.mark.criterion(7)
@pytest.mark.parametrize("d", FAMILIES, ids=str)
def test_c7_monotone_increasing_wve(d):
    for phi in INC_MAPS:
        assert close(wve_monotone(d, phi), _direct_wve(d, phi), REL7), phi.label


def _t_grid(law):
    return [float(law.ppf(u)) for u in (0.1, 0.4, 0.7)]


@pytest.mark.criterion(7)
@pytest.mark.parametrize("d", FAMILIES, ids=str)
def test_c7_affine_wrve(d):
    for a, b in ((2.0, 1.0), (0.5, 0.2), (3.0, 0.0)):
        law = TransformedDistribution(d, MonotoneMap.affine(a, b))
        for t in _t_grid(law):
            assert close(wrve_affine(d, a, b, t), wrve(law, t), REL7), (a, b, t)


@pytest.mark.criterion(7)
@pytest.mark.xfail(strict=True, reason="published affine residual corollary is exact only for a = 1")
def test_c7_affine_wrve_published_form():
    d = Exponential(1.0)
    law = TransformedDistribution(d, MonotoneMap.affine(2.0, 1.0))
    assert close(wrve_affine(d, 2.0, 1.0, 2.0, printed=True), wrve(law, 2.0), REL7)


@pytest.mark.criterion(7)
@pytest.mark.parametrize("d", FAMILIES, ids=str)
def test_c7_monotone_increasing_wrve(d):
    for phi in INC_MAPS:
        law = TransformedDistribution(d, phi)
        for t in _t_grid(law):
            assert close(wrve_monotone(d, phi, t), wrve(law, t), REL7), (phi.label, t)


@pytest.mark.criterion(7)
@pytest.mark.parametrize("d", FAMILIES, ids=str)
def test_c7_identity_cases_exact(d):
    ident = MonotoneMap.identity()
    assert abs(wve_monotone(d, ident) - weighted_varentropy(d)) <= 1e-9
    assert abs(wve_affine(d, 1.0, 0.0) - weighted_varentropy(d)) <= 1e-9
    for t in (float(d.ppf(0.2)), float(d.ppf(0.6))):
        assert abs(wrve_monotone(d, ident, t) - wrve(d, t)) <= 1e-9
        assert abs(wrve_affine(d, 1.0, 0.0, t) - wrve(d, t)) <= 1e-9


@pytest.mark.criterion(7)
def test_c7_decreasing_branch_and_derivative_logged():
    entries = {e.key: e for e in collect({"monotone-decreasing", "wrve-derivative"})}
    dec, der = entries["monotone-decreasing"], entries["wrve-derivative"]
    assert dec.status == "erratum" and dec.abs_diff > 0.1
    assert der.status == "erratum" and der.abs_diff > 100
    # the re-derived decreasing branch agrees with direct quadrature
    for d in FAMILIES:
        for phi in (MonotoneMap.exp_neg(1.0), MonotoneMap.reflect(5.0)):
            assert close(wve_monotone(d, phi), _direct_wve(d, phi), REL7), (d, phi.label)


# -- 8 -------------------------------------------------------------------------------


@pytest.mark.criterion(8)
def test_c8_closed_form_matches_u_form():
    q = DistortionFunction.parallel(2)
    grid = [(k, a) for k in (0.5, 1.0, 2.0, 3.0, 5.0) for a in (0.5, 1.0, 1.5, 2.0, 4.0)]
    assert len(grid) == 25
    for k, a in grid:
        assert close(closed_form_parallel2_power(k, a), wve_coherent(q, Power(k, a)), 1e-6, 1e-9), (k, a)


@pytest.mark.criterion(8)
@pytest.mark.parametrize("comp", [Exponential(1.0), Weibull(2.0), Power(2.0, 1.0), Lomax(2.0, 4.0)], ids=str)
def test_c8_identity_distortion(comp):
    assert abs(wve_coherent(DistortionFunction.identity(), comp) - weighted_varentropy(comp)) <= 1e-7


@pytest.mark.criterion(8)
@pytest.mark.xfail(strict=True, reason="u-form differs from the WVE of the system lifetime for q(u) = u^2")
def test_c8_u_form_equals_system_wve():
    q, comp = DistortionFunction.parallel(2), Power(1.0, 1.0)
    assert close(wve_coherent(q, comp), wve_system_direct(q, comp), 1e-6)


# -- 9 -------------------------------------------------------------------------------

BASELINES = [Exponential(1.3), Uniform(0.0, 2.0), Power(2.0, 1.0), Weibull(1.7), Lomax(2.0, 4.0)]


@pytest.mark.criterion(9)
@pytest.mark.parametrize("base", BASELINES, ids=str)
def test_c9_dual_route(base):
    for a in (1.0, 2.0, 3.0):
        model = PHRModel(base, a)
        for u in (0.0, 0.3, 0.6):
            t = float(base.ppf(u)) if u else base.support()[0]
            assert close(wrve_phr(model, t), wrve(model, t), 1e-6, 1e-9), (a, t)


@pytest.mark.criterion(9)
def test_c9_exponential_closed_forms():
    for a in (1.0, 2.0, 3.0):
        for lam in (0.5, 1.0, 4.0):
            model = PHRModel(Exponential(lam), a)
            for t in (0.0, 0.3, 1.0):
                assert close(phr_exponential_wrve(a, lam, t), wrve_phr(model, t), 1e-8)
                for y in (0.05, 0.3, 0.9):
                    y0 = math.exp(-a * lam * t)
                    assert close(gamma_exponential(y * y0, a, lam, t), gamma_fn(model, y * y0, t), 1e-10, 1e-12)


@pytest.mark.criterion(9)
def test_c9_monotone_trend():
    ts = np.linspace(0.0, 2.0, 21)
    for a in (1, 2, 3, 4):
        for lam in (1, 3, 4, 7):
            v = [phr_exponential_wrve(a, lam, t) for t in ts]
            assert all(y >= x for x, y in zip(v, v[1:])), (a, lam)


# -- 10 ------------------------------------------------------------------------------

NANO_REFERENCE = dict(zip([0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7],
                  [7.65442, 7.65442, 7.65443, 7.65503, 7.66043, 7.68493, 7.76122, 7.94443, 8.30439]))
COVID_REFERENCE = dict(zip([0.01, 0.05, 0.1, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45],
                  [0.61632, 0.61733, 0.62262, 0.65976, 0.69855, 0.75391, 0.82615, 0.91412, 1.01581]))


@pytest.mark.criterion(10)
@pytest.mark.parametrize("ds,table", [(NANO, NANO_REFERENCE), (COVID, COVID_REFERENCE)], ids=["nano", "covid"])
def test_c10_true_value_columns(ds, table):
    fitted = ds.fitted_distribution()
    for t, v in table.items():
        assert abs(wrve(fitted, t) - v) <= 1e-3, t


@pytest.mark.criterion(10)
def test_c10_covid_fit_is_the_published_one():
    assert COVID.fitted_distribution() == LogisticExponential(2.4719, 1.7619)


@pytest.mark.criterion(10)
@pytest.mark.parametrize("ds,table,sign", [(NANO, NANO_REFERENCE, -1), (COVID, COVID_REFERENCE, 1)], ids=["nano", "covid"])
def test_c10_bootstrap_bias_signs(ds, table, sign):
    fitted = ds.fitted_distribution()
    ts = list(table)
    truth = [wrve(fitted, t) for t in ts]
    matches = total = 0
    for seed in range(10):
        rep = bootstrap_study(ds.values, fitted, ts, ds.bandwidth, 600, seed=seed, true_values=truth)
        for row in rep.rows:
            total += 1
            matches += np.sign(row.bias) == sign
    assert matches / total >= 0.9, f"{matches}/{total}"


# -- 11 ------------------------------------------------------------------------------


def _run(argv):
    out = io.StringIO()
    assert cli.run(argv, stdout=out) == 0
    return out.getvalue()


@pytest.mark.criterion(11)
def test_c11_simulate_deterministic():
    argv = ["simulate", "--dist", "exp:lambda=5.5", "--t", "0.1,0.3", "--n", "30,60",
            "--reps", "40", "--seed", "42"]
    first = _run(argv)
    assert first == _run(argv)
    assert first == _run(argv + ["--workers", "2"])


@pytest.mark.criterion(11)
def test_c11_estimate_deterministic():
    argv = ["estimate", "--data", "builtin:covid", "--fitted", "builtin:covid", "--t", "0.01,0.3",
            "--bn", "0.45", "--bootstrap", "60", "--seed", "42"]
    first = _run(argv)
    assert first == _run(argv)
    assert first == _run(argv + ["--workers", "3"])
