import io
import math

import numpy as np
import pytest

from wvarent.distributions import Exponential, Uniform
from wvarent.errors import EmptySample, EmptyStudy, NonPositiveBandwidth, ParseError, TailUnderflow
from wvarent.estimation import (CSV_COLUMNS, BandwidthRule, KernelEstimate, bootstrap_study, kde_pdf,
                                kde_sf, monte_carlo_study, silverman_bandwidth, wrse_estimate,
                                wrve_estimate)
from wvarent.quadrature import integrate


def _sample(n=200, seed=3, lam=5.5):
    return Exponential(lam).sample(n, seed=seed)


def test_point_mass_peak():
    est = KernelEstimate(np.full(10, 2.0), 0.3)
    assert kde_pdf(est, 2.0) == pytest.approx(1 / (0.3 * math.sqrt(2 * math.pi)), rel=1e-14)
    assert kde_pdf(est, 2.0) > kde_pdf(est, 2.01)
    assert kde_sf(est, -1e6) == 1.0


def test_uniform_consistency_band():
    est = KernelEstimate(Uniform(0.0, 1.0).sample(10_000, seed=1), 0.05)
    assert abs(kde_pdf(est, 0.5) - 1.0) < 0.1


def test_pdf_integrates_to_one_and_sf_matches_quadrature():
    est = KernelEstimate(_sample(50), 0.04)
    f = lambda x: float(kde_pdf(est, x))
    assert integrate(f, est.lower - 1.0, est.upper + 1.0).value == pytest.approx(1.0, abs=1e-6)
    ts = np.linspace(est.lower, est.upper, 20)
    for t in ts:
        q = integrate(f, t, est.upper + 1.0, breakpoints=list(est.sample[est.sample > t])).value
        assert kde_sf(est, t) == pytest.approx(q, abs=1e-9)


def test_vectorised_evaluation():
    est = KernelEstimate(_sample(30), 0.05)
    x = np.linspace(0, 1, 7)
    np.testing.assert_allclose(kde_pdf(est, x), [kde_pdf(est, v) for v in x], rtol=1e-15)
    np.testing.assert_allclose(kde_sf(est, x), [kde_sf(est, v) for v in x], rtol=1e-15)


def test_silverman():
    x = np.array([1.0, 2.0, 4.0, 7.0])
    assert silverman_bandwidth(x) == pytest.approx(1.06 * np.std(x, ddof=1) * 4 ** -0.2, rel=1e-15)
    assert BandwidthRule.parse("silverman")(x) == silverman_bandwidth(x)
    assert BandwidthRule.parse("fixed:0.3")(x) == 0.3
    assert str(BandwidthRule.parse("fixed:0.3")) == "fixed:0.3"
    with pytest.raises(ParseError):
        BandwidthRule.parse("scott")
    with pytest.raises(NonPositiveBandwidth):
        BandwidthRule.parse("fixed:0")


def test_estimator_validation():
    with pytest.raises(EmptySample):
        KernelEstimate(np.array([1.0]), 0.1)
    with pytest.raises(NonPositiveBandwidth):
        KernelEstimate(np.array([1.0, 2.0]), 0.0)
    with pytest.raises(NonPositiveBandwidth):
        silverman_bandwidth([3.0, 3.0, 3.0])
    with pytest.raises(TailUnderflow):
        wrve_estimate(KernelEstimate(np.array([1.0, 2.0]), 0.1), 50.0)


# -- estimator ------------------------------------------------------------------------


def test_estimate_nonnegative():
    est = KernelEstimate.fit(_sample())
    for t in np.linspace(0.0, 0.6, 13):
        assert wrve_estimate(est, float(t)) >= -1e-12


def test_low_t_gives_unconditional_value():
    est = KernelEstimate.fit(_sample(80))
    a = wrve_estimate(est, est.lower - 1.0)
    assert wrve_estimate(est, est.lower - 50.0) == a
    # independent quadrature of the weighted varentropy of the mixture law
    f = lambda x: float(kde_pdf(est, x))
    lo, hi = est.lower, est.upper
    bp = list(est.sample)
    m = integrate(lambda x: -x * math.log(f(x)) * f(x) if f(x) > 0 else 0.0, lo, hi, breakpoints=bp).value
    v = integrate(lambda x: (-x * math.log(f(x)) - m) ** 2 * f(x) if f(x) > 0 else 0.0, lo, hi,
                  breakpoints=bp).value
    assert a == pytest.approx(v, rel=1e-7)
    assert wrse_estimate(est, est.lower - 1.0) == pytest.approx(m, rel=1e-7)


def test_narrow_lump_limit():
    # a lump at c behaves like N(c, b^2): -x log f ~ c (const + z^2 / 2), variance -> c^2 / 2
    rng = np.random.default_rng(0)
    for c in (2.0, 0.5):
        est = KernelEstimate(c + 1e-9 * rng.standard_normal(40), 1e-4)
        assert wrve_estimate(est, c - 1.0) == pytest.approx(c * c / 2, rel=1e-3)
    est = KernelEstimate(1e-3 + 1e-9 * rng.standard_normal(40), 1e-4)
    assert wrve_estimate(est, 0.0) < 1e-5


def test_mean_over_seeds_near_truth():
    truth = 0.39985
    vals = [wrve_estimate(KernelEstimate.fit(_sample(200, seed=s)), 0.1) for s in range(20)]
    assert abs(np.mean(vals) - truth) < 0.2


def test_reflection_keeps_mass_on_half_line():
    est = KernelEstimate(_sample(60), 0.05, reflect=True)
    assert kde_pdf(est, -0.01) == 0.0
    assert kde_sf(est, 0.0) == pytest.approx(1.0, abs=1e-12)
    f = lambda x: float(kde_pdf(est, x))
    assert integrate(f, 0.0, est.upper + 1.0, breakpoints=list(est.sample)).value == pytest.approx(1.0, abs=1e-6)
    assert est.lower == 0.0


# -- studies ------------------------------------------------------------------------


def test_single_replication_equals_single_run():
    d, t, n, seed = Exponential(5.5), 0.2, 60, 11
    rep = monte_carlo_study(d, [t], [n], 1, seed=seed, true_values=[0.5])
    sample = d.sample(n, rng=np.random.default_rng([seed, n, 0]))
    direct = wrve_estimate(KernelEstimate.fit(sample), t)
    r = rep.row(t, n)
    assert r.bias == direct - 0.5
    assert r.mse == (direct - 0.5) ** 2


def test_study_invariants_and_determinism():
    args = (Exponential(5.5), [0.1, 0.3], [40, 80], 25)
    a = monte_carlo_study(*args, seed=4)
    b = monte_carlo_study(*args, seed=4)
    assert a.to_csv() == b.to_csv()
    for r in a.rows:
        assert r.mse >= r.bias ** 2 - 1e-10
        assert r.replications == 25 and r.failures == 0
    assert a.row(0.1, 40).true_value == pytest.approx(0.39985, abs=5e-5)
    assert monte_carlo_study(*args, seed=5).to_csv() != a.to_csv()


def test_csv_layout():
    rep = monte_carlo_study(Exponential(5.5), [0.1], [30], 3, seed=1, true_values=[0.4])
    buf = io.StringIO()
    text = rep.to_csv(buf)
    assert buf.getvalue() == text
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert float(lines[1].split(",")[4]) == 0.4


def test_bootstrap():
    data = _sample(40)
    rep = bootstrap_study(data, Exponential(5.5), [0.1, 0.2], 0.05, 30, seed=2, keep_estimates=True)
    assert [r.n for r in rep.rows] == [40, 40]
    est = rep.estimates[40]
    assert est.shape == (30, 2)
    # resample 0 by hand
    idx = np.random.default_rng([2, 0]).integers(0, 40, 40)
    assert est[0, 0] == wrve_estimate(KernelEstimate(np.asarray(data)[idx], 0.05), 0.1)
    with pytest.raises(EmptyStudy):
        bootstrap_study(data, Exponential(5.5), [0.1], 0.05, 0)
    with pytest.raises(EmptySample):
        bootstrap_study([], Exponential(5.5), [0.1], 0.05, 5)


def test_failures_are_counted():
    # t beyond every resample's support: each replication fails
    rep = bootstrap_study([0.1, 0.2, 0.3], Exponential(5.5), [0.05, 5.0], 0.01, 4, seed=0,
                          true_values=[1.0, 1.0])
    assert rep.row(5.0).failures == 4 and math.isnan(rep.row(5.0).bias)
    assert rep.row(0.05).failures == 0


def test_parallel_workers_match_serial():
    args = (Exponential(5.5), [0.1, 0.2], [30], 12)
    assert monte_carlo_study(*args, seed=9, workers=2).to_csv() == monte_carlo_study(*args, seed=9).to_csv()
