import math

import numpy as np
import pytest

from wvarent.distributions import Exponential, Lomax, Power, Uniform, Weibull
from wvarent.errors import DegenerateParameter, OutOfSupport, QuantileSingularity, TailUnderflow
from wvarent.phr import (PHRModel, gamma_exponential, gamma_fn, gamma_fn_hazard, phr_exponential_wrve,
                         series_exponential_model, series_exponential_wrve, wrse_phr, wrve_phr)
from wvarent.residual import wrse, wrve


def test_gamma_example():
    m = PHRModel(Exponential(1.0), 2.0)
    y = math.exp(-1.0)
    expected = -0.5 * (-math.log(2) + 1)
    assert gamma_fn(m, y, 0.0) == pytest.approx(expected, rel=1e-12)
    assert gamma_exponential(y, 2.0, 1.0, 0.0) == pytest.approx(expected, rel=1e-12)


def test_gamma_unit_constant_collapses():
    d = Weibull(1.7)
    m = PHRModel(d, 1.0)
    for y in (0.05, 0.4, 0.9):
        x = float(d.isf(y))
        assert gamma_fn(m, y, 0.0) == pytest.approx(x * float(d.logpdf(x)), rel=1e-12)


@pytest.mark.parametrize("m,t", [(PHRModel(Exponential(1.3), 2.0), 0.4), (PHRModel(Weibull(1.7), 3.0), 0.5),
                                 (PHRModel(Uniform(0.0, 2.0), 1.5), 0.5), (PHRModel(Power(2.0, 1.0), 2.0), 0.3)],
                         ids=lambda v: v.to_spec() if hasattr(v, "to_spec") else str(v))
def test_gamma_hazard_route(m, t):
    top = math.exp(float(m.logsf(t)))
    for y in np.linspace(0.01, 1.0, 17) * top:
        assert gamma_fn_hazard(m, y, t) == pytest.approx(gamma_fn(m, y, t), rel=1e-9, abs=1e-12)


def test_gamma_exponential_matches_general():
    m = PHRModel(Exponential(2.5), 3.0)
    t = 0.2
    top = math.exp(float(m.logsf(t)))
    for y in np.linspace(0.05, 1.0, 9) * top:
        assert gamma_exponential(y, 3.0, 2.5, t) == pytest.approx(gamma_fn(m, y, t), rel=1e-10)


def test_gamma_domain():
    m = PHRModel(Exponential(1.0), 2.0)
    with pytest.raises(OutOfSupport):
        gamma_fn(m, 0.5, 1.0)  # sf(1)^2 = e^-2 < 0.5
    with pytest.raises((OutOfSupport, QuantileSingularity)):
        gamma_fn(m, 0.0, 0.0)


# -- WRSE / WRVE ----------------------------------------------------------------------


@pytest.mark.parametrize("d", [Exponential(1.3), Weibull(2.0), Uniform(0.0, 2.0)], ids=str)
def test_unit_constant_reduces_to_baseline(d):
    m = PHRModel(d, 1.0)
    for t in (0.0, 0.5):
        assert wrse_phr(m, t) == pytest.approx(wrse(d, t), rel=1e-8)
        assert wrve_phr(m, t) == pytest.approx(wrve(d, t), rel=1e-8)


def test_exponential_phr_is_exponential():
    m = PHRModel(Exponential(1.0), 2.0)
    assert wrse_phr(m, 0.0) == pytest.approx(wrse(Exponential(2.0), 0.0), rel=1e-8)
    for t in (0.0, 0.7):
        assert wrve_phr(m, t) == pytest.approx(wrve(Exponential(2.0), t), rel=1e-8)


@pytest.mark.parametrize("m", [PHRModel(Weibull(1.5), 2.0), PHRModel(Lomax(2.0, 6.0), 1.5),
                               PHRModel(Power(2.0, 1.0), 3.0)], ids=lambda m: m.to_spec())
def test_y_route_matches_x_route(m):
    for t in (0.1, 0.5):
        assert wrse_phr(m, t) == pytest.approx(wrse(m, t), rel=1e-6)
        assert wrve_phr(m, t) == pytest.approx(wrve(m, t), rel=1e-6)


def test_closed_forms():
    assert series_exponential_wrve(1, 5.5, 0.2) == pytest.approx(0.51331, abs=5e-6)
    assert wrve_phr(PHRModel(Exponential(5.5), 1.0), 0.1) == pytest.approx(0.39985, abs=5e-6)
    for t in (0.0, 0.3, 2.0):
        assert series_exponential_wrve(2, 1.0, t) == pytest.approx(wrve(Exponential(2.0), t), rel=1e-9)
    for a, lam, t in [(1.5, 2.0, 0.4), (3.0, 0.7, 1.1)]:
        assert phr_exponential_wrve(a, lam, t) == \
            pytest.approx(wrve_phr(PHRModel(Exponential(lam), a), t), rel=1e-6)


def test_series_model():
    m = series_exponential_model(3, 2.0)
    x = np.array([0.1, 1.0])
    np.testing.assert_allclose(m.sf(x), np.exp(-6.0 * x), rtol=1e-12)
    np.testing.assert_allclose(m.pdf(x), 6.0 * np.exp(-6.0 * x), rtol=1e-12)


def test_validation():
    with pytest.raises(DegenerateParameter):
        PHRModel(Exponential(1.0), 0.0)
    with pytest.raises(DegenerateParameter):
        PHRModel.series(Exponential(1.0), 1.5)
    with pytest.raises(DegenerateParameter):
        series_exponential_wrve(0, 1.0, 0.0)
    with pytest.raises(OutOfSupport):
        phr_exponential_wrve(1.0, 1.0, -1.0)
    with pytest.raises(TailUnderflow):
        wrve_phr(PHRModel(Exponential(1.0), 4.0), 10.0)
