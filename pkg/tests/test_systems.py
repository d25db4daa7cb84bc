import math

import numpy as np
import pytest

from wvarent.distributions import Exponential, LogUniform, Power, Uniform, Weibull
from wvarent.errors import InvalidStructure, ParseError
from wvarent.measures import weighted_varentropy
from wvarent.systems import (DistortedDistribution, DistortionFunction, closed_form_parallel2_power,
                             distortion_k_of_n, parse_structure, wve_coherent, wve_coherent_bounds,
                             wve_comparison_condition, wve_system_direct)


@pytest.mark.parametrize("text,value", [("parallel:2", 0.25), ("series:2", 0.75), ("series:3", 0.875),
                                        ("koutofn:2,3", 0.5), ("koutofn:1,1", 0.5)])
def test_distortion_at_half(text, value):
    assert float(parse_structure(text)(0.5)) == pytest.approx(value, abs=1e-14)


def test_k_of_n_semantics():
    # 2-out-of-3 fails at the second component failure: q(u) = 3u^2 - 2u^3
    q = distortion_k_of_n(2, 3)
    u = np.linspace(0, 1, 11)
    np.testing.assert_allclose(q(u), 3 * u ** 2 - 2 * u ** 3, atol=1e-14)
    np.testing.assert_allclose(q.dq(u[1:-1]), 6 * u[1:-1] * (1 - u[1:-1]), rtol=1e-12)
    # same law by simulation
    rng = np.random.default_rng(5)
    life = np.sort(rng.exponential(size=(200_000, 3)), axis=1)[:, 1]
    t = DistortedDistribution(Exponential(1.0), q)
    for x in (0.3, 0.7, 1.5):
        assert np.mean(life <= x) == pytest.approx(float(t.cdf(x)), abs=5e-3)


def test_series_of_exponentials():
    t = DistortedDistribution(Exponential(1.0), DistortionFunction.series(2))
    x = np.array([0.1, 1.0, 5.0, 30.0])
    np.testing.assert_allclose(t.sf(x), np.exp(-2 * x), rtol=1e-12)
    assert wve_system_direct(DistortionFunction.series(2), Exponential(1.0)) == \
        pytest.approx(weighted_varentropy(Exponential(2.0)), rel=1e-8)


def test_inverses():
    q = distortion_k_of_n(2, 4)
    for v in (1e-6, 0.3, 0.9):
        assert float(q(q.inverse(v))) == pytest.approx(v, rel=1e-10)
        assert float(q.complement(q.complement_inverse(v))) == pytest.approx(v, rel=1e-10)


def test_from_table():
    u = np.linspace(0, 1, 41)
    q = DistortionFunction.from_table(u, u ** 2)
    assert float(q(0.37)) == pytest.approx(0.37 ** 2, abs=1e-4)
    with pytest.raises(InvalidStructure):
        DistortionFunction.from_table([0.0, 0.5, 1.0], [0.0, 0.7, 0.6])
    with pytest.raises(InvalidStructure):
        DistortionFunction.from_table([0.1, 1.0], [0.0, 1.0])


def test_table_file(tmp_path):
    p = tmp_path / "q.csv"
    u = np.linspace(0, 1, 21)
    p.write_text("# u,q\n" + "\n".join(f"{float(a)!r},{float(1 - (1 - a) ** 2)!r}" for a in u))
    q = parse_structure(f"table:{p}")
    assert float(q(0.5)) == pytest.approx(0.75, abs=1e-3)


@pytest.mark.parametrize("bad", ["koutofn:4,3", "koutofn:0,3", "parallel:x", "bridge:5"])
def test_structure_errors(bad):
    with pytest.raises((InvalidStructure, ParseError)):
        parse_structure(bad)


def test_invalid_distortion():
    with pytest.raises(InvalidStructure):
        DistortionFunction(lambda u: 0.5 * np.asarray(u), lambda u: 0.5 + 0 * np.asarray(u))


# -- weighted varentropy --------------------------------------------------------------


@pytest.mark.parametrize("k,a", [(1.0, 1.0), (2.0, 1.0), (0.7, 2.5)])
def test_parallel_two_power_direct(k, a):
    # max of two Power(k, a) lifetimes is Power(2k, a)
    direct = wve_system_direct(DistortionFunction.parallel(2), Power(k, a))
    assert direct == pytest.approx(weighted_varentropy(Power(2 * k, a)), rel=1e-8)


@pytest.mark.parametrize("k,a", [(1.0, 1.0), (2.0, 1.0), (0.7, 2.5), (3.0, 0.5)])
def test_parallel_two_power_closed_form(k, a):
    assert closed_form_parallel2_power(k, a) == \
        pytest.approx(wve_coherent(DistortionFunction.parallel(2), Power(k, a)), rel=1e-8)


@pytest.mark.parametrize("d", [Exponential(1.3), Weibull(2.0), Uniform(0.5, 2.0)], ids=str)
def test_identity_structure_reduces_to_component(d):
    q = DistortionFunction.identity()
    assert wve_coherent(q, d) == pytest.approx(weighted_varentropy(d), rel=1e-8)
    r = wve_comparison_condition(q, d)
    assert r.conclusion == "==" and r.verified


def test_comparison_runs_on_real_systems():
    r = wve_comparison_condition(DistortionFunction.series(2), Exponential(1.0))
    assert r.conclusion in (None, "<=", ">=")
    if r.conclusion is not None:
        assert r.verified


def test_bounds_identity_and_floor():
    b = wve_coherent_bounds(DistortionFunction.identity(), Exponential(1.0), 1.0, 2.0)
    assert b.beta1u == pytest.approx(1.0, abs=1e-12)
    assert b.bound_wve == pytest.approx(20.0 + 4.0, rel=1e-9)
    assert b.condition_holds and b.holds()
    lu = LogUniform(1.0, 3.0)
    b = wve_coherent_bounds(DistortionFunction.series(2), lu, 1.0, 2.0, L=1 / (3 * math.log(3)))
    assert b.floor_holds and b.holds()
