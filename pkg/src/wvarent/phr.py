"""Weighted residual measures under the proportional hazard rate model.

``Y`` follows the PHR model with baseline ``X`` when ``sf_Y = sf_X^a``,
``a > 0``. A series system of ``n`` i.i.d. components is the case ``a = n``.

Residual quantities are computed in the probability coordinate
``y = sf_X(x)^a``. Given ``Y > t``, ``y`` is uniform on ``(0, sf_X(t)^a)``,
so WRSE and WRVE reduce to the mean and variance of

    ``gamma(y) = x log g_t(x)``,  ``x = sf_X^{-1}(y^{1/a})``,

with ``g_t`` the residual density of ``Y``. The WRSE carries a leading minus
sign like every entropy in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Distribution, Exponential, check_tail
from .errors import DegenerateParameter, NonConvergence, OutOfSupport, QuantileSingularity
from .quadrature import DEFAULT_CONFIG, integrate


@dataclass(frozen=True)
class PHRModel(Distribution):
    """Law of ``Y`` with ``sf_Y(x) = sf(x)^a``; also usable as a distribution."""

    baseline: Distribution
    a: float = 1.0
    family = "phr"

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise DegenerateParameter(f"PHR constant a must be a finite positive number, got {self.a}")

    @classmethod
    def series(cls, baseline: Distribution, n: int) -> "PHRModel":
        """Lifetime of ``n`` i.i.d. components in series."""
        if int(n) != n or n < 1:
            raise DegenerateParameter(f"series size must be an integer >= 1, got {n}")
        return cls(baseline, float(n))

    def to_spec(self):
        return f"{self.baseline.to_spec()}|phr:a={self.a!r}"

    def support(self):
        return self.baseline.support()

    def _logpdf(self, x):
        lf = np.asarray(self.baseline.logpdf(x))
        if self.a == 1.0:
            # avoids 0 * (-inf) where the baseline log-survival overflows
            return lf
        return math.log(self.a) + (self.a - 1) * np.asarray(self.baseline.logsf(x)) + lf

    def _logsf(self, x):
        return self.a * np.asarray(self.baseline.logsf(x))

    def _ppf(self, u):
        return np.asarray(self.baseline.isf(np.exp(np.log1p(-np.asarray(u)) / self.a)))

    def _isf(self, p):
        return np.asarray(self.baseline.isf(np.asarray(p) ** (1.0 / self.a)))

    def _interior_point(self):
        return float(self.baseline.ppf(0.5))


def _validate_y(model, y, t):
    top = math.exp(model.a * float(model.baseline.logsf(t))) if t > model.support()[0] else 1.0
    if not 0.0 < y <= top * (1 + 1e-12):
        raise OutOfSupport(f"y={y} outside (0, sf(t)^a] = (0, {top:.6g}]")
    if y == 0.0:
        raise QuantileSingularity("gamma is singular at y = 0")


def gamma_fn(model: PHRModel, y: float, t: float) -> float:
    """``gamma(y:a,t) = sf^{-1}(y^{1/a}) log{a y^{1-1/a} f(sf^{-1}(y^{1/a})) / sf(t)^a}``."""
    _validate_y(model, y, t)
    a, base = model.a, model.baseline
    x = float(base.isf(y ** (1.0 / a)))
    lsf_t = float(base.logsf(t)) if t > base.support()[0] else 0.0
    return x * (math.log(a) + (1 - 1 / a) * math.log(y) + float(base.logpdf(x)) - a * lsf_t)


def gamma_fn_hazard(model: PHRModel, y: float, t: float) -> float:
    """Same function through the hazard: with ``x = Lambda^{-1}(-log(y)/a)``,
    ``gamma = x log{a y exp(a Lambda(t)) r(x)}``."""
    _validate_y(model, y, t)
    a, base = model.a, model.baseline
    x = float(base.isf(math.exp(math.log(y) / a)))  # Lambda^{-1}(z) = sf^{-1}(e^{-z})
    lam_t = float(base.cumhazard(t)) if t > base.support()[0] else 0.0
    return x * (math.log(a) + math.log(y) + a * lam_t + math.log(float(base.hazard(x))))


def gamma_exponential(y: float, a: float, lam: float, t: float) -> float:
    """Closed form of gamma for an exponential baseline."""
    ly = math.log(y)
    return -((a * lam * t + math.log(a * lam)) * ly + ly * ly) / (a * lam)


def _y_expectation(model: PHRModel, t: float, fn, cfg):
    """``(1/Y0) int_0^{Y0} fn(gamma(y)) dy`` with ``y = Y0 exp(-v)``.

    In ``v`` the weight is ``exp(-v)``, which is also the conditional tail
    mass beyond ``v``, so the decade cuts come from ``p -> -log p``.
    """
    a, base = model.a, model.baseline
    lo = base.support()[0]
    lsf_t = check_tail(model, t) if t > lo else 0.0
    log_y0 = lsf_t
    lsf_base_t = lsf_t / a

    def integrand(v):
        ly = log_y0 - v
        x = float(base.isf(math.exp(ly / a)))
        lf = float(base.logpdf(x))
        if not math.isfinite(lf):
            return 0.0
        g = x * (math.log(a) + (1 - 1 / a) * ly + lf - a * lsf_base_t)
        try:
            return fn(g) * math.exp(-v)
        except OverflowError:
            raise NonConvergence(
                f"gamma grows without bound as y -> 0 for {model.to_spec()} at t={t}; "
                "the moment is infinite") from None

    return integrate(integrand, 0.0, math.inf, cfg, truncation_quantile=lambda p: -math.log(p)).value


def wrse_phr(model: PHRModel, t: float, cfg=None) -> float:
    """WRSE (weight ``x``) of the PHR law, ``-(1/Y0) int_0^{Y0} gamma dy``."""
    cfg = cfg or DEFAULT_CONFIG
    return -_y_expectation(model, t, lambda g: g, cfg)


def wrve_phr(model: PHRModel, t: float, cfg=None) -> float:
    """WRVE (weight ``x``) of the PHR law in the ``y`` coordinate:
    ``(1/Y0) int gamma^2 dy - [(1/Y0) int gamma dy]^2``, evaluated in
    centred two-pass form."""
    cfg = cfg or DEFAULT_CONFIG
    m = _y_expectation(model, t, lambda g: g, cfg)
    return _y_expectation(model, t, lambda g: (g - m) ** 2, cfg)


def phr_exponential_wrve(a: float, lam: float, t: float) -> float:
    """Closed-form WRVE for an exponential baseline with PHR constant ``a``."""
    if not (a > 0 and lam > 0):
        raise DegenerateParameter(f"need a > 0 and lambda > 0, got a={a}, lambda={lam}")
    if t < 0:
        raise OutOfSupport(f"t must be >= 0, got {t}")
    A = a * lam
    At = A * t
    L = At + math.log(A)
    return (L * L * (At * At + 2 * At + 2) - 2 * L * (At ** 3 + 3 * At * At + 6 * At + 6)
            + At ** 4 + 4 * At ** 3 + 12 * At * At + 24 * At + 24
            - ((1 + At) * L - (At + 1) ** 2 - 1) ** 2) / A ** 2


def series_exponential_wrve(n: int, lam: float, t: float) -> float:
    """WRVE of a series system of ``n`` i.i.d. ``Exp(lam)`` components."""
    if int(n) != n or n < 1:
        raise DegenerateParameter(f"n must be an integer >= 1, got {n}")
    return phr_exponential_wrve(float(n), lam, t)


def series_exponential_model(n: int, lam: float) -> PHRModel:
    return PHRModel.series(Exponential(lam), n)
