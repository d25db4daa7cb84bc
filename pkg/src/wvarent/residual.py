"""Measures of the residual lifetime ``[X | X > t]``.

The residual density is ``f_t(x) = f(x) / sf(t)`` on ``x > t``. The weight is
applied to the age ``x`` itself, not to the residual age ``x - t``:

* WRSE ``H^w(X;t) = -E[w(X) log f_t(X) | X > t]``
* WRVE ``VE^w(X;t) = Var[-w(X) log f_t(X) | X > t]``
* RVE, the unweighted residual varentropy (``w = 1``).

Entropies carry a leading minus sign, as for the unconditional weighted
entropy, so that ``H^w(X;t) -> H^w(X)`` as ``t -> 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .distributions import (Distribution, Exponential, Power, Uniform, check_tail,
                            conditional_integral, moment_conditional, mrl, vrl)
from .errors import EtaSingularity, OutOfSupport, TailUnderflow, UnsupportedFamily
from .measures import (IDENTITY, UNIT, BoundResult, WeightFunction, _nonneg_or_inf,
                       density_sandwich_holds, ic_moments)
from .quadrature import DEFAULT_CONFIG, LOG_DENSITY_FLOOR, integrate

SQUARE = WeightFunction.square()


@dataclass(frozen=True)
class ResidualQuery:
    """A distribution, an age ``t`` and a weight. Validates ``sf(t) > 0``."""

    dist: Distribution
    t: float
    weight: WeightFunction = IDENTITY

    def __post_init__(self):
        if not self.t >= 0:
            raise OutOfSupport(f"age t must be >= 0, got {self.t}")
        lo, hi = self.dist.support()
        if self.t >= hi:
            raise TailUnderflow(f"t={self.t} is beyond the support of {self.dist}")
        check_tail(self.dist, self.t)

    def wrse(self, cfg=None):
        return wrse(self.dist, self.t, self.weight, cfg)

    def wrve(self, cfg=None):
        return wrve(self.dist, self.t, self.weight, cfg)


def _check_t(dist, t):
    if not t >= 0:
        raise OutOfSupport(f"age t must be >= 0, got {t}")
    lo, hi = dist.support()
    if t >= hi:
        raise TailUnderflow(f"t={t} is at or beyond the upper support {hi} of {dist}")


def wrse(dist: Distribution, t: float, w: WeightFunction = IDENTITY, cfg=None) -> float:
    """Weighted residual Shannon entropy ``-E[w(X) log f_t(X) | X > t]``."""
    _check_t(dist, t)
    return conditional_integral(dist, lambda x, lf: -w(x) * lf, t, cfg).value


def wrve(dist: Distribution, t: float, w: WeightFunction = IDENTITY, cfg=None) -> float:
    """Weighted residual varentropy, integrated directly as a variance."""
    _check_t(dist, t)
    return ic_moments(dist, w, t, cfg).varentropy


def wrve_decomposed(dist: Distribution, t: float, w: WeightFunction = IDENTITY, cfg=None) -> float:
    """WRVE through the cumulative-hazard decomposition

    ``E[w^2 (log f)^2 | X>t] - Lambda^2 E[w^2 | X>t] - 2 Lambda H^{w^2}(X;t) - H^w(X;t)^2``

    which uses the unconditional ``log f`` in the first term. It is an
    independent route to :func:`wrve`.
    """
    _check_t(dist, t)
    lsf = float(dist.logsf(t)) if t > dist.support()[0] else 0.0
    lam = -lsf
    w2 = WeightFunction.custom(lambda x: w(x) ** 2, f"({w.label})^2")
    m_log2 = conditional_integral(dist, lambda x, lft: w(x) ** 2 * (lft + lsf) ** 2, t, cfg).value
    m_w2 = conditional_integral(dist, lambda x, lft: w(x) ** 2, t, cfg).value
    h_w2 = conditional_integral(dist, lambda x, lft: -w2(x) * lft, t, cfg).value
    h_w = conditional_integral(dist, lambda x, lft: -w(x) * lft, t, cfg).value
    return m_log2 - lam * lam * m_w2 - 2.0 * lam * h_w2 - h_w * h_w


def rve(dist: Distribution, t: float, cfg=None) -> float:
    """Residual varentropy ``Var[-log f_t(X) | X > t]``."""
    _check_t(dist, t)
    return ic_moments(dist, UNIT, t, cfg).varentropy


# -- closed forms ---------------------------------------------------------------------


def closed_form_wrve(dist: Distribution, t: float, printed: bool = False) -> float:
    """Closed-form WRVE with weight ``x`` for uniform, exponential and
    unit-scale power laws.

    For the power law the default is the re-derived expression. With
    ``printed=True`` the literature transcription is returned; it drops a
    constant inside one bracket and squares ``(k+1)`` where a fourth power
    belongs (see ERRATUM.md).
    """
    if isinstance(dist, Uniform):
        if not 0.0 <= t < dist.b:
            raise OutOfSupport(f"t={t} outside [0, {dist.b}) for {dist}")
        L = dist.b - max(t, dist.a)
        return (L * math.log(L)) ** 2 / 12.0
    if isinstance(dist, Exponential):
        if t < 0:
            raise OutOfSupport(f"t must be >= 0, got {t}")
        lam = dist.lam
        lt = lam * t
        L = math.log(lam) + lt
        return ((lt * lt + 2 * lt + 2) * L * L
                - 2 * (lt ** 3 + 3 * lt * lt + 6 * lt + 6) * L
                + (lt ** 4 + 4 * lt ** 3 + 12 * lt * lt + 24 * lt + 24)
                - ((lt + 1) * math.log(lam) - (2 + lt)) ** 2) / lam ** 2
    if isinstance(dist, Power):
        if dist.b != 1.0:
            raise UnsupportedFamily("the closed-form power WRVE is for b = 1; use wrve() otherwise")
        if not 0.0 < t < 1.0:
            raise OutOfSupport(f"t must lie in (0, 1) for the power closed form, got {t}")
        k = float(dist.k)
        psi = math.log(k / (1.0 - t ** k))
        lt = math.log(t)
        tk2 = t ** (k + 2)
        inner = (k + 2) ** 2 * lt * lt - 2 * (k + 2) * lt
        if printed:
            head = 2 * (k - 1) ** 2 - (k - 1) ** 2 * tk2 * inner
        else:
            head = 2 * (k - 1) ** 2 - (k - 1) ** 2 * tk2 * (inner + 2)
        first = k / ((k + 2) ** 3 * (1 - t ** k)) * (
            head
            + 2 * (k - 1) * (k + 2) * psi * (tk2 * (1 - (k + 2) * lt) - 1)
            + (k + 2) ** 2 * psi * psi * (1 - tk2))
        bracket = ((k + 1) * psi - t ** (k + 1) * ((k + 1) * psi + (k * k - 1) * lt - (k - 1))
                   - (k - 1)) ** 2
        power = 2 if printed else 4
        return first - k * k / ((k + 1) ** power * (1 - t ** k) ** 2) * bracket
    raise UnsupportedFamily(f"no closed-form WRVE for family {dist.family!r}")


# -- derivative in t --------------------------------------------------------------------


@dataclass(frozen=True)
class DerivativeResult:
    """``d/dt VE^x(X;t)`` three ways.

    ``formula_value`` transcribes the published hazard-rate expression,
    ``finite_difference_value`` is a numerical derivative of :func:`wrve`,
    and ``derived_value`` is ``r(t)[VE - (IC_t(t) - H)^2 - 2 Cov_t(X, IC)]``,
    obtained by differentiating under the integral sign.
    """

    t: float
    formula_value: float
    finite_difference_value: float
    derived_value: float


def wrve_derivative(dist: Distribution, t: float, cfg=None) -> DerivativeResult:
    """Derivative of the WRVE (weight ``x``) with respect to the age ``t``.

    The finite difference is central with ``h = max(1e-5, 1e-5 t)``, or a
    second-order one-sided stencil when ``t - h`` leaves the support.
    """
    _check_t(dist, t)
    cfg = cfg or DEFAULT_CONFIG
    lo, hi = dist.support()
    r = float(dist.hazard(t))
    if not r > 0:
        raise TailUnderflow(f"hazard rate vanishes at t={t}")
    mom = ic_moments(dist, IDENTITY, t, cfg)
    ve, h = mom.varentropy, mom.entropy
    v = moment_conditional(dist, 1, t, cfg)
    h_star = wrse(dist, t, SQUARE, cfg)
    formula = r * (ve - 2.0 * (h * v + h_star) ** 2 - (h + t * math.log(r)) ** 2)

    ic_t = -t * math.log(r)
    derived = r * (ve - (ic_t - h) ** 2 - 2.0 * (h_star - h * v))

    step = max(1e-5, 1e-5 * t)
    if t - step > lo:
        fd = (wrve(dist, t + step, IDENTITY, cfg) - wrve(dist, t - step, IDENTITY, cfg)) / (2 * step)
    else:
        f0, f1, f2 = (wrve(dist, t + i * step, IDENTITY, cfg) for i in range(3))
        fd = (-3.0 * f0 + 4.0 * f1 - f2) / (2 * step)
    return DerivativeResult(t, formula, fd, derived)


# -- bounds ------------------------------------------------------------------------------


def wrve_upper_bound(dist: Distribution, t: float, alpha: float, beta: float, cfg=None) -> BoundResult:
    """``VE^x(X;t) <= H^{w2}(X;t) + Lambda(t)^2 E[X^2 | X > t]``,
    ``w2 = alpha x^3 + beta x^2``, valid when
    ``exp(-(alpha x + beta)) <= f(x) <= 1`` on the support."""
    _check_t(dist, t)
    w2 = WeightFunction.cubic_quad(alpha, beta)
    lam = float(dist.cumhazard(t)) if t > dist.support()[0] else 0.0
    cond = density_sandwich_holds(dist, alpha, beta)
    # under the condition -log f <= alpha x + beta, so both sides have nonnegative integrands
    bound = _nonneg_or_inf(
        lambda: wrse(dist, t, w2, cfg) + lam * lam * moment_conditional(dist, 2, t, cfg), cond)
    ve = _nonneg_or_inf(lambda: wrve(dist, t, IDENTITY, cfg), cond)
    return BoundResult(bound, cond, ve, bool(ve <= bound + 1e-6))


class EtaFunction:
    """Tabulated solution of ``sigma^2 eta(s) g(s) = int_0^s (mu - u) g(u) du``.

    ``g`` is the density of the residual age ``S = X - t`` given ``X > t``,
    ``mu`` and ``sigma^2`` its mean and variance (the MRL and VRL at ``t``).
    The numerator is accumulated from the left for small ``s`` and from the
    right (as minus the upper tail) for large ``s``, which keeps it accurate
    where it is tiny. Nodes: ``s = 0`` plus 512 log-spaced points up to the
    ``1 - tail_mass`` residual quantile; monotone cubic interpolation.
    """

    def __init__(self, dist: Distribution, t: float, nodes: int = 512, cfg=None,
                 tail_mass: float = 1e-8):
        cfg = cfg or DEFAULT_CONFIG
        _check_t(dist, t)
        lo, hi = dist.support()
        self.dist, self.t = dist, float(t)
        self.base = max(self.t, lo)
        lsf = check_tail(dist, t) if t > lo else 0.0
        self.mu = mrl(dist, t, cfg) + self.t - self.base
        self.sigma2 = vrl(dist, t, cfg)
        if not self.sigma2 > 0:
            raise EtaSingularity("residual variance is zero")
        s_max = float(dist.residual_quantile(self.base)(tail_mass)) - self.base if t > lo else \
            float(dist.isf(tail_mass)) - self.base
        s_min = min(1e-8 * s_max, 1e-6)
        s = np.concatenate([[0.0], np.geomspace(s_min, s_max, nodes)])
        self.s_max = s_max

        def g(u):
            lf = float(dist.logpdf(self.base + u))
            return math.exp(lf - lsf) if lf > LOG_DENSITY_FLOOR else 0.0

        def num(u):
            return (self.mu - u) * g(u)

        pieces = np.array([integrate(num, a, b, cfg).value for a, b in zip(s[:-1], s[1:])])
        fwd = np.concatenate([[0.0], np.cumsum(pieces)])
        # upper tail beyond s_max, then accumulate right to left
        tail = conditional_integral(
            dist, lambda x, _: (self.mu - (x - self.base)), self.base + s_max, cfg).value \
            * math.exp(float(dist.logsf(self.base + s_max)) - lsf) if s_max < hi - self.base else 0.0
        bwd = -(tail + np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]]))
        numer = np.where(s <= self.mu, fwd, bwd)
        dens = np.array([g(u) for u in s[1:]])
        if np.any(dens <= 0):
            bad = s[1:][dens <= 0][0]
            raise EtaSingularity(f"residual density underflows at s={bad:.6g} inside the support")
        eta = np.empty_like(s)
        eta[1:] = numer[1:] / (self.sigma2 * dens)
        # eta(0) by continuity; the numerator vanishes at s = 0
        eta[0] = 0.0 if g(0.0) > 0 else eta[1]
        self.nodes = s
        self.values = eta
        self._interp = PchipInterpolator(s, eta, extrapolate=False)
        self._deriv = self._interp.derivative()

    def __call__(self, s):
        return self._interp(np.clip(s, 0.0, self.s_max))

    def derivative(self, s):
        return self._deriv(np.clip(s, 0.0, self.s_max))

    def residual_check(self, cfg=None):
        """Max relative defect of the defining relation over the nodes."""
        cfg = cfg or DEFAULT_CONFIG
        lsf = float(self.dist.logsf(self.base)) if self.t > self.dist.support()[0] else 0.0
        worst = 0.0
        for s_i, e_i in zip(self.nodes[1::32], self.values[1::32]):
            g = math.exp(float(self.dist.logpdf(self.base + s_i)) - lsf)
            rhs = integrate(lambda u: (self.mu - u) * math.exp(float(self.dist.logpdf(self.base + u)) - lsf),
                            0.0, s_i, cfg).value
            lhs = self.sigma2 * e_i * g
            worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-12))
        return worst


def wrve_lower_bound(dist: Distribution, t: float, cfg=None, eta: Optional[EtaFunction] = None) -> BoundResult:
    """Variance lower bound for the WRVE with weight ``x``.

    ``VE^x(X;t) >= sigma^2(t) {E[eta(S) h'(X)]}^2``, ``h(x) = -x log f_t(x)``,
    where ``S = X - t`` is the residual age, ``X`` the (unshifted) age given
    ``X > t`` and ``eta`` the :class:`EtaFunction`. It follows from the
    Cacoullos-Papathanasiou inequality applied to ``h(x) = -x log f_t(x)``.
    """
    cfg = cfg or DEFAULT_CONFIG
    eta = eta or EtaFunction(dist, t, cfg=cfg)
    lo, _ = dist.support()
    base = eta.base
    lsf = float(dist.logsf(base)) if t > lo else 0.0

    # eta' is piecewise polynomial between nodes, so integrate node interval by
    # node interval with a fixed Gauss-Legendre rule
    xg, wg = np.polynomial.legendre.leggauss(16)
    a, b = eta.nodes[:-1], eta.nodes[1:]
    s = (0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * xg).ravel()
    wts = (0.5 * (b - a)[:, None] * wg).ravel()
    lft = np.asarray(dist.logpdf(base + s), dtype=float) - lsf
    dens = np.where(lft > LOG_DENSITY_FLOOR, np.exp(lft), 0.0)
    lft = np.where(dens > 0, lft, 0.0)

    def expect(values):
        return float(np.sum(wts * dens * values))

    # E[eta h'] with h(x) = -x log f_t(x), integrated by parts on [0, s_max]
    e_trunc = expect(-eta(s) * lft) + expect(eta(s)) + expect((base + s) * eta.derivative(s))
    lf_end = float(dist.logpdf(base + eta.s_max)) - lsf
    if lf_end > LOG_DENSITY_FLOOR:
        e_trunc -= float(eta.values[-1]) * (base + eta.s_max) * math.exp(lf_end)
    # exact remainder beyond s_max, again by parts:
    # sigma^2 E[eta h'; S > s_max] = E[(h(X) - h(x_m)) (X - mu_X); X > x_m]
    x_m = base + eta.s_max
    remainder = 0.0
    if x_m < dist.support()[1] and lf_end > LOG_DENSITY_FLOOR:
        lsf_m = float(dist.logsf(x_m))
        h_m = -x_m * lf_end
        mu_x = base + eta.mu
        try:
            remainder = conditional_integral(
                dist, lambda x, lf: (-x * (lf + lsf_m - lsf) - h_m) * (x - mu_x), x_m, cfg).value \
                * math.exp(lsf_m - lsf)
        except TailUnderflow:
            remainder = 0.0
    bound = eta.sigma2 * (e_trunc + remainder / eta.sigma2) ** 2
    ve = wrve(dist, t, IDENTITY, cfg)
    return BoundResult(bound, True, ve, bool(bound <= ve + 1e-6))
