"""Weighted varentropy under affine and monotone maps ``Y = phi(X)``.

Each identity expresses the weighted (residual) varentropy of ``Y`` with
weight ``y`` through expectations over ``X``. All of them can be checked
against direct quadrature on :class:`TransformedDistribution`, the law of
``Y`` obtained by change of variables.

The functions default to the exact identities. Where a published form
differs (location shift, affine residual, decreasing branch of the monotone
identity) ``printed=True`` evaluates the transcription instead, so the
discrepancy can be measured. ERRATUM.md lists the cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .distributions import Distribution, check_tail, conditional_integral
from .errors import (BranchMismatch, DegenerateParameter, OutOfSupport,
                     TailUnderflow)
from .measures import IDENTITY, UNIT, WeightFunction, ic_moments
from .quadrature import DEFAULT_CONFIG, LOG_DENSITY_FLOOR, integrate


@dataclass(frozen=True)
class MonotoneMap:
    """A strictly monotone differentiable map with its derivative and inverse."""

    phi: Callable
    dphi: Callable
    inv: Callable
    direction: str
    label: str = field(default="phi")
    log_abs_dphi: Optional[Callable] = None

    def __post_init__(self):
        if self.direction not in ("increasing", "decreasing"):
            raise ValueError(f"direction must be 'increasing' or 'decreasing', got {self.direction!r}")

    @property
    def increasing(self) -> bool:
        return self.direction == "increasing"

    def __call__(self, x):
        return self.phi(x)

    def log_jacobian(self, x):
        """``log |phi'(x)|``, analytic when supplied (avoids underflow)."""
        if self.log_abs_dphi is not None:
            return self.log_abs_dphi(x)
        return np.log(np.abs(self.dphi(x)))

    def eta(self, x):
        """``phi(x) log |phi'(x)|``: eta_1 for increasing maps, eta_2 otherwise."""
        return self.phi(x) * self.log_jacobian(x)

    def validate(self, dist: Distribution, points: int = 257):
        """Check the derivative sign and the inverse on a quantile grid of ``dist``.

        Raises
        ------
        BranchMismatch
            If ``phi'`` has the wrong sign (or vanishes) somewhere on the grid.
        """
        u = np.linspace(0.0, 1.0, points + 2)[1:-1]
        x = np.asarray(dist.ppf(u), dtype=float)
        d = np.asarray(self.dphi(x), dtype=float)
        ok = d > 0 if self.increasing else d < 0
        if not np.all(ok):
            bad = x[~ok][0]
            raise BranchMismatch(
                f"{self.label} is declared {self.direction} but phi'({bad:.6g}) = "
                f"{float(self.dphi(bad)):.3g}")
        y = np.asarray(self.phi(x), dtype=float)
        back = np.asarray(self.inv(y), dtype=float)
        if not np.allclose(back, x, rtol=1e-9, atol=1e-12):
            raise BranchMismatch(f"inverse of {self.label} does not round-trip on the support")
        if np.any(y < 0):
            raise OutOfSupport(f"{self.label} maps part of the support of {dist} below zero")

    # -- constructors ------------------------------------------------------
    @classmethod
    def identity(cls):
        return cls(lambda x: x, lambda x: np.ones_like(np.asarray(x, dtype=float)),
                   lambda y: y, "increasing", "x")

    @classmethod
    def affine(cls, a: float, b: float = 0.0):
        if a == 0 or not math.isfinite(a) or not math.isfinite(b):
            raise DegenerateParameter(f"affine map needs finite a != 0, got a={a}, b={b}")
        return cls(lambda x: a * np.asarray(x, dtype=float) + b,
                   lambda x: np.full_like(np.asarray(x, dtype=float), a),
                   lambda y: (np.asarray(y, dtype=float) - b) / a,
                   "increasing" if a > 0 else "decreasing", f"{a:g}x+{b:g}")

    @classmethod
    def power(cls, p: float):
        """``x^p`` on ``x > 0``, ``p > 0``."""
        if not p > 0:
            raise DegenerateParameter(f"power map needs p > 0, got {p}")
        return cls(lambda x: np.asarray(x, dtype=float) ** p,
                   lambda x: p * np.asarray(x, dtype=float) ** (p - 1),
                   lambda y: np.asarray(y, dtype=float) ** (1.0 / p),
                   "increasing", f"x^{p:g}",
                   lambda x: math.log(p) + (p - 1) * np.log(np.asarray(x, dtype=float)))

    @classmethod
    def square(cls):
        return cls.power(2.0)

    @classmethod
    def exp_neg(cls, c: float = 1.0):
        """``exp(-c x)``, decreasing."""
        if not c > 0:
            raise DegenerateParameter(f"exp_neg needs c > 0, got {c}")
        return cls(lambda x: np.exp(-c * np.asarray(x, dtype=float)),
                   lambda x: -c * np.exp(-c * np.asarray(x, dtype=float)),
                   lambda y: -np.log(np.asarray(y, dtype=float)) / c,
                   "decreasing", f"exp(-{c:g}x)",
                   lambda x: math.log(c) - c * np.asarray(x, dtype=float))

    @classmethod
    def reflect(cls, c: float):
        """``c - x``, decreasing; keeps a support inside ``[0, c]`` nonnegative."""
        return cls.affine(-1.0, c)


def parse_map(text: str) -> MonotoneMap:
    """``identity | square | power:p | affine:a,b | expneg:c | reflect:c``."""
    from .errors import ParseError

    name, _, rest = text.strip().partition(":")
    try:
        args = [float(v) for v in rest.split(",") if v.strip()]
    except ValueError:
        raise ParseError(f"bad map arguments in {text!r}") from None
    table = {"identity": (MonotoneMap.identity, 0), "square": (MonotoneMap.square, 0),
             "power": (MonotoneMap.power, 1), "affine": (MonotoneMap.affine, 2),
             "expneg": (MonotoneMap.exp_neg, 1), "reflect": (MonotoneMap.reflect, 1)}
    if name not in table:
        raise ParseError(f"unsupported map {name!r}; expected one of {sorted(table)}")
    ctor, nargs = table[name]
    if len(args) != nargs:
        raise ParseError(f"map {name!r} takes {nargs} argument(s), got {len(args)}")
    return ctor(*args)


class TransformedDistribution(Distribution):
    """Law of ``Y = phi(X)`` by change of variables."""

    family = "transformed"

    def __init__(self, base: Distribution, phi: MonotoneMap):
        phi.validate(base)
        self.base, self.map = base, phi
        lo, hi = base.support()
        ends = sorted((float(phi(lo)), float(phi(hi))))
        self._support = (ends[0], ends[1])

    def __repr__(self):
        return f"TransformedDistribution({self.base!r}, {self.map.label})"

    def to_spec(self):
        return f"{self.base.to_spec()}|{self.map.label}"

    def support(self):
        return self._support

    def _logpdf(self, y):
        x = self.map.inv(y)
        lf = np.asarray(self.base.logpdf(x))
        # -inf - (-inf) where the base density and the Jacobian both degenerate
        with np.errstate(invalid="ignore"):
            out = lf - self.map.log_jacobian(x)
        return np.where(np.isneginf(lf), -np.inf, out)

    def _logsf(self, y):
        x = self.map.inv(y)
        if self.map.increasing:
            return np.asarray(self.base.logsf(x))
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(self.base.cdf(x)))

    def _cdf(self, y):
        x = self.map.inv(y)
        return np.asarray(self.base.cdf(x) if self.map.increasing else self.base.sf(x))

    def _ppf(self, u):
        return self.map(self.base.ppf(u) if self.map.increasing else self.base.isf(u))

    def _isf(self, p):
        return self.map(self.base.isf(p) if self.map.increasing else self.base.ppf(p))


# -- unconditional identities -----------------------------------------------------------


def _expect(dist, g, cfg):
    return conditional_integral(dist, g, None, cfg).value


def wve_affine(dist: Distribution, a: float, b: float, cfg=None) -> float:
    """WVE of ``aX + b`` with weight ``y``:

    ``VE^{w1}(X) + (a log a)^2 Var(X) + 2 log a (H^{w1^2}(X) - H^{w1}(X) E[w1(X)])``,
    ``w1(x) = a x + b``.
    """
    if not a > 0:
        raise DegenerateParameter(f"scale a must be > 0, got {a}")
    if not b >= 0:
        raise DegenerateParameter(f"shift b must be >= 0, got {b}")
    cfg = cfg or DEFAULT_CONFIG
    w1 = WeightFunction.affine(a, b)
    mom = ic_moments(dist, w1, None, cfg)
    if a == 1.0:
        return mom.varentropy
    la = math.log(a)
    m1 = _expect(dist, lambda x, lf: x, cfg)
    var = _expect(dist, lambda x, lf: (x - m1) ** 2, cfg)
    h_w1sq = _expect(dist, lambda x, lf: -((a * x + b) ** 2) * lf, cfg)
    return mom.varentropy + (a * la) ** 2 * var + 2 * la * (h_w1sq - mom.entropy * (a * m1 + b))


def wve_scale(dist: Distribution, a: float, cfg=None) -> float:
    """WVE of ``aX``:
    ``a^2 {VE^x(X) + (log a)^2 Var(X) - 2 log a (H^x(X) E X + E[X^2 log f(X)])}``."""
    if not a > 0:
        raise DegenerateParameter(f"scale a must be > 0, got {a}")
    cfg = cfg or DEFAULT_CONFIG
    mom = ic_moments(dist, IDENTITY, None, cfg)
    la = math.log(a)
    m1 = _expect(dist, lambda x, lf: x, cfg)
    var = _expect(dist, lambda x, lf: (x - m1) ** 2, cfg)
    ex2log = _expect(dist, lambda x, lf: x * x * lf, cfg)
    return a * a * (mom.varentropy + la * la * var - 2 * la * (mom.entropy * m1 + ex2log))


def wve_location(dist: Distribution, b: float, printed: bool = False, cfg=None) -> float:
    """WVE of ``X + b`` with weight ``y``.

    The exact value is ``VE^{x+b}(X) = VE^x(X) + b^2 VE(X) + 2b Cov(X log f, log f)``,
    computed here as the weighted varentropy with weight ``x + b``. The
    published shortcut ``VE^x(X) - b VE(X)`` (``printed=True``) drops the
    cross term and the square on ``b``.
    """
    if not b >= 0:
        raise DegenerateParameter(f"shift b must be >= 0, got {b}")
    cfg = cfg or DEFAULT_CONFIG
    if printed:
        return ic_moments(dist, IDENTITY, None, cfg).varentropy - b * ic_moments(dist, UNIT, None, cfg).varentropy
    return ic_moments(dist, WeightFunction.affine(1.0, b), None, cfg).varentropy


def wve_monotone(dist: Distribution, phi: MonotoneMap, printed: bool = False, cfg=None) -> float:
    """WVE of ``Y = phi(X)`` with weight ``y`` through moments of ``X``.

    With ``eta = phi log|phi'|`` (eta_1 or eta_2 by direction), both branches
    equal ``VE^phi(X) + Var[eta(X)] - 2 E[phi eta log f] - 2 H^phi(X) E[eta]``.
    For decreasing maps ``printed=True`` evaluates the published decreasing
    branch, which has a different sign pattern and extra squared terms.
    """
    cfg = cfg or DEFAULT_CONFIG
    phi.validate(dist)
    w = WeightFunction.custom(phi.phi, phi.label)
    mom = ic_moments(dist, w, None, cfg)
    e_eta = _expect(dist, lambda x, lf: float(phi.eta(x)), cfg)
    var_eta = _expect(dist, lambda x, lf: (float(phi.eta(x)) - e_eta) ** 2, cfg)
    cross = _expect(dist, lambda x, lf: float(phi(x) * phi.eta(x)) * lf, cfg)
    if phi.increasing or not printed:
        return mom.varentropy + var_eta - 2 * cross - 2 * mom.entropy * e_eta
    h = mom.entropy
    return (-mom.varentropy - var_eta + 2 * cross - 2 * h * h
            - 2 * h * e_eta - 2 * e_eta * e_eta)


# -- residual identities ----------------------------------------------------------------


def _past_integral(dist, g, s, cfg):
    """``E[g(X, log(f(X)/F(s))) | X <= s]``."""
    lo, _ = dist.support()
    lcdf = math.log(float(dist.cdf(s)))
    if not lcdf > -math.inf:
        raise TailUnderflow(f"cdf({s}) = 0 for {dist}")

    def integrand(x):
        lf = float(dist.logpdf(x))
        if lf < LOG_DENSITY_FLOOR:
            return 0.0
        lfp = lf - lcdf
        return g(x, lfp) * math.exp(lfp)

    return integrate(integrand, lo, s, cfg).value


def wrve_monotone(dist: Distribution, phi: MonotoneMap, t: float, cfg=None) -> float:
    """WRVE of ``Y = phi(X)`` at age ``t`` through conditional moments of ``X``.

    Increasing ``phi``: condition on ``X > phi^{-1}(t)`` with ``eta_1``.
    Decreasing ``phi``: ``Y > t`` is ``X < phi^{-1}(t)``, so the past-lifetime
    analogues over ``(0, phi^{-1}(t))`` and ``eta_2`` appear. In both cases

    ``VE^phi + Var[eta] - 2 E[phi eta log f_c] - 2 H^phi E[eta]``

    with ``f_c`` the conditional density and all moments conditional.
    """
    cfg = cfg or DEFAULT_CONFIG
    phi.validate(dist)
    lo, hi = dist.support()
    ylo, yhi = sorted((float(phi(lo)), float(phi(hi))))
    if not t < yhi:
        raise TailUnderflow(f"t={t} is beyond the support of phi(X)")
    s = float(phi.inv(t)) if t > ylo else (lo if phi.increasing else hi)

    if phi.increasing:
        def E(g):
            return conditional_integral(dist, g, s if s > lo else None, cfg).value
    else:
        if s >= hi:
            def E(g):
                return conditional_integral(dist, g, None, cfg).value
        else:
            def E(g):
                return _past_integral(dist, g, s, cfg)

    h = E(lambda x, lf: -float(phi(x)) * lf)
    ve = E(lambda x, lf: (-float(phi(x)) * lf - h) ** 2)
    e_eta = E(lambda x, lf: float(phi.eta(x)))
    var_eta = E(lambda x, lf: (float(phi.eta(x)) - e_eta) ** 2)
    cross = E(lambda x, lf: float(phi(x) * phi.eta(x)) * lf)
    return ve + var_eta - 2 * cross - 2 * h * e_eta


def wrve_affine(dist: Distribution, a: float, b: float, t: float, printed: bool = False, cfg=None) -> float:
    """WRVE of ``Y = aX + b`` at age ``t``; ``s = (t - b)/a``, ``w1 = a x + b``.

    Exact identity::

        VE^{w1}(X;s) + (log a)^2 Var[w1(X) | X>s]
            + 2 log a (H^{w1^2}(X;s) - H^{w1}(X;s) E[w1(X) | X>s])

    ``printed=True`` evaluates the published corollary, which agrees only for
    ``a = 1``. A negative ``b`` is accepted as long as ``aX + b`` stays
    nonnegative on the support.
    """
    if not a > 0:
        raise DegenerateParameter(f"scale a must be > 0, got {a}")
    cfg = cfg or DEFAULT_CONFIG
    lo, hi = dist.support()
    if a * lo + b < -1e-12:
        raise OutOfSupport(f"aX+b takes negative values on the support of {dist}")
    s = (t - b) / a
    if s >= hi:
        raise TailUnderflow(f"t={t} is beyond the support of aX+b")
    cond = s if s > lo else None
    if cond is not None:
        check_tail(dist, cond)
    # a negative shift is fine here: w1 >= 0 on the support was checked above
    w1 = WeightFunction.affine(a, b) if b >= 0 else \
        WeightFunction.custom(lambda x: a * x + b, f"{a:g}x{b:+g}")
    mom = ic_moments(dist, w1, cond, cfg)
    la = math.log(a)
    ew1 = conditional_integral(dist, lambda x, lf: a * x + b, cond, cfg).value
    if printed:
        return mom.varentropy + la * la * ew1 * (1 - ew1) - 2 * la * mom.entropy * (1 + ew1)
    if a == 1.0:
        return mom.varentropy
    var_w1 = conditional_integral(dist, lambda x, lf: (a * x + b - ew1) ** 2, cond, cfg).value
    h_w1sq = conditional_integral(dist, lambda x, lf: -((a * x + b) ** 2) * lf, cond, cfg).value
    return mom.varentropy + la * la * var_w1 + 2 * la * (h_w1sq - mom.entropy * ew1)


# -- worked examples as printed ---------------------------------------------------------


def pareto_shift_wrve_printed(t: float, b: float) -> float:
    """Published closed form for ``Y = X - b``, ``X ~ Pareto-I(1, 2)``."""
    u = t + b
    L3 = math.log(3 * u ** 3)
    lu = math.log(u)
    q = 3 * t * t + 3 * b * t + b * b
    return (L3 * (q * math.log(3 * u) + 8.0 / 3.0 * (9 * t * t + 9 * b * t + b * b))
            + 16 * q * lu * lu + 16.0 / 3.0 * (18 * t * t + 27 * t * b + 11 * b * b) * lu
            - (2 * (3 * t + b) * lu + 0.5 * (3 * t + b) * L3 + (3 * t + 5 * b / 3.0)) ** 2
            + 8.0 / 9.0 * (108 * t * t + 189 * t * b + 83 * b * b)
            - 8 * L3 * lu * q)


def exp_square_wrve_printed(lam: float, t: float, cfg=None) -> float:
    """Published expression for ``Y = X^2``, ``X ~ Exp(lam)``.

    The three conditional expectations it leaves unevaluated are computed by
    quadrature.
    """
    from .distributions import Exponential

    cfg = cfg or DEFAULT_CONFIG
    x = Exponential(lam)
    s = math.sqrt(t)
    ll = math.log(lam)
    g = lambda v: v * v * math.log(2 * v)
    e_g = conditional_integral(x, lambda v, lf: g(v), s, cfg).value
    var_g = conditional_integral(x, lambda v, lf: (g(v) - e_g) ** 2, s, cfg).value
    cross = conditional_integral(x, lambda v, lf: v ** 4 * math.log(2 * v) * lf, s, cfg).value
    k = (ll + lam * s - 3) * (t + 2 * s / lam + 2 / lam ** 2) - lam * t * s
    return (12 / lam * (ll + lam * s - 5) ** 2
            + 2 * lam * t * s * (3 - ll - lam * s) * (t + 5 / lam * s + 20 / lam ** 2)
            - k * k + var_g - 2 * k * e_g
            + (ll + lam * s) ** 2 * (t * t + 4 * t * s / lam)
            + 60 / lam ** 4 * (1 + lam * s) ** 2 + (lam ** 2 * t ** 3 + 60 / lam ** 4)
            - 2 * cross)
