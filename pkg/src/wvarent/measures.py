"""Entropy and (weighted) varentropy of continuous and discrete laws.

For a weight ``w >= 0`` the weighted information content is
``IC^w(X) = -w(X) log f(X)``. Its mean is the weighted entropy ``H^w`` and
its variance the weighted varentropy ``VE^w``. With ``w = 1`` these reduce to
the differential entropy and the varentropy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .distributions import (Distribution, Exponential, Power, Uniform,
                            conditional_integral)
from .errors import (DegenerateProbability, InvalidModel, NonConvergence,
                     ParseError, UnsupportedFamily)
from .quadrature import QuadratureConfig


# -- weights ---------------------------------------------------------------------


@dataclass(frozen=True)
class WeightFunction:
    """A nonnegative weight ``w(x)``.

    Use the constructors :meth:`identity`, :meth:`square`, :meth:`affine`,
    :meth:`cubic_quad`, :meth:`unit` and :meth:`custom` rather than the raw
    initializer.
    """

    kind: str
    params: tuple = ()
    label: str = ""
    fn: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __call__(self, x):
        k, p = self.kind, self.params
        if k == "identity":
            return x
        if k == "square":
            return x * x
        if k == "affine":
            return p[0] * x + p[1]
        if k == "cubic_quad":
            return p[0] * x ** 3 + p[1] * x * x
        if k == "unit":
            return 1.0 if np.ndim(x) == 0 else np.ones_like(x, dtype=float)
        return self.fn(x)

    def __str__(self):
        return self.label

    @classmethod
    def identity(cls):
        return cls("identity", (), "x")

    @classmethod
    def square(cls):
        return cls("square", (), "x^2")

    @classmethod
    def unit(cls):
        return cls("unit", (), "1")

    @classmethod
    def affine(cls, a, b):
        """``w(x) = a x + b`` with ``a > 0``, ``b >= 0``."""
        if not (a > 0 and b >= 0):
            raise ValueError(f"affine weight needs a > 0 and b >= 0, got a={a}, b={b}")
        return cls("affine", (float(a), float(b)), f"{a:g}*x+{b:g}")

    @classmethod
    def cubic_quad(cls, alpha, beta):
        """``w(x) = alpha x^3 + beta x^2`` with ``alpha > 0``, ``beta >= 0``."""
        if not (alpha > 0 and beta >= 0):
            raise ValueError(f"cubic-quadratic weight needs alpha > 0 and beta >= 0, got {alpha}, {beta}")
        return cls("cubic_quad", (float(alpha), float(beta)), f"{alpha:g}*x^3+{beta:g}*x^2")

    @classmethod
    def custom(cls, fn, label):
        """Arbitrary weight. A readable ``label`` is required for reports."""
        if not label or not isinstance(label, str):
            raise ValueError("custom weights need a non-empty label")
        return cls("custom", (), label, fn)


def parse_weight(text: str) -> WeightFunction:
    """Parse ``x``, ``x2``, ``unit``, ``affine:a,b`` or ``cubquad:alpha,beta``."""
    t = text.strip().lower()
    simple = {"x": WeightFunction.identity, "x2": WeightFunction.square,
              "unit": WeightFunction.unit, "1": WeightFunction.unit}
    if t in simple:
        return simple[t]()
    name, _, rest = t.partition(":")
    try:
        args = [float(v) for v in rest.split(",")] if rest else []
    except ValueError:
        raise ParseError(f"weight parameters must be numbers: {text!r}") from None
    if name == "affine" and len(args) == 2:
        return WeightFunction.affine(*args)
    if name == "cubquad" and len(args) == 2:
        return WeightFunction.cubic_quad(*args)
    raise ParseError(f"unknown weight {text!r}; expected x|x2|unit|affine:a,b|cubquad:alpha,beta")


IDENTITY = WeightFunction.identity()
UNIT = WeightFunction.unit()


# -- continuous measures ---------------------------------------------------------


@dataclass(frozen=True)
class ICMoments:
    """Mean and variance of ``-w(X) log f_t(X)`` given ``X > t``."""

    entropy: float
    varentropy: float
    error: float


def ic_moments(dist: Distribution, w: WeightFunction = UNIT, t: Optional[float] = None,
               cfg: Optional[QuadratureConfig] = None) -> ICMoments:
    """Weighted (residual) entropy and varentropy in one pass.

    The variance is integrated in centred form,
    ``E[(IC - H)^2]``, which equals ``E[IC^2] - H^2`` but does not cancel.
    """
    r1 = conditional_integral(dist, lambda x, lf: -w(x) * lf, t, cfg)
    h = r1.value
    r2 = conditional_integral(dist, lambda x, lf: (-w(x) * lf - h) ** 2, t, cfg)
    return ICMoments(h, r2.value, r1.abs_error_estimate + r2.abs_error_estimate)


def shannon_entropy(dist: Distribution, cfg=None) -> float:
    """Differential entropy ``H(X) = -E[log f(X)]``."""
    return conditional_integral(dist, lambda x, lf: -lf, None, cfg).value


def weighted_entropy(dist: Distribution, w: WeightFunction = IDENTITY, cfg=None) -> float:
    """``H^w(X) = -E[w(X) log f(X)]``."""
    return conditional_integral(dist, lambda x, lf: -w(x) * lf, None, cfg).value


def varentropy(dist: Distribution, cfg=None) -> float:
    """``Var[-log f(X)]``."""
    return ic_moments(dist, UNIT, None, cfg).varentropy


def weighted_varentropy(dist: Distribution, w: WeightFunction = IDENTITY, cfg=None) -> float:
    """``VE^w(X) = Var[-w(X) log f(X)]``."""
    return ic_moments(dist, w, None, cfg).varentropy


def closed_form_wve(dist: Distribution, printed: bool = False) -> float:
    """Closed-form ``VE^x`` for the uniform, exponential and power families.

    Parameters
    ----------
    dist : Uniform, Exponential or Power
    printed : bool
        For the power family, return the expression as it appears in the
        source literature rather than the re-derived one. The two differ in
        the sign and the ``(k+1)`` power of the last term; only the default
        agrees with quadrature (see ERRATUM.md).
    """
    if isinstance(dist, Uniform):
        a, b = dist.a, dist.b
        return (a - b) ** 2 * math.log(b - a) ** 2 / 12.0
    if isinstance(dist, Exponential):
        lam = dist.lam
        return ((math.log(lam) - 4.0) ** 2 + 4.0) / lam ** 2
    if isinstance(dist, Power):
        k, b = float(dist.k), float(dist.b)
        L = math.log(k / b ** k)
        lb = math.log(b)
        first = k * b * b / (k + 2) ** 3 * (
            (k + 2) ** 2 * L ** 2
            + 2 * (k - 1) * (k + 2) * L * ((k + 2) * lb - 1)
            + (k - 1) ** 2 * ((k + 2) ** 2 * lb ** 2 - 2 * ((k + 2) * lb - 1)))
        bracket = ((k + 1) * L + (k - 1) * ((k + 1) * lb - 1)) ** 2
        if printed:
            return first + (k * b) ** 2 / (k + 1) ** 2 * bracket
        return first - (k * b) ** 2 / (k + 1) ** 4 * bracket
    raise UnsupportedFamily(f"no closed-form WVE for family {dist.family!r}")


# -- bounds ------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundResult:
    """An upper or lower bound together with the quantity it bounds.

    ``condition_holds`` reports the sufficient condition of the bound (for
    the cubic-quadratic bounds: ``exp(-(alpha x + beta)) <= f(x) <= 1``).
    ``holds`` is the numerical verdict ``measure <= bound`` (or ``>=``).
    """

    bound: float
    condition_holds: bool
    measure: float
    holds: bool


def density_sandwich_holds(dist: Distribution, alpha: float, beta: float,
                           t: Optional[float] = None, points: int = 10_000,
                           slack: float = 1e-12) -> bool:
    """Grid check of ``exp(-(alpha x + beta)) <= f(x) <= 1``.

    The grid spans ``[F^{-1}(1e-8), F^{-1}(1 - 1e-8)]`` (restricted to
    ``x > t``), half of it equally spaced in ``x`` and half in probability.
    """
    lo_u = 1e-8
    if t is not None:
        lo_u = max(lo_u, float(dist.cdf(t)))
    x_lo, x_hi = float(dist.ppf(lo_u)), float(dist.ppf(1 - 1e-8))
    half = points // 2
    xs = np.concatenate([np.linspace(x_lo, x_hi, points - half),
                         np.asarray(dist.ppf(np.linspace(lo_u, 1 - 1e-8, half)))])
    if t is not None:
        xs = xs[xs > t]
    lf = np.asarray(dist.logpdf(xs))
    ok = np.isfinite(lf)
    lf, xs = lf[ok], xs[ok]
    return bool(np.all(lf <= slack) and np.all(-(alpha * xs + beta) <= lf + slack))


def wve_upper_bound(dist: Distribution, alpha: float, beta: float, cfg=None) -> BoundResult:
    """Upper bound ``VE^x(X) <= H^{w2}(X)`` with ``w2 = alpha x^3 + beta x^2``.

    Valid when ``exp(-(alpha x + beta)) <= f(x) <= 1`` on the support.
    """
    w2 = WeightFunction.cubic_quad(alpha, beta)
    cond = density_sandwich_holds(dist, alpha, beta)
    bound = _nonneg_or_inf(lambda: weighted_entropy(dist, w2, cfg), cond)
    ve = _nonneg_or_inf(lambda: weighted_varentropy(dist, IDENTITY, cfg), cond)
    return BoundResult(bound, cond, ve, bool(ve <= bound + 1e-8))


def _nonneg_or_inf(compute, integrand_nonnegative):
    """Evaluate ``compute``; a divergent integral of a nonnegative integrand
    is reported as ``+inf`` (heavy tails such as Lomax with shape 1)."""
    try:
        return compute()
    except NonConvergence:
        if integrand_nonnegative:
            return math.inf
        raise


# -- discrete measures ------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteModel:
    """Finite law with outcomes, probabilities and per-outcome weights.

    ``weights`` defaults to all ones. Use :meth:`with_identity_weights` for
    ``w_i = x_i``.
    """

    outcomes: tuple
    probs: tuple
    weights: Optional[tuple] = None

    def __post_init__(self):
        x = tuple(float(v) for v in self.outcomes)
        p = tuple(float(v) for v in self.probs)
        w = tuple(1.0 for _ in p) if self.weights is None else tuple(float(v) for v in self.weights)
        object.__setattr__(self, "outcomes", x)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "weights", w)
        if not (len(x) == len(p) == len(w)) or not p:
            raise InvalidModel("outcomes, probs and weights must be non-empty and of equal length")
        if any(not math.isfinite(v) or v < 0 for v in p):
            raise InvalidModel("probabilities must be finite and nonnegative")
        if abs(math.fsum(p) - 1.0) > 1e-12:
            raise InvalidModel(f"probabilities sum to {math.fsum(p)!r}, not 1")
        if any(not math.isfinite(v) or v < 0 for v in w):
            raise InvalidModel("weights must be finite and nonnegative")

    @classmethod
    def with_identity_weights(cls, outcomes: Sequence[float], probs: Sequence[float]):
        return cls(tuple(outcomes), tuple(probs), tuple(outcomes))

    def _arrays(self):
        return np.array(self.outcomes), np.array(self.probs), np.array(self.weights)


def _plogp(p):
    # 0 log 0 = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)


def _plog2p(p):
    with np.errstate(divide="ignore", invalid="ignore"):
        lp = np.log(np.where(p > 0, p, 1.0))
        return np.where(p > 0, p * lp * lp, 0.0)


def discrete_entropy(m: DiscreteModel) -> float:
    """``S(X) = -sum p_i log p_i``."""
    _, p, _ = m._arrays()
    return float(-math.fsum(_plogp(p)))


def discrete_weighted_entropy(m: DiscreteModel) -> float:
    """``S^w(X) = -sum w_i p_i log p_i``."""
    _, p, w = m._arrays()
    return float(-math.fsum(w * _plogp(p)))


def discrete_varentropy(m: DiscreteModel) -> float:
    """``sum p_i (log p_i)^2 - (sum p_i log p_i)^2``."""
    _, p, _ = m._arrays()
    return float(math.fsum(_plog2p(p)) - math.fsum(_plogp(p)) ** 2)


def discrete_weighted_varentropy(m: DiscreteModel) -> float:
    """``sum w_i^2 p_i (log p_i)^2 - (sum w_i p_i log p_i)^2``."""
    _, p, w = m._arrays()
    return float(math.fsum(w * w * _plog2p(p)) - math.fsum(w * _plogp(p)) ** 2)


def varextropy_weight(m: DiscreteModel) -> DiscreteModel:
    """Attach the weights ``w_i = -p_i / (2 log p_i)``.

    With these weights the weighted varentropy equals the varextropy.
    """
    p = m.probs
    if any(v <= 0.0 or v >= 1.0 for v in p):
        raise DegenerateProbability("varextropy weights need every p_i strictly inside (0, 1)")
    return DiscreteModel(m.outcomes, p, tuple(-v / (2.0 * math.log(v)) for v in p))


def varextropy(m: DiscreteModel) -> float:
    """``(1/4) [sum p_i^3 - (sum p_i^2)^2]``."""
    p = m.probs
    if any(v <= 0.0 or v >= 1.0 for v in p):
        raise DegenerateProbability("varextropy needs every p_i strictly inside (0, 1)")
    return 0.25 * (math.fsum(v ** 3 for v in p) - math.fsum(v * v for v in p) ** 2)
