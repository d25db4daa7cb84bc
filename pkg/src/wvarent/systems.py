"""Coherent systems of i.i.d. components through distortion functions.

A system lifetime ``T`` has CDF ``F_T = q(F)`` with ``q`` the distortion
function of its structure. Two quantities are provided:

* :func:`wve_coherent`, the quantile-space functional
  ``int phi(q(u)) / f(F^{-1}(u)) du - [int psi(q(u)) / f(F^{-1}(u)) du]^2``
  built from the component's ``phi`` and ``psi``. The closed form for a
  two-component parallel system of power-law components and the comparison
  and bound propositions are all statements about this functional.
* :func:`wve_system_direct`, the weighted varentropy of ``T`` itself,
  integrated on :class:`DistortedDistribution`.

The two coincide for ``q(u) = u`` but not in general, because ``phi`` and
``psi`` are evaluated with the component density rather than ``f_T``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .distributions import Distribution, conditional_integral
from .errors import DegenerateParameter, InvalidStructure, RatioSingularityWarning
from .measures import IDENTITY, WeightFunction, density_sandwich_holds, ic_moments
from .quadrature import DEFAULT_CONFIG, LOG_DENSITY_FLOOR, integrate


@dataclass(frozen=True)
class DistortionFunction:
    """``q: [0,1] -> [0,1]``, continuous, nondecreasing, ``q(0)=0``, ``q(1)=1``.

    Parameters
    ----------
    q, dq : callable
        The distortion and its derivative (vectorised).
    label : str
    qbar : callable, optional
        ``1 - q(u)`` computed without cancellation near ``u = 1``.
    qinv, qbar_inv : callable, optional
        Inverses of ``q`` and ``qbar``; a root finder is used otherwise.
    qbar_sf : callable, optional
        ``s -> 1 - q(1 - s)``, accurate for small ``s`` (deep upper tails).
    """

    q: Callable
    dq: Callable
    label: str = "q"
    qbar: Optional[Callable] = None
    qinv: Optional[Callable] = None
    qbar_inv: Optional[Callable] = None
    qbar_sf: Optional[Callable] = None

    def __post_init__(self):
        u = np.linspace(0.0, 1.0, 1001)
        v = np.asarray(self.q(u), dtype=float)
        if abs(v[0]) > 1e-12 or abs(v[-1] - 1.0) > 1e-12:
            raise InvalidStructure(f"{self.label}: need q(0)=0 and q(1)=1, got {v[0]:.3g}, {v[-1]:.3g}")
        if np.any(np.diff(v) < -1e-12) or np.any(v < -1e-12) or np.any(v > 1 + 1e-12):
            raise InvalidStructure(f"{self.label}: q must be nondecreasing with values in [0, 1]")

    def __call__(self, u):
        return self.q(u)

    def complement(self, u):
        return self.qbar(u) if self.qbar is not None else 1.0 - np.asarray(self.q(u))

    def complement_from_sf(self, s):
        """``1 - q(1 - s)``; ``s`` is a survival probability."""
        if self.qbar_sf is not None:
            return self.qbar_sf(s)
        return self.complement(1.0 - np.asarray(s, dtype=float))

    def inverse(self, v: float) -> float:
        if self.qinv is not None:
            return float(self.qinv(v))
        if v <= 0:
            return 0.0
        if v >= 1:
            return 1.0
        return brentq(lambda u: float(self.q(u)) - v, 0.0, 1.0, xtol=1e-15, rtol=4e-16)

    def complement_inverse(self, p: float) -> float:
        """``u`` with ``1 - q(u) = p``."""
        if self.qbar_inv is not None:
            return float(self.qbar_inv(p))
        if p <= 0:
            return 1.0
        if p >= 1:
            return 0.0
        return brentq(lambda u: float(self.complement(u)) - p, 0.0, 1.0, xtol=1e-15, rtol=4e-16)

    # -- constructors ------------------------------------------------------
    @classmethod
    def identity(cls):
        return distortion_k_of_n(1, 1)

    @classmethod
    def parallel(cls, n: int):
        return distortion_k_of_n(1, n)

    @classmethod
    def series(cls, n: int):
        return distortion_k_of_n(n, n)

    @classmethod
    def from_table(cls, u, q, label="table"):
        """Monotone cubic interpolation through tabulated ``(u, q(u))`` pairs."""
        u = np.asarray(u, dtype=float)
        q = np.asarray(q, dtype=float)
        if u.ndim != 1 or u.shape != q.shape or len(u) < 2:
            raise InvalidStructure("distortion table needs two equal-length columns with >= 2 rows")
        if u[0] != 0.0 or u[-1] != 1.0 or np.any(np.diff(u) <= 0):
            raise InvalidStructure("distortion table u must increase strictly from 0 to 1")
        f = PchipInterpolator(u, q)
        d = f.derivative()
        return cls(lambda x: f(np.clip(x, 0.0, 1.0)), lambda x: d(np.clip(x, 0.0, 1.0)), label)


def distortion_k_of_n(k: int, n: int) -> DistortionFunction:
    """Distortion of a ``k``-out-of-``n`` system: it works while at least ``k``
    of its ``n`` i.i.d. components work.

    ``T`` is the ``(n-k+1)``-th order statistic, so
    ``q(u) = I_u(n-k+1, k)``, the regularised incomplete beta function.
    ``k = 1`` is the parallel system (``u^n``), ``k = n`` the series system
    (``1 - (1-u)^n``).
    """
    if int(k) != k or int(n) != n or not 1 <= k <= n:
        raise InvalidStructure(f"k-out-of-n needs integers 1 <= k <= n, got k={k}, n={n}")
    a, b = n - k + 1, k
    logB = special.betaln(a, b)

    def dq(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.exp((a - 1) * np.log(u) + (b - 1) * np.log1p(-u) - logB)
        if a == 1 and b == 1:
            out = np.ones_like(u)
        return out

    if k == 1:
        label = "identity" if n == 1 else f"parallel:{n}"
    elif k == n:
        label = f"series:{n}"
    else:
        label = f"koutofn:{k},{n}"
    return DistortionFunction(
        q=lambda u: special.betainc(a, b, np.clip(u, 0.0, 1.0)),
        dq=dq,
        label=label,
        qbar=lambda u: special.betaincc(a, b, np.clip(u, 0.0, 1.0)),
        qinv=lambda v: special.betaincinv(a, b, v),
        qbar_inv=lambda p: special.betainccinv(a, b, p),
        qbar_sf=lambda s: special.betainc(b, a, np.clip(s, 0.0, 1.0)),
    )


def parse_structure(text: str) -> DistortionFunction:
    """``series:n | parallel:n | koutofn:k,n | table:path`` (CSV ``u,q``)."""
    from .errors import ParseError

    name, _, rest = text.strip().partition(":")
    try:
        if name == "series":
            return DistortionFunction.series(int(rest))
        if name == "parallel":
            return DistortionFunction.parallel(int(rest))
        if name == "koutofn":
            k, n = (int(v) for v in rest.split(","))
            return distortion_k_of_n(k, n)
    except ValueError:
        raise ParseError(f"bad structure arguments in {text!r}") from None
    if name == "table":
        data = np.loadtxt(rest, delimiter=",", comments="#", ndmin=2)
        if data.shape[1] != 2:
            raise ParseError(f"distortion table {rest!r} must have two columns u,q")
        return DistortionFunction.from_table(data[:, 0], data[:, 1], label=f"table:{rest}")
    raise ParseError(f"unknown structure {name!r}; expected series, parallel, koutofn or table")


class DistortedDistribution(Distribution):
    """Law with CDF ``q(F(x))``: the lifetime of the system."""

    family = "system"

    def __init__(self, component: Distribution, q: DistortionFunction):
        self.component, self.dist_q = component, q

    def __repr__(self):
        return f"DistortedDistribution({self.component!r}, {self.dist_q.label})"

    def to_spec(self):
        return f"{self.component.to_spec()}|{self.dist_q.label}"

    def support(self):
        return self.component.support()

    def _logpdf(self, x):
        u = np.asarray(self.component.cdf(x), dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(self.dist_q.dq(u), dtype=float)) + np.asarray(self.component.logpdf(x))

    def _cdf(self, x):
        return np.asarray(self.dist_q(np.asarray(self.component.cdf(x))), dtype=float)

    def _logsf(self, x):
        s = np.asarray(self.component.sf(x), dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(self.dist_q.complement_from_sf(s), dtype=float))

    def _ppf(self, v):
        v = np.asarray(v, dtype=float)
        u = np.vectorize(self.dist_q.inverse, otypes=[float])(v)
        return np.asarray(self.component.ppf(u), dtype=float)

    def _isf(self, p):
        p = np.asarray(p, dtype=float)
        u = np.vectorize(self.dist_q.complement_inverse, otypes=[float])(p)
        # 1 - u is lost to rounding near u = 1; go through the component isf there
        cu = 1.0 - u
        return np.where(cu < 0.5, np.asarray(self.component.isf(np.maximum(cu, 0.0)), dtype=float),
                        np.asarray(self.component.ppf(u), dtype=float))

    def _interior_point(self):
        return float(self.component.ppf(0.5))


# -- phi / psi -----------------------------------------------------------------------------


@dataclass(frozen=True)
class PhiPsiPair:
    """``phi(u) = f(x) [x log f(x)]^2`` and ``psi(u) = -x f(x) log f(x)``,
    ``x = F^{-1}(u)``, for a component law."""

    component: Distribution

    def _x(self, u):
        return np.asarray(self.component.ppf(u), dtype=float)

    def phi(self, u):
        x = self._x(u)
        lf = np.asarray(self.component.logpdf(x), dtype=float)
        with np.errstate(invalid="ignore", over="ignore"):
            return np.where(np.isfinite(lf), np.exp(lf) * (x * lf) ** 2, 0.0)

    def psi(self, u):
        x = self._x(u)
        lf = np.asarray(self.component.logpdf(x), dtype=float)
        with np.errstate(invalid="ignore", over="ignore"):
            return np.where(np.isfinite(lf), -x * np.exp(lf) * lf, 0.0)


def phi_psi(component: Distribution) -> PhiPsiPair:
    return PhiPsiPair(component)


def _distorted_point(component, q, x):
    """``F^{-1}(q(F(x)))`` keeping precision in the upper tail."""
    s = float(component.sf(x))
    if s < 0.5:
        qb = float(q.complement_from_sf(s))
    else:
        qb = float(q.complement(float(component.cdf(x))))
    if qb < 0.5:
        return float(component.isf(qb))
    return float(component.ppf(1.0 - qb))


def _u_integrals(q: DistortionFunction, component: Distribution, cfg):
    """``int phi(q(F(x))) dx`` and ``int psi(q(F(x))) dx`` over the support;
    the substitution ``u = F(x)`` turns these into the quantile-space forms."""
    cfg = cfg or DEFAULT_CONFIG
    lo, hi = component.support()
    tq = component.isf if math.isinf(hi) else None

    def parts(x):
        z = _distorted_point(component, q, x)
        lf = float(component.logpdf(z))
        if lf < LOG_DENSITY_FLOOR:
            return 0.0, 0.0
        return math.exp(lf) * (z * lf) ** 2, -z * math.exp(lf) * lf

    i_phi = integrate(lambda x: parts(x)[0], lo, hi, cfg, truncation_quantile=tq).value
    i_psi = integrate(lambda x: parts(x)[1], lo, hi, cfg, truncation_quantile=tq).value
    return i_phi, i_psi


def wve_coherent(q: DistortionFunction, component: Distribution, cfg=None) -> float:
    """Quantile-space weighted varentropy functional of a coherent system.

    Equals the WVE of ``T`` for ``q(u) = u``; see the module docstring for
    the general case and :func:`wve_system_direct` for the WVE of ``T``.
    """
    i_phi, i_psi = _u_integrals(q, component, cfg)
    return i_phi - i_psi * i_psi


def wve_system_direct(q: DistortionFunction, component: Distribution, cfg=None) -> float:
    """Weighted varentropy (weight ``x``) of the system lifetime itself."""
    return ic_moments(DistortedDistribution(component, q), IDENTITY, None, cfg).varentropy


def closed_form_parallel2_power(k: float, a: float) -> float:
    """Closed form of :func:`wve_coherent` for ``max(X1, X2)``, ``F(x) = (x/a)^k``."""
    if not (k > 0 and a > 0):
        raise DegenerateParameter(f"need k > 0 and a > 0, got k={k}, a={a}")
    L = math.log(k / a)
    c3 = 2 + 3 / k
    c1 = 2 + 1 / k
    m = 1 - 1 / k
    return (a * a / c3 * (L - 2 * m / c3) ** 2 + 4 * a * a * m * m / c3 ** 3
            - (a / c1) ** 2 * (L - 2 * m / c1) ** 2)


# -- comparison and bounds ----------------------------------------------------------------


def _u_grid(points=10_000):
    core = np.linspace(0.0, 1.0, points + 2)[1:-1]
    edge = np.geomspace(1e-12, 1e-4, 64)
    return np.unique(np.concatenate([edge, core, 1.0 - edge]))


@dataclass(frozen=True)
class ComparisonResult:
    phi_dominates: bool
    psi_dominated: bool
    conclusion: Optional[str]
    system_value: float
    component_value: float
    verified: Optional[bool]


def wve_comparison_condition(q: DistortionFunction, component: Distribution,
                             points: int = 1000, cfg=None) -> ComparisonResult:
    """Grid check of the ordering conditions between system and component.

    If ``phi(q(u)) >= phi(u)`` and ``psi(q(u)) <= psi(u)`` on the grid the
    conclusion is ``">="`` (system functional at least the component WVE);
    the reversed pair gives ``"<="``; both with equality gives ``"=="``.
    Differences within 1e-10 count for either direction. ``verified``
    compares the conclusion with the computed values.
    """
    pp = PhiPsiPair(component)
    u = np.linspace(0.0, 1.0, points + 2)[1:-1]
    qu = np.asarray(q(u), dtype=float)
    dphi = pp.phi(qu) - pp.phi(u)
    dpsi = pp.psi(qu) - pp.psi(u)
    tol = 1e-10
    phi_ge, phi_le = bool(np.all(dphi >= -tol)), bool(np.all(dphi <= tol))
    psi_le, psi_ge = bool(np.all(dpsi <= tol)), bool(np.all(dpsi >= -tol))
    sys_v = wve_coherent(q, component, cfg)
    comp_v = ic_moments(component, IDENTITY, None, cfg).varentropy
    if phi_ge and phi_le and psi_le and psi_ge:
        conclusion = "=="
    elif phi_ge and psi_le:
        conclusion = ">="
    elif phi_le and psi_ge:
        conclusion = "<="
    else:
        conclusion = None
    slack = 1e-8 * max(1.0, abs(comp_v))
    verified = {None: None,
                "==": abs(sys_v - comp_v) <= slack,
                ">=": sys_v >= comp_v - slack,
                "<=": sys_v <= comp_v + slack}[conclusion]
    return ComparisonResult(phi_ge, psi_le, conclusion, sys_v, comp_v, verified)


@dataclass(frozen=True)
class CoherentBounds:
    """Upper bounds on :func:`wve_coherent`.

    ``bound_wse`` needs the density sandwich on the component
    (``condition_holds``); ``bound_density_floor`` needs ``f >= L``
    (``floor_holds``). ``near_boundary`` flags a grid supremum attained in
    the refinement zones next to ``u = 0`` or ``u = 1``, where the true
    supremum may be larger.
    """

    beta1u: float
    bound_wse: Optional[float]
    bound_wve: float
    bound_density_floor: Optional[float]
    value: float
    condition_holds: bool
    floor_holds: Optional[bool]
    near_boundary: bool

    def holds(self, slack: float = 1e-6) -> bool:
        ok = self.value <= self.bound_wve + slack
        if self.bound_wse is not None and self.condition_holds:
            ok &= self.value <= self.bound_wse + slack
        if self.bound_density_floor is not None and self.floor_holds:
            ok &= self.value <= self.bound_density_floor + slack
        return bool(ok)


def _beta1u(q, component):
    pp = PhiPsiPair(component)
    u = _u_grid()
    den = pp.phi(u)
    num = pp.phi(np.asarray(q(u), dtype=float))
    zero = den <= 0
    if np.any(zero):
        warnings.warn(
            f"phi(u) vanishes at {int(zero.sum())} grid point(s), e.g. u={u[zero][0]:.6g}; "
            "the supremum is taken over the remaining points", RatioSingularityWarning, stacklevel=3)
    ratio = np.where(zero, -np.inf, num / np.where(zero, 1.0, den))
    edge = (u < 1e-4) | (u > 1 - 1e-4)
    sup = float(np.max(ratio))
    inner = float(np.max(ratio[~edge]))
    near = bool(sup > inner * (1 + 1e-9) + 1e-300)
    return sup, near


def wve_coherent_bounds(q: DistortionFunction, component: Distribution, alpha: float,
                        beta: float, L: Optional[float] = None, cfg=None) -> CoherentBounds:
    """Bounds on the system functional through ``beta_{1,u} = sup phi(q(u))/phi(u)``:

    * ``beta_{1,u} H^{w2}(X)``, ``w2 = alpha x^3 + beta x^2``, under
      ``exp(-(alpha x + beta)) <= f <= 1``;
    * ``beta_{1,u} [VE^x(X) + H^x(X)^2]``;
    * ``(1/L) int_0^1 phi(q(u)) du`` when ``f >= L > 0`` on the support.
    """
    cfg = cfg or DEFAULT_CONFIG
    b1, near = _beta1u(q, component)
    value = wve_coherent(q, component, cfg)
    mom = ic_moments(component, IDENTITY, None, cfg)
    bound_wve = b1 * (mom.varentropy + mom.entropy ** 2)
    cond = density_sandwich_holds(component, alpha, beta)
    w2 = WeightFunction.cubic_quad(alpha, beta)
    bound_wse = None
    if cond:
        bound_wse = b1 * conditional_integral(component, lambda x, lf: -w2(x) * lf, None, cfg).value
    floor_v = floor_ok = None
    if L is not None:
        if not L > 0:
            raise DegenerateParameter(f"density floor L must be > 0, got {L}")
        pp = PhiPsiPair(component)
        u = _u_grid(2000)
        fx = np.asarray(component.pdf(component.ppf(u)), dtype=float)
        floor_ok = bool(np.all(fx >= L * (1 - 1e-12)))
        integral = integrate(lambda v: float(pp.phi(float(q(v)))), 0.0, 1.0, cfg,
                             breakpoints=[1e-6, 0.5, 1 - 1e-6]).value
        floor_v = integral / L
    return CoherentBounds(b1, bound_wse, bound_wve, floor_v, value, cond, floor_ok, near)
