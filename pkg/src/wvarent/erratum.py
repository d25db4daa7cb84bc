"""Published closed forms that disagree with independent evaluation.

Each entry evaluates a published expression (``printed``) next to an oracle
(``exact``), usually direct quadrature of the defining variance on the
transformed or conditioned law. ``collect()`` recomputes all of them, so the
report in ERRATUM.md can be regenerated with ``python -m wvarent.erratum``.
Entries with status ``confirmed`` record questions that were checked and
found consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .errors import WvarentError


@dataclass(frozen=True)
class ErratumEntry:
    key: str
    topic: str
    case: str
    printed: Optional[float]
    exact: Optional[float]
    oracle: str
    note: str
    status: str = "erratum"

    @property
    def abs_diff(self) -> Optional[float]:
        if self.printed is None or self.exact is None:
            return None
        return abs(self.printed - self.exact)

    def as_dict(self) -> dict:
        return {"key": self.key, "topic": self.topic, "case": self.case, "printed": self.printed,
                "exact": self.exact, "oracle": self.oracle, "note": self.note, "status": self.status}


def _fmt(v):
    if v is None:
        return "n/a"
    if isinstance(v, float) and math.isinf(v):
        return "diverges"
    return f"{v:.10g}"


# -- individual cases -------------------------------------------------------------------


def _discrete_digits():
    from .measures import DiscreteModel, discrete_weighted_varentropy
    m = DiscreteModel.with_identity_weights((1, 2, 3), (0.5, 0.2, 0.3))
    return ErratumEntry(
        "discrete-digits", "measure", "x=(1,2,3), p=(0.5,0.2,0.3), w=x",
        1.92508326678, discrete_weighted_varentropy(m), "exact finite sum",
        "The quoted weighted values differ from the finite sums by 2.6e-8 and 2.0e-8 "
        "(the second ordering gives 0.488387926 vs 0.48838794637). The unweighted value "
        "0.13296441046 agrees to 1e-12.")


def _varextropy_example():
    from .measures import DiscreteModel, varextropy
    m = DiscreteModel((0.0, 1.0), (0.9, 0.1))
    return ErratumEntry(
        "varextropy-arithmetic", "measure", "p=(0.9, 0.1)", 0.01434, varextropy(m),
        "direct arithmetic",
        "(1/4)[(0.729 + 0.001) - 0.82^2] = 0.0144 exactly; 0.01434 is an arithmetic slip.")


def _power_wve():
    from .distributions import Power
    from .measures import closed_form_wve, weighted_varentropy
    d = Power(2.0, 1.0)
    return ErratumEntry(
        "power-wve", "measure", "Power(k=2, b=1), weight x",
        closed_form_wve(d, printed=True), weighted_varentropy(d), "quadrature of Var[-x log f]",
        "The last term must be subtracted and carry (k+1)^4 in the denominator.")


def _power_wrve():
    from .distributions import Power
    from .residual import closed_form_wrve, wrve
    d = Power(2.0, 1.0)
    return ErratumEntry(
        "power-wrve", "residual", "Power(k=2, b=1), t=0.5",
        closed_form_wrve(d, 0.5, printed=True), wrve(d, 0.5), "quadrature of the residual variance",
        "The printed residual form omits a +2 inside the bracket and squares (k+1) instead of "
        "raising it to the fourth power; it turns negative on part of the parameter range.")


def _wrve_derivative():
    from .distributions import Exponential
    from .residual import wrve_derivative
    r = wrve_derivative(Exponential(1.0), 1.0)
    return ErratumEntry(
        "wrve-derivative", "residual", "Exp(1), t=1",
        r.formula_value, r.finite_difference_value, "central finite difference of quadrature WRVE",
        "Differentiating under the integral gives "
        "r(t)[VE(t) - (IC_t(t) - H)^2 - 2(H^{x^2}(t) - H m(t))] with IC_t(t) = -t log r(t) and "
        f"m(t) = E[X | X>t]; that expression gives {r.derived_value:.10g}. The printed form "
        "squares the sum of the entropy terms instead.")


def _decreasing_map():
    from .distributions import Exponential
    from .transforms import MonotoneMap, TransformedDistribution, wve_monotone
    from .measures import weighted_varentropy
    d, phi = Exponential(2.0), MonotoneMap.exp_neg(1.0)
    return ErratumEntry(
        "monotone-decreasing", "transform", "X ~ Exp(2), Y = exp(-X)",
        wve_monotone(d, phi, printed=True), weighted_varentropy(TransformedDistribution(d, phi)),
        "quadrature on the law of Y (here Power(2, 1))",
        "The decreasing branch has the same structure as the increasing one with eta_2 = "
        "phi log(-phi') in place of eta_1.")


def _location_shift():
    from .distributions import Exponential
    from .transforms import wve_location
    d = Exponential(1.0)
    return ErratumEntry(
        "location-shift", "transform", "X ~ Exp(1), Y = X + 1",
        wve_location(d, 1.0, printed=True), wve_location(d, 1.0), "Var[-(x+b) log f] by quadrature",
        "VE^x(X) - b VE(X) drops the cross term 2b Cov(X log f, log f) and the square on b.")


def _affine_residual():
    from .distributions import Exponential
    from .transforms import TransformedDistribution, MonotoneMap, wrve_affine
    from .residual import wrve
    d = Exponential(1.0)
    exact = wrve(TransformedDistribution(d, MonotoneMap.affine(2.0, 1.0)), 2.0)
    return ErratumEntry(
        "affine-residual", "transform", "X ~ Exp(1), Y = 2X + 1, t=2",
        wrve_affine(d, 2.0, 1.0, 2.0, printed=True), exact, "quadrature on the residual law of Y",
        "Correct form: VE^{w1}(X;s) + (log a)^2 Var[w1 | X>s] + "
        "2 log a (H^{w1^2}(X;s) - H^{w1}(X;s) E[w1 | X>s]), s = (t-b)/a, w1 = ax+b. "
        "The printed one agrees only for a = 1.")


def _pareto_shift():
    from .distributions import ParetoI
    from .transforms import pareto_shift_wrve_printed, wrve_affine
    from .errors import NonConvergence
    try:
        exact = wrve_affine(ParetoI(1.0, 2.0), 1.0, -0.5, 1.0)
    except NonConvergence:
        exact = math.inf
    return ErratumEntry(
        "pareto-shift", "transform", "X ~ Pareto-I(1, 2), Y = X - 0.5, t=1",
        pareto_shift_wrve_printed(1.0, 0.5), exact, "quadrature (diverges)",
        "With shape 2, E[X^2 log^2 X | X>s] is infinite, so the WRVE of Y is infinite for every "
        "t and b; the printed closed form is finite. The shift identity itself is verified on "
        "Pareto-I(1, 3).")


def _exp_square():
    from .distributions import Exponential
    from .transforms import MonotoneMap, TransformedDistribution, exp_square_wrve_printed
    from .residual import wrve
    d = Exponential(1.0)
    return ErratumEntry(
        "exp-square", "transform", "X ~ Exp(1), Y = X^2, t=1",
        exp_square_wrve_printed(1.0, 1.0), wrve(TransformedDistribution(d, MonotoneMap.square()), 1.0),
        "quadrature on the residual law of Y",
        "Two defects: the cross term uses the entropy without its minus sign (flipping 2kE[g]) "
        "and the closed form for E[X^4 log^2 f_t] is wrong.")


def _coherent_uform():
    from .distributions import Power
    from .systems import DistortionFunction, wve_coherent, wve_system_direct
    q, c = DistortionFunction.parallel(2), Power(1.0, 1.0)
    return ErratumEntry(
        "coherent-uform", "system", "max(X1, X2), X ~ Uniform(0, 1)",
        wve_coherent(q, c), wve_system_direct(q, c), "quadrature on the law of the system lifetime",
        "The u-integral representation evaluates the component density where the system "
        "density is needed, so it equals the system WVE only for q(u) = u. The alternative "
        "u-form agrees with it to 1e-12; both are implemented as published and the direct "
        "value is available separately.")


def _phr_closed_form():
    from .distributions import Exponential
    from .phr import PHRModel, phr_exponential_wrve, wrve_phr
    return ErratumEntry(
        "phr-exponential", "phr", "Exp(1), a=2, t=0.5",
        phr_exponential_wrve(2.0, 1.0, 0.5), wrve_phr(PHRModel(Exponential(1.0), 2.0), 0.5),
        "y-space quadrature",
        "The bracketed squared term equals the squared WRSE; the closed form is consistent.",
        status="confirmed")


CASES: Tuple[Callable[[], ErratumEntry], ...] = (
    _discrete_digits, _varextropy_example, _power_wve, _power_wrve, _wrve_derivative,
    _decreasing_map, _location_shift, _affine_residual, _pareto_shift, _exp_square,
    _coherent_uform, _phr_closed_form,
)

CONVENTIONS = (
    "All entropies carry the leading minus sign, e.g. H^x(X;t) = -E[X log f_t(X) | X>t]. "
    "Several published identities mix the signed and unsigned forms; they are re-derived here.",
    "In the proportional hazard section gamma(y) = x log g_t(x) has no minus sign, so the WRSE "
    "is the negative mean of gamma.",
)

NOTES: Dict[str, Tuple[str, ...]] = {
    "measure": ("Power-family closed form: the last term is subtracted with (k+1)^4.",),
    "residual": ("Power-family residual closed form corrected (+2 term, (k+1)^4).",
                 "dWRVE: 'formula' column is the published derivative, 'derived' the corrected one."),
    "transform": ("Decreasing maps, location shift and affine residual use re-derived identities.",),
    "system": ("u-form WVE equals the system WVE only for q(u) = u; see wve_system_direct.",),
    "phr": (),
    "simulate": (),
    "estimate": (),
    "curves": (),
}


def collect(keys=None) -> List[ErratumEntry]:
    """Evaluate every case (or those whose key is in ``keys``)."""
    out = []
    for case in CASES:
        try:
            entry = case()
        except WvarentError as exc:  # pragma: no cover - reported, not raised
            entry = ErratumEntry(case.__name__.strip("_"), "?", "", None, None, "", f"failed: {exc}")
        if keys is None or entry.key in keys:
            out.append(entry)
    return out


def notes_for(topic: str) -> List[str]:
    return list(NOTES.get(topic, ()))


def to_markdown(entries: List[ErratumEntry]) -> str:
    lines = ["| key | case | printed | independent | status |", "|---|---|---|---|---|"]
    for e in entries:
        lines.append(f"| {e.key} | {e.case} | {_fmt(e.printed)} | {_fmt(e.exact)} | {e.status} |")
    lines.append("")
    for e in entries:
        lines.append(f"- **{e.key}** ({e.oracle}): {e.note}")
    return "\n".join(lines)


if __name__ == "__main__":
    print(to_markdown(collect()))
