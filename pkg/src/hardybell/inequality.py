"""Eberhard-type ratio, its Clauser-Horne form and closed-form quantum values."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .qm import EfficiencySet, JointDistribution

#: Largest ideal CH-type violation for a maximally entangled state with four settings.
MAX_ENTANGLED_REFERENCE = (3.0 + 2.0 * math.sqrt(2.0)) / 3.0


class EberhardVariant(str, enum.Enum):
    Main = "main"
    AltLeftNoClick = "alt-left"
    AltRightNoClick = "alt-right"


# the three vanishing-in-ideal terms are shared by every variant
_COMMON_DENOMINATOR = (("a+", "b-"), ("b+", "b+"), ("b-", "a+"))
_NOCLICK_TERMS = {
    EberhardVariant.Main: (("a+", "b0"), ("b0", "a+")),
    EberhardVariant.AltLeftNoClick: (("a+", "b0"), ("b0", "b+")),
    EberhardVariant.AltRightNoClick: (("b+", "b0"), ("b0", "a+")),
}
NUMERATOR_TERM = ("a+", "a+")


def denominator_terms(variant: EberhardVariant) -> tuple[tuple[str, str], ...]:
    return _COMMON_DENOMINATOR + _NOCLICK_TERMS[EberhardVariant(variant)]


@dataclass(frozen=True)
class EberhardResult:
    numerator: float
    denominator: float
    ratio: float
    violated: bool
    variant: EberhardVariant

    @property
    def infinite(self) -> bool:
        return math.isinf(self.ratio)


def ratio_from_terms(numerator: float, denominator: float, variant=EberhardVariant.Main) -> EberhardResult:
    """Build the result; a zero numerator gives ratio 0, a zero denominator ratio +inf."""
    if numerator == 0.0:
        ratio = 0.0
    elif denominator == 0.0:
        ratio = math.inf
    else:
        ratio = numerator / denominator
    if denominator > 0.0:
        violated = ratio > 1.0
    else:
        violated = numerator > 0.0
    return EberhardResult(numerator, denominator, ratio, violated, EberhardVariant(variant))


def eberhard_ratio(dist: JointDistribution, variant: EberhardVariant = EberhardVariant.Main) -> EberhardResult:
    num = dist.p(*NUMERATOR_TERM)
    den = math.fsum(dist.p(l, r) for l, r in denominator_terms(variant))
    return ratio_from_terms(num, den, variant)


def clauser_horne_value(dist: JointDistribution) -> float:
    """LHS minus RHS of the Clauser-Horne form; positive means violation.

    The single-side terms are assembled from the joint probabilities:
    ``P(a+,*) = P(a+,b+) + P(a+,b-) + P(a+,b0)`` and the mirror image.
    """
    p = dist.p
    left_single = p("a+", "b+") + p("a+", "b-") + p("a+", "b0")
    right_single = p("b+", "a+") + p("b-", "a+") + p("b0", "a+")
    lhs = p("a+", "a+") + p("a+", "b+") + p("b+", "a+") - p("b+", "b+")
    return lhs - left_single - right_single


def _shape(alpha: float) -> float:
    a2 = alpha * alpha
    return (1.0 - a2) ** 2 / (2.0 - a2)


def h_qm_closed_form(alpha: float, eff: EfficiencySet) -> float:
    """Quantum Eberhard ratio for the Hardy state with four efficiencies.

    Returns ``math.inf`` when both b-efficiencies are one.
    """
    num = alpha * alpha * eff.eta_la * eff.eta_ra
    den = eff.eta_la * (1.0 - eff.eta_rb) + eff.eta_ra * (1.0 - eff.eta_lb)
    return ratio_from_terms(num, den).ratio


def h_qm_noisy_case3(alpha: float, eta_a: float, eta_b: float, p_b: float) -> float:
    f = _shape(alpha)
    num = (1.0 - p_b) * f * alpha * alpha * eta_a * eta_a + p_b / 4.0
    den = 5.0 * p_b / 4.0 + (1.0 - p_b) * f * 2.0 * eta_a * (1.0 - eta_b)
    return ratio_from_terms(num, den).ratio


def _pb_excess(alpha: float, eta_a: float, eta_b: float) -> float:
    return _shape(alpha) * eta_a * (alpha * alpha * eta_a - 2.0 * (1.0 - eta_b))


def pb_max_unclamped(alpha: float, eta_a: float, eta_b: float) -> float:
    """``x/(1+x)`` without the clamp; negative below threshold. Requires ``x > -1``."""
    x = _pb_excess(alpha, eta_a, eta_b)
    return x / (1.0 + x)


def pb_max(alpha: float, eta_a: float, eta_b: float) -> float:
    """Largest background ``p_b`` still giving a violation in Case 3 (0 if none)."""
    x = _pb_excess(alpha, eta_a, eta_b)
    if x <= 0.0:
        return 0.0
    return x / (1.0 + x)


def violation_measure(result: EberhardResult) -> float:
    # the local-realistic maximum of the ratio is 1
    return result.ratio
