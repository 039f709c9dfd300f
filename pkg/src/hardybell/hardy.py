"""Hardy-state family and the four Hardy conditions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qm import (
    BasisParams,
    BasisTag,
    Outcome,
    Setting,
    TwoQubitPureState,
    ideal_joint_probability,
)

ALPHA_H = math.sqrt((3.0 - math.sqrt(5.0)) / 2.0)
HARDY_FRACTION_MAX = (5.0 * math.sqrt(5.0) - 11.0) / 2.0


@dataclass(frozen=True)
class HardyState:
    params: BasisParams
    state: TwoQubitPureState
    coeff_a: complex
    coeff_b: complex
    coeff_c: complex

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def entangled(self) -> bool:
        """False at the boundary alpha in {0, 1}, where the Hardy fraction vanishes."""
        return 0.0 < self.params.alpha < 1.0


def build_hardy_state(params: BasisParams) -> HardyState:
    """Hardy state in the b-product basis, amplitudes ``(0, A, B, C)``.

    ``A = B = sqrt((1-a^2)/(2-a^2)) e^{-i phi}`` and ``C = a/sqrt(2-a^2)``
    make P(a+,b-), P(b-,a+) and P(b+,b+) vanish.
    """
    a = params.alpha
    den = 2.0 - a * a
    ab = math.sqrt((1.0 - a * a) / den) * complex(math.cos(params.phi), -math.sin(params.phi))
    c = complex(a / math.sqrt(den), 0.0)
    amps = np.array([0.0, ab, ab, c], dtype=np.complex128)
    # renormalize away the last-ulp drift of the closed forms
    amps /= math.sqrt(float(np.vdot(amps, amps).real))
    return HardyState(params, TwoQubitPureState(amps, BasisTag.B), complex(amps[1]), complex(amps[2]), complex(amps[3]))


def hardy_fraction(alpha: float) -> float:
    a2 = alpha * alpha
    return (1.0 - a2) ** 2 * a2 / (2.0 - a2)


def hardy_conditions(h: HardyState) -> tuple[float, float, float, float]:
    """Ideal P(a+,a+), P(a+,b-), P(b-,a+), P(b+,b+), via projectors."""
    st, p = h.state, h.params
    return (
        ideal_joint_probability(st, (Setting.A, Outcome.Plus), (Setting.A, Outcome.Plus), p),
        ideal_joint_probability(st, (Setting.A, Outcome.Plus), (Setting.B, Outcome.Minus), p),
        ideal_joint_probability(st, (Setting.B, Outcome.Minus), (Setting.A, Outcome.Plus), p),
        ideal_joint_probability(st, (Setting.B, Outcome.Plus), (Setting.B, Outcome.Plus), p),
    )
