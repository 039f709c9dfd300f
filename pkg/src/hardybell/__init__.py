"""Detection-loophole analysis of Eberhard-type Bell tests with Hardy states."""

__version__ = "0.1.0"

from .hardy import ALPHA_H, HARDY_FRACTION_MAX, build_hardy_state, hardy_conditions, hardy_fraction
from .inequality import (
    MAX_ENTANGLED_REFERENCE,
    EberhardResult,
    EberhardVariant,
    clauser_horne_value,
    eberhard_ratio,
    h_qm_closed_form,
    h_qm_noisy_case3,
    pb_max,
    violation_measure,
)
from .qm import (
    BasisParams,
    BasisTag,
    EfficiencySet,
    JointDistribution,
    NoiseMode,
    NoiseParams,
    Outcome,
    Setting,
    detected_joint_distribution,
    ideal_joint_probability,
)
