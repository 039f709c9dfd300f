"""Finite-trial simulation of the Bell test and the empirical Eberhard ratio.

Random numbers come from numpy's PCG64 bit generator. Trials are cut into
fixed-size shards; shard ``k`` draws from the ``k``-th child of
``SeedSequence(seed)``, so a tally depends only on (seed, config) and not on
how many workers ran the shards.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .hardy import build_hardy_state
from .inequality import (
    NUMERATOR_TERM,
    EberhardResult,
    EberhardVariant,
    denominator_terms,
    eberhard_ratio,
)
from .qm import (
    BasisParams,
    EfficiencySet,
    JointDistribution,
    NoiseMode,
    NoiseParams,
    Outcome,
    Setting,
    parse_event,
    detected_joint_distribution,
)

RNG_ALGORITHM = "numpy PCG64, SeedSequence(seed).spawn per shard, inverse-CDF sampling"
SHARD_SIZE = 1 << 18
ERROR_METHOD = "first-order delta method on multinomial cell frequencies (artifact choice)"

SETTING_PAIRS = [(sl, sr) for sl in Setting for sr in Setting]


@dataclass(frozen=True)
class TrialConfig:
    n_trials: int
    hardy_alpha: float
    eff: EfficiencySet
    noise: NoiseParams = NoiseParams()
    seed: int = 0
    phi: float = 0.0
    setting_weights: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)

    def __post_init__(self) -> None:
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise ValueError(f"n_trials must be a positive integer, got {self.n_trials!r}")
        w = np.asarray(self.setting_weights, dtype=float)
        if w.shape != (4,) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("setting_weights must be 4 nonnegative numbers summing to 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        BasisParams(self.hardy_alpha, self.phi)

    def sampling_distribution(self) -> JointDistribution:
        """Per-pair normalized distribution used for sampling (white-noise mixture)."""
        params = BasisParams(self.hardy_alpha, self.phi)
        h = build_hardy_state(params)
        noise = NoiseParams(self.noise.p_b, NoiseMode.StateMixture)
        return detected_joint_distribution(h.state, params, self.eff, noise)


@dataclass(frozen=True)
class TrialTally:
    """Counts indexed ``[sL, sR, oL, oR]`` like a joint distribution table.

    Counts are integers for simulated tallies; :meth:`expected` builds a
    real-valued tally from an analytic distribution.
    """

    counts: np.ndarray
    n_trials: int
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        c = np.asarray(self.counts).reshape(2, 2, 3, 3)
        if not math.isclose(float(c.sum()), float(self.n_trials), rel_tol=1e-12):
            raise ValueError("counts do not sum to n_trials")
        object.__setattr__(self, "counts", c)

    @classmethod
    def expected(cls, dist: JointDistribution, n: int, weights=(0.25,) * 4) -> "TrialTally":
        w = np.asarray(weights, dtype=float).reshape(2, 2, 1, 1)
        table = dist.table / dist.pair_totals()[:, :, None, None]
        return cls(table * w * n, n)

    def pair_counts(self) -> np.ndarray:
        return self.counts.sum(axis=(2, 3))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["settingL", "settingR", "outcomeL", "outcomeR", "count"])
        for sl, sr in SETTING_PAIRS:
            for ol in Outcome:
                for orr in Outcome:
                    c = self.counts[sl, sr, ol, orr]
                    w.writerow([sl.name, sr.name, ol.name, orr.name, _count_str(c)])
        return buf.getvalue()

    def tobytes(self) -> bytes:
        return np.ascontiguousarray(self.counts).tobytes()


def _count_str(c) -> str:
    if float(c).is_integer():
        return str(int(c))
    return f"{float(c):.9g}"


@dataclass(frozen=True)
class EmpiricalResult:
    dist: JointDistribution
    result: EberhardResult
    std_error: float  # NaN when the ratio is infinite

    @property
    def ratio(self) -> float:
        return self.result.ratio


def _cumulative(p: np.ndarray) -> np.ndarray:
    c = np.cumsum(p / p.sum(axis=-1, keepdims=True), axis=-1)
    c[..., -1] = 1.0
    return c


def _run_shard(seq: np.random.SeedSequence, n: int, cum_pair: np.ndarray, cum_out: np.ndarray) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seq))
    u_pair = rng.random(n)
    u_out = rng.random(n)
    return _kernels.tally_trials(u_pair, u_out, cum_pair, cum_out)


def run_trials(config: TrialConfig, workers: int = 1) -> TrialTally:
    """Sample ``n_trials`` setting pairs and detected outcome cells."""
    dist = config.sampling_distribution()
    cum_pair = _cumulative(np.asarray(config.setting_weights, dtype=float))
    cum_out = _cumulative(dist.table.reshape(4, 9))
    n = int(config.n_trials)
    n_shards = -(-n // SHARD_SIZE)
    sizes = [SHARD_SIZE] * (n_shards - 1) + [n - SHARD_SIZE * (n_shards - 1)]
    seqs = np.random.SeedSequence(int(config.seed)).spawn(n_shards)
    jobs = list(zip(seqs, sizes))
    if workers > 1 and n_shards > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda j: _run_shard(j[0], j[1], cum_pair, cum_out), jobs))
    else:
        parts = [_run_shard(s, m, cum_pair, cum_out) for s, m in jobs]
    counts = np.sum(parts, axis=0).reshape(2, 2, 3, 3)
    return TrialTally(counts, n, {"rng": RNG_ALGORITHM, "seed": int(config.seed), "shard_size": SHARD_SIZE})


class UnobservedSettingPairError(ValueError):
    pass


def empirical_eberhard(tally: TrialTally, variant: EberhardVariant = EberhardVariant.Main) -> EmpiricalResult:
    """Eberhard ratio of conditional frequencies with a delta-method standard error.

    Each setting pair's outcome counts are multinomial; pairs are treated as
    independent given their totals.
    """
    n_pair = tally.pair_counts()
    if np.any(n_pair <= 0):
        missing = [f"{sl.name}{sr.name}" for sl, sr in SETTING_PAIRS if n_pair[sl, sr] <= 0]
        raise UnobservedSettingPairError(
            f"setting pair(s) {', '.join(missing)} never observed; run more trials"
        )
    freq = tally.counts / n_pair[:, :, None, None]
    dist = JointDistribution(np.clip(freq, 0.0, 1.0), meta={"source": "empirical"})
    res = eberhard_ratio(dist, variant)
    return EmpiricalResult(dist, res, _ratio_std_error(freq, n_pair, res, variant))


def _ratio_std_error(freq: np.ndarray, n_pair: np.ndarray, res: EberhardResult, variant) -> float:
    if math.isinf(res.ratio) or res.denominator == 0.0:
        return math.nan
    num, den = res.numerator, res.denominator
    grad = np.zeros((2, 2, 3, 3))
    (sl, ol), (sr, orr) = parse_event(NUMERATOR_TERM[0]), parse_event(NUMERATOR_TERM[1])
    grad[sl, sr, ol, orr] += 1.0 / den
    for left, right in denominator_terms(variant):
        (sl, ol), (sr, orr) = parse_event(left), parse_event(right)
        grad[sl, sr, ol, orr] -= num / den**2
    var = 0.0
    for a, b in SETTING_PAIRS:
        g = grad[a, b].ravel()
        p = freq[a, b].ravel()
        # multinomial covariance (diag(p) - p p^T) / n
        var += (np.dot(g * g, p) - np.dot(g, p) ** 2) / n_pair[a, b]
    return math.sqrt(max(var, 0.0))


def analytic_ratio(config: TrialConfig, variant: EberhardVariant = EberhardVariant.Main) -> EberhardResult:
    """Ratio of the exact sampling distribution (white-noise mixture)."""
    return eberhard_ratio(config.sampling_distribution(), variant)


def analytic_count_level_ratio(config: TrialConfig, variant: EberhardVariant = EberhardVariant.Main) -> EberhardResult:
    params = BasisParams(config.hardy_alpha, config.phi)
    h = build_hardy_state(params)
    noise = NoiseParams(config.noise.p_b, NoiseMode.CountLevel)
    return eberhard_ratio(detected_joint_distribution(h.state, params, config.eff, noise), variant)

