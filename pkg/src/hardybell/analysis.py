"""Threshold solvers, the optimal-alpha search and figure curves."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .hardy import ALPHA_H, build_hardy_state, hardy_fraction
from .inequality import (
    EberhardVariant,
    eberhard_ratio,
    h_qm_closed_form,
    pb_max,
    pb_max_unclamped,
)
from .qm import BasisParams, EfficiencySet, NoiseMode, NoiseParams, detected_joint_distribution

BISECTION_TOL = 1e-10
GOLDEN_TOL = 1e-10
DEFAULT_PB_LIST = (0.0, 0.01, 0.02, 0.05)


def default_eta_grid() -> np.ndarray:
    return np.round(np.arange(0, 201) * 0.005, 10)


def default_alpha_grid() -> np.ndarray:
    return np.round(np.arange(1, 200) * 0.005, 10)


class NoBracketError(ValueError):
    def __init__(self, lo: float, hi: float, f_lo: float, f_hi: float, target: float):
        self.lo, self.hi, self.f_lo, self.f_hi, self.target = lo, hi, f_lo, f_hi, target
        super().__init__(
            f"objective does not bracket {target}: f({lo})={f_lo}, f({hi})={f_hi}"
        )


class NotUnimodalError(ValueError):
    def __init__(self, grid: np.ndarray, values: np.ndarray):
        self.grid, self.values = grid, values
        dump = ", ".join(f"{x:.4f}:{y:.6g}" for x, y in zip(grid, values))
        super().__init__(f"objective is not unimodal on the pre-scan grid [{dump}]")


class Method(str, enum.Enum):
    ClosedForm = "closed-form"
    Bisection = "bisection"


@dataclass(frozen=True)
class ThresholdResult:
    critical_value: float
    parameter_name: str
    feasible: bool
    method: Method = Method.ClosedForm
    bisection_value: float | None = None


@dataclass(frozen=True)
class CurvePoint:
    x: float
    y: float
    series_label: str


def solve_threshold_bisection(
    objective: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = BISECTION_TOL,
    target: float = 1.0,
) -> float:
    """Root of ``objective(x) = target`` for a monotone objective bracketed by [lo, hi].

    The two bracket evaluations are followed by at most
    ``ceil(log2((hi - lo) / tol)) - 1`` interior evaluations; the midpoint of
    the final interval is within ``tol`` of the crossing.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    f_lo, f_hi = objective(lo) - target, objective(hi) - target
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if not (f_lo < 0.0 < f_hi or f_hi < 0.0 < f_lo):
        raise NoBracketError(lo, hi, f_lo + target, f_hi + target, target)
    rising = f_lo < 0.0
    n_iter = max(0, math.ceil(math.log2((hi - lo) / tol)) - 1)
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        f_mid = objective(mid) - target
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == rising:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _with_bisection(closed: float, name: str, feasible: bool, h: Callable[[float], float]) -> ThresholdResult:
    bis = None
    if feasible and closed > 0.0:
        bis = solve_threshold_bisection(h, 0.0, 1.0)
    return ThresholdResult(closed, name, feasible, Method.ClosedForm, bis)


def threshold_case1(alpha: float) -> ThresholdResult:
    """Common efficiency above which the ratio exceeds one."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    crit = 2.0 / (2.0 + alpha * alpha)
    return _with_bisection(crit, "eta", True, lambda e: h_qm_closed_form(alpha, EfficiencySet.uniform(e)))


def threshold_case2(alpha: float, eta_r: float) -> ThresholdResult:
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    den = (alpha * alpha + 2.0) * eta_r - 1.0
    if den <= 0.0:
        return ThresholdResult(math.inf, "eta_l", False)
    crit = eta_r / den
    return _with_bisection(
        crit, "eta_l", crit <= 1.0, lambda e: h_qm_closed_form(alpha, EfficiencySet.per_side(e, eta_r))
    )


def threshold_case3(alpha: float, eta_b: float) -> ThresholdResult:
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    crit = 2.0 * (1.0 - eta_b) / (alpha * alpha)
    return _with_bisection(
        crit, "eta_a", crit <= 1.0, lambda e: h_qm_closed_form(alpha, EfficiencySet.per_observable(e, eta_b))
    )


@dataclass(frozen=True)
class PbMax:
    eta_a: float
    eta_b: float


HARDY_FRACTION = "hardy-fraction"

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = GOLDEN_TOL) -> float:
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _check_unimodal(f: Callable[[float], float], n: int = 199) -> None:
    grid = np.linspace(0.0, 1.0, n + 2)[1:-1]
    vals = np.array([f(x) for x in grid])
    steps = np.sign(np.diff(vals))
    steps = steps[steps != 0]
    # once it starts falling it must never rise again
    if steps.size and np.any(np.diff(steps) > 0):
        raise NotUnimodalError(grid, vals)


def optimize_alpha(objective) -> tuple[float, float]:
    """Maximize the Hardy fraction or the Case-3 noise tolerance over alpha in (0, 1)."""
    if objective == HARDY_FRACTION:
        f = hardy_fraction
        report = hardy_fraction
    elif isinstance(objective, PbMax):
        # x/(1+x) is monotone in x, so the unclamped form has the same maximizer
        def f(a):
            return pb_max_unclamped(a, objective.eta_a, objective.eta_b)

        def report(a):
            return pb_max(a, objective.eta_a, objective.eta_b)

    else:
        raise ValueError(f"unknown objective {objective!r}")
    _check_unimodal(f)
    a_star = golden_section_max(f, 0.0, 1.0)
    return a_star, report(a_star)


def _fmt(v: float) -> str:
    return f"{v:.6f}".rstrip("0").rstrip(".")


def noise_series_label(alpha: float, eta_b_equal_eta_a: bool) -> str:
    eb = "eta_b=eta_a" if eta_b_equal_eta_a else "eta_b=1"
    return f"{eb},alpha={_fmt(alpha)}"


def noise_curve(eta_b_equal_eta_a: bool, alpha: float, eta_a_grid: Iterable[float]) -> list[CurvePoint]:
    """Maximum tolerable Case-3 background along ``eta_a`` (zero below threshold)."""
    label = noise_series_label(alpha, eta_b_equal_eta_a)
    out = []
    for eta_a in eta_a_grid:
        eta_a = float(eta_a)
        if not 0.0 <= eta_a <= 1.0:
            raise ValueError(f"grid value {eta_a} outside [0, 1]")
        eta_b = eta_a if eta_b_equal_eta_a else 1.0
        out.append(CurvePoint(eta_a, pb_max(alpha, eta_a, eta_b), label))
    return out


FIGURE1_SERIES = ((False, 0.99), (False, ALPHA_H), (True, 0.99), (True, ALPHA_H))


def figure1_curves(eta_a_grid: Sequence[float] | None = None) -> list[CurvePoint]:
    grid = default_eta_grid() if eta_a_grid is None else eta_a_grid
    pts: list[CurvePoint] = []
    for equal, alpha in FIGURE1_SERIES:
        pts.extend(noise_curve(equal, alpha, grid))
    return pts


def case1_ratio(alpha: float, eta: float, p_b: float, variant=EberhardVariant.Main) -> float:
    """Case-1 ratio assembled from the count-level detected distribution."""
    params = BasisParams(alpha)
    h = build_hardy_state(params)
    dist = detected_joint_distribution(
        h.state, params, EfficiencySet.uniform(eta), NoiseParams(p_b, NoiseMode.CountLevel)
    )
    return eberhard_ratio(dist, variant).ratio


def violation_curve(eta: float, p_b_list: Iterable[float], alpha_grid: Iterable[float]) -> list[CurvePoint]:
    alphas = [float(a) for a in alpha_grid]
    out = []
    for p_b in p_b_list:
        label = f"p_b={p_b:g}"
        for a in alphas:
            out.append(CurvePoint(a, case1_ratio(a, eta, float(p_b)), label))
    return out
