"""Two-qubit states, the a/b basis relation and the detection model.

Conventions shared by every module:

* single-qubit outcomes are ordered (Plus, Minus); two-qubit amplitudes are
  ordered (++, +-, -+, --) with the left qubit most significant;
* a state carries a :class:`BasisTag` saying whether its amplitudes are
  coordinates in the a-product basis or the b-product basis;
* joint probabilities live in a ``(2, 2, 3, 3)`` array indexed
  ``[left setting, right setting, left outcome, right outcome]`` where the
  outcome axis is (Plus, Minus, NoClick).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import _kernels

VANISHING_TOL = 1e-10
NORM_TOL = 1e-12
# trace rounding leaves ~1e-17 residue in cells that vanish exactly; the
# detection model zeroes ideal entries below this so denominators can be 0
ZERO_SNAP = 1e-14


class BasisTag(enum.IntEnum):
    A = 0
    B = 1


class Setting(enum.IntEnum):
    A = 0
    B = 1

    @property
    def label(self) -> str:
        return self.name.lower()


class Outcome(enum.IntEnum):
    Plus = 0
    Minus = 1
    NoClick = 2

    @property
    def symbol(self) -> str:
        return ("+", "-", "0")[self]


class NoiseMode(str, enum.Enum):
    CountLevel = "count"
    StateMixture = "mixture"


@dataclass(frozen=True)
class BasisParams:
    """Real ``alpha`` in [0, 1] and phase ``phi`` (radians) relating the two bases."""

    alpha: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not math.isfinite(a) or not 0.0 <= a <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        p = float(self.phi)
        if not math.isfinite(p):
            raise ValueError(f"phi must be finite, got {self.phi!r}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "phi", p % (2.0 * math.pi))

    @property
    def beta(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.alpha * self.alpha))


@dataclass(frozen=True)
class EfficiencySet:
    eta_la: float
    eta_ra: float
    eta_lb: float
    eta_rb: float

    def __post_init__(self) -> None:
        for name in ("eta_la", "eta_ra", "eta_lb", "eta_rb"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
            object.__setattr__(self, name, v)

    @classmethod
    def uniform(cls, eta: float) -> "EfficiencySet":
        return cls(eta, eta, eta, eta)

    @classmethod
    def per_side(cls, eta_l: float, eta_r: float) -> "EfficiencySet":
        return cls(eta_l, eta_r, eta_l, eta_r)

    @classmethod
    def per_observable(cls, eta_a: float, eta_b: float) -> "EfficiencySet":
        return cls(eta_a, eta_a, eta_b, eta_b)

    def left(self) -> np.ndarray:
        """Left-side efficiencies indexed by :class:`Setting`."""
        return np.array([self.eta_la, self.eta_lb])

    def right(self) -> np.ndarray:
        return np.array([self.eta_ra, self.eta_rb])


PERFECT = EfficiencySet.uniform(1.0)


@dataclass(frozen=True)
class NoiseParams:
    p_b: float = 0.0
    mode: NoiseMode = NoiseMode.CountLevel

    def __post_init__(self) -> None:
        v = float(self.p_b)
        if not math.isfinite(v) or not 0.0 <= v <= 1.0:
            raise ValueError(f"p_b must lie in [0, 1], got {self.p_b!r}")
        object.__setattr__(self, "p_b", v)
        object.__setattr__(self, "mode", NoiseMode(self.mode))


NOISELESS = NoiseParams()


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TwoQubitPureState:
    amplitudes: np.ndarray
    basis: BasisTag

    def __post_init__(self) -> None:
        amp = np.array(self.amplitudes, dtype=np.complex128).reshape(4)
        norm = float(np.vdot(amp, amp).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum |c|^2 = {norm!r}")
        object.__setattr__(self, "amplitudes", _frozen(amp))
        object.__setattr__(self, "basis", BasisTag(self.basis))

    def density(self) -> "TwoQubitDensity":
        return TwoQubitDensity(np.outer(self.amplitudes, self.amplitudes.conj()), self.basis)


@dataclass(frozen=True)
class TwoQubitDensity:
    matrix: np.ndarray
    basis: BasisTag

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=np.complex128).reshape(4, 4)
        if np.max(np.abs(m - m.conj().T)) > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "basis", BasisTag(self.basis))

    def mixed_with_white_noise(self, p_b: float) -> "TwoQubitDensity":
        return TwoQubitDensity((1.0 - p_b) * self.matrix + p_b * np.eye(4) / 4.0, self.basis)


def basis_change_matrix(params: BasisParams) -> np.ndarray:
    """Return U with ``|+_b> = U[0,0]|+_a> + U[0,1]|-_a>`` and likewise row 1 for ``|-_b>``."""
    a, b, phi = params.alpha, params.beta, params.phi
    return np.array(
        [
            [a, b * np.exp(1j * phi)],
            [-b * np.exp(-1j * phi), a],
        ],
        dtype=np.complex128,
    )


def eigenvectors(setting: Setting, basis: BasisTag, params: BasisParams) -> np.ndarray:
    """Columns are the (Plus, Minus) eigenvectors of ``setting`` in ``basis`` coordinates."""
    if int(setting) == int(basis):
        return np.eye(2, dtype=np.complex128)
    u = basis_change_matrix(params)
    b_in_a = u.T
    if basis == BasisTag.A:
        return b_in_a
    return b_in_a.conj().T


def change_basis(state: TwoQubitPureState, target: BasisTag, params: BasisParams) -> TwoQubitPureState:
    target = BasisTag(target)
    if state.basis == target:
        return state
    m = eigenvectors(Setting(target), state.basis, params)
    # new coordinates are overlaps with the target eigenvectors on each qubit
    op = np.kron(m, m).conj().T
    return TwoQubitPureState(op @ state.amplitudes, target)


def as_density(state: TwoQubitPureState | TwoQubitDensity) -> TwoQubitDensity:
    if isinstance(state, TwoQubitPureState):
        return state.density()
    return state


def _projector(vec: np.ndarray) -> np.ndarray:
    return np.outer(vec, vec.conj())


def ideal_table(state: TwoQubitDensity, params: BasisParams) -> np.ndarray:
    """All detection-free probabilities ``p[sL, sR, oL, oR]`` with outcomes in (Plus, Minus).

    Entries below ``ZERO_SNAP`` are set to exactly zero.
    """
    rho = state.matrix
    vecs = [eigenvectors(s, state.basis, params) for s in Setting]
    out = np.empty((2, 2, 2, 2))
    for sl in Setting:
        for sr in Setting:
            for ol in range(2):
                pl = _projector(vecs[sl][:, ol])
                for orr in range(2):
                    pr = _projector(vecs[sr][:, orr])
                    val = np.trace(rho @ np.kron(pl, pr)).real
                    out[sl, sr, ol, orr] = 0.0 if val < ZERO_SNAP else min(val, 1.0)
    return out


def ideal_joint_probability(
    state: TwoQubitDensity | TwoQubitPureState,
    left: tuple[Setting, Outcome],
    right: tuple[Setting, Outcome],
    params: BasisParams,
) -> float:
    """``Tr[rho (P_left x P_right)]`` for rank-1 projectors on detected outcomes."""
    (sl, ol), (sr, orr) = left, right
    if Outcome(ol) == Outcome.NoClick or Outcome(orr) == Outcome.NoClick:
        raise ValueError("ideal probabilities are defined for Plus/Minus outcomes only")
    rho = as_density(state)
    pl = _projector(eigenvectors(Setting(sl), rho.basis, params)[:, int(ol)])
    pr = _projector(eigenvectors(Setting(sr), rho.basis, params)[:, int(orr)])
    val = np.trace(rho.matrix @ np.kron(pl, pr)).real
    return float(min(max(val, 0.0), 1.0))


class MissingEntryError(KeyError):
    """A joint probability needed by an evaluator is absent from the distribution."""

    def __init__(self, key: tuple[Setting, Setting, Outcome, Outcome]):
        self.key = key
        sl, sr, ol, orr = key
        super().__init__(
            f"missing joint probability P({Setting(sl).label}{Outcome(ol).symbol}, "
            f"{Setting(sr).label}{Outcome(orr).symbol})"
        )


@dataclass(frozen=True)
class JointDistribution:
    """Probabilities over (left setting, right setting, left outcome, right outcome).

    Absent entries are stored as NaN. ``normalized`` is False when the
    per-setting-pair totals are not meant to sum to one (count-level
    background with ``p_b > 0``).
    """

    table: np.ndarray
    noise_mode: NoiseMode | None = None
    efficiencies: EfficiencySet | None = None
    p_b: float = 0.0
    normalized: bool = True
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        t = np.array(self.table, dtype=np.float64).reshape(2, 2, 3, 3)
        present = t[~np.isnan(t)]
        if np.any(~np.isfinite(present)) or np.any(present < 0.0) or np.any(present > 1.0):
            raise ValueError("joint probabilities must be finite and lie in [0, 1]")
        object.__setattr__(self, "table", _frozen(t))

    @classmethod
    def from_mapping(cls, probs: Mapping[tuple, float], **kw) -> "JointDistribution":
        t = np.full((2, 2, 3, 3), np.nan)
        for (sl, sr, ol, orr), v in probs.items():
            t[int(sl), int(sr), int(ol), int(orr)] = v
        return cls(t, **kw)

    def __getitem__(self, key) -> float:
        sl, sr, ol, orr = (int(k) for k in key)
        v = self.table[sl, sr, ol, orr]
        if np.isnan(v):
            raise MissingEntryError((Setting(sl), Setting(sr), Outcome(ol), Outcome(orr)))
        return float(v)

    def p(self, left: str, right: str) -> float:
        """Shorthand lookup, e.g. ``dist.p("a+", "b0")``."""
        sl, ol = parse_event(left)
        sr, orr = parse_event(right)
        return self[sl, sr, ol, orr]

    def pair_totals(self) -> np.ndarray:
        return self.table.sum(axis=(2, 3))


def parse_event(ev: str) -> tuple[Setting, Outcome]:
    setting = Setting[ev[0].upper()]
    outcome = {"+": Outcome.Plus, "-": Outcome.Minus, "0": Outcome.NoClick}[ev[1]]
    return setting, outcome


# Count-level background: every cell with at least one click on either side
# receives p_b/4; (NoClick, NoClick) receives none.
_BACKGROUND_MASK = np.ones((3, 3))
_BACKGROUND_MASK[2, 2] = 0.0


def detected_table(
    state: TwoQubitDensity | TwoQubitPureState,
    params: BasisParams,
    eff: EfficiencySet,
    noise: NoiseParams = NOISELESS,
) -> np.ndarray:
    rho = as_density(state)
    if noise.mode == NoiseMode.StateMixture:
        if noise.p_b > 0.0:
            rho = rho.mixed_with_white_noise(noise.p_b)
        return _kernels.detect_cells(ideal_table(rho, params), eff.left(), eff.right())
    table = _kernels.detect_cells(ideal_table(rho, params), eff.left(), eff.right())
    if noise.p_b > 0.0:
        table = (1.0 - noise.p_b) * table + (noise.p_b / 4.0) * _BACKGROUND_MASK
    return table


def detected_joint_distribution(
    state: TwoQubitDensity | TwoQubitPureState,
    params: BasisParams,
    eff: EfficiencySet,
    noise: NoiseParams = NOISELESS,
) -> JointDistribution:
    """Joint outcome probabilities including NoClick events and background noise.

    Detection succeeds independently on each side with the efficiency of
    that side and setting. In ``CountLevel`` mode the state contribution is
    scaled by ``1 - p_b`` and ``p_b/4`` is added to every cell that has at
    least one click; the per-pair totals are then no longer one. In
    ``StateMixture`` mode the white-noise mixture is formed before the
    efficiencies are applied.
    """
    table = detected_table(state, params, eff, noise)
    normalized = noise.mode == NoiseMode.StateMixture or noise.p_b == 0.0
    return JointDistribution(
        np.clip(table, 0.0, 1.0),
        noise_mode=noise.mode,
        efficiencies=eff,
        p_b=noise.p_b,
        normalized=normalized,
    )
