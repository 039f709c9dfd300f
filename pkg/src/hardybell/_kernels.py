"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``HARDYBELL_DISABLE_JIT`` is unset or falsy. Both paths produce
bit-identical results; ``tests/test_kernels.py`` checks this.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

_FALSY = {"", "0", "false", "no", "off"}


def _jit_requested() -> bool:
    return os.environ.get("HARDYBELL_DISABLE_JIT", "").strip().lower() in _FALSY


try:
    import numba as nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional at runtime
    nb = None
    HAVE_NUMBA = False

JIT_ENABLED = HAVE_NUMBA and _jit_requested()


# ---------------------------------------------------------------------------
# detection model: ideal (2,2,2,2) table -> detected (2,2,3,3) table
# ---------------------------------------------------------------------------


def detect_cells_numpy(ideal: np.ndarray, eta_l: np.ndarray, eta_r: np.ndarray) -> np.ndarray:
    """Apply independent per-side detection to an ideal outcome table.

    ``ideal[sL, sR, oL, oR]`` holds detection-free probabilities with
    outcomes in {Plus, Minus}. The result adds a third NoClick outcome
    (index 2) on each side.
    """
    el = eta_l[:, None, None, None]
    er = eta_r[None, :, None, None]
    out = np.empty((2, 2, 3, 3), dtype=np.float64)
    out[:, :, :2, :2] = ideal * el * er
    marg_l = ideal.sum(axis=3)
    marg_r = ideal.sum(axis=2)
    out[:, :, :2, 2] = marg_l * eta_l[:, None, None] * (1.0 - eta_r)[None, :, None]
    out[:, :, 2, :2] = marg_r * (1.0 - eta_l)[:, None, None] * eta_r[None, :, None]
    total = marg_l[:, :, 0] + marg_l[:, :, 1]
    out[:, :, 2, 2] = total * np.outer(1.0 - eta_l, 1.0 - eta_r)
    return out


def tally_trials_numpy(
    u_pair: np.ndarray, u_out: np.ndarray, cum_pair: np.ndarray, cum_out: np.ndarray
) -> np.ndarray:
    """Inverse-CDF sample a setting pair, then an outcome cell; return counts (4, 9)."""
    pair = np.searchsorted(cum_pair, u_pair, side="right")
    np.minimum(pair, cum_pair.size - 1, out=pair)
    counts = np.zeros((4, 9), dtype=np.int64)
    for k in range(4):
        sel = pair == k
        if not sel.any():
            continue
        cell = np.searchsorted(cum_out[k], u_out[sel], side="right")
        np.minimum(cell, cum_out.shape[1] - 1, out=cell)
        counts[k] = np.bincount(cell, minlength=cum_out.shape[1])
    return counts


if HAVE_NUMBA:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")

        @nb.njit(cache=True, nogil=True)
        def detect_cells_jit(ideal, eta_l, eta_r):
            out = np.empty((2, 2, 3, 3), dtype=np.float64)
            for sl in range(2):
                for sr in range(2):
                    el = eta_l[sl]
                    er = eta_r[sr]
                    tot = 0.0
                    for ol in range(2):
                        ml = 0.0
                        for orr in range(2):
                            p = ideal[sl, sr, ol, orr]
                            out[sl, sr, ol, orr] = p * el * er
                            ml += p
                        out[sl, sr, ol, 2] = ml * el * (1.0 - er)
                        tot += ml
                    for orr in range(2):
                        mr = ideal[sl, sr, 0, orr] + ideal[sl, sr, 1, orr]
                        out[sl, sr, 2, orr] = mr * (1.0 - el) * er
                    out[sl, sr, 2, 2] = tot * ((1.0 - el) * (1.0 - er))
            return out

        @nb.njit(cache=True, nogil=True)
        def tally_trials_jit(u_pair, u_out, cum_pair, cum_out):
            n_pair = cum_pair.shape[0]
            n_cell = cum_out.shape[1]
            counts = np.zeros((n_pair, n_cell), dtype=np.int64)
            for t in range(u_pair.shape[0]):
                u = u_pair[t]
                k = 0
                while k < n_pair - 1 and u >= cum_pair[k]:
                    k += 1
                v = u_out[t]
                c = 0
                while c < n_cell - 1 and v >= cum_out[k, c]:
                    c += 1
                counts[k, c] += 1
            return counts

else:  # pragma: no cover
    detect_cells_jit = detect_cells_numpy
    tally_trials_jit = tally_trials_numpy


if JIT_ENABLED:
    detect_cells = detect_cells_jit
    tally_trials = tally_trials_jit
else:
    detect_cells = detect_cells_numpy
    tally_trials = tally_trials_numpy


def backend_name() -> str:
    return "numba" if JIT_ENABLED else "numpy"
