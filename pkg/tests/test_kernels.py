import os
import subprocess
import sys

import numpy as np
import pytest

from hardybell import _kernels

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def _random_ideal(rng):
    t = rng.uniform(0, 1, (2, 2, 2, 2))
    return t / t.sum(axis=(2, 3), keepdims=True)


@needs_numba
def test_detect_paths_bit_identical():
    rng = np.random.default_rng(3)
    for _ in range(200):
        ideal = _random_ideal(rng)
        el, er = rng.uniform(0, 1, 2), rng.uniform(0, 1, 2)
        a = _kernels.detect_cells_numpy(ideal, el, er)
        b = _kernels.detect_cells_jit(ideal, el, er)
        assert np.array_equal(a, b)


@needs_numba
def test_tally_paths_identical():
    rng = np.random.default_rng(4)
    p = rng.uniform(0, 1, (4, 9))
    p[0, 3] = 0.0  # zero-width cell never sampled
    cum_out = np.cumsum(p / p.sum(axis=1, keepdims=True), axis=1)
    cum_out[:, -1] = 1.0
    cum_pair = np.array([0.1, 0.4, 0.7, 1.0])
    u1, u2 = rng.random(50_000), rng.random(50_000)
    a = _kernels.tally_trials_numpy(u1, u2, cum_pair, cum_out)
    b = _kernels.tally_trials_jit(u1, u2, cum_pair, cum_out)
    assert np.array_equal(a, b)
    assert a.sum() == 50_000 and a[0, 3] == 0


def test_tally_boundaries():
    cum_pair = np.array([0.25, 0.5, 0.75, 1.0])
    cum_out = np.tile(np.linspace(1 / 9, 1, 9), (4, 1))
    u = np.array([0.0, 0.25, 0.999999])
    c = _kernels.tally_trials(u, u, cum_pair, cum_out)
    assert c[0, 0] == 1 and c[1, 2] == 1 and c[3, 8] == 1


def test_env_flag_selects_numpy():
    code = "from hardybell import _kernels as k; print(k.backend_name())"
    env = dict(os.environ, HARDYBELL_DISABLE_JIT="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env["HARDYBELL_DISABLE_JIT"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == ("numba" if _kernels.HAVE_NUMBA else "numpy")
