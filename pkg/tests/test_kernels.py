import os
import subprocess
import sys

import numpy as np
import pytest

from gaussmetro import _kernels

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable")


def random_case(rng, n):
    m = 2 * n
    A = rng.standard_normal((m, m))
    A = A + A.T
    l = rng.standard_normal(m)
    d = rng.standard_normal(m)
    S = rng.standard_normal((m, m))
    gamma = S @ S.T + np.eye(m)
    return rng.standard_normal(), l, A, d, gamma


@needs_numba
@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_quadratic_kernels_agree(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        c, l, A, d, gamma = random_case(rng, n)
        assert _kernels.numba_quadratic_mean(c, l, A, d, gamma) == pytest.approx(
            _kernels.numpy_quadratic_mean(c, l, A, d, gamma), rel=1e-12, abs=1e-12)
        assert _kernels.numba_quadratic_variance(l, A, d, gamma) == pytest.approx(
            _kernels.numpy_quadratic_variance(l, A, d, gamma), rel=1e-12, abs=1e-12)


@needs_numba
def test_pair_sum_kernels_agree():
    rng = np.random.default_rng(7)
    lam = np.concatenate([rng.random(20), np.zeros(5)])
    B = rng.standard_normal((25, 25)) + 1j * rng.standard_normal((25, 25))
    B = B + B.conj().T
    assert _kernels.numba_qfi_pair_sum(lam, B, 1e-12) == pytest.approx(
        _kernels.numpy_qfi_pair_sum(lam, B, 1e-12), rel=1e-12)


def test_commutator_correction():
    # x p + p x = -i (b^2 - b^dag^2) has vacuum variance 2; half of it is the commutator term
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert _kernels.numpy_quadratic_variance(np.zeros(2), A, np.zeros(2), np.eye(2)) == pytest.approx(2.0)
    if _kernels.HAVE_NUMBA:
        assert _kernels.numba_quadratic_variance(np.zeros(2), A, np.zeros(2), np.eye(2)) == pytest.approx(2.0)


def test_env_flag_forces_numpy():
    env = dict(os.environ, GAUSSMETRO_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from gaussmetro import _kernels; print(_kernels.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
