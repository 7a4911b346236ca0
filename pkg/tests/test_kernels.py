import importlib

import numpy as np
import pytest

from cliffbell import _pykernels, kernels
from cliffbell.ga_core import DEFAULT_TABLE

try:
    _ck = importlib.import_module("cliffbell._ckernels")
except ImportError:  # extension not built
    _ck = None

needs_ext = pytest.mark.skipif(_ck is None, reason="compiled kernels not built")
SIGN, INDEX = DEFAULT_TABLE.sign, DEFAULT_TABLE.index


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_pure_python_env_var_forces_fallback(monkeypatch):
    monkeypatch.setenv("CLIFFBELL_PURE_PYTHON", "1")
    try:
        mod = importlib.reload(kernels)
        assert mod.BACKEND == "python"
        assert mod.gp is _pykernels.gp
    finally:
        monkeypatch.delenv("CLIFFBELL_PURE_PYTHON")
        importlib.reload(kernels)


@needs_ext
def test_gp_backends_bit_identical(rng):
    for _ in range(200):
        l, r = rng.uniform(-1, 1, 8), rng.uniform(-1, 1, 8)
        assert np.array_equal(_ck.gp(l, r, SIGN, INDEX), _pykernels.gp(l, r, SIGN, INDEX))


@needs_ext
def test_gp_batch_backends_agree(rng):
    L, R = rng.uniform(-1, 1, (500, 8)), rng.uniform(-1, 1, (500, 8))
    np.testing.assert_array_equal(_ck.gp_batch(L, R, SIGN, INDEX), _pykernels.gp_batch(L, R, SIGN, INDEX))
    np.testing.assert_allclose(_pykernels.gp_batch(L, R, SIGN, INDEX)[7], _pykernels.gp(L[7], R[7], SIGN, INDEX), atol=1e-15)


def test_gp_batch_rejects_mismatched_sizes():
    with pytest.raises(ValueError):
        _pykernels.gp_batch(np.zeros((2, 8)), np.zeros((3, 8)), SIGN, INDEX)


@needs_ext
def test_party_outcomes_backends_agree(rng):
    lams = rng.normal(size=(10_000, 3))
    lams[:5] = [[0, 1, 0], [0, 0, 1], [0, -1, 0], [0, 0, -1], [0, 1, 1]]
    for n in [(1.0, 0.0, 0.0), (0.0, 0.6, 0.8), (0.0, 0.0, -1.0), (0.3, -0.4, 0.5)]:
        for flip in (False, True):
            a = _ck.party_outcomes(lams, *n, flip)
            b = _pykernels.party_outcomes(lams, *n, flip)
            np.testing.assert_array_equal(a, b)
            assert a.dtype == np.int8


def test_party_outcomes_tie_break():
    lams = np.array([[1.0, 0.0, 0.0]])
    # lambda . n == 0 -> sign of the first nonzero component of n (n_y here)
    assert _pykernels.party_outcomes(lams, 0.0, 0.6, 0.8, False)[0] == 1
    assert _pykernels.party_outcomes(lams, 0.0, -0.6, 0.8, False)[0] == -1
    assert _pykernels.party_outcomes(lams, 0.0, -0.6, 0.8, True)[0] == 1


def _grid_max_brute(M):
    R = M.shape[0]
    best, arg = -1.0, None
    for i in range(R):
        for k in range(R):
            for j in range(R):
                for l in range(R):
                    s = abs(((M[i, j] + M[i, l]) + M[k, j]) - M[k, l])
                    if s > best:
                        best, arg = s, (i, k, j, l)
    return best, arg


@pytest.mark.parametrize("impl", ["python", pytest.param("cython", marks=needs_ext)])
def test_chsh_grid_max_matches_brute_force(impl, rng):
    mod = _pykernels if impl == "python" else _ck
    M = np.ascontiguousarray(rng.uniform(-1, 1, (7, 7)))
    assert mod.chsh_grid_max(M) == _grid_max_brute(M)
