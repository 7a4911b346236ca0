"""Pure numpy versions of the compiled kernels.

Accumulation order matches ``_ckernels`` so both backends give bit-identical
results on the same inputs.
"""

import numpy as np


def gp(l, r, sign, index):
    w = (sign * np.outer(l, r)).ravel()
    return np.bincount(index.ravel(), weights=w, minlength=8).astype(np.float64)


def gp_batch(L, R, sign, index):
    L = np.asarray(L, dtype=np.float64)
    R = np.asarray(R, dtype=np.float64)
    if L.shape[0] != R.shape[0]:
        raise ValueError("batch sizes differ")
    out = np.zeros((L.shape[0], 8))
    for i in range(8):
        li = L[:, i]
        for j in range(8):
            out[:, index[i, j]] += sign[i, j] * li * R[:, j]
    return out


def _tie_sign(nx, ny, nz):
    for c in (nx, ny, nz):
        if c != 0.0:
            return 1 if c > 0.0 else -1
    return 0


def party_outcomes(lams, nx, ny, nz, flip):
    lams = np.asarray(lams, dtype=np.float64)
    d = lams[:, 0] * nx + lams[:, 1] * ny + lams[:, 2] * nz
    out = np.sign(d).astype(np.int8)
    out[d == 0.0] = _tie_sign(nx, ny, nz)
    if flip:
        np.negative(out, out=out)
    return out


def chsh_grid_max(M):
    """Max |M[i,j] + M[i,l] + M[k,j] - M[k,l]| over (i, k, j, l), first hit wins."""
    M = np.asarray(M, dtype=np.float64)
    R = M.shape[0]
    best = -1.0
    arg = (0, 0, 0, 0)
    for i in range(R):
        s = np.abs(((M[i, :, None] + M[i, None, :])[None, :, :] + M[:, :, None]) - M[:, None, :])
        flat = int(np.argmax(s))
        v = float(s.flat[flat])
        if v > best:
            best = v
            k, j, l = np.unravel_index(flat, s.shape)
            arg = (i, int(k), int(j), int(l))
    return best, arg
