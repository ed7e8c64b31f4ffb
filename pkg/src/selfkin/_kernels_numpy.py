"""Pure-numpy implementations of the per-pair hot kernels.

Array conventions shared with the numba twin in ``_kernels_numba``:
``x_masked`` is indexed by image (2, n); ``local_pre``/``x_local`` (2, n) and
``glob_pre``/``x_glob`` (2, h) by class branch, 0 = kin, 1 = non-kin.
``drop`` holds {0, 1/keep} scaling factors (all ones when dropout is off).
"""

import numpy as np


def forward_pair(w_mask, w_local, w_global, x1, x2, drop):
    x_masked = np.empty((2, x1.shape[0]))
    x_masked[0] = w_mask * x1
    x_masked[1] = w_mask * x2
    local_pre = w_local[:, 0, :] * x_masked[0] + w_local[:, 1, :] * x_masked[1]
    x_local = np.maximum(local_pre, 0.0)
    x_drop = x_local * drop
    h = w_global.shape[1]
    glob_pre = np.empty((2, h))
    glob_pre[0] = w_global[0] @ x_drop[0]
    glob_pre[1] = w_global[1] @ x_drop[1]
    x_glob = np.maximum(glob_pre, 0.0)
    avg = np.array([x_glob[0].mean(), x_glob[1].mean()])
    m = avg.max()
    e = np.exp(avg - m)
    probs = e / e.sum()
    return x_masked, local_pre, x_local, glob_pre, x_glob, avg, probs


def backward_pair(w_local, w_global, x1, x2, x_masked, local_pre, x_local,
                  glob_pre, drop, dz):
    h = glob_pre.shape[1]
    x_drop = x_local * drop
    # averaging spreads 1/h; ReLU gates are open only on positive preactivation
    dglob_pre = (dz / h)[:, None] * (glob_pre > 0.0)
    g_global = dglob_pre[:, :, None] * x_drop[:, None, :]
    dx_drop = np.empty_like(x_local)
    dx_drop[0] = w_global[0].T @ dglob_pre[0]
    dx_drop[1] = w_global[1].T @ dglob_pre[1]
    dlocal_pre = dx_drop * drop * (local_pre > 0.0)
    g_local = np.empty_like(w_local)
    g_local[:, 0, :] = dlocal_pre * x_masked[0]
    g_local[:, 1, :] = dlocal_pre * x_masked[1]
    dxm0 = dlocal_pre[0] * w_local[0, 0] + dlocal_pre[1] * w_local[1, 0]
    dxm1 = dlocal_pre[0] * w_local[0, 1] + dlocal_pre[1] * w_local[1, 1]
    g_mask = dxm0 * x1 + dxm1 * x2
    return g_mask, g_local, g_global
