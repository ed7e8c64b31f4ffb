"""Numba-compiled per-pair hot kernels; same contracts as ``_kernels_numpy``."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def forward_pair(w_mask, w_local, w_global, x1, x2, drop):
    n = x1.shape[0]
    h = w_global.shape[1]
    x_masked = np.empty((2, n))
    local_pre = np.empty((2, n))
    x_local = np.empty((2, n))
    glob_pre = np.empty((2, h))
    x_glob = np.empty((2, h))
    avg = np.empty(2)
    for t in range(n):
        x_masked[0, t] = w_mask[t] * x1[t]
        x_masked[1, t] = w_mask[t] * x2[t]
    for j in range(2):
        for t in range(n):
            v = w_local[j, 0, t] * x_masked[0, t] + w_local[j, 1, t] * x_masked[1, t]
            local_pre[j, t] = v
            x_local[j, t] = v if v > 0.0 else 0.0
        for k in range(h):
            s = 0.0
            for t in range(n):
                s += w_global[j, k, t] * (x_local[j, t] * drop[t])
            glob_pre[j, k] = s
            x_glob[j, k] = s if s > 0.0 else 0.0
        acc = 0.0
        for k in range(h):
            acc += x_glob[j, k]
        avg[j] = acc / h
    m = avg[0] if avg[0] > avg[1] else avg[1]
    e0 = math.exp(avg[0] - m)
    e1 = math.exp(avg[1] - m)
    s = e0 + e1
    probs = np.empty(2)
    probs[0] = e0 / s
    probs[1] = e1 / s
    return x_masked, local_pre, x_local, glob_pre, x_glob, avg, probs


@njit(cache=True)
def backward_pair(w_local, w_global, x1, x2, x_masked, local_pre, x_local,
                  glob_pre, drop, dz):
    n = x1.shape[0]
    h = glob_pre.shape[1]
    g_mask = np.zeros(n)
    g_local = np.zeros((2, 2, n))
    g_global = np.zeros((2, h, n))
    dx_drop = np.zeros((2, n))
    for j in range(2):
        for k in range(h):
            if glob_pre[j, k] > 0.0:
                d = dz[j] / h
                for t in range(n):
                    g_global[j, k, t] = d * (x_local[j, t] * drop[t])
                    dx_drop[j, t] += d * w_global[j, k, t]
    for j in range(2):
        for t in range(n):
            if local_pre[j, t] > 0.0:
                dlp = dx_drop[j, t] * drop[t]
                g_local[j, 0, t] = dlp * x_masked[0, t]
                g_local[j, 1, t] = dlp * x_masked[1, t]
                g_mask[t] += dlp * w_local[j, 0, t] * x1[t] + dlp * w_local[j, 1, t] * x2[t]
    return g_mask, g_local, g_global
