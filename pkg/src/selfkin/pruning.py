"""Mask thresholding at a quantile plus physical model compaction.

Features are ranked by |w_mask|; the bottom (1 - keep_fraction) are dropped.
Because no layer has a bias, a zeroed masked feature contributes exactly 0
through the local layer, so deleting its column everywhere is an exact
transformation of the network function — verified numerically here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SelfKinError
from .model import ModelParams, forward


@dataclass
class PruneResult:
    kept_indices: list[int]     # strictly increasing, original coordinates
    dropped_count: int
    threshold_value: float      # smallest surviving |w_mask|
    compacted: ModelParams


def threshold_mask(params: ModelParams, keep_fraction: float) -> PruneResult:
    """Keep the ceil(keep_fraction * n) largest-|w| mask entries; ties keep lower index."""
    if not 0.0 < keep_fraction <= 1.0:
        raise SelfKinError("invalid-fraction", f"keep_fraction={keep_fraction}")
    n = params.n_features
    k = math.ceil(keep_fraction * n)
    order = np.argsort(-np.abs(params.w_mask), kind="stable")
    kept = np.sort(order[:k])
    threshold_value = float(np.abs(params.w_mask[order[k - 1]]))
    compacted = ModelParams(
        n_features=k,
        n_hidden=params.n_hidden,
        w_mask=params.w_mask[kept].copy(),
        w_local=params.w_local[:, :, kept].copy(),
        w_global=params.w_global[:, :, kept].copy(),
    )
    return PruneResult([int(i) for i in kept], n - k, threshold_value, compacted)


def zero_dropped(params: ModelParams, kept_indices) -> ModelParams:
    """Original-shape copy with every dropped mask weight set to 0."""
    out = params.copy()
    mask = np.zeros(params.n_features, dtype=bool)
    mask[np.asarray(kept_indices, dtype=int)] = True
    out.w_mask[~mask] = 0.0
    return out


def verify_prune_equivalence(original: ModelParams, result: PruneResult,
                             probe_pairs, tol: float = 1e-12) -> bool:
    """Zeroed-mask forward must equal compacted forward on every probe pair."""
    kept = np.asarray(result.kept_indices, dtype=int)
    zeroed = zero_dropped(original, kept)
    for x1, x2 in probe_pairs:
        p_full = forward(zeroed, x1, x2).probs
        p_comp = forward(result.compacted, x1[kept], x2[kept]).probs
        if abs(p_full[0] - p_comp[0]) > tol or abs(p_full[1] - p_comp[1]) > tol:
            return False
    return True
