"""The verification head: parameters, forward pass, loss, analytic backward.

Architecture, per pair of descriptor vectors (x1, x2) of length n:

  x_masked,i  = w_mask * x_i                      (mask shared across images)
  local_j     = relu(w_local[j,0]*x_masked,1 + w_local[j,1]*x_masked,2)
  (training)    dropout with inverted 1/keep scaling between local and global
  global_j    = relu(W_global[j] @ local_j)       (h outputs per class branch)
  logit_j     = mean(global_j)
  probs       = softmax2(logit_kin, logit_nonkin)

Class branches are independent: index 0 = kin, 1 = non-kin. No layer carries
a bias, which is what makes mask-zeroed features exactly removable.

Loss = cross-entropy + lambda_cls * (sum w_local^2 + sum w_global^2)
     + (lambda_mask / n) * sum |w_mask|.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backend
from .errors import SelfKinError
from .numerics import Rng

KIN = 1
NONKIN = 0

PROB_CLIP = 1e-12


@dataclass
class ModelParams:
    """All trainable weights. w_local[class][image] and w_global[class] rows."""

    n_features: int
    n_hidden: int
    w_mask: np.ndarray      # (n,)
    w_local: np.ndarray     # (2, 2, n)
    w_global: np.ndarray    # (2, h, n)

    def copy(self) -> "ModelParams":
        return ModelParams(self.n_features, self.n_hidden, self.w_mask.copy(),
                           self.w_local.copy(), self.w_global.copy())


@dataclass
class ForwardCache:
    """Intermediates of one pair's forward pass, kept for backward."""

    x_features: np.ndarray      # (2, n) by image
    x_masked: np.ndarray        # (2, n) by image
    local_preact: np.ndarray    # (2, n) by class
    x_local: np.ndarray         # (2, n) by class
    global_preact: np.ndarray   # (2, h) by class
    x_global: np.ndarray        # (2, h) by class
    x_globavg: np.ndarray       # (2,)
    probs: tuple[float, float]
    dropout_mask: Optional[np.ndarray] = None   # (n,) of {0, 1/keep}, or None


@dataclass
class Gradients:
    g_mask: np.ndarray      # (n,)
    g_local: np.ndarray     # (2, 2, n)
    g_global: np.ndarray    # (2, h, n)


@dataclass
class LossBreakdown:
    soft: float
    reg_classifier: float
    reg_mask: float
    total: float


def one_hot(label: int) -> tuple[float, float]:
    """(y_kin, y_nonkin) for label 1 = kin, 0 = non-kin."""
    return (1.0, 0.0) if label == KIN else (0.0, 1.0)


def init_params(n_features: int, n_hidden: int, rng: Rng) -> ModelParams:
    """Mask starts at all-ones; classifier weights uniform in +-1/sqrt(fan_in)."""
    if n_features < 1 or n_hidden < 1:
        raise SelfKinError("invalid-shape", f"n_features={n_features} n_hidden={n_hidden}")
    w_mask = np.ones(n_features)
    s_local = 1.0 / math.sqrt(2.0)          # each local unit sees two inputs
    w_local = rng.uniform_array(2 * 2 * n_features, -s_local, s_local).reshape(2, 2, n_features)
    s_global = 1.0 / math.sqrt(n_features)
    w_global = rng.uniform_array(2 * n_hidden * n_features, -s_global, s_global).reshape(2, n_hidden, n_features)
    return ModelParams(n_features, n_hidden, w_mask, w_local, w_global)


def forward(params: ModelParams, x1: np.ndarray, x2: np.ndarray,
            dropout_rate: float = 0.0, rng: Optional[Rng] = None,
            training: bool = False) -> ForwardCache:
    n = params.n_features
    if x1.shape != (n,) or x2.shape != (n,):
        raise SelfKinError("shape-mismatch", f"inputs {x1.shape}/{x2.shape}, model n={n}")
    if not 0.0 <= dropout_rate < 1.0:
        raise SelfKinError("invalid-dropout", f"dropout_rate={dropout_rate}")

    drop = None
    if training and dropout_rate > 0.0:
        if rng is None:
            raise SelfKinError("rng-required", "training-mode dropout needs an rng")
        keep = 1.0 - dropout_rate
        drop = np.where(rng.uniform_array(n) >= dropout_rate, 1.0 / keep, 0.0)

    drop_arg = drop if drop is not None else np.ones(n)
    x_masked, local_pre, x_local, glob_pre, x_glob, avg, probs = backend.forward_pair(
        params.w_mask, params.w_local, params.w_global, x1, x2, drop_arg)
    x_features = np.stack((x1, x2))
    return ForwardCache(x_features, x_masked, local_pre, x_local, glob_pre,
                        x_glob, avg, (float(probs[0]), float(probs[1])), drop)


def loss_total(params: ModelParams, cache: ForwardCache, label: int,
               lambda_cls: float, lambda_mask: float) -> LossBreakdown:
    y1, y2 = one_hot(label)
    p1 = min(max(cache.probs[0], PROB_CLIP), 1.0 - PROB_CLIP)
    p2 = min(max(cache.probs[1], PROB_CLIP), 1.0 - PROB_CLIP)
    soft = -(y1 * math.log(p1) + y2 * math.log(p2))
    reg_classifier = lambda_cls * (float(np.sum(params.w_local ** 2)) +
                                   float(np.sum(params.w_global ** 2)))
    reg_mask = (lambda_mask / params.n_features) * float(np.sum(np.abs(params.w_mask)))
    return LossBreakdown(soft, reg_classifier, reg_mask,
                         soft + reg_classifier + reg_mask)


def backward(params: ModelParams, cache: ForwardCache, label: int,
             lambda_cls: float, lambda_mask: float) -> Gradients:
    """Analytic gradient of the total loss for all five parameter groups."""
    n, h = params.n_features, params.n_hidden
    if cache.x_masked.shape != (2, n) or cache.global_preact.shape != (2, h):
        raise SelfKinError("stale-cache", "cache shapes do not match params")

    y = one_hot(label)
    dz = np.array([cache.probs[0] - y[0], cache.probs[1] - y[1]])
    drop = cache.dropout_mask if cache.dropout_mask is not None else np.ones(n)
    g_mask, g_local, g_global = backend.backward_pair(
        params.w_local, params.w_global, cache.x_features[0], cache.x_features[1],
        cache.x_masked, cache.local_preact, cache.x_local, cache.global_preact,
        drop, dz)
    g_local += 2.0 * lambda_cls * params.w_local
    g_global += 2.0 * lambda_cls * params.w_global
    g_mask += (lambda_mask / n) * np.sign(params.w_mask)
    return Gradients(g_mask, g_local, g_global)


_CLASS_KEYS = ("kin", "nonkin")


def model_to_dict(params: ModelParams, hyper: Optional[dict] = None,
                  relation: Optional[str] = None,
                  kept_indices: Optional[list[int]] = None,
                  pruned_from: Optional[int] = None) -> dict:
    doc = {
        "format": "selfkin-model",
        "version": 1,
        "n_features": params.n_features,
        "n_hidden": params.n_hidden,
        "relation": relation,
        "hyper": dict(hyper) if hyper else {},
        "w_mask": params.w_mask.tolist(),
        "w_local": {k: params.w_local[j].tolist() for j, k in enumerate(_CLASS_KEYS)},
        "w_global": {k: params.w_global[j].tolist() for j, k in enumerate(_CLASS_KEYS)},
    }
    if kept_indices is not None:
        doc["kept_indices"] = list(kept_indices)
        doc["pruned_from"] = pruned_from
    return doc


def save_model(params: ModelParams, path, **meta) -> None:
    """JSON checkpoint; float repr round-trips every finite f64 exactly."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model_to_dict(params, **meta), f)
        f.write("\n")


def load_model(path) -> tuple[ModelParams, dict]:
    """Returns (params, meta); meta holds hyper/relation/kept_indices/pruned_from."""
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("format") != "selfkin-model" or doc.get("version") != 1:
        raise SelfKinError("not-a-model-file", str(path))
    n, h = doc["n_features"], doc["n_hidden"]
    w_mask = np.array(doc["w_mask"], dtype=np.float64)
    w_local = np.array([doc["w_local"][k] for k in _CLASS_KEYS], dtype=np.float64)
    w_global = np.array([doc["w_global"][k] for k in _CLASS_KEYS], dtype=np.float64)
    if w_mask.shape != (n,) or w_local.shape != (2, 2, n) or w_global.shape != (2, h, n):
        raise SelfKinError("corrupt-file", f"checkpoint shapes inconsistent in {path}")
    params = ModelParams(n, h, w_mask, w_local, w_global)
    meta = {"hyper": doc.get("hyper", {}), "relation": doc.get("relation")}
    if "kept_indices" in doc:
        meta["kept_indices"] = doc["kept_indices"]
        meta["pruned_from"] = doc.get("pruned_from")
    return params, meta
