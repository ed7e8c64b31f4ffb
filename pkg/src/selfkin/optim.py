"""Adam with bias correction and a log-linear learning-rate schedule.

Defaults follow the training setup this head was tuned with: beta1 0.9,
beta2 0.999, epsilon 1e-8, decay 0.0, learning rate sliding from 1e-4 down
to 1e-5 over the epochs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SelfKinError
from .model import Gradients, ModelParams


@dataclass
class AdamHyper:
    lr_start: float = 1e-4
    lr_end: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    decay: float = 0.0

    def validate(self) -> None:
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise SelfKinError("invalid-hyper", "betas must be in [0, 1)")
        if self.epsilon <= 0.0 or not (self.lr_start >= self.lr_end > 0.0):
            raise SelfKinError("invalid-hyper", "need epsilon > 0 and lr_start >= lr_end > 0")


@dataclass
class AdamState:
    """First/second moment accumulators mirroring ModelParams shapes."""

    m_mask: np.ndarray
    v_mask: np.ndarray
    m_local: np.ndarray
    v_local: np.ndarray
    m_global: np.ndarray
    v_global: np.ndarray
    t: int = field(default=0)

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "AdamState":
        return cls(np.zeros_like(params.w_mask), np.zeros_like(params.w_mask),
                   np.zeros_like(params.w_local), np.zeros_like(params.w_local),
                   np.zeros_like(params.w_global), np.zeros_like(params.w_global))


def _update(w, g, m, v, hyper: AdamHyper, lr_eff: float, t: int) -> None:
    m *= hyper.beta1
    m += (1.0 - hyper.beta1) * g
    v *= hyper.beta2
    v += (1.0 - hyper.beta2) * (g * g)
    m_hat = m / (1.0 - hyper.beta1 ** t)
    v_hat = v / (1.0 - hyper.beta2 ** t)
    w -= lr_eff * m_hat / (np.sqrt(v_hat) + hyper.epsilon)


def adam_step(params: ModelParams, grads: Gradients, state: AdamState,
              hyper: AdamHyper, lr_now: float,
              skip_mask: bool = False) -> tuple[ModelParams, AdamState]:
    """One in-place Adam update; ``skip_mask`` freezes the mask group."""
    if lr_now <= 0.0:
        raise SelfKinError("invalid-hyper", f"lr_now={lr_now}")
    if grads.g_mask.shape != params.w_mask.shape or \
            grads.g_local.shape != params.w_local.shape or \
            grads.g_global.shape != params.w_global.shape:
        raise SelfKinError("shape-mismatch", "gradient shapes do not mirror params")
    state.t += 1
    lr_eff = lr_now / (1.0 + hyper.decay * (state.t - 1))
    if not skip_mask:
        _update(params.w_mask, grads.g_mask, state.m_mask, state.v_mask,
                hyper, lr_eff, state.t)
    _update(params.w_local, grads.g_local, state.m_local, state.v_local,
            hyper, lr_eff, state.t)
    _update(params.w_global, grads.g_global, state.m_global, state.v_global,
            hyper, lr_eff, state.t)
    return params, state


def lr_schedule(epoch: int, total_epochs: int, hyper: AdamHyper) -> float:
    """Log-linear from lr_start (epoch 0) to lr_end (last epoch)."""
    if total_epochs <= 1:
        return hyper.lr_start
    frac = epoch / (total_epochs - 1)
    return 10.0 ** (math.log10(hyper.lr_start) +
                    frac * (math.log10(hyper.lr_end) - math.log10(hyper.lr_start)))
