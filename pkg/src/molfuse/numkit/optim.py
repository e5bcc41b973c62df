"""Adam with coupled L2 weight decay, and a reduce-on-plateau LR schedule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from molfuse.errors import NumericError, ShapeError
from molfuse.numkit.tensor import Tensor


@dataclass
class AdamState:
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(params: dict[str, Tensor], grads: dict[str, np.ndarray],
              state: AdamState,
              param_lrs: dict[str, float] | None = None) -> None:
    """One Adam update, in place on `params` data.

    Weight decay is classic coupled L2: folded into the gradient before the
    moment updates. With lr == 0 the parameters are left untouched.
    `param_lrs` overrides the learning rate for the named parameters only
    (a per-parameter-group rate, e.g. a faster rate for scalar gates).
    """
    state.step += 1
    t = state.step
    bc1 = 1.0 - state.beta1 ** t
    bc2 = 1.0 - state.beta2 ** t
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            continue
        g = np.asarray(g, dtype=np.float64)
        if g.shape != p.data.shape:
            raise ShapeError(f"grad shape {g.shape} != param shape {p.data.shape} for '{name}'")
        if np.isnan(g).any():
            raise NumericError(f"NaN gradient for parameter '{name}'")
        if state.weight_decay:
            g = g + state.weight_decay * p.data
        m = state.m.get(name)
        if m is None:
            m = np.zeros_like(p.data)
            state.m[name] = m
            state.v[name] = np.zeros_like(p.data)
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        update = (m / bc1) / (np.sqrt(v / bc2) + state.eps)
        lr = state.lr if param_lrs is None else param_lrs.get(name, state.lr)
        p.data = p.data - lr * update


class PlateauScheduler:
    """Halve the learning rate after `patience` consecutive non-improving steps.

    Improvement is strict (mode 'min': metric < best; mode 'max': metric > best).
    The counter resets both on improvement and after each reduction.
    """

    def __init__(self, lr: float, factor: float = 0.5, patience: int = 5,
                 mode: str = "min"):
        if mode not in ("min", "max"):
            raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
        self.lr = lr
        self.factor = factor
        self.patience = patience
        self.mode = mode
        self.best_metric = None
        self.epochs_since_improve = 0

    def _improved(self, metric: float) -> bool:
        if self.best_metric is None:
            return True
        if self.mode == "min":
            return metric < self.best_metric
        return metric > self.best_metric

    def step(self, metric: float) -> float:
        """Record one epoch's metric; return the (possibly reduced) LR."""
        if self._improved(metric):
            self.best_metric = metric
            self.epochs_since_improve = 0
        else:
            self.epochs_since_improve += 1
            if self.epochs_since_improve >= self.patience:
                self.lr *= self.factor
                self.epochs_since_improve = 0
        return self.lr
