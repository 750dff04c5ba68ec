"""Adamax: Adam with an infinity-norm second moment.

Per step, with gradient g and bias correction on the first moment only:

    t <- t + 1
    m <- beta1 * m + (1 - beta1) * g
    u <- max(beta2 * u, |g|)
    theta <- theta - (lr / (1 - beta1^t)) * m / (u + eps)

Gradients are consumed by the step: every trainable parameter must have
one, and all grads are cleared afterwards.
"""

from __future__ import annotations

import numpy as np


class Adamax:
    def __init__(self, store, lr=0.02, beta1=0.9, beta2=0.999, eps=1e-8):
        self.store = store
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {n: np.zeros_like(p.data) for n, p in store.trainable()}
        self.u = {n: np.zeros_like(p.data) for n, p in store.trainable()}

    def step(self):
        self.t += 1
        correction = 1.0 - self.beta1 ** self.t
        for name, p in self.store.trainable():
            if p.grad is None:
                raise RuntimeError(f"missing gradient for parameter '{name}'")
            g = p.grad
            if not np.all(np.isfinite(g)):
                raise FloatingPointError(f"non-finite gradient for parameter '{name}'")
            m = self.m[name]
            u = self.u[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            np.maximum(self.beta2 * u, np.abs(g), out=u)
            p.data -= (self.lr / correction) * m / (u + self.eps)
        self.store.zero_grads()
