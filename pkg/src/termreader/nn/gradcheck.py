"""Central finite-difference verification of backpropagated gradients."""

from __future__ import annotations

import numpy as np


def gradient_check(forward, store, eps=1e-5, rel_floor=1e-6):
    """Compare analytic gradients against central finite differences.

    ``forward`` must rebuild the loss from the store's current values
    and be deterministic; it is re-run with each parameter entry nudged
    by +/- eps.  Returns {name: max elementwise error}, where the error
    is relative whenever either side is meaningfully nonzero.  Run this
    at float64 only; float32 rounding swamps the eps used here.
    """
    first = float(forward().data)
    second = float(forward().data)
    if first != second:
        raise RuntimeError("non-deterministic forward pass: two runs differ")

    store.zero_grads()
    loss = forward()
    loss.backward()
    analytic = {}
    for name, p in store.trainable():
        analytic[name] = (p.grad.copy() if p.grad is not None
                          else np.zeros_like(p.data))
    store.zero_grads()

    report = {}
    for name, p in store.trainable():
        flat = p.data.reshape(-1)
        ana = analytic[name].reshape(-1)
        worst = 0.0
        for i in range(flat.size):
            saved = flat[i]
            flat[i] = saved + eps
            up = float(forward().data)
            flat[i] = saved - eps
            down = float(forward().data)
            flat[i] = saved
            numeric = (up - down) / (2.0 * eps)
            denom = max(abs(ana[i]), abs(numeric))
            diff = abs(ana[i] - numeric)
            worst = max(worst, diff if denom < rel_floor else diff / denom)
        report[name] = worst
    return report
