"""Single-layer LSTM and BiLSTM kernels.

The whole sequence runs as one taped operation with a hand-written
backward pass: per-timestep graph nodes would dominate runtime for no
benefit.  Gate order in the packed weight matrices is input, forget,
cell, output.  The initial hidden and cell states are zero and output
rows at or beyond the valid length stay zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import Tensor, _make, _sigmoid


@dataclass
class BiLSTMWeights:
    """Packed weights for both directions: W (d_in x 4h), R (h x 4h), b (4h,)."""
    wf: Tensor
    rf: Tensor
    bf: Tensor
    wb: Tensor
    rb: Tensor
    bb: Tensor

    @property
    def hidden(self):
        return self.rf.data.shape[0]

    def tensors(self):
        return (self.wf, self.rf, self.bf, self.wb, self.rb, self.bb)


def _run_direction(x, w, r, b, steps):
    h_dim = r.shape[0]
    big = np.zeros((x.shape[0], h_dim), dtype=x.dtype)
    h = np.zeros(h_dim, dtype=x.dtype)
    c = np.zeros(h_dim, dtype=x.dtype)
    cache = []
    for t in steps:
        a = x[t] @ w + h @ r + b
        i = _sigmoid(a[:h_dim])
        f = _sigmoid(a[h_dim:2 * h_dim])
        g = np.tanh(a[2 * h_dim:3 * h_dim])
        o = _sigmoid(a[3 * h_dim:])
        c_prev, h_prev = c, h
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        big[t] = h
        cache.append((t, h_prev, c_prev, i, f, g, o, tc))
    return big, cache


def _back_direction(x, w, r, cache, d_big, dx, dw, dr, db):
    h_dim = r.shape[0]
    dh_next = np.zeros(h_dim, dtype=x.dtype)
    dc_next = np.zeros(h_dim, dtype=x.dtype)
    da = np.empty(4 * h_dim, dtype=x.dtype)
    for t, h_prev, c_prev, i, f, g, o, tc in reversed(cache):
        dh = d_big[t] + dh_next
        do = dh * tc
        dc = dh * o * (1.0 - tc * tc) + dc_next
        di = dc * g
        df = dc * c_prev
        dg = dc * i
        dc_next = dc * f
        da[:h_dim] = di * i * (1.0 - i)
        da[h_dim:2 * h_dim] = df * f * (1.0 - f)
        da[2 * h_dim:3 * h_dim] = dg * (1.0 - g * g)
        da[3 * h_dim:] = do * o * (1.0 - o)
        if dw is not None:
            dw += np.outer(x[t], da)
            dr += np.outer(h_prev, da)
            db += da
        if dx is not None:
            dx[t] += da @ w.T
        dh_next = da @ r.T


def bilstm_forward(x, weights, length=None):
    """Run both directions over a (T, d_in) sequence; returns (T, 2h).

    ``length`` limits the pass to the first rows; the rest of the output
    is zero and receives no gradient.  Reversing the input sequence
    exchanges the roles of the two directions.
    """
    t_total = x.data.shape[0]
    n = t_total if length is None else int(length)
    if n < 1:
        raise ValueError("bilstm_forward: zero-length sequence")
    if n > t_total:
        raise ValueError("bilstm_forward: length exceeds sequence size")
    wf, rf, bf, wb, rb, bb = (w.data for w in weights.tensors())
    h_fwd, cache_f = _run_direction(x.data, wf, rf, bf, range(n))
    h_bwd, cache_b = _run_direction(x.data, wb, rb, bb, range(n - 1, -1, -1))
    out = _make(np.concatenate([h_fwd, h_bwd], axis=1), (x,) + weights.tensors())
    if out.requires_grad:
        h_dim = weights.hidden

        def bw():
            g = out.grad
            need_x = x.requires_grad
            dx = np.zeros_like(x.data) if need_x else None
            for w_t, r_t, b_t, cache, half in (
                (weights.wf, weights.rf, weights.bf, cache_f, g[:, :h_dim]),
                (weights.wb, weights.rb, weights.bb, cache_b, g[:, h_dim:]),
            ):
                if w_t.requires_grad:
                    dw = np.zeros_like(w_t.data)
                    dr = np.zeros_like(r_t.data)
                    db = np.zeros_like(b_t.data)
                else:
                    dw = dr = db = None
                _back_direction(x.data, w_t.data, r_t.data, cache, half,
                                dx, dw, dr, db)
                if dw is not None:
                    w_t.accumulate(dw)
                    r_t.accumulate(dr)
                    b_t.accumulate(db)
            if need_x:
                x.accumulate(dx)

        out._backward = bw
    return out
