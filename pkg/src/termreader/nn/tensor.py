"""Reverse-mode automatic differentiation over numpy arrays.

A Tensor wraps an ndarray and remembers how it was produced.  Each
operation returns a fresh Tensor whose backward closure pushes gradients
into its parents; calling ``backward()`` on a scalar loss walks the
recorded graph once in reverse topological order and then frees it.
Only the operations the models actually need are provided; there is no
general broadcasting.
"""

from __future__ import annotations

import numpy as np


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_backward", "_prev")

    def __init__(self, data, requires_grad=False):
        if not isinstance(data, np.ndarray):
            data = np.asarray(data, dtype=np.float64)
        self.data = data
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._backward = None
        self._prev = ()

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    def item(self):
        return float(self.data)

    def accumulate(self, g):
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def backward(self):
        """Backpropagate from a scalar loss and free the recorded graph."""
        if self.data.size != 1:
            raise ValueError("backward requires a scalar loss")
        order = _toposort(self)
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None:
                node._backward()
        # The tape is single-use: detach intermediates so their buffers
        # can be reclaimed while leaf gradients stay in place.
        for node in order:
            if node._prev:
                node._prev = ()
                node._backward = None
                node.grad = None

    # -- elementwise arithmetic ------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, float)):
            out = _make(self.data + other, (self,))
            if out.requires_grad:
                def bw():
                    self.accumulate(out.grad)
                out._backward = bw
            return out
        _check_same_shape(self, other, "add")
        out = _make(self.data + other.data, (self, other))
        if out.requires_grad:
            def bw():
                if self.requires_grad:
                    self.accumulate(out.grad)
                if other.requires_grad:
                    other.accumulate(out.grad)
            out._backward = bw
        return out

    __radd__ = __add__

    def __neg__(self):
        out = _make(-self.data, (self,))
        if out.requires_grad:
            def bw():
                self.accumulate(-out.grad)
            out._backward = bw
        return out

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        # other is a plain number: other - self
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, np.ndarray) and other.shape != self.data.shape:
            raise ValueError(
                f"mul: shapes {self.data.shape} and {other.shape} differ")
        if isinstance(other, (int, float, np.ndarray)):
            out = _make(self.data * other, (self,))
            if out.requires_grad:
                def bw():
                    self.accumulate(out.grad * other)
                out._backward = bw
            return out
        _check_same_shape(self, other, "mul")
        out = _make(self.data * other.data, (self, other))
        if out.requires_grad:
            def bw():
                if self.requires_grad:
                    self.accumulate(out.grad * other.data)
                if other.requires_grad:
                    other.accumulate(out.grad * self.data)
            out._backward = bw
        return out

    __rmul__ = __mul__

    def __matmul__(self, other):
        a, b = self, other
        out = _make(a.data @ b.data, (a, b))
        if out.requires_grad:
            def bw():
                g = out.grad
                if a.requires_grad:
                    a.accumulate(_matmul_grad_left(g, a.data, b.data))
                if b.requires_grad:
                    b.accumulate(_matmul_grad_right(g, a.data, b.data))
            out._backward = bw
        return out

    @property
    def T(self):
        if self.data.ndim != 2:
            raise ValueError("transpose expects a matrix")
        out = _make(self.data.T, (self,))
        if out.requires_grad:
            def bw():
                self.accumulate(out.grad.T)
            out._backward = bw
        return out

    # -- nonlinearities ---------------------------------------------------

    def sigmoid(self):
        y = _sigmoid(self.data)
        out = _make(y, (self,))
        if out.requires_grad:
            def bw():
                self.accumulate(out.grad * y * (1.0 - y))
            out._backward = bw
        return out

    def tanh(self):
        y = np.tanh(self.data)
        out = _make(y, (self,))
        if out.requires_grad:
            def bw():
                self.accumulate(out.grad * (1.0 - y * y))
            out._backward = bw
        return out

    def exp(self):
        y = np.exp(self.data)
        out = _make(y, (self,))
        if out.requires_grad:
            def bw():
                self.accumulate(out.grad * y)
            out._backward = bw
        return out

    def log(self):
        out = _make(np.log(self.data), (self,))
        if out.requires_grad:
            def bw():
                self.accumulate(out.grad / self.data)
            out._backward = bw
        return out

    def clip(self, lo, hi):
        y = np.clip(self.data, lo, hi)
        out = _make(y, (self,))
        if out.requires_grad:
            inside = (self.data >= lo) & (self.data <= hi)
            def bw():
                self.accumulate(out.grad * inside)
            out._backward = bw
        return out

    # -- reductions -------------------------------------------------------

    def sum(self):
        out = _make(np.asarray(self.data.sum(), dtype=self.data.dtype), (self,))
        if out.requires_grad:
            def bw():
                self.accumulate(np.full_like(self.data, out.grad))
            out._backward = bw
        return out

    def mean(self):
        n = self.data.size
        out = _make(np.asarray(self.data.mean(), dtype=self.data.dtype), (self,))
        if out.requires_grad:
            def bw():
                self.accumulate(np.full_like(self.data, out.grad / n))
            out._backward = bw
        return out


# -- graph plumbing -------------------------------------------------------

def _make(data, parents):
    out = Tensor(data)
    tracked = tuple(p for p in parents if p.requires_grad)
    if tracked:
        out.requires_grad = True
        out._prev = tracked
    return out


def _toposort(root):
    order = []
    state = {}  # id -> 0 while on the stack, 1 once emitted
    stack = [(root, iter(root._prev))]
    state[id(root)] = 0
    while stack:
        node, children = stack[-1]
        advanced = False
        for child in children:
            s = state.get(id(child))
            if s == 0:
                raise RuntimeError("cycle in recorded graph")
            if s is None:
                state[id(child)] = 0
                stack.append((child, iter(child._prev)))
                advanced = True
                break
        if not advanced:
            state[id(node)] = 1
            order.append(node)
            stack.pop()
    return order


def _check_same_shape(a, b, opname):
    if a.data.shape != b.data.shape:
        raise ValueError(
            f"{opname}: shape mismatch {a.data.shape} vs {b.data.shape}"
        )


def _sigmoid(x):
    # Evaluate through exp of a negative argument on both branches so the
    # intermediate never overflows.
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _matmul_grad_left(g, a, b):
    if a.ndim == 2 and b.ndim == 2:
        return g @ b.T
    if a.ndim == 2 and b.ndim == 1:
        return np.outer(g, b)
    if a.ndim == 1 and b.ndim == 2:
        return b @ g
    return g * b  # both vectors, scalar output


def _matmul_grad_right(g, a, b):
    if a.ndim == 2 and b.ndim == 2:
        return a.T @ g
    if a.ndim == 2 and b.ndim == 1:
        return a.T @ g
    if a.ndim == 1 and b.ndim == 2:
        return np.outer(a, g)
    return g * a


# -- structural operations -------------------------------------------------

def concat(tensors, axis=0):
    tensors = list(tensors)
    if not tensors:
        raise ValueError("concat of an empty list")
    data = np.concatenate([t.data for t in tensors], axis=axis)
    out = _make(data, tensors)
    if out.requires_grad:
        sizes = [t.data.shape[axis] for t in tensors]
        bounds = np.cumsum([0] + sizes)
        def bw():
            for t, lo, hi in zip(tensors, bounds[:-1], bounds[1:]):
                if t.requires_grad:
                    idx = [slice(None)] * out.grad.ndim
                    idx[axis] = slice(lo, hi)
                    t.accumulate(out.grad[tuple(idx)])
        out._backward = bw
    return out


def stack_scalars(tensors):
    """Build a vector out of 0-d scalar tensors."""
    tensors = list(tensors)
    data = np.stack([t.data for t in tensors])
    out = _make(data, tensors)
    if out.requires_grad:
        def bw():
            for i, t in enumerate(tensors):
                if t.requires_grad:
                    t.accumulate(out.grad[i])
        out._backward = bw
    return out


def gather_rows(table, ids):
    """Embedding lookup: select rows of a (V, d) table by integer id."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= table.data.shape[0]):
        raise ValueError("gather_rows: id out of range")
    out = _make(table.data[ids], (table,))
    if out.requires_grad:
        def bw():
            if table.grad is None:
                table.grad = np.zeros_like(table.data)
            np.add.at(table.grad, ids, out.grad)
        out._backward = bw
    return out


def pad_rows(x, total_rows):
    """Zero-pad a (T, d) matrix at the bottom to total_rows rows."""
    t, d = x.data.shape
    if total_rows < t:
        raise ValueError("pad_rows: target smaller than input")
    if total_rows == t:
        return x
    data = np.zeros((total_rows, d), dtype=x.data.dtype)
    data[:t] = x.data
    out = _make(data, (x,))
    if out.requires_grad:
        def bw():
            x.accumulate(out.grad[:t])
        out._backward = bw
    return out


def max_rows(x, valid_rows=None):
    """Columnwise max over the first valid_rows rows of a matrix.

    Ties resolve to the earliest row, so the gradient routing is
    deterministic.
    """
    t = x.data.shape[0] if valid_rows is None else int(valid_rows)
    if t < 1 or t > x.data.shape[0]:
        raise ValueError("max_rows: no valid rows")
    sub = x.data[:t]
    arg = np.argmax(sub, axis=0)
    cols = np.arange(x.data.shape[1])
    out = _make(sub[arg, cols], (x,))
    if out.requires_grad:
        def bw():
            g = np.zeros_like(x.data)
            g[arg, cols] = out.grad
            x.accumulate(g)
        out._backward = bw
    return out


def scale_rows(x, column):
    """Multiply each row of x by a fixed per-row factor (a constant)."""
    col = np.asarray(column, dtype=x.data.dtype).reshape(-1, 1)
    if col.shape[0] != x.data.shape[0]:
        raise ValueError("scale_rows: factor length mismatch")
    out = _make(x.data * col, (x,))
    if out.requires_grad:
        def bw():
            x.accumulate(out.grad * col)
        out._backward = bw
    return out


# -- fused numeric kernels --------------------------------------------------

def softmax_rows(m, mask=None):
    """Row-stabilized softmax over the last axis of a matrix.

    ``mask`` marks positions allowed to receive probability mass; it can
    be a per-column vector applied to every row or a full boolean matrix.
    A row with no unmasked entry has no valid distribution and raises.
    1-d input is treated as a single row and returned 1-d.
    """
    x = m.data
    if not np.all(np.isfinite(x)):
        raise ValueError("softmax_rows: non-finite input")
    vec = x.ndim == 1
    X = x[None, :] if vec else x
    if X.shape[1] == 0:
        raise ValueError("empty attention row")
    if mask is not None:
        M = np.asarray(mask, dtype=bool)
        if M.ndim == 1:
            M = np.broadcast_to(M, X.shape)
        elif vec:
            M = M[None, :]
        if M.shape != X.shape:
            raise ValueError("softmax_rows: mask shape mismatch")
        if not M.any(axis=1).all():
            raise ValueError("empty attention row")
        shifted = np.where(M, X, -np.inf)
        e = np.exp(shifted - shifted.max(axis=1, keepdims=True))
    else:
        e = np.exp(X - X.max(axis=1, keepdims=True))
    y = e / e.sum(axis=1, keepdims=True)
    out_data = y[0] if vec else y
    out = _make(out_data.astype(x.dtype, copy=False), (m,))
    if out.requires_grad:
        def bw():
            g = out.grad[None, :] if vec else out.grad
            dot = (g * y).sum(axis=1, keepdims=True)
            dx = y * (g - dot)
            m.accumulate(dx[0] if vec else dx)
        out._backward = bw
    return out


def dropout(x, rate, training, rng):
    """Inverted dropout; identity when not training or rate is zero."""
    if not 0.0 <= rate < 1.0:
        raise ValueError("dropout rate must be in [0, 1)")
    if not training or rate == 0.0:
        return x
    keep = (rng.random(x.data.shape) >= rate)
    scale = 1.0 / (1.0 - rate)
    factor = (keep * scale).astype(x.data.dtype)
    out = _make(x.data * factor, (x,))
    if out.requires_grad:
        def bw():
            x.accumulate(out.grad * factor)
        out._backward = bw
    return out


def cross_entropy_logits(logits, gold):
    """Negative log-softmax of the gold entry of a logit vector."""
    x = logits.data
    if x.ndim != 1:
        raise ValueError("cross_entropy_logits expects a vector")
    if not 0 <= gold < x.shape[0]:
        raise ValueError(f"gold index {gold} out of range for {x.shape[0]} scores")
    m = x.max()
    e = np.exp(x - m)
    z = e.sum()
    p = e / z
    loss = np.asarray(np.log(z) + m - x[gold], dtype=x.dtype)
    if not np.isfinite(loss):
        raise FloatingPointError("non-finite loss")
    out = _make(loss, (logits,))
    if out.requires_grad:
        def bw():
            d = p.copy()
            d[gold] -= 1.0
            logits.accumulate(d * out.grad)
        out._backward = bw
    return out
