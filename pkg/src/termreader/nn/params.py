"""Named parameter storage with seeded, order-dependent initialization."""

from __future__ import annotations

import math

import numpy as np

from .lstm import BiLSTMWeights
from .tensor import Tensor


class ParamStore:
    """Ordered name -> Tensor map.

    Initialization draws from a generator seeded once at construction,
    so a store is reproducible from (seed, insertion order) alone.
    Weights are uniform in +/- sqrt(1/fan_in).
    """

    def __init__(self, seed, dtype=np.float32):
        self.rng_seed = int(seed)
        self.dtype = np.dtype(dtype)
        self._rng = np.random.default_rng(self.rng_seed)
        self._entries: dict[str, Tensor] = {}

    def add(self, name, shape, fan_in=None, requires_grad=True):
        if name in self._entries:
            raise ValueError(f"duplicate parameter '{name}'")
        shape = tuple(int(s) for s in shape)
        if fan_in is None:
            fan_in = shape[0]
        bound = math.sqrt(1.0 / fan_in)
        data = self._rng.uniform(-bound, bound, shape).astype(self.dtype)
        t = Tensor(data, requires_grad=requires_grad)
        self._entries[name] = t
        return t

    def add_preset(self, name, array, requires_grad=True):
        """Register a parameter with externally supplied values."""
        if name in self._entries:
            raise ValueError(f"duplicate parameter '{name}'")
        t = Tensor(np.ascontiguousarray(array, dtype=self.dtype),
                   requires_grad=requires_grad)
        self._entries[name] = t
        return t

    def add_bilstm(self, name, d_in, hidden):
        """Register one BiLSTM's packed weights; forget-gate bias is 1."""
        parts = []
        for direction in ("fw", "bw"):
            w = self.add(f"{name}.{direction}.w", (d_in, 4 * hidden))
            r = self.add(f"{name}.{direction}.r", (hidden, 4 * hidden), fan_in=hidden)
            b = self.add(f"{name}.{direction}.b", (4 * hidden,), fan_in=hidden)
            b.data[hidden:2 * hidden] = 1.0
            parts.extend((w, r, b))
        return BiLSTMWeights(*parts)

    def bilstm(self, name):
        return BiLSTMWeights(*(self._entries[f"{name}.{d}.{p}"]
                               for d in ("fw", "bw") for p in ("w", "r", "b")))

    def __getitem__(self, name):
        return self._entries[name]

    def __contains__(self, name):
        return name in self._entries

    def __len__(self):
        return len(self._entries)

    def names(self):
        return list(self._entries)

    def items(self):
        return self._entries.items()

    def trainable(self):
        return [(n, t) for n, t in self._entries.items() if t.requires_grad]

    def zero_grads(self):
        for t in self._entries.values():
            t.grad = None

    def num_values(self):
        return sum(t.data.size for t in self._entries.values())
