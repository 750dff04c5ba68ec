import numpy as np
import pytest

from termreader.nn import ParamStore, Tensor, gradient_check, softmax_rows


def test_clean_gradients_pass():
    store = ParamStore(0, dtype=np.float64)
    store.add("w", (3, 2))
    store.add("b", (2,))
    x = np.random.default_rng(0).normal(size=(4, 3))

    def forward():
        h = (Tensor(x) @ store["w"]).tanh()
        return (softmax_rows(h) @ store["b"]).sum()

    report = gradient_check(forward, store)
    assert set(report) == {"w", "b"}
    assert max(report.values()) < 1e-7


def test_broken_gradient_is_caught():
    store = ParamStore(0, dtype=np.float64)
    w = store.add("w", (2, 2))

    def forward():
        # hand-built node whose backward understates the true gradient
        out = Tensor(np.asarray((w.data * 2.0).sum()), requires_grad=True)
        out._prev = (w,)

        def bad():
            w.accumulate(np.full_like(w.data, 1.9))
        out._backward = bad
        return out

    report = gradient_check(forward, store)
    assert report["w"] > 1e-2


def test_nondeterministic_forward_rejected():
    store = ParamStore(0, dtype=np.float64)
    store.add("w", (2,))
    rng = np.random.default_rng(0)

    def forward():
        return (store["w"] * rng.normal(size=2)).sum()

    with pytest.raises(RuntimeError, match="non-deterministic"):
        gradient_check(forward, store)


def test_frozen_parameters_not_checked():
    store = ParamStore(0, dtype=np.float64)
    store.add_preset("emb", np.ones((2, 2)), requires_grad=False)
    store.add("w", (2,))

    def forward():
        return (store["emb"] @ store["w"]).sum()

    report = gradient_check(forward, store)
    assert set(report) == {"w"}
