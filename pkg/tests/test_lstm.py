import numpy as np
import pytest

from termreader.nn import ParamStore, Tensor, bilstm_forward, gradient_check


def _store(seed=0, d_in=3, hidden=4):
    store = ParamStore(seed, dtype=np.float64)
    store.add_bilstm("lstm", d_in, hidden)
    return store


def _reference_direction(x, w, r, b, steps):
    """Plain numpy re-derivation of one LSTM direction."""
    h_dim = r.shape[0]
    out = np.zeros((x.shape[0], h_dim))
    h = np.zeros(h_dim)
    c = np.zeros(h_dim)
    sig = lambda v: 1.0 / (1.0 + np.exp(-v))
    for t in steps:
        a = x[t] @ w + h @ r + b
        i, f = sig(a[:h_dim]), sig(a[h_dim:2 * h_dim])
        g, o = np.tanh(a[2 * h_dim:3 * h_dim]), sig(a[3 * h_dim:])
        c = f * c + i * g
        h = o * np.tanh(c)
        out[t] = h
    return out


def test_matches_independent_reference():
    store = _store()
    weights = store.bilstm("lstm")
    rng = np.random.default_rng(3)
    x = rng.normal(size=(5, 3))
    out = bilstm_forward(Tensor(x), weights)
    fwd = _reference_direction(x, weights.wf.data, weights.rf.data,
                               weights.bf.data, range(5))
    bwd = _reference_direction(x, weights.wb.data, weights.rb.data,
                               weights.bb.data, range(4, -1, -1))
    np.testing.assert_allclose(out.data, np.concatenate([fwd, bwd], axis=1),
                               rtol=1e-12, atol=1e-12)


def test_output_shape_and_padding_rows():
    store = _store(hidden=4)
    x = Tensor(np.random.default_rng(0).normal(size=(6, 3)))
    out = bilstm_forward(x, store.bilstm("lstm"), length=4)
    assert out.shape == (6, 8)
    np.testing.assert_allclose(out.data[4:], 0.0)
    assert np.all(out.data[:4] != 0.0)


def test_length_errors():
    store = _store()
    x = Tensor(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        bilstm_forward(x, store.bilstm("lstm"), length=0)
    with pytest.raises(ValueError):
        bilstm_forward(x, store.bilstm("lstm"), length=4)


def test_forward_deterministic():
    store = _store(seed=9)
    x = Tensor(np.random.default_rng(1).normal(size=(4, 3)))
    a = bilstm_forward(x, store.bilstm("lstm")).data
    b = bilstm_forward(x, store.bilstm("lstm")).data
    np.testing.assert_array_equal(a, b)


def test_reversal_with_swapped_weights():
    from termreader.nn import BiLSTMWeights

    store = _store()
    weights = store.bilstm("lstm")
    swapped = BiLSTMWeights(wf=weights.wb, rf=weights.rb, bf=weights.bb,
                            wb=weights.wf, rb=weights.rf, bb=weights.bf)
    h = weights.hidden
    x = np.random.default_rng(2).normal(size=(5, 3))
    out = bilstm_forward(Tensor(x), weights).data
    rev = bilstm_forward(Tensor(x[::-1].copy()), swapped).data
    # reversing time and exchanging the direction weights exchanges the
    # two output halves
    np.testing.assert_allclose(rev[::-1, :h], out[:, h:], rtol=1e-12,
                               atol=1e-12)
    np.testing.assert_allclose(rev[::-1, h:], out[:, :h], rtol=1e-12,
                               atol=1e-12)


def test_gradients_match_finite_differences():
    store = _store(seed=4, d_in=2, hidden=3)
    rng = np.random.default_rng(5)
    x_data = rng.normal(size=(4, 2))
    coeff = rng.normal(size=(4, 6))

    def forward():
        out = bilstm_forward(Tensor(x_data), store.bilstm("lstm"))
        return (out * coeff).sum()

    worst = gradient_check(forward, store)
    assert max(worst.values()) <= 1e-6


def test_input_gradient_flows():
    store = _store(seed=6, d_in=2, hidden=2)
    x = Tensor(np.random.default_rng(7).normal(size=(3, 2)),
               requires_grad=True)
    bilstm_forward(x, store.bilstm("lstm")).sum().backward()
    assert x.grad is not None
    assert np.any(x.grad != 0.0)


def test_no_gradient_past_length():
    store = _store(seed=8, d_in=2, hidden=2)
    x = Tensor(np.random.default_rng(9).normal(size=(5, 2)),
               requires_grad=True)
    bilstm_forward(x, store.bilstm("lstm"), length=3).sum().backward()
    np.testing.assert_allclose(x.grad[3:], 0.0)
    assert np.any(x.grad[:3] != 0.0)
