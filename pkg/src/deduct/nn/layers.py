"""Differentiable building blocks, double precision throughout.

Every forward is a pure function of (params, inputs); every backward is
hand-derived and checked against central finite differences in the test
suite. Fixed architectures only, no general autodiff.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionError, DomainError


def init_uniform(rng, shape, fan_in):
    """Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)]."""
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return rng.uniform(-bound, bound, size=shape).astype(np.float64)


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


# -- dense ---------------------------------------------------------------

def dense_forward(params, x):
    """y = x @ W + b for x of shape (batch, fan_in)."""
    W, b = params["W"], params["b"]
    if x.ndim != 2 or x.shape[1] != W.shape[0]:
        raise DimensionError(f"dense input {x.shape} incompatible with W {W.shape}")
    return x @ W + b


def dense_backward(params, x, grad_out):
    """Returns (input_grad, {"W": dW, "b": db})."""
    W = params["W"]
    if grad_out.shape != (x.shape[0], W.shape[1]):
        raise DimensionError(f"upstream grad {grad_out.shape} incompatible with W {W.shape}")
    dx = grad_out @ W.T
    grads = {"W": x.T @ grad_out, "b": grad_out.sum(axis=0)}
    return dx, grads


# -- softmax -------------------------------------------------------------

def softmax(logits):
    """Probability vector over the last axis; shift-invariant."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.size == 0:
        raise DomainError("softmax of empty input")
    if not np.all(np.isfinite(logits)):
        raise DomainError("softmax requires finite logits")
    shifted = logits - logits.max(axis=-1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=-1, keepdims=True)


def masked_softmax(logits, mask):
    """Row-wise softmax over positions where mask is 1; zeros elsewhere.

    Rows with no valid position return all-zero weights.
    """
    mask = mask.astype(bool)
    out = np.zeros_like(logits, dtype=np.float64)
    any_valid = mask.any(axis=-1)
    if not any_valid.any():
        return out
    masked = np.where(mask, logits, -np.inf)
    rows = masked[any_valid]
    shifted = rows - rows.max(axis=-1, keepdims=True)
    ex = np.where(np.isfinite(shifted), np.exp(shifted), 0.0)
    out[any_valid] = ex / ex.sum(axis=-1, keepdims=True)
    return out


def softmax_backward(weights, grad_out):
    """Jacobian-vector product of softmax: w * (g - sum(w*g))."""
    inner = (weights * grad_out).sum(axis=-1, keepdims=True)
    return weights * (grad_out - inner)


# -- embeddings ----------------------------------------------------------

def embedding_forward(table, indices):
    return table[indices]


def embedding_backward(table, indices, grad_out):
    dT = np.zeros_like(table)
    np.add.at(dT, indices, grad_out)
    return dT


# -- LSTM cell -----------------------------------------------------------

def lstm_cell_forward(params, h_prev, c_prev, x):
    """One gated update. params: Wx (din,4H), Wh (H,4H), b (4H,).

    Returns (h, c, cache). Gate order along the 4H axis: input, forget,
    candidate, output.
    """
    Wx, Wh, b = params["Wx"], params["Wh"], params["b"]
    H = Wh.shape[0]
    if x.shape[1] != Wx.shape[0] or h_prev.shape[1] != H:
        raise DimensionError(
            f"cell input {x.shape}/{h_prev.shape} incompatible with Wx {Wx.shape}, Wh {Wh.shape}"
        )
    z = x @ Wx + h_prev @ Wh + b
    i = _sigmoid(z[:, :H])
    f = _sigmoid(z[:, H:2 * H])
    g = np.tanh(z[:, 2 * H:3 * H])
    o = _sigmoid(z[:, 3 * H:])
    c = f * c_prev + i * g
    tc = np.tanh(c)
    h = o * tc
    cache = (x, h_prev, c_prev, i, f, g, o, tc)
    return h, c, cache


def lstm_cell_backward(params, cache, dh, dc):
    """Backward of one cell step given grads on (h, c).

    Returns (dx, dh_prev, dc_prev, grads) with grads keyed like params.
    """
    Wx, Wh = params["Wx"], params["Wh"]
    x, h_prev, c_prev, i, f, g, o, tc = cache
    do = dh * tc
    dct = dc + dh * o * (1.0 - tc * tc)
    di = dct * g
    dg = dct * i
    df = dct * c_prev
    dc_prev = dct * f
    dz = np.concatenate(
        [di * i * (1 - i), df * f * (1 - f), dg * (1 - g * g), do * o * (1 - o)],
        axis=1,
    )
    dx = dz @ Wx.T
    dh_prev = dz @ Wh.T
    grads = {"Wx": x.T @ dz, "Wh": h_prev.T @ dz, "b": dz.sum(axis=0)}
    return dx, dh_prev, dc_prev, grads
