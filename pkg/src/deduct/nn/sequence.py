"""Batched (masked) LSTM unrolling and the bidirectional encoder."""

from __future__ import annotations

import numpy as np

from .layers import lstm_cell_backward, lstm_cell_forward


def lstm_sequence_forward(params, xs, mask):
    """Unroll over xs (B, L, D) with mask (B, L) of 0/1.

    Masked positions carry the previous state through unchanged, so the
    h at the last position is always the last *valid* hidden state and
    left-padded sequences start from the zero state.

    Returns (hs, cache) where hs has shape (B, L, H).
    """
    B, L, _ = xs.shape
    H = params["Wh"].shape[0]
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    hs = np.zeros((B, L, H))
    steps = []
    for t in range(L):
        m = mask[:, t:t + 1]
        h_new, c_new, cell_cache = lstm_cell_forward(params, h, c, xs[:, t, :])
        h = m * h_new + (1.0 - m) * h
        c = m * c_new + (1.0 - m) * c
        hs[:, t, :] = h
        steps.append((cell_cache, m))
    return hs, steps


def lstm_sequence_backward(params, steps, dhs):
    """Backprop through time. dhs (B, L, H) are per-position grads on hs.

    Returns (dxs, grads).
    """
    B, L, H = dhs.shape
    dxs = np.zeros((B, L, params["Wx"].shape[0]))
    grads = {k: np.zeros_like(v) for k, v in params.items()}
    dh = np.zeros((B, H))
    dc = np.zeros((B, H))
    for t in range(L - 1, -1, -1):
        cell_cache, m = steps[t]
        dh_total = dh + dhs[:, t, :]
        dx, dh_prev, dc_prev, step_grads = lstm_cell_backward(
            params, cell_cache, dh_total * m, dc * m
        )
        dxs[:, t, :] = dx
        dh = dh_prev + dh_total * (1.0 - m)
        dc = dc_prev + dc * (1.0 - m)
        for k, v in step_grads.items():
            grads[k] += v
    return dxs, grads


def bilstm_forward(params_fwd, params_bwd, xs, mask):
    """Per-position concat of a forward and a reversed-direction LSTM.

    Output position i holds [fwd pass up to i, bwd pass from the end down
    to i], each restricted to valid positions.
    """
    hs_f, cache_f = lstm_sequence_forward(params_fwd, xs, mask)
    xs_r = xs[:, ::-1, :]
    mask_r = mask[:, ::-1]
    hs_b_r, cache_b = lstm_sequence_forward(params_bwd, xs_r, mask_r)
    hs_b = hs_b_r[:, ::-1, :]
    hs = np.concatenate([hs_f, hs_b], axis=2)
    return hs, (cache_f, cache_b)


def bilstm_backward(params_fwd, params_bwd, caches, dhs):
    cache_f, cache_b = caches
    H = dhs.shape[2] // 2
    dxs_f, grads_f = lstm_sequence_backward(params_fwd, cache_f, dhs[:, :, :H])
    dxs_b_r, grads_b = lstm_sequence_backward(params_bwd, cache_b, dhs[:, ::-1, H:])
    dxs = dxs_f + dxs_b_r[:, ::-1, :]
    return dxs, grads_f, grads_b
