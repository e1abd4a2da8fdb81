"""Value-function backends: a recurrent Q-network and a lookup table.

Both expose the same surface to the training loop: ``values(states)``,
``train_step(states, actions, targets)`` and ``sync_target()`` with
``target_values(states)``, so the loop is identical whether values come
from the network or, in tabular mode, from a table.
"""

from __future__ import annotations

import numpy as np

from ..errors import TrainingDivergenceError
from ..nn.layers import dense_backward, dense_forward, init_uniform
from ..nn.optim import adam_init, adam_step
from ..nn.sequence import lstm_sequence_backward, lstm_sequence_forward
from .features import HIST_DIM


def _stack_states(states):
    """Pad a list of (static, hist) payloads into batch arrays."""
    n = len(states)
    static = np.stack([s[0] for s in states]).astype(np.float64)
    L = max((s[1].shape[0] for s in states), default=0)
    L = max(L, 1)
    hist = np.zeros((n, L, HIST_DIM))
    mask = np.zeros((n, L))
    for r, (_, h) in enumerate(states):
        if h.shape[0]:
            hist[r, :h.shape[0], :] = h
            mask[r, :h.shape[0]] = 1.0
    return static, hist, mask


class QNetwork:
    """History LSTM -> concat static -> 3-layer feed-forward -> action values."""

    def __init__(self, static_dim, n_actions, hidden_dims=(64, 32), lstm_hidden=16,
                 lr=1e-3, rng=None):
        if rng is None:
            rng = np.random.default_rng(0)
        self.static_dim = static_dim
        self.n_actions = n_actions
        self.lstm_hidden = lstm_hidden
        h1, h2 = hidden_dims[0], hidden_dims[1] if len(hidden_dims) > 1 else hidden_dims[0]
        d0 = lstm_hidden + static_dim
        self.params = {
            "lstm.Wx": init_uniform(rng, (HIST_DIM, 4 * lstm_hidden), HIST_DIM),
            "lstm.Wh": init_uniform(rng, (lstm_hidden, 4 * lstm_hidden), lstm_hidden),
            "lstm.b": np.zeros(4 * lstm_hidden),
            "l1.W": init_uniform(rng, (d0, h1), d0),
            "l1.b": np.zeros(h1),
            "l2.W": init_uniform(rng, (h1, h2), h1),
            "l2.b": np.zeros(h2),
            "out.W": init_uniform(rng, (h2, n_actions), h2),
            "out.b": np.zeros(n_actions),
        }
        self.target_params = {k: v.copy() for k, v in self.params.items()}
        self.opt = adam_init(self.params, lr=lr)

    @staticmethod
    def _sub(params, prefix):
        plen = len(prefix) + 1
        return {k[plen:]: v for k, v in params.items() if k.startswith(prefix + ".")}

    def _forward(self, params, static, hist, mask, want_cache=False):
        lstm = self._sub(params, "lstm")
        hs, steps = lstm_sequence_forward(lstm, hist, mask)
        h_last = hs[:, -1, :]
        u0 = np.concatenate([h_last, static], axis=1)
        z1 = dense_forward(self._sub(params, "l1"), u0)
        a1 = np.tanh(z1)
        z2 = dense_forward(self._sub(params, "l2"), a1)
        a2 = np.tanh(z2)
        q = dense_forward(self._sub(params, "out"), a2)
        if not want_cache:
            return q, None
        return q, (static, hist, mask, steps, h_last, u0, a1, a2)

    def _backward(self, params, cache, dq):
        static, hist, mask, steps, h_last, u0, a1, a2 = cache
        grads = {}
        da2, g_out = dense_backward(self._sub(params, "out"), a2, dq)
        dz2 = da2 * (1.0 - a2 * a2)
        da1, g_l2 = dense_backward(self._sub(params, "l2"), a1, dz2)
        dz1 = da1 * (1.0 - a1 * a1)
        du0, g_l1 = dense_backward(self._sub(params, "l1"), u0, dz1)
        H = self.lstm_hidden
        dhs = np.zeros((hist.shape[0], hist.shape[1], H))
        dhs[:, -1, :] = du0[:, :H]
        _, g_lstm = lstm_sequence_backward(self._sub(params, "lstm"), steps, dhs)
        for name, sub in (("out", g_out), ("l2", g_l2), ("l1", g_l1), ("lstm", g_lstm)):
            for k, v in sub.items():
                grads[f"{name}.{k}"] = v
        return grads

    # -- training-loop surface ------------------------------------------------

    def values(self, states):
        static, hist, mask = _stack_states(states)
        q, _ = self._forward(self.params, static, hist, mask)
        return q

    def target_values(self, states):
        static, hist, mask = _stack_states(states)
        q, _ = self._forward(self.target_params, static, hist, mask)
        return q

    def train_step(self, states, actions, targets):
        """One squared-TD-error gradient step; returns the batch loss."""
        static, hist, mask = _stack_states(states)
        q, cache = self._forward(self.params, static, hist, mask, want_cache=True)
        n = len(actions)
        rows = np.arange(n)
        diff = q[rows, actions] - targets
        loss = float(np.mean(diff ** 2))
        if not np.isfinite(loss):
            raise TrainingDivergenceError("non-finite TD loss")
        dq = np.zeros_like(q)
        dq[rows, actions] = 2.0 * diff / n
        grads = self._backward(self.params, cache, dq)
        self.params = adam_step(self.opt, self.params, grads)
        return loss

    def sync_target(self):
        self.target_params = {k: v.copy() for k, v in self.params.items()}

    # -- persistence ----------------------------------------------------------

    def export_params(self):
        return {k: v.copy() for k, v in self.params.items()}

    def load_exported(self, params):
        self.params = {k: np.asarray(v, dtype=np.float64) for k, v in params.items()}
        self.sync_target()


class QTable:
    """Tabular backend over integer states; same surface as ``QNetwork``."""

    def __init__(self, n_states, n_actions, lr=0.5):
        self.table = np.zeros((n_states, n_actions))
        self.target_table = self.table.copy()
        self.lr = lr
        self.n_actions = n_actions

    def values(self, states):
        return self.table[np.asarray(states, dtype=int)]

    def target_values(self, states):
        return self.target_table[np.asarray(states, dtype=int)]

    def train_step(self, states, actions, targets):
        loss = 0.0
        for s, a, t in zip(states, actions, targets):
            diff = self.table[int(s), int(a)] - t
            loss += diff * diff
            self.table[int(s), int(a)] -= self.lr * diff
        return loss / max(len(states), 1)

    def sync_target(self):
        self.target_table = self.table.copy()
