"""Feed-forward balance regressor baseline and its one-shot policy."""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator

from ..currency import MINOR_PER_UNIT
from ..errors import ConfigurationError, TrainingDivergenceError
from ..nn.layers import dense_backward, dense_forward, init_uniform
from ..nn.optim import adam_init, adam_step
from ..seeding import derive_rng
from ..validation import check_is_fitted
from .base import Policy

DNN_FEATURE_DIM = 16


def dnn_features(events, profile, day, horizon):
    """Aggregated consumption statistics plus raw profile features."""
    sums = {3: 0.0, 7: 0.0, 30: 0.0}
    counts = {3: 0.0, 7: 0.0, 30: 0.0}
    pay7 = 0.0
    last_amount = 0.0
    last_day = None
    for e in events:
        if e.day > day:
            continue
        gap = day - e.day
        if e.kind == "consumption":
            for w in (3, 7, 30):
                if gap < w:
                    sums[w] += e.amount
                    counts[w] += 1
            if last_day is None or e.day >= last_day:
                last_day = e.day
                last_amount = e.amount
        elif gap < 7:
            pay7 += e.amount
    days_since = (day - last_day) / 30.0 if last_day is not None else 1.0
    feats = [
        math.log1p(sums[3] / 100.0) / 10.0,
        math.log1p(sums[7] / 100.0) / 10.0,
        math.log1p(sums[30] / 100.0) / 10.0,
        counts[3] / 10.0,
        counts[7] / 10.0,
        counts[30] / 10.0,
        math.log1p(last_amount / 100.0) / 10.0,
        days_since,
        math.log1p(pay7 / 100.0) / 10.0,
        profile.age_bucket / 5.0,
        profile.city_tier / 3.0,
        profile.income_band / 4.0,
        float(profile.gender),
        profile.payments_per_day,
        profile.transfers_per_day,
        day / horizon,
    ]
    return np.array(feats, dtype=np.float64)


class BalanceDnnRegressor(BaseEstimator):
    """Four-layer feed-forward balance regressor over flat features."""

    def __init__(self, hidden_dims=(64, 32, 16), lr=3e-3, batch=64, max_epochs=40,
                 patience=4, seed=0):
        self.hidden_dims = hidden_dims
        self.lr = lr
        self.batch = batch
        self.max_epochs = max_epochs
        self.patience = patience
        self.seed = seed

    def _init_params(self, rng, d_in):
        dims = [d_in] + list(self.hidden_dims) + [1]
        params = {}
        for i in range(len(dims) - 1):
            params[f"l{i}.W"] = init_uniform(rng, (dims[i], dims[i + 1]), dims[i])
            params[f"l{i}.b"] = np.zeros(dims[i + 1])
        return params

    def _forward(self, params, x):
        acts = [x]
        n_layers = len(self.hidden_dims) + 1
        h = x
        for i in range(n_layers):
            z = dense_forward({"W": params[f"l{i}.W"], "b": params[f"l{i}.b"]}, h)
            h = z if i == n_layers - 1 else np.tanh(z)
            acts.append(h)
        return h[:, 0], acts

    def _backward(self, params, acts, dy):
        n_layers = len(self.hidden_dims) + 1
        grads = {}
        dh = dy[:, None]
        for i in range(n_layers - 1, -1, -1):
            if i != n_layers - 1:
                dh = dh * (1.0 - acts[i + 1] ** 2)
            sub = {"W": params[f"l{i}.W"], "b": params[f"l{i}.b"]}
            dh, g = dense_backward(sub, acts[i], dh)
            grads[f"l{i}.W"] = g["W"]
            grads[f"l{i}.b"] = g["b"]
        return grads

    def fit(self, X, y):
        """Squared-relative-error regression with early stopping."""
        X = np.asarray(X, dtype=np.float64)
        y_units = np.asarray(y, dtype=np.float64) / MINOR_PER_UNIT
        if X.ndim != 2 or len(X) != len(y_units) or len(X) == 0:
            raise ConfigurationError("bad training matrix for the balance regressor")
        rng = derive_rng(self.seed, "dnn")
        params = self._init_params(rng, X.shape[1])
        opt = adam_init(params, lr=self.lr)
        perm = rng.permutation(len(X))
        n_val = max(1, len(X) // 10)
        val_idx, train_idx = perm[:n_val], perm[n_val:]
        best = np.inf
        best_params = {k: v.copy() for k, v in params.items()}
        bad = 0
        for _ in range(self.max_epochs):
            order = rng.permutation(len(train_idx))
            for start in range(0, len(order), self.batch):
                idx = train_idx[order[start:start + self.batch]]
                pred, acts = self._forward(params, X[idx])
                resid = (pred - y_units[idx]) / y_units[idx]
                loss = float(np.mean(resid ** 2))
                if not np.isfinite(loss):
                    raise TrainingDivergenceError("non-finite regressor loss")
                dy = 2.0 * resid / y_units[idx] / len(idx)
                params = adam_step(opt, params, self._backward(params, acts, dy))
            val_pred, _ = self._forward(params, X[val_idx])
            val_err = float(np.mean(np.abs(val_pred - y_units[val_idx]) / y_units[val_idx]))
            if val_err < best - 1e-6:
                best = val_err
                best_params = {k: v.copy() for k, v in params.items()}
                bad = 0
            else:
                bad += 1
                if bad > self.patience:
                    break
        self.params_ = best_params
        self.val_mape_ = float(best)
        return self

    def predict(self, X):
        """Balance estimates in currency units (floored at zero)."""
        check_is_fitted(self, "params_")
        pred, _ = self._forward(self.params_, np.asarray(X, dtype=np.float64))
        return np.maximum(pred, 0.0)

    def predict_minor(self, X):
        return np.rint(self.predict(X) * MINOR_PER_UNIT).astype(np.int64)

    def save(self, path):
        check_is_fitted(self, "params_")
        from ..nn.checkpoint import save_params

        meta = {"kind": "balance-dnn", "val_mape": self.val_mape_,
                "params": {k: (list(v) if isinstance(v, tuple) else v)
                           for k, v in self.get_params().items()}}
        save_params(path, self.params_, meta)

    @classmethod
    def load(cls, path):
        from ..nn.checkpoint import load_params

        params, meta = load_params(path)
        if meta.get("kind") != "balance-dnn":
            raise ConfigurationError(f"checkpoint at {path} is not a balance regressor")
        init = dict(meta["params"])
        init["hidden_dims"] = tuple(init["hidden_dims"])
        model = cls(**init)
        model.params_ = params
        model.val_mape_ = float(meta["val_mape"])
        return model


class PredictiveDnnPolicy(Policy):
    """One attempt per day of min(predicted balance, remaining debt)."""

    def __init__(self, regressor):
        check_is_fitted(regressor, "params_")
        self.regressor = regressor

    def begin_episode(self, account):
        feats = np.stack([
            dnn_features(account.events, account.profile, day, account.horizon)
            for day in range(account.horizon)
        ])
        return {"pred_minor": self.regressor.predict_minor(feats)}

    def next_amount(self, obs, day_ctx, episode_ctx):
        if obs.remaining_debt <= 0 or obs.attempts_today:
            return None
        pred = int(episode_ctx["pred_minor"][obs.day])
        return max(1, min(pred, obs.remaining_debt))
