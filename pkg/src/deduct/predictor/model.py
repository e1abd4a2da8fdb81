"""Balance estimation from transaction history.

The model embeds each event (log-bucketed amount, kind, day offset), runs
a bidirectional recurrent encoder over the sequence, scores each position
with a learned attention head, and outputs the attention-weighted sum of
the raw event amounts. The output is therefore always a convex
combination of observed amounts: it can interpolate the menu of recent
transaction sizes but never extrapolate beyond them.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ..currency import MINOR_PER_UNIT
from ..errors import ConfigurationError, DomainError, TrainingDivergenceError
from ..nn.layers import embedding_backward, init_uniform, masked_softmax, softmax_backward
from ..nn.optim import adam_init, adam_step
from ..nn.sequence import bilstm_backward, bilstm_forward
from ..seeding import derive_rng
from ..validation import check_is_fitted

N_AMOUNT_BUCKETS = 24  # log2 buckets over minor units


def build_sequence(events, day, lookback_days, max_events):
    """Most recent events in (day - lookback, day] as (offset, kind, amount) triples."""
    window = [e for e in events if day - lookback_days < e.day <= day]
    window = window[-max_events:]
    return [
        (day - e.day, 0 if e.kind == "consumption" else 1, e.amount)
        for e in window
    ]


def build_label_rows(records, lookback_days=30, max_events=64, behavior_logs=None,
                     target="balance"):
    """Labeled (sequence, balance) rows from the privileged daily balances.

    One row per account-day with positive true balance. ``target``
    "balance" labels the balance itself; "headroom" subtracts the day's
    logged deduction total (requires ``behavior_logs`` keyed by account).
    Returns (account_ids, days, sequences, labels_minor).
    """
    if target not in ("balance", "headroom"):
        raise ConfigurationError(f"unknown label target {target!r}")
    if target == "headroom" and behavior_logs is None:
        raise ConfigurationError("headroom labels require behavior logs")
    ids, days, seqs, labels = [], [], [], []
    for rec in records:
        ded_by_day = {}
        if behavior_logs is not None and rec.account_id in behavior_logs:
            ded_by_day = behavior_logs[rec.account_id].deducted_by_day()
        for day, bal in enumerate(rec.daily_balance):
            if bal <= 0:
                continue
            label = bal
            if target == "headroom":
                label = bal - ded_by_day.get(day, 0)
                if label <= 0:
                    continue
            seq = build_sequence(rec.events, day, lookback_days, max_events)
            if not seq:
                continue
            ids.append(rec.account_id)
            days.append(day)
            seqs.append(seq)
            labels.append(label)
    return ids, days, seqs, np.asarray(labels, dtype=np.int64)


def mape(predictions, labels):
    """Mean absolute percentage error; every label must be positive."""
    predictions = np.asarray(predictions, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if predictions.shape != labels.shape:
        raise DomainError("predictions and labels must align")
    if labels.size == 0:
        raise DomainError("mape of empty inputs")
    if np.any(labels <= 0):
        raise DomainError("mape requires strictly positive labels")
    return float(np.mean(np.abs(predictions - labels) / labels))


class BalancePredictor(BaseEstimator):
    """Attention-over-amounts balance regressor.

    fit(X, y) takes sequences as produced by ``build_sequence`` and labels
    in minor units; predict(X) returns balances in currency units. The
    fitted fallback (population median label) covers empty sequences.
    """

    def __init__(self, embed_dim=6, hidden_dim=24, lookback_days=30, max_events=64,
                 lr=0.02, batch=64, patience=3, max_epochs=30, seed=0):
        self.embed_dim = embed_dim
        self.hidden_dim = hidden_dim
        self.lookback_days = lookback_days
        self.max_events = max_events
        self.lr = lr
        self.batch = batch
        self.patience = patience
        self.max_epochs = max_epochs
        self.seed = seed

    # -- parameter plumbing ------------------------------------------------

    def _init_params(self, rng):
        E, H = self.embed_dim, self.hidden_dim
        din = 3 * E
        params = {
            "E_amt": init_uniform(rng, (N_AMOUNT_BUCKETS, E), E),
            "E_kind": init_uniform(rng, (2, E), E),
            "E_day": init_uniform(rng, (self.lookback_days + 1, E), E),
            "f.Wx": init_uniform(rng, (din, 4 * H), din),
            "f.Wh": init_uniform(rng, (H, 4 * H), H),
            "f.b": np.zeros(4 * H),
            "b.Wx": init_uniform(rng, (din, 4 * H), din),
            "b.Wh": init_uniform(rng, (H, 4 * H), H),
            "b.b": np.zeros(4 * H),
            "attn.W": init_uniform(rng, (2 * H,), 2 * H),
            "attn.b": np.zeros(1),
        }
        return params

    @staticmethod
    def _split(params, prefix):
        plen = len(prefix) + 1
        return {k[plen:]: v for k, v in params.items() if k.startswith(prefix + ".")}

    def _assemble(self, seqs):
        """Pad a list of (offset, kind, amount) sequences into index arrays."""
        n = len(seqs)
        L = max((len(s) for s in seqs), default=0)
        L = max(L, 1)
        off = np.zeros((n, L), dtype=np.int64)
        kind = np.zeros((n, L), dtype=np.int64)
        amt_minor = np.zeros((n, L), dtype=np.int64)
        mask = np.zeros((n, L), dtype=np.float64)
        for r, seq in enumerate(seqs):
            for c, (o, k, a) in enumerate(seq):
                off[r, c] = min(max(int(o), 0), self.lookback_days)
                kind[r, c] = int(k)
                amt_minor[r, c] = int(a)
                mask[r, c] = 1.0
        bucket = np.minimum(
            np.floor(np.log2(np.maximum(amt_minor, 1))).astype(np.int64),
            N_AMOUNT_BUCKETS - 1,
        )
        return bucket, kind, off, amt_minor, mask

    # -- forward / backward --------------------------------------------------

    def _forward(self, params, bucket, kind, off, amt_minor, mask):
        e = np.concatenate(
            [params["E_amt"][bucket], params["E_kind"][kind], params["E_day"][off]],
            axis=2,
        )
        hs, caches = bilstm_forward(self._split(params, "f"), self._split(params, "b"), e, mask)
        logits = hs @ params["attn.W"] + params["attn.b"][0]
        weights = masked_softmax(logits, mask)
        x_units = amt_minor / MINOR_PER_UNIT
        y = (weights * x_units).sum(axis=1)
        cache = (bucket, kind, off, x_units, mask, e, caches, hs, weights)
        return y, cache

    def _backward(self, params, cache, dy):
        bucket, kind, off, x_units, mask, e, caches, hs, weights = cache
        dweights = dy[:, None] * x_units
        dlogits = softmax_backward(weights, dweights)
        dW = (hs * dlogits[:, :, None]).sum(axis=(0, 1))
        db = np.array([dlogits.sum()])
        dhs = dlogits[:, :, None] * params["attn.W"][None, None, :]
        de, grads_f, grads_b = bilstm_backward(
            self._split(params, "f"), self._split(params, "b"), caches, dhs
        )
        E = self.embed_dim
        grads = {
            "E_amt": embedding_backward(params["E_amt"], bucket, de[:, :, :E]),
            "E_kind": embedding_backward(params["E_kind"], kind, de[:, :, E:2 * E]),
            "E_day": embedding_backward(params["E_day"], off, de[:, :, 2 * E:]),
            "attn.W": dW,
            "attn.b": db,
        }
        for k, v in grads_f.items():
            grads[f"f.{k}"] = v
        for k, v in grads_b.items():
            grads[f"b.{k}"] = v
        return grads

    def loss_and_grads(self, params, seqs, labels_minor):
        """Mean squared relative error and its gradients (gradcheck hook)."""
        bucket, kind, off, amt, mask = self._assemble(seqs)
        y, cache = self._forward(params, bucket, kind, off, amt, mask)
        t = np.asarray(labels_minor, dtype=float) / MINOR_PER_UNIT
        resid = (y - t) / t
        loss = float(np.mean(resid ** 2))
        dy = 2.0 * resid / t / len(t)
        grads = self._backward(params, cache, dy)
        return loss, grads

    # -- estimator API ---------------------------------------------------------

    def fit(self, X, y, validation=None):
        """Train on sequences ``X`` with minor-unit labels ``y``.

        Stops when validation MAPE has not improved for ``patience``
        epochs and restores the best checkpoint. ``validation`` is an
        optional (X_val, y_val) pair; without it a 10% tail split of the
        shuffled training rows is held out.
        """
        if len(X) == 0:
            raise ConfigurationError("empty training set")
        y = np.asarray(y, dtype=np.int64)
        if np.any(y <= 0):
            raise ConfigurationError("labels must be positive minor-unit balances")
        rng = derive_rng(self.seed, "predictor")
        keep = [i for i in range(len(X)) if len(X[i]) > 0]
        X = [X[i] for i in keep]
        y = y[keep]
        if validation is None:
            perm = rng.permutation(len(X))
            n_val = max(1, len(X) // 10)
            val_idx, train_idx = perm[:n_val], perm[n_val:]
            X_val = [X[i] for i in val_idx]
            y_val = y[val_idx]
            X_train = [X[i] for i in train_idx]
            y_train = y[train_idx]
        else:
            X_train, y_train = X, y
            X_val, y_val = validation
            y_val = np.asarray(y_val, dtype=np.int64)
        if len(X_train) == 0 or len(X_val) == 0:
            raise ConfigurationError("training/validation split is empty")

        params = self._init_params(rng)
        opt = adam_init(params, lr=self.lr)
        best_mape = np.inf
        best_params = {k: v.copy() for k, v in params.items()}
        bad_epochs = 0
        history = []
        n = len(X_train)
        for epoch in range(self.max_epochs):
            perm = rng.permutation(n)
            epoch_loss = 0.0
            n_batches = 0
            for start in range(0, n, self.batch):
                idx = perm[start:start + self.batch]
                seqs = [X_train[i] for i in idx]
                loss, grads = self.loss_and_grads(params, seqs, y_train[idx])
                if not np.isfinite(loss):
                    raise TrainingDivergenceError("non-finite predictor loss")
                params = adam_step(opt, params, grads)
                epoch_loss += loss
                n_batches += 1
            val_mape = mape(
                self._predict_minor(params, X_val), y_val.astype(float)
            )
            history.append((epoch, epoch_loss / max(n_batches, 1), val_mape))
            if val_mape < best_mape - 1e-6:
                best_mape = val_mape
                best_params = {k: v.copy() for k, v in params.items()}
                bad_epochs = 0
            else:
                bad_epochs += 1
                if bad_epochs > self.patience:
                    break
        self.params_ = best_params
        self.val_mape_ = float(best_mape)
        self.fallback_units_ = float(np.median(y_train)) / MINOR_PER_UNIT
        self.history_ = history
        return self

    def _predict_minor(self, params, X, chunk=512):
        out = np.zeros(len(X))
        fallback = getattr(self, "fallback_units_", None)
        nonempty = [i for i in range(len(X)) if len(X[i]) > 0]
        empty = [i for i in range(len(X)) if len(X[i]) == 0]
        for start in range(0, len(nonempty), chunk):
            idx = nonempty[start:start + chunk]
            bucket, kind, off, amt, mask = self._assemble([X[i] for i in idx])
            y, _ = self._forward(params, bucket, kind, off, amt, mask)
            out[idx] = y * MINOR_PER_UNIT
        if empty:
            if fallback is None:
                raise DomainError("empty sequence requires a fitted fallback")
            out[empty] = fallback * MINOR_PER_UNIT
        return out

    def predict(self, X):
        """Balance estimates in currency units."""
        check_is_fitted(self, "params_")
        return self._predict_minor(self.params_, X) / MINOR_PER_UNIT

    def predict_minor(self, X):
        """Balance estimates rounded to integer minor units (replay input)."""
        check_is_fitted(self, "params_")
        raw = self._predict_minor(self.params_, X)
        return np.rint(raw).astype(np.int64)

    # -- persistence -----------------------------------------------------------

    def save(self, path):
        check_is_fitted(self, "params_")
        from ..nn.checkpoint import save_params

        meta = {
            "kind": "balance-predictor",
            "fallback_units": self.fallback_units_,
            "val_mape": self.val_mape_,
            "params": self.get_params(),
        }
        save_params(path, self.params_, meta)

    @classmethod
    def load(cls, path):
        from ..nn.checkpoint import load_params

        params, meta = load_params(path)
        if meta.get("kind") != "balance-predictor":
            raise ConfigurationError(f"checkpoint at {path} is not a balance predictor")
        model = cls(**meta["params"])
        model.params_ = params
        model.fallback_units_ = float(meta["fallback_units"])
        model.val_mape_ = float(meta["val_mape"])
        model.history_ = []
        return model

    # -- inspection helpers (single sequence) -------------------------------

    def embed_event(self, event, reference_day):
        """Embedding vector of one event relative to ``reference_day``."""
        check_is_fitted(self, "params_")
        if event.day > reference_day:
            raise DomainError("event lies after the reference day")
        seq = [(reference_day - event.day, 0 if event.kind == "consumption" else 1, event.amount)]
        bucket, kind, off, _, _ = self._assemble([seq])
        p = self.params_
        return np.concatenate(
            [p["E_amt"][bucket[0, 0]], p["E_kind"][kind[0, 0]], p["E_day"][off[0, 0]]]
        )

    def encode_sequence(self, seq):
        """Per-event hidden states (N, 2*hidden_dim) for one sequence."""
        check_is_fitted(self, "params_")
        if not seq:
            raise DomainError("cannot encode an empty sequence")
        bucket, kind, off, amt, mask = self._assemble([seq])
        p = self.params_
        e = np.concatenate(
            [p["E_amt"][bucket], p["E_kind"][kind], p["E_day"][off]], axis=2
        )
        hs, _ = bilstm_forward(self._split(p, "f"), self._split(p, "b"), e, mask)
        return hs[0]

    def attention_weights(self, hidden_states):
        """Probability weights over a (N, 2*hidden) stack of hidden states."""
        check_is_fitted(self, "params_")
        logits = hidden_states @ self.params_["attn.W"] + self.params_["attn.b"][0]
        return masked_softmax(logits[None, :], np.ones((1, len(logits))))[0]

    def predict_one(self, events, reference_day):
        """Balance estimate in currency units for one account-day."""
        seq = build_sequence(events, reference_day, self.lookback_days, self.max_events)
        return float(self.predict([seq])[0])


# -- module-level operation surface ---------------------------------------

def embed_event(model, event, reference_day):
    return model.embed_event(event, reference_day)


def encode_sequence(model, seq):
    return model.encode_sequence(seq)


def attention_weights(model, hidden_states):
    return model.attention_weights(hidden_states)


def predict_balance(model, seq):
    """Attention-weighted balance estimate (currency units) for one sequence."""
    return float(model.predict([seq])[0])


def train_predictor(records, cfg, seed=0, val_fraction=0.2):
    """Fit a ``BalancePredictor`` on a population's privileged labels.

    Splits label rows by account (the validation accounts contribute no
    training rows), subsamples to ``cfg.max_labels`` training rows, and
    returns (model, report) where the report carries the held-out MAPE
    and row counts.
    """
    ids, days, seqs, labels = build_label_rows(
        records, lookback_days=cfg.lookback_days, max_events=cfg.max_events,
        target=cfg.target,
    )
    if len(seqs) == 0:
        raise ConfigurationError("no labeled rows: population has no positive-balance days")
    unique_ids = sorted(set(ids))
    rng = derive_rng(seed, "predictor-split")
    perm = rng.permutation(len(unique_ids))
    n_val = max(1, int(len(unique_ids) * val_fraction))
    val_accounts = {unique_ids[i] for i in perm[:n_val]}
    train_rows = [i for i in range(len(seqs)) if ids[i] not in val_accounts]
    val_rows = [i for i in range(len(seqs)) if ids[i] in val_accounts]
    if len(train_rows) > cfg.max_labels:
        pick = rng.permutation(len(train_rows))[:cfg.max_labels]
        train_rows = [train_rows[i] for i in sorted(pick)]

    model = BalancePredictor(
        embed_dim=cfg.embed_dim, hidden_dim=cfg.hidden_dim,
        lookback_days=cfg.lookback_days, max_events=cfg.max_events,
        lr=cfg.lr, batch=cfg.batch, patience=cfg.patience,
        max_epochs=cfg.max_epochs, seed=seed,
    )
    model.fit(
        [seqs[i] for i in train_rows], labels[train_rows],
        validation=([seqs[i] for i in val_rows], labels[val_rows]),
    )
    val_pred = model.predict_minor([seqs[i] for i in val_rows])
    report = {
        "train_rows": len(train_rows),
        "val_rows": len(val_rows),
        "val_mape": mape(val_pred.astype(float), labels[val_rows].astype(float)),
        "rows": [
            (ids[i], days[i], int(labels[i]), int(val_pred[j]))
            for j, i in enumerate(val_rows)
        ],
    }
    return model, report
