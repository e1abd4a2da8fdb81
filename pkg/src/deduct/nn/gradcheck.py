"""Central finite-difference verification of analytic gradients."""

from __future__ import annotations

import numpy as np


def grad_check(model_fn, params, tolerance=1e-4, max_coords_per_param=64, rng=None):
    """Compare ``model_fn``'s analytic gradients with finite differences.

    ``model_fn(params)`` must return ``(loss, grads)`` with grads keyed
    like params. Large tensors are spot-checked on a random coordinate
    subset. Returns a report dict with per-parameter max relative error
    and an overall pass flag.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    _, analytic = model_fn(params)
    per_param = {}
    for name, p in params.items():
        flat = p.reshape(-1)
        n = flat.size
        if n <= max_coords_per_param:
            coords = np.arange(n)
        else:
            coords = rng.choice(n, size=max_coords_per_param, replace=False)
        a_flat = analytic[name].reshape(-1)
        worst = 0.0
        for idx in coords:
            orig = flat[idx]
            h = 1e-5 * max(1.0, abs(orig))
            flat[idx] = orig + h
            loss_plus, _ = model_fn(params)
            flat[idx] = orig - h
            loss_minus, _ = model_fn(params)
            flat[idx] = orig
            numeric = (loss_plus - loss_minus) / (2.0 * h)
            denom = max(abs(a_flat[idx]), abs(numeric), 1e-8)
            worst = max(worst, abs(a_flat[idx] - numeric) / denom)
        per_param[name] = worst
    overall = max(per_param.values()) if per_param else 0.0
    return {
        "per_param": per_param,
        "max_rel_err": overall,
        "tolerance": tolerance,
        "passed": overall < tolerance,
    }
