"""Input-validation helpers shared by the estimator-style classes."""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, DomainError


class NotFittedError(ConfigurationError):
    """Estimator used before ``fit`` was called."""


def check_is_fitted(estimator, attributes):
    """Raise ``NotFittedError`` unless every fitted attribute is present."""
    if isinstance(attributes, str):
        attributes = [attributes]
    missing = [a for a in attributes if getattr(estimator, a, None) is None]
    if missing:
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted; call fit() first "
            f"(missing: {', '.join(missing)})"
        )


def check_positive(name, value, strict=True):
    if strict and value <= 0:
        raise ConfigurationError(f"{name} must be > 0, got {value}")
    if not strict and value < 0:
        raise ConfigurationError(f"{name} must be >= 0, got {value}")
    return value


def check_unit_interval(name, value):
    if not 0.0 <= value <= 1.0:
        raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")
    return value


def check_finite_array(name, arr):
    arr = np.asarray(arr, dtype=float)
    if arr.size and not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    return arr
