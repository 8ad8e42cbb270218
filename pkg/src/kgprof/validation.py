"""Input checks shared by the estimators."""

from __future__ import annotations

import math
from collections.abc import Mapping

from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_is_fitted as _sk_check_is_fitted

__all__ = ["check_is_fitted", "check_threshold", "check_label_map", "check_pairs", "NotFittedError"]


def check_is_fitted(estimator, attributes):
    _sk_check_is_fitted(estimator, attributes)


def check_threshold(value, name="threshold"):
    value = float(value)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def check_label_map(labels, name="labels"):
    """Validate ``{entity: iterable of str}`` and return it with frozenset values.

    Entities whose label set is empty are dropped.
    """
    if not isinstance(labels, Mapping):
        raise TypeError(f"{name} must be a mapping of entity -> labels, got {type(labels).__name__}")
    out = {}
    for entity, values in labels.items():
        if isinstance(values, str):
            values = (values,)
        values = frozenset(values)
        for v in values:
            if not isinstance(v, str):
                raise TypeError(f"{name}[{entity!r}] contains a non-string label {v!r}")
        if values:
            out[entity] = values
    return out


def check_pairs(pairs, name="pairs"):
    """Return ``pairs`` as a set of 2-tuples."""
    out = set()
    for pair in pairs:
        pair = tuple(pair)
        if len(pair) != 2:
            raise ValueError(f"{name} must contain 2-tuples, got {pair!r}")
        out.add(pair)
    return out
