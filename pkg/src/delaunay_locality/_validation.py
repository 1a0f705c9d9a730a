"""Input validation helpers shared by every module."""

import numbers

import numpy as np

from .exceptions import InvalidInputError


def check_vector(v, size=None, name="vector"):
    """Return ``v`` as a finite 1-D float array, optionally of length ``size``."""
    try:
        arr = np.asarray(v, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name} is not numeric: {exc}") from None
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be 1-D, got shape {arr.shape}")
    if size is not None and arr.shape[0] != size:
        raise InvalidInputError(
            f"{name} has length {arr.shape[0]}, expected {size}"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def check_matrix(m, shape=None, name="matrix"):
    try:
        arr = np.asarray(m, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name} is not numeric: {exc}") from None
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {arr.shape}")
    if shape is not None:
        for axis, (got, want) in enumerate(zip(arr.shape, shape)):
            if want is not None and got != want:
                raise InvalidInputError(
                    f"{name} has shape {arr.shape}; axis {axis} should be {want}"
                )
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def check_scalar(x, name, *, min_val=None, max_val=None, include_min=True,
                 include_max=True, integer=False):
    """Validate a scalar parameter, in the spirit of ``sklearn.utils.check_scalar``."""
    kind = numbers.Integral if integer else numbers.Real
    if isinstance(x, bool) or not isinstance(x, kind):
        raise InvalidInputError(f"{name} must be {'an integer' if integer else 'a real number'}, got {x!r}")
    if not np.isfinite(x):
        raise InvalidInputError(f"{name} must be finite, got {x!r}")
    if min_val is not None:
        if x < min_val or (x == min_val and not include_min):
            raise InvalidInputError(f"{name}={x!r} is below the allowed range")
    if max_val is not None:
        if x > max_val or (x == max_val and not include_max):
            raise InvalidInputError(f"{name}={x!r} is above the allowed range")
    return x
