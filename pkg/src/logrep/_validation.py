"""Input validation helpers shared by the public functions and estimators."""

import numbers

import numpy as np


def check_square(a, name="a", allow_batch=False):
    """Return ``a`` as a finite complex array of square matrices.

    A single matrix has shape ``(n, n)``; with ``allow_batch`` any leading
    batch shape is accepted.  Scalars are promoted to ``1 x 1``.
    """
    arr = np.asarray(a)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.dtype == object:
        raise TypeError(f"{name} must be numeric, got object array")
    arr = arr.astype(complex, copy=False)
    if arr.ndim < 2 or (arr.ndim > 2 and not allow_batch):
        raise ValueError(f"{name} must be a square matrix, got shape {arr.shape}")
    if arr.shape[-1] != arr.shape[-2] or arr.shape[-1] == 0:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def check_operator_stack(X, name="X"):
    """Coerce one matrix or a stack of matrices to shape ``(k, n, n)``."""
    arr = check_square(X, name=name, allow_batch=True)
    if arr.ndim == 2:
        arr = arr[None]
    return arr.reshape((-1,) + arr.shape[-2:])


def check_vector(v, dim, name="v"):
    arr = np.atleast_1d(np.asarray(v)).astype(complex)
    if arr.shape != (dim,):
        raise ValueError(f"{name} must have shape ({dim},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def check_positive(x, name):
    if not isinstance(x, numbers.Real) or not np.isfinite(x) or x <= 0:
        raise ValueError(f"{name} must be a positive real number, got {x!r}")
    return float(x)


def check_same_dim(a, b, op="operation"):
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(
            f"dimension mismatch in {op}: {a.shape[-1]} vs {b.shape[-1]}")
