"""Input validation helpers shared by the public modules."""

import numpy as np

from ._config import get_config
from .exceptions import DimensionMismatch, NotHermitian, ValidationError


def as_matrix(A, name="matrix"):
    """Return ``A`` as a read-only square complex128 array."""
    M = np.array(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError(f"{name} has non-finite entries")
    M.setflags(write=False)
    return M


def hermitian_residual(M):
    return float(np.max(np.abs(M - M.conj().T)))


def check_observable(A, name="observable", tol=None):
    """Validate a Hermitian matrix and return it as a read-only array."""
    M = as_matrix(A, name)
    tol = get_config().hermitian if tol is None else tol
    res = hermitian_residual(M)
    if res > tol:
        raise NotHermitian(f"{name} is not Hermitian (residual {res:.3g} > {tol:g})")
    return M


def check_same_dim(*mats):
    dims = {m.shape[0] for m in mats}
    if len(dims) > 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def max_norm(M):
    return float(np.max(np.abs(M))) if M.size else 0.0


def freeze(a):
    a = np.asarray(a)
    a.setflags(write=False)
    return a
