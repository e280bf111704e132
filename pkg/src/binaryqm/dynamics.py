"""Heisenberg-picture time evolution.

Physical states keep their context; observables carry the time dependence,
``A(t) = U(t)* A U(t)`` with ``U(t) = exp(-iHt/hbar)``. The exponential is
taken in closed form from the spectral decomposition of ``H``.
"""

import numpy as np

from ._config import get_config
from ._validation import check_observable, check_same_dim, max_norm
from .algebra import eigh
from .states import QuantumState, evaluate

__all__ = ["evolved_evaluate", "heisenberg_evolve", "schrodinger_evolve", "unitary_at"]


def unitary_at(H, t, hbar=None):
    """Propagator ``exp(-i H t / hbar)``."""
    hbar = get_config().hbar if hbar is None else hbar
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    w, V = eigh(H)
    phases = np.exp(-1j * w * (t / hbar))
    return (V * phases) @ V.conj().T


def heisenberg_evolve(A, H, t, hbar=None):
    """Observable ``A(t)`` solving ``dA/dt = (i/hbar)[H, A]`` with ``A(0) = A``."""
    A = check_observable(A)
    H = check_observable(H, "hamiltonian")
    check_same_dim(A, H)
    # Zero commutator: the equation of motion has the constant solution.
    if t == 0 or max_norm(H @ A - A @ H) <= get_config().conserved:
        return A
    U = unitary_at(H, t, hbar)
    At = U.conj().T @ A @ U
    return (At + At.conj().T) / 2


def schrodinger_evolve(state, H, t, hbar=None):
    """State ``U rho U*``; same predictions as :func:`heisenberg_evolve`."""
    U = unitary_at(H, t, hbar)
    rho = U @ state.rho @ U.conj().T
    return QuantumState((rho + rho.conj().T) / 2)


def evolved_evaluate(phi, A, H, t, hbar=None):
    """Value of ``A`` at time ``t`` in event ``phi``.

    Raises :class:`~binaryqm.exceptions.NonCommuting` once ``A(t)`` has left
    the context of ``phi``; from then on only ensemble predictions exist.
    """
    return evaluate(phi, heisenberg_evolve(A, H, t, hbar))
