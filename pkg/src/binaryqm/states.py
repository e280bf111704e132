"""Quantum states, per-event physical states and their averages.

A :class:`QuantumState` is a density matrix; its expectation functional is
the ensemble average. A :class:`PhysicalState` is a single event: a context
together with the joint eigenvector selected in that event. Its valuation
:func:`evaluate` is defined only on observables of its own context, where it
is additive and multiplicative.
"""

import threading
from dataclasses import dataclass

import numpy as np

from ._config import get_config
from ._validation import as_matrix, check_observable, check_same_dim, freeze, hermitian_residual
from .algebra import Context
from .exceptions import DegenerateWeights, InvalidState
from .random import check_random_state

__all__ = [
    "AverageEstimate",
    "PhysicalState",
    "QuantumState",
    "are_equivalent",
    "born_weights",
    "evaluate",
    "evaluate_complex",
    "monte_carlo_average",
    "next_event_ids",
    "partial_trace",
    "quantum_average",
    "sample_outcome_indices",
    "sample_physical_state",
    "sample_physical_states",
]


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Density matrix, validated on construction."""

    rho: np.ndarray

    def __post_init__(self):
        cfg = get_config()
        rho = as_matrix(self.rho, "rho")
        res = hermitian_residual(rho)
        if res > cfg.trace:
            raise InvalidState(f"density matrix is not Hermitian (residual {res:.3g})")
        rho = (rho + rho.conj().T) / 2
        tr = np.trace(rho).real
        if abs(tr - 1.0) > cfg.trace:
            raise InvalidState(f"density matrix has trace {tr!r}, expected 1")
        # rho + tol*I is positive definite iff every eigenvalue of rho exceeds -tol.
        try:
            np.linalg.cholesky(rho + cfg.trace * np.eye(rho.shape[0]))
        except np.linalg.LinAlgError:
            raise InvalidState("density matrix has a negative eigenvalue") from None
        object.__setattr__(self, "rho", freeze(rho))

    @classmethod
    def _trusted(cls, rho):
        """Wrap a matrix that is a density matrix by construction; skips validation."""
        self = object.__new__(cls)
        object.__setattr__(self, "rho", freeze(rho))
        return self

    @classmethod
    def from_vector(cls, psi):
        psi = np.asarray(psi, dtype=np.complex128).ravel()
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise InvalidState("zero state vector")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dim):
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @property
    def dim(self):
        return self.rho.shape[0]

    def purity(self):
        return float(np.trace(self.rho @ self.rho).real)


class _EventCounter:
    """Process-wide monotone source of event ids; never hands out an id twice."""

    def __init__(self):
        self._lock = threading.Lock()
        self._last = -1

    def allocate(self, n):
        with self._lock:
            start = self._last + 1
            self._last += n
        return np.arange(start, start + n)


_events = _EventCounter()


def next_event_ids(n):
    return _events.allocate(int(n))


@dataclass(frozen=True, eq=False)
class PhysicalState:
    context: Context
    outcome_index: int
    event_id: int

    def __post_init__(self):
        if not 0 <= self.outcome_index < self.context.dim:
            raise InvalidState(
                f"outcome index {self.outcome_index} outside [0, {self.context.dim})"
            )

    @property
    def vector(self):
        return self.context.vector(self.outcome_index)


@dataclass(frozen=True)
class AverageEstimate:
    mean: float
    std_error: float
    n_samples: int


def quantum_average(state, A):
    """Ensemble average ``Tr(rho A)``."""
    A = check_observable(A)
    check_same_dim(state.rho, A)
    value = np.trace(state.rho @ A)
    return float(value.real)


def born_weights(state, ctx):
    """Probability ``<e_k|rho|e_k>`` of each basis vector of ``ctx``."""
    cfg = get_config()
    check_same_dim(state.rho, ctx.basis)
    B = ctx.basis
    p = np.real(np.einsum("ik,ij,jk->k", B.conj(), state.rho, B))
    p[p <= cfg.weight_floor] = 0.0
    total = p.sum()
    if abs(total - 1.0) > cfg.weights:
        raise DegenerateWeights(f"sampling weights sum to {total!r}")
    return p / total


def sample_outcome_indices(state, ctx, n, rng=None):
    """Draw ``n`` fresh events; return their basis indices and event ids."""
    rng = check_random_state(rng)
    return _draw(born_weights(state, ctx), n, rng), next_event_ids(n)


def _draw(p, n, rng):
    """Inverse-CDF sampling; indices with zero weight are never drawn."""
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    return np.searchsorted(cdf, rng.random(n), side="right")


def sample_physical_state(state, ctx, rng=None):
    indices, ids = sample_outcome_indices(state, ctx, 1, rng)
    return PhysicalState(ctx, int(indices[0]), int(ids[0]))


def sample_physical_states(state, ctx, n, rng=None):
    indices, ids = sample_outcome_indices(state, ctx, n, rng)
    return [PhysicalState(ctx, int(k), int(i)) for k, i in zip(indices, ids)]


def evaluate(phi, A):
    """Value of observable ``A`` in the single event ``phi``.

    Raises :class:`NonCommuting` if ``A`` is not diagonal in the context of
    ``phi``: only commuting observables are read out in one experiment.
    """
    return float(phi.context.diagonal_of(A)[phi.outcome_index])


def evaluate_complex(phi, X):
    """Extend :func:`evaluate` to non-Hermitian ``X`` by linearity over ``i``."""
    X = as_matrix(X)
    herm = (X + X.conj().T) / 2
    anti = (X - X.conj().T) / 2j
    return complex(evaluate(phi, herm), evaluate(phi, anti))


def monte_carlo_average(state, ctx, A, n, rng=None):
    """Average of :func:`evaluate` over ``n`` sampled events."""
    if n < 1:
        raise ValueError("n must be positive")
    values = ctx.diagonal_of(A)
    check_same_dim(state.rho, ctx.basis)
    indices, _ = sample_outcome_indices(state, ctx, n, rng)
    samples = values[indices]
    mean = float(samples.mean())
    se = float(samples.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return AverageEstimate(mean, se, int(n))


def are_equivalent(phi1, phi2):
    """Same context and same selected eigenvector; event ids are ignored."""
    return phi1.outcome_index == phi2.outcome_index and phi1.context.same_basis(phi2.context)


def partial_trace(rho, dims, keep):
    """Reduced density matrix on the subsystems listed in ``keep``."""
    rho = np.asarray(rho)
    dims = list(dims)
    n = len(dims)
    if int(np.prod(dims)) != rho.shape[0]:
        raise ValueError(f"dims {dims} do not match matrix size {rho.shape[0]}")
    keep = sorted(keep)
    trace_out = [i for i in range(n) if i not in keep]
    t = rho.reshape(dims + dims)
    for count, i in enumerate(sorted(trace_out, reverse=True)):
        m = n - count
        t = np.trace(t, axis1=i, axis2=i + m)
    d = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(d, d)
