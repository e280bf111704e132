"""Analyzer and detector pipeline.

An :class:`Analyzer` splits the incoming state into one branch per distinct
eigenvalue of its observable. In each event the sampled physical state
fixes the branch taken (:func:`route_nucleus`); the detector then collapses
the state with the Lüders projection. If the detector sits on a branch the
event did not take, the state still updates by dropping that branch
(:func:`negative_measurement`).
"""

from dataclasses import dataclass

import numpy as np

from ._config import get_config
from ._validation import check_observable, check_same_dim
from .algebra import joint_diagonalize, spectral_decompose
from .exceptions import NoMatchingBranch, ValidationError, ZeroProbabilityBranch
from .states import QuantumState, evaluate, sample_outcome_indices, sample_physical_state

__all__ = [
    "Analyzer",
    "MeasurementRecord",
    "branch_probabilities",
    "branch_probability",
    "detect",
    "joint_readout",
    "measurement_average",
    "negative_measurement",
    "nonselective_update",
    "route_nucleus",
    "sample_branches",
]


@dataclass(frozen=True, eq=False)
class Analyzer:
    observable: np.ndarray
    decomposition: object
    context: object
    # Value of the observable on each context basis vector.
    basis_values: np.ndarray

    @classmethod
    def for_observable(cls, A, context=None):
        """Analyzer for ``A``; by default its context is built from ``A`` alone."""
        A = check_observable(A)
        decomposition = spectral_decompose(A)
        if context is None:
            context = joint_diagonalize([A])
        check_same_dim(A, context.basis)
        return cls(A, decomposition, context, context.diagonal_of(A))

    @property
    def eigenvalues(self):
        return self.decomposition.eigenvalues

    @property
    def n_branches(self):
        return len(self.decomposition)

    def projector(self, i):
        return self.decomposition.projectors[i]


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    branch_index: int
    outcome_value: float
    pre_state: QuantumState
    post_state: QuantumState
    phi_event_id: int
    detected: bool

    def to_dict(self, seed=None):
        return {
            "branch_index": self.branch_index,
            "outcome_value": self.outcome_value,
            "detected": self.detected,
            "phi_event_id": self.phi_event_id,
            "seed": seed,
        }


def route_nucleus(phi, analyzer):
    """Index of the branch whose eigenvalue equals the value of the observable in ``phi``."""
    if phi.context is analyzer.context:
        value = float(analyzer.basis_values[phi.outcome_index])
    else:
        value = evaluate(phi, analyzer.observable)
    tol = get_config().branch_match
    matches = np.flatnonzero(np.abs(analyzer.eigenvalues - value) <= tol)
    if len(matches) != 1:
        raise NoMatchingBranch(f"value {value!r} matches {len(matches)} analyzer branches")
    return int(matches[0])


def sample_branches(state, analyzer, n, rng=None):
    """Branch indices taken by ``n`` fresh events; vectorized :func:`route_nucleus`.

    Returns ``(branches, event_ids)``.
    """
    check_same_dim(state.rho, analyzer.observable)
    indices, ids = sample_outcome_indices(state, analyzer.context, n, rng)
    tol = get_config().branch_match
    hits = np.abs(analyzer.basis_values[:, None] - analyzer.eigenvalues[None, :]) <= tol
    if np.any(hits.sum(axis=1) != 1):
        raise NoMatchingBranch("analyzer context has a basis vector matching no single branch")
    return np.argmax(hits, axis=1)[indices], ids


def joint_readout(phi, analyzers):
    """Outcome tuple of several analyzers read in the same event."""
    return tuple(float(a.eigenvalues[route_nucleus(phi, a)]) for a in analyzers)


def _check_branch(analyzer, i):
    if not 0 <= i < analyzer.n_branches:
        raise ValidationError(f"branch index {i} outside [0, {analyzer.n_branches})")


def branch_probability(state, analyzer, i):
    """Weight ``Tr(rho P_i)`` of branch ``i``, clamped to [0, 1]."""
    _check_branch(analyzer, i)
    check_same_dim(state.rho, analyzer.observable)
    w = float(np.trace(state.rho @ analyzer.projector(i)).real)
    return min(max(w, 0.0), 1.0)


def branch_probabilities(state, analyzer):
    return np.array([branch_probability(state, analyzer, i) for i in range(analyzer.n_branches)])


def measurement_average(state, analyzer):
    """Branch-weighted mean ``sum_i W_i A_i``."""
    return float(np.dot(branch_probabilities(state, analyzer), analyzer.eigenvalues))


def _project(rho, P):
    sigma = P @ rho @ P
    weight = float(np.trace(sigma).real)
    if weight < get_config().zero_probability:
        raise ZeroProbabilityBranch(f"projected weight {weight:.3g} is numerically zero")
    sigma = sigma / weight
    # P rho P / Tr(P rho P) is positive with unit trace for any projector P.
    return QuantumState._trusted((sigma + sigma.conj().T) / 2)


def detect(state, analyzer, rng=None):
    """One event with the detector on the branch actually taken."""
    check_same_dim(state.rho, analyzer.observable)
    phi = sample_physical_state(state, analyzer.context, rng)
    i = route_nucleus(phi, analyzer)
    post = _project(state.rho, analyzer.projector(i))
    return MeasurementRecord(i, float(analyzer.eigenvalues[i]), state, post, phi.event_id, True)


def negative_measurement(state, analyzer, detector_branch, rng=None):
    """One event with a single detector placed on ``detector_branch``.

    If the event takes another branch the detector stays silent and the
    state loses its ``detector_branch`` component.
    """
    if analyzer.n_branches < 2:
        raise ValidationError("negative measurement needs an analyzer with at least two branches")
    _check_branch(analyzer, detector_branch)
    check_same_dim(state.rho, analyzer.observable)
    phi = sample_physical_state(state, analyzer.context, rng)
    i = route_nucleus(phi, analyzer)
    value = float(analyzer.eigenvalues[i])
    if i == detector_branch:
        post = _project(state.rho, analyzer.projector(i))
        return MeasurementRecord(i, value, state, post, phi.event_id, True)
    complement = np.eye(state.dim) - analyzer.projector(detector_branch)
    post = _project(state.rho, complement)
    return MeasurementRecord(i, value, state, post, phi.event_id, False)


def nonselective_update(state, analyzer):
    """Post-measurement state averaged over outcomes, ``sum_i P_i rho P_i``."""
    check_same_dim(state.rho, analyzer.observable)
    rho = sum(P @ state.rho @ P for P in analyzer.decomposition.projectors)
    return QuantumState((rho + rho.conj().T) / 2)

