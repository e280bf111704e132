"""Randomized checks of the valuation rules on sampled physical states.

Used by ``binary-qm postulates``. Every check returns a :class:`CheckResult`;
a run passes when all of them do.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import joint_diagonalize, operator_norm
from .random import check_random_state, random_density_matrix, random_hermitian, random_unitary
from .states import QuantumState, evaluate, monte_carlo_average, quantum_average, sample_physical_states

__all__ = ["CheckResult", "random_context", "run_postulate_suite"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    count: int

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "count": self.count,
        }


class _Tracker:
    def __init__(self, name, tolerance):
        self.name = name
        self.tolerance = tolerance
        self.worst = 0.0
        self.count = 0

    def add(self, value):
        self.count += 1
        self.worst = max(self.worst, float(value))

    def result(self):
        return CheckResult(self.name, self.worst <= self.tolerance, self.worst, self.tolerance, self.count)


def random_context(dim, rng, n_members=2):
    """Context of ``n_members`` random observables sharing a random eigenbasis."""
    U = random_unitary(dim, rng)
    members = []
    for _ in range(n_members):
        spectrum = rng.normal(size=dim)
        members.append(U @ np.diag(spectrum) @ U.conj().T)
    members = [(M + M.conj().T) / 2 for M in members]
    return joint_diagonalize(members), members


def run_postulate_suite(dims=(2, 3, 4, 5, 6, 7, 8), n_events=1000, mc_samples=10_000, rng=None):
    """Check the valuation rules on ``n_events`` physical states spread over ``dims``.

    The Monte Carlo convergence check allows 5 standard errors and passes
    if at least 99% of its trials do.
    """
    rng = check_random_state(rng)
    identity = _Tracker("scalar: phi(lambda I) == lambda", 1e-9)
    additive = _Tracker("additive: phi(A+B) == phi(A)+phi(B)", 1e-9)
    multiplicative = _Tracker("multiplicative: phi(AB) == phi(A)phi(B)", 1e-9)
    positive = _Tracker("positive: phi(A*A) >= 0", 1e-9)
    linear = _Tracker("linear average on non-commuting sums", 1e-10)
    norm_zero = _Tracker("norm: ||0|| == 0", 0.0)
    norm_positive = _Tracker("norm: ||A|| > 0 for A != 0", 0.0)
    convergence_misses = 0
    convergence_trials = 0
    event_ids = []

    base, extra = divmod(n_events, len(dims))
    for k, (dim, child) in enumerate(zip(dims, rng.spawn(len(dims)))):
        zero = np.zeros((dim, dim))
        norm_zero.add(operator_norm(zero))
        remaining = base + (k < extra)
        while remaining > 0:
            batch = min(10, remaining)
            remaining -= batch
            ctx, (A, B) = random_context(dim, child)
            state = QuantumState(random_density_matrix(dim, child))
            for phi in sample_physical_states(state, ctx, batch, child):
                event_ids.append(phi.event_id)
                lam = float(child.normal())
                identity.add(abs(evaluate(phi, lam * np.eye(dim)) - lam))
                a, b = evaluate(phi, A), evaluate(phi, B)
                additive.add(abs(evaluate(phi, A + B) - (a + b)))
                multiplicative.add(abs(evaluate(phi, A @ B) - a * b))
                positive.add(max(0.0, -evaluate(phi, A.conj().T @ A)))

            # Non-commuting A, B: the average is still linear.
            X, Y = random_hermitian(dim, child), random_hermitian(dim, child)
            linear.add(abs(quantum_average(state, X + Y) - quantum_average(state, X) - quantum_average(state, Y)))
            norm_positive.add(0.0 if operator_norm(X) > 0 else 1.0)

            est = monte_carlo_average(state, ctx, A, mc_samples, child)
            exact = quantum_average(state, A)
            convergence_trials += 1
            if abs(est.mean - exact) > 5 * est.std_error:
                convergence_misses += 1

    results = [t.result() for t in (identity, additive, multiplicative, positive, linear, norm_zero, norm_positive)]
    miss_rate = convergence_misses / convergence_trials
    results.append(CheckResult("convergence: |MC - exact| <= 5 se", miss_rate <= 0.01, miss_rate, 0.01, convergence_trials))
    duplicates = len(event_ids) - len(set(event_ids))
    results.append(CheckResult("uniqueness: event ids distinct", duplicates == 0, float(duplicates), 0.0, len(event_ids)))
    return results
