"""EPR-Bohm and CHSH experiments on two spin-1/2 particles.

Two estimators of the CHSH quantity sit side by side:

* :func:`chsh_lhv` evaluates every correlation with the *same* hidden
  variable, so one value answers all four settings; the sum can never
  exceed 2.
* :func:`chsh_contextual` runs each setting pair as its own experiment.
  Every event draws a fresh physical state in the context of that pair,
  and the four sets of events are disjoint. No single event assigns values
  to both ``B_b`` and ``B_b'`` (they do not commute), so the step that
  bounds the sum by 2 has nothing to act on, and the estimate reproduces
  the quantum value ``2*sqrt(2)``.
"""

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ._config import get_config
from ._validation import check_same_dim
from .algebra import IDENTITY_2, PAULI_X, PAULI_Y, PAULI_Z, joint_diagonalize
from .exceptions import BadDistribution, NotCommuting, NotUnit, NumericalFailure, ValidationError
from .measurement import Analyzer, detect
from .random import check_random_state
from .states import AverageEstimate, QuantumState, quantum_average, sample_outcome_indices

__all__ = [
    "SETTING_PAIRS",
    "ChshResult",
    "EprRecord",
    "LhvStrategy",
    "SpinDirection",
    "chsh_contextual",
    "chsh_exact",
    "chsh_lhv",
    "chsh_value",
    "common_context",
    "correlation_contextual",
    "correlation_exact",
    "enumerate_lhv_strategies",
    "epr_indirect",
    "max_chsh_lhv",
    "max_chsh_unshared",
    "singlet_state",
    "spin_observable",
]

# Order of the four correlation terms everywhere in this module.
SETTING_PAIRS = (("a", "b"), ("a", "b'"), ("a'", "b"), ("a'", "b'"))


@dataclass(frozen=True)
class SpinDirection:
    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = math.sqrt(self.x**2 + self.y**2 + self.z**2)
        if abs(norm - 1.0) > get_config().unit:
            raise NotUnit(f"direction ({self.x}, {self.y}, {self.z}) has norm {norm!r}")

    @classmethod
    def from_angle(cls, degrees, plane="xz"):
        """Unit vector at ``degrees`` in a coordinate plane.

        In the default ``"xz"`` plane 0 degrees is +z and 90 degrees is +x.
        """
        t = math.radians(degrees)
        c, s = math.cos(t), math.sin(t)
        if plane == "xz":
            return cls(s, 0.0, c)
        if plane == "xy":
            return cls(c, s, 0.0)
        if plane == "yz":
            return cls(0.0, s, c)
        raise ValueError(f"unknown plane {plane!r}")

    @property
    def vector(self):
        return np.array([self.x, self.y, self.z])

    def angle_to(self, other):
        return math.acos(max(-1.0, min(1.0, float(self.vector @ other.vector))))

    def pauli(self):
        return self.x * PAULI_X + self.y * PAULI_Y + self.z * PAULI_Z


def singlet_state():
    """``(|+-> - |-+>)/sqrt(2)`` in the product sigma_z basis."""
    psi = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2)
    return QuantumState.from_vector(psi)


def spin_observable(direction, particle):
    """Spin projection (eigenvalues +-1) of particle ``"A"`` or ``"B"``."""
    if particle == "A":
        return np.kron(direction.pauli(), IDENTITY_2)
    if particle == "B":
        return np.kron(IDENTITY_2, direction.pauli())
    raise ValidationError(f"particle must be 'A' or 'B', got {particle!r}")


@functools.lru_cache(maxsize=256)
def _spin_analyzer(direction, particle):
    return Analyzer.for_observable(spin_observable(direction, particle))


@functools.lru_cache(maxsize=256)
def _pair_context(a, b):
    return joint_diagonalize([spin_observable(a, "A"), spin_observable(b, "B")])


def common_context(*observables):
    """Context in which all ``observables`` are read in one event, or None."""
    try:
        return joint_diagonalize(observables)
    except NotCommuting:
        return None


def _check_two_spins(state):
    if state.dim != 4:
        raise ValidationError(f"two-spin state must be 4-dimensional, got {state.dim}")


def correlation_exact(state, a, b):
    """``Tr(rho A_a B_b)``."""
    _check_two_spins(state)
    return quantum_average(state, spin_observable(a, "A") @ spin_observable(b, "B"))


def _contextual_products(state, a, b, n, rng):
    ctx = _pair_context(a, b)
    check_same_dim(state.rho, ctx.basis)
    # Spin spectra are exactly {-1, +1}; rounding strips eigensolver noise.
    values_a = np.rint(ctx.diagonal_of(spin_observable(a, "A")))
    values_b = np.rint(ctx.diagonal_of(spin_observable(b, "B")))
    indices, ids = sample_outcome_indices(state, ctx, n, rng)
    return values_a[indices] * values_b[indices], ids


def _estimate(products):
    n = len(products)
    se = float(products.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return AverageEstimate(float(products.mean()), se, n)


def correlation_contextual(state, a, b, n, rng=None):
    """Monte Carlo ``E(a, b)`` from ``n`` fresh events in the context of ``{A_a, B_b}``.

    Each event contributes the product of the two spin values read from
    its own physical state.
    """
    _check_two_spins(state)
    if n < 1:
        raise ValueError("n must be positive")
    products, _ = _contextual_products(state, a, b, n, check_random_state(rng))
    return _estimate(products)


def chsh_value(terms):
    """``|E(a,b) - E(a,b')| + |E(a',b) + E(a',b')|`` for terms in :data:`SETTING_PAIRS` order."""
    e_ab, e_abp, e_apb, e_apbp = terms
    return abs(e_ab - e_abp) + abs(e_apb + e_apbp)


@dataclass(frozen=True)
class ChshResult:
    S: float
    terms: tuple
    n_per_setting: int
    mode: str
    std_errors: tuple = None
    # Half-open [start, stop) event-id range used by each setting pair.
    event_ranges: tuple = None
    strategy: object = None
    extra: dict = field(default_factory=dict)

    @property
    def std_error(self):
        """Combined standard error of S (the four terms are independent)."""
        if self.std_errors is None:
            return 0.0
        return math.sqrt(sum(se * se for se in self.std_errors))

    def to_dict(self):
        out = {
            "mode": self.mode,
            "S": self.S,
            "terms": {f"{x},{y}": e for (x, y), e in zip(SETTING_PAIRS, self.terms)},
            "n_per_setting": self.n_per_setting,
        }
        if self.std_errors is not None:
            out["std_errors"] = {f"{x},{y}": s for (x, y), s in zip(SETTING_PAIRS, self.std_errors)}
            out["S_std_error"] = self.std_error
        if self.event_ranges is not None:
            out["event_ranges"] = {
                f"{x},{y}": list(r) for (x, y), r in zip(SETTING_PAIRS, self.event_ranges)
            }
        if self.strategy is not None:
            out["strategy"] = self.strategy.to_dict()
        out.update(self.extra)
        return out


def _settings(a, a_prime, b, b_prime):
    return {"a": a, "a'": a_prime, "b": b, "b'": b_prime}


def chsh_contextual(state, a, a_prime, b, b_prime, n, rng=None):
    """CHSH estimate from four separate experiments of ``n`` events each.

    The four setting pairs draw from independent child streams of ``rng``
    and from disjoint blocks of event ids.
    """
    _check_two_spins(state)
    if n < 1:
        raise ValueError("n must be positive")
    rng = check_random_state(rng)
    dirs = _settings(a, a_prime, b, b_prime)
    terms, errors, ranges = [], [], []
    for (x, y), child in zip(SETTING_PAIRS, rng.spawn(4)):
        products, ids = _contextual_products(state, dirs[x], dirs[y], n, child)
        est = _estimate(products)
        terms.append(est.mean)
        errors.append(est.std_error)
        ranges.append((int(ids[0]), int(ids[-1]) + 1))
    return ChshResult(chsh_value(terms), tuple(terms), n, "contextual", tuple(errors), tuple(ranges))


def chsh_exact(state, a, a_prime, b, b_prime):
    _check_two_spins(state)
    dirs = _settings(a, a_prime, b, b_prime)
    terms = tuple(correlation_exact(state, dirs[x], dirs[y]) for x, y in SETTING_PAIRS)
    return ChshResult(chsh_value(terms), terms, 0, "exact")


@dataclass(frozen=True)
class LhvStrategy:
    """Deterministic local response: one +-1 answer per local setting."""

    a: int
    a_prime: int
    b: int
    b_prime: int

    def __post_init__(self):
        for v in (self.a, self.a_prime, self.b, self.b_prime):
            if v not in (-1, 1):
                raise ValidationError(f"LHV responses must be +-1, got {v!r}")

    @property
    def responses_A(self):
        return {"a": self.a, "a'": self.a_prime}

    @property
    def responses_B(self):
        return {"b": self.b, "b'": self.b_prime}

    def correlation(self, x, y):
        return self.responses_A[x] * self.responses_B[y]

    def to_dict(self):
        return {"A": self.responses_A, "B": self.responses_B}


def enumerate_lhv_strategies():
    """All 16 deterministic strategies."""
    return [LhvStrategy(*signs) for signs in itertools.product((1, -1), repeat=4)]


def chsh_lhv(distribution):
    """CHSH value of a mixture of deterministic strategies.

    ``distribution`` is a sequence of ``(LhvStrategy, weight)``. Every
    correlation term is averaged over the same weights, i.e. one hidden
    variable answers all four settings.
    """
    distribution = list(distribution)
    weights = np.array([w for _, w in distribution], dtype=float)
    if len(weights) == 0 or np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise BadDistribution("weights must be non-negative and sum to 1")
    terms = tuple(
        float(sum(w * lam.correlation(x, y) for lam, w in distribution)) for x, y in SETTING_PAIRS
    )
    strategy = distribution[0][0] if len(distribution) == 1 else None
    return ChshResult(chsh_value(terms), terms, 0, "lhv", strategy=strategy)


def max_chsh_lhv():
    """Largest CHSH value over all deterministic strategies, with a maximizer.

    Mixtures cannot do better: S is convex in the weights.
    """
    return max((chsh_lhv([(lam, 1.0)]) for lam in enumerate_lhv_strategies()), key=lambda r: r.S)


def max_chsh_unshared():
    """Largest CHSH value when every term gets its own +-1 answers.

    Enumerates all 2**8 assignments of ``(A_x, B_y)`` to the four terms
    separately. Without one hidden variable shared by all terms the bound
    is 4, not 2: this is the assumption the Bell derivation needs.
    """
    best = 0
    for signs in itertools.product((1, -1), repeat=8):
        terms = [signs[2 * k] * signs[2 * k + 1] for k in range(4)]
        best = max(best, chsh_value(terms))
    return best


@dataclass(frozen=True)
class EprRecord:
    outcome_A: float
    outcome_B: float
    same_axis: bool
    # Value of B along axis_A inferred from the A readout; None if the state
    # is not perfectly anti-correlated along that axis.
    inferred_B: float
    # (observable, direction, value, source) facts attached to this event.
    constraints: tuple
    # Facts about non-commuting observables refer to the past only.
    expired: bool
    event_ids: tuple

    def to_dict(self):
        return {
            "outcome_A": self.outcome_A,
            "outcome_B": self.outcome_B,
            "same_axis": self.same_axis,
            "inferred_B": self.inferred_B,
            "constraints": [
                {"observable": o, "direction": list(d), "value": v, "source": s}
                for o, d, v, s in self.constraints
            ],
            "expired": self.expired,
            "event_ids": list(self.event_ids),
        }


def epr_indirect(state, axis_A, axis_B, rng=None):
    """Measure A along ``axis_A`` (collapsing), then B along ``axis_B``.

    On a state perfectly anti-correlated along ``axis_A`` the A readout
    fixes B's value along the same axis to ``-S(A)``. When ``axis_B``
    equals ``axis_A`` the measured B value must match that inference. When
    the axes differ, the event carries both the inferred and the measured
    B value; those observables do not commute, so the record is flagged
    expired.
    """
    _check_two_spins(state)
    rng = check_random_state(rng)
    tol = get_config().projector
    rec_A = detect(state, _spin_analyzer(axis_A, "A"), rng)
    rec_B = detect(rec_A.post_state, _spin_analyzer(axis_B, "B"), rng)
    s_A = float(np.rint(rec_A.outcome_value))
    s_B = float(np.rint(rec_B.outcome_value))
    same_axis = bool(np.allclose(axis_A.vector, axis_B.vector, atol=tol))

    inferred = None
    constraints = []
    if abs(correlation_exact(state, axis_A, axis_A) + 1.0) <= tol:
        inferred = -s_A
        constraints.append(("S_B", (axis_A.x, axis_A.y, axis_A.z), inferred, "inferred"))
    constraints.append(("S_B", (axis_B.x, axis_B.y, axis_B.z), s_B, "measured"))

    if same_axis and inferred is not None and s_B != inferred:
        raise NumericalFailure(f"EPR inference violated: S(A)={s_A}, S(B)={s_B}")
    return EprRecord(
        outcome_A=s_A,
        outcome_B=s_B,
        same_axis=same_axis,
        inferred_B=inferred,
        constraints=tuple(constraints),
        expired=not same_axis and inferred is not None,
        event_ids=(rec_A.phi_event_id, rec_B.phi_event_id),
    )
