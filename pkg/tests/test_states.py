import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binaryqm.algebra import joint_diagonalize, operator_norm
from binaryqm.bell import singlet_state
from binaryqm.exceptions import DegenerateWeights, DimensionMismatch, InvalidState, NonCommuting
from binaryqm.random import make_rng
from binaryqm.states import (
    PhysicalState,
    QuantumState,
    are_equivalent,
    born_weights,
    evaluate,
    evaluate_complex,
    monte_carlo_average,
    partial_trace,
    quantum_average,
    sample_outcome_indices,
    sample_physical_state,
    sample_physical_states,
)

from conftest import I2, SX, SY, SZ
from oracles import binomial_sigma, density, hermitian, partial_trace_loops, unitary

PLUS_X = QuantumState.from_vector([1, 1])


class TestQuantumState:
    def test_rejects_bad_trace(self):
        with pytest.raises(InvalidState):
            QuantumState(np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(InvalidState):
            QuantumState(np.diag([1.5, -0.5]))

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidState):
            QuantumState([[0.5, 0.1], [0.0, 0.5]])

    def test_immutable(self):
        s = QuantumState.maximally_mixed(2)
        with pytest.raises(ValueError):
            s.rho[0, 0] = 1


class TestQuantumAverage:
    @pytest.mark.parametrize("lam", [-2.5, 0.0, 1.0, 7.25])
    def test_scalar_observable(self, rng, lam):
        state = QuantumState(density(rng, 3))
        assert quantum_average(state, lam * np.eye(3)) == pytest.approx(lam, abs=1e-12)

    def test_eigenstate(self):
        assert quantum_average(QuantumState(np.diag([1.0, 0.0])), SZ) == 1.0

    def test_maximally_mixed(self):
        assert quantum_average(QuantumState.maximally_mixed(2), SZ) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            quantum_average(QuantumState.maximally_mixed(2), np.eye(3))

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 8))
    def test_linear_on_non_commuting_sums(self, seed, dim):
        r = np.random.default_rng(seed)
        state = QuantumState(density(r, dim))
        A, B = hermitian(r, dim), hermitian(r, dim)
        total = quantum_average(state, A + B)
        assert abs(total - quantum_average(state, A) - quantum_average(state, B)) <= 1e-10


class TestSampling:
    def test_eigenstate_always_index_zero(self):
        ctx = joint_diagonalize([SX])
        state = QuantumState.from_vector(ctx.basis[:, 0])
        indices, _ = sample_outcome_indices(state, ctx, 1000, make_rng(0))
        assert np.all(indices == 0)

    def test_mixed_qubit_frequency(self):
        n = 100_000
        ctx = joint_diagonalize([SZ])
        indices, _ = sample_outcome_indices(QuantumState.maximally_mixed(2), ctx, n, make_rng(1))
        freq = np.mean(indices == 0)
        assert abs(freq - 0.5) <= 3 * binomial_sigma(0.5, n)

    def test_singlet_in_product_z_basis(self):
        ctx = joint_diagonalize([np.kron(SZ, I2), np.kron(I2, SZ)])
        # diagonal of the singlet: weight 1/2 on |+-> and |-+>, exactly 0 on |++> and |-->
        p = born_weights(singlet_state(), ctx)
        labels = [tuple(row) for row in ctx.labels]
        for k, (la, lb) in enumerate(labels):
            assert p[k] == (0.0 if la == lb else pytest.approx(0.5, abs=1e-12))
        indices, _ = sample_outcome_indices(singlet_state(), ctx, 10_000, make_rng(2))
        assert all(labels[k][0] == -labels[k][1] for k in set(indices.tolist()))

    def test_weights_normalized(self, rng):
        for dim in (2, 3, 5, 8):
            ctx = joint_diagonalize([hermitian(rng, dim)])
            assert abs(born_weights(QuantumState(density(rng, dim)), ctx).sum() - 1) <= 1e-8

    def test_fresh_event_ids(self):
        ctx = joint_diagonalize([SZ])
        phis = sample_physical_states(QuantumState.maximally_mixed(2), ctx, 500, make_rng(3))
        phis.append(sample_physical_state(QuantumState.maximally_mixed(2), ctx, make_rng(4)))
        ids = [p.event_id for p in phis]
        assert len(set(ids)) == len(ids)
        assert ids == sorted(ids)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            sample_physical_state(QuantumState.maximally_mixed(3), joint_diagonalize([SZ]), make_rng(0))

    def test_degenerate_weights(self):
        ctx = joint_diagonalize([SZ])
        bad = QuantumState._trusted(np.diag([0.7, 0.2]).astype(complex))
        with pytest.raises(DegenerateWeights):
            born_weights(bad, ctx)

    def test_seeded_reproducible(self):
        ctx = joint_diagonalize([SX])
        a, _ = sample_outcome_indices(QuantumState.maximally_mixed(2), ctx, 100, make_rng(9))
        b, _ = sample_outcome_indices(QuantumState.maximally_mixed(2), ctx, 100, make_rng(9))
        np.testing.assert_array_equal(a, b)


class TestEvaluate:
    def setup_method(self):
        self.ctx = joint_diagonalize([SZ])
        self.phi = PhysicalState(self.ctx, 0, -1)

    @pytest.mark.parametrize("lam", [-3.0, 0.0, 0.5, 2.0])
    def test_scalar(self, lam):
        assert evaluate(self.phi, lam * I2) == pytest.approx(lam, abs=1e-15)

    def test_sigma_z_follows_basis_order(self):
        # basis is ordered by ascending eigenvalue
        assert evaluate(self.phi, SZ) == -1.0
        assert evaluate(PhysicalState(self.ctx, 1, -1), SZ) == 1.0

    def test_square(self):
        Q = 2 * SZ + 0.5 * I2
        assert evaluate(self.phi, Q @ Q) == pytest.approx(evaluate(self.phi, Q) ** 2)

    def test_outside_context(self):
        with pytest.raises(NonCommuting):
            evaluate(self.phi, SX)

    def test_bad_index(self):
        with pytest.raises(InvalidState):
            PhysicalState(self.ctx, 2, 0)

    def test_anti_hermitian_extension(self):
        assert evaluate_complex(self.phi, 1j * SZ) == pytest.approx(1j * evaluate(self.phi, SZ))
        assert evaluate_complex(self.phi, SZ + 2j * I2) == pytest.approx(-1 + 2j)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 8))
    def test_valuation_rules(self, seed, dim):
        r = np.random.default_rng(seed)
        U = unitary(r, dim)
        A = U @ np.diag(r.normal(size=dim)) @ U.conj().T
        B = U @ np.diag(r.normal(size=dim)) @ U.conj().T
        A, B = (A + A.conj().T) / 2, (B + B.conj().T) / 2
        ctx = joint_diagonalize([A, B])
        state = QuantumState(density(r, dim))
        for phi in sample_physical_states(state, ctx, 5, make_rng(seed)):
            a, b = evaluate(phi, A), evaluate(phi, B)
            assert abs(evaluate(phi, A + B) - (a + b)) <= 1e-9
            assert abs(evaluate(phi, A @ B) - a * b) <= 1e-9
            assert evaluate(phi, A.conj().T @ A) >= -1e-9
        assert operator_norm(A) > 0


class TestMonteCarloAverage:
    def test_eigenstate_is_exact(self):
        ctx = joint_diagonalize([SZ])
        est = monte_carlo_average(QuantumState(np.diag([0.0, 1.0])), ctx, SZ, 1000, make_rng(0))
        assert est.mean == -1.0 and est.std_error == 0.0 and est.n_samples == 1000

    def test_mixed_qubit(self):
        est = monte_carlo_average(QuantumState.maximally_mixed(2), joint_diagonalize([SZ]), SZ, 100_000, make_rng(5))
        assert abs(est.mean) <= 0.02
        # binomial oracle: var of +-1 with p=1/2 is 1
        assert est.std_error == pytest.approx(1 / math.sqrt(100_000), rel=1e-3)

    def test_plus_x_measured_along_z(self):
        assert quantum_average(PLUS_X, SZ) == 0.0
        est = monte_carlo_average(PLUS_X, joint_diagonalize([SZ]), SZ, 100_000, make_rng(6))
        assert abs(est.mean) <= 0.02

    def test_single_sample(self):
        est = monte_carlo_average(PLUS_X, joint_diagonalize([SZ]), SZ, 1, make_rng(0))
        assert est.std_error == 0.0 and abs(est.mean) == 1.0

    def test_outside_context(self):
        with pytest.raises(NonCommuting):
            monte_carlo_average(PLUS_X, joint_diagonalize([SZ]), SY, 10, make_rng(0))

    def test_convergence_rate(self):
        # 200 seeded trials; at 5 standard errors essentially none should miss
        r = np.random.default_rng(77)
        misses = 0
        for trial in range(200):
            dim = 2 + trial % 5
            A = hermitian(r, dim)
            state = QuantumState(density(r, dim))
            est = monte_carlo_average(state, joint_diagonalize([A]), A, 2000, make_rng(trial))
            misses += abs(est.mean - quantum_average(state, A)) > 5 * est.std_error
        assert misses <= 2


class TestEquivalence:
    def test_reflexive(self):
        phi = PhysicalState(joint_diagonalize([SZ]), 1, 0)
        assert are_equivalent(phi, phi)

    def test_different_index(self):
        ctx = joint_diagonalize([SZ])
        assert not are_equivalent(PhysicalState(ctx, 0, 0), PhysicalState(ctx, 1, 1))

    def test_event_ids_ignored(self):
        ctx = joint_diagonalize([SZ])
        p1 = sample_physical_state(QuantumState(np.diag([0.0, 1.0])), ctx, make_rng(0))
        p2 = sample_physical_state(QuantumState(np.diag([0.0, 1.0])), ctx, make_rng(1))
        assert p1.event_id != p2.event_id
        assert are_equivalent(p1, p2)

    def test_equal_basis_different_object(self):
        p1 = PhysicalState(joint_diagonalize([SZ]), 0, 0)
        p2 = PhysicalState(joint_diagonalize([3 * SZ]), 0, 1)
        assert are_equivalent(p1, p2)
        p3 = PhysicalState(joint_diagonalize([SX]), 0, 2)
        assert not are_equivalent(p1, p3)


class TestPartialTrace:
    def test_against_loops(self, rng):
        rho = density(rng, 6)
        np.testing.assert_allclose(partial_trace(rho, [2, 3], [0]), partial_trace_loops(rho, 2, 3, 0), atol=1e-14)
        np.testing.assert_allclose(partial_trace(rho, [2, 3], [1]), partial_trace_loops(rho, 2, 3, 1), atol=1e-14)

    def test_singlet_reduced_state(self):
        rho = singlet_state().rho
        np.testing.assert_allclose(partial_trace(rho, [2, 2], [0]), I2 / 2, atol=1e-15)
        np.testing.assert_allclose(partial_trace(rho, [2, 2], [1]), I2 / 2, atol=1e-15)
