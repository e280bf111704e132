"""Reference computations used only by the tests.

None of these call into the package, so they stay independent of the code
paths they check.
"""

import itertools
import math

import numpy as np


def rk4_heisenberg(A, H, t, dt=1e-3, hbar=1.0):
    """Integrate dA/dt = (i/hbar)[H, A] with classical fourth-order Runge-Kutta."""
    A = np.array(A, dtype=complex)
    H = np.array(H, dtype=complex)

    def f(X):
        return 1j / hbar * (H @ X - X @ H)

    steps = max(1, int(math.ceil(abs(t) / dt)))
    h = t / steps
    for _ in range(steps):
        k1 = f(A)
        k2 = f(A + h / 2 * k1)
        k3 = f(A + h / 2 * k2)
        k4 = f(A + h * k3)
        A = A + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return A


def partial_trace_loops(rho, dA, dB, keep):
    """Reduced state of a bipartite matrix by explicit index sums."""
    out = np.zeros((dA, dA) if keep == 0 else (dB, dB), dtype=complex)
    for i in range(out.shape[0]):
        for j in range(out.shape[1]):
            if keep == 0:
                out[i, j] = sum(rho[i * dB + k, j * dB + k] for k in range(dB))
            else:
                out[i, j] = sum(rho[k * dB + i, k * dB + j] for k in range(dA))
    return out


def brute_force_lhv_max():
    """Max of |E(a,b)-E(a,b')| + |E(a',b)+E(a',b')| over deterministic +-1 responses."""
    best = -1
    for A0, A1, B0, B1 in itertools.product((1, -1), repeat=4):
        s = abs(A0 * B0 - A0 * B1) + abs(A1 * B0 + A1 * B1)
        best = max(best, s)
    return best


def binomial_sigma(p, n):
    return math.sqrt(p * (1 - p) / n)


def hermitian(rng, d):
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (X + X.conj().T) / 2


def density(rng, d):
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def unitary(rng, d):
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(X)
    return Q * (np.diag(R) / np.abs(np.diag(R)))
