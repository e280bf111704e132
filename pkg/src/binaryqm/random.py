"""Seeded random streams and random test matrices.

Every stream is a counter-based Philox generator; child streams come from
``Generator.spawn`` so results do not depend on how work is scheduled.
"""

import numbers

import numpy as np

__all__ = [
    "check_random_state",
    "make_rng",
    "random_density_matrix",
    "random_hermitian",
    "random_unitary",
]


def make_rng(seed=None):
    return np.random.Generator(np.random.Philox(seed))


def check_random_state(seed):
    """Turn ``seed`` into a Generator.

    ``None`` gives a fresh unseeded stream, an int seeds a new Philox
    stream, and an existing Generator is passed through untouched.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, (numbers.Integral, np.random.SeedSequence)):
        return make_rng(seed)
    raise ValueError(f"{seed!r} cannot be used to seed a Generator")


def random_hermitian(dim, rng=None, scale=1.0):
    rng = check_random_state(rng)
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (X + X.conj().T) / 2


def random_unitary(dim, rng=None):
    rng = check_random_state(rng)
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, R = np.linalg.qr(X)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_density_matrix(dim, rng=None, rank=None):
    """Random full- or reduced-rank density matrix (Ginibre ensemble)."""
    rng = check_random_state(rng)
    rank = dim if rank is None else rank
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real
