"""Finite-dimensional matrix *-algebra.

Observables are Hermitian ``complex128`` arrays. A :class:`Context` is the
joint eigenbasis of a commuting family; it is the set of quantities that
one experiment can read out together.
"""

from dataclasses import dataclass

import numpy as np

from ._config import get_config
from ._jacobi import jacobi_eigh
from ._validation import as_matrix, check_observable, check_same_dim, freeze, max_norm
from .exceptions import ConvergenceFailure, NonCommuting, NotCommuting

__all__ = [
    "IDENTITY_2",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "Context",
    "SpectralDecomposition",
    "commutator",
    "eigh",
    "is_commuting_family",
    "joint_diagonalize",
    "operator_norm",
    "spectral_decompose",
]

IDENTITY_2 = freeze(np.eye(2, dtype=np.complex128))
PAULI_X = freeze(np.array([[0, 1], [1, 0]], dtype=np.complex128))
PAULI_Y = freeze(np.array([[0, -1j], [1j, 0]], dtype=np.complex128))
PAULI_Z = freeze(np.array([[1, 0], [0, -1]], dtype=np.complex128))


def eigh(A):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix."""
    cfg = get_config()
    A = check_observable(A)
    return jacobi_eigh(A, tol=cfg.jacobi_offdiag, max_sweeps=cfg.jacobi_max_sweeps)


def commutator(A, B):
    """Return ``AB - BA``."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    check_same_dim(A, B)
    return A @ B - B @ A


def is_commuting_family(observables, tol=None):
    mats = [as_matrix(A) for A in observables]
    if mats:
        check_same_dim(*mats)
    tol = get_config().commute if tol is None else tol
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if max_norm(mats[i] @ mats[j] - mats[j] @ mats[i]) > tol:
                return False
    return True


def _clusters(w, tol):
    """Split ascending eigenvalues into runs whose neighbours differ by at most ``tol``."""
    groups = [[0]] if len(w) else []
    for k in range(1, len(w)):
        if w[k] - w[k - 1] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Distinct eigenvalues (ascending) with their orthogonal projectors."""

    eigenvalues: np.ndarray
    projectors: tuple

    def __len__(self):
        return len(self.eigenvalues)

    def reconstruct(self):
        return sum(lam * P for lam, P in zip(self.eigenvalues, self.projectors))


def spectral_decompose(A):
    """Spectral decomposition of a Hermitian matrix.

    Eigenvalues closer than the degeneracy tolerance are merged into one
    projector; the merged eigenvalue is the cluster mean.
    """
    w, V = eigh(A)
    tol = get_config().degeneracy
    values, projectors = [], []
    for group in _clusters(w, tol):
        vecs = V[:, group]
        values.append(float(np.mean(w[group])))
        projectors.append(freeze(vecs @ vecs.conj().T))
    return SpectralDecomposition(freeze(np.array(values)), tuple(projectors))


def operator_norm(A):
    """C*-norm of a Hermitian matrix, i.e. its largest absolute eigenvalue."""
    w, _ = eigh(A)
    return float(np.max(np.abs(w)))


@dataclass(frozen=True, eq=False)
class Context:
    """Joint orthonormal eigenbasis of a commuting family.

    Attributes
    ----------
    basis : (d, d) ndarray
        Columns are the joint eigenvectors ``e_k``.
    observables : tuple of ndarray
        The family the context was built from.
    labels : (d, m) ndarray
        ``labels[k, j]`` is the eigenvalue of ``observables[j]`` on ``e_k``.
    """

    basis: np.ndarray
    observables: tuple
    labels: np.ndarray

    @property
    def dim(self):
        return self.basis.shape[0]

    def vector(self, k):
        return self.basis[:, k]

    def diagonal_of(self, A):
        """Eigenvalues of ``A`` on each basis vector.

        Raises :class:`NonCommuting` when the basis does not diagonalize ``A``;
        such an observable is not readable in this context.
        """
        A = check_observable(A)
        check_same_dim(A, self.basis)
        D = self.basis.conj().T @ A @ self.basis
        diag = np.diag(D)
        off = max_norm(D - np.diag(diag))
        tol = get_config().commute
        if off > tol:
            raise NonCommuting(
                f"observable is not diagonal in this context (off-diagonal {off:.3g} > {tol:g})"
            )
        return freeze(diag.real.copy())

    def contains(self, A):
        try:
            self.diagonal_of(A)
        except NonCommuting:
            return False
        return True

    def same_basis(self, other, tol=None):
        if self is other:
            return True
        tol = get_config().projector if tol is None else tol
        return self.basis.shape == other.basis.shape and max_norm(self.basis - other.basis) <= tol


def _canonical_basis(B):
    """Deterministic orthonormal basis for the column span of ``B``.

    Standard basis vectors are projected onto the subspace and
    orthonormalized, always taking the one with the largest remaining
    projection (earliest index on ties). Phases come out fixed: the pivot
    component of every vector is real and positive.
    """
    m = B.shape[1]
    P = B @ B.conj().T
    out = []
    for _ in range(m):
        norms = np.real(np.diag(P))
        k = int(np.flatnonzero(norms >= norms.max() - 1e-9)[0])
        q = P[:, k] / np.sqrt(norms[k])
        out.append(q)
        P = P - np.outer(q, q.conj())
    return np.column_stack(out)


def joint_diagonalize(observables):
    """Build the :class:`Context` of a commuting family.

    The space is split by the eigenvalues of each observable in turn, each
    split refining the previous one. Basis vectors are ordered
    lexicographically by their tuple of eigenvalues; inside a residual
    degenerate block the basis is the canonical one from the standard basis
    order.
    """
    cfg = get_config()
    mats = tuple(check_observable(A) for A in observables)
    if not mats:
        raise ValueError("need at least one observable")
    d = check_same_dim(*mats)
    if not is_commuting_family(mats, cfg.commute):
        raise NotCommuting("observables do not pairwise commute")

    blocks = [(np.eye(d, dtype=np.complex128), ())]
    for A in mats:
        refined = []
        for B, labels in blocks:
            M = B.conj().T @ A @ B
            M = (M + M.conj().T) / 2
            if B.shape[1] == 1:
                refined.append((B, labels + (float(M[0, 0].real),)))
                continue
            w, W = jacobi_eigh(M, cfg.jacobi_offdiag, cfg.jacobi_max_sweeps)
            for group in _clusters(w, cfg.degeneracy):
                refined.append((B @ W[:, group], labels + (float(np.mean(w[group])),)))
        blocks = refined

    blocks.sort(key=lambda item: item[1])
    vectors, rows = [], []
    for B, labels in blocks:
        C = _canonical_basis(B)
        vectors.append(C)
        rows.extend([labels] * C.shape[1])
    basis = np.column_stack(vectors)

    for A in mats:
        D = basis.conj().T @ A @ basis
        if max_norm(D - np.diag(np.diag(D))) > cfg.commute:
            raise ConvergenceFailure("joint diagonalization residual exceeds tolerance")

    return Context(freeze(basis), mats, freeze(np.array(rows, dtype=float)))
