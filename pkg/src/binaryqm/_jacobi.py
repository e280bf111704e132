"""Cyclic Jacobi eigensolver for small dense Hermitian matrices.

Each rotation first removes the phase of the pivot element and then applies
an ordinary real Jacobi rotation, so the whole update is a 2x2 unitary
acting on rows and columns ``p, q``.
"""

import math

import numpy as np

from .exceptions import ConvergenceFailure


def _off_norm(a):
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(A, tol=1e-12, max_sweeps=100):
    """Eigen-decompose a Hermitian matrix.

    Parameters
    ----------
    A : (n, n) array_like
        Hermitian matrix. Only Hermitian input gives meaningful results.
    tol : float
        Sweeps stop once the Frobenius norm of the off-diagonal part drops
        below ``tol * max(1, ||A||_F)``.
    max_sweeps : int
        Raise :class:`ConvergenceFailure` past this many full sweeps.

    Returns
    -------
    w : (n,) ndarray
        Eigenvalues, ascending.
    V : (n, n) ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = np.array(A, dtype=np.complex128)
    n = a.shape[0]
    V = np.eye(n, dtype=np.complex128)
    scale = max(1.0, float(np.linalg.norm(a)))
    threshold = tol * scale
    skip = 1e-300

    polished = False
    for sweep in range(max_sweeps + 1):
        if n < 2 or polished:
            break
        # One sweep past the threshold; eigenvector error goes like residual / gap.
        polished = _off_norm(a) <= threshold
        if sweep == max_sweeps and not polished:
            raise ConvergenceFailure(
                f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {_off_norm(a):.3g})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                phase = (apq / mag).conjugate()
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if tau == 0.0:
                    t = 1.0
                elif abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                G = np.array([[c, s], [-s * phase, c * phase]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ G
                a[idx, :] = G.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                V[:, idx] = V[:, idx] @ G

    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]
