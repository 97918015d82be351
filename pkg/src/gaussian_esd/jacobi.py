"""Cyclic Jacobi eigenvalue algorithm for small real symmetric matrices.

Works on nested Python lists internally: for the 2x2 to ~32x32 matrices used
here this beats per-rotation numpy slicing by a wide margin.
"""

import math

import numpy as np

from .errors import ConvergenceError, DimensionError

JACOBI_TOL = 1e-13
MAX_SWEEPS = 100


def _off_norm(a):
    n = len(a)
    return math.sqrt(sum(a[i][j] * a[i][j] for i in range(n) for j in range(n) if i != j))


def jacobi_eigh(a, tol=JACOBI_TOL, max_sweeps=MAX_SWEEPS, vectors=True):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi sweeps.

    Each sweep visits every pair ``(p, q)`` with ``p < q`` in row order and
    annihilates ``a[p, q]`` with a plane rotation. Iteration stops once the
    off-diagonal Frobenius norm is at most ``tol * max(1, ||a||_F)``.

    Args:
        a (array[float]): square symmetric matrix (only read, never modified)
        tol (float): off-diagonal tolerance
        max_sweeps (int): maximum number of full sweeps
        vectors (bool): whether to accumulate eigenvectors

    Returns:
        array or tuple[array, array]: eigenvalues in ascending order, and if
        ``vectors`` is set the matching orthonormal eigenvectors as columns.

    Raises:
        DimensionError: if ``a`` is not a square 2D array
        ConvergenceError: if ``max_sweeps`` sweeps are not enough
    """
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    n = arr.shape[0]
    a = (0.5 * (arr + arr.T)).tolist()
    v = np.eye(n).tolist() if vectors else None
    threshold = tol * max(1.0, float(np.linalg.norm(arr)))

    for _ in range(max_sweeps + 1):
        if _off_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                if apq == 0.0:
                    continue
                diff = a[q][q] - a[p][p]
                if abs(apq) < abs(diff) * 1e-36:
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                for row in a:
                    x, y = row[p], row[q]
                    row[p] = c * x - s * y
                    row[q] = s * x + c * y
                row_p, row_q = a[p], a[q]
                for k in range(n):
                    x, y = row_p[k], row_q[k]
                    row_p[k] = c * x - s * y
                    row_q[k] = s * x + c * y
                a[p][q] = a[q][p] = 0.0

                if v is not None:
                    for row in v:
                        x, y = row[p], row[q]
                        row[p] = c * x - s * y
                        row[q] = s * x + c * y
    else:
        raise ConvergenceError(
            f"Jacobi did not reach off-diagonal norm {threshold:.3g} in {max_sweeps} sweeps"
        )

    w = np.array([a[i][i] for i in range(n)])
    order = np.argsort(w, kind="stable")
    if v is None:
        return w[order]
    return w[order], np.array(v)[:, order]


def jacobi_eigvalsh(a, tol=JACOBI_TOL, max_sweeps=MAX_SWEEPS):
    """Ascending eigenvalues of a real symmetric matrix (no eigenvectors)."""
    return jacobi_eigh(a, tol=tol, max_sweeps=max_sweeps, vectors=False)
