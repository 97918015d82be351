"""Covariance matrices, symplectic structure and the P-function layer.

Convention: quadratures are ordered ``(q1, p1, q2, p2, ...)`` and the vacuum
covariance matrix is the identity, so a Gaussian state is classical (has a
non-negative P-function) exactly when ``V >= I``.
"""

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError
from .jacobi import jacobi_eigvalsh

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-10
CLASSICAL_TOL = 1e-10


def _as_square_even(V):
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise DimensionError(f"covariance matrix must be square, got shape {V.shape}")
    if V.shape[0] == 0 or V.shape[0] % 2:
        raise DimensionError(f"covariance matrix must have even dimension, got {V.shape[0]}")
    return V


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class CovarianceMatrix:
    """Zero-mean Gaussian state covariance, ``2n x 2n`` with vacuum = identity.

    Instances behave like read-only arrays (``np.asarray(V)`` works), so every
    function in the package accepts either a ``CovarianceMatrix`` or a plain
    array.
    """

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(_as_square_even(self.entries)))

    @property
    def n_modes(self):
        return self.entries.shape[0] // 2

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __repr__(self):
        return f"CovarianceMatrix(n_modes={self.n_modes}, entries={self.entries.tolist()})"

    @classmethod
    def vacuum(cls, n_modes=1):
        return cls(np.eye(2 * n_modes))

    def to_dict(self):
        return {"n_modes": self.n_modes, "entries": self.entries.ravel().tolist()}

    @classmethod
    def from_dict(cls, data):
        try:
            k = int(data["n_modes"])
            flat = [float(x) for x in data["entries"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed covariance matrix record: {exc}") from exc
        if k < 1 or len(flat) != 4 * k * k:
            raise DimensionError(
                f"n_modes={k} needs {4 * k * k} entries, got {len(flat)}"
            )
        return cls(np.array(flat).reshape(2 * k, 2 * k))

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def symplectic_form(n_modes):
    """Direct sum of ``n_modes`` copies of ``[[0, 1], [-1, 0]]``."""
    if n_modes < 1:
        raise DimensionError("n_modes must be positive")
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(V):
    """Symplectic spectrum of ``V`` in ascending order.

    The eigenvalues of ``Omega V`` come in pairs ``+-i nu``. For positive
    definite ``V = L L^T`` they are those of ``L^T Omega L``, a real
    antisymmetric matrix, so ``i L^T Omega L`` is Hermitian and has spectrum
    ``+-nu``. Indefinite input falls back to the moduli of the general
    eigenvalues of ``Omega V``.
    """
    V = _as_square_even(V)
    omega = symplectic_form(V.shape[0] // 2)
    try:
        L = np.linalg.cholesky(0.5 * (V + V.T))
    except np.linalg.LinAlgError:
        mods = np.sort(np.abs(np.linalg.eigvals(omega @ V)))
        return mods[::2]
    ev = np.linalg.eigvalsh(1j * (L.T @ omega @ L))
    return np.sort(ev[ev.shape[0] // 2:])


def is_symmetric(V, tol=SYMMETRY_TOL):
    V = np.asarray(V, dtype=float)
    return bool(np.all(np.abs(V - V.T) <= tol * np.maximum(1.0, np.abs(V))))


@dataclass(frozen=True)
class ValidityReport:
    symmetric: bool
    physical: bool
    min_symplectic_eigenvalue: float

    def to_dict(self):
        return {
            "symmetric": self.symmetric,
            "physical": self.physical,
            "min_symplectic_eigenvalue": self.min_symplectic_eigenvalue,
        }


def validate_state(V):
    """Check symmetry and the uncertainty relation for a covariance matrix.

    A state is physical when it is symmetric, positive definite and every
    symplectic eigenvalue is at least ``1 - 1e-10``.

    Raises:
        DimensionError: for non-square or odd-dimensional input.
    """
    V = _as_square_even(V)
    symmetric = is_symmetric(V)
    Vs = 0.5 * (V + V.T)
    nu_min = float(symplectic_eigenvalues(Vs)[0])
    positive = min_eigenvalue(Vs) > 0.0
    physical = symmetric and positive and nu_min >= 1.0 - PHYSICAL_TOL
    return ValidityReport(symmetric=symmetric, physical=physical, min_symplectic_eigenvalue=nu_min)


def min_eigenvalue(V):
    """Smallest ordinary eigenvalue of a symmetric matrix (cyclic Jacobi)."""
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {V.shape}")
    return float(jacobi_eigvalsh(V)[0])


def is_classical(V):
    """Whether the Gaussian state has a non-negative P-function, i.e. ``V >= I``.

    The boundary counts as classical (tolerance 1e-10).
    """
    return min_eigenvalue(V) >= 1.0 - CLASSICAL_TOL


@dataclass(frozen=True)
class PhaseSpacePoint:
    """Real quadrature pair ``(q, p)`` for a single mode."""

    q: float
    p: float

    @classmethod
    def from_alpha(cls, alpha):
        # q = (a + a*)/sqrt2, p = i(a* - a)/sqrt2
        alpha = complex(alpha)
        return cls(math.sqrt(2.0) * alpha.real, math.sqrt(2.0) * alpha.imag)

    def to_alpha(self):
        return complex(self.q, self.p) / math.sqrt(2.0)

    def __iter__(self):
        yield self.q
        yield self.p


def characteristic_function(V, points):
    """Symmetric characteristic function ``exp(-X^T V X / 4)`` of a zero-mean state.

    Args:
        V: ``2n x 2n`` covariance matrix
        points: sequence of ``n`` :class:`PhaseSpacePoint` (or ``(q, p)`` pairs),
            one per mode

    Returns:
        complex: value of the characteristic function (real for zero mean)
    """
    V = _as_square_even(V)
    X = np.array([c for pt in points for c in pt], dtype=float)
    if X.shape != (V.shape[0],):
        raise DimensionError(
            f"{V.shape[0] // 2}-mode state needs {V.shape[0] // 2} phase-space points"
        )
    return complex(math.exp(-float(X @ V @ X) / 4.0))


@dataclass(frozen=True)
class GaussianPFunction:
    """Isotropic Gaussian P-distribution with complex mean and variance.

    ``P(alpha) = exp(-|alpha - mean|^2 / variance) / (pi variance)``; a zero
    variance is the delta distribution of a coherent state.
    """

    mean: complex
    variance: float

    def __post_init__(self):
        if self.variance < 0:
            raise DomainError("P-function variance must be non-negative")

    def density(self, alpha):
        if self.variance == 0.0:
            raise DomainError("a zero-variance P-function is a delta distribution")
        d2 = abs(complex(alpha) - self.mean) ** 2
        return math.exp(-d2 / self.variance) / (math.pi * self.variance)

    @property
    def mean_photon_number(self):
        """Normally ordered ``<a^dag a> = |mean|^2 + variance``."""
        return abs(self.mean) ** 2 + self.variance


def evolve_coherent_p(alpha0, gamma0, N, t, include_rotation=False, omega0=0.0):
    """P-function at time ``t`` of an initial coherent state ``|alpha0>``.

    Under the thermal bath the delta distribution spreads into a Gaussian with
    mean ``alpha0 exp((-i omega0 [rot] - gamma0/2) t)`` and variance
    ``N (1 - exp(-gamma0 t))``.
    """
    if gamma0 <= 0:
        raise DomainError("gamma0 must be positive")
    if N < 0:
        raise DomainError("N must be non-negative")
    if t < 0:
        raise DomainError("t must be non-negative")
    rate = complex(-gamma0 / 2.0, -omega0 if include_rotation else 0.0)
    mean = complex(alpha0) * cmath.exp(rate * t)
    return GaussianPFunction(mean=mean, variance=N * -math.expm1(-gamma0 * t))
