"""Gaussian channels for local thermal and squeezed-thermal baths.

A channel acts on covariance matrices as ``V -> A V A^T + B``. Single-mode
bath channels are extended to ``n`` modes by direct sums, one identical bath
per mode.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .errors import BathKindError, DimensionError, DomainError
from .jacobi import jacobi_eigvalsh

THERMAL = "thermal"
SQUEEZED = "squeezed_thermal"
B_PSD_TOL = 1e-12


@dataclass(frozen=True)
class BathSpec:
    """Markovian bath coupled to one mode.

    Thermal baths are described by ``N``; squeezed-thermal baths by the
    thermal occupancy ``N_th`` and squeezing ``(r, phi)``, from which the
    effective occupancy and the anomalous correlation ``M`` follow:
    ``2N + 1 = cosh(2r)(2N_th + 1)`` and
    ``M = -sinh(2r) exp(i phi) (2N_th + 1) / 2``.

    ``omega0`` is only used by the Fock-space oracle.
    """

    kind: str
    gamma0: float
    N: float = 0.0
    N_th: float = 0.0
    r: float = 0.0
    phi: float = 0.0
    omega0: float = 0.0

    def __post_init__(self):
        if self.kind not in (THERMAL, SQUEEZED):
            raise BathKindError(f"unknown bath kind {self.kind!r}")
        if not self.gamma0 > 0:
            raise DomainError("gamma0 must be positive")
        if self.N < 0 or self.N_th < 0:
            raise DomainError("occupancies must be non-negative")
        if self.r < 0:
            raise DomainError("squeezing r must be non-negative")
        if self.kind == THERMAL and (self.N_th or self.r or self.phi):
            raise DomainError("thermal bath takes N only")
        if self.kind == SQUEEZED and self.N:
            raise DomainError("squeezed bath takes N_th, r, phi (N is derived)")

    @classmethod
    def thermal(cls, gamma0, N, omega0=0.0):
        return cls(THERMAL, gamma0, N=N, omega0=omega0)

    @classmethod
    def squeezed_thermal(cls, gamma0, N_th, r, phi=0.0, omega0=0.0):
        return cls(SQUEEZED, gamma0, N_th=N_th, r=r, phi=phi, omega0=omega0)

    @property
    def effective_N(self):
        """Mean occupancy ``N`` entering the master equation."""
        if self.kind == THERMAL:
            return self.N
        return 0.5 * (math.cosh(2 * self.r) * (2 * self.N_th + 1) - 1)

    @property
    def M(self):
        """Anomalous bath correlation (zero for a thermal bath)."""
        if self.kind == THERMAL:
            return 0j
        return -0.5 * math.sinh(2 * self.r) * complex(math.cos(self.phi), math.sin(self.phi)) * (
            2 * self.N_th + 1
        )

    def to_dict(self):
        d = {"kind": self.kind, "gamma0": self.gamma0}
        if self.kind == THERMAL:
            d["N"] = self.N
        else:
            d.update(N_th=self.N_th, r=self.r, phi=self.phi)
        if self.omega0:
            d["omega0"] = self.omega0
        return d

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        kind = data.pop("kind", None)
        allowed = {"gamma0", "omega0"} | ({"N"} if kind == THERMAL else {"N_th", "r", "phi"})
        unknown = set(data) - allowed
        if kind not in (THERMAL, SQUEEZED):
            raise BathKindError(f"unknown bath kind {kind!r}")
        if unknown:
            raise ValueError(f"unknown {kind} bath fields: {sorted(unknown)}")
        if "gamma0" not in data:
            raise ValueError("bath record needs gamma0")
        return cls(kind, **{k: float(v) for k, v in data.items()})

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def asymptotic_covariance(bath):
    """Single-mode fixed point ``V_inf`` of the bath channel.

    ``[[N/2 + 1 + Re M, Im M], [Im M, N/2 + 1 - Re M]]``, with eigenvalues
    ``N/2 + 1 +- |M|``.
    """
    N = bath.effective_N
    M = bath.M
    return np.array(
        [[N / 2 + 1 + M.real, M.imag], [M.imag, N / 2 + 1 - M.real]],
        dtype=float,
    )


def asymptotic_min_eigenvalue(bath):
    """Closed form ``N/2 + 1 - |M|`` of the smallest eigenvalue of ``V_inf``."""
    return bath.effective_N / 2 + 1 - abs(bath.M)


@dataclass(frozen=True)
class GaussianChannel:
    """Pair ``(A, B)`` acting as ``V -> A V A^T + B``.

    ``B`` is symmetrized on construction and must be positive semidefinite up
    to ``-1e-12``.
    """

    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        B = np.array(self.B, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
            raise DimensionError(f"A and B must be equal square matrices, got {A.shape}, {B.shape}")
        if A.shape[0] % 2:
            raise DimensionError("channel dimension must be even")
        B = 0.5 * (B + B.T)
        lam = jacobi_eigvalsh(B)[0]
        if lam < -B_PSD_TOL:
            raise DomainError(f"B is not positive semidefinite (min eigenvalue {lam:.3g})")
        A.flags.writeable = False
        B.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n_modes(self):
        return self.A.shape[0] // 2

    @classmethod
    def identity(cls, n_modes=1):
        d = 2 * n_modes
        return cls(np.eye(d), np.zeros((d, d)))

    def to_dict(self):
        return {
            "n_modes": self.n_modes,
            "A": self.A.ravel().tolist(),
            "B": self.B.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        k = int(data["n_modes"])
        d = 2 * k
        return cls(np.array(data["A"], float).reshape(d, d), np.array(data["B"], float).reshape(d, d))


def _check_time(t):
    if t < 0:
        raise DomainError("t must be non-negative")


def thermal_channel(gamma0, N, t):
    """Single-mode thermal bath after time ``t``.

    ``A = exp(-gamma0 t / 2) I``, ``B = (N/2 + 1)(1 - exp(-gamma0 t)) I``.
    """
    if not gamma0 > 0:
        raise DomainError("gamma0 must be positive")
    if N < 0:
        raise DomainError("N must be non-negative")
    _check_time(t)
    decay = -math.expm1(-gamma0 * t)
    return GaussianChannel(
        math.exp(-gamma0 * t / 2) * np.eye(2), (N / 2 + 1) * decay * np.eye(2)
    )


def squeezed_channel(gamma0, N_th, r, phi, t):
    """Single-mode squeezed-thermal bath after time ``t``.

    ``A = exp(-gamma0 t / 2) I`` so that ``A V A^T = exp(-gamma0 t) V``, and
    ``B = (1 - exp(-gamma0 t)) V_inf``.
    """
    bath = BathSpec.squeezed_thermal(gamma0, N_th, r, phi)
    _check_time(t)
    decay = -math.expm1(-gamma0 * t)
    return GaussianChannel(math.exp(-gamma0 * t / 2) * np.eye(2), decay * asymptotic_covariance(bath))


def bath_channel(bath, t):
    """Single-mode channel for any :class:`BathSpec` after time ``t``."""
    if bath.kind == THERMAL:
        return thermal_channel(bath.gamma0, bath.N, t)
    return squeezed_channel(bath.gamma0, bath.N_th, bath.r, bath.phi, t)


def apply(ch, V):
    """Apply a channel to a covariance matrix; the result is re-symmetrized."""
    V = np.asarray(V, dtype=float)
    if V.shape != ch.A.shape:
        raise DimensionError(f"channel acts on {ch.A.shape}, got state of shape {V.shape}")
    out = ch.A @ V @ ch.A.T + ch.B
    return 0.5 * (out + out.T)


def extend_local(ch, n):
    """Identical copies of a single-mode channel on each of ``n`` modes."""
    if n < 1:
        raise DimensionError("mode count must be at least 1")
    if ch.n_modes != 1:
        raise DimensionError("extend_local takes a single-mode channel")
    return GaussianChannel(block_diag(*[ch.A] * n), block_diag(*[ch.B] * n))


def direct_sum(*channels):
    """Independent (possibly different) channels on consecutive modes.

    Heterogeneous local baths are structurally supported but experimental.
    """
    return GaussianChannel(
        block_diag(*[c.A for c in channels]), block_diag(*[c.B for c in channels])
    )


def compose(ch2, ch1):
    """Channel ``ch2 o ch1`` (apply ``ch1`` first)."""
    if ch1.A.shape != ch2.A.shape:
        raise DimensionError("channels act on different dimensions")
    A = ch2.A @ ch1.A
    B = ch2.A @ ch1.B @ ch2.A.T + ch2.B
    return GaussianChannel(A, B)


def evolve(V0, bath, t):
    """Covariance after time ``t`` with an identical local bath on every mode."""
    V0 = np.asarray(V0, dtype=float)
    ch = extend_local(bath_channel(bath, t), V0.shape[0] // 2)
    return apply(ch, V0)


def asymptotic_state(bath, n_modes):
    """``V_inf`` repeated on every mode."""
    return block_diag(*[asymptotic_covariance(bath)] * n_modes)
