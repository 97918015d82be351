"""Classicality and separability predicates and transition-time solvers.

Thermal baths shift every eigenvalue of ``V`` identically, which gives exact
closed forms. Squeezed baths rotate eigenvectors, so their transition times
come from a dense scan followed by bisection; the closed-form expression
for that case is only an upper bound.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channels import SQUEEZED, THERMAL, asymptotic_min_eigenvalue, asymptotic_state
from .errors import BathKindError, DimensionError, DomainError, UnphysicalStateError
from .phase_space import (
    CLASSICAL_TOL,
    is_classical,
    min_eigenvalue,
    symplectic_eigenvalues,
    validate_state,
)

SEPARABLE_TOL = 1e-10
SCAN_SAMPLES = 1024
DEFAULT_HORIZON = 50.0  # in units of 1/gamma0
BISECTION_TOL = 1e-10  # in units of 1/gamma0
BOUNDARY_MARGIN = 1e-12

FINITE = "finite"
NEVER = "never"
ALREADY = "already"
HORIZON_EXHAUSTED = "horizon_exhausted"


@dataclass(frozen=True)
class TransitionResult:
    """Outcome of a transition-time query.

    ``kind`` is one of ``finite``, ``never``, ``already`` (t = 0) or
    ``horizon_exhausted``. ``bound_time`` carries the closed-form upper bound
    for squeezed baths when it is defined.
    """

    kind: str
    t: float = None
    method: str = None
    bound_time: float = None

    @property
    def is_finite(self):
        return self.kind in (FINITE, ALREADY)

    def to_dict(self):
        return {"kind": self.kind, "t": self.t, "method": self.method, "bound_time": self.bound_time}


@dataclass(frozen=True)
class SymmetricTwoModeState:
    """Two-mode state with equal local variances ``n`` and correlations ``k_x, -k_y``."""

    n: float
    k_x: float
    k_y: float

    def covariance(self):
        n, kx, ky = self.n, self.k_x, self.k_y
        return np.array(
            [
                [n, 0.0, kx, 0.0],
                [0.0, n, 0.0, -ky],
                [kx, 0.0, n, 0.0],
                [0.0, -ky, 0.0, n],
            ]
        )

    @property
    def bona_fide_family(self):
        """The family condition ``n^2 - max(k_x, k_y)^2 >= 1``."""
        return self.n ** 2 - max(self.k_x, self.k_y) ** 2 >= 1.0 - SEPARABLE_TOL

    @property
    def bona_fide(self):
        """Strict test: smallest symplectic eigenvalue ``sqrt((n - k_max)(n + k_min)) >= 1``."""
        return validate_state(self.covariance()).physical

    @property
    def family_only(self):
        """Passes the family condition but fails the strict uncertainty test."""
        return self.bona_fide_family and not self.bona_fide

    @property
    def ppt_product(self):
        return (self.n - self.k_x) * (self.n - self.k_y)

    @property
    def entangled(self):
        return self.ppt_product < 1.0


def _require_physical(V):
    report = validate_state(V)
    if not report.physical:
        raise UnphysicalStateError(
            f"covariance matrix is not physical (min symplectic eigenvalue "
            f"{report.min_symplectic_eigenvalue:.6g})"
        )


def _trajectory(V0, bath):
    """``t -> exp(-gamma0 t) V0 + (1 - exp(-gamma0 t)) V_inf^(+n)``.

    Identical to applying the locally extended bath channel, without
    rebuilding channel objects at every evaluation.
    """
    V0 = np.asarray(V0, dtype=float)
    W = asymptotic_state(bath, V0.shape[0] // 2)
    g = bath.gamma0

    def at(t):
        return math.exp(-g * t) * V0 - math.expm1(-g * t) * W

    return at, W


def _horizon(bath, horizon):
    if horizon is None:
        return DEFAULT_HORIZON / bath.gamma0
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    return float(horizon)


def _bisect(f, lo, hi, tol):
    """Shrink ``[lo, hi]`` with ``f(lo) < 1 <= f(hi)`` to width ``tol``; return ``hi``."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) >= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def _first_crossing(f, horizon, tol, monotone, margin=0.0):
    """First time ``f(t) >= 1`` on ``[0, horizon]``, or ``None``.

    Monotone functions are bracketed on the whole interval; otherwise a
    uniform scan locates the first sample at or above ``1 + margin`` and
    bisection refines between it and its predecessor.
    """
    if monotone:
        if f(horizon) < 1.0 + margin:
            return None
        return _bisect(f, 0.0, horizon, tol)
    ts = np.linspace(0.0, horizon, SCAN_SAMPLES)
    prev = 0.0
    for t in ts[1:]:
        if f(t) >= 1.0 + margin:
            return _bisect(f, prev, float(t), tol)
        prev = float(t)
    return None


def t_max(gamma0, N):
    """Largest possible classicality time over all initial states, ``-ln(N/(N+2))/gamma0``."""
    if not gamma0 > 0:
        raise DomainError("gamma0 must be positive")
    if N < 0:
        raise DomainError("N must be non-negative")
    if N == 0:
        return math.inf
    return -math.log(N / (N + 2)) / gamma0


def thermal_classicality_closed_form(gamma0, N, n_min0):
    """Time at which ``exp(-g t) n_min0 + (N/2 + 1)(1 - exp(-g t))`` reaches 1."""
    return -math.log(N / (N + 2 - 2 * n_min0)) / gamma0


def squeezed_classicality_bound(n0, bath):
    """Closed-form upper bound on the classicality time under a squeezed bath.

    Uses the lower bound ``n(t) >= exp(-g t) n0 + (1 - exp(-g t))(N/2 + 1 - |M|)``.
    Returns ``None`` when that bound never reaches 1.
    """
    if bath.kind != SQUEEZED:
        raise BathKindError("squeezed_classicality_bound needs a squeezed_thermal bath")
    if not n0 < 1:
        raise DomainError("bound is only defined for a non-classical start (n0 < 1)")
    N = bath.effective_N
    absM = abs(bath.M)
    if asymptotic_min_eigenvalue(bath) < 1.0:
        return None
    num = N - 2 * absM
    den = N + 2 - 2 * absM - 2 * n0
    if den <= 0:
        return None
    arg = num / den
    if not 0 < arg <= 1:
        return None
    return -math.log(arg) / bath.gamma0


def classicality_time(V0, bath, horizon=None, method="auto"):
    """First time the evolved state satisfies ``V(t) >= I``.

    Args:
        V0: initial covariance matrix (any number of modes, must be physical)
        bath: identical local bath on every mode
        horizon: search horizon for bisection (default ``50 / gamma0``)
        method: ``"auto"`` (closed form for thermal baths, bisection otherwise),
            ``"closed_form"`` (thermal only) or ``"bisection"``

    Returns:
        TransitionResult
    """
    _require_physical(V0)
    horizon = _horizon(bath, horizon)
    if method not in ("auto", "closed_form", "bisection"):
        raise ValueError(f"unknown method {method!r}")
    thermal = bath.kind == THERMAL
    if method == "closed_form" and not thermal:
        raise BathKindError("closed form is exact only for thermal baths")
    use_closed = thermal and method != "bisection"
    method_name = "closed_form" if use_closed else "bisection"

    n0 = min_eigenvalue(V0)
    bound = None
    if not thermal and n0 < 1.0:
        bound = squeezed_classicality_bound(n0, bath)
    if is_classical(V0):
        return TransitionResult(ALREADY, 0.0, method_name, bound)

    if thermal and bath.N == 0:
        # n_min(t) = 1 - (1 - n0) exp(-g t) approaches 1 only asymptotically
        return TransitionResult(NEVER, None, method_name, None)
    if use_closed:
        return TransitionResult(FINITE, thermal_classicality_closed_form(bath.gamma0, bath.N, n0), method_name)

    at, W = _trajectory(V0, bath)
    t = _first_crossing(
        lambda s: min_eigenvalue(at(s)),
        horizon,
        BISECTION_TOL / bath.gamma0,
        monotone=thermal,
    )
    if t is not None:
        return TransitionResult(FINITE, t, method_name, bound)
    if min_eigenvalue(W) < 1.0 - CLASSICAL_TOL:
        return TransitionResult(NEVER, None, method_name, bound)
    return TransitionResult(HORIZON_EXHAUSTED, None, method_name, bound)


def partial_transpose(V):
    """Flip the sign of the last mode's momentum (``p2 -> -p2``)."""
    V = np.asarray(V, dtype=float)
    P = np.ones(V.shape[0])
    P[-1] = -1.0
    return V * np.outer(P, P)


def ppt_min_symplectic_eigenvalue(V):
    V = np.asarray(V, dtype=float)
    if V.shape != (4, 4):
        raise DimensionError(f"two-mode covariance matrix must be 4x4, got {V.shape}")
    return float(symplectic_eigenvalues(partial_transpose(V))[0])


def is_separable_two_mode(V):
    """PPT (Simon) separability test for a physical two-mode Gaussian state."""
    if np.shape(V) != (4, 4):
        raise DimensionError(f"two-mode covariance matrix must be 4x4, got {np.shape(V)}")
    _require_physical(V)
    return ppt_min_symplectic_eigenvalue(V) >= 1.0 - SEPARABLE_TOL


def esd_time(V0, bath, horizon=None):
    """First time a two-mode state becomes separable under identical local baths.

    Scans the PPT minimal symplectic eigenvalue of the evolved covariance and
    bisects the first crossing of 1.
    """
    V0 = np.asarray(V0, dtype=float)
    if V0.shape != (4, 4):
        raise DimensionError(f"two-mode covariance matrix must be 4x4, got {V0.shape}")
    _require_physical(V0)
    horizon = _horizon(bath, horizon)
    if ppt_min_symplectic_eigenvalue(V0) >= 1.0 - SEPARABLE_TOL:
        return TransitionResult(ALREADY, 0.0, "bisection")
    at, W = _trajectory(V0, bath)
    nu_inf = ppt_min_symplectic_eigenvalue(W)
    # an asymptote on the boundary (pure loss) is approached from below; only
    # crossings that clear rounding noise count
    margin = BOUNDARY_MARGIN if abs(nu_inf - 1.0) <= SEPARABLE_TOL else 0.0
    t = _first_crossing(
        lambda s: ppt_min_symplectic_eigenvalue(at(s)),
        horizon,
        BISECTION_TOL / bath.gamma0,
        monotone=False,
        margin=margin,
    )
    if t is not None:
        return TransitionResult(FINITE, t, "bisection")
    if nu_inf <= 1.0 + SEPARABLE_TOL:
        return TransitionResult(NEVER, None, "bisection")
    return TransitionResult(HORIZON_EXHAUSTED, None, "bisection")


def esd_time_symmetric(state, bath, horizon=None):
    """ESD time for a :class:`SymmetricTwoModeState`.

    With a thermal bath and ``k_x == k_y`` the PPT quantity is
    ``n(t) - k(t) = (N/2 + 1) + (n - k - N/2 - 1) exp(-g t)``, solved in closed
    form; every other case goes through :func:`esd_time`.
    """
    V0 = state.covariance()
    _require_physical(V0)
    if not state.entangled:
        return TransitionResult(ALREADY, 0.0, "closed_form")
    if bath.kind == THERMAL and state.k_x == state.k_y:
        N = bath.N
        if N == 0:
            return TransitionResult(NEVER, None, "closed_form")
        gap = state.n - state.k_x
        return TransitionResult(FINITE, -math.log(N / (N + 2 - 2 * gap)) / bath.gamma0, "closed_form")
    return esd_time(V0, bath, horizon)
