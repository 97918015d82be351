"""Seeded random Gaussian states for property tests and sweeps.

Physical states are built as ``S diag(nu) S^T`` with ``nu >= 1`` and ``S``
a product of symplectic rotations, single-mode squeezers, beam splitters and
two-mode squeezers, so physicality holds by construction.
"""

import math

import numpy as np

from .criteria import SymmetricTwoModeState
from .phase_space import is_classical

DEFAULT_SEED = 20100611


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def squeezer(r):
    return np.diag([math.exp(-r), math.exp(r)])


def _embed(block, modes, n_modes):
    S = np.eye(2 * n_modes)
    idx = [k for m in modes for k in (2 * m, 2 * m + 1)]
    S[np.ix_(idx, idx)] = block
    return S


def beam_splitter(theta, i, j, n_modes):
    c, s = math.cos(theta), math.sin(theta)
    I = np.eye(2)
    return _embed(np.block([[c * I, s * I], [-s * I, c * I]]), (i, j), n_modes)


def two_mode_squeezer(r, i, j, n_modes):
    ch, sh = math.cosh(r), math.sinh(r)
    I, Z = np.eye(2), np.diag([1.0, -1.0])
    return _embed(np.block([[ch * I, sh * Z], [sh * Z, ch * I]]), (i, j), n_modes)


def local(block, i, n_modes):
    return _embed(block, (i,), n_modes)


def random_symplectic(rng, n_modes, max_squeeze=1.0):
    """Random product of elementary symplectic maps on ``n_modes`` modes."""
    S = np.eye(2 * n_modes)
    for i in range(n_modes):
        S = local(rotation(rng.uniform(0, 2 * math.pi)) @ squeezer(rng.uniform(-max_squeeze, max_squeeze))
                  @ rotation(rng.uniform(0, 2 * math.pi)), i, n_modes) @ S
    for i in range(n_modes):
        for j in range(i + 1, n_modes):
            S = beam_splitter(rng.uniform(0, 2 * math.pi), i, j, n_modes) @ S
            if rng.random() < 0.5:
                S = two_mode_squeezer(rng.uniform(0, max_squeeze), i, j, n_modes) @ S
    return S


def random_physical_state(rng, n_modes, max_squeeze=1.0, max_thermal=2.0):
    """``S diag(nu) S^T`` with random symplectic ``S`` and ``nu`` in ``[1, 1 + max_thermal]``."""
    nu = np.repeat(1.0 + rng.uniform(0.0, max_thermal, size=n_modes), 2)
    S = random_symplectic(rng, n_modes, max_squeeze)
    V = S @ np.diag(nu) @ S.T
    return 0.5 * (V + V.T)


def random_nonclassical_states(count, n_modes, seed=DEFAULT_SEED, **kwargs):
    """``count`` physical states with ``min eig(V) < 1`` (rejection sampled)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        V = random_physical_state(rng, n_modes, **kwargs)
        if not is_classical(V):
            out.append(V)
    return out


def random_symmetric_family(count, seed=DEFAULT_SEED, n_range=(1.0, 5.0), equal_k=False):
    """Symmetric two-mode family members passing the strict physicality test.

    ``n`` is uniform on ``n_range`` and each ``k`` is a uniform fraction of
    ``sqrt(n^2 - 1)``; members violating ``(n - k_max)(n + k_min) >= 1`` are
    rejected.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = rng.uniform(*n_range)
        kmax = math.sqrt(n * n - 1.0)
        kx = rng.uniform(0.0, 1.0) * kmax
        ky = kx if equal_k else rng.uniform(0.0, 1.0) * kmax
        if (n - max(kx, ky)) * (n + min(kx, ky)) < 1.0:
            continue
        out.append(SymmetricTwoModeState(n, kx, ky))
    return out
