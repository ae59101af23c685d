"""Bogoliubov coefficients, per-block ground-state amplitudes and ground energy.

Every block contributes cos(phi) +- eps. On the principal branch the -eps
eigenvalue always has the lower real part when eps is real and the more
negative imaginary part when eps is imaginary, so it is the selected branch
everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoalescenceError, ExceptionalPointError, InvalidParameterError
from .model import (ModelParams, block_hamiltonian, block_parts, check_angle, dispersion,
                    momentum_grid)

M_THRESHOLD = 1e-12


@dataclass(frozen=True)
class BogoliubovCoeffs:
    u: complex
    v1: complex
    v2: complex
    m_norm: complex


@dataclass(frozen=True)
class BlockState:
    """Amplitudes on the vacuum (amp0) and on the pair state (amp2) of one block."""

    phi: float
    amp0: complex
    amp2: complex

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amp0, self.amp2], dtype=complex)

    @property
    def norm(self) -> float:
        return float(np.sqrt(abs(self.amp0) ** 2 + abs(self.amp2) ** 2))


def bogoliubov_coefficients(params: ModelParams, phi: float) -> BogoliubovCoeffs:
    """u, v1, v2 of the non-Hermitian Bogoliubov transform at one angle.

    u = (a - eps)/sqrt(M), v1 = (g + K) sin/sqrt(M), v2 = (g - K) sin/sqrt(M)
    with a = h + cos phi and M = -(a - eps)^2 + (g^2 - K^2) sin^2 phi.

    Raises
    ------
    ExceptionalPointError
        If |M| < 1e-12. Note M also vanishes on the whole gamma = K line
        wherever h + cos phi > 0, although the block is diagonalizable there.
        ``ground_block_amplitudes`` does not need these formulas.
    """
    phi = check_angle(phi)
    a, b, d = block_parts(params, phi)
    eps = complex(dispersion(params, phi))
    m = -(a - eps) ** 2 + b * d
    if abs(m) < M_THRESHOLD:
        raise ExceptionalPointError(phi, m)
    root = np.sqrt(complex(m))
    return BogoliubovCoeffs(complex((a - eps) / root), complex(b / root), complex(d / root),
                            complex(m))


def ground_amplitudes(params: ModelParams, phi):
    """Vectorized Dirac-normalized right eigenvectors for the -eps branch.

    (H_p + eps) has rank one away from coalescence, so both rows give a null
    vector: w1 = (-b, a - eps), which is proportional to (-v1, u), and
    w2 = (a + eps, -d). The larger of the two is used, which avoids the 0/0
    of the u, v formulas when M -> 0.

    Returns
    -------
    amp0, amp2 : ndarray of complex
    """
    a, b, d = block_parts(params, phi)
    eps = dispersion(params, phi)
    w1a, w1b = -b + 0j, a - eps
    w2a, w2b = a + eps, -d + 0j
    n1 = np.abs(w1a) ** 2 + np.abs(w1b) ** 2
    n2 = np.abs(w2a) ** 2 + np.abs(w2b) ** 2
    use1 = n1 >= n2
    amp0 = np.where(use1, w1a, w2a)
    amp2 = np.where(use1, w1b, w2b)
    nrm = np.sqrt(np.maximum(n1, n2))
    # H_p = 0 (gamma = K = 0 and h = -cos phi): every vector is an eigenvector, take the vacuum.
    zero = nrm == 0
    nrm = np.where(zero, 1.0, nrm)
    amp0 = np.where(zero, 1.0 + 0j, amp0 / nrm)
    amp2 = np.where(zero, 0j, amp2 / nrm)
    return amp0, amp2


def ground_block_amplitudes(params: ModelParams, phi: float, tol: float = 1e-12) -> BlockState:
    """Ground-state amplitudes of one block, with coalescence detection.

    Raises
    ------
    CoalescenceError
        If eps vanishes while H_p does not, i.e. the block is a Jordan block.
    """
    blk = block_hamiltonian(params, phi)
    scale = max(1.0, float(np.max(np.abs(blk.matrix))))
    # compare eps^2: rounding in eps^2 of order 1e-16 becomes 1e-8 in eps
    if abs(blk.eps) ** 2 < tol * scale**2 and np.max(np.abs(blk.matrix)) > tol * scale:
        raise CoalescenceError(blk.phi)
    a0, a2 = ground_amplitudes(params, blk.phi)
    return BlockState(blk.phi, complex(a0), complex(a2))


def ground_eigenvalue(params: ModelParams, phi):
    """Selected even-block eigenvalue cos(phi) - eps of each block."""
    return np.cos(phi) - dispersion(params, phi)


def ground_energy(params: ModelParams) -> complex:
    """Total ground energy sum_p (cos phi_p - eps_p) of a finite chain."""
    if params.thermodynamic:
        raise InvalidParameterError("total energy diverges; use ground_energy_density")
    grid = momentum_grid(params)
    return complex(np.sum(ground_eigenvalue(params, grid.angles)))


def ground_energy_density(params: ModelParams, **grid_kw) -> complex:
    """Ground energy per site, valid for finite and thermodynamic chains."""
    grid = momentum_grid(params, **grid_kw)
    return complex(0.5 * grid.average(ground_eigenvalue(params, grid.angles)))
