"""Hamiltonian instance, momentum grids, 2x2 momentum blocks and phase boundaries.

The spin chain is

    H = sum_j [(1 + i g)/4 X_j X_{j+1} + (1 - i g)/4 Y_j Y_{j+1}
               + K/4 (X_j Y_{j+1} + Y_j X_{j+1}) + h/2 Z_j]

with periodic boundaries. After the Jordan-Wigner and Fourier maps the even
parity sector splits into blocks labelled by phi_p = (2p - 1) pi / N. In the
basis (vacuum, pair) each block reads cos(phi) * 1 + H_p with the traceless

    H_p = [[-(h + cos phi), -(g + K) sin phi],
           [ (g - K) sin phi,  h + cos phi  ]]

whose eigenvalues are +-eps, eps^2 = (h + cos phi)^2 - (g^2 - K^2) sin^2 phi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, InvalidParameterError

THERMODYNAMIC = "thermodynamic"
DEFAULT_QUADRATURE_NODES = 2048


@dataclass(frozen=True)
class ModelParams:
    """One instance of the chain.

    Parameters
    ----------
    gamma : float
        Strength of the imaginary XY anisotropy, >= 0.
    kappa_ksea : float
        KSEA coupling K, >= 0.
    h : float
        Transverse field. Negative values are allowed.
    n_sites : int or "thermodynamic"
        Even chain length >= 4, or the thermodynamic marker.
    """

    gamma: float
    kappa_ksea: float
    h: float
    n_sites: int | str = 5000

    def __post_init__(self):
        for name in ("gamma", "kappa_ksea", "h"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, (int, float, np.floating, np.integer)):
                raise InvalidParameterError(f"{name} must be a real number, got {val!r}")
            if not math.isfinite(val):
                raise InvalidParameterError(f"{name} must be finite, got {val!r}")
            object.__setattr__(self, name, float(val))
        if self.gamma < 0 or self.kappa_ksea < 0:
            raise InvalidParameterError("gamma and kappa_ksea must be non-negative")
        n = self.n_sites
        if isinstance(n, str):
            if n.lower() not in (THERMODYNAMIC, "inf"):
                raise InvalidParameterError(f"unknown n_sites marker {n!r}")
            object.__setattr__(self, "n_sites", THERMODYNAMIC)
        else:
            if isinstance(n, bool) or int(n) != n:
                raise InvalidParameterError(f"n_sites must be an integer, got {n!r}")
            n = int(n)
            if n < 4 or n % 2:
                raise InvalidParameterError(f"n_sites must be even and >= 4, got {n}")
            object.__setattr__(self, "n_sites", n)

    @property
    def thermodynamic(self) -> bool:
        return self.n_sites == THERMODYNAMIC

    @property
    def g2(self) -> float:
        """gamma^2 - K^2, the combination that controls the sign of the pairing product."""
        return self.gamma**2 - self.kappa_ksea**2

    def with_field(self, h: float) -> ModelParams:
        return replace(self, h=float(h))

    def as_dict(self) -> dict:
        return {"gamma": self.gamma, "kappa_ksea": self.kappa_ksea, "h": self.h,
                "n_sites": self.n_sites}


@dataclass(frozen=True)
class MomentumGrid:
    """Angles in (0, pi) with weights such that ``sum(w * f)`` is the block average.

    For a finite chain the weights are 2/N, so the weighted sum equals
    (2/N) sum_p f(phi_p). In the thermodynamic limit it approximates
    (1/pi) int_0^pi f(phi) dphi.
    """

    angles: np.ndarray
    weights: np.ndarray
    kind: str = "sum"

    def __len__(self):
        return len(self.angles)

    def average(self, values) -> complex:
        """Weighted sum in fixed (ascending angle) order."""
        return np.sum(self.weights * np.asarray(values))


def _gauss_legendre_panels(breaks, nodes, order=32):
    """Composite Gauss-Legendre rule on (0, pi) split at ``breaks``.

    Each segment [a, b] between breakpoints is mapped through
    phi = a + (b - a) s^2 (3 - 2 s), whose derivative vanishes at both ends.
    That softens the square-root and logarithmic endpoint singularities
    produced by branch points of eps. The s interval is then covered by
    panels of ``order`` Gauss-Legendre points.
    """
    pts = np.unique(np.clip(np.asarray(sorted(breaks), dtype=float), 0.0, np.pi))
    pts = pts[np.concatenate(([True], np.diff(pts) > 1e-13))] if len(pts) else pts
    pts = np.unique(np.concatenate(([0.0], pts, [np.pi])))
    x, w = np.polynomial.legendre.leggauss(order)
    ang, wts = [], []
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 1e-13:
            continue
        panels = max(1, int(round(nodes * (b - a) / np.pi / order)))
        edges = np.linspace(0.0, 1.0, panels + 1)
        half = 0.5 * np.diff(edges)
        s = (edges[:-1, None] + half[:, None] * (x[None, :] + 1.0)).ravel()
        ws = (half[:, None] * w[None, :]).ravel()
        ang.append(a + (b - a) * s * s * (3.0 - 2.0 * s))
        wts.append((b - a) * 6.0 * s * (1.0 - s) * ws / np.pi)
    return np.concatenate(ang), np.concatenate(wts)


def singular_angles(params: ModelParams) -> list[float]:
    """Angles where eps is non-smooth: broken-window edges and zeros of h + cos phi."""
    out = []
    win = broken_momentum_window(params)
    if win is not None:
        out.extend(win)
    if abs(params.h) < 1.0:
        out.append(math.acos(-params.h))
    return out


def momentum_grid(params: ModelParams, nodes: int = DEFAULT_QUADRATURE_NODES,
                  breakpoints=()) -> MomentumGrid:
    """Momentum angles of the even-parity sector.

    Finite chains get the N/2 anti-periodic angles (2p - 1) pi / N. The
    thermodynamic marker yields a composite Gauss-Legendre rule with about
    ``nodes`` points, split at the singular angles of eps and at any extra
    ``breakpoints`` (used by the quench code for critical momenta).
    """
    if params.thermodynamic:
        if nodes < 16:
            raise InvalidParameterError("quadrature needs at least 16 nodes")
        breaks = list(singular_angles(params)) + [float(b) for b in breakpoints]
        ang, wts = _gauss_legendre_panels(breaks, nodes)
        return MomentumGrid(ang, wts, kind="quadrature")
    n = params.n_sites
    ang = (2.0 * np.arange(1, n // 2 + 1) - 1.0) * np.pi / n
    return MomentumGrid(ang, np.full(ang.shape, 2.0 / n), kind="sum")


def block_parts(params: ModelParams, phi):
    """Return (a, b, d) with H_p = [[-a, -b], [d, a]]; vectorized over phi."""
    phi = np.asarray(phi, dtype=float)
    s = np.sin(phi)
    a = params.h + np.cos(phi)
    b = (params.gamma + params.kappa_ksea) * s
    d = (params.gamma - params.kappa_ksea) * s
    return a, b, d


def dispersion_squared(params: ModelParams, phi):
    a, _, _ = block_parts(params, phi)
    return a * a - params.g2 * np.sin(np.asarray(phi, dtype=float)) ** 2


def principal_sqrt(z2):
    """Square root with Re >= 0, and Im >= 0 when Re = 0.

    ``z2`` is real here, so casting to complex attaches +0j and numpy's
    principal branch maps negative reals onto the positive imaginary axis.
    """
    return np.sqrt(np.asarray(z2, dtype=float).astype(complex))


def dispersion(params: ModelParams, phi):
    """Complex eps(phi) on the principal branch."""
    return principal_sqrt(dispersion_squared(params, phi))


def block_matrices(params: ModelParams, phi):
    """Stack of traceless 2x2 blocks, shape ``phi.shape + (2, 2)``."""
    a, b, d = block_parts(params, phi)
    out = np.empty(np.shape(a) + (2, 2), dtype=complex)
    out[..., 0, 0] = -a
    out[..., 0, 1] = -b
    out[..., 1, 0] = d
    out[..., 1, 1] = a
    return out


@dataclass(frozen=True)
class BlockHamiltonian:
    phi: float
    matrix: np.ndarray
    eps: complex


def check_angle(phi) -> float:
    phi = float(phi)
    if not (0.0 < phi < math.pi):
        raise DomainError(f"phi must lie in (0, pi), got {phi!r}")
    return phi


def block_hamiltonian(params: ModelParams, phi: float) -> BlockHamiltonian:
    """Traceless block H_p and its dispersion at one angle."""
    phi = check_angle(phi)
    return BlockHamiltonian(phi, block_matrices(params, phi), complex(dispersion(params, phi)))


class Region(str, Enum):
    BROKEN = "RegionI_Broken"
    UNBROKEN = "RegionI_Unbroken"
    PROTECTED = "RegionII_Protected"


@dataclass(frozen=True)
class PhaseLabel:
    """Phase region plus the analytic boundary fields for given (gamma, K)."""

    region: Region
    h_c: float = 1.0
    h_ep: float | None = None
    h_f: float | None = None
    hermitian_h_f: float | None = None
    gamma_prime: float | None = None
    boundary_fields: dict = field(default_factory=dict)


def _sqrt_or_none(x):
    return math.sqrt(x) if x >= 0 else None


def classify_phase(params: ModelParams) -> PhaseLabel:
    """Label the region and fill in the exceptional, factorization and critical fields.

    gamma > K gives region I, broken for |h| below h_ep = sqrt(1 + g^2 - K^2).
    gamma <= K gives the RT-protected region II, where the ground state
    factorizes at h_f = sqrt(1 + g^2 - K^2) and gamma' = sqrt(K^2 - g^2)
    maps the chain onto a Hermitian XY chain.
    """
    g, k = params.gamma, params.kappa_ksea
    root = _sqrt_or_none(1.0 + g * g - k * k)
    herm = _sqrt_or_none(1.0 - g * g - k * k)
    if g > k:
        region = Region.BROKEN if abs(params.h) < root else Region.UNBROKEN
        bf = {"h_ep": root, "h_c": 1.0}
        if herm is not None:
            bf["hermitian_h_f"] = herm
        return PhaseLabel(region, h_ep=root, hermitian_h_f=herm, boundary_fields=bf)
    gp = math.sqrt(k * k - g * g)
    bf = {"h_c": 1.0, "gamma_prime": gp}
    if root is not None:
        bf["h_f"] = root
    if herm is not None:
        bf["hermitian_h_f"] = herm
    return PhaseLabel(Region.PROTECTED, h_f=root, hermitian_h_f=herm, gamma_prime=gp,
                      boundary_fields=bf)


def broken_momentum_window(params: ModelParams, tol: float = 1e-12):
    """Interval (phi_lo, phi_hi) where eps^2 < 0, or None.

    eps^2 is the quadratic (1 + g2) c^2 + 2 h c + h^2 - g2 in c = cos phi,
    with g2 = gamma^2 - K^2. A real window needs g2 > 0 and a positive
    discriminant g2 (1 + g2 - h^2). At the exceptional field the window
    shrinks to the double root, returned as a degenerate pair.
    """
    g2 = params.g2
    if g2 <= 0:
        return None
    lead = 1.0 + g2
    disc = g2 * (lead - params.h**2)
    if disc < -tol:
        return None
    r = math.sqrt(max(disc, 0.0))
    c_lo = (-params.h - r) / lead
    c_hi = (-params.h + r) / lead
    if c_lo >= 1.0 or c_hi <= -1.0:
        return None
    return math.acos(min(c_hi, 1.0)), math.acos(max(c_lo, -1.0))


def min_dispersion_squared(params: ModelParams) -> float:
    """Numerical minimum of eps^2 over (0, pi), found by bounded scalar search."""
    f = lambda p: float(dispersion_squared(params, p))
    grid = np.linspace(1e-9, np.pi - 1e-9, 257)
    k = int(np.argmin(dispersion_squared(params, grid)))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    return min(float(res.fun), f(grid[k]))


def locate_exceptional_field(gamma: float, kappa_ksea: float, tol: float = 1e-10) -> float:
    """Bisect in h >= 0 for the edge of the broken phase, using only min eps^2 sign.

    Independent of the closed form h_ep; requires gamma > K.
    """
    if gamma <= kappa_ksea:
        raise InvalidParameterError("an exceptional field exists only for gamma > K")
    p = ModelParams(gamma, kappa_ksea, 0.0, THERMODYNAMIC)
    broken = lambda h: min_dispersion_squared(p.with_field(h)) < 0.0
    lo, hi = 0.0, 1.0
    while broken(hi):
        lo, hi = hi, 2.0 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if broken(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
