"""Nearest-neighbour correlators, two-site density matrix and logarithmic negativity.

Sign conventions: Z = diag(1, -1) with spin up identified with an occupied
fermion mode. The block amplitudes (A, B) sit on (vacuum, pair). With the
kernels

    Lambda = |A|^2 - |B|^2,   Omega- = A* B - A B*,   Omega+ = -(A* B + A B*)

and W[f] = (2/N) sum_p f(phi_p) (or (1/pi) int dphi), the nonzero two-site
quantities are

    mz  = -W[Lambda]
    cxx = -W[Lambda cos] + W[i Omega- sin]
    cyy = -W[Lambda cos] - W[i Omega- sin]
    cxy = cyx = W[Omega+ sin]
    czz = mz^2 - cxx cyy + cxy^2

All of these agree with dense diagonalization of the spin chain, including
inside the broken window.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (ConventionError, InconsistentCorrelatorsError, InvalidParameterError,
                     NoZeroBracketedError)
from .features import Feature, detect_features
from .groundstate import BogoliubovCoeffs, ground_amplitudes
from .model import MomentumGrid, ModelParams, momentum_grid
from .util import inclusive_range, parallel_map

IMAG_TOL = 1e-8
PSD_FLOOR = 1e-9
PSD_FAIL = 1e-6

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"x": SX, "y": SY, "z": SZ}


@dataclass(frozen=True)
class KernelValues:
    lambda_k: np.ndarray
    omega_plus: np.ndarray
    omega_minus: np.ndarray


def kernel_values(amp0, amp2) -> KernelValues:
    """Occupation and pairing kernels from block amplitudes (any normalization)."""
    a = np.asarray(amp0, dtype=complex)
    b = np.asarray(amp2, dtype=complex)
    n = np.abs(a) ** 2 + np.abs(b) ** 2
    lam = (np.abs(a) ** 2 - np.abs(b) ** 2) / n
    om_minus = (np.conj(a) * b - a * np.conj(b)) / n
    om_plus = -(np.conj(a) * b + a * np.conj(b)) / n
    return KernelValues(lam.astype(complex), om_plus, om_minus)


def kernel_values_from_coefficients(c: BogoliubovCoeffs) -> KernelValues:
    """Same kernels written with the Bogoliubov coefficients u and v1."""
    n = abs(c.u) ** 2 + abs(c.v1) ** 2
    lam = (abs(c.v1) ** 2 - abs(c.u) ** 2) / n
    om_minus = (np.conj(c.u) * c.v1 - np.conj(c.v1) * c.u) / n
    om_plus = (np.conj(c.v1) * c.u + np.conj(c.u) * c.v1) / n
    return KernelValues(np.asarray(lam, dtype=complex), np.asarray(om_plus),
                        np.asarray(om_minus))


@dataclass(frozen=True)
class CorrelatorSet:
    """mz = <Z_j> and the nonzero nearest-neighbour <P_j Q_{j+1}>."""

    mz: float
    cxx: float
    cyy: float
    cxy: float
    czz: float

    @property
    def cyx(self) -> float:
        return self.cxy

    def as_dict(self) -> dict:
        return {"mz": self.mz, "cxx": self.cxx, "cyy": self.cyy, "cxy": self.cxy,
                "cyx": self.cyx, "czz": self.czz}

    def as_array(self) -> np.ndarray:
        return np.array([self.mz, self.cxx, self.cyy, self.cxy, self.czz])

    def within_bounds(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(self.as_array()) <= 1.0 + tol))


def _real(value, name, tol=IMAG_TOL):
    value = np.asarray(value)
    if np.any(np.abs(np.imag(value)) > tol):
        worst = float(np.max(np.abs(np.imag(value))))
        raise ConventionError(f"{name} carries imaginary residue {worst:.3e}")
    return np.real(value)


def assemble_correlators(angles, weights, kernels: KernelValues, tol: float = IMAG_TOL):
    """Kernel sums for one state or, with 2-D kernels (blocks x samples), many.

    Returns a tuple of real arrays (mz, cxx, cyy, cxy, czz) broadcast over
    any trailing sample axis.
    """
    phi = np.asarray(angles)
    w = np.asarray(weights)
    shape = (-1,) + (1,) * (np.ndim(kernels.lambda_k) - 1)
    c = np.cos(phi).reshape(shape)
    s = np.sin(phi).reshape(shape)
    w = w.reshape(shape)
    lam = kernels.lambda_k
    mz = _real(-np.sum(w * lam, axis=0), "mz", tol)
    diag = -np.sum(w * lam * c, axis=0)
    anti = np.sum(w * 1j * kernels.omega_minus * s, axis=0)
    cxx = _real(diag + anti, "cxx", tol)
    cyy = _real(diag - anti, "cyy", tol)
    cxy = _real(np.sum(w * kernels.omega_plus * s, axis=0), "cxy", tol)
    czz = mz**2 - cxx * cyy + cxy**2
    return mz, cxx, cyy, cxy, czz


def correlators_from_amplitudes(grid: MomentumGrid, amp0, amp2,
                                tol: float = IMAG_TOL) -> CorrelatorSet:
    vals = assemble_correlators(grid.angles, grid.weights, kernel_values(amp0, amp2), tol)
    return CorrelatorSet(*(float(v) for v in vals))


def correlators(params: ModelParams, grid: MomentumGrid | None = None, **grid_kw) -> CorrelatorSet:
    """Ground-state mz and nearest-neighbour correlators.

    Finite chains use the (2/N) block sums, the thermodynamic marker uses the
    quadrature rule. Imaginary residues above 1e-8 raise ConventionError.
    """
    if grid is None:
        grid = momentum_grid(params, **grid_kw)
    a0, a2 = ground_amplitudes(params, grid.angles)
    return correlators_from_amplitudes(grid, a0, a2)


@dataclass(frozen=True)
class TwoQubitState:
    """Density matrix of two neighbouring spins, ordered (site j, site j+1)."""

    rho: np.ndarray
    clamped: bool = False

    def __post_init__(self):
        r = np.asarray(self.rho, dtype=complex)
        if r.shape != (4, 4):
            raise InvalidParameterError("two-qubit state must be 4x4")
        if np.max(np.abs(r - r.conj().T)) > 1e-10:
            raise InvalidParameterError("density matrix is not Hermitian")
        if abs(np.trace(r) - 1.0) > 1e-12:
            raise InvalidParameterError("density matrix trace differs from 1")
        if np.min(np.linalg.eigvalsh(0.5 * (r + r.conj().T))) < -PSD_FLOOR:
            raise InvalidParameterError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "rho", r)


def pauli_pair(p: str, q: str) -> np.ndarray:
    return np.kron(PAULI[p], PAULI[q])


def two_site_density_matrix(c: CorrelatorSet) -> TwoQubitState:
    """rho = (1/4)[1 + mz (Z1 + 1Z) + sum_kl C^kl P_k P_l].

    Eigenvalues in [-1e-6, 0) are clamped to zero and the trace restored;
    anything more negative raises InconsistentCorrelatorsError.
    """
    if not c.within_bounds():
        raise InconsistentCorrelatorsError(f"correlators outside [-1, 1]: {c}")
    rho = np.eye(4, dtype=complex)
    rho += c.mz * (np.kron(SZ, I2) + np.kron(I2, SZ))
    rho += c.cxx * pauli_pair("x", "x") + c.cyy * pauli_pair("y", "y") + c.czz * pauli_pair("z", "z")
    rho += c.cxy * pauli_pair("x", "y") + c.cyx * pauli_pair("y", "x")
    rho = 0.25 * rho
    rho = 0.5 * (rho + rho.conj().T)
    vals, vecs = np.linalg.eigh(rho)
    if vals[0] < -PSD_FAIL:
        raise InconsistentCorrelatorsError(f"density matrix eigenvalue {vals[0]:.3e} < -1e-6")
    if vals[0] < 0:
        vals = np.clip(vals, 0.0, None)
        vals /= vals.sum()
        rho = (vecs * vals) @ vecs.conj().T
        rho = 0.5 * (rho + rho.conj().T)
        return TwoQubitState(rho, clamped=True)
    return TwoQubitState(rho)


def partial_transpose(rho) -> np.ndarray:
    """Transpose on the second qubit; works on stacks of 4x4 matrices."""
    r = np.asarray(rho)
    lead = r.shape[:-2]
    r = r.reshape(lead + (2, 2, 2, 2))
    return np.swapaxes(r, -3, -1).reshape(lead + (4, 4))


def log_negativity(rho) -> float | np.ndarray:
    """E = log2(1 + 2 * |sum of negative eigenvalues of rho^T2|).

    Accepts a TwoQubitState, a 4x4 array, or a stack of 4x4 arrays.
    """
    if isinstance(rho, TwoQubitState):
        rho = rho.rho
    pt = partial_transpose(rho)
    pt = 0.5 * (pt + np.conj(np.swapaxes(pt, -1, -2)))
    ev = np.linalg.eigvalsh(pt)
    neg = -np.sum(np.where(ev < 0, ev, 0.0), axis=-1)
    out = np.log2(1.0 + 2.0 * neg)
    return float(out) if np.ndim(out) == 0 else out


def density_matrices(mz, cxx, cyy, cxy, czz) -> np.ndarray:
    """Stack of two-site density matrices from arrays of correlators (no checks)."""
    mz, cxx, cyy, cxy, czz = (np.asarray(v, dtype=float)[..., None, None]
                              for v in (mz, cxx, cyy, cxy, czz))
    rho = (np.eye(4) + mz * (np.kron(SZ, I2) + np.kron(I2, SZ))
           + cxx * pauli_pair("x", "x") + cyy * pauli_pair("y", "y")
           + czz * pauli_pair("z", "z")
           + cxy * (pauli_pair("x", "y") + pauli_pair("y", "x")))
    return 0.25 * rho


def entanglement(params: ModelParams, **grid_kw) -> float:
    """Nearest-neighbour logarithmic negativity of the ground state."""
    return log_negativity(two_site_density_matrix(correlators(params, **grid_kw)))


@dataclass(frozen=True)
class EntanglementScan:
    h: np.ndarray
    E: np.ndarray
    dEdh: np.ndarray
    kinks: list[Feature] = field(default_factory=list)

    @property
    def kink_positions(self) -> list[float]:
        return [k.position for k in self.kinks]


def entanglement_scan(template: ModelParams, h_range, dh: float | None = None,
                      threads: int | None = None, factor: float = 10.0,
                      **grid_kw) -> EntanglementScan:
    """E(h) over a field range, its central-difference derivative and kinks.

    ``h_range`` is (start, stop) combined with ``dh``, or an explicit array
    of equally spaced fields when ``dh`` is None.
    """
    if dh is None:
        hs = np.asarray(h_range, dtype=float)
    else:
        hs = inclusive_range(float(h_range[0]), float(h_range[1]), float(dh))
    if hs.size < 3:
        raise InvalidParameterError("entanglement scan needs at least 3 field values")
    vals = parallel_map(lambda h: entanglement(template.with_field(h), **grid_kw), hs, threads)
    E = np.array(vals, dtype=float)
    dE = np.gradient(E, hs)
    kinks = detect_features(hs, E, factor=factor, refine="peak")
    return EntanglementScan(hs, E, dE, kinks)


@dataclass(frozen=True)
class ZeroResult:
    """Outcome of the entanglement-zero search.

    For an isolated zero ``h`` is the estimate and ``interval`` its final
    bracket. When E vanishes on a whole stretch, ``degenerate`` is True and
    ``interval`` is the extent of that stretch.
    """

    h: float | None
    interval: tuple[float, float]
    degenerate: bool
    value: float
    closed_form: float | None = None


ZERO_TOL = 1e-10


def find_entanglement_zero(template: ModelParams, h_interval, tol: float = 1e-4,
                           samples: int = 41, check_closed_form: bool = True,
                           **grid_kw) -> ZeroResult:
    """Locate the factorization field where the nearest-neighbour E vanishes.

    A coarse scan finds the smallest sample; E(h) has a V-shaped zero, so a
    golden-section search on the neighbouring bracket narrows it below
    ``tol``. A zero stretch of two or more samples is reported as an
    interval, with its edges bisected to ``tol``.

    Raises
    ------
    NoZeroBracketedError
        If the smallest E in the interval exceeds 1e-3.
    ConventionError
        If the estimate misses sqrt(1 + g^2 - K^2) by more than 5e-3.
    """
    if template.gamma > template.kappa_ksea:
        raise InvalidParameterError("factorization search requires gamma <= K")
    lo, hi = float(h_interval[0]), float(h_interval[1])
    if not hi > lo:
        raise InvalidParameterError("empty search interval")
    E = lambda h: entanglement(template.with_field(h), **grid_kw)
    hs = np.linspace(lo, hi, samples)
    es = np.array([E(h) for h in hs])
    closed = 1.0 + template.gamma**2 - template.kappa_ksea**2
    closed = float(np.sqrt(closed)) if closed >= 0 else None

    zero = es < ZERO_TOL
    if zero.sum() >= 2:
        k0 = int(np.argmax(zero))
        k1 = k0
        while k1 + 1 < len(hs) and zero[k1 + 1]:
            k1 += 1
        left = _bisect_edge(E, hs[k0 - 1], hs[k0], tol) if k0 > 0 else hs[0]
        right = _bisect_edge(E, hs[k1 + 1], hs[k1], tol) if k1 + 1 < len(hs) else hs[-1]
        return ZeroResult(None, (float(left), float(right)), True, float(es[k0:k1 + 1].max()),
                          closed)

    k = int(np.argmin(es))
    a, b = hs[max(k - 1, 0)], hs[min(k + 1, len(hs) - 1)]
    phi = 0.5 * (np.sqrt(5.0) - 1.0)
    x1, x2 = b - phi * (b - a), a + phi * (b - a)
    f1, f2 = E(x1), E(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - phi * (b - a)
            f1 = E(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + phi * (b - a)
            f2 = E(x2)
    mid = 0.5 * (a + b)
    val = E(mid)
    if val > 1e-3:
        raise NoZeroBracketedError(f"minimum E = {val:.3e} on [{lo}, {hi}] is not a zero")
    if check_closed_form and closed is not None and abs(mid - closed) > 5e-3:
        raise ConventionError(f"zero at {mid:.6f} differs from closed form {closed:.6f}")
    return ZeroResult(float(mid), (float(a), float(b)), False, float(val), closed)


def _bisect_edge(E, outside, inside, tol):
    """Edge of the zero set between a nonzero sample and a zero sample."""
    while abs(inside - outside) > tol:
        mid = 0.5 * (inside + outside)
        if E(mid) < ZERO_TOL:
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)
