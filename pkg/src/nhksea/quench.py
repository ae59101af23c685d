"""Sudden quenches h0 -> h1: block propagation, Loschmidt echo, DQPTs and sigma_E.

Each block evolves with exp(-i H_p t) = cos(eps t) 1 - i sin(eps t)/eps H_p
(the cos(phi) part of the block only adds a phase). For gamma != 0 this is
not unitary, so the evolved block norm n_p(t) drifts from 1 and the echo is
normalized as |<Psi0|Psi_t>|^2 / <Psi_t|Psi_t> = prod_p |f_p|^2 / n_p with

    f_p(t) = cos(eps1 t) - i <psi0|H1_p|psi0> sin(eps1 t) / eps1.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .correlations import (CorrelatorSet, assemble_correlators, correlators,
                           density_matrices, kernel_values, log_negativity)
from .errors import ConventionError, InvalidParameterError, NumericalError
from .features import detect_features
from .groundstate import BlockState, ground_amplitudes
from .model import (THERMODYNAMIC, BlockHamiltonian, ModelParams, block_parts, dispersion,
                    momentum_grid, singular_angles)
from .util import parallel_map

CHUNK = 256
# Late cusps need the log singularity at the critical momentum resolved finely.
RATE_NODES = 8192


@dataclass(frozen=True)
class QuenchSpec:
    params0: ModelParams
    params1: ModelParams
    t_max: float = 50.0
    dt: float = 0.01

    def __post_init__(self):
        p0, p1 = self.params0, self.params1
        if (p0.gamma, p0.kappa_ksea, p0.n_sites) != (p1.gamma, p1.kappa_ksea, p1.n_sites):
            raise InvalidParameterError("initial and final parameters differ beyond the field")
        if not (self.dt > 0 and self.t_max > 0 and math.isfinite(self.t_max)):
            raise InvalidParameterError("t_max and dt must be positive")

    @classmethod
    def from_fields(cls, gamma, kappa_ksea, h0, h1, n_sites=5000, t_max=50.0, dt=0.01):
        return cls(ModelParams(gamma, kappa_ksea, h0, n_sites),
                   ModelParams(gamma, kappa_ksea, h1, n_sites), t_max, dt)

    @property
    def times(self) -> np.ndarray:
        n = int(round(self.t_max / self.dt))
        return self.dt * np.arange(n + 1)

    @property
    def outside_derivation(self) -> bool:
        """True for gamma > K, where the product formula was never derived."""
        return self.params0.gamma > self.params0.kappa_ksea

    def as_dict(self) -> dict:
        return {"params0": self.params0.as_dict(), "params1": self.params1.as_dict(),
                "t_max": self.t_max, "dt": self.dt}

    def digest(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values differ in length")


def _sin_over(eps, t):
    """sin(eps t)/eps with the t limit at eps = 0; complex eps allowed."""
    eps, t = np.broadcast_arrays(np.asarray(eps), np.asarray(t, dtype=float))
    x = eps * t
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, eps)
    # two series terms carry the relative error below 1e-17 for |x| < 1e-4
    out = np.where(small, t * (1.0 - x * x / 6.0), np.sin(x) / safe)
    return out if out.ndim else out[()]


def propagate(params1: ModelParams, phi, amp0, amp2, t):
    """Raw amplitudes exp(-i H1_p t)(amp0, amp2); broadcasts phi against t."""
    a, b, d = block_parts(params1, phi)
    eps = dispersion(params1, phi)
    c = np.cos(eps * t)
    sn = _sin_over(eps, t)
    ha = -a * amp0 - b * amp2
    hb = d * amp0 + a * amp2
    return c * amp0 - 1j * sn * ha, c * amp2 - 1j * sn * hb


@dataclass(frozen=True)
class EvolvedBlock:
    state: BlockState
    raw: tuple[complex, complex]


def evolve_block(block1: BlockHamiltonian, psi0: BlockState, t: float) -> EvolvedBlock:
    """Propagate one block with the closed-form exponential."""
    if t < 0:
        raise InvalidParameterError("t must be non-negative")
    h = block1.matrix
    eps = block1.eps
    u = np.cos(eps * t) * np.eye(2) - 1j * _sin_over(eps, t) * h
    raw = u @ psi0.vector
    nrm = np.linalg.norm(raw)
    return EvolvedBlock(BlockState(psi0.phi, complex(raw[0] / nrm), complex(raw[1] / nrm)),
                        (complex(raw[0]), complex(raw[1])))


def initial_expectation(spec: QuenchSpec, phi):
    """<psi0|H1_p|psi0> for the ground state of the initial blocks (complex)."""
    a0, a2 = ground_amplitudes(spec.params0, phi)
    a, b, d = block_parts(spec.params1, phi)
    ha = -a * a0 - b * a2
    hb = d * a0 + a * a2
    return np.conj(a0) * ha + np.conj(a2) * hb


def _grid(spec: QuenchSpec, **grid_kw):
    p1 = spec.params1
    if not p1.thermodynamic:
        return momentum_grid(p1)
    grid_kw.setdefault("nodes", RATE_NODES)
    extra = list(grid_kw.pop("breakpoints", ()))
    extra += singular_angles(spec.params0)
    if not spec.outside_derivation:
        extra += list(dqpt_condition(spec).critical_angles)
    return momentum_grid(p1, breakpoints=extra, **grid_kw)


def _log_terms(spec: QuenchSpec, times, grid):
    """Per-time weighted sums of log|overlap|^2 and log(norm), chunked over t."""
    phi = grid.angles[:, None]
    a0, a2 = ground_amplitudes(spec.params0, grid.angles)
    a0, a2 = a0[:, None], a2[:, None]
    w = grid.weights[:, None]
    times = np.atleast_1d(np.asarray(times, dtype=float))
    lo = np.empty(times.shape)
    ln = np.empty(times.shape)
    lp = np.empty(times.shape)
    ex = initial_expectation(spec, grid.angles)[:, None]
    eps1 = dispersion(spec.params1, grid.angles)[:, None]
    with np.errstate(divide="ignore"):
        for s in range(0, len(times), CHUNK):
            t = times[None, s:s + CHUNK]
            b0, b2 = propagate(spec.params1, phi, a0, a2, t)
            ov = np.conj(a0) * b0 + np.conj(a2) * b2
            nrm = np.abs(b0) ** 2 + np.abs(b2) ** 2
            f = np.cos(eps1 * t) - 1j * ex * _sin_over(eps1, t)
            lo[s:s + CHUNK] = np.sum(w * np.log(np.abs(ov) ** 2), axis=0)
            ln[s:s + CHUNK] = np.sum(w * np.log(nrm), axis=0)
            lp[s:s + CHUNK] = np.sum(w * np.log(np.abs(f) ** 2), axis=0)
    return lo, ln, lp


def _scale(spec: QuenchSpec):
    """Factor turning weighted block sums into sums over blocks (finite N)."""
    p = spec.params1
    if p.thermodynamic:
        raise InvalidParameterError("the echo itself vanishes in the thermodynamic limit")
    return p.n_sites / 2.0


def loschmidt_echo(spec: QuenchSpec, t) -> float | np.ndarray:
    """Normalized echo |<Psi0|Psi_t>|^2 / <Psi_t|Psi_t> from evolved amplitudes."""
    lo, ln, _ = _log_terms(spec, t, momentum_grid(spec.params1))
    out = np.exp(_scale(spec) * (lo - ln))
    return float(out[0]) if np.ndim(t) == 0 else out


def loschmidt_overlap(spec: QuenchSpec, t) -> float | np.ndarray:
    """Unnormalized |<Psi0|Psi_t>|^2 with the raw (non-unitary) evolved state."""
    lo, _, _ = _log_terms(spec, t, momentum_grid(spec.params1))
    out = np.exp(_scale(spec) * lo)
    return float(out[0]) if np.ndim(t) == 0 else out


def loschmidt_product(spec: QuenchSpec, t) -> float | np.ndarray:
    """prod_p |cos(eps1 t) - i <H1_p> sin(eps1 t)/eps1|^2, the closed-form product.

    This equals ``loschmidt_overlap``. It coincides with the normalized echo
    only when the evolution is unitary (gamma = 0).
    """
    _, _, lp = _log_terms(spec, t, momentum_grid(spec.params1))
    out = np.exp(_scale(spec) * lp)
    return float(out[0]) if np.ndim(t) == 0 else out


def echo_factors(spec: QuenchSpec, t: float):
    """Per-block normalized factors |f_p|^2 / n_p; their product is the echo."""
    grid = momentum_grid(spec.params1)
    a0, a2 = ground_amplitudes(spec.params0, grid.angles)
    ex = initial_expectation(spec, grid.angles)
    eps1 = dispersion(spec.params1, grid.angles)
    f = np.cos(eps1 * t) - 1j * ex * _sin_over(eps1, t)
    b0, b2 = propagate(spec.params1, grid.angles, a0, a2, t)
    return np.abs(f) ** 2 / (np.abs(b0) ** 2 + np.abs(b2) ** 2)


def rate_function(spec: QuenchSpec, times=None, normalized: bool = True, **grid_kw) -> np.ndarray:
    """lambda(t) = -(1/N) log L(t); +inf where an overlap factor is exactly zero.

    Works for the thermodynamic marker, where lambda becomes an integral.
    """
    if times is None:
        times = spec.times
    lo, ln, _ = _log_terms(spec, times, _grid(spec, **grid_kw))
    lam = -0.5 * (lo - ln) if normalized else -0.5 * lo
    return np.where(np.isnan(lam), np.inf, lam)


@dataclass(frozen=True)
class DqptSolution:
    critical_angles: list[float]
    critical_times: list[list[float]]
    epsilon1: list[float] = field(default_factory=list)

    @property
    def has_dqpt(self) -> bool:
        return bool(self.critical_angles)

    def all_times(self) -> list[tuple[float, int]]:
        """(t_n*, family index) pairs sorted by time."""
        return sorted((t, i) for i, ts in enumerate(self.critical_times) for t in ts)


def critical_field(spec: QuenchSpec, phi: float) -> float:
    """Quench field for which phi is a critical momentum, from the closed-form condition

    h1 = h0 + eps0 [(a0 - eps0)^2 + (g + K)^2 s^2] / [(a0 - eps0)^2 - (g + K)^2 s^2].
    """
    p0 = spec.params0
    a, b, _ = block_parts(p0, phi)
    e0 = float(np.real(dispersion(p0, phi)))
    x = (a - e0) ** 2
    return float(p0.h + e0 * (x + b * b) / (x - b * b))


def dqpt_condition(spec: QuenchSpec, samples: int = 4096) -> DqptSolution:
    """Critical momenta where <psi0|H1_p|psi0> changes sign, and their t_n*.

    Sign changes over ``samples`` angles are refined by Brent's method. Every
    root must also satisfy the closed-form field condition to 1e-8.
    """
    if spec.outside_derivation:
        raise InvalidParameterError("the critical-momentum condition is derived for gamma <= K")
    f = lambda x: float(np.real(initial_expectation(spec, x)))
    phi = np.linspace(0.0, np.pi, samples + 2)[1:-1]
    vals = np.real(initial_expectation(spec, phi))
    roots = []
    for i in range(len(phi) - 1):
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(float(phi[i]))
        elif fa * fb < 0:
            roots.append(brentq(f, phi[i], phi[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    if vals[-1] == 0.0:
        roots.append(float(phi[-1]))
    eps1, times = [], []
    for r in roots:
        ex = initial_expectation(spec, r)
        if abs(ex) > 1e-10:
            raise ConventionError(f"expectation {ex} at critical angle {r}")
        h1 = critical_field(spec, r)
        if abs(h1 - spec.params1.h) > 1e-8 * max(1.0, abs(h1)):
            raise ConventionError(f"critical angle {r} implies h1 = {h1}, not {spec.params1.h}")
        e1 = float(np.real(dispersion(spec.params1, r)))
        eps1.append(e1)
        n_max = int(math.floor(spec.t_max * e1 / math.pi - 0.5))
        times.append([math.pi / e1 * (n + 0.5) for n in range(max(n_max + 1, 0))])
    return DqptSolution(roots, times, eps1)


@dataclass(frozen=True)
class Cusp:
    time: float
    strength: float
    predicted: float | None = None
    family: int | None = None

    @property
    def deviation(self) -> float | None:
        return None if self.predicted is None else abs(self.time - self.predicted)


@dataclass(frozen=True)
class RateFunctionResult:
    series: TimeSeries
    cusps: list[Cusp]
    prediction: DqptSolution | None

    @property
    def families(self) -> set[int]:
        return {c.family for c in self.cusps if c.family is not None}


def rate_function_series(spec: QuenchSpec, normalized: bool = True, factor: float = 10.0,
                         **grid_kw) -> RateFunctionResult:
    """lambda(t) on the QuenchSpec time grid with cusp detection and matching to t_n*.

    Detected spikes closer than 0.15 in time merge into one cusp, whose time
    comes from intersecting quadratic fits to its two flanks. Each cusp is
    paired with the nearest predicted critical time.
    """
    times = spec.times
    lam = rate_function(spec, times, normalized=normalized, **grid_kw)
    feats = detect_features(times, lam, factor=factor, merge_gap=0.15, refine="apex",
                            fit_span=max(5, int(round(0.4 / spec.dt))), fit_pad=2)
    pred = None if spec.outside_derivation else dqpt_condition(spec)
    known = pred.all_times() if pred is not None else []
    cusps = []
    for ft in feats:
        if known:
            t_star, fam = min(known, key=lambda tf: abs(tf[0] - ft.position))
            cusps.append(Cusp(ft.position, ft.strength, t_star, fam))
        else:
            cusps.append(Cusp(ft.position, ft.strength))
    meta = {"spec": spec.digest(), "quantity": "rate_function", "normalized": normalized,
            "outside_derivation": spec.outside_derivation}
    return RateFunctionResult(TimeSeries(times, lam, meta), cusps, pred)


@dataclass(frozen=True)
class QuadrantMap:
    h0: np.ndarray
    h1: np.ndarray
    cusp: np.ndarray
    n_roots: np.ndarray

    def quadrant(self, name: str) -> np.ndarray:
        """Cusp flags of QI (both > 1), QII (h0 < 1 < h1), QIII (both < 1) or QIV."""
        lo0, lo1 = self.h0 < 1.0, self.h1 < 1.0
        rows = {"I": ~lo0, "II": lo0, "III": lo0, "IV": ~lo0}[name]
        cols = {"I": ~lo1, "II": ~lo1, "III": lo1, "IV": lo1}[name]
        return self.cusp[np.ix_(rows, cols)]

    def fraction(self, name: str) -> float:
        q = self.quadrant(name)
        return float(q.mean()) if q.size else float("nan")


def quadrant_map(gamma: float, kappa_ksea: float, h0_range=(0.0, 2.0), h1_range=(0.0, 2.0),
                 resolution: int = 20, threads: int | None = None) -> QuadrantMap:
    """DQPT existence on cell centres of a resolution x resolution (h0, h1) grid."""
    def centres(r):
        step = (r[1] - r[0]) / resolution
        return r[0] + step * (np.arange(resolution) + 0.5)

    h0s, h1s = centres(h0_range), centres(h1_range)
    cells = [(i, j) for i in range(resolution) for j in range(resolution)]

    def one(ij):
        spec = QuenchSpec.from_fields(gamma, kappa_ksea, h0s[ij[0]], h1s[ij[1]], THERMODYNAMIC)
        return len(dqpt_condition(spec).critical_angles)

    n = np.array(parallel_map(one, cells, threads)).reshape(resolution, resolution)
    return QuadrantMap(h0s, h1s, n > 0, n)


def false_signal_fraction(gamma: float, kappa_ksea: float, resolution: int = 20,
                          threads: int | None = None) -> float:
    """Share of QIII cells (no critical line crossed) that still show a DQPT."""
    return quadrant_map(gamma, kappa_ksea, resolution=resolution, threads=threads).fraction("III")


def _evolved_amplitudes(spec, grid, times):
    a0, a2 = ground_amplitudes(spec.params0, grid.angles)
    phi = grid.angles[:, None]
    b0, b2 = propagate(spec.params1, phi, a0[:, None], a2[:, None],
                       np.atleast_1d(times)[None, :])
    return b0, b2


def evolved_correlator_arrays(spec: QuenchSpec, times, grid=None):
    """(mz, cxx, cyy, cxy, czz) arrays over ``times`` for the normalized evolved state."""
    if grid is None:
        grid = momentum_grid(spec.params1)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    outs = [[] for _ in range(5)]
    for s in range(0, len(times), CHUNK):
        b0, b2 = _evolved_amplitudes(spec, grid, times[s:s + CHUNK])
        vals = assemble_correlators(grid.angles, grid.weights, kernel_values(b0, b2))
        for o, v in zip(outs, vals):
            o.append(np.atleast_1d(v))
    return tuple(np.concatenate(o) for o in outs)


def evolved_correlators(spec: QuenchSpec, t: float) -> CorrelatorSet:
    """Correlators of the normalized state exp(-i H1 t)|Psi0> / norm.

    Raises ConventionError if the t = 0 result does not reproduce the static
    ground-state correlators to 1e-10.
    """
    if t < 0:
        raise InvalidParameterError("t must be non-negative")
    vals = evolved_correlator_arrays(spec, [t])
    out = CorrelatorSet(*(float(v[0]) for v in vals))
    if t == 0:
        ref = correlators(spec.params0)
        if np.max(np.abs(out.as_array() - ref.as_array())) > 1e-10:
            raise ConventionError("evolved correlators at t = 0 differ from the static ones")
    return out


def entanglement_series(spec: QuenchSpec, times=None) -> TimeSeries:
    """Nearest-neighbour log negativity of the evolved state on a time grid."""
    if times is None:
        times = spec.times
    times = np.asarray(times, dtype=float)
    mz, cxx, cyy, cxy, czz = evolved_correlator_arrays(spec, times)
    E = log_negativity(density_matrices(mz, cxx, cyy, cxy, czz))
    return TimeSeries(times, np.atleast_1d(E), {"spec": spec.digest(), "quantity": "E"})


@dataclass(frozen=True)
class SigmaReport:
    """Long-time statistics of E(t).

    sigma is the standard deviation; literal is sign(r) sqrt(|r|) for the
    radicand r = <E^2> - <E>, kept as a signed diagnostic.
    """

    sigma: float
    mean: float
    mean_sq: float
    literal: float
    literal_radicand: float


def sigma_report(spec: QuenchSpec, t_avg: float = 500.0, t_burn: float = 50.0,
                 dt: float = 0.05) -> SigmaReport:
    if not t_avg > t_burn >= 0:
        raise InvalidParameterError("need t_avg > t_burn >= 0")
    n = int(round((t_avg - t_burn) / dt))
    times = t_burn + dt * np.arange(n + 1)
    E = entanglement_series(spec, times).values
    m1 = float(np.mean(E))
    m2 = float(np.mean(E * E))
    var = m2 - m1 * m1
    if var < -1e-12:
        raise NumericalError(f"negative variance {var:.3e}")
    r = m2 - m1
    return SigmaReport(math.sqrt(max(var, 0.0)), m1, m2, math.copysign(math.sqrt(abs(r)), r), r)


def sigma_entanglement(spec: QuenchSpec, t_avg: float = 500.0, t_burn: float = 50.0,
                       dt: float = 0.05, literal: bool = False) -> float:
    """Fluctuation of E(t) over [t_burn, t_avg]; standard deviation by default.

    ``literal=True`` returns the signed diagnostic for <E^2> - <E> instead.
    """
    rep = sigma_report(spec, t_avg, t_burn, dt)
    return rep.literal if literal else rep.sigma


def sigma_convergence(spec: QuenchSpec, t_avg: float = 500.0, t_burn: float = 50.0,
                      dt: float = 0.05, tol: float = 1e-3):
    """sigma_E at t_avg and 2 t_avg, and whether they agree within ``tol``."""
    s1 = sigma_entanglement(spec, t_avg, t_burn, dt)
    s2 = sigma_entanglement(spec, 2 * t_avg, t_burn, dt)
    return s1, s2, abs(s2 - s1) < tol


def sigma_scan(template: QuenchSpec, values, vary: str = "h1", t_avg: float = 500.0,
               t_burn: float = 50.0, dt: float = 0.05, threads: int | None = None):
    """sigma_E over a list of fields for h1 (or h0 when ``vary="h0"``).

    Returns (values, sigma, index of the largest |second difference|).
    """
    values = np.asarray(values, dtype=float)

    def one(v):
        p0, p1 = template.params0, template.params1
        if vary == "h1":
            p1 = p1.with_field(v)
        elif vary == "h0":
            p0 = p0.with_field(v)
        else:
            raise InvalidParameterError("vary must be 'h0' or 'h1'")
        return sigma_entanglement(QuenchSpec(p0, p1, template.t_max, template.dt), t_avg, t_burn, dt)

    sig = np.array(parallel_map(one, values, threads))
    d2 = np.abs(np.diff(sig, 2))
    peak = int(np.argmax(d2)) + 1 if len(d2) else None
    return values, sig, peak
