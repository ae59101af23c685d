import math
import warnings

import numpy as np
import pytest

from nhksea.errors import CoalescenceError, ExceptionalPointError
from nhksea.groundstate import (bogoliubov_coefficients, ground_amplitudes,
                                ground_block_amplitudes, ground_energy, ground_energy_density)
from nhksea.model import THERMODYNAMIC, ModelParams, block_hamiltonian, broken_momentum_window
from nhksea.oracle import DegeneracyWarning, ed_fermion_hamiltonian, ed_ground_state, select_ground


def _residual(p, phi, vec, lam):
    h = block_hamiltonian(p, phi).matrix
    return np.linalg.norm(h @ vec - lam * vec)


def test_coefficient_formulas_give_eigenvector():
    p = ModelParams(0.5, 0.75, 0.5, 8)
    phi = math.pi / 2
    c = bogoliubov_coefficients(p, phi)
    eps = block_hamiltonian(p, phi).eps
    w = np.array([-c.v1, c.u])
    assert _residual(p, phi, w, -eps) < 1e-10
    assert c.u**2 - c.v1 * c.v2 == pytest.approx(-1.0)


def test_equal_couplings_v2_vanishes():
    # h + cos(phi) < 0 keeps M away from zero on the gamma = K line
    c = bogoliubov_coefficients(ModelParams(0.4, 0.4, 0.5, 8), 2.5)
    assert c.v2 == 0


def test_equal_couplings_m_vanishes_but_state_is_fine():
    p = ModelParams(0.4, 0.4, 0.5, 8)
    with pytest.raises(ExceptionalPointError):
        bogoliubov_coefficients(p, math.pi / 2)
    st = ground_block_amplitudes(p, math.pi / 2)
    assert st.norm == pytest.approx(1.0, abs=1e-12)
    assert _residual(p, math.pi / 2, st.vector, -block_hamiltonian(p, math.pi / 2).eps) < 1e-12


def test_small_angle_decoupling():
    for h in (0.5, -2.0):
        st = ground_block_amplitudes(ModelParams(0.3, 0.6, h, 8), 1e-7)
        assert min(abs(st.amp0), abs(st.amp2)) < 1e-6
    c = bogoliubov_coefficients(ModelParams(0.3, 0.6, -2.0, 8), 1e-7)
    assert abs(c.v1) < 1e-6 and abs(c.v2) < 1e-6 and abs(abs(c.u) - 1) < 1e-6


def test_norm_and_residual_across_regions():
    for g, k, h in [(0.5, 0.75, 0.5), (1.0, 0.75, 0.6), (1.0, 0.75, 1.5), (0.2, 0.0, -0.3)]:
        p = ModelParams(g, k, h, 8)
        for phi in np.linspace(0.01, math.pi - 0.01, 60):
            st = ground_block_amplitudes(p, phi)
            assert st.norm == pytest.approx(1.0, abs=1e-12)
            assert _residual(p, phi, st.vector, -block_hamiltonian(p, phi).eps) < 1e-10


def test_broken_window_picks_negative_imaginary_branch():
    p = ModelParams(1.0, 0.75, 0.6, 8)
    lo, hi = broken_momentum_window(p)
    phi = 0.5 * (lo + hi)
    st = ground_block_amplitudes(p, phi)
    h = block_hamiltonian(p, phi).matrix
    vals, vecs = np.linalg.eig(h)
    k = int(np.argmin(vals.imag))
    assert vals[k].imag < 0
    v = vecs[:, k] / np.linalg.norm(vecs[:, k])
    assert abs(abs(np.vdot(v, st.vector)) - 1) < 1e-10


def test_large_field_polarizes_blocks():
    p = ModelParams(0.5, 0.75, 1e4, 8)
    a0, a2 = ground_amplitudes(p, np.linspace(0.1, 3.0, 10))
    np.testing.assert_allclose(np.abs(a0), 1, atol=1e-3)
    p = ModelParams(0.5, 0.75, -1e4, 8)
    a0, a2 = ground_amplitudes(p, np.linspace(0.1, 3.0, 10))
    np.testing.assert_allclose(np.abs(a2), 1, atol=1e-3)


def test_coalescence_detected():
    h = math.sqrt(1.25)
    phi = math.acos(-h / 1.25)
    with pytest.raises(CoalescenceError) as err:
        ground_block_amplitudes(ModelParams(0.5, 0.0, h, 8), phi)
    assert err.value.phi == pytest.approx(phi)


def test_continuity_in_field_away_from_ep():
    p = ModelParams(0.5, 0.0, 0.0, 8)
    phi = 1.0
    prev = None
    for h in np.linspace(1.2, 1.6, 200):
        st = ground_block_amplitudes(p.with_field(h), phi)
        if prev is not None:
            assert abs(abs(np.vdot(prev, st.vector)) - 1) < 1e-3
        prev = st.vector


@pytest.mark.parametrize("g,k,h", [(0.0, 0.0, 0.0), (0.5, 0.75, 1.5), (1.0, 0.75, 0.6)])
@pytest.mark.parametrize("n", [4, 6, 8, 10])
def test_ground_energy_matches_dense(g, k, h, n):
    p = ModelParams(g, k, h, n)
    spec = ed_fermion_hamiltonian(p).even_spectrum
    e_ed = spec[select_ground(spec)[0]]
    assert abs(ground_energy(p) - e_ed) < 1e-10


def test_ground_energy_real_in_protected_region():
    assert abs(ground_energy(ModelParams(0.5, 0.75, 0.3, 5000)).imag) < 1e-10


def test_odd_sector_never_lower():
    # singly occupied blocks carry cos(phi), above cos(phi) - Re eps
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = ModelParams(rng.uniform(0, 1.5), rng.uniform(0, 1.5), rng.uniform(-2, 2), 6)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegeneracyWarning)
            even = ed_ground_state(p).energy
        h = ed_fermion_hamiltonian(p).operator.matrix
        odd = [i for i in range(2**6) if bin(i).count("1") % 2]
        vals = np.linalg.eigvals(h[np.ix_(odd, odd)])
        assert np.min(vals.imag) >= even.imag - 1e-9
        ties = vals[vals.imag < even.imag + 1e-9]
        if len(ties):
            assert np.min(ties.real) >= even.real - 1e-9


def test_energy_density_thermodynamic_close_to_large_chain():
    p = ModelParams(0.5, 0.75, 0.7, 5000)
    e_n = ground_energy(p) / 5000
    e_inf = ground_energy_density(ModelParams(0.5, 0.75, 0.7, THERMODYNAMIC))
    assert abs(e_n - e_inf) < 1e-6
