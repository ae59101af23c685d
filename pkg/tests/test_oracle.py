import math
import warnings

import numpy as np
import pytest

from nhksea.correlations import entanglement
from nhksea.errors import CapacityError, InvalidParameterError
from nhksea.model import ModelParams, block_hamiltonian
from nhksea.oracle import (DegeneracyWarning, ProductAnsatz, angle_distance_mod_pi,
                           block_spectrum, bond_hamiltonian, closed_form_product_optimum,
                           dense_block_propagator, ed_entanglement, ed_fermion_hamiltonian,
                           ed_ground_state, effective_hamiltonian, effective_hamiltonian_check,
                           ground_bond_energy, jump_couplings, ksea_product_minimization,
                           match_spectra, pair_sector_spectrum, printed_identity_deviation,
                           product_bond_energy, site_operator, spin_hamiltonian)


def test_fermion_spectrum_particle_hole_symmetric():
    spec = ed_fermion_hamiltonian(ModelParams(0.0, 0.0, 0.0, 4)).even_spectrum
    assert match_spectra(spec, -spec) < 1e-12
    assert abs(np.sum(spec)) < 1e-12


@pytest.mark.parametrize("g,k,h", [(0.5, 0.75, 1.5), (1.0, 0.75, 0.6), (0.3, 0.0, 0.4)])
@pytest.mark.parametrize("n", [4, 6, 8, 10])
def test_block_spectrum_is_dense_spectrum(g, k, h, n):
    p = ModelParams(g, k, h, n)
    ed = ed_fermion_hamiltonian(p).even_spectrum
    blocks = block_spectrum(p)
    assert len(blocks) == len(ed) == 2 ** (n - 1)
    assert match_spectra(blocks, ed) < 1e-10


def test_pair_sector_is_a_subset():
    p = ModelParams(1.0, 0.75, 0.6, 8)
    pairs = pair_sector_spectrum(p)
    assert len(pairs) == 16
    assert match_spectra(pairs, ed_fermion_hamiltonian(p).even_spectrum) < 1e-10


def test_capacity_limits():
    with pytest.raises(CapacityError):
        ed_fermion_hamiltonian(ModelParams(0.1, 0.1, 0.1, 14))
    with pytest.raises(CapacityError):
        ed_ground_state(ModelParams(0.1, 0.1, 0.1, 12))
    with pytest.raises(CapacityError):
        effective_hamiltonian(0.1, 0.1, 0.1, 8)


def test_site_ordering():
    z0 = site_operator("Z", 0, 3).toarray()
    assert np.allclose(np.diag(z0), [1, 1, 1, 1, -1, -1, -1, -1])


def test_spin_hamiltonian_hermitian_limit():
    h = spin_hamiltonian(ModelParams(0.4, 0.3, 0.2, 6), hermitian_gamma=True).toarray()
    assert np.allclose(h, h.conj().T)
    h = spin_hamiltonian(ModelParams(0.4, 0.3, 0.2, 6)).toarray()
    assert not np.allclose(h, h.conj().T)


def test_ed_entanglement_polarized():
    assert ed_entanglement(ModelParams(0.0, 0.0, 50.0, 8)) < 1e-6


@pytest.mark.parametrize("g,k,h", [(0.5, 0.75, 0.5), (1.0, 0.75, 0.6), (0.5, 0.75, 1.4)])
def test_ed_entanglement_matches_pipeline(g, k, h):
    p = ModelParams(g, k, h, 8)
    assert abs(ed_entanglement(p) - entanglement(p)) < 1e-6


def test_degeneracy_warning():
    # eps vanishes on the 3 pi/4 block at N = 4, so cos +- eps coincide
    with pytest.warns(DegeneracyWarning):
        ed_ground_state(ModelParams(0.0, 0.0, -math.cos(3 * math.pi / 4), 4))


def test_dense_propagator_matches_closed_form():
    from nhksea.groundstate import ground_block_amplitudes
    from nhksea.quench import evolve_block
    p0, p1 = ModelParams(0.5, 0.75, 0.5, 8), ModelParams(0.5, 0.75, 1.4, 8)
    for phi in (0.4, 1.7):
        psi = ground_block_amplitudes(p0, phi)
        blk = block_hamiltonian(p1, phi)
        for t in (0.0, 0.7, 5.3):
            ref = dense_block_propagator(blk.matrix, t) @ psi.vector
            assert np.allclose(evolve_block(blk, psi, t).raw, ref, atol=1e-12)


def test_jump_couplings():
    assert jump_couplings(0.25) == (-0.5, 0.5)
    assert jump_couplings(0.5, "printed") == pytest.approx((-0.5 / math.sqrt(2), 0.5 / math.sqrt(2)))
    with pytest.raises(InvalidParameterError):
        jump_couplings(0.1, "other")


def test_effective_hamiltonian_without_dissipation():
    h = effective_hamiltonian(0.0, 0.2, 0.7, 4)
    ref = spin_hamiltonian(ModelParams(0.0, 0.2, 0.7, 4)).toarray()
    assert np.max(np.abs(h - ref)) == 0


def test_effective_hamiltonian_identity_example():
    assert effective_hamiltonian_check(0.3, 0.2, 0.7, 4) < 1e-12


def test_effective_hamiltonian_antisymmetry():
    g, n = 0.3, 4
    q, r = jump_couplings(g)
    shift = 0.5j * g * n * np.eye(2**n)
    a = effective_hamiltonian(g, 0.2, 0.7, n, q=q, r=r) + shift
    b = effective_hamiltonian(g, 0.2, 0.7, n, q=q, r=-r) + shift
    anti = lambda m: 0.5 * (m - m.conj().T)
    assert np.max(np.abs(anti(a))) > 0.1
    assert np.max(np.abs(anti(a) + anti(b))) < 1e-14


def test_printed_couplings_fail_identity():
    assert printed_identity_deviation(0.3, 0.2, 0.7) > 1e-2


def test_kappa_adds_imaginary_field():
    g, kap, n = 0.3, 0.4, 4
    a = effective_hamiltonian(g, 0.2, 0.7, n, kappa=kap)
    b = effective_hamiltonian(g, 0.2, 0.7, n)
    diff = a - b
    ref = sum(-0.25j * kap * (np.eye(2**n) + site_operator("Z", j, n).toarray()) for j in range(n))
    assert np.max(np.abs(diff - ref)) < 1e-14


def test_bond_energy_matches_expectation():
    rng = np.random.default_rng(1)
    for _ in range(10):
        g, k, h = rng.uniform(0, 1, 3)
        ae, ao, be, bo = rng.uniform(0, math.pi, 4)
        st = lambda a, b: np.array([math.cos(a / 2), np.exp(1j * b) * math.sin(a / 2)])
        v = np.kron(st(ae, be), st(ao, bo))
        e = np.vdot(v, bond_hamiltonian(g, k, h) @ v).real
        assert product_bond_energy((ae, ao, be, bo), g, k, h) == pytest.approx(e, abs=1e-14)


def test_ground_bond_energy_is_lowest_bond_eigenvalue_at_factorization():
    g, k = 0.3, 0.4
    h = math.sqrt(1 - g * g - k * k)
    assert np.min(np.linalg.eigvalsh(bond_hamiltonian(g, k, h))) == pytest.approx(
        ground_bond_energy(g, k, h), abs=1e-14)


@pytest.mark.parametrize("g,k", [(0.6, 0.0), (0.0, 0.6)])
def test_product_minimum_examples(g, k):
    m = ksea_product_minimization(g, k, 0.8)
    assert m.delta_min == pytest.approx(-0.5, abs=1e-8)
    assert m.restart_spread < 1e-8


def test_product_minimum_above_factorization():
    g, k = 0.3, 0.4
    h = 1.2 * math.sqrt(1 - g * g - k * k)
    m = ksea_product_minimization(g, k, h, restarts=6)
    assert m.delta_min > m.delta_g + 1e-4
    assert m.delta_min == pytest.approx(m.closed_form_delta, abs=1e-8)


def test_closed_form_optimum_angles():
    g, k = 0.3, 0.4
    h = math.sqrt(1 - g * g - k * k)
    delta, beta, alpha = closed_form_product_optimum(g, k, h)
    assert delta == pytest.approx(ground_bond_energy(g, k, h), abs=1e-14)
    assert beta == pytest.approx(0.5 * math.atan(k / g))
    x = (alpha, alpha, beta, beta + math.pi)
    assert product_bond_energy(x, g, k, h) == pytest.approx(delta, abs=1e-14)


def test_ansatz_ranges_and_folding():
    with pytest.raises(InvalidParameterError):
        ProductAnsatz(4.0, 0.0, 0.0, 0.0)
    with pytest.raises(InvalidParameterError):
        ProductAnsatz(0.0, 0.0, 7.0, 0.0)
    x = (5.0, -1.0, 9.0, -3.0)
    a = ProductAnsatz.from_angles(*x)
    assert product_bond_energy(a.as_array(), 0.3, 0.2, 0.5) == pytest.approx(
        product_bond_energy(x, 0.3, 0.2, 0.5), abs=1e-14)
    assert angle_distance_mod_pi(0.1, math.pi + 0.1) == pytest.approx(0.0, abs=1e-15)


def test_odd_chain_rejected():
    with pytest.raises(InvalidParameterError):
        ModelParams(0.1, 0.1, 0.1, 7)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ed_ground_state(ModelParams(0.5, 0.75, 0.5, 6))
