import numpy as np
import pytest

from cavnet import oracle
from cavnet.liouville import build_liouvillian, evolve
from cavnet.optics import RateSet
from cavnet.statespace import build_basis, initial_state


def rate_set(n_sites, couplings, dissipation, dephasing, det):
    return RateSet(couplings=couplings, dissipation=dissipation,
                   dephasing=dephasing, detector_rate=det)


TWO_SITE = rate_set(2, {(1, 2): 3.1}, (0.05, 0.08), (0.4, 0.7), 0.9)
THREE_SITE = rate_set(3, {(1, 2): 2.2, (1, 3): 1.4, (2, 3): 3.0},
                      (0.06, 0.05, 0.09), (0.5, 1.0, 0.3), 1.1)


def test_fock_basis_shape():
    fb = oracle.fock_basis(3)
    assert fb.dim == 16
    assert fb.modes == ("SITE1", "SITE2", "SITE3", "SINK")
    assert fb.occupancy(0b0101) == (1, 0, 1, 0)


def test_mode_cap():
    with pytest.raises(ValueError):
        oracle.fock_basis(6, include_sink=False)


def test_identity_propagation_without_generator():
    rates = rate_set(2, {}, (0.0, 0.0), (0.0, 0.0), 0.0)
    fb = oracle.fock_basis(2, include_sink=False)
    rng = np.random.default_rng(2)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    out = oracle.fock_propagate(rates, rho, 3.0, 1e-2, fb)
    assert np.max(np.abs(out - rho)) < 1e-12


def test_generator_preserves_excitation_sectors():
    fb = oracle.fock_basis(2)
    s = oracle.fock_generator(TWO_SITE, fb)
    dim = fb.dim
    sector = [sum(fb.occupancy(i)) for i in range(dim)]
    # population-to-population flow only ever lowers or keeps the sector
    for i in range(dim):
        for j in range(dim):
            elem = s[i * dim + i, j * dim + j]
            if abs(elem) > 1e-14 and i != j:
                assert sector[i] <= sector[j]


@pytest.mark.parametrize("rates", [TWO_SITE, THREE_SITE], ids=["2site", "3site"])
def test_manifold_weight_stays_negligible(rates):
    n = rates.n_sites
    basis = build_basis(n, True, False)
    fb = oracle.fock_basis(n)
    rho0 = oracle.embed_single_excitation(
        initial_state(basis, "single_photon_site", 1), fb)
    out = oracle.fock_propagate(rates, rho0, 5.0, 1e-3, fb)
    assert oracle.manifold_weight_defect(out, basis, fb) < 1e-12


@pytest.mark.parametrize("rates", [TWO_SITE, THREE_SITE], ids=["2site", "3site"])
def test_oracle_matches_manifold_solver(rates):
    n = rates.n_sites
    basis = build_basis(n, True, False)
    rho0 = initial_state(basis, "single_photon_site", 1)
    liou = build_liouvillian(rates, basis)
    traj = evolve(rho0, liou, 5.0, 1e-3, store_every=5000)
    fb = oracle.fock_basis(n)
    full = oracle.fock_propagate(rates, oracle.embed_single_excitation(rho0, fb),
                                 5.0, 1e-3, fb)
    projected = oracle.project_single_excitation(full, basis, fb)
    assert np.max(np.abs(projected - traj.states[-1].data)) < 1e-8


def test_oracle_state_stays_physical():
    fb = oracle.fock_basis(2)
    basis = build_basis(2, True, False)
    rho0 = oracle.embed_single_excitation(
        initial_state(basis, "single_photon_site", 1), fb)
    out = oracle.fock_propagate(TWO_SITE, rho0, 5.0, 1e-3, fb)
    assert abs(np.trace(out).real - 1.0) < 1e-9
    assert np.max(np.abs(out - out.conj().T)) < 1e-10
    assert np.min(np.linalg.eigvalsh(0.5 * (out + out.conj().T))) > -1e-9
