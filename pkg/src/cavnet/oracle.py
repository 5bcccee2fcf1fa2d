"""Brute-force reference propagator on the full 0/1-occupancy Fock space.

Certifies the single-excitation solver without the manifold truncation:
every mode (sites plus sink) carries a hard-core ladder operator and the
generator is built verbatim from the Hamiltonian and the three Lindblad
channels, with the same rate and factor conventions as the production
solver.  Test surface only; capped at 5 modes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statespace import Basis, DensityMatrix
from .optics import RateSet
from .liouville import RATE_SCALE, _rk4_step

MAX_MODES = 5

_A = np.array([[0.0, 1.0], [0.0, 0.0]])  # hard-core annihilator


@dataclass(frozen=True)
class FockBasis:
    """Product occupancy basis; mode 1 is the least significant bit."""

    modes: tuple  # mode labels, sites then sink

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def dim(self) -> int:
        return 2 ** self.n_modes

    def bit(self, mode: int) -> int:
        """Bit position of a 1-based mode index."""
        return mode - 1

    def occupancy(self, index: int) -> tuple:
        return tuple((index >> b) & 1 for b in range(self.n_modes))


def fock_basis(n_sites: int, include_sink: bool = True) -> FockBasis:
    modes = tuple(f"SITE{i}" for i in range(1, n_sites + 1))
    if include_sink:
        modes = modes + ("SINK",)
    if len(modes) > MAX_MODES:
        raise ValueError(f"oracle capped at {MAX_MODES} modes, got {len(modes)}")
    return FockBasis(modes)


def mode_annihilator(fb: FockBasis, mode: int) -> np.ndarray:
    """Ladder operator of one mode on the full product space."""
    op = np.array([[1.0]])
    for b in range(fb.n_modes):
        factor = _A if b == fb.bit(mode) else np.eye(2)
        op = np.kron(factor, op)  # mode 1 fastest index
    return op


def fock_generator(rates: RateSet, fb: FockBasis) -> np.ndarray:
    """Dense superoperator on vec(rho), row-major convention."""
    n_sites = rates.n_sites
    if fb.n_modes not in (n_sites, n_sites + 1):
        raise ValueError("Fock basis does not match the rate set")
    has_sink = fb.n_modes == n_sites + 1
    a = {i: mode_annihilator(fb, i) for i in range(1, fb.n_modes + 1)}
    dim = fb.dim
    h = np.zeros((dim, dim), dtype=complex)
    for (k, j), g in rates.couplings.items():
        h += g * (a[k].conj().T @ a[j])
        h += np.conj(g) * (a[j].conj().T @ a[k])
    channels = []
    for i in range(1, n_sites + 1):
        channels.append((a[i], float(rates.dissipation[i - 1])))
        channels.append((a[i].conj().T @ a[i], float(rates.dephasing[i - 1])))
    if rates.detector_rate > 0.0:
        if not has_sink:
            raise ValueError("nonzero detector rate requires a sink mode")
        sink = fb.n_modes
        channels.append((a[sink].conj().T @ a[2], float(rates.detector_rate)))
    eye = np.eye(dim)
    s = -1j * RATE_SCALE * (np.kron(h, eye) - np.kron(eye, h.T))
    for L, rate in channels:
        if rate == 0.0:
            continue
        LdL = L.conj().T @ L
        s += rate * RATE_SCALE * (2.0 * np.kron(L, L.conj())
                                  - np.kron(LdL, eye) - np.kron(eye, LdL.T))
    return s


def fock_propagate(rates: RateSet, rho0: np.ndarray, t: float, dt: float,
                   fb: FockBasis = None) -> np.ndarray:
    """Fixed-step RK4 on the vectorized full-Fock generator."""
    if fb is None:
        fb = fock_basis(rates.n_sites, include_sink=rates.detector_rate > 0.0)
    s = fock_generator(rates, fb)
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (fb.dim, fb.dim):
        raise ValueError("initial state does not match the Fock dimension")
    y = rho0.reshape(-1)
    n_steps = int(round(t / dt))
    for _ in range(n_steps):
        y = _rk4_step(s, y, dt)
    return y.reshape(fb.dim, fb.dim)


def embed_single_excitation(rho: DensityMatrix, fb: FockBasis) -> np.ndarray:
    """Lift a manifold state onto the full Fock space."""
    basis = rho.basis
    if basis.include_ancilla:
        raise ValueError("oracle embedding does not cover the ancilla factor")
    idx = _manifold_indices(basis, fb)
    out = np.zeros((fb.dim, fb.dim), dtype=complex)
    out[np.ix_(idx, idx)] = rho.data
    return out


def project_single_excitation(rho_fock: np.ndarray, basis: Basis,
                              fb: FockBasis) -> np.ndarray:
    """Restrict a full-Fock state back onto the manifold labels."""
    idx = _manifold_indices(basis, fb)
    return rho_fock[np.ix_(idx, idx)]


def manifold_weight_defect(rho_fock: np.ndarray, basis: Basis,
                           fb: FockBasis) -> float:
    """Probability weight outside the vacuum-plus-one-photon manifold."""
    idx = set(_manifold_indices(basis, fb))
    return float(sum(rho_fock[i, i].real for i in range(fb.dim) if i not in idx))


def _manifold_indices(basis: Basis, fb: FockBasis):
    """Fock indices of VAC, SITE(1..n), SINK in the basis label order."""
    if basis.n_sites != len([m for m in fb.modes if m.startswith("SITE")]):
        raise ValueError("site counts differ between the bases")
    idx = [0]
    for i in range(1, basis.n_sites + 1):
        idx.append(1 << fb.bit(i))
    if basis.include_sink:
        if fb.modes[-1] != "SINK":
            raise ValueError("Fock basis has no sink mode")
        idx.append(1 << fb.bit(fb.n_modes))
    return idx
