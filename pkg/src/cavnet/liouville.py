"""Master-equation generator assembly and time integration.

Rates in GHz are used directly as angular frequencies in ns^-1
(RATE_SCALE = 1, no 2*pi).  Each Lindblad channel contributes
rate * (2 L rho L^dag - {L^dag L, rho}) -- note the explicit factor 2 on
the jump term and the bare anticommutator; all closed-form expectations
in the tests use this same convention.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np
from scipy.linalg import expm

from .statespace import (Basis, DensityMatrix, Trajectory, site_label,
                         validate)
from .optics import RateSet

# global ordinary-vs-angular frequency convention knob (1 GHz <-> 1 ns^-1)
RATE_SCALE = 1.0

HAMILTONIAN_HERMITICITY_TOL = 1e-12


# Abort envelope for in-flight states.  Strict diagnostic tolerances sit in
# statespace; RK4 truncation at the default step can push an eigenvalue of a
# near-pure state a few 1e-9 below zero without the run being wrong, so the
# integrator only aborts when a state is badly outside its envelope.
ABORT_HERMITICITY_TOL = 1e-8
ABORT_TRACE_TOL = 1e-7
ABORT_POSITIVITY_TOL = -1e-7


class EvolutionError(RuntimeError):
    """Raised when the state leaves its validity envelope mid-run."""

    def __init__(self, message, time=None, report=None):
        super().__init__(message)
        self.time = time
        self.report = report


def build_hamiltonian(rates: RateSet, basis: Basis) -> np.ndarray:
    """Single-excitation Hamiltonian (GHz): couplings on the site block,
    zero diagonal (common resonance frequency rotated away), identity on
    the ancilla factor."""
    if rates.n_sites != basis.n_sites:
        raise ValueError(
            f"rates are for {rates.n_sites} sites, basis has {basis.n_sites}")
    d = basis.base_dim
    h = np.zeros((d, d), dtype=complex)
    for (k, j), g in rates.couplings.items():
        h[basis.site_index(k), basis.site_index(j)] = g
        h[basis.site_index(j), basis.site_index(k)] = np.conj(g)
    return basis.lift(h)


@dataclass(frozen=True)
class Liouvillian:
    """The assembled generator: Hamiltonian plus (operator, rate) channels."""

    basis: Basis
    hamiltonian: np.ndarray
    lindblad_ops: list
    detector_rate: float = 0.0

    def __post_init__(self):
        h = self.hamiltonian
        if np.max(np.abs(h - h.conj().T)) > HAMILTONIAN_HERMITICITY_TOL:
            raise ValueError("Hamiltonian is not Hermitian")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        h = self.hamiltonian
        out = -1j * RATE_SCALE * (h @ rho - rho @ h)
        for L, rate in self.lindblad_ops:
            if rate == 0.0:
                continue
            LdL = L.conj().T @ L
            out += rate * RATE_SCALE * (2.0 * L @ rho @ L.conj().T
                                        - LdL @ rho - rho @ LdL)
        return out

    def superoperator(self) -> np.ndarray:
        """Dense matrix acting on the row-major vectorization of rho."""
        d = self.basis.dim
        eye = np.eye(d)
        h = self.hamiltonian
        s = -1j * RATE_SCALE * (np.kron(h, eye) - np.kron(eye, h.T))
        for L, rate in self.lindblad_ops:
            if rate == 0.0:
                continue
            LdL = L.conj().T @ L
            s += rate * RATE_SCALE * (2.0 * np.kron(L, L.conj())
                                      - np.kron(LdL, eye) - np.kron(eye, LdL.T))
        return s

def build_liouvillian(rates: RateSet, basis: Basis) -> Liouvillian:
    """Dissipation drains each site to VAC, dephasing uses the site number
    operators, detection moves site 2 to SINK."""
    h = build_hamiltonian(rates, basis)
    d = basis.base_dim
    ops = []
    for i in range(1, basis.n_sites + 1):
        si = basis.site_index(i)
        a = np.zeros((d, d))
        a[basis.vac_index, si] = 1.0
        ops.append((basis.lift(a), float(rates.dissipation[i - 1])))
        n = np.zeros((d, d))
        n[si, si] = 1.0
        ops.append((basis.lift(n), float(rates.dephasing[i - 1])))
    if rates.detector_rate > 0.0:
        if not basis.include_sink:
            raise ValueError("nonzero detector rate requires a sink in the basis")
        det = np.zeros((d, d))
        det[basis.sink_index, basis.site_index(2)] = 1.0
        ops.append((basis.lift(det), float(rates.detector_rate)))
    return Liouvillian(basis, h, ops, detector_rate=float(rates.detector_rate))


def _sink_flux_row(liou: Liouvillian) -> np.ndarray:
    """Row vector r with r . vec(rho) = 2 Gamma_Det <n_2>, the sink influx."""
    basis = liou.basis
    d = basis.dim
    row = np.zeros(d * d)
    rate = liou.detector_rate
    if rate == 0.0:
        return row
    i = basis.site_index(2)
    blocks = 2 if basis.include_ancilla else 1
    for a in range(blocks):
        idx = a * basis.base_dim + i
        row[idx * d + idx] = 2.0 * rate * RATE_SCALE
    return row


def _augmented_generator(liou: Liouvillian) -> np.ndarray:
    """Superoperator extended by one row co-integrating the sink influx,
    so the transfer-efficiency integral rides along at the integrator's
    own order instead of a lower-order quadrature."""
    s = liou.superoperator()
    n = s.shape[0]
    aug = np.zeros((n + 1, n + 1), dtype=complex)
    aug[:n, :n] = s
    aug[n, :n] = _sink_flux_row(liou)
    return aug


def _rk4_step(s: np.ndarray, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = s @ y
    k2 = s @ (y + 0.5 * dt * k1)
    k3 = s @ (y + 0.5 * dt * k2)
    k4 = s @ (y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def evolve(rho0: DensityMatrix, liou: Liouvillian, t_end: float, dt: float = 1e-3,
           method: str = "rk4", store_every: int = 1) -> Trajectory:
    """Integrate the master equation on a fixed grid.

    method='rk4' is the default fixed-step integrator; method='expm'
    propagates with the exact matrix exponential of the generator over
    each stored interval (cross-check / ensemble mode).  Stored states
    are validated; a violation aborts with the offending time.
    """
    if rho0.basis is not liou.basis and rho0.basis != liou.basis:
        raise ValueError("state and Liouvillian bases differ")
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if store_every < 1:
        raise ValueError("store_every must be >= 1")
    dim = liou.basis.dim
    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError("t_end must be an integer multiple of dt")
    aug = _augmented_generator(liou)
    y = np.concatenate([rho0.data.reshape(-1), [0.0]])

    times, states, psink = [], [], []

    def store(step, vec):
        t = step * dt
        rho = DensityMatrix(liou.basis, vec[:-1].reshape(dim, dim))
        if not np.all(np.isfinite(vec)):
            raise EvolutionError(f"non-finite state at t = {t} ns", time=t)
        report = validate(rho)
        if (report.hermiticity_defect > ABORT_HERMITICITY_TOL
                or report.trace_defect > ABORT_TRACE_TOL
                or report.min_eigenvalue < ABORT_POSITIVITY_TOL):
            raise EvolutionError(
                f"state validation failed at t = {t} ns: {report}",
                time=t, report=report)
        times.append(t)
        states.append(rho)
        psink.append(float(vec[-1].real))

    store(0, y)
    if method == "rk4":
        for step in range(1, n_steps + 1):
            y = _rk4_step(aug, y, dt)
            if step % store_every == 0 or step == n_steps:
                store(step, y)
    elif method == "expm":
        prop = expm(aug * dt * store_every)
        step = 0
        while step < n_steps:
            inc = min(store_every, n_steps - step)
            if inc != store_every:
                prop = expm(aug * dt * inc)
            y = prop @ y
            step += inc
            store(step, y)
    else:
        raise ValueError(f"unknown method {method!r}")
    return Trajectory(np.array(times), states, np.array(psink))


def sink_probability_of(traj: Trajectory) -> float:
    """Final accumulated transfer efficiency."""
    return float(traj.sink_probability[-1])


def sink_population_series(traj: Trajectory) -> np.ndarray:
    """SINK-label population over time, the integral's cross-check."""
    return np.array([s.population("SINK") for s in traj.states])
