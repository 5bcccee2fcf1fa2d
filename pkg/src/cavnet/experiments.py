"""The three numerical studies of the network, plus the entanglement
machinery they need: efficiency-vs-time curves under dephasing, the
robustness sweep of the transfer efficiency against the dephasing rate,
the static-disorder ensemble, and the ancilla log-negativity protocol.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .statespace import (ANC_TAGS, SINK, VAC, Basis, DensityMatrix,
                         build_basis, initial_state, site_label)
from .optics import RateSet
from .liouville import build_liouvillian, evolve

DEFAULT_DT = 1e-3      # ns, fixed-step integration
ENSEMBLE_DT = 0.02     # ns, exact-propagator grid for the disorder ensemble
LOG_NEG_SLACK = 1e-9

WORKERS_ENV_VAR = "CAVNET_WORKERS"


def _transport_basis(rates: RateSet) -> Basis:
    return build_basis(rates.n_sites, include_sink=True, include_ancilla=False)


def efficiency_curves(rates: RateSet, gammas, t_end: float,
                      dt: float = DEFAULT_DT, store_every: int = 1) -> dict:
    """Evolve from a photon in site 1 for each dephasing rate.

    Returns {gamma: Trajectory}; site-1 population and the accumulated
    sink probability are read off the trajectories.
    """
    basis = _transport_basis(rates)
    rho0 = initial_state(basis, "single_photon_site", 1)
    out = {}
    for gamma in gammas:
        liou = build_liouvillian(rates.with_dephasing(gamma), basis)
        out[gamma] = evolve(rho0, liou, t_end, dt, store_every=store_every)
    return out


def dephasing_sweep(rates: RateSet, gamma_grid, t_eval: float,
                    dt: float = DEFAULT_DT) -> list:
    """Transfer efficiency at a fixed readout time versus dephasing rate."""
    if len(gamma_grid) == 0:
        raise ValueError("gamma_grid must be nonempty")
    if t_eval <= 0:
        raise ValueError("t_eval must be > 0")
    basis = _transport_basis(rates)
    rho0 = initial_state(basis, "single_photon_site", 1)
    n_steps = int(round(t_eval / dt))
    out = []
    for gamma in gamma_grid:
        liou = build_liouvillian(rates.with_dephasing(gamma), basis)
        traj = evolve(rho0, liou, t_eval, dt, store_every=n_steps)
        out.append((float(gamma), float(traj.sink_probability[-1])))
    return out


def default_sweep_grid(n_points: int = 25) -> np.ndarray:
    """Logarithmic dephasing grid, 1e-2 to 1e2 GHz."""
    return np.logspace(-2, 2, n_points)


@dataclass(frozen=True)
class DisorderConfig:
    relative_spread: float = 0.2
    n_samples: int = 1000
    seed: int = 0
    distribution: str = "uniform"

    def __post_init__(self):
        if not 0.0 <= self.relative_spread < 1.0:
            raise ValueError("relative_spread must be in [0, 1)")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.distribution != "uniform":
            raise ValueError(f"unsupported distribution {self.distribution!r}")


@dataclass(frozen=True)
class EnsembleCurve:
    times: np.ndarray
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        if not (len(self.times) == len(self.mean) == len(self.std)):
            raise ValueError("ensemble curve arrays must be congruent")
        if np.any(self.std < 0):
            raise ValueError("std must be nonnegative")


@dataclass(frozen=True)
class DisorderEnsemble:
    """Mean/std curves of the transfer efficiency and site-1 population."""

    p_sink: EnsembleCurve
    site1_population: EnsembleCurve


def _perturbed_rates(rates: RateSet, deltas: np.ndarray, pairs) -> RateSet:
    couplings = {p: rates.couplings[p] * (1.0 + d) for p, d in zip(pairs, deltas)}
    return rates.with_couplings(couplings)


def _disorder_sample(args):
    rates, deltas, pairs, gamma, t_end, dt, store_every = args
    basis = _transport_basis(rates)
    rho0 = initial_state(basis, "single_photon_site", 1)
    liou = build_liouvillian(
        _perturbed_rates(rates, deltas, pairs).with_dephasing(gamma), basis)
    traj = evolve(rho0, liou, t_end, dt, method="expm", store_every=store_every)
    return traj.sink_probability, traj.site_population(1)


def n_workers_from_env(default: int = 1) -> int:
    value = os.environ.get(WORKERS_ENV_VAR)
    if value is None:
        return default
    n = int(value)
    if n < 1:
        raise ValueError(f"{WORKERS_ENV_VAR} must be >= 1")
    return n


def disorder_ensemble(rates: RateSet, cfg: DisorderConfig, gamma: float,
                      t_end: float, dt: float = ENSEMBLE_DT,
                      n_workers: int = None) -> DisorderEnsemble:
    """Static-disorder Monte Carlo over the coupling magnitudes.

    Each sample multiplies every coupling independently by (1 + delta),
    delta uniform on [-spread, +spread]; Hermiticity is preserved because
    the perturbation is applied to the unordered pair.  All perturbations
    are drawn up front from the seeded generator, so the result is
    deterministic for a fixed seed regardless of worker count.
    """
    pairs = sorted(rates.couplings)
    rng = np.random.default_rng(cfg.seed)
    deltas = rng.uniform(-cfg.relative_spread, cfg.relative_spread,
                         size=(cfg.n_samples, len(pairs)))
    n_distinct = cfg.n_samples
    if cfg.relative_spread == 0.0:
        # every sample is the unperturbed network; solve it once
        n_distinct = 1
    jobs = [(rates, deltas[s], pairs, gamma, t_end, dt, 1)
            for s in range(n_distinct)]
    if n_workers is None:
        n_workers = n_workers_from_env()
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_disorder_sample, jobs, chunksize=16))
    else:
        results = [_disorder_sample(job) for job in jobs]
    psink = np.array([r[0] for r in results])
    pop1 = np.array([r[1] for r in results])
    n_steps = int(round(t_end / dt))
    times = np.arange(n_steps + 1) * dt
    if n_distinct == 1:
        zero = np.zeros(n_steps + 1)
        return DisorderEnsemble(
            p_sink=EnsembleCurve(times, psink[0], zero),
            site1_population=EnsembleCurve(times, pop1[0], zero),
        )
    return DisorderEnsemble(
        p_sink=EnsembleCurve(times, psink.mean(axis=0), psink.std(axis=0)),
        site1_population=EnsembleCurve(times, pop1.mean(axis=0), pop1.std(axis=0)),
    )


def _occupancy_groups(basis: Basis, mode_label: str):
    """Split the base labels into the mode's occupied singleton and the
    environment configurations with the mode empty."""
    if mode_label not in basis.labels and (
            not basis.include_ancilla or f"{ANC_TAGS[0]}|{mode_label}" not in basis.labels):
        raise ValueError(f"label {mode_label!r} not in basis")
    base = [VAC] + [site_label(i) for i in range(1, basis.n_sites + 1)]
    if basis.include_sink:
        base.append(SINK)
    empty = [b for b in base if b != mode_label]
    return [mode_label], empty


def _base_index(basis: Basis, label: str) -> int:
    if label == VAC:
        return basis.vac_index
    if label == SINK:
        return basis.sink_index
    return basis.site_index(int(label.replace("SITE", "")))


def partial_trace(rho: DensityMatrix, keep) -> np.ndarray:
    """Reduce to the named tensor factors.

    keep is a subset of {'ancilla', '<mode label>'} with at most one mode
    label (e.g. 'SITE2'); the mode factor is its occupancy qubit, with
    |1> the photon-present level.  Factor order in the result is ancilla
    (slow) then mode occupancy.  An empty keep returns the 1x1 trace.
    """
    basis = rho.basis
    keep = tuple(keep)
    keep_anc = "ancilla" in keep
    modes = [k for k in keep if k != "ancilla"]
    if keep_anc and not basis.include_ancilla:
        raise ValueError("basis has no ancilla factor")
    if len(modes) > 1:
        raise ValueError("at most one mode occupancy factor can be kept")

    anc_range = range(2) if basis.include_ancilla else range(1)
    bd = basis.base_dim

    if modes:
        occupied, empty = _occupancy_groups(basis, modes[0])
        # occupancy value -> list of (base index, environment tag)
        groups = {1: [(_base_index(basis, occupied[0]), VAC)],
                  0: [(_base_index(basis, b), b) for b in empty]}
    else:
        groups = None

    dim = (2 if keep_anc else 1) * (2 if modes else 1)
    out = np.zeros((dim, dim), dtype=complex)

    def kept_index(anc, occ):
        idx = 0
        if keep_anc:
            idx = anc * (2 if modes else 1)
        if modes:
            idx += occ
        return idx

    for a in anc_range:
        for a2 in (anc_range if keep_anc else [a]):
            if modes:
                for occ, members in groups.items():
                    for occ2, members2 in groups.items():
                        total = 0.0 + 0.0j
                        for bi, env in members:
                            for bj, env2 in members2:
                                if env != env2:
                                    continue  # traced environment must match
                                total += rho.data[a * bd + bi, a2 * bd + bj]
                        out[kept_index(a, occ), kept_index(a2, occ2)] += total
            else:
                total = sum(rho.data[a * bd + b, a2 * bd + b] for b in range(bd))
                if keep_anc:
                    out[kept_index(a, 0), kept_index(a2, 0)] += total
                elif a == a2:
                    out[0, 0] += total
    return out


def partial_transpose(rho: np.ndarray, dim_a: int, dim_b: int) -> np.ndarray:
    """Transpose the slow factor A of a (dim_a x dim_b) bipartite state."""
    if rho.shape != (dim_a * dim_b, dim_a * dim_b):
        raise ValueError("bipartition does not cover the matrix")
    r = rho.reshape(dim_a, dim_b, dim_a, dim_b)
    return r.transpose(2, 1, 0, 3).reshape(dim_a * dim_b, dim_a * dim_b)


def log_negativity(rho, dim_a: int, dim_b: int) -> float:
    """log2 of the trace norm of the partial transpose on the slow factor,
    clamped at zero from below."""
    data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)
    pt = partial_transpose(data, dim_a, dim_b)
    eigs = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    value = float(np.log2(np.sum(np.abs(eigs))))
    if value < -LOG_NEG_SLACK:
        return 0.0
    return max(0.0, value)


class EntanglementSeries(NamedTuple):
    times: np.ndarray
    log_negativity: np.ndarray


def entanglement_protocol(rates: RateSet, gamma: float, t_end: float,
                          dt: float = DEFAULT_DT, store_every: int = 20,
                          bipartition: str = "site2") -> EntanglementSeries:
    """Degradation of ancilla entanglement through the network.

    Starts from the maximally entangled ancilla/site-1 state and evolves
    with the detector channel removed.  bipartition='site2' reports the
    log-negativity of the (ancilla | site-2 occupancy) two-qubit
    reduction, the entanglement available at the output cavity; it starts
    at zero and builds up as amplitude reaches site 2.
    bipartition='network' reports ancilla-versus-everything, which starts
    at exactly 1 for the EPR preparation.
    """
    if bipartition not in ("site2", "network"):
        raise ValueError(f"unknown bipartition {bipartition!r}")
    basis = build_basis(rates.n_sites, include_sink=False, include_ancilla=True)
    rho0 = initial_state(basis, "epr_with_ancilla", 1)
    liou = build_liouvillian(
        rates.with_dephasing(gamma).with_detector_rate(0.0), basis)
    traj = evolve(rho0, liou, t_end, dt, store_every=store_every)
    if bipartition == "site2":
        values = np.array([
            log_negativity(partial_trace(s, ("ancilla", "SITE2")), 2, 2)
            for s in traj.states])
    else:
        values = np.array([
            log_negativity(s, 2, basis.base_dim) for s in traj.states])
    return EntanglementSeries(traj.times, values)
