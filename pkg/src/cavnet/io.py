"""Plot-ready data emission: per-experiment CSV files plus a JSON
metadata sidecar sufficient to re-run a result bit-identically."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .statespace import Trajectory, site_label
from .optics import RateSet
from .experiments import DisorderEnsemble, EntanglementSeries


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def trajectory_header(n_sites: int):
    return (["time_ns"] + [f"pop_site{i}" for i in range(1, n_sites + 1)]
            + ["pop_vac", "pop_sink", "p_sink_integral"])


def write_trajectory_csv(path, traj: Trajectory, n_sites: int):
    pops = [traj.site_population(i) for i in range(1, n_sites + 1)]
    vac = [s.population("VAC") for s in traj.states]
    sink = [s.population("SINK") for s in traj.states]
    rows = []
    for idx, t in enumerate(traj.times):
        rows.append([t] + [p[idx] for p in pops]
                    + [vac[idx], sink[idx], traj.sink_probability[idx]])
    _write_csv(Path(path), trajectory_header(n_sites), rows)


def write_sweep_csv(path, sweep):
    _write_csv(Path(path), ["gamma_ghz", "p_sink"], sweep)


def write_ensemble_csv(path, ens: DisorderEnsemble):
    header = ["time_ns", "p_sink_mean", "p_sink_std",
              "pop_site1_mean", "pop_site1_std"]
    rows = [
        [t, ens.p_sink.mean[i], ens.p_sink.std[i],
         ens.site1_population.mean[i], ens.site1_population.std[i]]
        for i, t in enumerate(ens.p_sink.times)
    ]
    _write_csv(Path(path), header, rows)


def write_entanglement_csv(path, series: EntanglementSeries):
    rows = list(zip(series.times, series.log_negativity))
    _write_csv(Path(path), ["time_ns", "log_negativity"], rows)


def rate_set_to_dict(rates: RateSet) -> dict:
    return {
        "couplings": {f"{k},{j}": [g.real, g.imag]
                      for (k, j), g in sorted(rates.couplings.items())},
        "dissipation_ghz": list(rates.dissipation),
        "dephasing_ghz": list(rates.dephasing),
        "detector_rate_ghz": rates.detector_rate,
        "derived_diagnostics": rates.derived_diagnostics,
    }


def write_meta(path, config: dict, rates: RateSet, extra: dict = None):
    doc = {
        "code_version": __version__,
        "config": config,
        "rate_set": rate_set_to_dict(rates),
    }
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def diagnostics_table(rates: RateSet) -> str:
    """Human-readable per-cavity breakdown of the derivation chain."""
    lines = ["site      xi         m          D        Gamma_int  Gamma_out  Gamma_tot"]
    diag = rates.derived_diagnostics or {}
    for i in range(1, rates.n_sites + 1):
        d = diag.get(i)
        if d is None:
            lines.append(f"{i:<4} (preset)  Gamma_tot = {rates.dissipation[i-1]:.6g} GHz")
            continue
        lines.append(
            f"{i:<4} {d['xi']:.6f}  {d['m']:9.5f}  {d['D']:.6f} "
            f"{d['gamma_internal']:10.6f} {d['gamma_out']:10.6f} "
            f"{rates.dissipation[i-1]:10.6f}")
    lines.append(f"detector rate: {rates.detector_rate:.6f} GHz")
    g = sorted(rates.couplings.items())
    lines.append("couplings |g_kj| (GHz): "
                 + ", ".join(f"({k},{j})={abs(v):.4f}" for (k, j), v in g))
    return "\n".join(lines)
