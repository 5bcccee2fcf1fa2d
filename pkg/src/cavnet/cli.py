"""Command-line front end.

One JSON configuration document drives everything: network (or the
published preset), experiment selection and numerical parameters.
Unknown configuration keys are a hard error.  Each run writes its CSV
outputs and a meta.json sidecar into a fresh directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments, io, optics
from .experiments import DisorderConfig

EXPERIMENTS = ("derive", "simulate", "sweep", "disorder", "entangle")

_TOP_KEYS = {"experiment", "network", "paper_preset", "gammas", "gamma",
             "gamma_grid", "t_end", "t_eval", "dt", "store_every",
             "disorder", "seed", "output_dir"}
_DISORDER_KEYS = {"relative_spread", "n_samples", "seed", "distribution"}


class ConfigError(ValueError):
    pass


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    if doc.get("experiment") not in EXPERIMENTS:
        raise ConfigError(
            f"config.experiment must be one of {EXPERIMENTS}, got {doc.get('experiment')!r}")
    if "disorder" in doc:
        bad = set(doc["disorder"]) - _DISORDER_KEYS
        if bad:
            raise ConfigError(f"unknown config key(s) in disorder: {sorted(bad)}")
    return doc


def _rates_from_config(config: dict) -> "optics.RateSet":
    gamma = float(config.get("gamma", 0.0))
    if config.get("paper_preset", False):
        net = optics.paper_network()
        return optics.derive_rates(net, gamma, paper_preset=True)
    if "network" not in config:
        raise ConfigError("config needs either paper_preset: true or a network block")
    try:
        net = optics.network_from_dict(config["network"])
        return optics.derive_rates(net, gamma)
    except ValueError as exc:
        raise ConfigError(f"invalid network: {exc}") from exc


def _prepare_out_dir(config: dict, args) -> Path:
    out = Path(args.out) if args.out else Path(config.get("output_dir", "run"))
    if out.exists():
        if not args.force:
            raise ConfigError(
                f"output directory {out} exists; pass --force to overwrite")
    else:
        out.mkdir(parents=True)
    return out


def run(config: dict, args) -> int:
    experiment = config["experiment"]
    rates = _rates_from_config(config)
    out = _prepare_out_dir(config, args)
    t_end = float(config.get("t_end", 20.0))
    dt = float(config.get("dt", experiments.DEFAULT_DT))
    store_every = int(config.get("store_every", 20))
    extra = {}

    if experiment == "derive":
        table = io.diagnostics_table(rates)
        print(table)
        (out / "rates.txt").write_text(table + "\n", encoding="utf-8")
        extra["outputs"] = ["rates.txt"]
    elif experiment == "simulate":
        gammas = [float(g) for g in config.get("gammas", [0.0, 1.0])]
        curves = experiments.efficiency_curves(
            rates, gammas, t_end, dt=dt, store_every=store_every)
        outputs = []
        for gamma in gammas:
            name = f"trajectory_gamma_{gamma:g}.csv"
            io.write_trajectory_csv(out / name, curves[gamma], rates.n_sites)
            outputs.append(name)
        extra["outputs"] = outputs
        extra["gammas"] = gammas
    elif experiment == "sweep":
        grid = config.get("gamma_grid")
        grid = (np.asarray(grid, dtype=float) if grid is not None
                else experiments.default_sweep_grid())
        t_eval = float(config.get("t_eval", 20.0))
        sweep = experiments.dephasing_sweep(rates, grid, t_eval, dt=dt)
        io.write_sweep_csv(out / "sweep.csv", sweep)
        extra["outputs"] = ["sweep.csv"]
        extra["gamma_grid"] = [float(g) for g in grid]
        extra["t_eval"] = t_eval
    elif experiment == "disorder":
        dcfg_doc = dict(config.get("disorder", {}))
        if args.seed is not None:
            dcfg_doc["seed"] = args.seed
        elif "seed" in config and "seed" not in dcfg_doc:
            dcfg_doc["seed"] = config["seed"]
        cfg = DisorderConfig(**dcfg_doc)
        gamma = float(config.get("gamma", 1.0))
        dt_ens = float(config.get("dt", experiments.ENSEMBLE_DT))
        ens = experiments.disorder_ensemble(rates, cfg, gamma, t_end, dt=dt_ens)
        io.write_ensemble_csv(out / "disorder.csv", ens)
        extra["outputs"] = ["disorder.csv"]
        extra["disorder"] = {"relative_spread": cfg.relative_spread,
                             "n_samples": cfg.n_samples, "seed": cfg.seed,
                             "distribution": cfg.distribution}
    elif experiment == "entangle":
        gamma = float(config.get("gamma", 1.0))
        series = experiments.entanglement_protocol(
            rates, gamma, t_end, dt=dt, store_every=store_every)
        io.write_entanglement_csv(out / "entanglement.csv", series)
        extra["outputs"] = ["entanglement.csv"]
    extra["grid"] = {"t_end": t_end, "dt": dt, "store_every": store_every}
    if args.seed is not None:
        extra["seed"] = args.seed
    io.write_meta(out / "meta.json", config, rates, extra)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cavnet",
        description="Noise-assisted single-photon transport through a "
                    "coupled optical-cavity network")
    p.add_argument("--config", required=True, help="path to the JSON run configuration")
    p.add_argument("--out", help="output directory (overrides config.output_dir)")
    p.add_argument("--seed", type=int, help="RNG seed override for the disorder ensemble")
    p.add_argument("--force", action="store_true",
                   help="allow writing into an existing output directory")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        return run(config, args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
