"""
Command-line front end.

Subcommands mirror the three experiment figures plus single-trial inspection:

  spectrum         trial-averaged angular pseudo-spectra per scheme
  nmse-snr         NMSE versus SNR sweep
  nmse-n           NMSE versus array size sweep
  trial            one training period with the full per-block trace
  validate-config  parse and validate a config file, print its hash

Config files are YAML (JSON is valid YAML); angles are given in degrees.
"""

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np
import yaml

from . import harness
from .harness import ConfigError, SCHEMES


def _load_config(args):
    if args.config:
        with open(args.config) as fh:
            raw = yaml.safe_load(fh)
        cfg = harness.config_from_dict(raw or {})
    else:
        cfg = default_config()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if getattr(args, "scheme", None):
        overrides["schemes"] = SCHEMES if args.scheme == "all" else (args.scheme,)
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return cfg


def default_config():
    """Three-user scenario at the default array and training settings."""
    from .channel import UserGeometry

    users = tuple(
        UserGeometry(r=100.0, elevation=math.radians(a), azimuth=0.0, power=1.0)
        for a in (15.4, 30.7, 45.1)
    )
    return harness.ScenarioConfig(users=users)


def _write(out_dir, name, fmt, csv_text, json_text):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.{fmt}"
    path.write_text(csv_text if fmt == "csv" else json_text)
    print(path)


def _cmd_spectrum(args):
    cfg = _load_config(args)
    table = harness.emit_spectrum(cfg)
    _write(args.out, "spectrum", args.format, table.to_csv(), table.to_json())
    return 0


def _cmd_nmse_snr(args):
    cfg = _load_config(args)
    report = harness.run_snr_sweep(cfg)
    _write(args.out, "nmse_snr", args.format, report.to_csv(), report.to_json())
    return 1 if all(r["mean_nmse"] is None for r in report.rows) else 0


def _cmd_nmse_n(args):
    cfg = _load_config(args)
    report = harness.run_n_sweep(cfg)
    _write(args.out, "nmse_n", args.format, report.to_csv(), report.to_json())
    return 1 if all(r["mean_nmse"] is None for r in report.rows) else 0


def _trace_to_dict(cfg, result):
    true_eta = cfg.true_eta()
    blocks = []
    for b in result.blocks:
        entry = {
            "block": b.index,
            "zenith_deg": np.degrees(b.orient.zenith).round(6).tolist(),
            "azimuth_deg": np.degrees(b.orient.azimuth).round(6).tolist(),
            "failed": b.failed,
            "degraded": b.degraded,
        }
        if b.estimate is not None:
            entry["aoa_deg"] = np.degrees(b.estimate.aoas[:, 0]).round(6).tolist()
            entry["gains_re"] = np.real(b.estimate.gains).tolist()
            entry["gains_im"] = np.imag(b.estimate.gains).tolist()
            entry["nmse"] = harness.nmse(true_eta, b.estimate)
        blocks.append(entry)
    return {
        "scheme": result.scheme,
        "failed": result.failed,
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "blocks": blocks,
    }


def _cmd_trial(args):
    cfg = _load_config(args)
    scheme = cfg.schemes[0]
    noise = cfg.noise_power(cfg.snr_fixed_db)
    result = harness.run_training_period(cfg, scheme, noise, trial=0)
    doc = json.dumps(_trace_to_dict(cfg, result), sort_keys=True, indent=2) + "\n"
    _write(args.out, "trial", "json", doc, doc)
    return 1 if result.failed else 0


def _cmd_validate(args):
    cfg = _load_config(args)
    print(f"OK: {cfg.k} users, N={cfg.array_config().n}, hash={cfg.config_hash()}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="rasim",
                                     description="Rotatable-antenna channel estimation simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "spectrum": _cmd_spectrum,
        "nmse-snr": _cmd_nmse_snr,
        "nmse-n": _cmd_nmse_n,
        "trial": _cmd_trial,
        "validate-config": _cmd_validate,
    }
    for name, func in commands.items():
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="YAML/JSON config file")
        p.add_argument("--seed", type=int, default=None, help="root RNG seed override")
        p.add_argument("--trials", type=int, default=None, help="trial count override")
        p.add_argument("--scheme", type=str, default=None,
                       choices=list(SCHEMES) + ["all"], help="scheme selection")
        p.add_argument("--out", type=str, default=".", help="output directory")
        p.add_argument("--format", type=str, default="csv", choices=["csv", "json"])
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
