"""
NMSE of every scheme across the SNR sweep.

A scaled-down version of the headline experiment: fewer trials, same
protocol. The proposed scheme separates from the benchmarks from 0 dB up.

Run:  python3 demos/demo_nmse_vs_snr.py [output.png]
"""

import dataclasses
import sys

from rasim import harness
from rasim.cli import default_config


def run(trials=30):
    cfg = dataclasses.replace(default_config(), trials=trials)
    print(f"running {trials} trials x {len(cfg.snr_db)} SNR points x "
          f"{len(cfg.schemes)} schemes ...")
    report = harness.run_snr_sweep(cfg)
    print(report.to_csv())
    return cfg, report


def plot(cfg, report, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = {}
    for row in report.rows:
        series.setdefault(row["scheme"], []).append((row["value"], row["mean_nmse"]))
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for scheme, pts in series.items():
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.semilogy(xs, ys, marker="o", label=scheme)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("NMSE")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


if __name__ == "__main__":
    cfg, report = run()
    if len(sys.argv) > 1:
        try:
            plot(cfg, report, sys.argv[1])
        except ImportError:
            print("matplotlib not installed; skipping the figure")
