"""Regenerate the files under src/feedback_iv/data from the shipped generators."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from feedback_iv.simulation import DgpSpec, gen_sample, stream, synthetic_panel

OUT = Path(__file__).resolve().parents[1] / "src" / "feedback_iv" / "data"


def quarters(n, start=1960):
    return [f"{start + q // 4}Q{q % 4 + 1}" for q in range(n)]


def write_csv(path, header, rows, dates=None):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow((["date"] if dates else []) + list(header))
        for i, row in enumerate(rows):
            w.writerow(([dates[i]] if dates else []) + [repr(float(v)) for v in row])


def regression_csv(path, spec, seed, names):
    data = gen_sample(spec, stream(seed, 0))
    rows = np.column_stack([data.y, data.X])
    write_csv(path, ["y", *names], rows, quarters(spec.T))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write_csv(OUT / "tiny.csv", ["y", "one"], [[1.0, 1.0], [2.5, 1.0], [0.5, 1.0], [3.0, 1.0]])

    k3 = DgpSpec.from_dict({"T": 120, "K": 3, "process": "ar1", "rho": 0.7, "feedback_scale": [1.0], "beta": [0.5, -0.25, 1.0]})
    regression_csv(OUT / "k3.csv", k3, 11, ["gdp", "rate", "spread"])

    tiers = {"green": (0.0, 10), "amber": (0.8, 20), "red": (0.8, 50)}
    for name, (rho, K) in tiers.items():
        spec = DgpSpec.from_dict({"T": 200, "K": K, "process": "ar1", "rho": rho, "feedback_scale": [1.5]})
        regression_csv(OUT / f"tier_{name}.csv", spec, 7, [f"x{k + 1}" for k in range(K)])

    panel = synthetic_panel(200, 108, seed=0)
    write_csv(OUT / "synthetic_panel.csv", [f"s{k + 1:03d}" for k in range(108)], np.round(panel, 10), quarters(200))

    bias_k = {
        "T": 200,
        "process": "ar1",
        "rho": 0.8,
        "feedback_scale": [1.5],
        "sigma2": 1.0,
        "beta": 0.0,
        "K": 50,
        "contrast": "feedback_direction",
        "grid": {"K": [4, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100]},
    }
    bias_vs_rho = dict(bias_k, grid={"rho": [0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.95, 0.98]})
    large_t = dict(bias_k, T=800, K=200, grid={"K": [16, 40, 80, 120, 160, 200, 240, 280, 320, 360, 400]})
    smoke = {"T": 60, "K": 4, "process": "ar1", "rho": 0.5, "feedback_scale": [1.0], "grid": {"K": [3, 4]}}
    for name, obj in (("bias_vs_k", bias_k), ("bias_vs_rho", bias_vs_rho), ("large_t", large_t), ("smoke", smoke)):
        (OUT / f"{name}.json").write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
