"""Recompute per-cell aggregates from the sweep CSV and compare with the JSON summary."""

import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np

CONFIG = {
    "n": 200,
    "s": 4,
    "m_grid": [40, 150],
    "beta_grid": [0.0, 0.05],
    "noise": {"family": "gaussian", "mean": 0.1, "scale": 0.4},
    "noise_scale_grid": [0.2, 0.6],
    "lambda_rule": {"rule": "fixed", "value": [1.0, 2.5]},
    "adversary": "random_flip",
    "trials_per_cell": 7,
    "master_seed": 2024,
}


def main():
    cli, work = sys.argv[1], Path(sys.argv[2])
    work.mkdir(parents=True, exist_ok=True)
    cfg = work / "config.json"
    cfg.write_text(json.dumps(CONFIG))
    out_csv, out_json = work / "sweep.csv", work / "summary.json"
    subprocess.run([cli, "sweep", "-c", str(cfg), "--csv", str(out_csv), "--json", str(out_json), "-j", "3"],
                   check=True)

    groups = {}
    with out_csv.open() as fh:
        for row in csv.DictReader(fh):
            key = (int(row["m"]), float(row["beta"]), float(row["noise_scale"]), float(row["lambda"]))
            err = float(row["error_l2"])
            groups.setdefault(key, [])
            if not math.isnan(err):
                groups[key].append(err)

    summary = json.loads(out_json.read_text())
    cells = summary["cells"]
    assert len(cells) == len(groups) == 16, (len(cells), len(groups))
    worst = 0.0
    for cell in cells:
        key = (cell["m"], cell["beta"], cell["noise_scale"], cell["lambda"])
        errs = np.array(groups[key])
        for name, q in (("median_error", 0.5), ("p90_error", 0.9)):
            want = float(np.quantile(errs, q, method="linear"))
            worst = max(worst, abs(want - cell[name]))
    print(f"max aggregate discrepancy {worst:.3e}")
    if worst > 1e-12:
        sys.exit(1)


if __name__ == "__main__":
    main()
