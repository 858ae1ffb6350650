"""Regenerates data/two_gaussians.csv (400 rows, centres +-(2, 2), sigma 0.5)."""
import csv
import pathlib

import numpy as np

rng = np.random.default_rng(20240)
out = pathlib.Path(__file__).resolve().parent.parent / "data" / "two_gaussians.csv"
with out.open("w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["x1", "x2", "label"])
    for i in range(400):
        label, c = ("a", 2.0) if i % 2 == 0 else ("b", -2.0)
        x = c + 0.5 * rng.standard_normal(2)
        w.writerow([f"{x[0]:.6f}", f"{x[1]:.6f}", label])
