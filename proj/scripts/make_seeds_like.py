"""Generate a synthetic dataset shaped like the UCI wheat-seeds data: 210 kernels, 7 geometric
features, three balanced varieties. Per-class feature means and spreads approximate the published
class statistics; a shared size factor couples the size-related features."""
import csv
import pathlib
import sys

import numpy as np

FEATURES = ["area", "perimeter", "compactness", "kernel_length", "kernel_width", "asymmetry", "groove_length"]
# (mean, std) per feature for each variety.
CLASSES = [
    [(14.33, 1.22), (14.29, 0.58), (0.880, 0.016), (5.51, 0.23), (3.24, 0.18), (2.67, 1.17), (5.09, 0.26)],
    [(18.33, 1.44), (16.14, 0.62), (0.884, 0.016), (6.15, 0.27), (3.68, 0.19), (3.64, 1.18), (6.02, 0.25)],
    [(11.87, 0.72), (13.25, 0.34), (0.849, 0.022), (5.23, 0.14), (2.85, 0.15), (4.79, 1.34), (5.12, 0.16)],
]
SIZE_LOADING = np.array([0.9, 0.9, 0.2, 0.8, 0.8, 0.0, 0.7])

rng = np.random.default_rng(20240607)
rows = []
for label, stats in enumerate(CLASSES):
    mean = np.array([m for m, _ in stats])
    std = np.array([s for _, s in stats])
    size = rng.standard_normal((70, 1))
    noise = rng.standard_normal((70, len(FEATURES)))
    z = SIZE_LOADING * size + np.sqrt(1.0 - SIZE_LOADING**2) * noise
    for x in mean + std * z:
        rows.append([f"{v:.4f}" for v in x] + [label])

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data") / "seeds.csv"
out.parent.mkdir(parents=True, exist_ok=True)
with open(out, "w", newline="") as fh:
    writer = csv.writer(fh)
    writer.writerow(FEATURES + ["class"])
    writer.writerows(rows)
