"""Export the Iris and Wine copies bundled with scikit-learn as plain CSV (header row, label last)."""
import csv
import pathlib
import sys

from sklearn.datasets import load_iris, load_wine

out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data")
out_dir.mkdir(parents=True, exist_ok=True)

for name, loader in (("iris", load_iris), ("wine", load_wine)):
    bunch = loader()
    with open(out_dir / f"{name}.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f.replace(" ", "_") for f in bunch.feature_names] + ["class"])
        for row, label in zip(bunch.data, bunch.target):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])
