#!/usr/bin/env python3
"""Fetch the UCI wine data and write the first-cultivar subsets used by the tests.

Writes (default directory: ./data):
  wine_cultivar1.csv  59 rows, all 13 chemical measurements
  wine2d.csv          59 rows, malic acid and proline

Source: https://archive.ics.uci.edu/ml/machine-learning-databases/wine/wine.data
If the download fails, the copy bundled with scikit-learn is used when available.
"""

import argparse
import csv
import io
import pathlib
import sys
import urllib.request

UCI_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/wine/wine.data"

COLUMNS = [
    "alcohol", "malic_acid", "ash", "alcalinity_of_ash", "magnesium",
    "total_phenols", "flavanoids", "nonflavanoid_phenols", "proanthocyanins",
    "color_intensity", "hue", "od280_od315", "proline",
]


def from_uci():
    with urllib.request.urlopen(UCI_URL, timeout=30) as resp:
        text = resp.read().decode("utf-8")
    rows = []
    for rec in csv.reader(io.StringIO(text)):
        if not rec:
            continue
        if int(rec[0]) == 1:
            rows.append(rec[1:14])
    return rows


def from_sklearn():
    import sklearn.datasets

    path = pathlib.Path(sklearn.datasets.__file__).parent / "data" / "wine_data.csv"
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)  # shape header
        for rec in reader:
            if int(rec[13]) == 0:
                rows.append(rec[:13])
    return rows


def write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data", help="output directory")
    args = ap.parse_args()

    try:
        rows = from_uci()
        source = UCI_URL
    except Exception as exc:  # network errors, HTTP errors
        print(f"download failed ({exc}); trying the scikit-learn copy", file=sys.stderr)
        rows = from_sklearn()
        source = "scikit-learn bundled copy"

    if len(rows) != 59:
        sys.exit(f"expected 59 first-cultivar rows, got {len(rows)}")

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write(out / "wine_cultivar1.csv", COLUMNS, rows)
    write(out / "wine2d.csv", ["malic_acid", "proline"], [[r[1], r[12]] for r in rows])
    print(f"wrote {out}/wine_cultivar1.csv and {out}/wine2d.csv from {source}")


if __name__ == "__main__":
    main()
