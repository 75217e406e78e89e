#!/usr/bin/env python3
"""Writes the seeded synthetic two-sample dataset under data/synthetic."""
import argparse
import csv
import pathlib
import random

GENES = 200
PER_GROUP = 20
CHROMS = [("chr1", 120), ("chr2", 80)]
BLOCK = range(60, 80)
STRONG = (5, 150, 151)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "synthetic"))
    parser.add_argument("--seed", type=int, default=20240611)
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    samples = [f"s{j + 1:02d}" for j in range(2 * PER_GROUP)]

    with open(out / "expr.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["gene"] + samples)
        for i in range(GENES):
            shift = 1.2 if i in BLOCK else (2.5 if i in STRONG else 0.0)
            row = []
            for j in range(2 * PER_GROUP):
                x = 6.0 + rng.gauss(0.0, 1.0) + (shift if j >= PER_GROUP else 0.0)
                row.append(f"{x:.4f}")
            w.writerow([f"gene{i + 1:03d}"] + row)

    with open(out / "labels.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["sample_id", "group"])
        for j, s in enumerate(samples):
            w.writerow([s, 1 if j < PER_GROUP else 2])

    with open(out / "annotations.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "chrom"])
        i = 0
        for name, size in CHROMS:
            for _ in range(size):
                w.writerow([f"gene{i + 1:03d}", name])
                i += 1


if __name__ == "__main__":
    main()
