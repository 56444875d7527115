"""Rebuild the divorce-predictors fixture.

The original survey responses are not redistributed here. This script writes
a 170-couple, 54-question table whose per-question low (0-2) / high (3-4)
counts match the published per-cluster tag percentages for questions 1-27
(tags t1..t54). The publication lists no usable figures for questions 28-54,
so those reuse the counts of question q-27, clamped so that no extra tag
reaches 0% or 100% in either cluster.

Run from this directory: python3 generate.py
"""

import csv
import json
import random

SIZES = {1: 90, 2: 80}

# Percentage of couples with the "low" tag t(2q-1), questions 1..27.
LOW_PERCENT = {
    1: [95.556, 94.444, 100.0, 100.0, 100.0, 98.889, 98.889, 100.0, 100.0,
        100.0, 100.0, 100.0, 100.0, 100.0, 100.0, 95.556, 97.778, 98.889,
        96.667, 97.778, 98.889, 67.778, 70.0, 83.333, 81.111, 86.667, 85.556],
    2: [7.5, 20.0, 12.5, 88.75, 17.5, 6.25, 11.25, 15.0, 5.0,
        3.75, 27.5, 18.75, 16.25, 27.5, 17.5, 8.75, 11.25, 12.5,
        3.75, 5.0, 7.5, 8.75, 12.5, 15.0, 11.25, 7.5, 13.75],
}


def low_counts(cluster):
    n = SIZES[cluster]
    counts = [round(p * n / 100) for p in LOW_PERCENT[cluster]]
    for q in range(27):
        counts.append(min(max(counts[q], 1), n - 1))
    return counts


def main():
    rng = random.Random(20240517)
    labels = [1] * SIZES[1] + [2] * SIZES[2]
    rng.shuffle(labels)
    rows = [[0] * 54 for _ in labels]
    for cluster in SIZES:
        members = [i for i, c in enumerate(labels) if c == cluster]
        for q, low in enumerate(low_counts(cluster)):
            order = members[:]
            rng.shuffle(order)
            for rank, i in enumerate(order):
                rows[i][q] = rng.randint(0, 2) if rank < low else rng.randint(3, 4)

    with open("divorce.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["couple"] + [f"Atr{q}" for q in range(1, 55)])
        for i, row in enumerate(rows):
            w.writerow([f"c{i + 1}"] + row)
    with open("labels.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["couple", "cluster"])
        for i, c in enumerate(labels):
            w.writerow([f"c{i + 1}", c])

    rules = []
    for q in range(1, 55):
        low, high = f"t{2 * q - 1}", f"t{2 * q}"
        rules.append({"name": low, "kind": "threshold-below", "feature": f"Atr{q}",
                      "basis": "explicit", "threshold": 3, "complement_of": high})
        rules.append({"name": high, "kind": "threshold-at-or-above", "feature": f"Atr{q}",
                      "basis": "explicit", "threshold": 3, "complement_of": low})
    with open("schema.json", "w") as f:
        json.dump(rules, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
