#!/usr/bin/env python3
"""Regenerates data/housing.csv, a synthetic regression dataset.

The file mimics the shape and column scales of the classic Boston housing
benchmark (506 rows, 13 numeric features, response 'medv') so that examples
and tests have a realistic tabular dataset to chew on, but every value here
is synthetic: features are drawn from simple per-column distributions and the
response is a fixed linear signal plus Gaussian noise, clipped to [5, 50].

Deterministic by construction (stdlib Mersenne Twister, fixed seed); rerun it
only if the schema changes, since the committed CSV is referenced by tests.
"""

import random

SEED = 506
N = 506

COLUMNS = [
    "crim", "zn", "indus", "chas", "nox", "rm", "age",
    "dis", "rad", "tax", "ptratio", "b", "lstat",
]

# Linear signal: response = BASE + sum(coef * (x - center)) + N(0, NOISE).
BASE = 22.0
NOISE = 4.0
COEF = {
    "crim": -0.10, "zn": 0.04, "indus": -0.05, "chas": 2.8, "nox": -18.0,
    "rm": 4.2, "age": -0.01, "dis": -1.3, "rad": 0.25, "tax": -0.011,
    "ptratio": -0.9, "b": 0.009, "lstat": -0.55,
}
CENTER = {
    "crim": 3.6, "zn": 11.0, "indus": 11.0, "chas": 0.07, "nox": 0.55,
    "rm": 6.28, "age": 68.0, "dis": 3.8, "rad": 9.5, "tax": 408.0,
    "ptratio": 18.5, "b": 357.0, "lstat": 12.7,
}


def clip(v, lo, hi):
    return max(lo, min(hi, v))


def draw_row(rng):
    row = {
        "crim": round(clip(2.718281828 ** rng.gauss(-1.0, 2.0), 0.005, 90.0), 5),
        "zn": 0.0 if rng.random() < 0.7 else round(rng.uniform(12.5, 100.0) * 2) / 2,
        "indus": round(rng.uniform(0.5, 27.0), 2),
        "chas": 1.0 if rng.random() < 0.07 else 0.0,
        "nox": round(rng.uniform(0.38, 0.87), 3),
        "rm": round(clip(rng.gauss(6.3, 0.7), 3.5, 8.8), 3),
        "age": round(rng.uniform(3.0, 100.0), 1),
        "dis": round(clip(2.718281828 ** rng.gauss(1.2, 0.5), 1.0, 12.0), 4),
        "rad": float(rng.choice([1, 2, 3, 4, 5, 6, 7, 8, 24])),
        "tax": float(int(rng.uniform(187, 711))),
        "ptratio": round(rng.uniform(12.6, 22.0), 1),
        "b": round(clip(396.9 - 2.718281828 ** rng.gauss(2.0, 1.5), 0.3, 396.9), 2),
        "lstat": round(clip(2.718281828 ** rng.gauss(2.4, 0.6), 1.7, 38.0), 2),
    }
    signal = BASE + sum(COEF[c] * (row[c] - CENTER[c]) for c in COLUMNS)
    row["medv"] = round(clip(signal + rng.gauss(0.0, NOISE), 5.0, 50.0), 1)
    return row


def main():
    rng = random.Random(SEED)
    rows = [draw_row(rng) for _ in range(N)]
    fmt = lambda v: str(int(v)) if v == int(v) else repr(v)
    with open("data/housing.csv", "w", newline="\n") as f:
        f.write(",".join(COLUMNS + ["medv"]) + "\n")
        for row in rows:
            f.write(",".join(fmt(row[c]) for c in COLUMNS + ["medv"]) + "\n")
    print(f"wrote data/housing.csv ({N} rows, {len(COLUMNS)} features)")


if __name__ == "__main__":
    main()
