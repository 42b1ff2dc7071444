"""Regenerate the bundled demo data files (fixed seed).

The package ships two small synthetic inputs so the file-backed scenarios
work out of the box: a 12-reviewer / 9-paper bid file and a 200-person
demographic file with three loose clusters.  Run from the repository
root:

    python tools/gen_demo_data.py
"""

from __future__ import annotations

import csv
import pathlib

import numpy as np

DATA_DIR = pathlib.Path(__file__).resolve().parent.parent / "src" / "fairmix" / "data"

SEX = ("female", "male")


def gen_bids(rng: np.random.Generator) -> None:
    reviewers = [f"r{i:02d}" for i in range(1, 13)]
    papers = [f"p{j:02d}" for j in range(1, 10)]
    rows = []
    for r in reviewers:
        for p in papers:
            u = rng.random()
            if u < 0.20:
                label = "yes"
            elif u < 0.45:
                label = "maybe"
            elif u < 0.70:
                label = "no"
            elif u < 0.75:
                label = "no_response"
            else:
                continue  # absent pair (implicit no_response)
            rows.append((r, p, label))
    with open(DATA_DIR / "mini_bids.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["reviewer", "paper", "bid"])
        writer.writerows(rows)



# The bulk of the file is three compact demographic clusters drawn from
# restricted category pools; a handful of extreme-profile rows (very old /
# very young, minimal or maximal schooling and work hours, rare category
# combinations) sit far away from everything else in feature space.  The
# category values below are reserved for those rows so the one-hot encoding
# keeps them isolated.
MAIN_MARITAL = ("divorced", "married", "never_married", "separated")
MAIN_RELATIONSHIP = ("husband", "not_in_family", "own_child", "unmarried", "wife")
MAIN_RACE = ("asian_pac", "black", "white")

OUTLIER_ROWS = [
    (93, 1, 99, "widowed", "other_relative", "amer_indian", "female"),
    (17, 16, 2, "never_married", "other_relative", "other", "male"),
    (92, 16, 1, "widowed", "unmarried", "amer_indian", "female"),
    (18, 1, 99, "separated", "other_relative", "other", "female"),
    (94, 16, 99, "widowed", "husband", "amer_indian", "male"),
    (17, 1, 1, "never_married", "other_relative", "other", "male"),
]


def gen_demographics(rng: np.random.Generator) -> None:
    # Categories are constant within each cluster so the one-hot block stays
    # flat inside a cluster; rows vary through the numeric columns only.
    centers = [
        dict(age=27, edu=8, hours=22, marital=2, rel=2, race=2, sex=0),
        dict(age=45, edu=12, hours=40, marital=1, rel=0, race=1, sex=1),
        dict(age=62, edu=15, hours=55, marital=3, rel=1, race=0, sex=1),
    ]
    seen: set[tuple] = {row[:7] for row in OUTLIER_ROWS}
    rows = []
    while len(rows) < 200 - len(OUTLIER_ROWS):
        c = centers[rng.integers(len(centers))]
        age = int(np.clip(round(rng.normal(c["age"], 3)), 20, 78))
        edu = int(np.clip(round(rng.normal(c["edu"], 1.5)), 4, 16))
        hours = int(np.clip(round(rng.normal(c["hours"], 4)), 8, 70))
        row = (
            age,
            edu,
            hours,
            MAIN_MARITAL[c["marital"]],
            MAIN_RELATIONSHIP[c["rel"]],
            MAIN_RACE[c["race"]],
            SEX[c["sex"]],
        )
        if row in seen:
            continue
        seen.add(row)
        rows.append(row)
    for i, outlier in enumerate(OUTLIER_ROWS):
        rows.insert(i * len(rows) // len(OUTLIER_ROWS), outlier)
    out = []
    for row in rows:
        income = f"{rng.integers(15, 120) * 1000}"  # extra column, ignored by the default config
        out.append(tuple(str(x) for x in row) + (income,))
    rows = out
    with open(DATA_DIR / "demo_demographics.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "age",
                "education_year",
                "hours_per_week",
                "marital_status",
                "relationship",
                "race",
                "sex",
                "income",
            ]
        )
        writer.writerows(rows)


if __name__ == "__main__":
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    gen_bids(np.random.Generator(np.random.PCG64(20240811)))
    gen_demographics(np.random.Generator(np.random.PCG64(20240812)))
    print(f"wrote {DATA_DIR / 'mini_bids.csv'}")
    print(f"wrote {DATA_DIR / 'demo_demographics.csv'}")
