"""Write the bundled synthetic census-like table (10k rows, fixed seed).

Columns follow the 1994 US census income extract: sex, age, race,
education, occupation, hours-per-week and a binary income label.  Income
is drawn from a logistic model so that occupation, education, age and
hours carry signal; about 2% of occupation cells are '?' as in the
original data.  Rerunning with the same seed reproduces the file byte for
byte.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

OCCUPATIONS = [
    "Tech-support", "Craft-repair", "Other-service", "Sales", "Exec-managerial",
    "Prof-specialty", "Handlers-cleaners", "Machine-op-inspct", "Adm-clerical",
    "Farming-fishing", "Transport-moving", "Priv-house-serv", "Protective-serv", "Armed-Forces",
]
OCC_WEIGHT = [0.03, 0.13, 0.10, 0.11, 0.13, 0.13, 0.04, 0.06, 0.12, 0.03, 0.05, 0.005, 0.02, 0.005]
OCC_EFFECT = [0.5, 0.0, -1.2, 0.2, 1.3, 1.2, -1.0, -0.6, -0.3, -0.8, -0.3, -2.0, 0.4, 0.0]
RACES = ["White", "Black", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other"]
RACE_WEIGHT = [0.85, 0.095, 0.032, 0.01, 0.013]
EDUCATION = ["Basic-schooling", "Attended-HS", "Vocational", "Bachelors-and-above"]
EDU_EFFECT = [-1.2, -0.4, 0.0, 1.1]


def generate(n: int, seed: int):
    rng = np.random.default_rng(seed)
    sex = rng.choice(["Male", "Female"], size=n, p=[0.67, 0.33])
    male = sex == "Male"
    age = np.clip(np.round(rng.gamma(6.0, 6.5, size=n) + 12), 17, 90).astype(int)
    race = rng.choice(RACES, size=n, p=RACE_WEIGHT)
    edu_idx = np.array([rng.choice(4, p=[0.12, 0.45, 0.13, 0.30]) for _ in range(n)])
    occ_p = np.array(OCC_WEIGHT) / np.sum(OCC_WEIGHT)
    occ_idx = rng.choice(len(OCCUPATIONS), size=n, p=occ_p)
    # educated workers drift toward professional jobs
    promote = (edu_idx == 3) & (rng.random(n) < 0.35)
    occ_idx[promote] = rng.choice([4, 5], size=promote.sum())
    hours = np.clip(np.round(rng.normal(38 + 5 * male, 11, size=n)), 1, 99).astype(int)
    logit = (
        -2.6
        + 0.9 * male
        + np.array(EDU_EFFECT)[edu_idx]
        + np.array(OCC_EFFECT)[occ_idx]
        + 0.09 * (np.minimum(age, 50) - 36)
        + 0.035 * (hours - 40)
    )
    income = np.where(rng.random(n) < 1 / (1 + np.exp(-logit)), ">50K", "<=50K")
    occupation = np.array(OCCUPATIONS, dtype=object)[occ_idx]
    occupation[rng.random(n) < 0.02] = "?"
    header = ["age", "sex", "race", "education", "occupation", "hours-per-week", "income"]
    rows = zip(age, sex, race, np.array(EDUCATION)[edu_idx], occupation, hours, income)
    return header, [[str(c) for c in r] for r in rows]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=1994)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src/admui/data/census_synth.csv"))
    args = ap.parse_args()
    header, rows = generate(args.rows, args.seed)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
