"""Regenerates the small synthetic panels used by the CLI tests.

Deterministic: rerunning produces byte-identical files.
"""
import datetime as dt
import math
import random
from pathlib import Path

HERE = Path(__file__).parent
START = dt.date(2020, 1, 6)
END = dt.date(2020, 6, 19)
HOLIDAYS = {dt.date(2020, 4, 10), dt.date(2020, 4, 13), dt.date(2020, 5, 1)}


def days(start=START, end=END):
    d = start
    while d <= end:
        yield d
        d += dt.timedelta(days=1)


def search(rng, start, peak, zeros=0):
    rows = []
    for i, d in enumerate(days(start)):
        if i < zeros:
            v = 0
        else:
            bump = 60 * math.exp(-(((d - peak).days) / 12.0) ** 2)
            v = min(99, max(1, round(20 + bump + rng.uniform(-8, 8))))
        if d == peak:
            v = 100
        rows.append((d, v))
    return rows


def prices(rng, base, crash):
    rows = []
    p = base
    for d in days():
        if d.weekday() >= 5 or d in HOLIDAYS:
            continue
        drift = -0.03 if crash <= d < crash + dt.timedelta(days=21) else 0.002
        p *= 1 + drift + rng.gauss(0, 0.012)
        rows.append((d, round(p, 2)))
    return rows


def write(path, rows):
    with open(path, "w", newline="\n") as f:
        f.write("date,value\n")
        for d, v in rows:
            f.write(f"{d.isoformat()},{v}\n")


def main():
    rng = random.Random(20200316)
    panel = HERE / "panel"
    write(panel / "ita_search.csv", search(rng, START, dt.date(2020, 3, 10)))
    write(panel / "ita_ftsemib.csv", prices(rng, 23500.0, dt.date(2020, 2, 24)))
    write(panel / "ita_star.csv", prices(rng, 41000.0, dt.date(2020, 2, 24)))
    write(panel / "grc_search.csv", search(rng, START, dt.date(2020, 3, 18)))
    write(panel / "grc_athex.csv", prices(rng, 880.0, dt.date(2020, 3, 2)))
    write(panel / "isl_search.csv", search(rng, dt.date(2020, 2, 3), dt.date(2020, 3, 24), zeros=5))
    write(panel / "isl_omxi.csv", prices(rng, 2100.0, dt.date(2020, 3, 9)))

    bad = HERE / "malformed"
    write(bad / "fra_search.csv", search(rng, START, dt.date(2020, 3, 17)))
    write(bad / "fra_cac.csv", prices(rng, 6000.0, dt.date(2020, 2, 24)))
    rows = prices(rng, 700.0, dt.date(2020, 2, 24))
    rows[10] = (rows[10][0], "n/a")
    write(bad / "fra_sbf.csv", rows)


if __name__ == "__main__":
    main()
