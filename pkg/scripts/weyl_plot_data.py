"""Dump lambda_k against the Weyl line and the certified bound for plotting.

    python3 scripts/weyl_plot_data.py --level 5 --count 120 --out weyl.csv
"""
import argparse
import csv

from kahler_bounds.experiments import weyl_check
from kahler_bounds.holomorphic import identity_map
from kahler_bounds.meshes import icosphere


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--level", type=int, default=5)
    p.add_argument("--count", type=int, default=120)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="weyl.csv")
    a = p.parse_args()

    rep = weyl_check(icosphere(a.level), a.count, a.seed, identity_map(), 0.01)
    rows = rep["trend"]
    with open(a.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(dict.fromkeys(k for r in rows for k in r)))
        w.writeheader()
        w.writerows(rows)
    print(f"slope {rep['slope']:.4f}, {len(rows)} rows -> {a.out}")


if __name__ == "__main__":
    main()
