#!/usr/bin/env python3
"""Measure every instrumented kernel and compare against its predictions.

Runs each operation on seeded random invertible rational matrices, tallies
base-scalar multiplications and divisions, and prints the measured totals
next to the exact recurrence and closed-form values.  Rows whose closed
form tracks a different accounting (triangular inversion, the full
factorization) carry an annotation instead of a mismatch flag.
"""

import argparse
import sys
from pathlib import Path

# allow running straight from a checkout, before any install
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from blocklin.complexity import render_machine, render_table, verify_counts

DEFAULT_PLAN = [
    ("mul", [2, 4, 8, 16]),
    ("tri_mul", [2, 4, 8, 16]),
    ("tri_inv", [2, 4, 8, 16]),
    ("gram_inv", [2, 4, 8]),
    ("lu", [2, 4, 8, 16]),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--machine", action="store_true", help="one line per row")
    args = parser.parse_args()
    ok = True
    for op, sizes in DEFAULT_PLAN:
        reports = verify_counts(op, sizes, seed=args.seed)
        ok = ok and all(r.match for r in reports)
        if args.machine:
            sys.stdout.write(render_machine(reports))
        else:
            sys.stdout.write(render_table(reports))
            sys.stdout.write("\n")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
