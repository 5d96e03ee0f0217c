"""Regenerate the checked-in regression table for the caller simulation.

Run after any deliberate change to the simulation dynamics, then review
the diff; the test suite compares sweep output against this file byte
for byte.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from muit.sim import WorkloadSpec, render_csv, sweep

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "sim_baseline.csv"


def main():
    reports = sweep(WorkloadSpec(passivation=True)) + sweep(
        WorkloadSpec(passivation=False)
    )
    OUT.write_text(render_csv(reports), encoding="utf-8")
    print(f"wrote {OUT}")
    print(render_csv(reports))


if __name__ == "__main__":
    main()
