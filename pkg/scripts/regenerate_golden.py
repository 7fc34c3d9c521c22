"""Rewrite the golden CLI outputs under tests/data/golden.

Only run this after an intentional change to the assembled numbers.
"""

import shutil
import tempfile
from pathlib import Path

from relscott.cli import main

GOLDEN = Path(__file__).parents[1] / "tests" / "data" / "golden"
RUNS = {
    "bounds.json": ["bounds"],
    "validation.json": ["validate"],
    "energy_breakdown.json": ["assemble", "--scott-table", str(GOLDEN / "scott_table.csv"), "--points", "801"],
}


def run(name, argv, out):
    code = main(["--config", str(GOLDEN / "reference.cfg"), "--out-dir", str(out), *argv])
    if code != 0:
        raise SystemExit(f"{name}: exit code {code}")
    return out / name


if __name__ == "__main__":
    with tempfile.TemporaryDirectory() as tmp:
        for name, argv in RUNS.items():
            shutil.copy(run(name, argv, Path(tmp)), GOLDEN / name)
            print("wrote", GOLDEN / name)
