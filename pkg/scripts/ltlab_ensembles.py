"""Run the two Daubechies ensembles and freeze their maximum ratios.

    python3 scripts/ltlab_ensembles.py [--plain 100] [--coulomb 50] [--out tests/data/ltlab_baseline.json]
"""

import argparse
import json
import time
from pathlib import Path

from relscott.ltlab import run_ensemble


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--plain", type=int, default=100)
    p.add_argument("--coulomb", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=str(Path(__file__).parents[1] / "tests" / "data" / "ltlab_baseline.json"))
    a = p.parse_args()
    out = {}
    for variant, n in (("plain", a.plain), ("coulomb", a.coulomb)):
        t = time.perf_counter()
        s = run_ensemble(variant, n, a.seed, a.threads)
        out[variant] = {"max_ratio": s.max_ratio, "argmax_seed": s.argmax_seed, "samples": n,
                        "base_seed": a.seed, "all_finite": s.all_finite}
        print(f"{variant:8s} n={n:4d} max_ratio={s.max_ratio:.6g} at seed {s.argmax_seed} "
              f"({time.perf_counter() - t:.1f} s)")
    Path(a.out).write_text(json.dumps(out, indent=2) + "\n")
    print("wrote", a.out)


if __name__ == "__main__":
    main()
