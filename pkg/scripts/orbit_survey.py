#!/usr/bin/env python3
"""Survey Nielsen-orbit sizes and class counts over small parameters.

Prints, for each feasible family member, the orbit size, the number k of
automorphism classes, and the induced covering degree [G0:H0]^k.  Useful
for getting a feel for how fast k grows with p and the rank.
"""

import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from coverforge.catalog import (
    build_characteristic_cyclic,
    build_characteristic_sym3,
    build_generic,
    build_genus_zero,
    build_once_punctured,
)
from coverforge.errors import BudgetExceeded
from coverforge.orbits import aut_classes, orbit_closure

ROWS = [
    ("genus-zero p=5 n=3", lambda: build_genus_zero(5, 3)),
    ("genus-zero p=13 n=3", lambda: build_genus_zero(13, 3)),
    ("genus-zero p=13 n=4", lambda: build_genus_zero(13, 4)),
    ("generic p=5 g=1 n=2", lambda: build_generic(5, 1, 2)),
    ("once-punctured p=13", lambda: build_once_punctured(13, 1)),
    ("once-punctured p=17", lambda: build_once_punctured(17, 1)),
    ("char-cyclic g=0 n=3", lambda: build_characteristic_cyclic(0, 3)),
    ("char-cyclic g=1 n=2", lambda: build_characteristic_cyclic(1, 2)),
    ("char-sym3 g=1", lambda: build_characteristic_sym3(1)),
]


def main() -> int:
    budget = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000_000
    print(f"{'case':24} {'ambient':>14} {'orbit':>10} {'k':>6} {'time':>8}")
    for name, builder in ROWS:
        build = builder()
        rank = build.signature.free_rank
        ambient = build.rep.target.order**rank
        start = time.perf_counter()
        try:
            orbit = orbit_closure(build.rep, budget)
        except BudgetExceeded as exc:
            print(f"{name:24} {ambient:>14} {'> ' + str(exc.budget):>10} {'-':>6}")
            continue
        result = aut_classes(orbit)
        elapsed = time.perf_counter() - start
        print(f"{name:24} {ambient:>14} {orbit.size:>10} {result.k:>6} {elapsed:>7.2f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
