#!/usr/bin/env python3
"""Build the reference certificate set into ./certs (or a given directory).

Covers every family at its smallest fully-computable parameters plus the
single-factor diagnostic.  Certificates that honestly record failing
subgroup conditions (the p=5 diagonal-normalizer cases) are still
written; the check vector inside each file is the ground truth.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from coverforge.certificates import ConstructConfig, construct, write_certificate

CONFIGS = [
    ("genus-zero-p5-n3", ConstructConfig(case="genus-zero", p=5, punctures=3)),
    ("once-punctured-p13", ConstructConfig(case="once-punctured", p=13, genus=1)),
    ("char-cyclic-g0-n3", ConstructConfig(case="char-cyclic", genus=0, punctures=3)),
    ("char-sym3-g1", ConstructConfig(case="char-sym3", genus=1)),
    (
        "generic-p5-single-factor",
        ConstructConfig(case="generic", p=5, genus=1, punctures=2, single_factor=True),
    ),
    (
        "genus-zero-p13-n3-dihedral-t4",
        ConstructConfig(case="genus-zero", p=13, punctures=3, explicit_t=4),
    ),
]


def main() -> int:
    out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "certs")
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, config in CONFIGS:
        cert = construct(config)
        path = out_dir / f"{name}.json"
        write_certificate(cert, str(path))
        verdict = "all-pass" if cert["all_checks_pass"] else "has failing checks"
        print(f"{path}: {verdict}, variant={cert['variant']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
