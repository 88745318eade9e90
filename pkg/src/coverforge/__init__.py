"""coverforge: branched-cover construction and certification from
representations of punctured-surface groups into small finite groups.

The package builds explicit representation families into PSL(2, F_p),
Z/n, and Sym(3), computes their Nielsen orbits and the induced coset
covers, certifies subgroup and ramification conditions, applies the
Riemann-Hurwitz formula exactly, and emits deterministic JSON
certificates that can be re-verified bit for bit.
"""

__version__ = "0.1.0"
