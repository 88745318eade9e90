"""Coset actions, ramification data, and Riemann-Hurwitz bookkeeping.

The cover attached to a representation rho and a subgroup H0 of the
target is encoded by the right-translation action on the right cosets
H0\\G0.  Cycle lengths of a peripheral image acting on the cosets are
the local degrees over that puncture.  For a product representation the
coset space is a product of per-factor spaces and the diagonal action
factors cycle by cycle: cycles of lengths l and m combine into
gcd(l, m) cycles of length lcm(l, m), so the full local-degree multiset
is computed from per-factor cycle types without materializing the
product space.  Multisets are stored as {length: count} dictionaries
with exact (arbitrary precision) counts.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BadParameters, BudgetExceeded, InconsistentRamification
from .groups import (
    DEFAULT_ENUM_BUDGET,
    FiniteGroupHandle,
    GroupElement,
    GroupTable,
    ProductElement,
    SubgroupData,
    element_order,
    group_table,
    normalizer,
    subgroup_closure,
)
from .orbits import OrbitClosure, verify_characteristic_closure
from .surfaces import RepTuple, SurfaceSignature

DEFAULT_COSET_BUDGET = 1_000_000


@dataclass
class CosetSpace:
    """Right cosets H\\G, labeled 0..d-1 in order of smallest member."""

    table: GroupTable
    subgroup: SubgroupData
    degree: int
    point_of: np.ndarray  # element id -> coset label
    reps: np.ndarray      # coset label -> representative element id


def coset_space(
    h0: SubgroupData, budget: int = DEFAULT_COSET_BUDGET, table: GroupTable | None = None
) -> CosetSpace:
    if table is None:
        table = group_table(h0.ambient)
    n = table.order
    if h0.order == 0 or n % h0.order:
        raise BadParameters("subgroup order must divide the group order")
    degree = n // h0.order
    if degree > budget:
        raise BudgetExceeded(
            f"coset space of size {degree} exceeds budget {budget}",
            used=degree,
            budget=budget,
        )
    h_ids = np.array(sorted(table.id_of(h) for h in h0.elements), dtype=np.int64)
    point_of = np.full(n, -1, dtype=np.int32)
    reps = []
    for eid in range(n):
        if point_of[eid] >= 0:
            continue
        coset = table.mul[h_ids, eid]
        point_of[coset] = len(reps)
        reps.append(eid)
    assert len(reps) == degree
    return CosetSpace(table, h0, degree, point_of, np.array(reps, dtype=np.int64))


def coset_permutation(space: CosetSpace, g: GroupElement) -> tuple[int, ...]:
    """The permutation Hx -> Hxg of coset labels."""
    gid = space.table.id_of(g)
    return tuple(int(v) for v in space.point_of[space.table.mul[space.reps, gid]])


@dataclass
class CosetAction:
    """The coset permutations of all generator images of one representation."""

    degree: int
    subgroup_order: int
    free_perms: dict[str, tuple[int, ...]]
    peripheral_perms: tuple[tuple[int, ...], ...]  # c_1, .., c_n (derived last)


def coset_action(
    rep: RepTuple,
    h0: SubgroupData,
    budget: int = DEFAULT_COSET_BUDGET,
    space: CosetSpace | None = None,
) -> CosetAction:
    if space is None:
        space = coset_space(h0, budget)
    free = {
        name: coset_permutation(space, g)
        for name, g in zip(rep.signature.generator_names, rep.images)
    }
    peripheral = tuple(coset_permutation(space, g) for g in rep.peripheral_images())
    return CosetAction(space.degree, h0.order, free, peripheral)


def cycle_type(perm: Sequence[int]) -> dict[int, int]:
    """Multiset of cycle lengths as {length: count}."""
    seen = [False] * len(perm)
    out: Counter = Counter()
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            length += 1
        out[length] += 1
    return dict(out)


def local_degrees_direct(action: CosetAction, puncture: int) -> dict[int, int]:
    """Cycle type of the puncture's peripheral image on the coset space
    (punctures are 1-based; each cycle is one point of the cover over
    the puncture and its length is the local degree there)."""
    if not 1 <= puncture <= len(action.peripheral_perms):
        raise BadParameters(f"no puncture {puncture}")
    return cycle_type(action.peripheral_perms[puncture - 1])


def combine_cycle_types(x: dict[int, int], y: dict[int, int]) -> dict[int, int]:
    out: Counter = Counter()
    for l, cl in x.items():
        for m, cm in y.items():
            out[math.lcm(l, m)] += math.gcd(l, m) * cl * cm
    return dict(out)


def local_degrees_factored(factor_types: Sequence[dict[int, int]]) -> dict[int, int]:
    """Cycle type of the diagonal action on a product of coset spaces,
    from the per-factor cycle types; independent of combination order."""
    if not factor_types:
        raise BadParameters("need at least one factor")
    result = dict(factor_types[0])
    for t in factor_types[1:]:
        result = combine_cycle_types(result, t)
    return result


def elevation_degree(class_reps: Sequence[RepTuple], puncture: int) -> int:
    """lcm of the orders of the puncture's image across the class reps;
    this is the order of the product image, i.e. the covering degree of
    any elevation of the peripheral loop in the regular kernel cover."""
    orders = [element_order(rep.peripheral_images()[puncture - 1]) for rep in class_reps]
    return math.lcm(*orders)


@dataclass(frozen=True)
class ElevationDatum:
    """Local-degree data over one puncture."""

    puncture: int
    elevation_order: int           # degree d_i of elevations in the kernel cover
    local_degrees: dict[int, int]  # multiset over the irregular cover


def riemann_hurwitz(
    degree: int, euler_closed_base: int, ramification: Sequence[dict[int, int]]
) -> tuple[int, int]:
    """chi and genus of the cover: chi = d*chi(S) - sum_y (deg_y - 1).

    The base Euler characteristic is that of the closed base surface
    (punctures filled); each ramification multiset must sum to the
    degree, and the result must be the Euler characteristic of a closed
    orientable surface.
    """
    correction = 0
    for multiset in ramification:
        total = sum(length * count for length, count in multiset.items())
        if total != degree:
            raise InconsistentRamification(
                f"local degrees sum to {total}, expected the degree {degree}"
            )
        correction += sum((length - 1) * count for length, count in multiset.items())
    chi = degree * euler_closed_base - correction
    if chi % 2:
        raise InconsistentRamification(f"Euler characteristic {chi} is odd")
    genus = 1 - chi // 2
    if genus < 0:
        raise InconsistentRamification(f"negative genus {genus}")
    return chi, genus


def genus_lower_bound(p: int, k: int, g: int, n: int) -> Fraction:
    """1 + (p+1)^k (g - 1 + (n/2)(p-1)/(p+1)), exactly."""
    return 1 + Fraction((p + 1) ** k) * (g - 1 + Fraction(n * (p - 1), 2 * (p + 1)))


def proposition_genus_bound(index: int, k: int, g: int, n: int, delta: int) -> Fraction:
    """1 + [G0:H0]^k (g - 1 + n(delta-1)/(2 delta)), exactly."""
    return 1 + Fraction(index**k) * (g - 1 + Fraction(n * (delta - 1), 2 * delta))


def verify_deck_trivial(h0: SubgroupData, budget: int = DEFAULT_ENUM_BUDGET) -> bool:
    """The deck group of the H0-coset cover is N(H0)/H0; it is trivial
    exactly when H0 is self-normalizing (the whole group included)."""
    return normalizer(h0, budget).elements == h0.elements


@dataclass(frozen=True)
class CharacteristicCoreReport:
    """Certificate data for the orbit-kernel characteristic cover."""

    peripheral_orders: tuple[int, ...]  # order of each peripheral product image
    all_at_least_two: bool
    degree: int | None                  # |image of the product rep|, when affordable
    aut_invariant: bool


def characteristic_core(
    class_reps: Sequence[RepTuple],
    orbit: OrbitClosure,
    closure_budget: int = DEFAULT_ENUM_BUDGET,
) -> CharacteristicCoreReport:
    """Summarize the regular cover attached to the intersection of the
    kernels over the orbit (equivalently over the class reps, since
    postcomposition preserves kernels)."""
    signature = class_reps[0].signature
    n = signature.n
    orders = tuple(elevation_degree(class_reps, i) for i in range(1, n + 1))
    base = class_reps[0].target
    k = len(class_reps)
    product_handle = FiniteGroupHandle.power(base, k)
    degree: int | None = None
    # the image can only be bounded a priori by the ambient order, so a
    # closure is attempted only when the whole product is affordable
    if product_handle.order <= closure_budget:
        images = [
            ProductElement(tuple(rep.images[pos] for rep in class_reps))
            for pos in range(signature.free_rank)
        ]
        degree = subgroup_closure(images, product_handle, closure_budget).order
    return CharacteristicCoreReport(
        peripheral_orders=orders,
        all_at_least_two=all(o >= 2 for o in orders),
        degree=degree,
        aut_invariant=verify_characteristic_closure(orbit),
    )
