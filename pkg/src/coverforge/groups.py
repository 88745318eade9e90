"""Exact arithmetic for the finite groups everything else is built on:
PSL(2, F_p) for odd primes p, cyclic groups, small symmetric groups, and
finite direct products.

Conventions fixed here and relied on by every other module:

* Elements are immutable hashable values.  The group law is written
  multiplicatively everywhere, including cyclic groups (where ``x * y``
  is addition of residues mod n).
* Products compose left to right.  For permutations ``(x * y)(pt) =
  y(x(pt))``, i.e. apply ``x`` first; this matches the right-translation
  coset actions used downstream.
* A PSL2 element is stored as the representative of ``{M, -M}`` whose
  first nonzero entry, scanning ``(a, b, c, d)``, lies in
  ``[1, (p-1)/2]``.  Exactly one of the two signs qualifies, so the
  representative is unique and hashing is well defined.
* ``sort_key()`` totally orders the elements of one group.  Every search
  that has to pick an element picks the smallest admissible one, so all
  outputs are reproducible bit for bit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import BadModulus, BadParameters, BudgetExceeded, NotUnimodular

DEFAULT_ENUM_BUDGET = 10_000_000
TABLE_LIMIT = 10_000


def is_prime(n: int) -> bool:
    """Trial division; inputs are desk-scale."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _require_odd_prime(p: int) -> None:
    if not is_prime(p) or p == 2:
        raise BadModulus(f"modulus must be an odd prime, got {p}")


@dataclass(frozen=True)
class FpScalar:
    """A residue in the prime field F_p."""

    value: int
    p: int

    def __post_init__(self):
        _require_odd_prime(self.p)
        if not 0 <= self.value < self.p:
            raise BadParameters(f"{self.value} is not reduced mod {self.p}")


@dataclass(frozen=True)
class ProjectiveMatrix:
    """A canonical representative of an element of PSL(2, F_p).

    Construct through :func:`canonicalize`; the constructor insists on
    the canonical sign so that equality and hashing agree with equality
    in the projective group.
    """

    a: int
    b: int
    c: int
    d: int
    p: int

    def __post_init__(self):
        _require_odd_prime(self.p)
        p = self.p
        if not all(0 <= x < p for x in (self.a, self.b, self.c, self.d)):
            raise BadParameters("entries must be reduced residues; use canonicalize()")
        if (self.a * self.d - self.b * self.c) % p != 1:
            raise NotUnimodular(
                f"determinant is {(self.a * self.d - self.b * self.c) % p}, not 1 mod {p}"
            )
        first = self.a or self.b or self.c or self.d
        if first > (p - 1) // 2:
            raise BadParameters("wrong sign representative; use canonicalize()")

    @classmethod
    def identity(cls, p: int) -> "ProjectiveMatrix":
        return cls(1, 0, 0, 1, p)

    def __mul__(self, other: "ProjectiveMatrix") -> "ProjectiveMatrix":
        if self.p != other.p:
            raise BadParameters("mixed moduli")
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return canonicalize(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, self.p)

    def inverse(self) -> "ProjectiveMatrix":
        return canonicalize(self.d, -self.b, -self.c, self.a, self.p)

    def is_identity(self) -> bool:
        return self.a == 1 and self.d == 1 and self.b == 0 and self.c == 0

    def trace(self) -> int:
        """Trace of the stored representative (defined up to sign in PSL2)."""
        return (self.a + self.d) % self.p

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def sort_key(self):
        return (self.a, self.b, self.c, self.d)


def canonicalize(a: int, b: int, c: int, d: int, p: int) -> ProjectiveMatrix:
    """Reduce an SL2 matrix mod p and pick the canonical sign representative."""
    _require_odd_prime(p)
    a, b, c, d = a % p, b % p, c % p, d % p
    det = (a * d - b * c) % p
    if det != 1:
        raise NotUnimodular(f"determinant is {det}, not 1 mod {p}")
    first = a or b or c or d
    if first > (p - 1) // 2:
        a, b, c, d = (-a) % p, (-b) % p, (-c) % p, (-d) % p
    return ProjectiveMatrix(a, b, c, d, p)


@dataclass(frozen=True)
class Permutation:
    """A permutation of {0, .., m-1} in one-line notation.

    ``(x * y)(pt) = y(x(pt))``: apply x first, then y.  With this
    convention ``[(12), (23)] = (123)`` when written as 1-based cycles.
    """

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise BadParameters(f"not a permutation: {self.images}")

    @property
    def m(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(tuple(range(m)))

    @classmethod
    def from_cycles(cls, m: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        images = list(range(m))
        for cycle in cycles:
            for x, y in zip(cycle, cycle[1:]):
                images[x] = y
            if cycle:
                images[cycle[-1]] = cycle[0]
        return cls(tuple(images))

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.m != other.m:
            raise BadParameters("mixed degrees")
        return Permutation(tuple(other.images[i] for i in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.m
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def sort_key(self):
        return self.images


@dataclass(frozen=True)
class Residue:
    """An element of the cyclic group Z/n, written multiplicatively.

    The law is addition of residues; ``*`` is used so the orbit and
    cover machinery can stay generic over the group kind.
    """

    value: int
    n: int

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.value < self.n:
            raise BadParameters(f"{self.value} is not reduced mod {self.n}")

    @classmethod
    def identity(cls, n: int) -> "Residue":
        return cls(0, n)

    def __mul__(self, other: "Residue") -> "Residue":
        if self.n != other.n:
            raise BadParameters("mixed moduli")
        return Residue((self.value + other.value) % self.n, self.n)

    def inverse(self) -> "Residue":
        return Residue((-self.value) % self.n, self.n)

    def is_identity(self) -> bool:
        return self.value == 0

    def sort_key(self):
        return (self.value,)


@dataclass(frozen=True)
class ProductElement:
    """An element of a finite direct product, stored componentwise."""

    components: tuple["GroupElement", ...]

    def __mul__(self, other: "ProductElement") -> "ProductElement":
        if len(self.components) != len(other.components):
            raise BadParameters("mixed product lengths")
        return ProductElement(tuple(x * y for x, y in zip(self.components, other.components)))

    def inverse(self) -> "ProductElement":
        return ProductElement(tuple(x.inverse() for x in self.components))

    def is_identity(self) -> bool:
        return all(x.is_identity() for x in self.components)

    def sort_key(self):
        key = ()
        for x in self.components:
            key = key + tuple(x.sort_key())
        return key


GroupElement = Union[ProjectiveMatrix, Permutation, Residue, ProductElement]


def element_sort_key(g: GroupElement):
    return g.sort_key()


@dataclass(frozen=True)
class FiniteGroupHandle:
    """A lightweight descriptor of one of the supported finite groups."""

    kind: str
    p: int | None = None
    n: int | None = None
    m: int | None = None
    components: tuple["FiniteGroupHandle", ...] | None = None

    @staticmethod
    def psl2(p: int) -> "FiniteGroupHandle":
        _require_odd_prime(p)
        return FiniteGroupHandle("psl2", p=p)

    @staticmethod
    def cyclic(n: int) -> "FiniteGroupHandle":
        if n < 1:
            raise BadParameters("cyclic group needs n >= 1")
        return FiniteGroupHandle("cyclic", n=n)

    @staticmethod
    def symmetric(m: int) -> "FiniteGroupHandle":
        if m < 1:
            raise BadParameters("symmetric group needs m >= 1")
        return FiniteGroupHandle("symmetric", m=m)

    @staticmethod
    def product(components: Iterable["FiniteGroupHandle"]) -> "FiniteGroupHandle":
        comps = tuple(components)
        if not comps:
            raise BadParameters("empty product")
        return FiniteGroupHandle("product", components=comps)

    @staticmethod
    def power(base: "FiniteGroupHandle", k: int) -> "FiniteGroupHandle":
        if k < 1:
            raise BadParameters("power needs k >= 1")
        return FiniteGroupHandle.product((base,) * k)

    @property
    def order(self) -> int:
        if self.kind == "psl2":
            return self.p * (self.p * self.p - 1) // 2
        if self.kind == "cyclic":
            return self.n
        if self.kind == "symmetric":
            return math.factorial(self.m)
        if self.kind == "product":
            return math.prod(c.order for c in self.components)
        raise BadParameters(f"unknown kind {self.kind}")

    def identity(self) -> GroupElement:
        if self.kind == "psl2":
            return ProjectiveMatrix.identity(self.p)
        if self.kind == "cyclic":
            return Residue.identity(self.n)
        if self.kind == "symmetric":
            return Permutation.identity(self.m)
        return ProductElement(tuple(c.identity() for c in self.components))

    def contains(self, g: GroupElement) -> bool:
        if self.kind == "psl2":
            return isinstance(g, ProjectiveMatrix) and g.p == self.p
        if self.kind == "cyclic":
            return isinstance(g, Residue) and g.n == self.n
        if self.kind == "symmetric":
            return isinstance(g, Permutation) and g.m == self.m
        return (
            isinstance(g, ProductElement)
            and len(g.components) == len(self.components)
            and all(h.contains(x) for h, x in zip(self.components, g.components))
        )

    def describe(self) -> dict:
        """JSON-ready description, used inside certificates."""
        if self.kind == "psl2":
            return {"kind": "psl2", "p": self.p}
        if self.kind == "cyclic":
            return {"kind": "cyclic", "n": self.n}
        if self.kind == "symmetric":
            return {"kind": "symmetric", "m": self.m}
        first = self.components[0]
        if all(c == first for c in self.components):
            return {"kind": "product", "base": first.describe(), "copies": len(self.components)}
        return {"kind": "product", "factors": [c.describe() for c in self.components]}

    @staticmethod
    def from_description(data: dict) -> "FiniteGroupHandle":
        kind = data.get("kind")
        if kind == "psl2":
            return FiniteGroupHandle.psl2(int(data["p"]))
        if kind == "cyclic":
            return FiniteGroupHandle.cyclic(int(data["n"]))
        if kind == "symmetric":
            return FiniteGroupHandle.symmetric(int(data["m"]))
        if kind == "product":
            if "base" in data:
                base = FiniteGroupHandle.from_description(data["base"])
                return FiniteGroupHandle.power(base, int(data["copies"]))
            return FiniteGroupHandle.product(
                FiniteGroupHandle.from_description(f) for f in data["factors"]
            )
        raise BadParameters(f"unknown group description {data!r}")


def encode_element(g: GroupElement):
    """Flatten an element for serialization.

    Matrices become [a, b, c, d], permutations their one-line image
    list, residues a bare integer, products the list of component
    encodings.
    """
    if isinstance(g, ProjectiveMatrix):
        return [g.a, g.b, g.c, g.d]
    if isinstance(g, Permutation):
        return list(g.images)
    if isinstance(g, Residue):
        return g.value
    return [encode_element(c) for c in g.components]


def decode_element(handle: FiniteGroupHandle, data) -> GroupElement:
    if handle.kind == "psl2":
        a, b, c, d = (int(x) for x in data)
        return canonicalize(a, b, c, d, handle.p)
    if handle.kind == "cyclic":
        return Residue(int(data) % handle.n, handle.n)
    if handle.kind == "symmetric":
        return Permutation(tuple(int(x) for x in data))
    comps = tuple(decode_element(h, d) for h, d in zip(handle.components, data))
    if len(comps) != len(handle.components):
        raise BadParameters("wrong product length")
    return ProductElement(comps)


def element_order(g: GroupElement) -> int:
    """Smallest k >= 1 with g**k equal to the identity."""
    if isinstance(g, ProductElement):
        return math.lcm(*(element_order(c) for c in g.components))
    order = 1
    x = g
    while not x.is_identity():
        x = x * g
        order += 1
    return order


# ---------------------------------------------------------------------------
# Enumeration

_ENUM_CACHE: dict[FiniteGroupHandle, tuple] = {}


def enumerate_group(
    handle: FiniteGroupHandle, budget: int = DEFAULT_ENUM_BUDGET
) -> tuple[GroupElement, ...]:
    """All elements of the group, sorted by ``sort_key``."""
    if handle.order > budget:
        raise BudgetExceeded(
            f"group of order {handle.order} exceeds enumeration budget {budget}",
            used=handle.order,
            budget=budget,
        )
    cached = _ENUM_CACHE.get(handle)
    if cached is not None:
        return cached
    if handle.kind == "psl2":
        arrs = _psl2_arrays(handle.p)
        p = handle.p
        elements = tuple(
            ProjectiveMatrix(int(a), int(b), int(c), int(d), p)
            for a, b, c, d in zip(arrs["a"], arrs["b"], arrs["c"], arrs["d"])
        )
    elif handle.kind == "cyclic":
        elements = tuple(Residue(i, handle.n) for i in range(handle.n))
    elif handle.kind == "symmetric":
        elements = tuple(
            Permutation(images) for images in itertools.permutations(range(handle.m))
        )
    else:
        factors = [enumerate_group(c, budget) for c in handle.components]
        elements = tuple(ProductElement(combo) for combo in itertools.product(*factors))
    _ENUM_CACHE[handle] = elements
    return elements


_PSL2_ARRAYS_CACHE: dict[int, dict] = {}


def _canonicalize_arrays(a, b, c, d, p):
    """Vectorized sign normalization of SL2 entry arrays (already mod p)."""
    h = (p - 1) // 2
    first = np.where(a != 0, a, np.where(b != 0, b, np.where(c != 0, c, d)))
    flip = first > h
    a = np.where(flip, (p - a) % p, a)
    b = np.where(flip, (p - b) % p, b)
    c = np.where(flip, (p - c) % p, c)
    d = np.where(flip, (p - d) % p, d)
    return a, b, c, d


def _encode_entries(a, b, c, d, p):
    return ((a * p + b) * p + c) * p + d


def _psl2_arrays(p: int) -> dict:
    """Canonical PSL2(F_p) entry arrays sorted by entry encoding.

    Returns a dict with int64 arrays ``a, b, c, d``, the sorted
    encodings ``enc``, and an ``id_of`` lookup of size p**4 mapping a
    canonical encoding to its element index (-1 elsewhere).
    """
    cached = _PSL2_ARRAYS_CACHE.get(p)
    if cached is not None:
        return cached
    _require_odd_prime(p)
    ar = np.arange(p, dtype=np.int64)
    inv_map = np.array([0] + [pow(x, p - 2, p) for x in range(1, p)], dtype=np.int64)
    # block a != 0: d is determined by the determinant
    a1 = np.repeat(ar[1:], p * p)
    b1 = np.tile(np.repeat(ar, p), p - 1)
    c1 = np.tile(ar, (p - 1) * p)
    d1 = ((1 + b1 * c1) % p) * inv_map[a1] % p
    # block a == 0: need -bc = 1, d free
    b0 = np.repeat(ar[1:], p)
    c0 = (p - inv_map[b0]) % p
    a0 = np.zeros((p - 1) * p, dtype=np.int64)
    d0 = np.tile(ar, p - 1)
    a = np.concatenate([a1, a0])
    b = np.concatenate([b1, b0])
    c = np.concatenate([c1, c0])
    d = np.concatenate([d1, d0])
    a, b, c, d = _canonicalize_arrays(a, b, c, d, p)
    enc = np.unique(_encode_entries(a, b, c, d, p))
    n = p * (p * p - 1) // 2
    assert enc.size == n, (enc.size, n)
    d = enc % p
    c = enc // p % p
    b = enc // (p * p) % p
    a = enc // (p * p * p)
    id_of = np.full(p**4, -1, dtype=np.int32)
    id_of[enc] = np.arange(n, dtype=np.int32)
    out = {"a": a, "b": b, "c": c, "d": d, "enc": enc, "id_of": id_of, "p": p}
    _PSL2_ARRAYS_CACHE[p] = out
    return out


_TRACE_ORDER_CACHE: dict[int, np.ndarray] = {}


def psl2_order_from_trace(p: int) -> np.ndarray:
    """Element order in PSL2(F_p) as a function of the trace.

    Valid for every non-central element: two non-central elements with
    the same trace up to sign are conjugate over the algebraic closure,
    hence share their order, and traces t, -t describe the same
    projective element.  The central classes (trace +-2 with order 1)
    are the callers' responsibility.  Entry t holds the order of the
    companion matrix of x**2 - t x + 1.
    """
    cached = _TRACE_ORDER_CACHE.get(p)
    if cached is not None:
        return cached
    orders = np.zeros(p, dtype=np.int32)
    for t in range(p):
        companion = canonicalize(0, p - 1, 1, t, p)
        orders[t] = element_order(companion)
    _TRACE_ORDER_CACHE[p] = orders
    return orders


# ---------------------------------------------------------------------------
# Subgroups

@dataclass(frozen=True)
class SubgroupData:
    """A fully materialized subgroup of an enumerable ambient group."""

    ambient: FiniteGroupHandle
    generators: tuple[GroupElement, ...]
    elements: frozenset
    order: int

    def contains(self, g: GroupElement) -> bool:
        return g in self.elements

    def sorted_elements(self) -> list[GroupElement]:
        return sorted(self.elements, key=element_sort_key)

    def same_elements(self, other: "SubgroupData") -> bool:
        return self.elements == other.elements


def subgroup_closure(
    generators: Iterable[GroupElement],
    handle: FiniteGroupHandle,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> SubgroupData:
    """BFS closure of a generating set under the group law.

    Positive words suffice in a finite group, so only right
    multiplication by generators is applied.
    """
    gens = tuple(generators)
    for g in gens:
        if not handle.contains(g):
            raise BadParameters(f"generator {g!r} is not in the ambient group")
    identity = handle.identity()
    elements = {identity}
    frontier = [identity]
    while frontier:
        fresh = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in elements:
                    elements.add(y)
                    fresh.append(y)
        if len(elements) > budget:
            raise BudgetExceeded(
                f"closure exceeded budget {budget}", used=len(elements), budget=budget
            )
        frontier = fresh
    return SubgroupData(handle, gens, frozenset(elements), len(elements))


def trivial_subgroup(handle: FiniteGroupHandle) -> SubgroupData:
    identity = handle.identity()
    return SubgroupData(handle, (identity,), frozenset([identity]), 1)


def normalizer(sub: SubgroupData, budget: int = DEFAULT_ENUM_BUDGET) -> SubgroupData:
    """N_G(H) = {g : g H g^-1 = H} over the full ambient enumeration.

    Conjugation by a fixed g is an automorphism, so g normalizes H as
    soon as it conjugates a generating set of H into H.
    """
    gens = sub.generators or tuple(sub.sorted_elements())
    members = []
    for g in enumerate_group(sub.ambient, budget):
        gi = g.inverse()
        if all((g * h) * gi in sub.elements for h in gens):
            members.append(g)
    return SubgroupData(sub.ambient, tuple(members), frozenset(members), len(members))


def are_conjugate_subgroups(
    h1: SubgroupData, h2: SubgroupData, budget: int = DEFAULT_ENUM_BUDGET
) -> tuple[bool, GroupElement | None]:
    """Search for g with g H1 g^-1 = H2; the witness is the smallest such g."""
    if h1.ambient != h2.ambient:
        raise BadParameters("subgroups of different ambient groups")
    if h1.order != h2.order:
        return (False, None)
    if h1.elements == h2.elements:
        return (True, h1.ambient.identity())
    gens = h1.generators or tuple(h1.sorted_elements())
    for g in enumerate_group(h1.ambient, budget):
        gi = g.inverse()
        if all((g * h) * gi in h2.elements for h in gens):
            return (True, g)
    return (False, None)


def conjugated_subgroup(sub: SubgroupData, mapping) -> SubgroupData:
    """Image of a subgroup under an automorphism given as a callable."""
    gens = tuple(mapping(g) for g in sub.generators)
    elements = frozenset(mapping(g) for g in sub.elements)
    return SubgroupData(sub.ambient, gens, elements, len(elements))


def nonsquare(p: int) -> FpScalar:
    """Smallest quadratic non-residue mod p."""
    _require_odd_prime(p)
    squares = {(x * x) % p for x in range(1, p)}
    for e in range(2, p):
        if e not in squares:
            return FpScalar(e, p)
    raise BadModulus(f"no non-square mod {p}")  # unreachable for odd primes


@dataclass(frozen=True)
class AutDescriptor:
    """Aut(PSL2(F_p)) = PGL2(F_p): inner maps plus conjugation by
    d0 = diag(1, epsilon) for a fixed non-square epsilon.

    d0 is a PGL2 representative, not a group element; conjugating by it
    preserves the determinant, so the image re-canonicalizes into PSL2.
    """

    p: int
    epsilon: int
    epsilon_inv: int

    @classmethod
    def for_prime(cls, p: int) -> "AutDescriptor":
        eps = nonsquare(p).value
        return cls(p, eps, pow(eps, p - 2, p))

    def d0_entries(self) -> tuple[int, int, int, int]:
        return (1, 0, 0, self.epsilon)

    def apply(self, mat: ProjectiveMatrix) -> ProjectiveMatrix:
        """Conjugation by d0: (a, b, c, d) -> (a, b/eps, c*eps, d)."""
        p = self.p
        return canonicalize(
            mat.a, mat.b * self.epsilon_inv % p, mat.c * self.epsilon % p, mat.d, p
        )


# ---------------------------------------------------------------------------
# Dense tables

class GroupTable:
    """Dense multiplication and inversion tables over the canonical
    element numbering (index order = ``sort_key`` order)."""

    def __init__(self, handle, elements, mul, inv, identity_id):
        self.handle = handle
        self.elements = elements
        self.mul = mul
        self.inv = inv
        self.identity_id = identity_id
        self._index = {g: i for i, g in enumerate(elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    def id_of(self, g: GroupElement) -> int:
        return self._index[g]

    def element(self, i: int) -> GroupElement:
        return self.elements[int(i)]


_TABLE_CACHE: dict[FiniteGroupHandle, GroupTable] = {}


def group_table(handle: FiniteGroupHandle, limit: int = TABLE_LIMIT) -> GroupTable:
    """Build (or fetch) the dense tables for an enumerable group."""
    cached = _TABLE_CACHE.get(handle)
    if cached is not None:
        return cached
    n = handle.order
    if n > limit:
        raise BudgetExceeded(
            f"group of order {n} exceeds table limit {limit}", used=n, budget=limit
        )
    elements = enumerate_group(handle)
    if handle.kind == "psl2":
        table = _psl2_table(handle, elements)
    elif handle.kind == "cyclic":
        r = np.arange(n, dtype=np.int32)
        mul = (np.add.outer(r, r) % n).astype(np.int32)
        inv = ((n - r) % n).astype(np.int32)
        table = GroupTable(handle, elements, mul, inv, 0)
    else:
        index = {g: i for i, g in enumerate(elements)}
        mul = np.empty((n, n), dtype=np.int32)
        inv = np.empty(n, dtype=np.int32)
        for i, x in enumerate(elements):
            inv[i] = index[x.inverse()]
            for j, y in enumerate(elements):
                mul[i, j] = index[x * y]
        table = GroupTable(handle, elements, mul, inv, index[handle.identity()])
    _TABLE_CACHE[handle] = table
    return table


def _psl2_table(handle: FiniteGroupHandle, elements) -> GroupTable:
    p = handle.p
    arrs = _psl2_arrays(p)
    a, b, c, d = arrs["a"], arrs["b"], arrs["c"], arrs["d"]
    id_of = arrs["id_of"]
    n = a.size
    mul = np.empty((n, n), dtype=np.int32)
    for i in range(n):
        ai, bi, ci, di = int(a[i]), int(b[i]), int(c[i]), int(d[i])
        ra = (ai * a + bi * c) % p
        rb = (ai * b + bi * d) % p
        rc = (ci * a + di * c) % p
        rd = (ci * b + di * d) % p
        ra, rb, rc, rd = _canonicalize_arrays(ra, rb, rc, rd, p)
        mul[i] = id_of[_encode_entries(ra, rb, rc, rd, p)]
    ia, ib, ic, id_ = _canonicalize_arrays(d, (p - b) % p, (p - c) % p, a, p)
    inv = id_of[_encode_entries(ia, ib, ic, id_, p)].astype(np.int32)
    identity_id = int(id_of[_encode_entries(np.int64(1), np.int64(0), np.int64(0), np.int64(1), p)])
    return GroupTable(handle, elements, mul, inv, identity_id)


def closure_ids(table: GroupTable, gen_ids: Sequence[int], maxsize: int | None = None) -> set[int]:
    """Subgroup closure over table indices; cheap inner loop for searches."""
    mul = table.mul
    elements = {table.identity_id}
    frontier = [table.identity_id]
    cap = maxsize if maxsize is not None else table.order
    while frontier:
        fresh = []
        for x in frontier:
            row = mul[x]
            for g in gen_ids:
                y = int(row[g])
                if y not in elements:
                    elements.add(y)
                    fresh.append(y)
        if len(elements) > cap:
            raise BudgetExceeded("closure exceeded cap", used=len(elements), budget=cap)
        frontier = fresh
    return elements
