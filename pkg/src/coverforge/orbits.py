"""Orbit of a representation tuple under the automorphisms of the free
fundamental group, and its quotient by target-group automorphisms.

Since a punctured surface has free fundamental group, the automorphism
action by precomposition is realized as the elementary Nielsen moves on
the r-tuple of generator images: swap adjacent entries, invert the first
entry, multiply the first entry by the second (or its inverse).  Each
move acts as a finite-order bijection on the finite set of tuples, so
closing under the listed moves also closes under their inverses and the
BFS closure is the full orbit of the generated action.

Tuples are encoded as mixed-radix integers over table indices (most
significant digit first, so numeric order on encodings equals
lexicographic order on tuples under the canonical element ordering).
The BFS and the class partition are vectorized when the encoding fits
in 63 bits; a plain-set fallback handles larger ranks over tiny groups.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParameters, BudgetExceeded
from .groups import (
    DEFAULT_ENUM_BUDGET,
    AutDescriptor,
    FiniteGroupHandle,
    GroupElement,
    GroupTable,
    ProductElement,
    closure_ids,
    encode_element,
    group_table,
    _canonicalize_arrays,
    _encode_entries,
    _psl2_arrays,
)
from .surfaces import RepTuple, SurfaceSignature

DEFAULT_ORBIT_BUDGET = 20_000_000
_ENCODABLE = 2**62
_CHUNK = 1_000_000


@dataclass(frozen=True)
class NielsenMove:
    """One elementary move on r-tuples (0-based positions).

    swap:         exchange entries i and j
    invert:       g_i -> g_i^-1
    multiply:     g_i -> g_i * g_j
    multiply_inv: g_i -> g_i * g_j^-1
    """

    kind: str
    i: int
    j: int | None = None


def nielsen_generators(r: int) -> tuple[NielsenMove, ...]:
    if r < 2:
        raise BadParameters(f"need rank >= 2, got {r}")
    moves = [NielsenMove("swap", i, i + 1) for i in range(r - 1)]
    moves.append(NielsenMove("invert", 0))
    moves.append(NielsenMove("multiply", 0, 1))
    moves.append(NielsenMove("multiply_inv", 0, 1))
    return tuple(moves)


@dataclass
class OrbitClosure:
    """The completed BFS closure of one starting tuple."""

    table: GroupTable
    rank: int
    start_ids: tuple[int, ...]
    encoded: np.ndarray | None  # sorted int64 encodings (vectorized path)
    tuple_states: tuple[tuple[int, ...], ...] | None  # sorted (fallback path)
    levels: int
    expansions: int
    budget: int

    @property
    def size(self) -> int:
        return len(self.encoded) if self.encoded is not None else len(self.tuple_states)

    def powers(self) -> list[int]:
        n = self.table.order
        return [n ** (self.rank - 1 - j) for j in range(self.rank)]

    def decode(self, state: int) -> tuple[int, ...]:
        n = self.table.order
        digits = []
        for _ in range(self.rank):
            digits.append(int(state % n))
            state //= n
        return tuple(reversed(digits))

    def encode(self, ids) -> int:
        n = self.table.order
        state = 0
        for d in ids:
            state = state * n + int(d)
        return state

    def id_tuples(self) -> list[tuple[int, ...]]:
        """All states as id tuples, in lexicographic order."""
        if self.tuple_states is not None:
            return list(self.tuple_states)
        return [self.decode(int(s)) for s in self.encoded]

    def element_tuples(self) -> list[tuple[GroupElement, ...]]:
        el = self.table.elements
        return [tuple(el[i] for i in ids) for ids in self.id_tuples()]

    def contains_ids(self, ids: tuple[int, ...]) -> bool:
        if self.tuple_states is not None:
            return ids in self._tuple_set()
        state = self.encode(ids)
        pos = int(np.searchsorted(self.encoded, state))
        return pos < self.encoded.size and int(self.encoded[pos]) == state

    def _tuple_set(self):
        cached = getattr(self, "_tuple_set_cache", None)
        if cached is None:
            cached = frozenset(self.tuple_states)
            object.__setattr__(self, "_tuple_set_cache", cached)
        return cached


def _apply_move_ids(ids: tuple[int, ...], move: NielsenMove, table: GroupTable) -> tuple[int, ...]:
    out = list(ids)
    if move.kind == "swap":
        out[move.i], out[move.j] = out[move.j], out[move.i]
    elif move.kind == "invert":
        out[move.i] = int(table.inv[out[move.i]])
    elif move.kind == "multiply":
        out[move.i] = int(table.mul[out[move.i], out[move.j]])
    else:
        out[move.i] = int(table.mul[out[move.i], int(table.inv[out[move.j]])])
    return tuple(out)


def _apply_move_encoded(states, move, table, powers, rank):
    n = table.order
    digits = [(states // powers[j]) % n for j in range(rank)]
    if move.kind == "swap":
        digits[move.i], digits[move.j] = digits[move.j], digits[move.i]
    elif move.kind == "invert":
        digits[move.i] = table.inv[digits[move.i]].astype(np.int64)
    elif move.kind == "multiply":
        digits[move.i] = table.mul[digits[move.i], digits[move.j]].astype(np.int64)
    else:
        inv_j = table.inv[digits[move.j]].astype(np.int64)
        digits[move.i] = table.mul[digits[move.i], inv_j].astype(np.int64)
    out = np.zeros_like(states)
    for j in range(rank):
        out += digits[j] * powers[j]
    return out


def orbit_closure(
    rep: RepTuple, budget: int = DEFAULT_ORBIT_BUDGET, table: GroupTable | None = None
) -> OrbitClosure:
    """BFS closure of the image tuple under all Nielsen moves."""
    if budget < 1:
        raise BadParameters("orbit budget must be positive")
    if table is None:
        table = group_table(rep.target)
    rank = rep.signature.free_rank
    moves = nielsen_generators(rank)
    start = tuple(table.id_of(g) for g in rep.images)
    if table.order**rank < _ENCODABLE:
        return _orbit_vectorized(table, rank, start, moves, budget)
    return _orbit_python(table, rank, start, moves, budget)


def _orbit_vectorized(table, rank, start, moves, budget) -> OrbitClosure:
    n = table.order
    powers_list = [n ** (rank - 1 - j) for j in range(rank)]
    powers = np.array(powers_list, dtype=np.int64)
    start_state = int(sum(s * p for s, p in zip(start, powers_list)))
    visited = np.array([start_state], dtype=np.int64)
    frontier = visited.copy()
    levels = 0
    expansions = 0
    while frontier.size:
        levels += 1
        new = np.empty(0, dtype=np.int64)
        for lo in range(0, frontier.size, _CHUNK):
            chunk = frontier[lo : lo + _CHUNK]
            for move in moves:
                cand = np.unique(_apply_move_encoded(chunk, move, table, powers, rank))
                expansions += int(chunk.size)
                pos = np.searchsorted(visited, cand)
                mask = (pos >= visited.size) | (visited[np.minimum(pos, visited.size - 1)] != cand)
                cand = cand[mask]
                if cand.size:
                    if new.size:
                        merged = np.union1d(new, cand)
                    else:
                        merged = cand
                    new = merged
                if visited.size + new.size > budget:
                    raise BudgetExceeded(
                        "orbit closure exceeded state budget",
                        used=int(visited.size + new.size),
                        budget=budget,
                    )
        if new.size:
            visited = np.sort(np.concatenate([visited, new]))
        frontier = new
    return OrbitClosure(
        table=table,
        rank=rank,
        start_ids=start,
        encoded=visited,
        tuple_states=None,
        levels=levels,
        expansions=expansions,
        budget=budget,
    )


def _orbit_python(table, rank, start, moves, budget) -> OrbitClosure:
    visited = {start}
    frontier = [start]
    levels = 0
    expansions = 0
    while frontier:
        levels += 1
        fresh = []
        for ids in frontier:
            for move in moves:
                expansions += 1
                out = _apply_move_ids(ids, move, table)
                if out not in visited:
                    visited.add(out)
                    fresh.append(out)
            if len(visited) > budget:
                raise BudgetExceeded(
                    "orbit closure exceeded state budget", used=len(visited), budget=budget
                )
        frontier = fresh
    return OrbitClosure(
        table=table,
        rank=rank,
        start_ids=start,
        encoded=None,
        tuple_states=tuple(sorted(visited)),
        levels=levels,
        expansions=expansions,
        budget=budget,
    )


def verify_characteristic_closure(orbit: OrbitClosure) -> bool:
    """Every Nielsen move maps every orbit member back into the orbit.

    This is the finite-data certificate that the intersection of the
    kernels over the orbit is invariant under all free-group
    automorphisms.
    """
    moves = nielsen_generators(orbit.rank)
    if orbit.encoded is not None:
        states = orbit.encoded
        powers = np.array(orbit.powers(), dtype=np.int64)
        for move in moves:
            image = np.sort(_apply_move_encoded(states, move, orbit.table, powers, orbit.rank))
            if image.size != states.size or not np.array_equal(np.unique(image), states):
                return False
        return True
    state_set = orbit._tuple_set()
    for ids in orbit.tuple_states:
        for move in moves:
            if _apply_move_ids(ids, move, orbit.table) not in state_set:
                return False
    return True


# ---------------------------------------------------------------------------
# Target-group automorphisms

def automorphism_perms(table: GroupTable) -> np.ndarray:
    """All automorphisms of the (base) target group as permutation rows
    over element indices; rows are deduplicated and sorted."""
    handle = table.handle
    n = table.order
    if handle.kind == "psl2":
        inner = _inner_perms(table)
        d0 = _d0_perm(handle.p)
        with_d0 = inner[:, d0]
        rows = np.vstack([inner, with_d0])
    elif handle.kind == "cyclic":
        ids = np.arange(n, dtype=np.int64)
        units = [u for u in range(1, handle.n) if math.gcd(u, handle.n) == 1] or [0]
        rows = np.vstack([(u * ids) % handle.n for u in units]).astype(np.int32)
    elif handle.kind == "symmetric":
        if handle.m == 6:
            raise BadParameters("Sym(6) has outer automorphisms; not supported")
        rows = _inner_perms(table)
    else:
        raise BadParameters("automorphism enumeration is only for base groups")
    return np.unique(rows, axis=0)


def _inner_perms(table: GroupTable) -> np.ndarray:
    n = table.order
    rows = np.empty((n, n), dtype=np.int32)
    for gid in range(n):
        ginv = int(table.inv[gid])
        rows[gid] = table.mul[gid, table.mul[:, ginv]]
    return rows


def _d0_perm(p: int) -> np.ndarray:
    arrs = _psl2_arrays(p)
    aut = AutDescriptor.for_prime(p)
    a, b, c, d = arrs["a"], arrs["b"], arrs["c"], arrs["d"]
    nb = b * aut.epsilon_inv % p
    nc = c * aut.epsilon % p
    ca, cb, cc, cd = _canonicalize_arrays(a, nb, nc, d, p)
    return arrs["id_of"][_encode_entries(ca, cb, cc, cd, p)].astype(np.int64)


@dataclass
class OrbitResult:
    """The orbit partitioned into target-automorphism classes.

    class_reps holds the starting tuple first (for its own class), then
    the lexicographically smallest member of each remaining class in
    increasing order.
    """

    table: GroupTable
    rank: int
    orbit_size: int
    k: int
    class_rep_ids: tuple[tuple[int, ...], ...]
    class_sizes: tuple[int, ...]
    budget_used: dict

    def class_reps(self) -> list[tuple[GroupElement, ...]]:
        el = self.table.elements
        return [tuple(el[i] for i in ids) for ids in self.class_rep_ids]

    def class_rep_tuples(self, signature: SurfaceSignature) -> list[RepTuple]:
        return [
            RepTuple(signature, self.table.handle, images) for images in self.class_reps()
        ]

    def class_reps_digest(self) -> str:
        payload = json.dumps(
            [[encode_element(g) for g in images] for images in self.class_reps()],
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()


def aut_classes(orbit: OrbitClosure) -> OrbitResult:
    """Partition the orbit by postcomposition with Aut(target).

    Scanning states in increasing encoded order means the first
    unclassified state of each class is its lexicographic minimum.
    """
    perms = automorphism_perms(orbit.table).astype(np.int64)
    if orbit.encoded is not None:
        return _aut_classes_vectorized(orbit, perms)
    return _aut_classes_python(orbit, perms)


def _aut_classes_vectorized(orbit: OrbitClosure, perms: np.ndarray) -> OrbitResult:
    states = orbit.encoded
    size = states.size
    powers = np.array(orbit.powers(), dtype=np.int64)
    classified = np.zeros(size, dtype=bool)
    start_state = orbit.encode(orbit.start_ids)
    start_pos = int(np.searchsorted(states, start_state))
    class_mins: list[int] = []
    class_sizes: list[int] = []
    start_class = -1
    for pos in range(size):
        if classified[pos]:
            continue
        digits = np.array(orbit.decode(int(states[pos])), dtype=np.int64)
        encs = np.unique(perms[:, digits] @ powers)
        where = np.searchsorted(states, encs)
        where_clipped = np.minimum(where, size - 1)
        present = states[where_clipped] == encs
        members = where_clipped[present]
        classified[members] = True
        if start_class < 0 and classified[start_pos]:
            start_class = len(class_mins)
        class_mins.append(int(states[pos]))
        class_sizes.append(int(members.size))
    if start_class < 0:
        raise AssertionError("starting state must belong to some class")
    rep_ids = [orbit.decode(m) for m in class_mins]
    order = [start_class] + [i for i in range(len(rep_ids)) if i != start_class]
    reps = [rep_ids[i] for i in order]
    reps[0] = orbit.start_ids  # the starting class reports the starting tuple itself
    sizes = [class_sizes[i] for i in order]
    return OrbitResult(
        table=orbit.table,
        rank=orbit.rank,
        orbit_size=int(size),
        k=len(reps),
        class_rep_ids=tuple(tuple(int(x) for x in ids) for ids in reps),
        class_sizes=tuple(sizes),
        budget_used={"orbit_states": int(size), "orbit_levels": orbit.levels,
                     "orbit_expansions": orbit.expansions},
    )


def _aut_classes_python(orbit: OrbitClosure, perms: np.ndarray) -> OrbitResult:
    states = list(orbit.tuple_states)
    state_set = orbit._tuple_set()
    classified: set[tuple[int, ...]] = set()
    class_reps: list[tuple[int, ...]] = []
    class_sizes: list[int] = []
    start_class = -1
    for ids in states:
        if ids in classified:
            continue
        members = {tuple(int(perm[i]) for i in ids) for perm in perms} & state_set
        classified |= members
        if orbit.start_ids in members:
            start_class = len(class_reps)
        class_reps.append(min(members))
        class_sizes.append(len(members))
    order = [start_class] + [i for i in range(len(class_reps)) if i != start_class]
    reps = [class_reps[i] for i in order]
    reps[0] = orbit.start_ids
    sizes = [class_sizes[i] for i in order]
    return OrbitResult(
        table=orbit.table,
        rank=orbit.rank,
        orbit_size=len(states),
        k=len(reps),
        class_rep_ids=tuple(reps),
        class_sizes=tuple(sizes),
        budget_used={"orbit_states": len(states), "orbit_levels": orbit.levels,
                     "orbit_expansions": orbit.expansions},
    )


def canonical_class_key(table: GroupTable, ids: tuple[int, ...], perms: np.ndarray) -> int:
    """Minimum encoding over the full automorphism class of a tuple; a
    complete invariant for postcomposition equivalence."""
    n = table.order
    powers = np.array([n ** (len(ids) - 1 - j) for j in range(len(ids))], dtype=np.int64)
    digits = np.array(ids, dtype=np.int64)
    return int((perms[:, digits] @ powers).min())


def assemble_product_rep(result: OrbitResult, signature: SurfaceSignature) -> RepTuple:
    """The componentwise product representation over the class reps."""
    reps = result.class_reps()
    target = FiniteGroupHandle.power(result.table.handle, result.k)
    images = tuple(
        ProductElement(tuple(reps[j][pos] for j in range(result.k)))
        for pos in range(result.rank)
    )
    return RepTuple(signature, target, images)


@dataclass(frozen=True)
class HallReport:
    ok: bool
    mode: str  # "direct" | "hypothesis-only"
    each_surjective: bool
    pairwise_inequivalent: bool
    direct_order: int | None


def verify_hall_surjectivity(
    result: OrbitResult,
    direct_cap: int = 10_000_000,
    closure_budget: int = DEFAULT_ENUM_BUDGET,
) -> HallReport:
    """Surjectivity of the product representation.

    Hypothesis mode checks what the product lemma needs: every class rep
    surjects onto the base group and no two class reps are related by a
    target automorphism.  Direct mode additionally closes the product
    tuples inside the full product group when its order fits the cap.
    """
    table = result.table
    base_order = table.order
    each = True
    for ids in result.class_rep_ids:
        if len(closure_ids(table, [int(i) for i in ids])) != base_order:
            each = False
            break
    perms = automorphism_perms(table).astype(np.int64)
    keys = [canonical_class_key(table, ids, perms) for ids in result.class_rep_ids]
    pairwise = len(set(keys)) == len(keys)
    product_order = base_order**result.k
    direct_order = None
    mode = "hypothesis-only"
    if product_order <= direct_cap:
        mode = "direct"
        direct_order = _product_closure_order(result, min(closure_budget, product_order))
    ok = each and pairwise and (direct_order is None or direct_order == product_order)
    return HallReport(
        ok=ok,
        mode=mode,
        each_surjective=each,
        pairwise_inequivalent=pairwise,
        direct_order=direct_order,
    )


def _product_closure_order(result: OrbitResult, cap: int) -> int:
    mul = result.table.mul
    identity = (result.table.identity_id,) * result.k
    # transpose: one k-component product tuple per free generator
    gens = [tuple(int(x) for x in ids) for ids in zip(*result.class_rep_ids)]
    elements = {identity}
    frontier = [identity]
    while frontier:
        fresh = []
        for x in frontier:
            for g in gens:
                y = tuple(int(mul[a, b]) for a, b in zip(x, g))
                if y not in elements:
                    elements.add(y)
                    fresh.append(y)
        if len(elements) > cap:
            raise BudgetExceeded("product closure exceeded cap", used=len(elements), budget=cap)
        frontier = fresh
    return len(elements)
