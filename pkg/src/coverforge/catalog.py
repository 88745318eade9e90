"""The explicit representation families and subgroup choices.

Three PSL2 families (split by surface topology) feed the irregular-cover
pipeline, and two small families (cyclic and Sym(3) targets) feed the
characteristic-cover pipeline.  Builders return the representation, the
chosen subgroup H0 of the target when the family uses one, and every
searched constant, so a certificate can replay the construction without
re-searching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BadParameters, SearchExhausted
from .groups import (
    DEFAULT_ENUM_BUDGET,
    AutDescriptor,
    FiniteGroupHandle,
    FpScalar,
    GroupElement,
    Permutation,
    ProjectiveMatrix,
    Residue,
    SubgroupData,
    are_conjugate_subgroups,
    canonicalize,
    closure_ids,
    conjugated_subgroup,
    element_order,
    encode_element,
    enumerate_group,
    group_table,
    is_prime,
    nonsquare,
    normalizer,
    psl2_order_from_trace,
    subgroup_closure,
    _psl2_arrays,
)
from .surfaces import PeripheralProfile, RepTuple, SurfaceSignature


@dataclass(frozen=True)
class CatalogBuild:
    """One constructed family member plus its provenance."""

    tag: str
    signature: SurfaceSignature
    p: int | None
    rep: RepTuple
    h0: SubgroupData | None
    h0_label: str | None
    claimed_cn: GroupElement | None
    constants: dict
    expected_orders: tuple[int, ...] | None
    mode: str


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the subgroup conditions needed by the irregular pipeline.

    aut_eq_inn is None when the target is not of PSL2 kind; the
    characteristic pipeline never needs that condition, so it is
    reported as not applicable and excluded from the conjunction.
    """

    self_normalizing: bool
    aut_eq_inn: bool | None
    aut_witness: GroupElement | None
    d0_stabilizes_h0: bool | None
    delta_ge_2: bool
    coprimality: tuple[tuple[int, int, int, bool], ...]

    @property
    def all_pass(self) -> bool:
        return (
            self.self_normalizing
            and self.aut_eq_inn is not False
            and self.delta_ge_2
            and all(row[3] for row in self.coprimality)
        )

    def to_json_dict(self) -> dict:
        return {
            "self_normalizing": self.self_normalizing,
            "aut_eq_inn": self.aut_eq_inn,
            "aut_witness": None if self.aut_witness is None else encode_element(self.aut_witness),
            "d0_stabilizes_h0": self.d0_stabilizes_h0,
            "delta_ge_2": self.delta_ge_2,
            "coprimality": [list(row) for row in self.coprimality],
            "all_pass": self.all_pass,
        }


def _require_valid_prime(p: int, minimum: int = 5) -> None:
    if not is_prime(p) or p < minimum:
        raise BadParameters(f"need a prime p >= {minimum}, got {p}")


def smallest_primitive_root(p: int) -> int:
    for r in range(2, p):
        seen = 1
        x = r
        while x != 1:
            x = x * r % p
            seen += 1
        if seen == p - 1:
            return r
    raise BadParameters(f"no primitive root mod {p}")


def diagonal_torus(p: int) -> tuple[SubgroupData, ProjectiveMatrix, int]:
    """The diagonal subgroup of PSL2(F_p), its generator, and the root used."""
    root = smallest_primitive_root(p)
    gen = canonicalize(root, 0, 0, pow(root, p - 2, p), p)
    handle = FiniteGroupHandle.psl2(p)
    sub = subgroup_closure((gen,), handle)
    return sub, gen, root


def borel_subgroup(p: int) -> SubgroupData:
    """Upper triangular matrices in PSL2(F_p); order p(p-1)/2."""
    handle = FiniteGroupHandle.psl2(p)
    _, torus_gen, _ = diagonal_torus(p)
    unipotent = canonicalize(1, 1, 0, 1, p)
    sub = subgroup_closure((unipotent, torus_gen), handle)
    assert sub.order == p * (p - 1) // 2
    return sub


def smallest_element_of_order(p: int, order: int) -> ProjectiveMatrix:
    for g in enumerate_group(FiniteGroupHandle.psl2(p)):
        if element_order(g) == order:
            return g
    raise SearchExhausted(f"no element of order {order} in PSL2(F_{p})")


def dihedral_subgroup(p: int, order: int) -> SubgroupData:
    """A dihedral subgroup of PSL2(F_p) of order p-1 or p+1.

    Built as the closure of the smallest rotation of order `order/2`
    and the smallest involution inverting it.
    """
    if order not in (p - 1, p + 1) or order % 2:
        raise BadParameters(f"dihedral order must be p-1 or p+1 and even, got {order}")
    half = order // 2
    rotation = smallest_element_of_order(p, half)
    rot_inv = rotation.inverse()
    for j in enumerate_group(FiniteGroupHandle.psl2(p)):
        if element_order(j) == 2 and (j * rotation) * j.inverse() == rot_inv:
            sub = subgroup_closure((rotation, j), FiniteGroupHandle.psl2(p))
            if sub.order == order:
                return sub
    raise SearchExhausted(f"no dihedral subgroup of order {order} found in PSL2(F_{p})")


# ---------------------------------------------------------------------------
# Quadratic-extension scratch arithmetic for selecting t

def _ext_mul(x, y, p, trace_coeff):
    """Multiply u + v*alpha in F_p[alpha]/(alpha^2 - trace_coeff*alpha + 1)."""
    u1, v1 = x
    u2, v2 = y
    u = (u1 * u2 - v1 * v2) % p
    v = (u1 * v2 + u2 * v1 + v1 * v2 * trace_coeff) % p
    return (u, v)


def extension_root_order(p: int, t: int) -> int | None:
    """Order of a root of x^2 - (2+t)x + 1 in F_{p^2}, or None if the
    polynomial is reducible over F_p (including a double root)."""
    t = t % p
    trace_coeff = (2 + t) % p
    disc = (trace_coeff * trace_coeff - 4) % p
    if disc == 0 or pow(disc, (p - 1) // 2, p) == 1:
        return None
    # the root alpha = (0, 1) has norm 1, so its order divides p + 1
    one = (1, 0)
    alpha = (0, 1)
    for k in sorted(_divisors(p + 1)):
        if _ext_pow(alpha, k, p, trace_coeff) == one:
            return k
    raise AssertionError("norm-one root must have order dividing p+1")


def _ext_pow(x, k, p, trace_coeff):
    result = (1, 0)
    base = x
    while k:
        if k & 1:
            result = _ext_mul(result, base, p, trace_coeff)
        base = _ext_mul(base, base, p, trace_coeff)
        k >>= 1
    return result


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


def select_t(p: int) -> FpScalar:
    """Smallest t in [1, p-1] making x^2 - (2+t)x + 1 irreducible with
    roots of multiplicative order exactly p + 1."""
    _require_valid_prime(p)
    if p % 4 != 1:
        raise BadParameters(f"need p = 1 mod 4, got {p}")
    for t in range(1, p):
        if extension_root_order(p, t) == p + 1:
            return FpScalar(t, p)
    raise SearchExhausted(f"no admissible t mod {p}")


def validate_t(p: int, t: int, require_minimal: bool = True) -> bool:
    if not 1 <= t < p or extension_root_order(p, t) != p + 1:
        return False
    if require_minimal:
        return all(extension_root_order(p, s) != p + 1 for s in range(1, t))
    return True


# ---------------------------------------------------------------------------
# Commutator pair search (once-punctured family)

def search_commutator_pair(
    p: int, pair_budget: int | None = None
) -> tuple[ProjectiveMatrix, ProjectiveMatrix, ProjectiveMatrix]:
    """Lexicographically first (A, B) generating PSL2(F_p) with
    commutator [A, B] of order (p+1)/2; returns (A, B, [A, B]).

    The scan is exact but prunes with a trace-to-order lookup: the order
    of a non-central element of PSL2(F_p) depends only on its trace up
    to sign, and the target order (p+1)/2 is never 1 or p, so the
    central/parabolic ambiguity at trace +-2 cannot produce a false
    positive.  Each candidate is still confirmed with element_order.
    """
    _require_valid_prime(p)
    handle = FiniteGroupHandle.psl2(p)
    elements = enumerate_group(handle)
    table = None
    arrs = _psl2_arrays(p)
    a, b, c, d = arrs["a"], arrs["b"], arrs["c"], arrs["d"]
    orders_by_trace = psl2_order_from_trace(p)
    target = (p + 1) // 2
    n = len(elements)
    scanned = 0
    # entry arrays of all inverses (sign normalization is irrelevant for traces)
    ia, ib, ic, id_ = d, (p - b) % p, (p - c) % p, a
    for i in range(n):
        scanned += n
        if pair_budget is not None and scanned > pair_budget:
            raise SearchExhausted(
                f"commutator search budget {pair_budget} exhausted at row {i}"
            )
        a1, b1, c1, d1 = int(a[i]), int(b[i]), int(c[i]), int(d[i])
        # M = A_i * B for every B
        ma = (a1 * a + b1 * c) % p
        mb = (a1 * b + b1 * d) % p
        mc = (c1 * a + d1 * c) % p
        md = (c1 * b + d1 * d) % p
        # M2 = M * A_i^-1 with A_i^-1 = (d1, -b1, -c1, a1)
        nb1, nc1 = (p - b1) % p, (p - c1) % p
        m2a = (ma * d1 + mb * nc1) % p
        m2b = (ma * nb1 + mb * a1) % p
        m2c = (mc * d1 + md * nc1) % p
        m2d = (mc * nb1 + md * a1) % p
        # trace of M2 * B^-1, entrywise over all B
        tr = (m2a * ia + m2b * ic + m2c * ib + m2d * id_) % p
        candidates = (orders_by_trace[tr] == target).nonzero()[0]
        if candidates.size == 0:
            continue
        if table is None:
            table = group_table(handle)
        for j in candidates:
            a_el = elements[i]
            b_el = elements[int(j)]
            c_el = (a_el * b_el) * (a_el.inverse() * b_el.inverse())
            if element_order(c_el) != target:
                continue
            gen_ids = (table.id_of(a_el), table.id_of(b_el))
            if len(closure_ids(table, gen_ids)) == table.order:
                return (a_el, b_el, c_el)
    raise SearchExhausted(
        f"no generating pair with commutator order {(p + 1) // 2} in PSL2(F_{p})"
    )


def validate_commutator_pair(
    p: int, a_el: ProjectiveMatrix, b_el: ProjectiveMatrix, c_el: ProjectiveMatrix
) -> bool:
    """Defining properties only (not minimality): replayed by verification."""
    handle = FiniteGroupHandle.psl2(p)
    if not (handle.contains(a_el) and handle.contains(b_el) and handle.contains(c_el)):
        return False
    if (a_el * b_el) * (a_el.inverse() * b_el.inverse()) != c_el:
        return False
    if element_order(c_el) != (p + 1) // 2:
        return False
    closure = subgroup_closure((a_el, b_el), handle)
    return closure.order == handle.order


# ---------------------------------------------------------------------------
# Builders

def build_generic(p: int, g: int, n: int) -> CatalogBuild:
    """g >= 1 handles and n >= 2 punctures: both a_1, b_1 go to the upper
    unipotent, every c_i(i < n) to the lower unipotent, and the relation
    forces c_n to a lower unipotent as well."""
    _require_valid_prime(p)
    if g < 1 or n < 2:
        raise BadParameters("generic family needs g >= 1 and n >= 2")
    if p < n:
        raise BadParameters(f"generic family needs p >= n, got p={p}, n={n}")
    sig = SurfaceSignature(g, n)
    handle = FiniteGroupHandle.psl2(p)
    upper = canonicalize(1, 1, 0, 1, p)
    lower = canonicalize(1, 0, 1, 1, p)
    identity = handle.identity()
    images = [upper, upper] + [identity] * (2 * (g - 1)) + [lower] * (n - 1)
    rep = RepTuple(sig, handle, tuple(images))
    claimed = canonicalize(1, 0, p - n + 1, 1, p)
    a0, a0_gen, root = diagonal_torus(p)
    h0 = normalizer(a0)
    constants = {
        "epsilon": nonsquare(p).value,
        "primitive_root": root,
        "a0_generator": encode_element(a0_gen),
    }
    return CatalogBuild(
        tag="generic",
        signature=sig,
        p=p,
        rep=rep,
        h0=h0,
        h0_label="diagonal-normalizer",
        claimed_cn=claimed,
        constants=constants,
        expected_orders=(p,) * n,
        mode="primary",
    )


def build_once_punctured(
    p: int,
    g: int,
    pair: tuple[ProjectiveMatrix, ProjectiveMatrix, ProjectiveMatrix] | None = None,
) -> CatalogBuild:
    """g >= 1 and a single puncture: a_1, b_1 go to a generating pair
    whose commutator has order (p+1)/2, so the derived c_1 does too."""
    if not is_prime(p) or p < 13:
        raise BadParameters(f"once-punctured family needs a prime p >= 13, got {p}")
    if g < 1:
        raise BadParameters("once-punctured family needs g >= 1")
    sig = SurfaceSignature(g, 1)
    handle = FiniteGroupHandle.psl2(p)
    if pair is None:
        a_el, b_el, c_el = search_commutator_pair(p)
    else:
        a_el, b_el, c_el = pair
        if not validate_commutator_pair(p, a_el, b_el, c_el):
            raise BadParameters("supplied commutator pair fails its defining properties")
    identity = handle.identity()
    images = [a_el, b_el] + [identity] * (2 * (g - 1))
    rep = RepTuple(sig, handle, tuple(images))
    h0 = borel_subgroup(p)
    _, _, root = diagonal_torus(p)
    constants = {
        "epsilon": nonsquare(p).value,
        "primitive_root": root,
        "A": encode_element(a_el),
        "B": encode_element(b_el),
        "C": encode_element(c_el),
    }
    return CatalogBuild(
        tag="once_punctured",
        signature=sig,
        p=p,
        rep=rep,
        h0=h0,
        h0_label="borel",
        claimed_cn=c_el,
        constants=constants,
        expected_orders=((p + 1) // 2,),
        mode="primary",
    )


def build_genus_zero(p: int, n: int, explicit_t: int | None = None) -> CatalogBuild:
    """The n-punctured sphere: c_1 .. c_{n-2} go to a lower unipotent
    with parameter s = (n-2)^-1, c_{n-1} to an upper unipotent with
    parameter t, and the relation forces c_n.

    With the default t (roots of x^2-(2+t)x+1 of order p+1) the last
    peripheral image has order (p+1)/2 and H0 is the normalizer of the
    diagonal subgroup.  Supplying explicit_t switches to the variant
    where H0 is a dihedral subgroup of order p+1 or p-1 according to the
    reducibility of x^2-(2+t)x+1.
    """
    _require_valid_prime(p)
    if n < 3:
        raise BadParameters("genus-zero family needs n >= 3")
    if p % 4 != 1:
        raise BadParameters(f"genus-zero family needs p = 1 mod 4, got {p}")
    if p <= n - 2:
        raise BadParameters(f"genus-zero family needs p > n - 2, got p={p}, n={n}")
    sig = SurfaceSignature(0, n)
    handle = FiniteGroupHandle.psl2(p)
    s = pow(n - 2, p - 2, p)
    if explicit_t is None:
        t = select_t(p).value
        mode = "primary"
    else:
        t = explicit_t % p
        if t == 0:
            raise BadParameters("explicit t must be nonzero mod p")
        mode = "dihedral-remark"
    lower = canonicalize(1, 0, s, 1, p)
    upper_t = canonicalize(1, t, 0, 1, p)
    images = [lower] * (n - 2) + [upper_t]
    rep = RepTuple(sig, handle, tuple(images))
    claimed = canonicalize(1 + t, -t, -1, 1, p)
    _, a0_gen, root = diagonal_torus(p)
    constants: dict = {
        "epsilon": nonsquare(p).value,
        "primitive_root": root,
        "s": s,
        "t": t,
        "a0_generator": encode_element(a0_gen),
    }
    if mode == "primary":
        a0, _, _ = diagonal_torus(p)
        h0 = normalizer(a0)
        h0_label = "diagonal-normalizer"
        expected = (p,) * (n - 1) + ((p + 1) // 2,)
    else:
        reducible = extension_root_order(p, t) is None
        order = p + 1 if reducible else p - 1
        h0 = dihedral_subgroup(p, order)
        h0_label = f"dihedral-{order}"
        constants["dihedral_order"] = order
        expected = None  # orders checked dynamically for the variant
    return CatalogBuild(
        tag="genus_zero",
        signature=sig,
        p=p,
        rep=rep,
        h0=h0,
        h0_label=h0_label,
        claimed_cn=claimed,
        constants=constants,
        expected_orders=expected,
        mode=mode,
    )


def build_characteristic_cyclic(g: int, n: int) -> CatalogBuild:
    """All handles to 0, every peripheral to 1 in Z/n (n >= 2)."""
    if n < 2:
        raise BadParameters("characteristic cyclic family needs n >= 2")
    sig = SurfaceSignature(g, n)
    handle = FiniteGroupHandle.cyclic(n)
    zero = Residue(0, n)
    one = Residue(1, n)
    images = [zero] * (2 * g) + [one] * (n - 1)
    rep = RepTuple(sig, handle, tuple(images))
    return CatalogBuild(
        tag="char_cyclic",
        signature=sig,
        p=None,
        rep=rep,
        h0=None,
        h0_label=None,
        claimed_cn=one,
        constants={},
        expected_orders=(n,) * n,
        mode="characteristic",
    )


def build_characteristic_sym3(g: int) -> CatalogBuild:
    """One puncture: a_1 -> (12), b_1 -> (23); the derived peripheral is
    the 3-cycle [(12), (23)] = (123)."""
    if g < 1:
        raise BadParameters("characteristic Sym(3) family needs g >= 1")
    sig = SurfaceSignature(g, 1)
    handle = FiniteGroupHandle.symmetric(3)
    swap01 = Permutation.from_cycles(3, [(0, 1)])
    swap12 = Permutation.from_cycles(3, [(1, 2)])
    identity = handle.identity()
    images = [swap01, swap12] + [identity] * (2 * (g - 1))
    rep = RepTuple(sig, handle, tuple(images))
    claimed = Permutation.from_cycles(3, [(0, 1, 2)])
    return CatalogBuild(
        tag="char_sym3",
        signature=sig,
        p=None,
        rep=rep,
        h0=None,
        h0_label=None,
        claimed_cn=claimed,
        constants={},
        expected_orders=(3,),
        mode="characteristic",
    )


# ---------------------------------------------------------------------------
# Hypothesis verification

def verify_hypotheses(
    g0: FiniteGroupHandle,
    h0: SubgroupData,
    profile: PeripheralProfile,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> HypothesisReport:
    """Check the subgroup conditions used by the irregular pipeline:
    H0 self-normalizing, every automorphism image of H0 conjugate to H0,
    and peripheral orders >= 2 and coprime to |H0|.

    For PSL2 targets, every automorphism is inner composed with
    conjugation by d0 = diag(1, epsilon), so the second condition
    reduces to: d0 H0 d0^-1 is conjugate to H0 in the group.
    """
    norm = normalizer(h0, budget)
    self_norm = norm.elements == h0.elements
    if g0.kind == "psl2":
        aut = AutDescriptor.for_prime(g0.p)
        conjugated = conjugated_subgroup(h0, aut.apply)
        d0_stable = conjugated.elements == h0.elements
        aut_eq_inn, witness = are_conjugate_subgroups(conjugated, h0, budget)
    else:
        aut_eq_inn, witness, d0_stable = None, None, None
    coprimality = tuple(
        (order, h0.order, math.gcd(order, h0.order), math.gcd(order, h0.order) == 1)
        for order in profile.orders
    )
    return HypothesisReport(
        self_normalizing=self_norm,
        aut_eq_inn=aut_eq_inn,
        aut_witness=witness,
        d0_stabilizes_h0=d0_stable,
        delta_ge_2=all(order >= 2 for order in profile.orders),
        coprimality=coprimality,
    )
