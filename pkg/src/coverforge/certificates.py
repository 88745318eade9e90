"""Certificate construction, serialization, and independent verification.

A certificate is a canonical-JSON document (sorted keys, integers and
exact rationals only, no floats) that records the inputs, every searched
constant, the orbit summary, the hypothesis report, the cover geometry,
and a named check vector.  Construction is deterministic, so two runs
with the same configuration produce byte-identical files.

Verification re-derives every derivable field from the recorded inputs
and constants (searches are replayed from the recorded constants, not
repeated), diffs the result field by field, and additionally checks a
whole-document digest so that any single-field tampering is detected
even before the recomputation runs.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import __version__
from .catalog import (
    CatalogBuild,
    build_characteristic_cyclic,
    build_characteristic_sym3,
    build_generic,
    build_genus_zero,
    build_once_punctured,
    extension_root_order,
    validate_commutator_pair,
    validate_t,
    verify_hypotheses,
)
from .covers import (
    DEFAULT_COSET_BUDGET,
    characteristic_core,
    coset_permutation,
    coset_space,
    cycle_type,
    elevation_degree,
    genus_lower_bound,
    local_degrees_factored,
    proposition_genus_bound,
    riemann_hurwitz,
    verify_deck_trivial,
)
from .errors import BadParameters, SchemaMismatch
from .groups import (
    DEFAULT_ENUM_BUDGET,
    FiniteGroupHandle,
    decode_element,
    encode_element,
    element_sort_key,
)
from .orbits import (
    DEFAULT_ORBIT_BUDGET,
    aut_classes,
    orbit_closure,
    verify_characteristic_closure,
    verify_hall_surjectivity,
)
from .surfaces import (
    RepTuple,
    derived_last_peripheral,
    is_surjective,
    peripheral_profile,
    verify_relation,
)

SCHEMA_VERSION = "1"
DEFAULT_HALL_DIRECT_CAP = 10_000_000

CASES = ("generic", "once-punctured", "genus-zero", "char-cyclic", "char-sym3")
_CHARACTERISTIC = ("char-cyclic", "char-sym3")


@dataclass(frozen=True)
class ConstructConfig:
    case: str
    p: int | None = None
    genus: int | None = None
    punctures: int | None = None
    explicit_t: int | None = None
    single_factor: bool = False
    orbit_budget: int = DEFAULT_ORBIT_BUDGET
    coset_budget: int = DEFAULT_COSET_BUDGET
    closure_budget: int = DEFAULT_ENUM_BUDGET
    hall_direct_cap: int = DEFAULT_HALL_DIRECT_CAP

    def __post_init__(self):
        if self.case not in CASES:
            raise BadParameters(f"unknown case {self.case!r}; pick one of {CASES}")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _fraction_pair(x: Fraction) -> list[int]:
    return [x.numerator, x.denominator]


def _multiset_pairs(multiset: dict[int, int]) -> list[list[int]]:
    return [[int(length), int(count)] for length, count in sorted(multiset.items())]


def _digest_payload(cert: dict) -> str:
    body = {key: value for key, value in cert.items() if key != "certificate_digest"}
    return sha256_hex(canonical_json(body))


def attach_digest(cert: dict) -> dict:
    cert = dict(cert)
    cert["certificate_digest"] = _digest_payload(cert)
    return cert


# ---------------------------------------------------------------------------
# Case dispatch

def _build_case(config: ConstructConfig, constants: dict | None = None) -> CatalogBuild:
    """Build the configured family member; `constants` replays recorded
    searched values instead of searching."""
    case = config.case
    if case == "generic":
        _need(config, p=True, genus=True, punctures=True)
        return build_generic(config.p, config.genus, config.punctures)
    if case == "once-punctured":
        _need(config, p=True, genus=True)
        if config.punctures not in (None, 1):
            raise BadParameters("once-punctured case has exactly one puncture")
        pair = None
        if constants is not None and "A" in constants:
            handle = FiniteGroupHandle.psl2(config.p)
            pair = tuple(decode_element(handle, constants[key]) for key in ("A", "B", "C"))
        return build_once_punctured(config.p, config.genus, pair=pair)
    if case == "genus-zero":
        _need(config, p=True, punctures=True)
        if config.genus not in (None, 0):
            raise BadParameters("genus-zero case has genus 0")
        explicit = config.explicit_t
        return build_genus_zero(config.p, config.punctures, explicit_t=explicit)
    if case == "char-cyclic":
        _need(config, genus=True, punctures=True)
        return build_characteristic_cyclic(config.genus, config.punctures)
    _need(config, genus=True)
    if config.punctures not in (None, 1):
        raise BadParameters("char-sym3 case has exactly one puncture")
    return build_characteristic_sym3(config.genus)


def _need(config: ConstructConfig, p=False, genus=False, punctures=False) -> None:
    if p and config.p is None:
        raise BadParameters(f"case {config.case} needs --p")
    if genus and config.genus is None:
        raise BadParameters(f"case {config.case} needs --genus")
    if punctures and config.punctures is None:
        raise BadParameters(f"case {config.case} needs --punctures")


def _expected_orders_ok(build: CatalogBuild, profile) -> bool:
    if build.expected_orders is not None:
        return profile.orders == build.expected_orders
    # genus-zero dihedral variant: c_1 .. c_{n-1} of order p; c_n nontrivial
    # with order dividing (p-1)/2 or (p+1)/2 by the reducibility of the
    # trace polynomial
    p = build.p
    t = build.constants["t"]
    reducible = extension_root_order(p, t) is None
    half = (p - 1) // 2 if reducible else (p + 1) // 2
    body, last = profile.orders[:-1], profile.orders[-1]
    return all(o == p for o in body) and last > 1 and half % last == 0


# ---------------------------------------------------------------------------
# Pipeline

def construct(config: ConstructConfig) -> dict:
    """Run the full pipeline and return the finished certificate."""
    return attach_digest(_run_pipeline(config, constants=None))


def _run_pipeline(config: ConstructConfig, constants: dict | None) -> dict:
    build = _build_case(config, constants)
    rep = build.rep
    sig = build.signature
    profile = peripheral_profile(rep)
    checks: dict[str, bool] = {}
    checks["relation_holds"] = verify_relation(rep, build.claimed_cn)
    checks["surjective"] = is_surjective(rep, config.closure_budget)
    checks["peripheral_orders_expected"] = _expected_orders_ok(build, profile)

    cert: dict = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "coverforge", "version": __version__},
        "seed": None,
        "inputs": {
            "case": config.case,
            "p": build.p,
            "genus": sig.g,
            "punctures": sig.n,
            "flags": {
                "single_factor": config.single_factor,
                "explicit_t": config.explicit_t,
            },
        },
        "budgets": {
            "orbit": config.orbit_budget,
            "coset": config.coset_budget,
            "closure": config.closure_budget,
            "hall_direct_cap": config.hall_direct_cap,
        },
        "constants": dict(build.constants),
        "representation": {
            "target": rep.target.describe(),
            "images": {
                name: encode_element(g) for name, g in rep.images_by_name.items()
            },
            "derived_cn": encode_element(derived_last_peripheral(rep)),
            "peripheral_orders": list(profile.orders),
            "delta": profile.delta,
        },
    }

    if config.case in _CHARACTERISTIC:
        if config.single_factor:
            raise BadParameters("single-factor mode applies to the PSL2 cases only")
        _characteristic_stages(config, build, cert, checks)
    else:
        _irregular_stages(config, build, profile, cert, checks)

    checks_sorted = dict(sorted(checks.items()))
    cert["checks"] = checks_sorted
    cert["all_checks_pass"] = all(checks_sorted.values())
    return cert


def _irregular_stages(config, build, profile, cert, checks) -> None:
    rep = build.rep
    sig = build.signature
    h0 = build.h0
    hyp = verify_hypotheses(rep.target, h0, profile, config.closure_budget)
    checks["self_normalizing"] = hyp.self_normalizing
    checks["aut_eq_inn"] = bool(hyp.aut_eq_inn)
    checks["delta_ge_2"] = hyp.delta_ge_2
    checks["coprimality"] = all(row[3] for row in hyp.coprimality)
    checks["hypotheses_all_pass"] = hyp.all_pass
    cert["hypotheses"] = hyp.to_json_dict()
    cert["subgroup"] = {
        "label": build.h0_label,
        "order": h0.order,
        "index": rep.target.order // h0.order,
        "generators": [
            encode_element(g) for g in sorted(h0.generators, key=element_sort_key)
        ],
    }

    hall_mode = None
    if config.single_factor:
        k = 1
        class_reps = [rep]
        orbit_info = {
            "size": None,
            "k": 1,
            "class_reps_digest": None,
            "states_explored": None,
            "levels": None,
        }
        variant = "single-factor-diagnostic"
    else:
        orbit = orbit_closure(rep, config.orbit_budget)
        result = aut_classes(orbit)
        k = result.k
        class_reps = result.class_rep_tuples(sig)
        checks["orbit_completed"] = True
        checks["characteristic_closure"] = verify_characteristic_closure(orbit)
        hall = verify_hall_surjectivity(
            result, config.hall_direct_cap, config.closure_budget
        )
        checks["hall_surjective"] = hall.ok
        checks["class_reps_pairwise_inequivalent"] = hall.pairwise_inequivalent
        hall_mode = hall.mode
        orbit_info = {
            "size": result.orbit_size,
            "k": k,
            "class_reps_digest": result.class_reps_digest(),
            "states_explored": result.budget_used["orbit_states"],
            "levels": result.budget_used["orbit_levels"],
        }
        variant = "irregular"
    cert["orbit"] = orbit_info
    cert["variant"] = variant
    cert["budget_used"] = {"hall_mode": hall_mode}

    space = coset_space(h0, config.coset_budget)
    index = space.degree
    degree = index**k
    ramification = []
    ram_json = []
    divisible = True
    quotient_divides = True
    h_order_k = h0.order**k
    for i in range(1, sig.n + 1):
        factor_types = [
            cycle_type(coset_permutation(space, r.peripheral_images()[i - 1]))
            for r in class_reps
        ]
        multiset = local_degrees_factored(factor_types)
        d_i = elevation_degree(class_reps, i)
        delta_i = profile.orders[i - 1]
        divisible &= all(length % delta_i == 0 for length in multiset)
        quotient_divides &= all(
            d_i % length == 0 and h_order_k % (d_i // length) == 0 for length in multiset
        )
        ramification.append(multiset)
        ram_json.append(
            {"puncture": i, "elevation_order": d_i, "local_degrees": _multiset_pairs(multiset)}
        )
    chi, genus = riemann_hurwitz(degree, sig.euler_closed, ramification)
    if build.mode == "dihedral-remark":
        bound = proposition_genus_bound(index, k, sig.g, sig.n, profile.delta)
        bound_kind = "proposition"
    else:
        bound = genus_lower_bound(build.p, k, sig.g, sig.n)
        bound_kind = "theorem"
    deck = verify_deck_trivial(h0, config.closure_budget)
    checks["degree_formula"] = degree == (rep.target.order // h0.order) ** k
    checks["ramification_sums_to_degree"] = True  # enforced inside riemann_hurwitz
    checks["local_degrees_divisible_by_delta"] = divisible
    checks["elevation_quotient_divides_h_order"] = quotient_divides
    checks["chi_even"] = chi % 2 == 0
    checks["genus_nonnegative_integer"] = genus >= 0
    checks["genus_ge_bound"] = Fraction(genus) >= bound
    checks["deck_trivial"] = deck
    cert["cover"] = {
        "degree": degree,
        "index": index,
        "euler": chi,
        "genus": genus,
        "bound": _fraction_pair(bound),
        "bound_kind": bound_kind,
        "deck_trivial": deck,
        "regular": index == 1,
        "ramification": ram_json,
    }
    cert["blanket_hypothesis"] = (
        build.p >= max(sig.n, 13) and build.p % 4 == 1
    )


def _characteristic_stages(config, build, cert, checks) -> None:
    rep = build.rep
    sig = build.signature
    orbit = orbit_closure(rep, config.orbit_budget)
    result = aut_classes(orbit)
    class_reps = result.class_rep_tuples(sig)
    core = characteristic_core(class_reps, orbit, config.closure_budget)
    checks["orbit_completed"] = True
    checks["characteristic_closure"] = core.aut_invariant
    checks["peripheral_orders_ge_2"] = core.all_at_least_two
    cert["orbit"] = {
        "size": result.orbit_size,
        "k": result.k,
        "class_reps_digest": result.class_reps_digest(),
        "states_explored": result.budget_used["orbit_states"],
        "levels": result.budget_used["orbit_levels"],
    }
    cert["variant"] = "characteristic-core (orbit variant)"
    cert["budget_used"] = {"hall_mode": None}
    cover: dict = {
        "peripheral_orders": list(core.peripheral_orders),
        "degree": core.degree,
        "regular": True,
        "deck_trivial": False,
        "bound": None,
    }
    if core.degree is not None:
        checks["degree_computed"] = True
        ramification = [
            {order: core.degree // order} for order in core.peripheral_orders
        ]
        chi, genus = riemann_hurwitz(core.degree, sig.euler_closed, ramification)
        checks["chi_even"] = chi % 2 == 0
        checks["genus_nonnegative_integer"] = genus >= 0
        cover["euler"] = chi
        cover["genus"] = genus
        cover["ramification"] = [
            {
                "puncture": i + 1,
                "elevation_order": order,
                "local_degrees": _multiset_pairs({order: core.degree // order}),
            }
            for i, order in enumerate(core.peripheral_orders)
        ]
    else:
        checks["degree_computed"] = False
        cover["euler"] = None
        cover["genus"] = None
        cover["ramification"] = None
    cert["cover"] = cover
    cert["blanket_hypothesis"] = None


# ---------------------------------------------------------------------------
# Verification

@dataclass(frozen=True)
class VerifyReport:
    passed: bool
    schema_ok: bool
    digest_ok: bool
    all_checks_true: bool
    mismatches: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "schema_ok": self.schema_ok,
            "digest_ok": self.digest_ok,
            "all_checks_true": self.all_checks_true,
            "mismatches": list(self.mismatches),
        }


def parse_certificate(text: str) -> dict:
    try:
        cert = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"not valid JSON: {exc}") from exc
    if not isinstance(cert, dict) or cert.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatch(
            f"expected schema_version {SCHEMA_VERSION!r}, got {cert.get('schema_version')!r}"
        )
    return cert


def _config_from_certificate(cert: dict) -> ConstructConfig:
    inputs = cert["inputs"]
    budgets = cert["budgets"]
    flags = inputs.get("flags", {})
    return ConstructConfig(
        case=inputs["case"],
        p=inputs.get("p"),
        genus=inputs.get("genus"),
        punctures=inputs.get("punctures"),
        explicit_t=flags.get("explicit_t"),
        single_factor=bool(flags.get("single_factor")),
        orbit_budget=int(budgets["orbit"]),
        coset_budget=int(budgets["coset"]),
        closure_budget=int(budgets["closure"]),
        hall_direct_cap=int(budgets["hall_direct_cap"]),
    )


def _diff(expected, found, path: str, out: list[str]) -> None:
    if isinstance(expected, dict) and isinstance(found, dict):
        for key in sorted(set(expected) | set(found)):
            if key not in expected or key not in found:
                out.append(f"{path}.{key}" if path else key)
            else:
                _diff(expected[key], found[key], f"{path}.{key}" if path else key, out)
    elif isinstance(expected, list) and isinstance(found, list):
        if len(expected) != len(found):
            out.append(path)
        else:
            for i, (e, f) in enumerate(zip(expected, found)):
                _diff(e, f, f"{path}[{i}]", out)
    elif expected != found:
        out.append(path)


def _replay_constant_mismatches(cert: dict) -> list[str]:
    """Validate recorded searched constants against their defining
    conditions (minimality included where the search is cheap)."""
    out: list[str] = []
    case = cert["inputs"]["case"]
    constants = cert.get("constants", {})
    p = cert["inputs"].get("p")
    if case == "genus-zero" and cert["inputs"]["flags"].get("explicit_t") is None:
        if not validate_t(p, int(constants.get("t", 0)), require_minimal=True):
            out.append("constants.t")
    if case == "once-punctured":
        handle = FiniteGroupHandle.psl2(p)
        try:
            a_el = decode_element(handle, constants["A"])
            b_el = decode_element(handle, constants["B"])
            c_el = decode_element(handle, constants["C"])
            if not validate_commutator_pair(p, a_el, b_el, c_el):
                out.append("constants.A")
        except Exception:
            out.append("constants.A")
    return out


def verify(cert: dict) -> VerifyReport:
    """Recompute everything derivable and compare bit for bit.

    The document digest is checked first, so a tampered certificate
    fails immediately; the recomputation then replays the pipeline from
    the recorded inputs and constants without repeating any search.
    """
    schema_ok = cert.get("schema_version") == SCHEMA_VERSION
    if not schema_ok:
        return VerifyReport(False, False, False, False, ("schema_version",))
    digest_ok = cert.get("certificate_digest") == _digest_payload(cert)
    if not digest_ok:
        return VerifyReport(False, True, False, False, ("certificate_digest",))
    mismatches = _replay_constant_mismatches(cert)
    config = _config_from_certificate(cert)
    rebuilt = attach_digest(_run_pipeline(config, constants=cert.get("constants")))
    _diff(rebuilt, cert, "", mismatches)
    checks = cert.get("checks", {})
    all_true = bool(checks) and all(checks.values()) and bool(cert.get("all_checks_pass"))
    passed = digest_ok and not mismatches and all_true
    # deduplicate, preserve order
    seen: dict[str, None] = {}
    for m in mismatches:
        seen.setdefault(m)
    return VerifyReport(passed, True, digest_ok, all_true, tuple(seen))


def write_certificate(cert: dict, path: str) -> None:
    """Atomic write: the file appears only if the certificate is complete."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    payload = canonical_json(cert) + "\n"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".coverforge-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# Bundle bookkeeping

PREMISE_NULL_HOMOLOGOUS = "null-homologous"
PREMISE_PURELY_PA = "purely-pA"


def bundle_report(fiber_genus: int, base_genus: int, premises: Sequence[str] = ()) -> dict:
    """Exact Euler characteristic of a fiber-genus bundle over a base
    surface, plus caller-asserted provenance flags.

    chi(E) = 4 (g - 1)(h - 1).  The signature-zero flag is set only when
    the caller asserts the base class is null-homologous, and the
    atoroidality flag only when the caller asserts the monodromy image
    is purely pseudo-Anosov; the tool echoes these premises verbatim and
    never claims to check them.
    """
    if fiber_genus < 2 or base_genus < 2:
        raise BadParameters("both fiber and base genus must be at least 2")
    unknown = [p for p in premises if p not in (PREMISE_NULL_HOMOLOGOUS, PREMISE_PURELY_PA)]
    if unknown:
        raise BadParameters(f"unknown premises {unknown}")
    premises = sorted(set(premises))
    return {
        "fiber_genus": fiber_genus,
        "base_genus": base_genus,
        "euler_total": 4 * (fiber_genus - 1) * (base_genus - 1),
        "signature_zero": PREMISE_NULL_HOMOLOGOUS in premises,
        "atoroidal": PREMISE_PURELY_PA in premises,
        "premises": list(premises),
    }
