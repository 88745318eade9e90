"""Tests for coset actions, ramification multisets, and genus bookkeeping."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coverforge.catalog import (
    build_characteristic_cyclic,
    build_characteristic_sym3,
    build_generic,
    build_genus_zero,
    build_once_punctured,
    borel_subgroup,
    diagonal_torus,
)
from coverforge.errors import BadParameters, BudgetExceeded, InconsistentRamification
from coverforge.covers import (
    characteristic_core,
    combine_cycle_types,
    coset_action,
    coset_permutation,
    coset_space,
    cycle_type,
    elevation_degree,
    genus_lower_bound,
    local_degrees_direct,
    local_degrees_factored,
    proposition_genus_bound,
    riemann_hurwitz,
    verify_deck_trivial,
)
from coverforge.groups import (
    FiniteGroupHandle,
    Residue,
    canonicalize,
    normalizer,
    subgroup_closure,
    trivial_subgroup,
)
from coverforge.orbits import aut_classes, orbit_closure
from coverforge.surfaces import RepTuple, SurfaceSignature


class TestCosetSpaces:
    def test_sizes(self):
        a0, _, _ = diagonal_torus(5)
        assert coset_space(normalizer(a0)).degree == 15
        assert coset_space(borel_subgroup(5)).degree == 6

    def test_whole_group_single_point(self):
        h = FiniteGroupHandle.psl2(5)
        whole = subgroup_closure(
            (canonicalize(1, 1, 0, 1, 5), canonicalize(1, 0, 1, 1, 5)), h
        )
        space = coset_space(whole)
        assert space.degree == 1
        assert coset_permutation(space, canonicalize(1, 1, 0, 1, 5)) == (0,)

    def test_budget(self):
        a0, _, _ = diagonal_torus(13)
        with pytest.raises(BudgetExceeded):
            coset_space(a0, budget=10)

    def test_action_is_a_homomorphism(self):
        b = build_generic(5, 1, 2)
        space = coset_space(b.h0)
        x = canonicalize(1, 1, 0, 1, 5)
        y = canonicalize(1, 0, 1, 1, 5)
        px = coset_permutation(space, x)
        py = coset_permutation(space, y)
        pxy = coset_permutation(space, x * y)
        assert tuple(py[px[i]] for i in range(space.degree)) == pxy


class TestLocalDegrees:
    def test_generic_p5_unipotents(self):
        b = build_generic(5, 1, 2)
        action = coset_action(b.rep, b.h0)
        assert action.degree == 15
        assert local_degrees_direct(action, 1) == {5: 3}
        assert local_degrees_direct(action, 2) == {5: 3}

    def test_identity_peripheral_is_unramified(self):
        sig = SurfaceSignature(1, 2)
        h = FiniteGroupHandle.psl2(5)
        rep = RepTuple(sig, h, (h.identity(),) * 3)
        b = build_generic(5, 1, 2)
        action = coset_action(rep, b.h0)
        assert local_degrees_direct(action, 1) == {1: 15}

    def test_regular_cyclic_action(self):
        b = build_characteristic_cyclic(0, 3)
        action = coset_action(b.rep, trivial_subgroup(b.rep.target))
        assert action.degree == 3
        assert local_degrees_direct(action, 1) == {3: 1}

    def test_derived_perm_is_relation_forced(self):
        # the coset action is a homomorphism, so the permutation of the
        # derived peripheral equals the product of inverse prefix and
        # handle commutators, composed as permutations
        for build in (build_generic(5, 1, 2), build_genus_zero(5, 3)):
            action = coset_action(build.rep, build.h0)
            d = action.degree
            names = build.signature.generator_names
            g = build.signature.g

            def compose(p, q):
                return tuple(q[p[i]] for i in range(d))

            def invert(p):
                out = [0] * d
                for i, j in enumerate(p):
                    out[j] = i
                return tuple(out)

            acc = tuple(range(d))
            for i in range(g):
                pa = action.free_perms[f"a{i+1}"]
                pb = action.free_perms[f"b{i+1}"]
                acc = compose(acc, compose(compose(pa, pb), compose(invert(pa), invert(pb))))
            prefix = tuple(range(d))
            for i in range(1, build.signature.n):
                prefix = compose(prefix, action.free_perms[f"c{i}"])
            forced = compose(invert(prefix), acc)
            assert forced == action.peripheral_perms[-1]


class TestFactoredCombination:
    def test_worked_examples(self):
        assert combine_cycle_types({5: 3}, {5: 3}) == {5: 45}
        assert combine_cycle_types({2: 1}, {3: 1}) == {6: 1}
        assert combine_cycle_types({1: 4}, {7: 2}) == {7: 8}

    def test_factored_equals_direct_on_products(self):
        # materialize the product coset space for k = 2 and compare
        cases = [
            (build_generic(5, 1, 2), 1),
            (build_generic(5, 1, 2), 2),
            (build_genus_zero(5, 3), 3),
            (build_once_punctured(13, 1), 1),
        ]
        for build, puncture in cases:
            space = coset_space(build.h0)
            g = build.rep.peripheral_images()[puncture - 1]
            perm = coset_permutation(space, g)
            d = len(perm)
            assert d * d <= 10_000
            product_perm = [0] * (d * d)
            for x in range(d):
                for y in range(d):
                    product_perm[x * d + y] = perm[x] * d + perm[y]
            direct = cycle_type(product_perm)
            factored = local_degrees_factored([cycle_type(perm), cycle_type(perm)])
            assert direct == factored

    @settings(max_examples=50)
    @given(
        a=st.dictionaries(st.integers(1, 9), st.integers(1, 4), min_size=1, max_size=3),
        b=st.dictionaries(st.integers(1, 9), st.integers(1, 4), min_size=1, max_size=3),
        c=st.dictionaries(st.integers(1, 9), st.integers(1, 4), min_size=1, max_size=3),
    )
    def test_combine_is_commutative_and_associative(self, a, b, c):
        assert combine_cycle_types(a, b) == combine_cycle_types(b, a)
        lhs = combine_cycle_types(combine_cycle_types(a, b), c)
        rhs = combine_cycle_types(a, combine_cycle_types(b, c))
        assert lhs == rhs

    def test_combine_preserves_total(self):
        a, b = {5: 3, 1: 2}, {3: 4, 2: 1}
        ta = sum(l * c for l, c in a.items())
        tb = sum(l * c for l, c in b.items())
        combined = combine_cycle_types(a, b)
        assert sum(l * c for l, c in combined.items()) == ta * tb


class TestElevationDegrees:
    def test_lcm_examples(self):
        assert math.lcm(5, 5) == 5
        assert math.lcm(5, 3) == 15
        b = build_generic(5, 1, 2)
        assert elevation_degree([b.rep], 1) == 5

    def test_across_class_reps(self):
        b = build_genus_zero(5, 3)
        reps = aut_classes(orbit_closure(b.rep)).class_rep_tuples(b.signature)
        d1 = elevation_degree(reps, 1)
        for rep in reps:
            from coverforge.groups import element_order

            assert d1 % element_order(rep.peripheral_images()[0]) == 0


class TestRiemannHurwitz:
    def test_single_factor_generic_p5(self):
        chi, genus = riemann_hurwitz(15, 0, [{5: 3}, {5: 3}])
        assert (chi, genus) == (-24, 13)

    def test_unramified(self):
        chi, genus = riemann_hurwitz(10, -2, [{1: 10}])
        assert chi == -20 and genus == 11

    def test_classic_cyclic_cover_of_sphere(self):
        chi, genus = riemann_hurwitz(3, 2, [{3: 1}, {3: 1}, {3: 1}])
        assert (chi, genus) == (0, 1)

    def test_bad_sum_rejected(self):
        with pytest.raises(InconsistentRamification):
            riemann_hurwitz(15, 0, [{5: 2}])

    def test_odd_euler_rejected(self):
        with pytest.raises(InconsistentRamification):
            riemann_hurwitz(3, 2, [{3: 1}, {2: 1, 1: 1}])


class TestGenusBounds:
    @pytest.mark.parametrize(
        "p,k,g,n,expected",
        [
            (5, 1, 1, 2, Fraction(5)),
            (5, 1, 0, 3, Fraction(1)),
            (13, 1, 1, 1, Fraction(7)),
        ],
    )
    def test_theorem_bound_values(self, p, k, g, n, expected):
        assert genus_lower_bound(p, k, g, n) == expected

    def test_proposition_bound(self):
        assert proposition_genus_bound(15, 1, 1, 2, 5) == 1 + 15 * Fraction(0 + 2 * 4, 2 * 5)

    def test_exactness(self):
        bound = genus_lower_bound(13, 49, 1, 1)
        assert bound.denominator == 1
        assert bound == 1 + Fraction(3, 7) * 14**49


class TestDeckGroup:
    def test_borel_deck_trivial(self):
        assert verify_deck_trivial(borel_subgroup(5))
        assert verify_deck_trivial(borel_subgroup(13))

    def test_p5_diagonal_normalizer_not_deck_trivial(self):
        # honest value at p = 5: the Klein four-group is not
        # self-normalizing, so the coset cover has nontrivial deck group
        a0, _, _ = diagonal_torus(5)
        assert not verify_deck_trivial(normalizer(a0))

    def test_p13_diagonal_normalizer_deck_trivial(self):
        a0, _, _ = diagonal_torus(13)
        assert verify_deck_trivial(normalizer(a0))

    def test_a0_not_deck_trivial(self):
        a0, _, _ = diagonal_torus(5)
        assert not verify_deck_trivial(a0)

    def test_whole_group_boundary_case(self):
        h = FiniteGroupHandle.psl2(5)
        whole = subgroup_closure(
            (canonicalize(1, 1, 0, 1, 5), canonicalize(1, 0, 1, 1, 5)), h
        )
        assert verify_deck_trivial(whole)


class TestCharacteristicCore:
    def test_toy_degree(self):
        sig = SurfaceSignature(0, 3)
        h = FiniteGroupHandle.cyclic(2)
        rep = RepTuple(sig, h, (Residue(1, 2), Residue(0, 2)))
        orb = orbit_closure(rep)
        reps = aut_classes(orb).class_rep_tuples(sig)
        core = characteristic_core(reps, orb)
        assert core.degree == 4
        assert core.aut_invariant

    def test_char_cyclic_numbers(self):
        b = build_characteristic_cyclic(0, 3)
        orb = orbit_closure(b.rep)
        reps = aut_classes(orb).class_rep_tuples(b.signature)
        core = characteristic_core(reps, orb)
        assert core.peripheral_orders == (3, 3, 3)
        assert core.all_at_least_two
        assert core.degree == 9
        chi, genus = riemann_hurwitz(9, 2, [{3: 3}] * 3)
        assert (chi, genus) == (0, 1)

    def test_char_sym3_numbers(self):
        b = build_characteristic_sym3(1)
        orb = orbit_closure(b.rep)
        reps = aut_classes(orb).class_rep_tuples(b.signature)
        core = characteristic_core(reps, orb)
        assert core.peripheral_orders == (3,)
        assert core.degree == 108
        chi, genus = riemann_hurwitz(108, 0, [{3: 36}])
        assert (chi, genus) == (-72, 37)

    def test_degree_uncomputed_when_ambient_exceeds_budget(self):
        b = build_characteristic_cyclic(0, 3)
        orb = orbit_closure(b.rep)
        reps = aut_classes(orb).class_rep_tuples(b.signature)
        core = characteristic_core(reps, orb, closure_budget=2)
        assert core.degree is None
        assert core.peripheral_orders == (3, 3, 3)
