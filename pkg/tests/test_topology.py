"""Topology bases: axiom battery, saturation, unions, countable-type witnesses."""

import pytest
from hypothesis import given, settings, strategies as st

from gabtop.errors import (
    BadCertificate,
    EmptyGenerators,
    FiniteOnly,
    HandleMismatch,
    MalformedChain,
    NotDirected,
    PartialClosure,
    TwoSidedRequired,
)
from gabtop.rings import (
    Ideal,
    Integers,
    IntegersMod,
    UpperTriangular2,
    colon_ideal,
    ideal_intersect,
    translate_product,
)
from gabtop.topology import (
    TOmegaWitness,
    TopologyBase,
    TopologyFamily,
    all_right_ideals,
    check_axioms,
    check_t_omega,
    default_sample,
    same_filter,
    saturate,
    topology_le,
    union_topologies,
)

import monomialfix as mf

Z = Integers()
T2R = UpperTriangular2(2)
E11 = (1, 0, 0)
E12 = (0, 1, 0)
E22 = (0, 0, 1)


def five_chain(depth=6):
    return TopologyBase.chain(Z, lambda n: Ideal(Z, [5 ** n]), depth)


def j_zero():
    # matrices with vanishing upper-left entry; two-sided
    return Ideal(T2R, [E12, E22])


# ---------------------------------------------------------------- axioms


def test_chain_axioms_all_verified():
    B = check_axioms(five_chain())
    for name in ("T0", "T1", "T2", "T3", "T4p"):
        assert B.axiom_flags[name].is_verified
    assert B.axiom_flags["T2"].bound == {"chain_depth": 6}


def test_finite_set_meet_failure_carries_witness():
    B = check_axioms(TopologyBase.finite_set(Z, [Ideal(Z, [2]), Ideal(Z, [3])]))
    v = B.axiom_flags["T2"]
    assert v.is_failed
    assert v.witness["meet"].describe() == "(6)"
    assert not B.in_filter(v.witness["meet"])
    # the same base also fails the translate-product axiom
    assert B.axiom_flags["T4p"].is_failed


def test_chain_must_descend():
    with pytest.raises(MalformedChain):
        TopologyBase.chain(Z, lambda n: Ideal(Z, [2 ** (6 - n)]), 3)


def test_chain_needs_two_levels():
    with pytest.raises(MalformedChain):
        TopologyBase.chain(Z, lambda n: Ideal(Z, [5 ** n]), 1)


def test_base_construction_guards():
    with pytest.raises(EmptyGenerators):
        TopologyBase.finite_set(Z, [])
    with pytest.raises(HandleMismatch):
        TopologyBase.finite_set(Z, [Ideal(IntegersMod(12), [2])])
    with pytest.raises(FiniteOnly):
        TopologyBase.full_enumeration(Z, [Ideal(Z, [2])])
    with pytest.raises(ValueError):
        TopologyBase(Z, [Ideal(Z, [2])], kind="mystery")


def test_verdicts_reproducible():
    B = five_chain()
    first = {k: v.status for k, v in check_axioms(B).axiom_flags.items()}
    second = {k: v.status for k, v in check_axioms(B).axiom_flags.items()}
    assert first == second
    d = B.axiom_flags["T3"].as_dict()
    assert d["status"] == "verified"
    assert "bound" in d


def test_default_sample_covers_generators_and_products():
    pool = default_sample(Z, [Ideal(Z, [6])])
    for wanted in (0, 1, 2, 3, 6, 36):
        assert wanted in pool


def test_full_enumeration_closure_axiom_negative():
    # ideals over Z/12 containing (6) do not form a topology: the square
    # of (6) vanishes, yet every colon of (0) along (6) is open
    h = IntegersMod(12)
    B = check_axioms(TopologyBase.full_enumeration(h, [Ideal(h, [6])]))
    assert B.axiom_flags["T4p"].is_failed
    t4 = B.axiom_flags["T4"]
    assert t4.is_failed
    assert t4.witness["ideal"].is_zero()


def test_full_enumeration_standard_base_exact():
    h = IntegersMod(12)
    B = check_axioms(
        TopologyBase.full_enumeration(
            h, [Ideal(h, [1]), Ideal(h, [2]), Ideal(h, [4])]))
    for name in ("T0", "T1", "T2", "T3", "T4p", "T4"):
        assert B.axiom_flags[name].is_verified
    assert B.axiom_flags["T4"].bound["exact"]


def test_ut2_two_sided_base_is_gabriel():
    B = check_axioms(
        TopologyBase.full_enumeration(T2R, [j_zero(), Ideal(T2R, [E11, E22])]))
    for name in ("T0", "T1", "T2", "T3", "T4p", "T4"):
        assert B.axiom_flags[name].is_verified


# ---------------------------------------------------------------- saturation


def test_saturate_unit_ideal_fixed_point():
    out = saturate([Ideal(Z, [1])], budget=(3, 8))
    assert [I.describe() for I in out.ideals] == ["(1)"]


def test_saturate_six_chain_exact():
    out = saturate([Ideal(Z, [6])], budget=(3, 8))
    assert [I.describe() for I in out.ideals] == [
        "(%d)" % 6 ** n for n in range(1, 9)]
    assert out.kind == "chain"
    assert out.in_filter(Ideal(Z, [6]))
    for name in ("T0", "T1", "T2", "T3", "T4p"):
        assert out.axiom_flags[name].is_verified


def test_saturate_idempotent_at_same_budget():
    out = saturate([Ideal(Z, [6])], budget=(3, 8))
    again = saturate(out.ideals, budget=(3, 8))
    assert [I.key() for I in again.ideals] == [I.key() for I in out.ideals]


def test_saturate_ut2_seed_exhaustively_gabriel():
    out = saturate([j_zero()], budget=(3, 16))
    assert out.kind == "full_enumeration"
    for name in ("T0", "T1", "T2", "T3", "T4p", "T4"):
        assert out.axiom_flags[name].is_verified
    assert out.axiom_flags["T4"].bound["exact"]
    # genuinely stabilized, so idempotence holds even with headroom
    again = saturate(out.ideals, budget=(3, 16))
    assert [I.key() for I in again.ideals] == [I.key() for I in out.ideals]


def test_saturate_output_closed_under_translate_product():
    out = saturate([Ideal(Z, [6])], budget=(3, 8))
    from gabtop.rings import _ideal_generators
    for J in out.ideals:
        gens = _ideal_generators(J)
        for K in out.ideals:
            H = translate_product(gens, K)
            assert out.in_filter(H) or out.beyond_bound(H)


def test_saturate_partial_closure_keeps_capped_result():
    sideways = TOmegaWitness(lambda I: [Ideal(Z, [3])])
    with pytest.raises(PartialClosure) as e:
        saturate([Ideal(Z, [4])], witness=sideways, budget=(1, 1))
    assert e.value.result is not None
    assert [I.describe() for I in e.value.result.ideals] == ["(4)"]
    assert e.value.lost["candidate"].describe() == "(3)"


def test_saturate_rejects_empty_seed_and_tiny_budget():
    with pytest.raises(EmptyGenerators):
        saturate([], budget=(3, 8))
    with pytest.raises(ValueError):
        saturate([Ideal(Z, [2]), Ideal(Z, [3])], budget=(3, 1))


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(min_value=2, max_value=12), min_size=1, max_size=2))
def test_saturate_commutative_never_loses_candidates(gens):
    # products and meets refine their factors over a commutative ring,
    # so a tight cap truncates depth instead of losing information
    out = saturate([Ideal(Z, [g]) for g in gens], budget=(2, 12))
    for g in gens:
        assert out.in_filter(Ideal(Z, [g]))
    assert out.axiom_flags["T4p"].is_verified


# ---------------------------------------------------------------- unions


def test_union_of_prime_power_chains_matches_divisor_oracle():
    c2 = TopologyBase.chain(Z, lambda n: Ideal(Z, [2 ** n]), 6)
    c3 = TopologyBase.chain(Z, lambda n: Ideal(Z, [3 ** n]), 6)
    c6 = TopologyBase.chain(Z, lambda n: Ideal(Z, [6 ** n]), 6)
    fam = TopologyFamily([c2, c3, c6])
    assert fam.directed
    assert fam.upper[(0, 1)] == 2
    out = union_topologies(fam)
    assert out.truncated
    for name in ("T0", "T1", "T2", "T3", "T4p"):
        assert out.axiom_flags[name].is_verified
    assert same_filter(out, c6)
    for d in range(1, 100):
        assert out.in_filter(Ideal(Z, [d])) == (6 ** 6 % d == 0)


def test_union_single_member_is_identity():
    c6 = TopologyBase.chain(Z, lambda n: Ideal(Z, [6 ** n]), 4)
    assert union_topologies(TopologyFamily([c6])) is c6


def test_union_comparable_members_collapse():
    big = TopologyBase.full_enumeration(T2R, [j_zero()])
    small = TopologyBase.full_enumeration(T2R, [Ideal(T2R, [E11, E22])])
    out = union_topologies(TopologyFamily([small, big]))
    assert same_filter(out, big)
    assert out.axiom_flags["T4"].is_verified


def test_union_refuses_undirected_family():
    c2 = TopologyBase.chain(Z, lambda n: Ideal(Z, [2 ** n]), 4)
    c3 = TopologyBase.chain(Z, lambda n: Ideal(Z, [3 ** n]), 4)
    fam = TopologyFamily([c2, c3])
    assert not fam.directed
    with pytest.raises(NotDirected):
        union_topologies(fam)


def test_union_requires_members_with_verified_products():
    bad = TopologyBase.finite_set(Z, [Ideal(Z, [2]), Ideal(Z, [3])])
    c6 = TopologyBase.chain(Z, lambda n: Ideal(Z, [6 ** n]), 6)
    fam = TopologyFamily([bad, c6])
    assert fam.directed
    with pytest.raises(BadCertificate):
        union_topologies(fam)


def test_topology_le_is_refinement_at_depth():
    c2 = TopologyBase.chain(Z, lambda n: Ideal(Z, [2 ** n]), 6)
    c6 = TopologyBase.chain(Z, lambda n: Ideal(Z, [6 ** n]), 6)
    assert topology_le(c2, c6)
    assert not topology_le(c6, c2)


# ---------------------------------------------------------------- countable type


def test_t_omega_commutative_auto_pass():
    assert check_t_omega(five_chain()).is_verified


def test_t_omega_ut2_two_sided_base():
    B = TopologyBase.full_enumeration(T2R, [j_zero(), Ideal(T2R, [E11, E22])])
    v = check_t_omega(B, TOmegaWitness.identity())
    assert v.is_verified
    assert v.bound["exact"]


def test_t_omega_noncommutative_needs_witness():
    B = TopologyBase.full_enumeration(T2R, [j_zero()])
    with pytest.raises(TwoSidedRequired):
        check_t_omega(B)


def test_t_omega_wrong_provider_names_the_gap():
    wrong = TOmegaWitness(lambda I: [Ideal(Z, [3])])
    v = check_t_omega(TopologyBase.finite_set(Z, [Ideal(Z, [4])]), wrong)
    assert v.is_failed
    assert v.witness["ideal"].describe() == "(4)"
    assert v.witness["family"] == ["(3)"]


# ------------------------------------------------- generator reduction lemma


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=2, max_value=60),
    st.integers(min_value=2, max_value=12),
    st.lists(st.integers(min_value=2, max_value=9), min_size=1, max_size=4),
)
def test_colon_openness_reduces_to_generators_integers(m, g, ts):
    B = check_axioms(TopologyBase.chain(Z, lambda n: Ideal(Z, [6 ** n]), 6))
    I = Ideal(Z, [m])
    by_generator = B.in_filter(colon_ideal(I, g))
    by_sampled_elements = all(
        B.in_filter(colon_ideal(I, g * t)) for t in [1] + ts)
    assert by_generator == by_sampled_elements


def test_colon_openness_reduces_to_generators_ut2():
    B = TopologyBase.full_enumeration(T2R, [j_zero()])
    for I in all_right_ideals(T2R):
        for x in T2R.elements():
            x = T2R.canon(x)
            cyclic = Ideal(T2R, [x])
            by_generator = B.in_filter(colon_ideal(I, x))
            by_all_elements = all(
                B.in_filter(colon_ideal(I, s)) for s in cyclic.element_list())
            assert by_generator == by_all_elements


# ---------------------------------------------------------------- enumeration


def test_right_ideal_census_z12():
    ideals = all_right_ideals(IntegersMod(12))
    assert len(ideals) == 6  # one per divisor


def test_right_ideal_census_ut2():
    ideals = all_right_ideals(T2R)
    assert len(ideals) == 7
    sizes = sorted(len(I.data) for I in ideals)
    assert sizes == [1, 2, 2, 2, 4, 4, 8]


def test_all_right_ideals_needs_finite_ring():
    with pytest.raises(FiniteOnly):
        all_right_ideals(Z)


# ------------------------------------- directed union breaking the closure axiom


def test_directed_union_filter_fails_closure_axiom():
    """Monomial regression: the union of the tail-ideal filters violates
    the closure axiom at the ideal generated by the products x_i * y_i.

    Each tail ideal (y_1...y_n * x_i : i) generates an honest topology,
    and the filters form an increasing chain, but their union is not
    closed: colons of the diagonal ideal along the x-ideal all belong
    to the union while the diagonal ideal itself never does.
    """
    bound = 3
    xs = range(1, bound + 2)  # index bound+1 is the fresh representative
    diag = [mf.mono(("x", i), ("y", i)) for i in xs]
    x_ideal = [mf.mono(("x", i)) for i in xs]

    # the x-ideal is open: it is itself the n = 0 tail ideal
    assert mf.union_filter_member(x_ideal, bound, 3, bound)

    # every colon along a sampled generator is open: dividing by x_i
    # exposes y_i, and (y_i) swallows the n = i tail ideal
    for i in range(1, bound + 1):
        colon = mf.colon_by_monomial(diag, mf.mono(("x", i)))
        assert mf.union_filter_member(colon, bound, 3, bound)

    # yet the diagonal ideal is not open at any bound: the tail power
    # with all x-indices fresh dodges every diagonal generator
    assert not mf.union_filter_member(diag, bound, 3, bound)

    # the same evaluator is not blind: it does see genuine non-members
    assert not mf.union_filter_member(
        mf.colon_by_monomial(diag, mf.mono(("y", 1))), bound, 3, bound)


def test_monomial_fixture_primitives():
    a = mf.mono(("x", 1), ("y", 2, 2))
    b = mf.mono(("x", 1))
    assert mf.mono_divides(b, a)
    assert not mf.mono_divides(a, b)
    assert mf.mono_mul(b, b) == mf.mono(("x", 1, 2))
    assert mf.in_monomial_ideal(a, [b])
    with pytest.raises(ValueError):
        mf.union_filter_member([b], 5, 2, 3)
