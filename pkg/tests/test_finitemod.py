"""Module arithmetic over Z/12 and the triangular 2x2 ring over GF(2).

Frozen values worth spelling out: Ext over Z/12 is periodic of period 2
(R -(m)-> R -(12/m)-> R resolves R/m), so Ext^1(R/m, N) = N[12/m] / mN.
That is NOT the integer Ext: over Z/12 one has Ext^1(Z/3, Z/3) = 0 while
over Z it is Z/3. The tests below pin both sides of that gap.
"""

import pytest

from gabtop.abgroups import is_injective, is_iso
from gabtop.rings import IntegersMod, UpperTriangular2
from gabtop.finitemod import (
    all_module_maps,
    ext1_resolution,
    free_module,
    from_presentation,
    hom_group,
    quotient_module,
    regular_module,
    submodule,
    tensor_group,
    zero_module,
)

Z12 = IntegersMod(12)
T2 = UpperTriangular2(2)

E11 = (1, 0, 0)
E12 = (0, 1, 0)
E22 = (0, 0, 1)


def cyclic(m):
    """Z/m as a Z/12-module (m must divide 12)."""
    mod, _ = from_presentation(Z12, [[m]], 1)
    return mod


def cyclic_left(m):
    mod, _ = from_presentation(Z12, [[m]], 1, side="left")
    return mod


def test_regular_module_z12():
    R = regular_module(Z12)
    assert R.size() == 12
    assert len(R.module_generators()) == 1
    # 5 is a unit, 6 is a zero divisor
    assert is_iso(R.act_map(5))
    assert not is_injective(R.act_map(6))


def test_regular_module_ut2():
    R = regular_module(T2)
    assert R.size() == 8
    # e11*e12 = e12, e12*e12 = 0, e22*e12 = 0 under the right action
    assert R.act([1, 0, 0], E12) == [0, 1, 0]
    assert R.act([0, 1, 0], E12) == [0, 0, 0]
    assert R.act([0, 0, 1], E12) == [0, 0, 0]
    # left regular differs: acting by e12 on e22 gives e12
    L = regular_module(T2, side="left")
    assert L.act([0, 0, 1], E12) == [0, 1, 0]


def test_from_presentation_and_zero():
    M = cyclic(2)
    assert M.size() == 2
    assert M.group.invariants() == (0, [2])
    Z, _ = from_presentation(Z12, [], 0)
    assert Z.size() == 1
    assert zero_module(Z12).size() == 1


def test_submodule_quotient_z12():
    R = regular_module(Z12)
    S, incl = submodule(R, [[4]])
    assert S.group.invariants() == (0, [3])
    assert incl.well_defined
    Q, proj = quotient_module(R, [[4]])
    assert Q.group.invariants() == (0, [4])
    # the composite R -> Q kills the submodule
    assert Q.group.is_zero_element(proj(incl([1])))


def test_free_module_rank2():
    F = free_module(Z12, 2)
    assert F.size() == 144
    assert len(F.module_generators()) == 2


def test_hom_group_counts_z12():
    A, B = cyclic(2), cyclic(4)
    K, hd, incl = hom_group(A, B)
    assert K.order() == 2
    assert len(all_module_maps(A, B)) == 2
    K2, _, _ = hom_group(cyclic(3), cyclic(4))
    assert K2.order() == 1
    # Hom(R, M) = M
    K3, _, _ = hom_group(regular_module(Z12), cyclic(6))
    assert K3.order() == 6


def ut2_fixtures():
    R = regular_module(T2)
    P1, _ = submodule(R, [[1, 0, 0]])  # e11*R, projective cover of S1
    S2, _ = submodule(R, [[0, 0, 1]])  # e22*R, simple projective
    S1, _ = quotient_module(R, [[0, 1, 0], [0, 0, 1]])  # R / (e12*R + e22*R)
    return R, P1, S1, S2


def test_ut2_fixture_sizes():
    R, P1, S1, S2 = ut2_fixtures()
    assert (P1.size(), S1.size(), S2.size()) == (4, 2, 2)


def test_hom_group_vs_brute_force_ut2():
    R, P1, S1, S2 = ut2_fixtures()
    mods = [P1, S1, S2]
    for A in mods:
        for B in mods:
            K, _, _ = hom_group(A, B)
            assert K.order() == len(all_module_maps(A, B))
    # End(e11*R) = e11*R*e11 = GF(2); Hom between the simples is zero
    assert hom_group(P1, P1)[0].order() == 2
    assert hom_group(S1, S2)[0].order() == 1
    assert hom_group(S2, S1)[0].order() == 1
    assert hom_group(R, S1)[0].order() == 2


def test_tensor_z12():
    G, _ = tensor_group(cyclic(4), cyclic_left(3))
    assert G.is_trivial()
    G2, _ = tensor_group(cyclic(4), cyclic_left(6))
    assert G2.invariants() == (0, [2])
    # M tensor R = M
    for m in (2, 4, 6):
        G3, _ = tensor_group(cyclic(m), regular_module(Z12, side="left"))
        assert G3.order() == m


def test_tensor_ut2():
    R, P1, S1, S2 = ut2_fixtures()
    L = regular_module(T2, side="left")
    for M in (P1, S1, S2):
        G, _ = tensor_group(M, L)
        assert G.order() == M.size()


@pytest.mark.parametrize(
    "m,n,expected",
    [
        (2, 2, (0, [2])),  # N[6]/2N over Z/2
        (3, 3, (0, [])),  # 3 invertible on Z/3[4]
        (4, 4, (0, [])),
        (6, 2, (0, [2])),
        (2, 3, (0, [])),
        (2, 12, (0, [])),  # Z/12 is self-injective
    ],
)
def test_ext1_z12_frozen(m, n, expected):
    M = cyclic(m)
    N = regular_module(Z12) if n == 12 else cyclic(n)
    E = ext1_resolution(M, N)
    assert E.invariants() == expected


def test_ext1_free_vanishes():
    F = free_module(Z12, 2)
    assert ext1_resolution(F, cyclic(2)).is_trivial()


def test_ext1_ut2_frozen():
    R, P1, S1, S2 = ut2_fixtures()
    assert ext1_resolution(S1, S2).invariants() == (0, [2])
    assert ext1_resolution(S2, S1).is_trivial()
    assert ext1_resolution(S1, S1).is_trivial()
    assert ext1_resolution(P1, S1).is_trivial()
    assert ext1_resolution(P1, S2).is_trivial()
    # Ext^1(S1, R) = Ext^1(S1, P1) + Ext^1(S1, S2) = Z/2
    assert ext1_resolution(S1, R).invariants() == (0, [2])


def test_resolution_cache_reused():
    M = cyclic(2)
    ext1_resolution(M, cyclic(2))
    cached = M._res_cache
    ext1_resolution(M, cyclic(3))
    assert M._res_cache is cached
