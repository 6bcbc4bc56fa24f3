from fractions import Fraction

import pytest

from gabtop.quadlat import FracIdeal, LatticeQuotient, equivariant_homs
from gabtop.rings import Ideal, QuadraticOrder

h = QuadraticOrder(-5)
R1 = FracIdeal.unit(h)
P = FracIdeal.from_ideal(Ideal(h, [(2, 0), (1, 1)]))


def test_prime_over_two():
    assert P.rows == ((1, 1), (0, 2))
    assert P.index_in(R1) == 2
    assert not P.contains((1, 0))
    assert P.contains((1, 1))


def test_square_is_two():
    P2 = P.mul(P)
    assert P2 == FracIdeal.from_element(h, (2, 0))
    assert P2.index_in(R1) == 4


def test_inverse_and_powers():
    Pinv = P.inverse()
    # P^-1 = (1/2) P
    assert Pinv.den == 2 and Pinv.rows == P.rows
    assert P.mul(Pinv) == R1
    for n in range(1, 5):
        Pn = P.power(n)
        assert Pn.index_in(R1) == 2**n
        assert P.power(-n).mul(Pn) == R1
    assert P.power(0) == R1


def test_sum_and_intersect():
    two = FracIdeal.from_element(h, (2, 0))
    assert P.add(two) == P
    assert P.intersect(two) == two
    onepw = FracIdeal.from_element(h, (1, 1))
    # (1+w) = P * (3, 1+w); intersection with (2) = P^2 * Q3 piece
    assert P.contains_lattice(onepw)


def test_quotient_sizes_and_structure():
    for n, size in [(1, 2), (2, 4), (3, 8)]:
        Q = LatticeQuotient(R1, P.power(n))
        assert Q.size() == size
    Q3 = LatticeQuotient(R1, P.power(3))
    assert Q3.group.invariants() == (0, [2, 4])


def test_action_well_defined():
    Q = LatticeQuotient(R1, P.power(2))
    wm = Q.w_map()
    assert wm.well_defined
    one = Q.to_group((1, 0))
    w_of_one = wm(one)
    assert Q.group.elements_equal(w_of_one, Q.to_group((0, 1)))
    # w^2 = -5
    sq = wm(wm(one))
    assert Q.group.elements_equal(sq, Q.to_group((-5, 0)))


def test_annihilators():
    Q = LatticeQuotient(R1, P.power(2))
    one = Q.to_group((1, 0))
    assert Q.annihilator(one) == Ideal(h, [(2, 0)])
    # the class of 1+w is killed by P (since (1+w)P ⊆ P^2)
    v = Q.to_group((1, 1))
    ann = Q.annihilator(v)
    assert ann == Ideal(h, [(2, 0), (1, 1)])


def test_negative_power_quotients_cyclic():
    # P^-n / R is cyclic with annihilator P^n
    for n in range(1, 4):
        Q = LatticeQuotient(P.power(-n), R1)
        assert Q.size() == 2**n
        g = Q.cyclic_generator()
        assert g is not None
        assert Q.annihilator(g) == Ideal(h, [x for x in map(tuple, P.power(n).rows)])


def test_regular_quotient_cyclic():
    for n in range(1, 4):
        Q = LatticeQuotient(R1, P.power(n))
        g = Q.cyclic_generator()
        assert g is not None


def test_endomorphism_ring_size():
    # End(R/P^n) has the same size as R/P^n
    for n in range(1, 4):
        Q = LatticeQuotient(R1, P.power(n))
        K, hd, incl = equivariant_homs(Q, Q)
        assert K.order() == 2**n


def test_equivariant_homs_are_linear():
    Q = LatticeQuotient(R1, P.power(2))
    K, hd, incl = equivariant_homs(Q, Q)
    wm = Q.w_map()
    for k in K.elements():
        f = hd.to_map(incl(k))
        for v in Q.group.elements():
            assert Q.group.elements_equal(f(wm(v)), wm(f(v)))


def test_fracideal_zero_normalization():
    z1 = FracIdeal(h, 5, [])
    z2 = FracIdeal(h, 1, [])
    assert z1 == z2 and z1.is_zero()


def test_contains_fractions():
    Pinv = P.inverse()
    assert Pinv.contains((Fraction(1, 2), Fraction(1, 2)))
    assert not Pinv.contains((Fraction(1, 2), Fraction(0)))
    assert Pinv.contains((0, 1))
