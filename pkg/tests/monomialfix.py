"""Bounded evaluator for monomial ideals in countably many variables.

Supports the regression test for the directed-union filter that breaks
the closure axiom.  The ambient ring is a polynomial ring over a field
in variables x_1, x_2, ... and y_1, y_2, ...; we only ever look at
finitely many indices, and any x-index larger than everything a given
ideal mentions behaves like any other, so one fresh index stands in for
the infinite tail.

A monomial is a dict (var, index) -> positive exponent, frozen to a
sorted tuple for hashing.  Ideals are finite generator lists.
"""

from itertools import combinations_with_replacement


def mono(*factors):
    """Build a monomial from (var, index) pairs, e.g. mono(("x",1),("y",1))."""
    out = {}
    for f in factors:
        if len(f) == 3:
            var, idx, e = f
        else:
            var, idx = f
            e = 1
        if e:
            out[(var, idx)] = out.get((var, idx), 0) + e
    return tuple(sorted(out.items()))


def mono_mul(a, b):
    out = dict(a)
    for k, e in b:
        out[k] = out.get(k, 0) + e
    return tuple(sorted(out.items()))


def mono_divides(a, b):
    db = dict(b)
    return all(db.get(k, 0) >= e for k, e in a)


def in_monomial_ideal(m, gens):
    return any(mono_divides(g, m) for g in gens)


def ideal_contains(outer, inner):
    # monomial ideals: containment is generator-wise divisibility
    return all(in_monomial_ideal(g, outer) for g in inner)


def colon_by_monomial(gens, s):
    """Generators of (I : s) for a monomial s: divide out the gcd."""
    ds = dict(s)
    out = []
    for g in gens:
        q = tuple((k, e - min(e, ds.get(k, 0)))
                  for k, e in g if e - min(e, ds.get(k, 0)) > 0)
        out.append(q)
    return out


def tail_ideal_gens(n, m, x_indices):
    """Generators of the m-th power of (y_1...y_n * x_i : i), with the
    x multiindex running over multisets from x_indices."""
    ybase = mono(*(("y", j, m) for j in range(1, n + 1)))
    out = []
    for combo in combinations_with_replacement(x_indices, m):
        xpart = mono(*(("x", i) for i in combo))
        out.append(mono_mul(ybase, xpart))
    return out


def union_filter_member(gens, n_max, m_max, x_bound):
    """Whether some tail ideal power sits inside the given monomial ideal.

    Checks n = 0..n_max and m = 1..m_max, with x indices 1..x_bound plus
    one fresh index x_{x_bound+1} representing the unbounded tail.  An
    index-uniform generator family must include its representative at
    the fresh index, and n_max must stay at or below x_bound so that no
    tested y index reaches the fresh one; both keep the one-fresh-index
    encoding faithful to the infinite-variable ring.
    """
    if n_max > x_bound:
        raise ValueError("n_max above x_bound breaks the fresh-index encoding")
    xs = list(range(1, x_bound + 2))
    for n in range(0, n_max + 1):
        for m in range(1, m_max + 1):
            if ideal_contains(gens, tail_ideal_gens(n, m, xs)):
                return True
    return False
