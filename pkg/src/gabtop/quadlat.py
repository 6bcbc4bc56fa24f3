"""Fractional ideals and finite lattice quotients over quadratic orders.

A fractional ideal is stored as (1/den) * L where L is a rank-2 integer
lattice in Hermite form, closed under multiplication by w. Elements of
the field are pairs of Fractions (a, b) meaning a + b*w. Quotients A/B
of nested fractional ideals are finite abelian groups carrying the ring
action through the w-multiplication matrix.
"""

from fractions import Fraction
from math import gcd

from .abgroups import AbGroup, AbMap, HomData, kernel
from .errors import HandleMismatch
from .intlin import (
    hnf,
    hnf_with_transform,
    in_row_span,
    left_kernel_basis,
    mat_mul,
    solve_in_rows,
)


def _lcm(a, b):
    return a * b // gcd(a, b) if a and b else 0


class FracIdeal:
    """A fractional ideal (1/den) * rowspan(rows) of a quadratic order."""

    __slots__ = ("handle", "den", "rows")

    def __init__(self, handle, den, rows):
        if den <= 0:
            raise ValueError("denominator must be positive")
        H = hnf([list(r) for r in rows], 2)
        if H and len(H) == 1:
            raise ValueError("rank 1 lattice is not a fractional ideal")
        if not H:
            den = 1
        # reduce the representation: divide out gcd(den, content)
        g = den
        for r in H:
            for x in r:
                g = gcd(g, x)
        if g > 1 and H:
            den //= g
            H = [[x // g for x in r] for r in H]
        self.handle = handle
        self.den = den
        self.rows = tuple(tuple(r) for r in H)

    @classmethod
    def unit(cls, handle):
        return cls(handle, 1, [[1, 0], [0, 1]])

    @classmethod
    def from_ideal(cls, I):
        if I.kind != "lattice":
            raise HandleMismatch("expected a quadratic-order ideal")
        return cls(I.handle, 1, [list(r) for r in I.data])

    @classmethod
    def from_element(cls, handle, x):
        """Principal fractional ideal generated by x = (a, b) of Fractions."""
        a, b = Fraction(x[0]), Fraction(x[1])
        d = _lcm(a.denominator, b.denominator) or 1
        g = (int(a * d), int(b * d))
        gw = (handle.d * g[1], g[0])
        return cls(handle, d, [list(g), list(gw)])

    def is_zero(self):
        return not self.rows

    def basis(self):
        """Basis vectors as pairs of Fractions."""
        return [
            (Fraction(r[0], self.den), Fraction(r[1], self.den)) for r in self.rows
        ]

    def key(self):
        return (self.den, self.rows)

    def __eq__(self, other):
        return isinstance(other, FracIdeal) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "FracIdeal(1/%d * %r)" % (self.den, list(self.rows))

    def contains(self, x):
        a, b = Fraction(x[0]) * self.den, Fraction(x[1]) * self.den
        if a.denominator != 1 or b.denominator != 1:
            return False
        if not self.rows:
            return a == 0 and b == 0
        H, _, piv = hnf_with_transform([list(r) for r in self.rows], 2)
        return in_row_span([int(a), int(b)], H, piv)

    def contains_lattice(self, other):
        return all(self.contains(v) for v in other.basis())

    def mul_element(self, x):
        """Multiply by a single field element (pair of Fractions)."""
        a, b = Fraction(x[0]), Fraction(x[1])
        d = _lcm(a.denominator, b.denominator) or 1
        M = [[int(a * d), int(b * d)], [self.handle.d * int(b * d), int(a * d)]]
        rows = mat_mul([list(r) for r in self.rows], M)
        return FracIdeal(self.handle, self.den * d, rows)

    def mul(self, other):
        self._check(other)
        rows = []
        for r in self.rows:
            for s in other.rows:
                p = self.handle.mul(tuple(r), tuple(s))
                rows.append(list(p))
                rows.append(list(self.handle.mul(p, (0, 1))))
        return FracIdeal(self.handle, self.den * other.den, rows)

    def add(self, other):
        self._check(other)
        d = _lcm(self.den, other.den)
        rows = [[x * (d // self.den) for x in r] for r in self.rows]
        rows += [[x * (d // other.den) for x in r] for r in other.rows]
        return FracIdeal(self.handle, d, rows)

    def intersect(self, other):
        self._check(other)
        d = _lcm(self.den, other.den)
        A = [[x * (d // self.den) for x in r] for r in self.rows]
        B = [[x * (d // other.den) for x in r] for r in other.rows]
        if not A or not B:
            return FracIdeal(self.handle, 1, [])
        stacked = A + [[-t for t in r] for r in B]
        rows = []
        for v in left_kernel_basis(stacked, 2):
            c = v[: len(A)]
            rows.append([sum(c[i] * A[i][j] for i in range(len(A))) for j in range(2)])
        return FracIdeal(self.handle, d, rows)

    def inverse(self):
        """(R : self) for an invertible lattice, via element inverses."""
        if not self.rows:
            raise ZeroDivisionError("zero lattice has no inverse")
        out = None
        for g in self.basis():
            if g == (0, 0):
                continue
            n = g[0] * g[0] - self.handle.d * g[1] * g[1]
            ginv = (g[0] / n, -g[1] / n)
            cand = FracIdeal.unit(self.handle).mul_element(ginv)
            out = cand if out is None else out.intersect(cand)
        return out

    def power(self, n):
        if n == 0:
            return FracIdeal.unit(self.handle)
        base = self if n > 0 else self.inverse()
        out = base
        for _ in range(abs(n) - 1):
            out = out.mul(base)
        return out

    def index_in(self, other):
        """The index [other : self] when self is a full-rank sublattice."""
        if not other.contains_lattice(self):
            raise ValueError("not a sublattice")
        if len(self.rows) < 2:
            raise ValueError("sublattice must have full rank")
        rels = _coords_matrix(self, other)
        det = rels[0][0] * rels[1][1] - rels[0][1] * rels[1][0]
        return abs(det)

    def _check(self, other):
        if self.handle != other.handle:
            raise HandleMismatch("fractional ideals over different orders")


def _coords_matrix(B, A):
    """Integer coordinates of B's basis in A's basis (requires B ⊆ A)."""
    d = _lcm(A.den, B.den)
    Arows = [[x * (d // A.den) for x in r] for r in A.rows]
    out = []
    for r in B.rows:
        v = [x * (d // B.den) for x in r]
        c = solve_in_rows(v, Arows, 2)
        if c is None:
            raise ValueError("not contained in the target lattice")
        out.append(c)
    return out


class LatticeQuotient:
    """The finite module A/B over a quadratic order, with the w-action."""

    __slots__ = ("handle", "A", "B", "group", "wmat")

    def __init__(self, A, B):
        if A.handle != B.handle:
            raise HandleMismatch("lattices over different orders")
        if not A.contains_lattice(B):
            raise ValueError("B must be contained in A")
        self.handle = A.handle
        self.A = A
        self.B = B
        rels = _coords_matrix(B, A)
        self.group = AbGroup(2, rels)
        # w sends each basis vector of A back into A; record coordinates
        W = []
        for g in A.basis():
            gw = (self.handle.d * g[1], g[0])
            W.append(self._coords_of(gw))
        self.wmat = W

    def _coords_of(self, x):
        a, b = Fraction(x[0]) * self.A.den, Fraction(x[1]) * self.A.den
        if a.denominator != 1 or b.denominator != 1:
            raise ValueError("element not in the ambient lattice")
        c = solve_in_rows([int(a), int(b)], [list(r) for r in self.A.rows], 2)
        if c is None:
            raise ValueError("element not in the ambient lattice")
        return c

    def to_group(self, x):
        return self.group.reduce(self._coords_of(x))

    def from_group(self, v):
        v = self.group.reduce(v)
        base = self.A.basis()
        return (
            v[0] * base[0][0] + v[1] * base[1][0],
            v[0] * base[0][1] + v[1] * base[1][1],
        )

    def w_map(self):
        return AbMap(self.group, self.group, [list(r) for r in self.wmat])

    def act_matrix(self, r):
        """Integer matrix of multiplication by the ring element r = (a, b)."""
        a, b = r
        W = self.wmat
        return [
            [a * (1 if i == j else 0) + b * W[i][j] for j in range(2)]
            for i in range(2)
        ]

    def act_map(self, r):
        return AbMap(self.group, self.group, self.act_matrix(r))

    def act(self, r, v):
        return self.group.reduce(self.act_map(r)(v))

    def size(self):
        return self.group.order()

    def annihilator(self, v):
        """The ideal {r in R : r*v = 0} as an integral Ideal."""
        from .rings import Ideal

        v = self.group.reduce(list(v))
        rows = []
        # r = (a, b) kills v iff a*v + b*(v W) = 0 in the group
        vw = self.group.reduce([
            sum(v[i] * self.wmat[i][j] for i in range(2)) for j in range(2)
        ])
        # solve for (a, b) with a*v + b*vw in the relation lattice
        # unknowns (a, b, y...) with a*v + b*vw = y @ rels
        rels = self.group.rels
        ncols = 2
        Amat = [list(v), list(vw)] + [[-x for x in r] for r in rels]
        ker = left_kernel_basis(Amat, ncols)
        for k in ker:
            rows.append((k[0], k[1]))
        cand = [r for r in rows if r != (0, 0)]
        if not cand:
            return Ideal(self.handle, [(0, 0)])
        return Ideal(self.handle, cand)

    def cyclic_generator(self):
        """An element generating A/B as a module, or None."""
        n = self.size()
        for v in self.group.elements():
            span = self._module_span([v])
            if len(span) == n:
                return v
        return None

    def _module_span(self, vs):
        """Closure of vs under addition and the w-action."""
        wm = self.w_map()
        seen = {tuple(self.group.reduce([0, 0]))}
        stack = []
        for v in vs:
            t = tuple(self.group.reduce(list(v)))
            if t not in seen:
                seen.add(t)
                stack.append(t)
        while stack:
            v = stack.pop()
            nxt = [tuple(self.group.reduce(wm(list(v))))]
            for w in list(seen):
                nxt.append(tuple(self.group.reduce([v[0] + w[0], v[1] + w[1]])))
            for t in nxt:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen


def equivariant_homs(X, Y):
    """R-linear maps X -> Y between lattice quotients.

    Returns (subgroup K of the abelian hom group, hom data hd, inclusion),
    where members of K are w-commuting homomorphisms.
    """
    if X.handle != Y.handle:
        raise HandleMismatch("modules over different orders")
    hd = HomData(X.group, Y.group)
    wx, wy = X.w_map(), Y.w_map()
    H = hd.group
    rows = []
    for j in range(H.ngens):
        f = hd.to_map(H.gen(j))
        g = f.compose(wx).add(wy.compose(f).negate())
        rows.append(hd.from_map(g))
    defect = AbMap(H, H, rows)
    K, incl = kernel(defect)
    return K, hd, incl
