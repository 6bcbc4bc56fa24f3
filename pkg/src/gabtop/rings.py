"""Ring handles, elements, right ideals, and cyclic-quotient morphisms.

Supported ring classes: the integers, integers mod n, univariate
polynomials over Q or F_p, quadratic orders Z[w] with w^2 = d, and upper
triangular 2x2 matrices over F_p.

Element payloads are plain data: int, int residue, coefficient tuple
(low degree first), pair (a, b) meaning a + b*w, and triple (a, b, d)
meaning [[a, b], [0, d]]. Ideals are right ideals; each class carries its
own canonical form (single nonnegative generator for the PID classes, a
Hermite-reduced lattice basis for quadratic orders, the explicit element
set for the finite classes).
"""

from fractions import Fraction
import json
import re

from .errors import (
    CompositionMismatch,
    EmptyGenerators,
    HandleMismatch,
    NotAMorphism,
)
from .intlin import hnf, left_kernel_basis, xgcd


class RingHandle:
    is_commutative = True
    is_finite = False

    @property
    def key(self):
        raise NotImplementedError

    def canon(self, a):
        return a

    def eq(self, a, b):
        return self.canon(a) == self.canon(b)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def elements(self):
        raise HandleMismatch("not a finite ring: %r" % (self.key,))

    def sample_elements(self):
        """Default sampling pool: 0, 1, ring generators, their products."""
        pool = [self.zero(), self.one()] + list(self.generators())
        prods = [self.mul(a, b) for a in pool for b in pool]
        out = []
        seen = set()
        for x in pool + prods:
            k = self.format(self.canon(x))
            if k not in seen:
                seen.add(k)
                out.append(self.canon(x))
        return out

    def __eq__(self, other):
        return isinstance(other, RingHandle) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return "RingHandle%r" % (self.key,)


class Integers(RingHandle):
    @property
    def key(self):
        return ("Integers",)

    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def generators(self):
        return [2, 3]

    def parse(self, s):
        return int(s.strip())

    def format(self, a):
        return str(a)


class IntegersMod(RingHandle):
    is_finite = True

    def __init__(self, n):
        if n < 2:
            raise ValueError("modulus must be at least 2")
        self.n = n

    @property
    def key(self):
        return ("IntegersMod", self.n)

    def zero(self):
        return 0

    def one(self):
        return 1 % self.n

    def canon(self, a):
        return a % self.n

    def add(self, a, b):
        return (a + b) % self.n

    def neg(self, a):
        return (-a) % self.n

    def mul(self, a, b):
        return (a * b) % self.n

    def elements(self):
        return list(range(self.n))

    def generators(self):
        return [self.canon(x) for x in (2, 3) if self.canon(x) not in (0, 1)] or [1]

    def parse(self, s):
        s = s.strip()
        m = re.fullmatch(r"(-?\d+)(?:\s+mod\s+(\d+))?", s)
        if not m:
            raise ValueError("bad residue literal: %r" % s)
        if m.group(2) and int(m.group(2)) != self.n:
            raise ValueError("modulus mismatch in %r" % s)
        return int(m.group(1)) % self.n

    def format(self, a):
        return "%d mod %d" % (a % self.n, self.n)


def _q(x):
    return x if isinstance(x, Fraction) else Fraction(x)


class UnivariatePoly(RingHandle):
    """Polynomials in one variable over Q (field=None) or F_p (field=p)."""

    def __init__(self, field=None):
        if field is not None and field < 2:
            raise ValueError("field characteristic must be prime")
        self.p = field

    @property
    def key(self):
        return ("UnivariatePoly", self.p)

    def _c(self, x):
        return x % self.p if self.p else _q(x)

    def canon(self, a):
        a = tuple(self._c(c) for c in a)
        while a and a[-1] == 0:
            a = a[:-1]
        return a

    def zero(self):
        return ()

    def one(self):
        return (self._c(1),)

    def add(self, a, b):
        n = max(len(a), len(b))
        out = []
        for i in range(n):
            x = a[i] if i < len(a) else 0
            y = b[i] if i < len(b) else 0
            out.append(self._c(x + y))
        return self.canon(tuple(out))

    def neg(self, a):
        return self.canon(tuple(self._c(-c) for c in a))

    def mul(self, a, b):
        if not a or not b:
            return ()
        out = [self._c(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] = self._c(out[i + j] + x * y)
        return self.canon(tuple(out))

    def divmod(self, a, b):
        a = list(self.canon(a))
        b = self.canon(b)
        if not b:
            raise ZeroDivisionError("polynomial division by zero")
        inv_lead = (
            pow(b[-1], -1, self.p) if self.p else Fraction(1) / b[-1]
        )
        q = [self._c(0)] * max(0, len(a) - len(b) + 1)
        while len(a) >= len(b) and any(a):
            if a[-1] == 0:
                a.pop()
                continue
            shift = len(a) - len(b)
            coef = self._c(a[-1] * inv_lead)
            q[shift] = coef
            for i, c in enumerate(b):
                a[shift + i] = self._c(a[shift + i] - coef * c)
            while a and a[-1] == 0:
                a.pop()
        return self.canon(tuple(q)), self.canon(tuple(a))

    def gcd(self, a, b):
        a, b = self.canon(a), self.canon(b)
        while b:
            _, r = self.divmod(a, b)
            a, b = b, r
        return self.monic(a)

    def monic(self, a):
        a = self.canon(a)
        if not a:
            return a
        inv = pow(a[-1], -1, self.p) if self.p else Fraction(1) / a[-1]
        return self.canon(tuple(self._c(c * inv) for c in a))

    def generators(self):
        return [self.canon((0, 1))]

    def parse(self, s):
        s = s.strip().replace(" ", "").replace("-", "+-")
        if s.startswith("+"):
            s = s[1:]
        coeffs = {}
        for term in filter(None, s.split("+")):
            m = re.fullmatch(r"(-?)(\d+(?:/\d+)?)?(?:\*?x(?:\^(\d+))?)?", term)
            if not m or (m.group(2) is None and "x" not in term):
                raise ValueError("bad polynomial term: %r" % term)
            sign = -1 if m.group(1) else 1
            if m.group(2) is not None:
                c = Fraction(m.group(2)) if self.p is None else int(Fraction(m.group(2)))
            else:
                c = 1
            e = int(m.group(3)) if m.group(3) else (1 if "x" in term else 0)
            coeffs[e] = coeffs.get(e, 0) + sign * c
        deg = max(coeffs) if coeffs else 0
        return self.canon(tuple(coeffs.get(i, 0) for i in range(deg + 1)))

    def format(self, a):
        a = self.canon(a)
        if not a:
            return "0"
        terms = []
        for e in range(len(a) - 1, -1, -1):
            c = a[e]
            if c == 0:
                continue
            if e == 0:
                terms.append(str(c))
            else:
                xs = "x" if e == 1 else "x^%d" % e
                if c == 1:
                    terms.append(xs)
                elif c == -1:
                    terms.append("-" + xs)
                else:
                    terms.append("%s%s" % (c, xs))
        out = terms[0]
        for t in terms[1:]:
            out += t if t.startswith("-") else "+" + t
        return out


class QuadraticOrder(RingHandle):
    """Z[w] with w^2 = d, d squarefree and not 0 or 1."""

    def __init__(self, d):
        if d in (0, 1):
            raise ValueError("d must not be 0 or 1")
        dd = abs(d)
        for q in range(2, int(dd**0.5) + 1):
            if dd % (q * q) == 0:
                raise ValueError("d must be squarefree")
        self.d = d

    @property
    def key(self):
        return ("QuadraticOrder", self.d)

    def zero(self):
        return (0, 0)

    def one(self):
        return (1, 0)

    def add(self, a, b):
        return (a[0] + b[0], a[1] + b[1])

    def neg(self, a):
        return (-a[0], -a[1])

    def mul(self, a, b):
        return (a[0] * b[0] + self.d * a[1] * b[1], a[0] * b[1] + a[1] * b[0])

    def norm(self, a):
        return a[0] * a[0] - self.d * a[1] * a[1]

    def mult_matrix(self, s):
        """Row-vector matrix of left multiplication by s in basis (1, w)."""
        a, b = s
        return [[a, b], [self.d * b, a]]

    def generators(self):
        return [(0, 1), (2, 0)]

    def parse(self, s):
        s = s.strip().replace(" ", "").replace("-", "+-")
        if s.startswith("+"):
            s = s[1:]
        a = b = 0
        for term in filter(None, s.split("+")):
            m = re.fullmatch(r"(-?)(\d+)?(\*?w)?", term)
            if not m or (m.group(2) is None and m.group(3) is None):
                raise ValueError("bad quadratic literal: %r" % term)
            sign = -1 if m.group(1) else 1
            c = int(m.group(2)) if m.group(2) is not None else 1
            if m.group(3):
                b += sign * c
            else:
                a += sign * c
        return (a, b)

    def format(self, a):
        return "%d%+dw" % (a[0], a[1]) if a[1] else str(a[0])


class UpperTriangular2(RingHandle):
    """Upper triangular 2x2 matrices over F_p; element (a, b, d)."""

    is_commutative = False
    is_finite = True

    def __init__(self, p):
        if p < 2:
            raise ValueError("characteristic must be prime")
        self.p = p

    @property
    def key(self):
        return ("UpperTriangular2", self.p)

    def zero(self):
        return (0, 0, 0)

    def one(self):
        return (1, 0, 1)

    def canon(self, a):
        return (a[0] % self.p, a[1] % self.p, a[2] % self.p)

    def add(self, a, b):
        return self.canon((a[0] + b[0], a[1] + b[1], a[2] + b[2]))

    def neg(self, a):
        return self.canon((-a[0], -a[1], -a[2]))

    def mul(self, a, b):
        return self.canon((a[0] * b[0], a[0] * b[1] + a[1] * b[2], a[2] * b[2]))

    def elements(self):
        p = self.p
        return [(a, b, d) for a in range(p) for b in range(p) for d in range(p)]

    def generators(self):
        return [(1, 0, 0), (0, 1, 0), (0, 0, 1)]

    def parse(self, s):
        rows = json.loads(s)
        if (
            len(rows) != 2
            or len(rows[0]) != 2
            or len(rows[1]) != 2
            or rows[1][0] % self.p != 0
        ):
            raise ValueError("bad upper triangular literal: %r" % s)
        return self.canon((rows[0][0], rows[0][1], rows[1][1]))

    def format(self, a):
        a = self.canon(a)
        return "[[%d,%d],[0,%d]]" % a


def _right_ideal_closure(handle, gens):
    """Explicit element set of the right ideal generated by gens."""
    elems = {handle.canon(g) for g in gens}
    ring = [handle.canon(x) for x in handle.elements()]
    frontier = list(elems)
    elems = set()
    for g in frontier:
        for r in ring:
            elems.add(handle.mul(g, r))
    # close under addition
    changed = True
    while changed:
        changed = False
        cur = list(elems)
        for x in cur:
            for y in cur:
                z = handle.add(x, y)
                if z not in elems:
                    elems.add(z)
                    changed = True
    return frozenset(elems)


class Ideal:
    """A right ideal given by generators, carrying its canonical form."""

    __slots__ = ("handle", "gens", "_canon")

    def __init__(self, handle, gens):
        if not list(gens):
            raise EmptyGenerators("an ideal needs at least one generator")
        self.handle = handle
        self.gens = [handle.canon(g) for g in gens]
        self._canon = self._canonicalize()

    def _canonicalize(self):
        h = self.handle
        k = h.key[0]
        if k == "Integers":
            g = 0
            for x in self.gens:
                _, _, g = xgcd(g, x)
            return ("principal", g)
        if k == "UnivariatePoly":
            g = h.zero()
            for x in self.gens:
                g = h.gcd(g, x) if g else h.monic(x)
            return ("principal", h.canon(g))
        if k == "QuadraticOrder":
            rows = []
            w = (0, 1)
            for g in self.gens:
                rows.append(list(g))
                rows.append(list(h.mul(g, w)))
            H = hnf(rows, 2)
            if H and len(H) == 1:
                raise ValueError("rank 1 lattice cannot be an ideal here")
            return ("lattice", tuple(tuple(r) for r in H))
        if k in ("IntegersMod", "UpperTriangular2"):
            return ("set", _right_ideal_closure(h, self.gens))
        raise HandleMismatch("no ideal support for %r" % (h.key,))

    @property
    def kind(self):
        return self._canon[0]

    @property
    def data(self):
        return self._canon[1]

    def key(self):
        if self.kind == "set":
            return (self.handle.key, "set", tuple(sorted(self.data)))
        return (self.handle.key, self.kind, self.data)

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def is_zero(self):
        h = self.handle
        if self.kind == "principal":
            return self.data == h.zero() or self.data == 0 or self.data == ()
        if self.kind == "lattice":
            return len(self.data) == 0
        return all(x == h.canon(h.zero()) for x in self.data)

    def is_unit_ideal(self):
        return self.contains(self.handle.one())

    def contains(self, x):
        h = self.handle
        x = h.canon(x)
        if self.kind == "set":
            return x in self.data
        if self.kind == "principal":
            g = self.data
            if h.key[0] == "Integers":
                return x % g == 0 if g else x == 0
            if not g:
                return x == ()
            _, r = h.divmod(x, g)
            return r == ()
        H = [list(r) for r in self.data]
        if not H:
            return x == (0, 0)
        # echelon back-substitution in two columns
        v = list(x)
        for row in H:
            piv = 0 if row[0] else 1
            if row[piv] == 0:
                continue
            if v[piv] % row[piv] == 0:
                q = v[piv] // row[piv]
                v = [v[0] - q * row[0], v[1] - q * row[1]]
        return v == [0, 0]

    def contains_ideal(self, other):
        if self.handle != other.handle:
            raise HandleMismatch("ideals over different rings")
        if self.kind == "set":
            return other.data <= self.data
        if self.kind == "lattice":
            return all(self.contains(tuple(r)) for r in other.data)
        return all(self.contains(g) for g in [other.data])

    def element_list(self):
        if self.kind != "set":
            raise HandleMismatch("element lists exist for finite classes only")
        return sorted(self.data)

    def describe(self):
        h = self.handle
        if self.kind == "principal":
            return "(%s)" % h.format(self.data)
        if self.kind == "lattice":
            if not self.data:
                return "(0)"
            rows = ", ".join(
                h.format(tuple(r)) for r in self.data
            )
            return "lattice<%s>" % rows
        return "{%s}" % ", ".join(h.format(x) for x in sorted(self.data))

    def __repr__(self):
        return "Ideal(%s)" % self.describe()


def ideal_sum(I, J):
    if I.handle != J.handle:
        raise HandleMismatch("ideal sum over different rings")
    return Ideal(I.handle, list(I.gens) + list(J.gens))


def ideal_intersect(I, J):
    if I.handle != J.handle:
        raise HandleMismatch("ideal intersection over different rings")
    h = I.handle
    k = h.key[0]
    if k == "Integers":
        a, b = I.data, J.data
        if a == 0 or b == 0:
            return Ideal(h, [0])
        g = xgcd(a, b)[2]
        return Ideal(h, [a * b // g])
    if k == "UnivariatePoly":
        a, b = I.data, J.data
        if not a or not b:
            return Ideal(h, [h.zero()])
        g = h.gcd(a, b)
        q, _ = h.divmod(h.mul(a, b), g)
        return Ideal(h, [h.monic(q)])
    if k == "QuadraticOrder":
        H1 = [list(r) for r in I.data]
        H2 = [list(r) for r in J.data]
        if not H1 or not H2:
            return Ideal(h, [(0, 0)])
        stacked = H1 + [[-t for t in r] for r in H2]
        kb = left_kernel_basis(stacked, 2)
        rows = []
        for x in kb:
            c1 = x[: len(H1)]
            v = [0, 0]
            for c, r in zip(c1, H1):
                v[0] += c * r[0]
                v[1] += c * r[1]
            rows.append(tuple(v))
        return _ideal_from_lattice_rows(h, rows)
    if k in ("IntegersMod", "UpperTriangular2"):
        common = I.data & J.data
        return _ideal_from_set(h, common)
    raise HandleMismatch("no intersection support for %r" % (h.key,))


def _ideal_from_set(handle, elems):
    ideal = Ideal.__new__(Ideal)
    ideal.handle = handle
    zero = handle.canon(handle.zero())
    elems = frozenset(elems) | {zero}
    ideal.gens = sorted(elems)
    ideal._canon = ("set", elems)
    return ideal


def _ideal_from_lattice_rows(handle, rows):
    H = hnf([list(r) for r in rows], 2)
    ideal = Ideal.__new__(Ideal)
    ideal.handle = handle
    ideal.gens = [tuple(r) for r in H] or [(0, 0)]
    ideal._canon = ("lattice", tuple(tuple(r) for r in H))
    return ideal


def colon_ideal(I, s):
    """The right ideal (I : s) = {r : s*r in I}."""
    h = I.handle
    s = h.canon(s)
    k = h.key[0]
    if k == "Integers":
        n = I.data
        if s == 0:
            return Ideal(h, [1])
        if n == 0:
            return Ideal(h, [0])
        g = xgcd(n, s)[2]
        return Ideal(h, [n // g])
    if k == "UnivariatePoly":
        f = I.data
        if s == ():
            return Ideal(h, [h.one()])
        if not f:
            return Ideal(h, [h.zero()])
        g = h.gcd(f, s)
        q, _ = h.divmod(f, g)
        return Ideal(h, [h.monic(q)])
    if k == "QuadraticOrder":
        if s == (0, 0):
            return Ideal(h, [(1, 0)])
        H = [list(r) for r in I.data]
        if not H:
            return Ideal(h, [(0, 0)])
        M = h.mult_matrix(s)
        stacked = M + [[-t for t in r] for r in H]
        kb = left_kernel_basis(stacked, 2)
        rows = [tuple(x[:2]) for x in kb]
        return _ideal_from_lattice_rows(h, rows)
    if k in ("IntegersMod", "UpperTriangular2"):
        hits = {r for r in map(h.canon, h.elements()) if h.mul(s, r) in I.data}
        return _ideal_from_set(h, hits)
    raise HandleMismatch("no colon support for %r" % (h.key,))


def translate_product(scalars, K):
    """The right ideal s_1*K + ... + s_m*K."""
    h = K.handle
    scalars = [h.canon(s) for s in scalars]
    if not scalars:
        raise EmptyGenerators("translate_product needs scalars")
    if K.kind == "set":
        acc = set()
        for s in scalars:
            for x in K.data:
                acc.add(h.mul(s, x))
        # additive closure
        changed = True
        while changed:
            changed = False
            cur = list(acc)
            for x in cur:
                for y in cur:
                    z = h.add(x, y)
                    if z not in acc:
                        acc.add(z)
                        changed = True
        zero = h.canon(h.zero())
        acc.add(zero)
        return _ideal_from_set(h, acc)
    gens = [h.mul(s, g) for s in scalars for g in _ideal_generators(K)]
    nonzero = [g for g in gens if g != h.canon(h.zero())]
    return Ideal(h, nonzero or [h.zero()])


def _ideal_generators(I):
    """A finite generating list derived from the canonical form."""
    if I.kind == "principal":
        return [I.data]
    if I.kind == "lattice":
        return [tuple(r) for r in I.data] or [(0, 0)]
    return sorted(I.data)


class QFMorphism:
    """Morphism R/source -> R/target given by left multiplication by scalar."""

    __slots__ = ("source", "target", "scalar")

    def __init__(self, source, target, scalar):
        if source.handle != target.handle:
            raise HandleMismatch("morphism endpoints over different rings")
        h = source.handle
        scalar = h.canon(scalar)
        for g in _ideal_generators(source):
            if not target.contains(h.mul(scalar, g)):
                raise NotAMorphism(
                    "scalar %s does not carry the source ideal into the target"
                    % h.format(scalar)
                )
        self.source = source
        self.target = target
        self.scalar = scalar

    def __repr__(self):
        return "QFMorphism(%s: %s -> %s)" % (
            self.source.handle.format(self.scalar),
            self.source.describe(),
            self.target.describe(),
        )


def qf_compose(g, f):
    """Composite of f: R/J -> R/I and g: R/I -> R/H, scalar g.scalar*f.scalar."""
    if f.target != g.source:
        raise CompositionMismatch("target of f is not the source of g")
    h = f.source.handle
    return QFMorphism(f.source, g.target, h.mul(g.scalar, f.scalar))


def ideal_power(I, n):
    """I^n via repeated generator products."""
    if n < 1:
        raise ValueError("power must be positive")
    out = I
    for _ in range(n - 1):
        out = translate_product(_ideal_generators(out), I)
    return out


def parse_element(handle, s):
    return handle.parse(s)


def format_element(handle, a):
    return handle.format(a)


def make_handle(spec):
    """Build a handle from a JSON-ish description dict."""
    cls = spec.get("class")
    if cls == "Integers":
        return Integers()
    if cls == "IntegersMod":
        return IntegersMod(int(spec["n"]))
    if cls == "UnivariatePoly":
        field = spec.get("field", "Q")
        if field == "Q":
            return UnivariatePoly(None)
        if isinstance(field, dict):
            return UnivariatePoly(int(field["p"]))
        return UnivariatePoly(int(field))
    if cls == "QuadraticOrder":
        return QuadraticOrder(int(spec["d"]))
    if cls == "UpperTriangular2":
        return UpperTriangular2(int(spec["p"]))
    raise ValueError("unknown ring class: %r" % cls)
