"""Torsion layers, sheafification, and rings of quotients along a base.

The ring of quotients U of a topology base is carried in closed form:
Fractions over the integers, an explicit finite ring presented as maps
out of the least open ideal, or g-power denominators over a quadratic
order once some power of the chain prime turns principal.  The colimit
construction (maps out of deeper and deeper open ideals, multiplied by
composition) is replayed on sampled pairs as a cross-check of each
carrier's multiplication; it is never the working representation,
because fractions admit exact equality testing and the hom colimit
does not.

Every entry point gates on the base's axiom battery: the torsion set is
only a submodule, and the carrier formulas are only correct, when the
filter is closed under meets and translate products.
"""

import random
from fractions import Fraction
from math import gcd

from . import finitemod
from .abgroups import AbMap
from .errors import (
    BadCertificate,
    ChainRequired,
    DepthMismatch,
    HandleMismatch,
    TwoSidedRequired,
    UnsupportedPresentation,
)
from .homalg import (
    FPModule,
    ModuleMap,
    Tower,
    finite_model,
    principal_generator,
    underlying_group,
    zero_fp,
)
from .intlin import solve_in_rows
from .quadlat import FracIdeal, LatticeQuotient, _coords_matrix
from .rings import (
    Ideal,
    Integers,
    IntegersMod,
    RingHandle,
    _ideal_generators,
    ideal_intersect,
    ideal_power,
    ideal_sum,
)
from .topology import check_axioms

CROSSCHECK_PAIRS = 20


def _radical(n):
    """Product of the distinct primes dividing n."""
    n = abs(n)
    if n == 0:
        raise ValueError("the zero integer has no radical")
    out, q = 1, 2
    while q * q <= n:
        if n % q == 0:
            out *= q
            while n % q == 0:
                n //= q
        q += 1
    return out * (n if n > 1 else 1)


def _coprime_part(n, c):
    """Largest divisor of n coprime to c."""
    n = abs(n)
    if n == 0:
        return 0
    g = gcd(n, c)
    while g > 1:
        n //= g
        g = gcd(n, c)
    return n


def _checked_base(B):
    """Run the axiom battery if needed and insist on a clean verdict."""
    if not B.axiom_flags["T4p"].is_verified:
        check_axioms(B)
    for name in ("T0", "T1", "T2", "T3", "T4p"):
        v = B.axiom_flags[name]
        if not v.is_verified:
            raise BadCertificate(
                "base fails axiom %s: %r" % (name, v.witness)
            )
    return B


def _int_chain_data(B, depth):
    """Principal generators g_1 | g_2 | ... to the requested depth.

    Chains extend through their stored rule.  Other base kinds over the
    integers get a synthetic cofinal chain of lcm powers: every (L^k)
    sits inside some member, and every member contains (L^k) for large
    k, so the colimit over the filter is unchanged.
    """
    if B.kind == "chain":
        rule = getattr(B, "rule", None)
        if rule is None:
            depth = min(depth, len(B.ideals))
        gens = []
        for n in range(1, depth + 1):
            I = B.ideals[n - 1] if n <= len(B.ideals) else rule(n)
            g = abs(I.data)
            if g == 0:
                raise UnsupportedPresentation("the zero ideal is not open here")
            gens.append(g)
        return gens, False
    gens0 = [abs(I.data) for I in B.ideals]
    if any(g == 0 for g in gens0):
        raise UnsupportedPresentation("the zero ideal is not open here")
    L = 1
    for g in gens0:
        L = L * g // gcd(L, g)
    return [L ** n for n in range(1, depth + 1)], True


# ----------------------------------------------------------------- torsion


class TorsionReport:
    """The part of a module killed by open ideals, with its complement.

    submodule comes with an inclusion into the ambient module; quotient
    is the cokernel of that inclusion; annihilator_table holds one base
    ideal per chosen submodule generator that kills it.
    """

    __slots__ = ("module", "submodule", "inclusion", "quotient", "annihilator_table")

    def __init__(self, module, submodule, inclusion, quotient, table):
        self.module = module
        self.submodule = submodule
        self.inclusion = inclusion
        self.quotient = quotient
        self.annihilator_table = table

    def is_zero(self):
        return not self.annihilator_table

    def __repr__(self):
        if self.is_zero():
            return "TorsionReport(faithful)"
        return "TorsionReport(%d generators)" % len(self.annihilator_table)


def _zero_report(M):
    h = M.handle
    sub = zero_fp(h, M.side)
    inc = ModuleMap(sub, M, [[h.zero()] * M.ngens])
    quo = FPModule(h, [list(r) for r in M.presentation], M.ngens, M.side)
    return TorsionReport(M, sub, inc, quo, [])


def torsion_submodule(M, B):
    if M.handle != B.handle:
        raise HandleMismatch("module and base over different rings")
    _checked_base(B)
    k = M.handle.key[0]
    if k in ("IntegersMod", "UpperTriangular2"):
        return _torsion_finite(M, B)
    if k == "Integers":
        return _torsion_int(M, B)
    if k == "QuadraticOrder":
        return _torsion_quad(M, B)
    raise HandleMismatch("no torsion support for %r" % (M.handle.key,))


def _fp_on_gens(handle, Mfin, gens, side):
    """Present the submodule of Mfin spanned by gens, by those generators."""
    F = finitemod.free_module(handle, len(gens), side)
    d0 = finitemod.free_cover_map(F, Mfin, gens)
    rows = [
        list(finitemod.decode_free_vector(handle, v, len(gens)))
        for v in finitemod.kernel_module_gens(F, d0)
    ]
    return FPModule(handle, rows, len(gens), side)


def _fp_with_gens(handle, Mfin, side="right"):
    gens = Mfin.module_generators()
    if not gens:
        return zero_fp(handle, side), []
    return _fp_on_gens(handle, Mfin, gens, side), gens


def _torsion_finite(M, B):
    h = M.handle
    Mf = finite_model(M)
    zero = tuple(Mf.zero())
    ring = [h.canon(r) for r in h.elements()]
    tors = []
    for v in Mf.elements():
        ann = {r for r in ring if tuple(Mf.act(list(v), r)) == zero}
        if B.in_filter(Ideal(h, sorted(ann))):
            tors.append(tuple(v))
    target = len(tors)
    gens, covered = [], 1
    for v in sorted(tors):
        if covered == target:
            break
        if not any(v):
            continue
        o = finitemod._span_order(Mf, gens + [list(v)])
        if o > covered:
            gens.append(list(v))
            covered = o
    if covered != target:
        # cannot happen once the meet axiom is verified on the base
        raise UnsupportedPresentation("torsion set failed to close under the action")
    if not gens:
        return _zero_report(M)
    gens = finitemod._prune_generators(Mf, gens, target)
    sub = _fp_on_gens(h, Mf, gens, M.side)
    inc_rows = [list(finitemod.decode_free_vector(h, list(v), M.ngens)) for v in gens]
    inclusion = ModuleMap(sub, M, inc_rows)
    quo = FPModule(
        h, [list(r) for r in M.presentation] + inc_rows, M.ngens, M.side
    )
    table = []
    for g in gens:
        hit = None
        for I in B.ideals:
            if all(tuple(Mf.act(list(g), s)) == zero for s in _ideal_generators(I)):
                hit = I
                break
        if hit is None:
            raise UnsupportedPresentation("generator lost its annihilating ideal")
        table.append(hit)
    return TorsionReport(M, sub, inclusion, quo, table)


def _chain_kill(B, d):
    """(t, ideal): the largest order t | d annihilated by an open ideal,
    with a base member inside the annihilator (t)."""
    seen = [(I, abs(I.data)) for I in B.ideals]
    rule = getattr(B, "rule", None)
    if B.kind == "chain" and rule is not None:
        # deepen until the killed part stops growing
        n = len(B.ideals)
        cur = max((gcd(d, g) for _, g in seen if g), default=1)
        stale = 0
        while stale < 4 and n < len(B.ideals) + 64:
            n += 1
            I = rule(n)
            g = abs(I.data)
            seen.append((I, g))
            t = gcd(d, g)
            if t > cur:
                cur, stale = t, 0
            else:
                stale += 1
    best, hit = 1, None
    for I, g in seen:
        if g == 0:
            continue
        t = gcd(d, g)
        if t > best:
            best, hit = t, I
    return best, hit


def _torsion_int(M, B):
    h = M.handle
    G = underlying_group(M)
    T, diag = G.smith_transform()
    n = G.ngens
    gens, orders, table = [], [], []
    for i, d in enumerate(diag):
        if d == 0:
            continue
        t, hit = _chain_kill(B, d)
        if t <= 1:
            continue
        q = d // t
        e = [1 if j == i else 0 for j in range(n)]
        row = solve_in_rows(e, [list(r) for r in T], n)
        gens.append([q * x for x in row])
        orders.append(t)
        table.append(hit)
    if not gens:
        return _zero_report(M)
    pres = []
    for i, t in enumerate(orders):
        row = [0] * len(gens)
        row[i] = t
        pres.append(row)
    sub = FPModule(h, pres, len(gens), M.side)
    inclusion = ModuleMap(sub, M, gens)
    quo = FPModule(
        h, [list(r) for r in M.presentation] + [list(g) for g in gens], M.ngens, M.side
    )
    return TorsionReport(M, sub, inclusion, quo, table)


def _torsion_quad(M, B):
    free, tors = underlying_group(M).invariants()
    if tors:
        raise UnsupportedPresentation(
            "torsion over the quadratic order is outside the supported classes"
        )
    return _zero_report(M)


# ----------------------------------------------------------- sheafification


class ColimitDescription:
    """Truncated colimit of the maps out of a chain of open ideals.

    kind "module": the system stabilizes within the depth and .module is
    the stable value.  kind "fractions": the free part localizes; the
    record keeps the denominator radical and the surviving torsion.
    kind "system": no stabilization within the depth, only the truncated
    tower is returned.  The materialized tower rides along in .system
    either way (levels are the module itself, transitions multiply by
    the ratio of consecutive chain generators).
    """

    __slots__ = (
        "kind",
        "handle",
        "module",
        "free_rank",
        "denominator_base",
        "torsion_residues",
        "system",
        "stabilized_at",
    )

    def __init__(self, kind, handle, module=None, free_rank=0, denominator_base=None,
                 torsion_residues=(), system=None, stabilized_at=None):
        self.kind = kind
        self.handle = handle
        self.module = module
        self.free_rank = free_rank
        self.denominator_base = denominator_base
        self.torsion_residues = list(torsion_residues)
        self.system = system
        self.stabilized_at = stabilized_at

    def truncation_module(self):
        """The value at the deepest materialized level, as one module."""
        if self.kind == "module":
            return self.module
        if self.kind != "fractions":
            raise UnsupportedPresentation("a truncated system has no single value")
        h = self.handle
        n = self.free_rank + len(self.torsion_residues)
        if n == 0:
            return zero_fp(h)
        rows = []
        for j, q in enumerate(self.torsion_residues):
            row = [h.zero()] * n
            row[j] = q
            rows.append(row)
        return FPModule(h, rows, n)

    def __repr__(self):
        if self.kind == "module":
            return "ColimitDescription(module, stabilized_at=%r)" % self.stabilized_at
        if self.kind == "fractions":
            return "ColimitDescription(fractions, base=%r, free=%d, residues=%r)" % (
                self.denominator_base,
                self.free_rank,
                self.torsion_residues,
            )
        return "ColimitDescription(system, depth=%d)" % self.system.depth


def sheafify(N, B, depth=4):
    if N.handle != B.handle:
        raise HandleMismatch("module and base over different rings")
    _checked_base(B)
    k = N.handle.key[0]
    if k == "Integers":
        return _sheafify_int(N, B, depth)
    if k == "QuadraticOrder":
        return _sheafify_quad(N, B, depth)
    if k in ("IntegersMod", "UpperTriangular2"):
        return _sheafify_finite(N, B)
    raise ChainRequired("no chain machinery over %r" % (N.handle.key,))


def _scalar_map(N, r):
    h = N.handle
    z = h.zero()
    rows = [[r if i == j else z for j in range(N.ngens)] for i in range(N.ngens)]
    return ModuleMap(N, N, rows)


def _sheafify_int(N, B, depth):
    h = N.handle
    gens, _ = _int_chain_data(B, depth)
    depth = len(gens)
    _, diag = underlying_group(N).smith_transform()
    L = 1
    for g in gens:
        L = L * g // gcd(L, g)
    # the axiom gate makes the chain generators cofinal in the filter,
    # so the radical of their lcm is the whole denominator support
    c = _radical(L)
    free = sum(1 for d in diag if d == 0)
    residues = sorted(
        q for q in (_coprime_part(d, c) for d in diag if d) if q > 1
    )
    levels = [N] * depth
    maps = [_scalar_map(N, gens[i + 1] // gens[i]) for i in range(depth - 1)]
    system = Tower("direct", levels, maps)
    if free > 0:
        return ColimitDescription(
            "fractions", h, free_rank=free, denominator_base=c,
            torsion_residues=residues, system=system,
        )
    target = 1
    for q in residues:
        target *= q
    stabilized_at = None
    for n0 in range(1, depth + 1):
        ratio = gens[n0 - 1] // gens[0]
        order = 1
        for d in diag:
            if d:
                order *= d // gcd(d, ratio)
        if order == target:
            stabilized_at = n0
            break
    if stabilized_at is None:
        return ColimitDescription("system", h, system=system)
    if not residues:
        module = zero_fp(h, N.side)
    else:
        rows = []
        for j, q in enumerate(residues):
            row = [0] * len(residues)
            row[j] = q
            rows.append(row)
        module = FPModule(h, rows, len(residues), N.side)
    return ColimitDescription(
        "module", h, module=module, torsion_residues=residues,
        denominator_base=c, system=system, stabilized_at=stabilized_at,
    )


def _quad_power_data(B, depth):
    """(prime ideal, exponent m, generator g) with prime^m = (g)."""
    h = B.handle
    if B.kind != "chain":
        raise ChainRequired("a chain base is required over the quadratic order")
    I1 = B.ideals[0]
    for n, I in enumerate(B.ideals[1:], start=2):
        if I != ideal_power(I1, n):
            raise UnsupportedPresentation(
                "quadratic chains must run through powers of the first member"
            )
    F = FracIdeal.from_ideal(I1)
    for m in range(1, 2 * depth + 3):
        g = principal_generator(h, F.power(m))
        if g is not None:
            return I1, m, g
    raise UnsupportedPresentation("no principal power within the search bound")


def _sheafify_quad(N, B, depth):
    h = N.handle
    if N.presentation:
        raise UnsupportedPresentation("only relation-free modules localize here")
    _, m, g = _quad_power_data(B, depth)
    # transitions are sampled at the principal stages, where restriction
    # is plain multiplication by g
    levels = [N] * depth
    maps = [_scalar_map(N, g) for _ in range(depth - 1)]
    return ColimitDescription(
        "fractions", h, free_rank=N.ngens, denominator_base=g,
        system=Tower("direct", levels, maps),
    )


def _meet_ideal(B):
    I0 = B.ideals[0]
    for I in B.ideals[1:]:
        I0 = ideal_intersect(I0, I)
    return I0


def _require_two_sided(handle, I):
    for r in handle.elements():
        for x in _ideal_generators(I):
            if handle.mul(r, x) not in I.data:
                raise TwoSidedRequired("the least open ideal is not two-sided")


def _left_mult_rows(handle, b):
    basis = finitemod.ring_additive_basis(handle)
    return [finitemod.ring_coeffs(handle, handle.mul(b, e)) for e in basis]


def _sheafify_finite(N, B):
    """Stable value Hom(I0, N) at the least open ideal I0."""
    h = N.handle
    I0 = _meet_ideal(B)
    _require_two_sided(h, I0)
    Nf = finite_model(N)
    Rf = finitemod.regular_module(h)
    i0_vecs = [finitemod.ring_coeffs(h, g) for g in _ideal_generators(I0)]
    S, incl = finitemod.submodule(Rf, i0_vecs)
    K, hd, kincl = finitemod.hom_group(S, Nf)
    sub_rows = [list(r) for r in incl.M]
    acts = []
    for b in finitemod.ring_additive_basis(h):
        lamQ = AbMap(Rf.group, Rf.group, _left_mult_rows(h, b))
        rows_lam = []
        for grow in incl.M:
            img = Rf.group.reduce(lamQ(list(grow)))
            rows_lam.append(finitemod._coords_in(sub_rows, Rf, img))
        lamS = AbMap(S.group, S.group, rows_lam)
        rows = []
        for j in range(K.ngens):
            f = hd.to_map(hd.group.reduce(kincl(list(K.gen(j)))))
            g = f.compose(lamS)
            hvec = hd.from_map(g)
            stacked = [list(r) for r in kincl.M] + [list(r) for r in hd.group.rels]
            x = solve_in_rows(list(hvec), stacked, hd.group.ngens)
            if x is None:
                raise UnsupportedPresentation("hom action escaped the linear maps")
            rows.append(list(K.reduce(x[: K.ngens])))
        acts.append(AbMap(K, K, rows))
    Hfin = finitemod.FiniteModule(h, K, acts, N.side)
    module, _ = _fp_with_gens(h, Hfin, N.side)
    return ColimitDescription(
        "module", h, module=module, system=Tower("direct", [module], []),
        stabilized_at=1,
    )


# ------------------------------------------------------------- the carrier


class FullMatrix2(RingHandle):
    """All 2x2 matrices over F_p; element (a, b, c, d) row by row."""

    is_commutative = False
    is_finite = True

    def __init__(self, p):
        if p < 2:
            raise ValueError("characteristic must be prime")
        self.p = p

    @property
    def key(self):
        return ("FullMatrix2", self.p)

    def zero(self):
        return (0, 0, 0, 0)

    def one(self):
        return (1, 0, 0, 1)

    def canon(self, a):
        return (a[0] % self.p, a[1] % self.p, a[2] % self.p, a[3] % self.p)

    def add(self, a, b):
        return self.canon((a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]))

    def neg(self, a):
        return self.canon((-a[0], -a[1], -a[2], -a[3]))

    def mul(self, a, b):
        return self.canon(
            (
                a[0] * b[0] + a[1] * b[2],
                a[0] * b[1] + a[1] * b[3],
                a[2] * b[0] + a[3] * b[2],
                a[2] * b[1] + a[3] * b[3],
            )
        )

    def elements(self):
        p = self.p
        return [
            (a, b, c, d)
            for a in range(p)
            for b in range(p)
            for c in range(p)
            for d in range(p)
        ]

    def generators(self):
        return [(0, 1, 0, 0), (0, 0, 1, 0)]

    def format(self, a):
        a = self.canon(a)
        return "[[%d,%d],[%d,%d]]" % a


class _FiniteEngine:
    """Maps out of the least open ideal of a finite ring, composed.

    Elements are image-index vectors over the enumerated ideal; addition
    is pointwise, multiplication is composition (right factor applied
    first), and the unit map sends r to left multiplication by r."""

    __slots__ = (
        "handle", "Q", "S", "incl", "elems_S", "idx_S", "elems_Q", "idx_Q",
        "add_Q", "maps", "s_of_q", "zero", "one", "torsion", "_ucache", "_hompres",
    )

    def __init__(self, handle, B):
        self.handle = handle
        I0 = _meet_ideal(B)
        _require_two_sided(handle, I0)
        ring = [handle.canon(r) for r in handle.elements()]
        z = handle.canon(handle.zero())
        self.torsion = sorted(
            r for r in ring
            if B.in_filter(Ideal(handle, sorted(
                s for s in ring if handle.mul(r, s) == z
            )))
        )
        Rf = finitemod.regular_module(handle)
        self.Q, _ = finitemod.quotient_module(
            Rf, [finitemod.ring_coeffs(handle, t) for t in self.torsion]
        )
        i0_vecs = [
            list(self.Q.group.reduce(finitemod.ring_coeffs(handle, g)))
            for g in _ideal_generators(I0)
        ]
        self.S, self.incl = finitemod.submodule(self.Q, i0_vecs)
        self.elems_S = [tuple(e) for e in self.S.group.elements()]
        self.idx_S = {e: i for i, e in enumerate(self.elems_S)}
        self.elems_Q = [tuple(e) for e in self.Q.group.elements()]
        self.idx_Q = {e: i for i, e in enumerate(self.elems_Q)}
        self.add_Q = self.Q.tables()[2]
        self.s_of_q = {}
        for i, v in enumerate(self.elems_S):
            qv = tuple(self.Q.group.reduce(self.incl(list(v))))
            self.s_of_q[self.idx_Q[qv]] = i
        self.maps = [tuple(f) for f in finitemod.all_module_maps(self.S, self.Q)]
        for f in self.maps:
            if any(fi not in self.s_of_q for fi in f):
                raise UnsupportedPresentation(
                    "multiplication does not close at the least open ideal"
                )
        self._ucache = {}
        self._hompres = None
        zq = self.idx_Q[tuple(self.Q.group.reduce(self.Q.zero()))]
        self.zero = tuple(zq for _ in self.elems_S)
        self.one = self.u_raw(handle.one())

    def u_raw(self, r):
        r = self.handle.canon(r)
        got = self._ucache.get(r)
        if got is not None:
            return got
        lam = AbMap(self.Q.group, self.Q.group, _left_mult_rows(self.handle, r))
        f = []
        for v in self.elems_S:
            qv = self.Q.group.reduce(self.incl(list(v)))
            f.append(self.idx_Q[tuple(self.Q.group.reduce(lam(list(qv))))])
        f = tuple(f)
        self._ucache[r] = f
        return f

    def add(self, f, g):
        return tuple(self.add_Q[a][b] for a, b in zip(f, g))

    def neg(self, f):
        out = []
        for a in f:
            v = [-x for x in self.elems_Q[a]]
            out.append(self.idx_Q[tuple(self.Q.group.reduce(v))])
        return tuple(out)

    def mul(self, f, g):
        # compose: apply g first, then f through the ideal coordinates
        return tuple(f[self.s_of_q[gi]] for gi in g)

    def hom_presentation(self):
        """(K, to_raw, from_raw): the additive group of the carrier."""
        if self._hompres is not None:
            return self._hompres
        K, hd, kincl = finitemod.hom_group(self.S, self.Q)
        H = hd.group
        unit_rows = []
        for j in range(self.S.group.ngens):
            e = [1 if t == j else 0 for t in range(self.S.group.ngens)]
            unit_rows.append(self.idx_S[tuple(self.S.group.reduce(e))])

        def to_raw(kvec):
            am = hd.to_map(H.reduce(kincl(list(kvec))))
            return tuple(
                self.idx_Q[tuple(self.Q.group.reduce(am(list(e))))]
                for e in self.elems_S
            )

        def from_raw(f):
            rows = [list(self.elems_Q[f[i]]) for i in unit_rows]
            hvec = hd.from_map(AbMap(self.S.group, self.Q.group, rows))
            stacked = [list(r) for r in kincl.M] + [list(r) for r in H.rels]
            x = solve_in_rows(list(hvec), stacked, H.ngens)
            if x is None:
                raise UnsupportedPresentation("map escaped the linear ones")
            return list(K.reduce(x[: K.ngens]))

        self._hompres = (K, to_raw, from_raw)
        return self._hompres


def _identify_finite(engine, handle):
    """(kind, carrier, to_carrier dict) for the enumerated quotient ring."""
    n = len(engine.maps)
    # unit bijective: the quotient collapses back onto the ring itself
    if n == len(handle.elements()):
        table = {}
        for r in handle.elements():
            table[engine.u_raw(handle.canon(r))] = handle.canon(r)
        if len(table) == n:
            return "ring", handle, table
    # commutative cyclic: additive multiples of the identity cover U
    if getattr(handle, "is_commutative", True):
        table, x, k = {engine.zero: 0}, engine.zero, 0
        while True:
            x = engine.add(x, engine.one)
            k += 1
            if x == engine.zero:
                break
            table[x] = k
        if k == n and k >= 2:
            return "modular", IntegersMod(k), table
    # a pair of ideal generators carrying a full matrix ring
    if handle.key[0] == "UpperTriangular2" and engine.S.group.ngens == 2:
        p = handle.p
        if n == p ** 4:
            table = {}
            for f in engine.maps:
                cols = []
                for j in range(2):
                    e = [1 if t == j else 0 for t in range(2)]
                    i = engine.idx_S[tuple(engine.S.group.reduce(e))]
                    cols.append(engine.elems_S[engine.s_of_q[f[i]]])
                table[f] = (
                    cols[0][0] % p, cols[1][0] % p, cols[0][1] % p, cols[1][1] % p
                )
            if len(set(table.values())) == n:
                return "matrix", FullMatrix2(p), table
    return "opaque", None, None


class QuotientRing:
    """U = (R/torsion) localized along the base, with the unit map u.

    kind "fractions": elements are Fractions with denominators supported
    on .base.  kind "lattice": elements are pairs of Fractions over a
    quadratic order, denominators are powers of .base.  kind "finite":
    elements live in the identified carrier handle (or as raw map
    vectors when no identification applies)."""

    __slots__ = (
        "handle", "kind", "depth", "base", "chain_gens", "prime",
        "principal_power", "carrier", "unit_images", "checks",
        "_engine", "_ident_kind", "_to_carrier", "_from_carrier",
    )

    def __init__(self, handle, kind, depth):
        self.handle = handle
        self.kind = kind
        self.depth = depth
        self.base = None
        self.chain_gens = None
        self.prime = None
        self.principal_power = None
        self.carrier = None
        self.unit_images = {}
        self.checks = {}
        self._engine = None
        self._ident_kind = None
        self._to_carrier = None
        self._from_carrier = None

    # ------------------------------------------------------- arithmetic

    def zero(self):
        if self.kind == "fractions":
            return Fraction(0)
        if self.kind == "lattice":
            return (Fraction(0), Fraction(0))
        return self._wrap(self._engine.zero)

    def one(self):
        if self.kind == "fractions":
            return Fraction(1)
        if self.kind == "lattice":
            return (Fraction(1), Fraction(0))
        return self._wrap(self._engine.one)

    def u(self, r):
        r = self.handle.canon(r)
        if self.kind == "fractions":
            return Fraction(r)
        if self.kind == "lattice":
            return (Fraction(r[0]), Fraction(r[1]))
        return self._wrap(self._engine.u_raw(r))

    def add(self, x, y):
        if self.kind == "fractions":
            return x + y
        if self.kind == "lattice":
            return (x[0] + y[0], x[1] + y[1])
        return self._wrap(self._engine.add(self._unwrap(x), self._unwrap(y)))

    def neg(self, x):
        if self.kind == "fractions":
            return -x
        if self.kind == "lattice":
            return (-x[0], -x[1])
        return self._wrap(self._engine.neg(self._unwrap(x)))

    def mul(self, x, y):
        if self.kind == "fractions":
            return x * y
        if self.kind == "lattice":
            d = self.handle.d
            return (x[0] * y[0] + d * x[1] * y[1], x[0] * y[1] + x[1] * y[0])
        return self._wrap(self._engine.mul(self._unwrap(x), self._unwrap(y)))

    def eq(self, x, y):
        return x == y

    def _wrap(self, raw):
        if self._to_carrier is None:
            return raw
        return self._to_carrier[raw]

    def _unwrap(self, x):
        if self._from_carrier is None:
            return x
        return self._from_carrier[x]

    # ------------------------------------------------------- membership

    def contains(self, x):
        if self.kind == "fractions":
            if isinstance(x, int):
                return True
            if not isinstance(x, Fraction):
                return False
            return _coprime_part(x.denominator, self.base) == 1

        if self.kind == "lattice":
            try:
                a, b = Fraction(x[0]), Fraction(x[1])
            except (TypeError, ValueError, IndexError):
                return False
            den = a.denominator * b.denominator // gcd(a.denominator, b.denominator)
            norm = abs(self.handle.norm(self.base))
            if norm == 0 or _coprime_part(den, norm) != 1:
                return den == 1
            cur = (a, b)
            cap = 2 * max(den.bit_length(), 1) + 4
            for _ in range(cap):
                if cur[0].denominator == 1 and cur[1].denominator == 1:
                    return True
                g0, g1 = self.base
                cur = (cur[0] * g0 + self.handle.d * cur[1] * g1,
                       cur[0] * g1 + cur[1] * g0)
            return cur[0].denominator == 1 and cur[1].denominator == 1
        return self._unwrap(x) in set(self._engine.maps)

    def elements(self):
        if self.kind != "finite":
            raise HandleMismatch("not a finite ring of quotients")
        return [self._wrap(f) for f in self._engine.maps]

    def order(self):
        if self.kind != "finite":
            raise HandleMismatch("not a finite ring of quotients")
        return len(self._engine.maps)

    def kernel_of_unit(self):
        h = self.handle
        if self.kind == "fractions":
            return Ideal(h, [0])
        if self.kind == "lattice":
            return Ideal(h, [(0, 0)])
        ker = [r for r in h.elements()
               if self._engine.u_raw(h.canon(r)) == self._engine.zero]
        return Ideal(h, sorted(h.canon(r) for r in ker))

    # ---------------------------------------------------------- display

    def format_element(self, x):
        if self.kind == "fractions":
            return str(x)
        if self.kind == "lattice":
            if x[1] == 0:
                return str(x[0])
            return "(%s) + (%s)w" % (x[0], x[1])
        if self.carrier is not None:
            return self.carrier.format(x)
        return "map#%d" % self._engine.maps.index(x)

    def describe(self):
        if self.kind == "fractions":
            return "Z[1/%d]" % self.base if self.base > 1 else "Z"
        if self.kind == "lattice":
            return "order[1/%s]" % self.handle.format(self.base)
        if self._ident_kind == "modular":
            return "Z/%d" % self.carrier.n
        if self._ident_kind == "matrix":
            return "M2(F_%d)" % self.carrier.p
        if self._ident_kind == "ring":
            return "the ring itself"
        return "finite ring of order %d" % len(self._engine.maps)

    def as_record(self):
        rec = {
            "kind": self.kind,
            "carrier": self.describe(),
            "unit_generator_images": dict(self.unit_images),
        }
        if self.kind == "fractions":
            rec["denominator_base"] = self.base
        elif self.kind == "lattice":
            rec["denominator_base"] = self.handle.format(self.base)
            rec["principal_power"] = self.principal_power
        else:
            rec["order"] = len(self._engine.maps)
        return rec

    def __repr__(self):
        return "QuotientRing(%s)" % self.describe()


def _frac_level(x, c):
    """Least k with x * c^k integral; only called on members of U."""
    x = Fraction(x)
    k = 0
    while (x * c ** k).denominator != 1:
        k += 1
    return k


def _lat_split(U, x):
    """(integral pair, k) with x = pair / base^k, k minimal."""
    h = U.handle
    g = (Fraction(U.base[0]), Fraction(U.base[1]))
    cur, k = (Fraction(x[0]), Fraction(x[1])), 0
    while cur[0].denominator != 1 or cur[1].denominator != 1:
        cur = (cur[0] * g[0] + h.d * cur[1] * g[1], cur[0] * g[1] + cur[1] * g[0])
        k += 1
    return (int(cur[0]), int(cur[1])), k


def _construction_product(U, x, y):
    """Multiply through the hom-colimit formula: numerators compose,
    levels add."""
    if U.kind == "fractions":
        c = U.base
        kx, ky = _frac_level(x, c), _frac_level(y, c)
        a, b = int(x * c ** kx), int(y * c ** ky)
        return Fraction(a * b, c ** (kx + ky))
    if U.kind == "lattice":
        (ax, kx), (ay, ky) = _lat_split(U, x), _lat_split(U, y)
        prod = U.handle.mul(ax, ay)
        num = (Fraction(prod[0]), Fraction(prod[1]))
        n = abs(U.handle.norm(U.base))
        ginv = (Fraction(U.base[0], n), Fraction(-U.base[1], n))
        out = num
        for _ in range(kx + ky):
            out = (out[0] * ginv[0] + U.handle.d * out[1] * ginv[1],
                   out[0] * ginv[1] + out[1] * ginv[0])
        return out
    return U._wrap(U._engine.mul(U._unwrap(x), U._unwrap(y)))


def _random_element(U, rng):
    if U.kind == "fractions":
        return Fraction(rng.randint(-30, 30), U.base ** rng.randint(0, 3))
    if U.kind == "lattice":
        n = abs(U.handle.norm(U.base))
        ginv = (Fraction(U.base[0], n), Fraction(-U.base[1], n))
        out = (Fraction(rng.randint(-9, 9)), Fraction(rng.randint(-9, 9)))
        for _ in range(rng.randint(0, 2)):
            out = (out[0] * ginv[0] + U.handle.d * out[1] * ginv[1],
                   out[0] * ginv[1] + out[1] * ginv[0])
        return out
    return U._wrap(rng.choice(U._engine.maps))


def _run_checks(U, seed=0):
    h = U.handle
    sample = h.sample_elements()
    pairs = 0
    one = U.one()
    if not U.eq(U.u(h.one()), one):
        raise BadCertificate("unit map misses the identity")
    for a in sample:
        for b in sample:
            lhs = U.u(h.add(a, b))
            if not U.eq(lhs, U.add(U.u(a), U.u(b))):
                raise BadCertificate("unit map is not additive")
            lhs = U.u(h.mul(a, b))
            if not U.eq(lhs, U.mul(U.u(a), U.u(b))):
                raise BadCertificate("unit map is not multiplicative")
            pairs += 1
    rng = random.Random(seed)
    gens = [U.u(g) for g in h.generators()]
    pool = [(a, b) for a in gens for b in gens]
    pool += [
        (_random_element(U, rng), _random_element(U, rng))
        for _ in range(CROSSCHECK_PAIRS)
    ]
    for x, y in pool:
        if not U.eq(U.mul(x, y), _construction_product(U, x, y)):
            raise BadCertificate(
                "carrier multiplication diverges from the colimit construction"
            )
    U.checks = {
        "unit_hom_pairs": pairs,
        "multiplication_pairs": len(pool),
        "seed": seed,
    }


def ring_of_quotients(B, depth=4):
    _checked_base(B)
    h = B.handle
    k = h.key[0]
    if k == "Integers":
        gens, _ = _int_chain_data(B, depth)
        L = 1
        for g in gens:
            L = L * g // gcd(L, g)
        U = QuotientRing(h, "fractions", depth)
        U.base = _radical(L)
        U.chain_gens = gens
    elif k in ("IntegersMod", "UpperTriangular2"):
        U = QuotientRing(h, "finite", depth)
        U._engine = _FiniteEngine(h, B)
        kind, carrier, table = _identify_finite(U._engine, h)
        U._ident_kind = kind
        U.carrier = carrier
        if table is not None:
            U._to_carrier = table
            U._from_carrier = {v: kk for kk, v in table.items()}
    elif k == "QuadraticOrder":
        prime, m, g = _quad_power_data(B, depth)
        U = QuotientRing(h, "lattice", depth)
        U.base = g
        U.prime = prime
        U.principal_power = m
    else:
        raise HandleMismatch("no ring of quotients for %r" % (h.key,))
    U.unit_images = {
        h.format(g): U.format_element(U.u(g)) for g in h.generators()
    }
    _run_checks(U)
    return U


# ---------------------------------------------------------- divisibility


class PerfectReport:
    """Divisibility verdict: every materialized open ideal carries a
    certificate sum(s_k * v_k) = 1 with s_k in the ideal, v_k in U."""

    __slots__ = ("perfect", "certificates", "failure")

    def __init__(self, perfect, certificates, failure):
        self.perfect = perfect
        self.certificates = certificates
        self.failure = failure

    def __repr__(self):
        if self.perfect:
            return "PerfectReport(perfect, %d certificates)" % len(self.certificates)
        return "PerfectReport(failed at %s)" % self.failure["ideal"].describe()


def _certificate_terms(I, U):
    h = U.handle
    if U.kind == "fractions":
        g = abs(I.data)
        if g == 0:
            return None, "the zero ideal divides nothing"
        rem = _coprime_part(g, U.base)
        if rem != 1:
            return None, rem
        return [(g, Fraction(1, g))], None
    if U.kind == "finite":
        one = U.one()
        scalars = sorted(I.data)
        elems = U.elements()
        for s in scalars:
            us = U.u(s)
            for v in elems:
                if U.eq(U.mul(us, v), one):
                    return [(s, v)], None
        for s1 in scalars:
            u1 = U.u(s1)
            for v1 in elems:
                t1 = U.mul(u1, v1)
                for s2 in scalars:
                    u2 = U.u(s2)
                    for v2 in elems:
                        if U.eq(U.add(t1, U.mul(u2, v2)), one):
                            return [(s1, v1), (s2, v2)], None
        return None, "no short combination reaches one"
    if I.is_zero():
        return None, "the zero ideal divides nothing"
    F = FracIdeal.from_ideal(I)
    basis = F.inverse().basis()
    gens = _ideal_generators(I)
    rows = []
    for s in gens:
        for v in basis:
            prod = (Fraction(s[0]) * v[0] + h.d * Fraction(s[1]) * v[1],
                    Fraction(s[0]) * v[1] + Fraction(s[1]) * v[0])
            rows.append([int(prod[0]), int(prod[1])])
    x = solve_in_rows([1, 0], rows, 2)
    if x is None:
        return None, "one is not reached by the inverse lattice"
    terms = []
    for t, coeff in enumerate(x):
        if coeff == 0:
            continue
        s = gens[t // len(basis)]
        v = basis[t % len(basis)]
        terms.append(((coeff * s[0], coeff * s[1]), v))
    return terms, None


def check_perfect(B, U):
    if B.handle != U.handle:
        raise HandleMismatch("base and quotient ring over different rings")
    certs = []
    for I in B.ideals:
        terms, witness = _certificate_terms(I, U)
        if terms is None:
            return PerfectReport(
                False, certs, {"ideal": I, "witness": witness}
            )
        acc = U.zero()
        for s, v in terms:
            if not I.contains(s):
                raise BadCertificate("scalar escaped its ideal during the search")
            acc = U.add(acc, U.mul(U.u(s), v))
        if not U.eq(acc, U.one()):
            raise BadCertificate("certificate terms do not sum to one")
        certs.append({"ideal": I, "terms": terms, "ring": U})
    return PerfectReport(True, certs, None)


# ------------------------------------------------------------- the tower


def unit_module_data(U):
    """The carrier as a module over its own ring, with R -> U -> U/u(R).

    Only available for finite carriers, where the hom group admits a
    finite presentation; the maps come back as ModuleMaps over R."""
    if U.kind != "finite":
        raise HandleMismatch("explicit unit-module data needs a finite carrier")
    eng = U._engine
    h = U.handle
    K, to_raw, from_raw = eng.hom_presentation()
    basis = finitemod.ring_additive_basis(h)
    acts = []
    for b in basis:
        ub = eng.u_raw(b)
        rows = [
            from_raw(eng.mul(to_raw(list(K.gen(j))), ub)) for j in range(K.ngens)
        ]
        acts.append(AbMap(K, K, rows))
    Ufin = finitemod.FiniteModule(h, K, acts, "right")
    Ufp, ugens = _fp_with_gens(h, Ufin)
    Rfp = FPModule(h, [], 1)
    one_vec = list(K.reduce(from_raw(eng.one)))
    if not ugens:
        raise UnsupportedPresentation("the quotient ring lost its identity")
    F = finitemod.free_module(h, len(ugens))
    d0 = finitemod.free_cover_map(F, Ufin, ugens)
    urow = _free_preimage_row(h, d0, Ufin, one_vec, len(ugens))
    unit = ModuleMap(Rfp, Ufp, [urow])
    Qfin, _ = finitemod.quotient_module(Ufin, [one_vec])
    Qfp, qgens = _fp_with_gens(h, Qfin)
    if not qgens:
        proj = ModuleMap(Ufp, Qfp, [[h.zero()] * Qfp.ngens] * Ufp.ngens)
    else:
        Fq = finitemod.free_module(h, len(qgens))
        dq = finitemod.free_cover_map(Fq, Qfin, qgens)
        rows = []
        for g in ugens:
            img = list(Qfin.group.reduce(list(g)))
            rows.append(_free_preimage_row(h, dq, Qfin, img, len(qgens)))
        proj = ModuleMap(Ufp, Qfp, rows)
    return {"module": Ufp, "quotient": Qfp, "unit": unit, "projection": proj}


def unit_module_left(U):
    """The carrier as a left module over its ring.

    Pairs with unit_module_data's right view as tensor input when the
    ring is one-sided; the action is multiplication by u(r) from the
    left."""
    if U.kind != "finite":
        raise HandleMismatch("explicit unit-module data needs a finite carrier")
    eng = U._engine
    h = U.handle
    K, to_raw, from_raw = eng.hom_presentation()
    acts = []
    for b in finitemod.ring_additive_basis(h):
        ub = eng.u_raw(b)
        rows = [
            from_raw(eng.mul(ub, to_raw(list(K.gen(j))))) for j in range(K.ngens)
        ]
        acts.append(AbMap(K, K, rows))
    Ufin = finitemod.FiniteModule(h, K, acts, "left")
    return _fp_with_gens(h, Ufin, "left")[0]


def _free_preimage_row(handle, d0, Mfin, v, rank):
    stacked = [list(r) for r in d0.M] + [list(r) for r in Mfin.group.rels]
    x = solve_in_rows(list(v), stacked, Mfin.group.ngens)
    if x is None:
        raise UnsupportedPresentation("vector escaped the generator span")
    width = len(d0.M)
    return list(finitemod.decode_free_vector(handle, x[:width], rank))


def _lattice_tower(U, depth):
    Z = Integers()
    P = FracIdeal.from_ideal(U.prime)
    unit = FracIdeal.unit(U.handle)
    lattices = [P.power(-n) for n in range(1, depth + 1)]
    levels = []
    for L in lattices:
        rels = _coords_matrix(unit, L)
        levels.append(FPModule(Z, [list(r) for r in rels], 2))
    maps = []
    for n in range(depth - 1):
        T = _coords_matrix(lattices[n], lattices[n + 1])
        maps.append(ModuleMap(levels[n], levels[n + 1], [list(r) for r in T]))
    return Tower("direct", levels, maps)


def u_over_r_tower(U, depth=4):
    """U/u(R) as a truncated direct system of presented modules.

    Fraction carriers produce cyclic levels Z/c^n with multiplication-
    by-c transitions; lattice carriers present the inverse-power
    quotients additively, in basis coordinates; finite carriers are a
    single stable level."""
    if U.kind == "fractions":
        Z = U.handle
        c = U.base
        levels = [FPModule(Z, [[c ** n]], 1) for n in range(1, depth + 1)]
        maps = [
            ModuleMap(levels[n], levels[n + 1], [[c]]) for n in range(depth - 1)
        ]
        return Tower("direct", levels, maps)
    if U.kind == "lattice":
        return _lattice_tower(U, depth)
    return Tower("direct", [unit_module_data(U)["quotient"]], [])


# ------------------------------------------------- annihilator preimages


def _joint_annihilator(U, cofactors, K):
    h = U.handle
    if U.kind == "fractions":
        c = U.base
        if K.levels and K.levels[0].presentation != [[c]]:
            raise HandleMismatch("tower does not present U/R for this carrier")
        out = 1
        for v in cofactors:
            lvl = _frac_level(v, c) if c > 1 else 0
            if lvl > K.depth:
                raise DepthMismatch(
                    "cofactor lives beyond the materialized tower"
                )
            if lvl == 0:
                continue
            a = int(Fraction(v) * c ** lvl)
            ann = c ** lvl // gcd(a, c ** lvl)
            out = out * ann // gcd(out, ann)
        return Ideal(h, [out])
    if U.kind == "lattice":
        P = FracIdeal.from_ideal(U.prime)
        unit = FracIdeal.unit(h)
        out = None
        for v in cofactors:
            lvl = None
            for n in range(0, K.depth + 1):
                if P.power(-n).contains(v):
                    lvl = n
                    break
            if lvl is None:
                raise DepthMismatch(
                    "cofactor lives beyond the materialized tower"
                )
            if lvl == 0:
                continue
            LQ = LatticeQuotient(P.power(-lvl), unit)
            ann = LQ.annihilator(LQ.to_group(v))
            out = ann if out is None else ideal_intersect(out, ann)
        if out is None:
            return Ideal(h, [(1, 0)])
        return out
    image = {U._unwrap(U.u(r)) for r in h.elements()}
    hits = []
    for r in h.elements():
        r = h.canon(r)
        ur = U.u(r)
        if all(U._unwrap(U.mul(v, ur)) in image for v in cofactors):
            hits.append(r)
    return Ideal(h, sorted(hits))


def annihilator_preimage(certificate, K):
    """The joint annihilator of the certificate cofactors modulo R.

    Feeds the endomorphism-topology comparison: whatever kills every
    v_k + R must already lie in the certified ideal, because r equals
    sum(s_k * (v_k r)) with each v_k r landing back in R."""
    U = certificate.get("ring")
    I = certificate.get("ideal")
    terms = certificate.get("terms")
    if U is None or I is None or not terms:
        raise BadCertificate("certificate must carry its ring, ideal, and terms")
    if I.handle != U.handle:
        raise BadCertificate("certificate ideal lives over a different ring")
    acc = U.zero()
    for s, v in terms:
        if not I.contains(s):
            raise BadCertificate(
                "scalar %s escapes the ideal" % U.handle.format(s)
            )
        if not U.contains(v):
            raise BadCertificate("cofactor outside the ring of quotients")
        acc = U.add(acc, U.mul(U.u(s), v))
    if not U.eq(acc, U.one()):
        raise BadCertificate("certificate terms do not sum to one")
    ann = _joint_annihilator(U, [v for _, v in terms], K)
    # r = sum(s_k * (v_k r)) pulls r back into I once each v_k r returns
    # to the ring; when the unit map has a kernel the pullback is only
    # determined modulo it, so the containment is verified against I + ker
    ker = U.kernel_of_unit()
    target = I if ker.is_zero() else ideal_sum(I, ker)
    if not target.contains_ideal(ann):
        raise BadCertificate("annihilator escapes the certified ideal")
    return ann
