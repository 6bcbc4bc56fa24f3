"""Finitely presented modules over the ring handles: normal forms, Hom,
tensor and Ext^1, towers with lim / lim^1 verdicts, and finite character
duality.

Dispatching is by ring class:

  Integers                       f.p. abelian groups, Smith normal form
  IntegersMod, UpperTriangular2  finite enumeration engine
  UnivariatePoly                 Euclidean Smith over F[x] or Q[x]
  QuadraticOrder                 principal-relation presentations only;
                                 a non-principal relation lattice raises
                                 UnsupportedPresentation

Hom, tensor and Ext^1 between finite-class modules are reported as
abelian groups (modules over the center); over the commutative PID-like
classes they stay modules over the ring itself.  Ext^1 over finite rings
comes from a two-step free resolution; the independent brute-force route
(classifying the extensions themselves) is exposed as ext1_via_oracle and
the two must agree wherever both run.
"""

from math import isqrt

from .abgroups import (
    AbGroup,
    AbMap,
    ExtData,
    FiniteDual,
    HomData,
    TensorData,
    cokernel,
    direct_sum,
    image,
    is_injective,
    is_iso,
    is_surjective,
    kernel,
)
from .errors import (
    BudgetExceeded,
    CompositionMismatch,
    HandleMismatch,
    InfiniteDual,
    MalformedTower,
    NotAMorphism,
    UnsupportedPresentation,
)
from .intlin import solve_in_rows
from .quadlat import FracIdeal
from .rings import Integers
from . import finitemod
from .oracle import classify_extensions

_Z = Integers()


def _kind(handle):
    k = handle.key[0]
    if k == "Integers":
        return "int"
    if k in ("IntegersMod", "UpperTriangular2"):
        return "finite"
    if k == "UnivariatePoly":
        return "poly"
    if k == "QuadraticOrder":
        return "quad"
    raise HandleMismatch("unsupported ring class %r" % (k,))


def _inv(G):
    free, tors = G.invariants()
    return (free, tuple(tors))


class FPModule:
    """A module given by ring-entry relation rows on listed generators.

    presentation[i][j] is the coefficient of generator j in relation i;
    a relation asserts sum_j gen_j * row[j] = 0, with the coefficients
    acting from the left instead for left modules.  The zero module is
    presented by an identity relation matrix.  normal_form attaches a
    `canonical` record.
    """

    __slots__ = ("handle", "presentation", "ngens", "side", "canonical", "_cache")

    def __init__(self, handle, presentation, ngens, side="right", canonical=None):
        self.handle = handle
        self.side = "left" if side == "left" else "right"
        n = int(ngens)
        rows = [list(r) for r in presentation]
        if n == 0:
            n = 1
            rows = [[handle.one()]]
        self.ngens = n
        pres = []
        for row in rows:
            if len(row) != n:
                raise UnsupportedPresentation(
                    "relation width %d does not match %d generators" % (len(row), n)
                )
            pres.append([handle.canon(x) for x in row])
        self.presentation = pres
        self.canonical = canonical
        self._cache = {}

    def __repr__(self):
        return "FPModule(%s, %d gens, %d rels, %s)" % (
            self.handle.key[0],
            self.ngens,
            len(self.presentation),
            self.side,
        )


def zero_fp(handle, side="right"):
    return FPModule(handle, [[handle.one()]], 1, side)


def same_module(X, Y):
    """Literal-presentation equality; the notion of endpoint matching
    used by composition and towers."""
    return X is Y or (
        X.handle == Y.handle
        and X.side == Y.side
        and X.ngens == Y.ngens
        and X.presentation == Y.presentation
    )


def finite_model(M):
    """The enumerated FiniteModule behind a finite-class FPModule."""
    got = M._cache.get("finite")
    if got is None:
        if _kind(M.handle) != "finite":
            raise HandleMismatch("not a finite ring class: %r" % (M.handle.key,))
        got, _ = finitemod.from_presentation(
            M.handle, M.presentation, M.ngens, side=M.side
        )
        M._cache["finite"] = got
    return got


def underlying_group(M):
    """The additive group of M as an AbGroup."""
    got = M._cache.get("group")
    if got is not None:
        return got
    kind = _kind(M.handle)
    if kind == "int":
        G = AbGroup(M.ngens, M.presentation)
    elif kind == "finite":
        G = finite_model(M).group
    elif kind == "quad":
        d = M.handle.d
        rels = []
        for row in M.presentation:
            r1, r2 = [], []
            for (p, q) in row:
                r1 += [p, q]
                r2 += [d * q, p]
            rels.append(r1)
            rels.append(r2)
        G = AbGroup(2 * M.ngens, rels)
    else:
        raise HandleMismatch("no finite additive model over polynomial rings")
    M._cache["group"] = G
    return G


def _is_finite_module(M):
    return underlying_group(M).is_finite()


# ------------------------------------------------------------ normal forms


def _poly_smith(handle, rows, ncols):
    """(free_rank, monic invariant factors, ascending by divisibility)."""
    work = []
    for row in rows:
        r = [handle.canon(x) for x in row]
        if any(r):
            work.append(r)
    invs = []
    done = 0
    while work and done < ncols:
        best = None
        for i, row in enumerate(work):
            for j in range(done, ncols):
                if row[j] and (best is None or len(row[j]) < len(work[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        work[0], work[bi] = work[bi], work[0]
        if bj != done:
            for row in work:
                row[done], row[bj] = row[bj], row[done]
        dirty = True
        while dirty:
            dirty = False
            p = work[0][done]
            for i in range(1, len(work)):
                if not work[i][done]:
                    continue
                q, rem = handle.divmod(work[i][done], p)
                if q:
                    for j in range(done, ncols):
                        work[i][j] = handle.add(
                            work[i][j], handle.neg(handle.mul(q, work[0][j]))
                        )
                if rem:
                    work[0], work[i] = work[i], work[0]
                    dirty = True
                    break
            if dirty:
                continue
            for j in range(done + 1, ncols):
                if not work[0][j]:
                    continue
                q, rem = handle.divmod(work[0][j], p)
                if q:
                    for row in work:
                        row[j] = handle.add(row[j], handle.neg(handle.mul(q, row[done])))
                if rem:
                    for row in work:
                        row[done], row[j] = row[j], row[done]
                    dirty = True
                    break
            if dirty:
                continue
            # the pivot must divide the rest of the block
            for i in range(1, len(work)):
                bad = None
                for j in range(done + 1, ncols):
                    if work[i][j]:
                        _, rem = handle.divmod(work[i][j], p)
                        if rem:
                            bad = j
                            break
                if bad is not None:
                    for j in range(done, ncols):
                        work[0][j] = handle.add(work[0][j], work[i][j])
                    dirty = True
                    break
        invs.append(handle.monic(work[0][done]))
        work = [row for row in work[1:] if any(row)]
        done += 1
    free = ncols - done
    return free, [f for f in invs if len(f) > 1]


def principal_generator(handle, ideal):
    """A canonical generator of a principal integral ideal, or None.

    Short-vector norm search; only imaginary quadratic orders have the
    positive definite norm this relies on.
    """
    if handle.d > 0:
        return None
    unit = FracIdeal.unit(handle)
    nm = ideal.index_in(unit)
    dd = -handle.d
    b = 0
    while dd * b * b <= nm:
        rest = nm - dd * b * b
        a = isqrt(rest)
        if a * a == rest:
            for cand in ((a, b), (a, -b)) if b else ((a, 0),):
                if cand == (0, 0):
                    continue
                x = handle.canon(cand)
                if ideal.contains(x) and FracIdeal.from_element(handle, x) == ideal:
                    p, q = x
                    if p < 0 or (p == 0 and q < 0):
                        x = (-p, -q)
                    return handle.canon(x)
        b += 1
    return None


def _unsupported(M, msg):
    err = UnsupportedPresentation(msg)
    err.presentation = [list(r) for r in M.presentation]
    return err


def _quad_decompose(M):
    """(free_rank, nested torsion ideals) or UnsupportedPresentation."""
    h = M.handle
    ideals = [None] * M.ngens
    for row in M.presentation:
        nz = [(j, x) for j, x in enumerate(row) if any(x)]
        if len(nz) > 1:
            raise _unsupported(M, "relation row mixes generators over the quadratic order")
        if nz:
            j, x = nz[0]
            I = FracIdeal.from_element(h, x)
            ideals[j] = I if ideals[j] is None else ideals[j].add(I)
    unit = FracIdeal.unit(h)
    free = sum(1 for I in ideals if I is None)
    tors = [I for I in ideals if I is not None and I != unit]
    # invariant-factor chaining: replace incomparable pairs by (sum, intersection)
    changed = True
    rounds = 0
    while changed and rounds < 4 * (len(tors) + 1) ** 2:
        changed = False
        rounds += 1
        for i in range(len(tors)):
            for j in range(i + 1, len(tors)):
                g = tors[i].add(tors[j])
                if g == tors[i] or g == tors[j]:
                    continue
                tors[i], tors[j] = g, tors[i].intersect(tors[j])
                changed = True
    tors = [I for I in tors if I != unit]
    tors.sort(key=lambda I: I.index_in(unit))
    return free, tors


def _finite_fingerprint(handle, Mf):
    out = [Mf.size(), _inv(Mf.group)]
    for r in handle.elements():
        f = Mf.act_map(r)
        K, _ = kernel(f)
        I, _, _ = image(f)
        out.append((_inv(K), _inv(I)))
    return tuple(out)


def _fp_from_finite(handle, Mf, side):
    """Deterministic presentation rebuilt from an enumerated module."""
    gens = Mf.module_generators()
    a = len(gens)
    if a == 0:
        return zero_fp(handle, side)
    F = finitemod.free_module(handle, a, side)
    d0 = finitemod.free_cover_map(F, Mf, gens)
    kg = finitemod.kernel_module_gens(F, d0)
    rows = [finitemod.decode_free_vector(handle, v, a) for v in kg]
    return FPModule(handle, rows, a, side)


def _diag_fp(handle, torsion_blocks, free, side="right", canonical=None):
    """Direct sum of cyclic blocks R/(block generators) plus free columns."""
    n = len(torsion_blocks) + free
    if n == 0:
        out = zero_fp(handle, side)
        out.canonical = canonical
        return out
    z = handle.zero()
    rows = []
    for j, blk in enumerate(torsion_blocks):
        for g in blk:
            row = [z] * n
            row[j] = g
            rows.append(row)
    out = FPModule(handle, rows, n, side)
    out.canonical = canonical
    return out


def _abelian_fp(G):
    """An Integers-class FPModule in canonical (Smith) form."""
    free, tors = G.invariants()
    out = _diag_fp(
        _Z,
        [[d] for d in tors],
        free,
        canonical={"class": "pid", "free": free, "torsion": list(tors)},
    )
    return out


def normal_form(M):
    """Canonical decomposition of M, attached as the `canonical` record.

    PID classes get free rank plus cyclic invariant factors; finite
    classes get the enumerated module back as a deterministic
    presentation with an isomorphism-invariant fingerprint; quadratic
    orders are handled when the relation lattice is principal per
    generator, otherwise UnsupportedPresentation carries the raw rows.
    """
    kind = _kind(M.handle)
    if kind == "int":
        return _abelian_fp(AbGroup(M.ngens, M.presentation))
    if kind == "poly":
        free, invs = _poly_smith(M.handle, M.presentation, M.ngens)
        return _diag_fp(
            M.handle,
            [[f] for f in invs],
            free,
            canonical={"class": "pid", "free": free, "torsion": list(invs)},
        )
    if kind == "finite":
        Mf = finite_model(M)
        out = _fp_from_finite(M.handle, Mf, M.side)
        out.canonical = {
            "class": "finite",
            "size": Mf.size(),
            "group": _inv(Mf.group),
            "fingerprint": _finite_fingerprint(M.handle, Mf),
        }
        return out
    free, tors = _quad_decompose(M)
    gens = []
    for I in tors:
        x = principal_generator(M.handle, I)
        if x is None:
            raise _unsupported(M, "non-principal relation lattice")
        gens.append(x)
    return _diag_fp(
        M.handle,
        [[g] for g in gens],
        free,
        side=M.side,
        canonical={"class": "quad-principal", "free": free, "torsion": gens},
    )


# ---------------------------------------------------------- hom/tensor/ext


def _require_pair(M, N, same_side=True):
    if M.handle != N.handle:
        raise HandleMismatch("modules over different rings")
    if same_side and _kind(M.handle) == "finite" and M.side != N.side:
        raise HandleMismatch("one-sided module mismatch")


def _pid_blocks(M, N, op):
    h = M.handle
    ca, cb = normal_form(M).canonical, normal_form(N).canonical
    fa, ta = ca["free"], ca["torsion"]
    fb, tb = cb["free"], cb["torsion"]
    tors = []
    free = fa * fb if op in ("hom", "tensor") else 0
    if op == "hom":
        tors += [g for g in tb for _ in range(fa)]
    elif op == "tensor":
        tors += [f for f in ta for _ in range(fb)]
        tors += [g for g in tb for _ in range(fa)]
    else:
        tors += [f for f in ta for _ in range(fb)]
    for f in ta:
        for g in tb:
            tors.append(h.gcd(f, g))
    tors = [t for t in tors if len(t) > 1]
    return normal_form(_diag_fp(h, [[t] for t in tors], free))


def _quad_blocks(M, N, op):
    h = M.handle
    ca, cb = normal_form(M).canonical, normal_form(N).canonical
    fa, ta = ca["free"], ca["torsion"]
    fb, tb = cb["free"], cb["torsion"]
    unit = FracIdeal.unit(h)
    blocks = []
    free = fa * fb if op in ("hom", "tensor") else 0
    if op == "hom":
        blocks += [[g] for g in tb for _ in range(fa)]
    elif op == "tensor":
        blocks += [[f] for f in ta for _ in range(fb)]
        blocks += [[g] for g in tb for _ in range(fa)]
    else:
        blocks += [[f] for f in ta for _ in range(fb)]
    for f in ta:
        for g in tb:
            V = FracIdeal.from_element(h, f).add(FracIdeal.from_element(h, g))
            if V == unit:
                continue
            x = principal_generator(h, V)
            if x is not None:
                blocks.append([x])
            else:
                # V is integral here, so the basis pairs are whole numbers
                blocks.append([(int(p), int(q)) for (p, q) in V.basis()])
    out = _diag_fp(h, blocks, free, side=M.side)
    try:
        return normal_form(out)
    except UnsupportedPresentation:
        return out


def hom(M, N):
    """Hom_R(M, N) as a module over the center (abelian group when the
    center is Z or Z/n); computed exactly from the presentations."""
    _require_pair(M, N)
    kind = _kind(M.handle)
    if kind == "int":
        return _abelian_fp(HomData(underlying_group(M), underlying_group(N)).group)
    if kind == "finite":
        K, _, _ = finitemod.hom_group(finite_model(M), finite_model(N))
        return _abelian_fp(K)
    if kind == "poly":
        return _pid_blocks(M, N, "hom")
    return _quad_blocks(M, N, "hom")


def tensor(M, N):
    """M tensor_R N, right side tensor left side for one-sided classes."""
    if M.handle != N.handle:
        raise HandleMismatch("modules over different rings")
    kind = _kind(M.handle)
    if kind == "finite":
        if M.handle.key[0] == "UpperTriangular2" and (
            M.side != "right" or N.side != "left"
        ):
            raise HandleMismatch("tensor needs a right module and a left module")
        G, _ = finitemod.tensor_group(finite_model(M), finite_model(N))
        return _abelian_fp(G)
    if kind == "int":
        return _abelian_fp(TensorData(underlying_group(M), underlying_group(N)).group)
    if kind == "poly":
        return _pid_blocks(M, N, "tensor")
    return _quad_blocks(M, N, "tensor")


#: free-cover size past which resolution-route Ext refuses to enumerate
EXT_COVER_BUDGET = 1 << 18


def ext1(M, N, budget=EXT_COVER_BUDGET):
    """Ext^1_R(M, N) from a two-step free resolution of M.

    Finite ring classes enumerate the kernel of the free cover (refusing
    once the cover would pass `budget` elements); PID classes read Ext
    off the normal forms.
    """
    _require_pair(M, N)
    kind = _kind(M.handle)
    if kind == "int":
        return _abelian_fp(ExtData(underlying_group(M), underlying_group(N)).group)
    if kind == "poly":
        return _pid_blocks(M, N, "ext1")
    if kind == "quad":
        return _quad_blocks(M, N, "ext1")
    Mf, Nf = finite_model(M), finite_model(N)
    ring_size = len(list(M.handle.elements()))
    a = len(Mf.module_generators())
    if ring_size**a > budget or Nf.size() > budget:
        raise BudgetExceeded(
            "free cover of size %d**%d exceeds budget %d" % (ring_size, a, budget)
        )
    return _abelian_fp(finitemod.ext1_resolution(Mf, Nf))


def ext1_via_oracle(M, N, seed=0, verify_cap=32):
    """Brute-force route: classify extensions 0 -> N -> E -> M -> 0.

    Returns (FPModule, ExtClassification audit).  Completely independent
    of the resolution route; the two must agree.
    """
    _require_pair(M, N)
    if _kind(M.handle) != "finite":
        raise HandleMismatch("the brute-force route needs a finite ring class")
    cls = classify_extensions(
        finite_model(M), finite_model(N), seed=seed, verify_cap=verify_cap
    )
    return _abelian_fp(cls.group), cls


# ------------------------------------------------------------ module maps


class ModuleMap:
    """matrix[i][j]: coefficient of target generator j in the image of
    source generator i.  Well-definedness (relations land in relations)
    is verified on the additive model."""

    __slots__ = ("source", "target", "matrix", "_ab")

    def __init__(self, source, target, matrix, check=True):
        if source.handle != target.handle:
            raise HandleMismatch("map across different rings")
        if source.side != target.side:
            raise HandleMismatch("map across different sides")
        h = source.handle
        rows = [list(r) for r in matrix]
        if len(rows) != source.ngens:
            raise NotAMorphism(
                "matrix has %d rows for %d generators" % (len(rows), source.ngens)
            )
        pres = []
        for row in rows:
            if len(row) != target.ngens:
                raise NotAMorphism("matrix row width mismatch")
            pres.append([h.canon(x) for x in row])
        self.source = source
        self.target = target
        self.matrix = pres
        self._ab = None
        if check:
            try:
                self._ab = _group_map(self)
            except ValueError as e:
                raise NotAMorphism("generator images break a relation: %s" % e)

    def as_group_map(self):
        if self._ab is None:
            self._ab = _group_map(self)
        return self._ab

    def compose(self, other):
        """self after other."""
        if not same_module(other.target, self.source):
            raise CompositionMismatch("target of inner map is not source of outer")
        h = self.source.handle
        left = self.source.side == "left"
        rows = []
        for i in range(other.source.ngens):
            row = []
            for k in range(self.target.ngens):
                acc = h.zero()
                for j in range(other.target.ngens):
                    g = other.matrix[i][j]
                    f = self.matrix[j][k]
                    acc = h.add(acc, h.mul(g, f) if left else h.mul(f, g))
                row.append(acc)
            rows.append(row)
        return ModuleMap(other.source, self.target, rows, check=False)

    @staticmethod
    def identity(M):
        h = M.handle
        z, o = h.zero(), h.one()
        rows = [[o if i == j else z for j in range(M.ngens)] for i in range(M.ngens)]
        return ModuleMap(M, M, rows, check=False)


def _group_map(f):
    kind = _kind(f.source.handle)
    h = f.source.handle
    if kind == "int":
        return AbMap(underlying_group(f.source), underlying_group(f.target), f.matrix)
    if kind == "quad":
        d = h.d
        rows = []
        for i in range(f.source.ngens):
            r1, r2 = [], []
            for (p, q) in f.matrix[i]:
                r1 += [p, q]
                r2 += [d * q, p]
            rows.append(r1)
            rows.append(r2)
        return AbMap(underlying_group(f.source), underlying_group(f.target), rows)
    if kind == "finite":
        Mf, Nf = finite_model(f.source), finite_model(f.target)
        basis = finitemod.ring_additive_basis(h)
        rows = []
        for i in range(f.source.ngens):
            for b in basis:
                vec = []
                for j in range(f.target.ngens):
                    x = f.matrix[i][j]
                    prod = h.mul(b, x) if f.source.side == "left" else h.mul(x, b)
                    vec.extend(finitemod.ring_coeffs(h, prod))
                rows.append(vec)
        return AbMap(Mf.group, Nf.group, rows)
    raise HandleMismatch("maps over polynomial rings are not modeled")


# ----------------------------------------------------------------- towers


class Tower:
    """A finite chain of modules.  Inverse towers map level n+1 to level
    n; direct towers map level n to level n+1."""

    __slots__ = ("direction", "levels", "maps", "depth")

    def __init__(self, direction, levels, maps):
        if direction not in ("inverse", "direct"):
            raise MalformedTower("direction must be inverse or direct")
        depth = len(levels)
        if depth < 1:
            raise MalformedTower("a tower needs at least one level")
        if len(maps) != depth - 1:
            raise MalformedTower(
                "%d levels need %d maps, got %d" % (depth, depth - 1, len(maps))
            )
        for n, f in enumerate(maps):
            if direction == "inverse":
                src, dst = levels[n + 1], levels[n]
            else:
                src, dst = levels[n], levels[n + 1]
            if not (same_module(f.source, src) and same_module(f.target, dst)):
                raise MalformedTower("map %d endpoints disagree with the levels" % n)
        self.direction = direction
        self.levels = list(levels)
        self.maps = list(maps)
        self.depth = depth


class Indeterminate:
    """Truncation-honest non-answer carrying the depth that was tried."""

    __slots__ = ("depth",)

    def __init__(self, depth):
        self.depth = depth

    def __repr__(self):
        return "Indeterminate(depth=%d)" % self.depth


class Lim1Verdict:
    """Three-valued lim^1 report: zero / nonzero(witness) / indeterminate."""

    __slots__ = ("kind", "witness", "depth")

    def __init__(self, kind, witness=None, depth=None):
        self.kind = kind
        self.witness = witness
        self.depth = depth

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def nonzero(cls, witness):
        return cls("nonzero", witness=witness)

    @classmethod
    def indeterminate(cls, depth):
        return cls("indeterminate", depth=depth)

    def is_zero(self):
        return self.kind == "zero"

    def __repr__(self):
        if self.kind == "nonzero":
            return "Lim1Verdict(nonzero, witness=%r)" % (self.witness,)
        if self.kind == "indeterminate":
            return "Lim1Verdict(indeterminate, depth=%r)" % (self.depth,)
        return "Lim1Verdict(zero)"


class LimReport:
    __slots__ = ("limit", "lim1", "stabilized_at")

    def __init__(self, limit, lim1, stabilized_at=None):
        self.limit = limit
        self.lim1 = lim1
        self.stabilized_at = stabilized_at

    def __repr__(self):
        return "LimReport(limit=%r, lim1=%r, stabilized_at=%r)" % (
            self.limit,
            self.lim1,
            self.stabilized_at,
        )


def _iso_run_start(depth, gmaps, window):
    i = depth - 1
    while i > 0 and is_iso(gmaps[i - 1]):
        i -= 1
    return i if depth - i >= window else None


def two_term_data(T):
    """(lim invariants, lim1 invariants) of the truncated inverse chain,
    via the shifted-difference map prod A_n -> prod A_{n<depth-1}."""
    if T.direction != "inverse":
        raise MalformedTower("two-term data is for inverse towers")
    G = [underlying_group(L) for L in T.levels]
    gmaps = [f.as_group_map() for f in T.maps]
    P, _, _ = direct_sum(G)
    Q, qinjs, _ = direct_sum(G[:-1]) if len(G) > 1 else (AbGroup(1, [[1]]), [], [])
    rows = []
    for m, g in enumerate(G):
        for t in range(g.ngens):
            acc = [0] * Q.ngens
            if m < len(G) - 1:
                v = qinjs[m](list(g.gen(t)))
                acc = [a + b for a, b in zip(acc, v)]
            if m >= 1:
                w = qinjs[m - 1](gmaps[m - 1](list(g.gen(t))))
                acc = [a - b for a, b in zip(acc, w)]
            rows.append(acc)
    D = AbMap(P, Q, rows, check=False)
    K, _ = kernel(D)
    C, _ = cokernel(D)
    return _inv(K), _inv(C)


def tower_limits(T, window=3):
    """lim and lim^1 verdicts for a truncated tower.

    Soundness certificates, in order: a run of `window` agreeing top
    levels pins the limit; composites vanishing into every level pin it
    to zero; all-surjective chains report the deepest level as the
    truncation; strictly-shrinking chains of finite index inside a
    rank-one lattice pin the limit to zero with lim^1 nonzero.  Anything
    else is Indeterminate at the recorded depth.  lim^1 is Zero whenever
    every map is surjective or every level is finite (Mittag-Leffler).
    """
    if T.depth < 2:
        raise MalformedTower("tower depth must be at least 2")
    gmaps = [f.as_group_map() for f in T.maps]
    stab = _iso_run_start(T.depth, gmaps, window)
    if T.direction == "direct":
        return LimReport(T.levels[-1], Lim1Verdict.zero(), stab)

    handle = T.levels[0].handle
    side = T.levels[0].side
    surjective = all(is_surjective(g) for g in gmaps)
    finite_levels = all(_is_finite_module(L) for L in T.levels)

    # composites from each deeper level into level 0
    comps = []
    c = gmaps[0]
    comps.append(c)
    for m in range(1, T.depth - 1):
        c = c.compose(gmaps[m])
        comps.append(c)
    pro_zero = all(
        _composite_into(gmaps, n, T.depth - 1).is_zero_map()
        for n in range(T.depth - 1)
    )

    rank1 = all(_inv(underlying_group(L)) == (1, ()) for L in T.levels)
    strictly_shrinking = False
    indices = []
    if rank1 and all(is_injective(g) for g in gmaps):
        ok = True
        for c in comps:
            C, _ = cokernel(c)
            if not C.is_finite():
                ok = False
                break
            indices.append(C.order())
        strictly_shrinking = ok and all(
            indices[i] < indices[i + 1] for i in range(len(indices) - 1)
        )

    if stab is not None:
        limit = T.levels[stab]
    elif pro_zero:
        limit = zero_fp(handle, side)
    elif surjective:
        limit = T.levels[-1]
    elif strictly_shrinking:
        limit = zero_fp(handle, side)
    else:
        limit = Indeterminate(T.depth)

    if surjective or finite_levels:
        lim1 = Lim1Verdict.zero()
    elif strictly_shrinking:
        lim1 = Lim1Verdict.nonzero(
            {"image_indices": indices, "two_term": two_term_data(T)}
        )
    else:
        lim1 = Lim1Verdict.indeterminate(T.depth)
    return LimReport(limit, lim1, stab)


def _composite_into(gmaps, n, m):
    """Group map level m -> level n (m > n) along an inverse tower."""
    c = gmaps[n]
    for t in range(n + 1, m):
        c = c.compose(gmaps[t])
    return c


# ----------------------------------------------------------------- duality


def char_dual(N):
    """The character dual Hom(N, Q/Z) with the transposed, side-flipped
    action; only finite modules have one."""
    kind = _kind(N.handle)
    if kind == "int":
        G = underlying_group(N)
        free, tors = G.invariants()
        if free:
            raise InfiniteDual("free rank %d has no finite character dual" % free)
        return _abelian_fp(G)
    if kind != "finite":
        raise HandleMismatch("character duality needs a finite module class")
    Nf = finite_model(N)
    D = FiniteDual(Nf.group)
    dual_acts = [D.dual_map(f, D) for f in Nf.acts]
    flipped = "left" if N.side == "right" else "right"
    Df = finitemod.FiniteModule(N.handle, D.group, dual_acts, flipped)
    out = _fp_from_finite(N.handle, Df, flipped)
    out.canonical = {
        "class": "finite",
        "size": Df.size(),
        "group": _inv(Df.group),
        "fingerprint": _finite_fingerprint(N.handle, Df),
    }
    return out


# ------------------------------------------------- six-term Hom-Ext chain


def _preimage_first(vec, rows, width, take):
    x = solve_in_rows(list(vec), rows, width)
    if x is None:
        raise ValueError("expected solvable system in six-term construction")
    return x[:take]


def _product_postcompose(handle, rank, Nf, Nf2, g):
    """Blockwise map N^rank -> N2^rank induced by g: N -> N2 on groups."""
    P, (injs, _) = finitemod.free_hom_group(handle, rank, Nf)
    P2, (injs2, _) = finitemod.free_hom_group(handle, rank, Nf2)
    ng = Nf.group.ngens
    rows = []
    for i in range(rank):
        for t in range(ng):
            rows.append(injs2[i](g(list(Nf.group.gen(t)))))
    return AbMap(P, P2, rows, check=False)


def hom_ext_sequence(M, inc, prj):
    """The six-term chain 0 -> Hom(M,A) -> Hom(M,B) -> Hom(M,C) ->
    Ext1(M,A) -> Ext1(M,B) -> Ext1(M,C) for a short exact sequence
    A >--inc--> B --prj->> C of finite-class modules.

    Returns {"groups": [...], "maps": [...]} at the additive level; maps
    are Hom postcompositions, the connecting map via free-cover lifting,
    and Ext postcompositions."""
    if _kind(M.handle) != "finite":
        raise HandleMismatch("six-term chain needs a finite ring class")
    if not same_module(inc.target, prj.source):
        raise CompositionMismatch("inclusion target must be the surjection source")
    if inc.source.handle != M.handle or inc.source.side != M.side:
        raise HandleMismatch("sequence modules must match M's ring and side")
    h = M.handle
    Mf = finite_model(M)
    a, g1, b, g2, c = finitemod.resolution_steps(Mf)
    iab = inc.as_group_map()
    pbc = prj.as_group_map()
    mods = [finite_model(inc.source), finite_model(inc.target), finite_model(prj.target)]
    exact = (
        is_injective(iab)
        and is_surjective(pbc)
        and prj.compose(inc).as_group_map().is_zero_map()
        and mods[0].size() * mods[2].size() == mods[1].size()
    )
    if not exact:
        raise NotAMorphism("input chain is not a short exact sequence")

    homs, exts, d1s_all, zincl_all = [], [], [], []
    for Nf in mods:
        if a == 0:
            T = AbGroup(1, [[1]])
            homs.append((T, AbMap.identity(T)))
            exts.append((T, AbMap.identity(T), None))
            d1s_all.append(None)
            zincl_all.append(None)
            continue
        Pa, _ = finitemod.free_hom_group(h, a, Nf)
        if b == 0:
            homs.append((Pa, AbMap.identity(Pa)))
            T = AbGroup(1, [[1]])
            exts.append((T, None, None))
            d1s_all.append(None)
            zincl_all.append(None)
            continue
        d1s = finitemod.hom_transition(h, g1, a, b, Nf)
        K, kincl = kernel(d1s)
        homs.append((K, kincl))
        if c == 0:
            Z, zincl = d1s.dst, AbMap.identity(d1s.dst)
        else:
            d2s = finitemod.hom_transition(h, g2, b, c, Nf)
            Z, zincl = kernel(d2s)
        rows = [
            _preimage_first(d1s(list(Pa.gen(i))), zincl.M, d1s.dst.ngens, Z.ngens)
            for i in range(Pa.ngens)
        ]
        corestr = AbMap(Pa, Z, rows, check=False)
        E, eproj = cokernel(corestr)
        exts.append((E, eproj, zincl))
        d1s_all.append(d1s)
        zincl_all.append(zincl)

    def hom_map(i, j, g):
        Ki, incli = homs[i]
        Kj, inclj = homs[j]
        if a == 0:
            return AbMap.zero_map(Ki, Kj)
        post = _product_postcompose(h, a, mods[i], mods[j], g)
        rows = []
        for t in range(Ki.ngens):
            v = post(incli(list(Ki.gen(t))))
            rows.append(_preimage_first(v, inclj.M, post.dst.ngens, Kj.ngens))
        return AbMap(Ki, Kj, rows, check=False)

    def ext_map(i, j, g):
        Ei, proji, zincli = exts[i]
        Ej, projj, zinclj = exts[j]
        if proji is None or projj is None or b == 0 or a == 0:
            return AbMap.zero_map(Ei, Ej)
        post = _product_postcompose(h, b, mods[i], mods[j], g)
        rows = []
        for t in range(Ei.ngens):
            v = post(zincli(list(zincli.src.gen(t))))
            w = _preimage_first(v, zinclj.M, post.dst.ngens, zinclj.src.ngens)
            rows.append(projj(w))
        return AbMap(Ei, Ej, rows, check=False)

    hAB = hom_map(0, 1, iab)
    hBC = hom_map(1, 2, pbc)
    eAB = ext_map(0, 1, iab)
    eBC = ext_map(1, 2, pbc)

    # connecting map Hom(M, C) -> Ext1(M, A) by lifting the free cover
    KC, inclC = homs[2]
    EA, projA, zinclA = exts[0]
    if a == 0 or b == 0 or projA is None:
        delta = AbMap.zero_map(KC, EA)
    else:
        A_ng = mods[0].group.ngens
        B_ng = mods[1].group.ngens
        C_ng = mods[2].group.ngens
        lift_rows = [list(r) for r in pbc.M] + [list(r) for r in mods[2].group.rels]
        mem_rows = [list(r) for r in iab.M] + [list(r) for r in mods[1].group.rels]
        d1sB = d1s_all[1]
        rows = []
        for t in range(KC.ngens):
            phi = inclC(list(KC.gen(t)))
            psi = []
            for blk in range(a):
                v = phi[blk * C_ng : (blk + 1) * C_ng]
                psi.extend(_preimage_first(v, lift_rows, C_ng, B_ng))
            dpsi = d1sB(psi)
            eta = []
            for blk in range(b):
                v = dpsi[blk * B_ng : (blk + 1) * B_ng]
                eta.extend(_preimage_first(v, mem_rows, B_ng, A_ng))
            z = _preimage_first(eta, zinclA.M, len(eta), zinclA.src.ngens)
            rows.append(projA(z))
        delta = AbMap(KC, EA, rows, check=False)

    return {
        "groups": [homs[0][0], homs[1][0], homs[2][0], exts[0][0], exts[1][0], exts[2][0]],
        "maps": [hAB, hBC, delta, eAB, eBC],
    }


# ------------------------------------------------------------------ census


def module_census(handle, max_size):
    """One FPModule per isomorphism class with at most max_size elements."""
    kind = _kind(handle)
    if kind != "finite":
        raise HandleMismatch("census enumerates finite ring classes only")
    if handle.key[0] == "IntegersMod":
        return _census_cyclic(handle, max_size)
    return _census_triangular(handle, max_size)


def _census_cyclic(handle, max_size):
    n = handle.n
    divisors = [d for d in range(2, n + 1) if n % d == 0]
    out = [zero_fp(handle)]
    chains = [[]]
    frontier = [[]]
    while frontier:
        nxt = []
        for ch in frontier:
            prod = 1
            for d in ch:
                prod *= d
            for d in divisors:
                if ch and d % ch[-1] != 0:
                    continue
                if prod * d > max_size:
                    continue
                grown = ch + [d]
                chains.append(grown)
                nxt.append(grown)
        frontier = nxt
    for ch in chains:
        if not ch:
            continue
        out.append(_diag_fp(handle, [[d] for d in ch], 0))
    return [normal_form(M) for M in out]


def _census_triangular(handle, max_size):
    p = handle.p
    out = [zero_fp(handle)]
    seen = []
    k = 1
    while p**k <= max_size:
        G = AbGroup(k, [[p if i == j else 0 for j in range(k)] for i in range(k)])
        mats = _all_matrices(p, k)
        idems = [A for A in mats if _mat_eq(_mat_mul_p(A, A, p), A)]
        for A in idems:
            C = [[(int(i == j) - A[i][j]) % p for j in range(k)] for i in range(k)]
            for B in mats:
                if not _mat_eq(_mat_mul_p(A, B, p), B):
                    continue
                if any(any(r) for r in _mat_mul_p(B, A, p)):
                    continue
                acts = [AbMap(G, G, X, check=False) for X in (A, B, C)]
                Mf = finitemod.FiniteModule(handle, G, acts, "right")
                fp = _finite_fingerprint(handle, Mf)
                peers = [m for f, m in seen if f == fp]
                if any(_modules_isomorphic(m, Mf) for m in peers):
                    continue
                seen.append((fp, Mf))
        k += 1
    for _, Mf in seen:
        M = _fp_from_finite(handle, Mf, "right")
        out.append(M)
    return [normal_form(M) for M in out]


def _all_matrices(p, k):
    total = p ** (k * k)
    out = []
    for code in range(total):
        m = []
        x = code
        for _ in range(k):
            row = []
            for _ in range(k):
                row.append(x % p)
                x //= p
            m.append(row)
        out.append(m)
    return out


def _mat_mul_p(A, B, p):
    k = len(A)
    return [
        [sum(A[i][t] * B[t][j] for t in range(k)) % p for j in range(k)]
        for i in range(k)
    ]


def _mat_eq(A, B):
    return all(ra == rb for ra, rb in zip(A, B))


def _modules_isomorphic(Mf, Nf):
    if Mf.size() != Nf.size():
        return False
    maps = finitemod.all_module_maps(Mf, Nf)
    nM = Mf.size()
    for f in maps:
        if len(set(f)) == nM:
            return True
    return False
