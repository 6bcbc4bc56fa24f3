"""Brute-force classification of module extensions over finite rings.

An extension 0 -> N -> E -> M -> 0 of one-sided modules is carried by the
set N x M once a set section of the projection is fixed: the group law and
the ring action pick up twist functions c: M x M -> N and h: M x T -> N,

    (n, m) + (n', m') = (n + n' + c(m, m'), m + m')
    (n, m) . r        = (n . r + h(m, r), m . r)

and the module axioms for E translate into linear identities on (c, h).
Twists add pointwise, which is the Baer sum on classes, and a class is
zero exactly when its extension splits.  classify_extensions solves the
identity system for every twist, quotients by the twists that merely
rewrite the section or the coordinates, reads the group off Hermite
forms, and then certifies the verdict class by class with an explicit
search for a splitting section: every class when the group is small,
generator order certificates plus random probes otherwise.

The unknowns stay small because c is stored only on unordered pairs of
nonzero elements of M and h only on (module generator, ring basis)
slots; every other value of h is forced by the identities along the
additive build order of M and of the ring, so the tables below hold
integer linear forms in the slot unknowns.
"""

import itertools
import random

import numpy as np

from .abgroups import AbGroup
from .errors import BudgetExceeded, GabtopError, HandleMismatch
from .finitemod import regular_module, ring_additive_basis, ring_coeffs
from .intlin import hnf_with_transform
from . import kernels

CARRIER_BUDGET = 256


class ExtClassification:
    """Extension group of M by N plus the audit trail of the verification."""

    __slots__ = ("group", "class_count", "checked", "searches", "exhaustive", "unknowns")

    def __init__(self, group, class_count, checked, searches, exhaustive, unknowns):
        self.group = group
        self.class_count = class_count
        self.checked = checked
        self.searches = searches
        self.exhaustive = exhaustive
        self.unknowns = unknowns

    def invariants(self):
        return self.group.invariants()

    def __repr__(self):
        return "ExtClassification(%r, classes=%d, checked=%d, exhaustive=%r)" % (
            self.group.invariants(),
            self.class_count,
            self.checked,
            self.exhaustive,
        )


def _factor(n):
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def _trivial_group():
    return AbGroup(1, [[1]])


def _group_from_factors(fs):
    fs = [f for f in fs if f > 1]
    if not fs:
        return _trivial_group()
    n = len(fs)
    rels = [[fs[i] if i == j else 0 for j in range(n)] for i in range(n)]
    return AbGroup(n, rels)


class _Twists:
    """Slot layout, propagation tables and lattices for one pair (M, N)."""

    def __init__(self, M, N):
        ring = M.handle
        self.M = M
        self.side = M.side
        elems, index, addM, _, prov = M.tables()
        self.elems = elems
        self.prov = prov
        self.nM = len(elems)
        self.addM = np.array(addM, dtype=np.int64)
        if index[tuple(M.zero())] != 0:
            raise GabtopError("module tables must start at the zero element")

        self.tr = [ring.canon(r) for r in ring.elements()]
        self.nT = len(self.tr)
        self.rIdx = {r: i for i, r in enumerate(self.tr)}
        self.one = self.rIdx[ring.canon(ring.one())]
        basis = ring_additive_basis(ring)
        self.basis_idx = [self.rIdx[ring.canon(b)] for b in basis]

        mact = []
        for r in self.tr:
            amap = M.act_map(r)
            mact.append(
                [index[tuple(M.group.reduce(amap(list(e))))] for e in elems]
            )
        self.mact = np.array(mact, dtype=np.int64)
        self.radd = np.array(
            [[self.rIdx[ring.canon(ring.add(a, b))] for b in self.tr] for a in self.tr],
            dtype=np.int64,
        )
        self.rmul = np.array(
            [[self.rIdx[ring.canon(ring.mul(a, b))] for b in self.tr] for a in self.tr],
            dtype=np.int64,
        )

        # N in diagonal coordinates: v |-> v @ T, keep the columns with
        # modulus > 1, act there through the conjugated matrices
        T, diag = N.group.smith_transform()
        g = N.group.ngens
        Hh, U, _ = hnf_with_transform(T, g)
        if Hh != [[1 if i == j else 0 for j in range(g)] for i in range(g)]:
            raise GabtopError("coordinate change is not unimodular")
        Tnp = np.array(T, dtype=np.int64)
        Tin = np.array(U, dtype=np.int64)
        TT = [t for t in range(g) if diag[t] != 1]
        self.d = np.array([diag[t] for t in TT], dtype=np.int64)
        self.k = len(TT)
        self.L = 1
        for dt in self.d:
            self.L = self.L * int(dt) // _gcd(self.L, int(dt))
        Asm = []
        for r in self.tr:
            A = np.array(N.act_map(r).M, dtype=np.int64)
            full = Tin @ A @ Tnp
            Asm.append(full[np.ix_(TT, TT)] % self.d[None, :])
        self.Asm = np.stack(Asm) if Asm else np.zeros((0, self.k, self.k), np.int64)

        self.nN = int(np.prod(self.d)) if self.k else 1
        if self.nN != N.size():
            raise GabtopError("diagonal coordinates disagree with the group order")
        strides = np.ones(self.k, dtype=np.int64)
        for t in range(self.k - 2, -1, -1):
            strides[t] = strides[t + 1] * int(self.d[t + 1])
        self.strides = strides
        grid = np.indices(tuple(int(x) for x in self.d)).reshape(self.k, -1).T
        self.Ncoords = grid.astype(np.int64) if self.k else np.zeros((1, 0), np.int64)
        self.addN = (
            (self.Ncoords[:, None, :] + self.Ncoords[None, :, :]) % self.d
        ) @ strides

        # unknown slots
        self.cslots = [(i, j) for i in range(1, self.nM) for j in range(i, self.nM)]
        ncp = len(self.cslots)
        ps = np.full((self.nM, self.nM), ncp, dtype=np.int64)
        for s, (i, j) in enumerate(self.cslots):
            ps[i, j] = s
            ps[j, i] = s
        self.ps = ps
        kind, pa, _, _, _, _ = prov
        self.G0 = sorted({pa[i] for i in range(self.nM) if kind[i] == 0})
        self.gelem = {
            g: index[tuple(M.group.reduce(M.group.gen(g)))] for g in self.G0
        }
        self.hslots = [(g, bi) for g in self.G0 for bi in range(len(basis))]
        self.nslots = ncp + len(self.hslots)
        self.u = self.nslots * self.k
        self._hs_idx = {gs: ncp + i for i, gs in enumerate(self.hslots)}

        self._build_symbolic(ring)

    # ------------------------------------------------------- linear forms

    def _build_symbolic(self, ring):
        k, u, ncp = self.k, self.u, len(self.cslots)
        Carr = np.zeros((ncp + 1, k, u), dtype=np.int64)
        for s in range(ncp):
            for t in range(k):
                Carr[s, t, s * k + t] = 1
        self.Carr = Carr

        # h on (generator, ring element): walk the additive build order of
        # the ring, h(m, r + b) = h(m, r) + h(m, b) + c(m r, m b)
        Rreg = regular_module(ring, self.side)
        relems, ridx, _, _, rprov = Rreg.tables()
        if len(relems) != self.nT:
            raise GabtopError("regular module order disagrees with the ring")
        rkind, rpa, rpb, _, _, rorder = rprov
        regpos = {}
        for j, r in enumerate(self.tr):
            regpos[ridx[tuple(Rreg.group.reduce(ring_coeffs(ring, r)))]] = j
        Hgen = np.zeros((len(self.G0), self.nT, k, u), dtype=np.int64)
        for gi, g in enumerate(self.G0):
            ge = self.gelem[g]
            for pos in range(self.nT):
                rj = regpos[rorder[pos]]
                if rkind[pos] == 2:
                    continue
                if rkind[pos] == 0:
                    hs = self._hs_idx[(g, rpa[pos])]
                    for t in range(k):
                        Hgen[gi, rj, t, hs * k + t] = 1
                    continue
                r1 = regpos[rorder[rpa[pos]]]
                r2 = regpos[rorder[rpb[pos]]]
                i1 = int(self.mact[r1, ge])
                i2 = int(self.mact[r2, ge])
                Hgen[gi, rj] = Hgen[gi, r1] + Hgen[gi, r2] + Carr[self.ps[i1, i2]]

        # h everywhere: walk the additive build order of M,
        # h(m + m', r) = h(m, r) + h(m', r) + c(m r, m' r) - c(m, m') r
        kind, pa, pb, _, _, order = self.prov
        Hfull = np.zeros((self.nM, self.nT, k, u), dtype=np.int64)
        g0map = {g: i for i, g in enumerate(self.G0)}
        for pos in range(self.nM):
            old = order[pos]
            if kind[pos] == 2:
                continue
            if kind[pos] == 0:
                Hfull[old] = Hgen[g0map[pa[pos]]]
                continue
            par = order[pa[pos]]
            gb = order[pb[pos]]
            ii = self.mact[:, par]
            jj = self.mact[:, gb]
            C1 = Carr[self.ps[ii, jj]]
            C2 = Carr[self.ps[par, gb]]
            actC2 = np.einsum("rts,tu->rsu", self.Asm, C2)
            Hfull[old] = Hfull[par] + Hfull[gb] + C1 - actC2
        self.Hfull = Hfull

    def identity_rows(self):
        """Every instance of the module laws for E, one row block each."""
        nM, nT, k, u = self.nM, self.nT, self.k, self.u
        Carr, ps, Hf = self.Carr, self.ps, self.Hfull
        blocks = []

        # associativity of addition (2-cocycle identity)
        I = np.arange(nM)
        ii = np.repeat(I, nM * nM)
        jj = np.tile(np.repeat(I, nM), nM)
        ll = np.tile(I, nM * nM)
        aij = self.addM[ii, jj]
        ajl = self.addM[jj, ll]
        blocks.append(Carr[ps[ii, jj]] + Carr[ps[aij, ll]] - Carr[ps[jj, ll]] - Carr[ps[ii, ajl]])

        # (x + y) r = x r + y r
        pi, pj = np.triu_indices(nM)
        ACT = np.einsum("rts,ptu->prsu", self.Asm, Carr[ps[pi, pj]])
        Hadd = Hf[self.addM[pi, pj]]
        Cr = Carr[ps[self.mact[:, pi], self.mact[:, pj]]]
        blocks.append(ACT + Hadd - Hf[pi] - Hf[pj] - np.transpose(Cr, (1, 0, 2, 3)))

        # x (r + s) = x r + x s
        ri, si = np.triu_indices(nT)
        H1 = Hf[:, self.radd[ri, si]]
        Cm = Carr[ps[self.mact[ri].T, self.mact[si].T]]
        blocks.append(H1 - Hf[:, ri] - Hf[:, si] - Cm)

        # x (r s) = (x r) s
        T1 = Hf[:, self.rmul]
        if self.side == "right":
            T2 = np.einsum("stw,mrtu->mrswu", self.Asm, Hf)
            T3 = Hf[self.mact.T]
        else:
            T2 = np.einsum("rtw,mstu->mrswu", self.Asm, Hf)
            T3 = np.transpose(Hf[self.mact.T], (0, 2, 1, 3, 4))
        blocks.append(T1 - T2 - T3)

        # x 1 = x
        blocks.append(Hf[:, self.one])

        rows = np.concatenate([b.reshape(-1, k, u) for b in blocks], axis=0)
        scale = self.L // self.d
        flat = (rows * scale[None, :, None]).reshape(-1, u) % self.L
        flat = flat[np.any(flat, axis=1)]
        if flat.shape[0] == 0:
            return np.zeros((0, u), dtype=np.int64)
        return np.unique(flat, axis=0)

    def split_rows(self):
        """Twists that change nothing: coordinate shifts and section moves."""
        k, u, ncp = self.k, self.u, len(self.cslots)
        out = [np.diag(np.tile(self.d, self.nslots))]
        for m0 in range(1, self.nM):
            for t in range(k):
                w = np.zeros(u, dtype=np.int64)
                for s, (i, j) in enumerate(self.cslots):
                    v = int(int(self.addM[i, j]) == m0) - int(i == m0) - int(j == m0)
                    if v:
                        w[s * k + t] = v
                for hi, (g, bi) in enumerate(self.hslots):
                    col = (ncp + hi) * k
                    rb = self.basis_idx[bi]
                    ge = self.gelem[g]
                    if int(self.mact[rb, ge]) == m0:
                        w[col + t] += 1
                    if ge == m0:
                        w[col : col + k] -= self.Asm[rb, t]
                out.append(w[None, :])
        return np.vstack(out) % self.L

    # ------------------------------------------------ numeric realisation

    def twist_tables(self, x):
        """Encoded c and h tables for the slot vector x."""
        ncp = len(self.cslots)
        Xc = x.reshape(self.nslots, self.k)[:ncp] if self.nslots else x.reshape(0, self.k)
        Cpad = np.vstack([Xc, np.zeros((1, self.k), dtype=np.int64)])
        Cenc = (Cpad[self.ps] % self.d) @ self.strides
        Henc = (np.einsum("mrku,u->mrk", self.Hfull, x) % self.d) @ self.strides
        return Cenc, Henc

    def extension_tables(self, Cenc, Henc):
        nM, nN = self.nM, self.nN
        e = np.arange(nN * nM)
        n_of = e // nM
        m_of = e % nM
        addE = (
            self.addN[
                self.addN[n_of[:, None], n_of[None, :]],
                Cenc[m_of[:, None], m_of[None, :]],
            ]
            * nM
            + self.addM[m_of[:, None], m_of[None, :]]
        )
        actsE = []
        for rb in self.basis_idx:
            nact = ((self.Ncoords @ self.Asm[rb]) % self.d) @ self.strides
            actsE.append(self.addN[nact[n_of], Henc[m_of, rb]] * nM + self.mact[rb][m_of])
        return addE, actsE

    def splits(self, x):
        """Search for a module section of E -> M; True when one exists."""
        Cenc, Henc = self.twist_tables(x)
        addE, actsE = self.extension_tables(Cenc, Henc)
        addE_l = addE.tolist()
        actsE_l = [a.tolist() for a in actsE]
        addM_l = self.addM.tolist()
        actsM_l = [self.mact[rb].tolist() for rb in self.basis_idx]
        nM, nN = self.nM, self.nN
        nE = nM * nN
        ordE = [1] * nE
        for e0 in range(1, nE):
            acc = e0
            o = 1
            while acc != 0:
                acc = addE_l[acc][e0]
                o += 1
            ordE[e0] = o
        kind, pa, pb, _, _, order = self.prov
        fibers = []
        for g in self.G0:
            og = self.M.group.element_order(self.M.group.gen(g))
            ge = self.gelem[g]
            fibers.append([n * nM + ge for n in range(nN) if og % ordE[n * nM + ge] == 0])
        images = [0] * self.M.group.ngens
        for choice in itertools.product(*fibers):
            for g, e0 in zip(self.G0, choice):
                images[g] = e0
            fv = kernels.fill_by_provenance(kind, pa, pb, images, addE_l, 0)
            f = [0] * nM
            for pos in range(nM):
                f[order[pos]] = fv[pos]
            if any(f[m] % nM != m for m in range(nM)):
                continue
            if kernels.is_module_map(f, addM_l, addE_l, actsM_l, actsE_l):
                return True
        return False


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _solve_pp(A, p, a):
    """Generator rows of {x mod p^a : A @ x == 0 mod p^a}."""
    u = A.shape[1]
    if A.shape[0] == 0:
        A = np.zeros((1, u), dtype=np.int64)
    _, basis = kernels.modp_nullspace((A % p).tolist(), p)
    V = np.array(basis, dtype=np.int64).reshape(-1, u)
    if a == 1:
        return V % p
    q = p ** a
    AV = A @ V.T
    W = (AV // p) % (p ** (a - 1))
    A2 = np.hstack([W, A % (p ** (a - 1))])
    G2 = _solve_pp(A2, p, a - 1)
    nb = V.shape[0]
    imgs = (G2[:, :nb] @ V + p * G2[:, nb:]) % q
    extra = (p ** (a - 1) * V) % q
    return np.vstack([imgs, extra])


def _solutions_mod(rows, u, L):
    gens = []
    for p, a in _factor(L):
        q = p ** a
        G = _solve_pp(rows % q, p, a)
        if G.shape[0]:
            e = ((L // q) * pow(L // q, -1, q)) % L
            gens.append((e * G) % L)
    if gens:
        return np.vstack(gens) % L
    return np.zeros((0, u), dtype=np.int64)


def _residues(X, H):
    """Reduce rows of X to canonical representatives modulo rowspan(H)."""
    Bw = np.array(X, dtype=np.int64, copy=True)
    for j in range(H.shape[0]):
        c = Bw[:, j] // H[j, j]
        Bw -= c[:, None] * H[j][None, :]
    return Bw

def _coords_exact(X, H):
    Bw = np.array(X, dtype=np.int64, copy=True)
    for j in range(H.shape[0]):
        c = Bw[:, j] // H[j, j]
        Bw -= c[:, None] * H[j][None, :]
        if np.any(Bw[:, j]):
            raise GabtopError("split twists escape the solved twist lattice")
    return Bw


def _plog(val, p):
    s = 0
    while val > 1:
        if val % p:
            raise GabtopError("class count is not a prime power where it must be")
        val //= p
        s += 1
    return s


def _invariant_factors(Brows, Hz, u, L, total):
    """Invariant factors of Z/B from indices of B + p^j Z, p^a | L."""
    detZ = 1
    for j in range(u):
        detZ *= int(Hz[j][j])
    by_prime = {}
    for p, a in _factor(L):
        s_prev = 0
        cs = []
        for jj in range(1, a + 1):
            HJ = kernels.hnf_mod_q(
                np.vstack([Brows, (p ** jj) * np.array(Hz, dtype=np.int64)]) % L,
                u,
                L,
            )
            detJ = 1
            for j in range(u):
                detJ *= int(HJ[j][j])
            if detJ % detZ:
                raise GabtopError("lattice indices fail to divide")
            s_j = _plog(detJ // detZ, p)
            cs.append(s_j - s_prev)
            s_prev = s_j
        ms = []
        for jj in range(a):
            nxt = cs[jj + 1] if jj + 1 < a else 0
            m = cs[jj] - nxt
            if m < 0:
                raise GabtopError("inconsistent p-power counts")
            ms.append(m)
        by_prime[p] = ms
    # combine the prime parts, largest with largest
    cols = max((sum(ms) for ms in by_prime.values()), default=0)
    fs = [1] * cols
    for p, ms in by_prime.items():
        powers = []
        for jj, m in enumerate(ms):
            powers.extend([p ** (jj + 1)] * m)
        powers.sort(reverse=True)
        for i, q in enumerate(powers):
            fs[i] *= q
    fs = sorted(f for f in fs if f > 1)
    check = 1
    for f in fs:
        check *= f
    if check != total:
        raise GabtopError("invariant factors disagree with the class count")
    return fs


def classify_extensions(M, N, seed=0, verify_cap=32):
    """Group of classes of extensions 0 -> N -> E -> M -> 0, certified.

    Both modules must live over the same finite ring and on the same side.
    Raises BudgetExceeded when the carrier N x M goes past CARRIER_BUDGET
    elements, and GabtopError if any splitting search contradicts the
    solved class group (which would mean the answer cannot be trusted).
    """
    if M.handle != N.handle:
        raise HandleMismatch("extension modules live over different rings")
    if M.side != N.side:
        raise HandleMismatch("extension modules live on different sides")
    nM = M.size()
    nN = N.size()
    if nM * nN > CARRIER_BUDGET:
        raise BudgetExceeded(
            "extension carrier has %d elements, budget %d" % (nM * nN, CARRIER_BUDGET)
        )
    if nM == 1 or nN == 1:
        return ExtClassification(_trivial_group(), 1, 0, 0, True, 0)

    tw = _Twists(M, N)
    L, u = tw.L, tw.u
    rows = tw.identity_rows()
    Zgens = _solutions_mod(rows, u, L)
    Brows = tw.split_rows()
    Hz = np.array(kernels.hnf_mod_q(Zgens, u, L), dtype=np.int64)
    HB = np.array(kernels.hnf_mod_q(Brows, u, L), dtype=np.int64)
    _coords_exact(HB, Hz)
    detZ = 1
    detB = 1
    for j in range(u):
        detZ *= int(Hz[j, j])
        detB *= int(HB[j, j])
    if detB % detZ:
        raise GabtopError("split twists escape the solved twist lattice")
    total = detB // detZ
    fs = _invariant_factors(Brows, Hz.tolist(), u, L, total)
    group = _group_from_factors(fs)

    rng = random.Random(seed)
    searches = 0
    checked = 0

    def check(x, expect_split, what):
        nonlocal searches, checked
        searches += 1
        got = tw.splits(np.asarray(x, dtype=np.int64) % L)
        if got != expect_split:
            raise GabtopError(
                "splitting search contradicts the class group at %s" % what
            )
        checked += 1

    def b_sample():
        co = [rng.randrange(L) for _ in range(HB.shape[0])]
        return (np.array(co, dtype=np.int64) @ HB) % L

    gen_rows = _residues(Hz, HB) % L
    seen = {}
    for r in gen_rows:
        tswitch = tuple(int(v) for v in r)
        if any(tswitch) and tswitch not in seen:
            seen[tswitch] = np.array(tswitch, dtype=np.int64)
    nontrivial = [seen[key] for key in sorted(seen)]

    if total <= verify_cap:
        classes = {tuple([0] * u)}
        frontier = [np.zeros(u, dtype=np.int64)]
        while frontier:
            batch = []
            for cls in frontier:
                for gvec in nontrivial:
                    batch.append(cls + gvec)
            if not batch:
                break
            frontier = []
            for r in _residues(np.array(batch, dtype=np.int64), HB) % L:
                key = tuple(int(v) for v in r)
                if key not in classes:
                    classes.add(key)
                    frontier.append(np.array(key, dtype=np.int64))
        if len(classes) != total:
            raise GabtopError("class enumeration disagrees with the lattice index")
        for key in sorted(classes):
            check(list(key), not any(key), "class %r" % (key,))
        check(b_sample(), True, "a random split twist")
        return ExtClassification(group, total, checked, searches, True, u)

    # certificate mode: generator orders plus random probes
    check([0] * u, True, "the direct sum")
    check(b_sample(), True, "a random split twist")
    divisors = sorted(dd for dd in range(1, L + 1) if L % dd == 0)

    def q_order(x):
        for dd in divisors:
            r = _residues((dd * x[None, :]) % L, HB)[0]
            if not np.any(r % L):
                return dd
        raise GabtopError("element order does not divide the exponent bound")

    picks = nontrivial[:6]
    rest = nontrivial[6:]
    while rest and len(picks) < 8:
        picks.append(rest.pop(rng.randrange(len(rest))))
    for gvec in picks:
        o = q_order(gvec)
        check(gvec, o == 1, "a generator")
        if o > 1:
            check((o * gvec) % L, True, "a generator times its order")
            for p, _ in _factor(o):
                check(((o // p) * gvec) % L, False, "a generator times a proper divisor")
    for _ in range(4):
        co = [rng.randrange(L) for _ in range(len(nontrivial))]
        x = np.zeros(u, dtype=np.int64)
        for ci, gvec in zip(co, nontrivial):
            x = (x + ci * gvec) % L
        check(x, q_order(x) == 1, "a random class")
    return ExtClassification(group, total, checked, searches, False, u)
