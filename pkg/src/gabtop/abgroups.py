"""Finitely presented abelian groups with exact presentations and maps.

A group is Z^g modulo the row span of a relation matrix. Elements are
integer row vectors of length g; the canonical coset representative is the
Hermite reduction against the relation lattice. Maps are generator-image
matrices. Hom, tensor and Ext come with explicit data objects so induced
maps can be built later (tower transitions need them).
"""

from fractions import Fraction

from .intlin import (
    hnf_with_transform,
    identity_matrix,
    in_row_span,
    left_kernel_basis,
    mat_mul,
    reduce_against_hnf,
    smith_with_transforms,
    solve_in_rows,
    vec_mat,
)


class AbGroup:
    __slots__ = ("ngens", "rels", "_hnf", "_pivots", "_smith")

    def __init__(self, ngens, rels=()):
        self.ngens = ngens
        self.rels = [list(r) for r in rels if any(r)]
        for r in self.rels:
            if len(r) != ngens:
                raise ValueError("relation width mismatch")
        self._hnf = None
        self._pivots = None
        self._smith = None

    def _echelon(self):
        if self._hnf is None:
            H, _, piv = hnf_with_transform(self.rels, self.ngens)
            self._hnf = H
            self._pivots = piv
        return self._hnf, self._pivots

    def reduce(self, v):
        H, piv = self._echelon()
        res, _ = reduce_against_hnf(list(v), H, piv)
        return res

    def is_zero_element(self, v):
        return all(t == 0 for t in self.reduce(v))

    def elements_equal(self, v, w):
        return self.reduce(v) == self.reduce(w)

    def zero(self):
        return [0] * self.ngens

    def gen(self, i):
        v = [0] * self.ngens
        v[i] = 1
        return v

    def invariants(self):
        """(free_rank, [d1, d2, ...]) nontrivial torsion, d1 | d2 | ..."""
        if self._smith is None:
            D, S, T = smith_with_transforms(self.rels, self.ngens)
            self._smith = (D, S, T)
        D, _, _ = self._smith
        diag = [D[i][i] for i in range(min(len(D), self.ngens))]
        rank_rel = sum(1 for d in diag if d != 0)
        tors = sorted(d for d in diag if d > 1)
        free = self.ngens - rank_rel
        return free, tors

    def smith_transform(self):
        """T with: v |-> v @ T carries cosets to Z^g modulo diag(d)."""
        self.invariants()
        D, _, T = self._smith
        diag = [D[i][i] for i in range(min(len(D), self.ngens))]
        diag += [0] * (self.ngens - len(diag))
        return T, diag

    def order(self):
        free, tors = self.invariants()
        if free:
            return None
        n = 1
        for d in tors:
            n *= d
        return n

    def is_finite(self):
        return self.invariants()[0] == 0

    def is_trivial(self):
        free, tors = self.invariants()
        return free == 0 and not tors

    def exponent(self):
        free, tors = self.invariants()
        if free:
            return None
        return tors[-1] if tors else 1

    def elements(self):
        """All canonical representatives; finite groups only."""
        if not self.is_finite():
            raise ValueError("infinite group enumeration")
        H, piv = self._echelon()
        # finite <=> every column carries a pivot
        bounds = [0] * self.ngens
        for i, c in enumerate(piv):
            bounds[c] = H[i][c]
        out = [[0] * self.ngens]
        for c in range(self.ngens):
            nxt = []
            for v in out:
                for t in range(bounds[c]):
                    w = list(v)
                    w[c] = t
                    nxt.append(w)
            out = nxt
        return [self.reduce(v) for v in out]

    def element_order(self, v):
        v = self.reduce(v)
        if all(t == 0 for t in v):
            return 1
        e = self.exponent()
        if e is None:
            raise ValueError("order in infinite group")
        for k in range(1, e + 1):
            if e % k:
                continue
            if self.is_zero_element([k * t for t in v]):
                return k
        return e

    def __repr__(self):
        free, tors = self.invariants()
        parts = ["Z"] * free + ["Z/%d" % d for d in tors]
        return "AbGroup(" + (" + ".join(parts) if parts else "0") + ")"


class AbMap:
    __slots__ = ("src", "dst", "M")

    def __init__(self, src, dst, M, check=True):
        self.src = src
        self.dst = dst
        self.M = [list(r) for r in M]
        if len(self.M) != src.ngens:
            raise ValueError("map has wrong number of generator images")
        for r in self.M:
            if len(r) != dst.ngens:
                raise ValueError("map image width mismatch")
        if check and not self.well_defined():
            raise ValueError("generator images do not respect relations")

    def well_defined(self):
        for r in self.src.rels:
            if not self.dst.is_zero_element(vec_mat(r, self.M)):
                return False
        return True

    def __call__(self, v):
        return self.dst.reduce(vec_mat(v, self.M))

    def compose(self, other):
        """self after other: other.src -> self.dst."""
        if other.dst is not self.src and other.dst.ngens != self.src.ngens:
            raise ValueError("composition mismatch")
        return AbMap(other.src, self.dst, mat_mul(other.M, self.M), check=False)

    def add(self, other):
        return AbMap(
            self.src,
            self.dst,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.M, other.M)],
            check=False,
        )

    def negate(self):
        return AbMap(self.src, self.dst, [[-a for a in r] for r in self.M], check=False)

    def is_zero_map(self):
        return all(self.dst.is_zero_element(r) for r in self.M)

    @staticmethod
    def identity(G):
        return AbMap(G, G, identity_matrix(G.ngens), check=False)

    @staticmethod
    def zero_map(src, dst):
        return AbMap(src, dst, [[0] * dst.ngens for _ in range(src.ngens)], check=False)


def direct_sum(groups):
    """Returns (G, injections, projections)."""
    total = sum(g.ngens for g in groups)
    rels = []
    off = 0
    offs = []
    for g in groups:
        offs.append(off)
        for r in g.rels:
            rels.append([0] * off + list(r) + [0] * (total - off - g.ngens))
        off += g.ngens
    G = AbGroup(total, rels)
    injs = []
    projs = []
    for g, off in zip(groups, offs):
        mi = [[0] * total for _ in range(g.ngens)]
        mp = [[0] * g.ngens for _ in range(total)]
        for i in range(g.ngens):
            mi[i][off + i] = 1
            mp[off + i][i] = 1
        injs.append(AbMap(g, G, mi, check=False))
        projs.append(AbMap(G, g, mp, check=False))
    return G, injs, projs


def kernel(f):
    """Returns (K, incl) with incl: K -> f.src, K = ker f."""
    A, B = f.src, f.dst
    # x with x@M in row span of B.rels: stack [M; B.rels], left kernel pairs
    stacked = [list(r) for r in f.M] + [list(r) for r in B.rels]
    kb = left_kernel_basis(stacked, B.ngens)
    lat = [row[: A.ngens] for row in kb]
    # the preimage lattice always contains A's own relations
    lat.extend(A.rels)
    H, _, piv = hnf_with_transform(lat, A.ngens)
    basis = H
    rels = []
    for r in A.rels:
        c = solve_in_rows(r, basis, A.ngens)
        if c is None:
            raise RuntimeError("relation escaped kernel lattice")
        rels.append(c)
    K = AbGroup(len(basis), rels)
    incl = AbMap(K, A, [list(r) for r in basis], check=False)
    return K, incl


def cokernel(f):
    """Returns (C, proj) with proj: f.dst -> C."""
    B = f.dst
    C = AbGroup(B.ngens, [list(r) for r in B.rels] + [list(r) for r in f.M])
    proj = AbMap(B, C, identity_matrix(B.ngens), check=False)
    return C, proj


def image(f):
    """Returns (I, incl: I -> dst, onto: src -> I)."""
    B = f.dst
    lat = [list(r) for r in f.M] + [list(r) for r in B.rels]
    H, _, piv = hnf_with_transform(lat, B.ngens)
    basis = H
    rels = []
    for r in B.rels:
        c = solve_in_rows(r, basis, B.ngens)
        if c is None:
            raise RuntimeError("ambient relation escaped image lattice")
        rels.append(c)
    I = AbGroup(len(basis), rels)
    incl = AbMap(I, B, [list(r) for r in basis], check=False)
    onto_rows = []
    for r in f.M:
        c = solve_in_rows(r, basis, B.ngens)
        onto_rows.append(c)
    onto = AbMap(f.src, I, onto_rows, check=False)
    return I, incl, onto


def homology_at(f, g):
    """ker(g)/im(f) for A -f-> B -g-> C with g o f == 0; returns AbGroup."""
    B = f.dst
    K, incl = kernel(g)
    # express f's image rows plus B's relations in the kernel lattice basis
    rels = list(K.rels)
    for r in f.M:
        c = solve_in_rows(r, incl.M, B.ngens)
        if c is None:
            # g o f must vanish for this to make sense
            raise ValueError("image does not land in kernel; composite nonzero")
        rels.append(c)
    return AbGroup(K.ngens, rels)


def is_exact_at(f, g):
    if not g.compose(f).is_zero_map():
        return False
    return homology_at(f, g).is_trivial()


def is_injective(f):
    K, _ = kernel(f)
    return K.is_trivial()


def is_surjective(f):
    C, _ = cokernel(f)
    return C.is_trivial()


def is_iso(f):
    return is_injective(f) and is_surjective(f)


class HomData:
    """Hom(A, B) as a group plus conversions element <-> actual map."""

    __slots__ = ("A", "B", "group", "_basis")

    def __init__(self, A, B):
        self.A = A
        self.B = B
        a, b = A.ngens, B.ngens
        nunk = a * b
        ra = len(A.rels)
        rb = len(B.rels)
        # unknowns: phi (a*b), plus y (ra*rb) witnessing rel_i @ phi = y_i @ B.rels
        cols = []
        width = ra * b
        rows = []
        for pi in range(a):
            for pj in range(b):
                row = [0] * width
                for i, rel in enumerate(A.rels):
                    if rel[pi]:
                        row[i * b + pj] = rel[pi]
                rows.append(row)
        for yi in range(ra):
            for yj in range(rb):
                row = [0] * width
                rel = B.rels[yj]
                for j in range(b):
                    if rel[j]:
                        row[yi * b + j] = -rel[j]
                rows.append(row)
        if width == 0:
            sol = identity_matrix(nunk + ra * rb)
        else:
            sol = left_kernel_basis(rows, width)
        # solution lattice projected to the phi block
        lat = [row[:nunk] for row in sol]
        H, _, piv = hnf_with_transform(lat, nunk)
        basis = H
        # null maps: every generator lands in the relation lattice of B
        null = []
        for i in range(a):
            for r in B.rels:
                w = [0] * nunk
                w[i * b : (i + 1) * b] = list(r)
                null.append(w)
        rels = []
        for w in null:
            c = solve_in_rows(w, basis, nunk) if basis else ([] if not any(w) else None)
            if c is None:
                raise RuntimeError("null map outside solution lattice")
            rels.append(c)
        self.group = AbGroup(len(basis), rels)
        self._basis = basis

    def to_map(self, hvec):
        a, b = self.A.ngens, self.B.ngens
        flat = [0] * (a * b)
        for c, row in zip(hvec, self._basis):
            if c:
                for j, t in enumerate(row):
                    flat[j] += c * t
        M = [flat[i * b : (i + 1) * b] for i in range(a)]
        return AbMap(self.A, self.B, M, check=False)

    def from_map(self, f):
        a, b = self.A.ngens, self.B.ngens
        flat = []
        for r in f.M:
            flat.extend(r)
        if not self._basis:
            if any(flat):
                # flatten modulo null maps may still succeed; try augmenting
                raise ValueError("map not represented in trivial hom lattice")
            return self.group.zero()
        c = solve_in_rows(flat, self._basis, a * b)
        if c is None:
            # maps equal modulo null part may differ as matrices; augment
            aug = list(self._basis)
            for i in range(a):
                for r in self.B.rels:
                    w = [0] * (a * b)
                    w[i * b : (i + 1) * b] = list(r)
                    aug.append(w)
            c2 = solve_in_rows(flat, aug, a * b)
            if c2 is None:
                raise ValueError("map is not in the hom lattice")
            c = c2[: len(self._basis)]
        return self.group.reduce(c)


def hom_induced(src_data, dst_data, pre=None, post=None):
    """Map Hom(A,B) -> Hom(A',B'), phi |-> post o phi o pre.

    pre: A' -> A (or None for identity), post: B -> B' (or None).
    """
    rows = []
    for i in range(src_data.group.ngens):
        f = src_data.to_map(src_data.group.gen(i))
        if pre is not None:
            f = f.compose(pre)
        if post is not None:
            f = post.compose(f)
        rows.append(dst_data.from_map(f))
    return AbMap(src_data.group, dst_data.group, rows, check=False)


class TensorData:
    """(A tensor B) with pure-tensor access."""

    __slots__ = ("A", "B", "group")

    def __init__(self, A, B):
        self.A = A
        self.B = B
        a, b = A.ngens, B.ngens
        rels = []
        for r in A.rels:
            for j in range(b):
                w = [0] * (a * b)
                for i in range(a):
                    w[i * b + j] = r[i]
                rels.append(w)
        for r in B.rels:
            for i in range(a):
                w = [0] * (a * b)
                w[i * b : (i + 1) * b] = list(r)
                rels.append(w)
        self.group = AbGroup(a * b, rels)

    def pure(self, va, vb):
        a, b = self.A.ngens, self.B.ngens
        w = [0] * (a * b)
        for i in range(a):
            if va[i]:
                for j in range(b):
                    if vb[j]:
                        w[i * b + j] += va[i] * vb[j]
        return self.group.reduce(w)


def tensor_induced(src_data, dst_data, fa, fb):
    """(fa tensor fb): A (x) B -> A' (x) B' on pure tensors."""
    a, b = src_data.A.ngens, src_data.B.ngens
    rows = []
    for i in range(a):
        for j in range(b):
            va = fa.M[i] if fa is not None else src_data.A.gen(i)
            vb = fb.M[j] if fb is not None else src_data.B.gen(j)
            rows.append(dst_data.pure(va, vb))
    return AbMap(src_data.group, dst_data.group, rows, check=False)


class ExtData:
    """Ext^1(A, B) over the integers from the echelon free presentation.

    With L the echelon relation lattice of A (rows lbasis, rank k), the
    resolution 0 -> Z^k -> Z^a -> A -> 0 gives Ext^1(A,B) as the cokernel
    of Hom(Z^a, B) -> Hom(Z^k, B) = B^k. Cocycles are k-tuples of B
    elements; cocycle_of / class_of convert both ways.
    """

    __slots__ = ("A", "B", "group", "lbasis", "_bsum", "_injs", "_projs", "_proj_map")

    def __init__(self, A, B):
        self.A = A
        self.B = B
        H, _, piv = hnf_with_transform(A.rels, A.ngens)
        self.lbasis = H
        k = len(H)
        Bk, injs, projs = direct_sum([B] * k) if k else (AbGroup(0), [], [])
        self._bsum = Bk
        self._injs = injs
        self._projs = projs
        # image of restriction: for each generator position i of Z^a and each
        # generator t of B: the k-tuple (H[r][i] * b_t)_r
        rows = []
        for i in range(A.ngens):
            for t in range(B.ngens):
                w = [0] * Bk.ngens
                for r in range(k):
                    if H[r][i]:
                        w[r * B.ngens + t] = H[r][i]
                rows.append(w)
        restr = AbMap(AbGroup(A.ngens * B.ngens), Bk, rows, check=False) if k else None
        if k:
            self.group, self._proj_map = cokernel(restr)
        else:
            self.group = AbGroup(0)
            self._proj_map = None

    def class_of_cocycle(self, rows):
        """rows: list of k B-element vectors (image of each lbasis row)."""
        k = len(self.lbasis)
        if k == 0:
            return self.group.zero()
        w = []
        for r in rows:
            w.extend(r)
        return self._proj_map(w)

    def cocycle_of_class(self, v):
        k = len(self.lbasis)
        b = self.B.ngens
        return [list(v[r * b : (r + 1) * b]) for r in range(k)]


def ext_induced_contra(src_data, dst_data, pre):
    """Ext^1(A,B) -> Ext^1(A',B) along pre: A' -> A (same B).

    src_data is Ext(A,B), dst_data is Ext(A',B).
    """
    A, Ap = src_data.A, dst_data.A
    # lift pre on relation lattices: each lbasis row of A' maps into A's lattice
    lam = []
    for r in dst_data.lbasis:
        v = vec_mat(r, pre.M)
        c = solve_in_rows(v, src_data.lbasis, A.ngens)
        if c is None:
            raise ValueError("presentation lift failed; map not well defined")
        lam.append(c)
    rows = []
    for i in range(src_data.group.ngens):
        coc = src_data.cocycle_of_class(src_data.group.gen(i))
        # pulled back cocycle on A' lattice basis: row r' = sum lam[r'][r]*coc[r]
        newrows = []
        for rp in range(len(dst_data.lbasis)):
            acc = [0] * src_data.B.ngens
            for r, c in enumerate(lam[rp]):
                if c:
                    for j in range(len(acc)):
                        acc[j] += c * coc[r][j]
            newrows.append(acc)
        rows.append(dst_data.class_of_cocycle(newrows))
    return AbMap(src_data.group, dst_data.group, rows, check=False)


class FiniteDual:
    """Hom(A, Q/Z) of a finite group, with exact character pairing."""

    __slots__ = ("A", "group", "_T", "_diag")

    def __init__(self, A):
        if not A.is_finite():
            raise ValueError("dual of an infinite group")
        T, diag = A.smith_transform()
        self.A = A
        self._T = T
        self._diag = diag
        self.group = AbGroup(len(diag), [[diag[i] if j == i else 0 for j in range(len(diag))] for i in range(len(diag))])

    def pair(self, chi, v):
        """Value of character chi on element v, in Q/Z as a Fraction in [0,1)."""
        w = vec_mat(v, self._T)
        total = Fraction(0)
        for c, x, d in zip(chi, w, self._diag):
            if d:
                total += Fraction(c * x, d)
        return total - (total.numerator // total.denominator)

    def dual_map(self, f, dual_src, dual_dst=None):
        """Transpose of f: A -> B, as map dual(B) -> dual(A).

        dual_src must be FiniteDual(B) (the dual being mapped from), and
        self is FiniteDual(A); returns AbMap dual_src.group -> self.group.
        """
        B = dual_src.A
        rows = []
        for j in range(dual_src.group.ngens):
            chi = dual_src.group.gen(j)
            # chi o f as a character on A: find coordinates by evaluating on
            # the Smith basis of A and clearing denominators
            coords = []
            for i in range(len(self._diag)):
                d = self._diag[i]
                if d == 0:
                    coords.append(0)
                    continue
                # element of A whose Smith coordinates are e_i
                Tinv_row = self._smith_basis_elem(i)
                val = dual_src.pair(chi, f(Tinv_row))
                # val should be a multiple of 1/d
                num = val * d
                if num.denominator != 1:
                    raise RuntimeError("character transpose not integral")
                coords.append(int(num) % d)
            rows.append(coords)
        return AbMap(dual_src.group, self.group, rows, check=False)

    def _smith_basis_elem(self, i):
        # solve x @ T = e_i over Z (T unimodular)
        n = len(self._diag)
        e = [1 if j == i else 0 for j in range(n)]
        x = solve_in_rows(e, self._T, n)
        if x is None:
            raise RuntimeError("unimodular solve failed")
        return x
