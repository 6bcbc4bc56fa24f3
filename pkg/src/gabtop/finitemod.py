"""Modules over the finite ring classes, as finite abelian groups with
explicit ring action.

A FiniteModule stores an AbGroup together with one action map per additive
basis element of the ring (for IntegersMod the basis is {1}; for
UpperTriangular2 it is {e11, e12, e22}). Arbitrary ring elements act via
the integer decomposition over that basis, which is compatible with both
one-sided actions. Enumeration tables with provenance feed the brute-force
searches in the Ext oracle.
"""

from .abgroups import (
    AbGroup,
    AbMap,
    HomData,
    direct_sum,
    kernel,
)
from .errors import HandleMismatch
from .intlin import (
    hnf_with_transform,
    left_kernel_basis,
    reduce_against_hnf,
    solve_in_rows,
)
from . import kernels


def ring_additive_basis(handle):
    k = handle.key[0]
    if k == "IntegersMod":
        return [1]
    if k == "UpperTriangular2":
        return [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    raise HandleMismatch("no additive basis for %r" % (handle.key,))


def ring_coeffs(handle, r):
    """Integer coefficients of r over ring_additive_basis."""
    k = handle.key[0]
    if k == "IntegersMod":
        return [r % handle.n]
    if k == "UpperTriangular2":
        a, b, d = handle.canon(r)
        return [a, b, d]
    raise HandleMismatch("no additive basis for %r" % (handle.key,))


class FiniteModule:
    """A finite module over IntegersMod(n) or UpperTriangular2(p)."""

    __slots__ = ("handle", "group", "side", "acts", "_tables", "_res_cache")

    def __init__(self, handle, group, acts, side="right"):
        self.handle = handle
        self.group = group
        self.side = side
        self.acts = acts
        self._tables = None
        self._res_cache = None
        for m in acts:
            if not m.well_defined:
                raise ValueError("action does not respect the relations")

    def act_map(self, r):
        coeffs = ring_coeffs(self.handle, r)
        out = None
        for c, m in zip(coeffs, self.acts):
            if c == 0:
                continue
            term = AbMap(
                self.group,
                self.group,
                [[c * x for x in row] for row in m.M],
                check=False,
            )
            out = term if out is None else out.add(term)
        if out is None:
            return AbMap.zero_map(self.group, self.group)
        return out

    def act(self, v, r):
        return self.group.reduce(self.act_map(r)(v))

    def size(self):
        return self.group.order()

    def zero(self):
        return self.group.zero()

    def elements(self):
        return self.group.elements()

    # ------------------------------------------------------------ tables

    def tables(self):
        """(elems, index, add_table, act_tables, provenance arrays)."""
        if self._tables is not None:
            return self._tables
        elems = [tuple(e) for e in self.group.elements()]
        index = {e: i for i, e in enumerate(elems)}
        n = len(elems)
        add = [[0] * n for _ in range(n)]
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                s = tuple(self.group.reduce([x + y for x, y in zip(a, b)]))
                add[i][j] = index[s]
        acts = []
        for m in self.acts:
            col = [index[tuple(self.group.reduce(m(list(e))))] for e in elems]
            acts.append(col)
        prov = self._provenance(elems, index, add)
        self._tables = (elems, index, add, acts, prov)
        return self._tables

    def _provenance(self, elems, index, add):
        """Build order covering the group from its AbGroup generators."""
        n = len(elems)
        kind = [-1] * n
        pa = [0] * n
        pb = [0] * n
        order = []
        zero = index[tuple(self.group.reduce([0] * self.group.ngens))]
        kind[zero] = 2
        order.append(zero)
        gens = []
        for g in range(self.group.ngens):
            gi = index[tuple(self.group.reduce(self.group.gen(g)))]
            gens.append(gi)
            if kind[gi] == -1:
                kind[gi] = 0
                pa[gi] = g
                order.append(gi)
        frontier = list(order)
        while frontier:
            new = []
            for i in frontier:
                for g in gens:
                    j = add[i][g]
                    if kind[j] == -1:
                        kind[j] = 1
                        pa[j] = i
                        pb[j] = g
                        order.append(j)
                        new.append(j)
            frontier = new
        # reorder so that every parent precedes its child
        perm = {old: new for new, old in enumerate(order)}
        k2 = [0] * n
        a2 = [0] * n
        b2 = [0] * n
        for old, new in perm.items():
            k2[new] = kind[old]
            a2[new] = pa[old] if kind[old] == 0 else (perm[pa[old]] if kind[old] == 1 else 0)
            b2[new] = perm[pb[old]] if kind[old] == 1 else 0
        return (k2, a2, b2, [perm[i] for i in gens], perm, order)

    # --------------------------------------------------------- morphisms

    def module_generators(self):
        """A small generating list (as group vectors) over the ring.

        Tries single generators first (free covers stay small when the
        module is cyclic), then extends greedily and prunes redundant
        picks.  Spans are compared as integer lattices, never by element
        enumeration.
        """
        target = self.size()
        if target == 1:
            return []
        if target <= 1024:
            for e in self.group.elements():
                if not any(e):
                    continue
                if _span_order(self, [list(e)]) == target:
                    return [list(e)]
        gens = []
        H = piv = None
        for e in self.group.elements():
            if H is not None:
                res, _ = reduce_against_hnf(list(e), H, piv)
                if not any(res):
                    continue
            elif not any(e):
                continue
            gens.append(list(e))
            H, piv, covered = _span_state(self, gens)
            if covered == target:
                break
        return _prune_generators(self, gens, target)


def regular_module(handle, side="right"):
    """The ring as a module over itself on the given side."""
    basis = ring_additive_basis(handle)
    char = handle.n if handle.key[0] == "IntegersMod" else handle.p
    k = len(basis)
    group = AbGroup(k, [[char if i == j else 0 for j in range(k)] for i in range(k)])
    acts = []
    for b in basis:
        rows = []
        for e in basis:
            prod = handle.mul(e, b) if side == "right" else handle.mul(b, e)
            rows.append(ring_coeffs(handle, prod))
        acts.append(AbMap(group, group, rows))
    return FiniteModule(handle, group, acts, side)


def free_module(handle, rank, side="right"):
    if rank == 0:
        return zero_module(handle, side)
    R = regular_module(handle, side)
    G, injs, projs = direct_sum([R.group] * rank)
    acts = []
    for t in range(len(R.acts)):
        M = []
        for c in range(rank):
            for row in R.acts[t].M:
                M.append([0] * (R.group.ngens * c) + list(row) + [0] * (R.group.ngens * (rank - c - 1)))
        acts.append(AbMap(G, G, M))
    return FiniteModule(handle, G, acts, side)


def zero_module(handle, side="right"):
    G = AbGroup(1, [[1]])
    z = AbMap(G, G, [[0]])
    nacts = len(ring_additive_basis(handle))
    return FiniteModule(handle, G, [z] * nacts, side)


def module_span_rows(M, vectors):
    """Lattice rows (in M.group coordinates) of the submodule generated."""
    rows = []
    basis = ring_additive_basis(M.handle)
    for v in vectors:
        rows.append(list(M.group.reduce(list(v))))
        for b in basis:
            rows.append(list(M.act(list(v), b)))
    return rows


def _span_state(M, gens):
    """(H, pivots, order) of the submodule of M spanned by gens.

    The span is the additive lattice of the generator orbits under the
    ring basis, joined with M's relations; its order is |M| divided by
    the quotient order.
    """
    rows = module_span_rows(M, gens) + [list(r) for r in M.group.rels]
    H, _, piv = hnf_with_transform(rows, M.group.ngens)
    order = M.size() // AbGroup(M.group.ngens, rows).order()
    return H, piv, order


def _span_order(M, gens):
    rows = module_span_rows(M, gens) + [list(r) for r in M.group.rels]
    return M.size() // AbGroup(M.group.ngens, rows).order()


def _prune_generators(M, gens, target):
    """Drop generators whose removal keeps the span full."""
    i = len(gens) - 1
    while i >= 0 and len(gens) > 1:
        rest = gens[:i] + gens[i + 1 :]
        if _span_order(M, rest) == target:
            gens = rest
        i -= 1
    return gens


def quotient_module(M, vectors):
    """M / (submodule generated by vectors), with the projection."""
    rows = module_span_rows(M, vectors)
    G = AbGroup(M.group.ngens, [list(r) for r in M.group.rels] + rows)
    acts = [AbMap(G, G, m.M) for m in M.acts]
    Q = FiniteModule(M.handle, G, acts, M.side)
    proj = AbMap(M.group, G, [list(G.gen(i)) for i in range(G.ngens)])
    return Q, proj


def submodule(M, vectors):
    """The submodule generated by vectors, with its inclusion into M."""
    rows = module_span_rows(M, vectors)
    H, _, piv = hnf_with_transform(rows, M.group.ngens)
    gens = [list(r) for r in H]
    if not gens:
        Z = zero_module(M.handle, M.side)
        incl = AbMap(Z.group, M.group, [[0] * M.group.ngens])
        return Z, incl
    k = len(gens)
    # relations among the chosen generators modulo M's relations
    stacked = gens + [list(r) for r in M.group.rels]
    rels = []
    for v in left_kernel_basis(stacked, M.group.ngens):
        rels.append(v[:k])
    G = AbGroup(k, rels)
    incl = AbMap(G, M.group, gens)
    acts = []
    for m in M.acts:
        rows_a = []
        for g in gens:
            img = M.group.reduce(m(g))
            c = _coords_in(gens, M, img)
            rows_a.append(c)
        acts.append(AbMap(G, G, rows_a))
    S = FiniteModule(M.handle, G, acts, M.side)
    return S, incl


def _coords_in(gens, M, v):
    """Coordinates of v (reduced in M) over gens, modulo M's relations."""
    stacked = [list(g) for g in gens] + [list(r) for r in M.group.rels]
    x = solve_in_rows(list(v), stacked, M.group.ngens)
    if x is None:
        raise ValueError("element not in the span")
    return x[: len(gens)]


def from_presentation(handle, rows, ngens, side="right"):
    """Cokernel of the map with the given ring-entry matrix of relations."""
    if ngens == 0:
        return zero_module(handle, side), None
    F = free_module(handle, ngens, side)
    vectors = []
    for row in rows:
        v = []
        for entry in row:
            v.extend(ring_coeffs(handle, entry))
        vectors.append(v)
    return quotient_module(F, vectors)


def hom_group(M, N):
    """(K, hd, incl): K = the R-linear maps inside the abelian hom group."""
    if M.handle != N.handle:
        raise HandleMismatch("modules over different rings")
    if M.side != N.side:
        raise HandleMismatch("one-sided module mismatch")
    hd = HomData(M.group, N.group)
    H = hd.group
    defects = []
    for t in range(len(M.acts)):
        rows = []
        for j in range(H.ngens):
            f = hd.to_map(H.gen(j))
            g = f.compose(M.acts[t]).add(N.acts[t].compose(f).negate())
            rows.append(hd.from_map(g))
        defects.append(AbMap(H, H, rows))
    if len(defects) == 1:
        K, incl = kernel(defects[0])
        return K, hd, incl
    P, injs, projs = direct_sum([H] * len(defects))
    rows = []
    for j in range(H.ngens):
        row = []
        for d in defects:
            row.extend(d.M[j])
        rows.append(row)
    stacked = AbMap(H, P, rows)
    K, incl = kernel(stacked)
    return K, hd, incl


def all_module_maps(M, N):
    """Brute-force list of R-linear maps M -> N as index vectors."""
    elems_M, idx_M, add_M, acts_M, prov = M.tables()
    elems_N, idx_N, add_N, acts_N, _ = N.tables()
    kind, pa, pb, gen_positions, perm, order = prov
    zero_N = idx_N[tuple(N.zero())]
    # candidate images for each group generator of M: elements of N with
    # compatible additive order
    gens = list(range(M.group.ngens))
    cands = []
    for g in gens:
        o = M.group.element_order(M.group.gen(g))
        opts = [i for i, e in enumerate(elems_N) if _order_divides(N, e, o)]
        cands.append(opts)
    out = []
    inv = {v: k for k, v in perm.items()}

    def rec(i, images):
        if i == len(gens):
            fv = kernels.fill_by_provenance(kind, pa, pb, images, add_N, zero_N)
            # fv is indexed by build order; translate to element order
            f = [0] * len(elems_M)
            for pos in range(len(elems_M)):
                f[inv[pos]] = fv[pos]
            if kernels.is_module_map(f, add_M, add_N, acts_M, acts_N):
                out.append(f)
            return
        for c in cands[i]:
            rec(i + 1, images + [c])

    rec(0, [])
    return out


def _order_divides(N, e, o):
    v = list(e)
    acc = N.group.reduce([x * o for x in v])
    return N.group.is_zero_element(acc)


def tensor_group(M, N):
    """M ⊗_T N as an abelian group, M right and N left over the same ring."""
    if M.handle != N.handle:
        raise HandleMismatch("modules over different rings")
    gens_M = M.module_generators()
    a = len(gens_M)
    if a == 0:
        return AbGroup(1, [[1]]), None
    # kernel of the free cover T^a -> M; its generators (as a group is
    # enough) give the relations (k_1 n, ..., k_a n) in N^a
    F = free_module(M.handle, a, M.side)
    cover = free_cover_map(F, M, gens_M)
    Kgrp, incl = kernel(cover)
    kgens = [
        list(F.group.reduce(incl(list(Kgrp.gen(i))))) for i in range(Kgrp.ngens)
    ]
    P, injs, projs = direct_sum([N.group] * a)
    rel_rows = [list(r) for r in P.rels]
    for kv in kgens:
        ring_entries = decode_free_vector(M.handle, kv, a)
        for n_el in N.elements():
            row = []
            for e in ring_entries:
                row.extend(N.act(list(n_el), e))
            rel_rows.append(row)
    G = AbGroup(P.ngens, rel_rows)
    return G, (gens_M, a)


def decode_free_vector(handle, v, rank):
    """Group coordinates of T^rank -> list of ring elements per block."""
    k = len(ring_additive_basis(handle))
    out = []
    for c in range(rank):
        coeffs = v[c * k : (c + 1) * k]
        if handle.key[0] == "IntegersMod":
            out.append(coeffs[0] % handle.n)
        else:
            out.append(handle.canon(tuple(coeffs)))
    return out


def resolution_steps(M):
    """Two free-cover steps F2 -> F1 -> F0 ->> M; returns rank/row data.

    Result: (a, g1, b, g2, c) with F0 = T^a covering M, d1: T^b -> F0
    having generator images g1 (spanning ker F0->M), d2: T^c -> F1 with
    images g2 (spanning ker d1), ranks possibly zero.
    """
    if M._res_cache is not None:
        return M._res_cache
    gens0 = M.module_generators()
    a = len(gens0)
    if a == 0:
        M._res_cache = (0, [], 0, [], 0)
        return M._res_cache
    F0 = free_module(M.handle, a, M.side)
    d0 = free_cover_map(F0, M, gens0)
    g1 = kernel_module_gens(F0, d0)
    b = len(g1)
    if b == 0:
        M._res_cache = (a, [], 0, [], 0)
        return M._res_cache
    F1 = free_module(M.handle, b, M.side)
    d1 = free_cover_map(F1, F0, g1)
    g2 = kernel_module_gens(F1, d1)
    c = len(g2)
    M._res_cache = (a, g1, b, g2, c)
    return M._res_cache


def ext1_resolution(M, N):
    """Ext^1 over the ring via two free-cover steps; returns an AbGroup."""
    if M.handle != N.handle:
        raise HandleMismatch("modules over different rings")
    a, g1, b, g2, c = resolution_steps(M)
    from .abgroups import homology_at

    if a == 0 or b == 0:
        return AbGroup(1, [[1]])
    d1s = hom_transition(M.handle, g1, a, b, N)
    if c == 0:
        Z = AbGroup(1, [[1]])
        d2s = AbMap(d1s.dst, Z, [[0]] * d1s.dst.ngens)
    else:
        d2s = hom_transition(M.handle, g2, b, c, N)
    return homology_at(d1s, d2s)


def free_cover_map(F, M, gens):
    """The module map F = T^rank -> M sending block i to gens[i]."""
    rows = []
    basis = ring_additive_basis(M.handle)
    for g in gens:
        for bvec in basis:
            rows.append(list(M.act(list(g), bvec)))
    return AbMap(F.group, M.group, rows)


def kernel_module_gens(F, d):
    """Greedy module generators of ker(d) inside the free module F.

    The kernel is a submodule of F, so its module span is tracked as an
    integer lattice in F's coordinates rather than by element sets.
    """
    Kgrp, incl = kernel(d)
    target = Kgrp.order()
    if target == 1:
        return []
    gens = []
    H = piv = None
    for e in Kgrp.elements():
        v = F.group.reduce(incl(list(e)))
        if H is not None:
            res, _ = reduce_against_hnf(list(v), H, piv)
            if not any(res):
                continue
        elif not any(v):
            continue
        gens.append(list(v))
        H, piv, covered = _span_state(F, gens)
        if covered == target:
            break
    return _prune_generators(F, gens, target)


def free_hom_group(handle, rank, N):
    """Hom_R(T^rank, N) ≅ N^rank as an abelian group."""
    P, injs, projs = direct_sum([N.group] * rank)
    return P, (injs, projs)


def hom_transition(handle, dgens, a, b, N):
    """Hom(T^a, N) -> Hom(T^b, N) induced by d: T^b -> T^a with rows dgens.

    dgens[j] is the image of the j-th free generator, as a group vector of
    T^a; its ring-entry decoding tells how to act on N-tuples.
    """
    Pa, _ = free_hom_group(handle, a, N)
    Pb, _ = free_hom_group(handle, b, N)
    ng = N.group.ngens
    decoded = [decode_free_vector(handle, dgens[j], a) for j in range(b)]
    rows = []
    for i in range(a):
        for gcoord in range(ng):
            # image of the (i, gcoord) generator of N^a
            out = [0] * (b * ng)
            for j in range(b):
                r = decoded[j][i]
                img = N.act(list(N.group.gen(gcoord)), r)
                for t in range(ng):
                    out[j * ng + t] += img[t]
            rows.append(out)
    return AbMap(Pa, Pb, rows)
