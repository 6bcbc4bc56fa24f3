"""Right linear topologies given by an explicit base of ideals.

A base here is a finite list of right ideals; the topology it encodes is
the upward closure (every right ideal containing a base member is open).
Everything is checked against finite data, so verdicts come with bounds:

* ``full_enumeration``: the ring is finite and the base is complete, so
  every verdict is exact.
* ``finite_set``: the base is complete as given, but scalar quantifiers
  over an infinite ring run over a sample; failures are exact.
* ``chain``: the materialized ideals are a finite prefix of an infinite
  descending chain.  Candidates that land strictly inside the deepest
  materialized ideal are beyond the bound, not counterexamples.

The same escape applies to any base flagged ``truncated`` (for example
the merged base of several chain prefixes).  A verdict therefore never
claims more than "verified for every instance decidable at this depth
and sample", and every failure carries a concrete witness.
"""

from .errors import (
    BadCertificate,
    EmptyGenerators,
    FiniteOnly,
    HandleMismatch,
    MalformedChain,
    NotDirected,
    PartialClosure,
    TwoSidedRequired,
)
from .rings import (
    Ideal,
    colon_ideal,
    ideal_intersect,
    translate_product,
    _ideal_generators,
)

__all__ = [
    "AxiomVerdict",
    "TopologyBase",
    "TOmegaWitness",
    "TopologyFamily",
    "all_right_ideals",
    "check_axioms",
    "check_t_omega",
    "default_sample",
    "saturate",
    "same_filter",
    "topology_le",
    "union_topologies",
]


class AxiomVerdict:
    """Outcome of one bounded axiom check.

    ``status`` is one of "verified", "failed", "unchecked".  A verified
    verdict records the bound it was checked at; a failed one always
    carries a concrete witness.
    """

    __slots__ = ("status", "bound", "witness")

    def __init__(self, status, bound=None, witness=None):
        self.status = status
        self.bound = bound
        self.witness = witness

    @classmethod
    def verified(cls, bound):
        return cls("verified", bound=bound)

    @classmethod
    def failed(cls, witness):
        return cls("failed", witness=witness)

    @classmethod
    def unchecked(cls):
        return cls("unchecked")

    @property
    def is_verified(self):
        return self.status == "verified"

    @property
    def is_failed(self):
        return self.status == "failed"

    def as_dict(self):
        out = {"status": self.status}
        if self.bound is not None:
            out["bound"] = self.bound
        if self.witness is not None:
            w = self.witness
            out["witness"] = {
                k: (v.describe() if isinstance(v, Ideal) else v)
                for k, v in w.items()
            }
        return out

    def __repr__(self):
        if self.status == "failed":
            return "AxiomVerdict(failed, witness=%r)" % (self.witness,)
        if self.status == "verified":
            return "AxiomVerdict(verified at %r)" % (self.bound,)
        return "AxiomVerdict(unchecked)"


AXIOM_NAMES = ("T0", "T1", "T2", "T3", "T4p")


def _fresh_flags():
    return {name: AxiomVerdict.unchecked() for name in AXIOM_NAMES}


class TopologyBase:
    """A finite base of right ideals together with per-axiom verdicts."""

    __slots__ = ("handle", "kind", "ideals", "depth", "rule", "truncated",
                 "axiom_flags")

    def __init__(self, handle, ideals, kind="finite_set", depth=None,
                 rule=None, truncated=False):
        if kind not in ("finite_set", "chain", "full_enumeration"):
            raise ValueError("unknown base kind %r" % (kind,))
        ideals = list(ideals)
        if not ideals:
            raise EmptyGenerators("a topology base needs at least one ideal")
        for I in ideals:
            if I.handle != handle:
                raise HandleMismatch("base ideal over a different ring")
        if kind == "full_enumeration" and not handle.is_finite:
            raise FiniteOnly("full enumeration needs a finite ring")
        if kind == "chain":
            _require_descending(ideals)
            truncated = True
        if kind == "full_enumeration":
            truncated = False
        self.handle = handle
        self.kind = kind
        self.ideals = ideals
        self.depth = len(ideals) if depth is None else depth
        self.rule = rule
        self.truncated = truncated
        self.axiom_flags = _fresh_flags()

    @classmethod
    def chain(cls, handle, rule, depth):
        """Materialize ``rule(1), ..., rule(depth)`` as a descending chain."""
        if depth < 2:
            raise MalformedChain("chain bases need depth at least 2")
        ideals = [rule(n) for n in range(1, depth + 1)]
        return cls(handle, ideals, kind="chain", depth=depth, rule=rule)

    @classmethod
    def finite_set(cls, handle, ideals):
        return cls(handle, ideals, kind="finite_set")

    @classmethod
    def full_enumeration(cls, handle, ideals):
        return cls(handle, ideals, kind="full_enumeration")

    def members(self):
        return list(self.ideals)

    def in_filter(self, I):
        """Whether ``I`` is open, i.e. contains some base ideal."""
        return any(I.contains_ideal(W) for W in self.ideals)

    def beyond_bound(self, I):
        # strictly deeper than the materialized data; only meaningful
        # for truncated bases
        return self.truncated and any(W.contains_ideal(I) for W in self.ideals)

    def describe(self):
        return "%s[%s]" % (self.kind, ", ".join(I.describe() for I in self.ideals))

    def __repr__(self):
        return "TopologyBase(%s over %r)" % (self.describe(), self.handle.key)


def _require_descending(ideals):
    for n, (a, b) in enumerate(zip(ideals, ideals[1:]), start=1):
        if not a.contains_ideal(b):
            raise MalformedChain(
                "chain is not descending at step %d: %s does not contain %s"
                % (n, a.describe(), b.describe())
            )


def default_sample(handle, ideals):
    """Scalar pool for bounded quantifiers: 0, 1, ring generators,
    base ideal generators, and pairwise products of all of those."""
    pool = list(handle.sample_elements())
    for I in ideals:
        for g in _ideal_generators(I):
            pool.append(handle.canon(g))
    prods = [handle.mul(a, b) for a in pool for b in pool]
    out, seen = [], set()
    for x in pool + prods:
        x = handle.canon(x)
        k = handle.format(x)
        if k not in seen:
            seen.add(k)
            out.append(x)
    return out


def _scalar_pool(B, sample):
    if sample is not None:
        return [B.handle.canon(s) for s in sample]
    if B.kind == "full_enumeration":
        return [B.handle.canon(x) for x in B.handle.elements()]
    return default_sample(B.handle, B.ideals)


def check_axioms(B, sample=None):
    """Run the bounded axiom battery and record verdicts on ``B``.

    Openness of the whole ring and upward closure hold by construction,
    so those two flags only restate the base shape.  The real checks:
    pairwise meets stay open, colons of open ideals by sampled scalars
    stay open, and generator translates of one open ideal by another
    stay open.  Chain and truncated bases get the beyond-bound escape
    described in the module docstring; complete bases do not.
    """
    exhaustive = B.kind == "full_enumeration"
    if B.kind == "chain":
        _require_descending(B.ideals)
    scalars = _scalar_pool(B, sample)
    if not scalars:
        raise EmptyGenerators("axiom check needs a nonempty scalar sample")

    n = len(B.ideals)
    flags = B.axiom_flags
    flags["T0"] = AxiomVerdict.verified({"members": n, "kind": B.kind})
    flags["T1"] = AxiomVerdict.verified("upward closure implicit in base semantics")

    # pairwise meets
    if B.kind == "chain":
        flags["T2"] = AxiomVerdict.verified({"chain_depth": B.depth})
    else:
        verdict = None
        for i in range(n):
            for j in range(i, n):
                meet = ideal_intersect(B.ideals[i], B.ideals[j])
                if B.in_filter(meet) or B.beyond_bound(meet):
                    continue
                verdict = AxiomVerdict.failed({
                    "axiom": "T2",
                    "left": B.ideals[i],
                    "right": B.ideals[j],
                    "meet": meet,
                })
                break
            if verdict:
                break
        flags["T2"] = verdict or AxiomVerdict.verified(
            {"pairs": n * (n + 1) // 2, "exact": exhaustive})

    # colons by sampled scalars
    verdict = None
    skipped = 0
    for I in B.ideals:
        for s in scalars:
            C = colon_ideal(I, s)
            if B.in_filter(C):
                continue
            if B.beyond_bound(C):
                skipped += 1
                continue
            verdict = AxiomVerdict.failed({
                "axiom": "T3",
                "ideal": I,
                "scalar": B.handle.format(s),
                "colon": C,
            })
            break
        if verdict:
            break
    flags["T3"] = verdict or AxiomVerdict.verified(
        {"scalars": len(scalars), "beyond_bound": skipped, "exact": exhaustive})

    # generator translates J*K for ordered base pairs
    verdict = None
    skipped = 0
    for J in B.ideals:
        gens = _ideal_generators(J)
        for K in B.ideals:
            H = translate_product(gens, K)
            if B.in_filter(H):
                continue
            if B.beyond_bound(H):
                skipped += 1
                continue
            verdict = AxiomVerdict.failed({
                "axiom": "T4p",
                "left": J,
                "right": K,
                "product": H,
            })
            break
        if verdict:
            break
    flags["T4p"] = verdict or AxiomVerdict.verified(
        {"pairs": n * n, "beyond_bound": skipped, "exact": exhaustive})

    if exhaustive:
        flags["T4"] = _check_t4_exhaustive(B)
    return B


def _check_t4_exhaustive(B):
    """Exact closure axiom over a finite ring: a right ideal whose colons
    along some open ideal are all open must itself be open."""
    h = B.handle
    for I in all_right_ideals(h):
        if B.in_filter(I):
            continue
        for W in B.ideals:
            if all(B.in_filter(colon_ideal(I, s)) for s in W.element_list()):
                return AxiomVerdict.failed({
                    "axiom": "T4",
                    "ideal": I,
                    "along": W,
                })
    return AxiomVerdict.verified({"exact": True, "ideals": len(all_right_ideals(h))})


class TOmegaWitness:
    """Countable-type witness data: for each base ideal I a finite family
    of open ideals, one of which must be carried into I by every scalar."""

    __slots__ = ("provider",)

    def __init__(self, provider):
        self.provider = provider

    def family(self, I):
        fam = list(self.provider(I))
        return fam

    @classmethod
    def identity(cls):
        # F_I = {I}; enough whenever every base ideal is two-sided
        return cls(lambda I: [I])


def check_t_omega(B, witness=None, sample=None):
    """Check that every sampled scalar multiplies some family member
    into each base ideal.  Returns a single verdict."""
    h = B.handle
    if witness is None:
        if not h.is_commutative:
            raise TwoSidedRequired(
                "a witness family is required over a noncommutative ring")
        witness = TOmegaWitness.identity()
    scalars = _scalar_pool(B, sample)
    checked = 0
    for I in B.ideals:
        fam = witness.family(I)
        if not fam:
            return AxiomVerdict.failed({
                "ideal": I, "scalar": None, "family": []})
        for s in scalars:
            hit = None
            for J in fam:
                if I.contains_ideal(translate_product([s], J)):
                    hit = J
                    break
            if hit is None:
                return AxiomVerdict.failed({
                    "ideal": I,
                    "scalar": h.format(s),
                    "family": [J.describe() for J in fam],
                })
            checked += 1
    return AxiomVerdict.verified({
        "pairs": checked,
        "exact": B.kind == "full_enumeration",
    })


def saturate(seed, witness=None, budget=(3, 64)):
    """Close a seed list of ideals into a topology base.

    Each round adjoins, for the current members: witness family ideals
    (when a witness is supplied), generator translates J*K of every
    ordered pair, and pairwise meets.  Members are finitely generated
    already, so the subideal step is the identity.  A candidate that
    contains a member is redundant and skipped; once the size cap is
    reached, candidates inside an existing member are treated as depth
    beyond the bound and dropped.  Dropping anything else would lose
    sideways information, so that raises PartialClosure with the capped
    result attached.
    """
    rounds, max_ideals = budget
    if rounds < 1:
        raise ValueError("need at least one round")
    seed = list(seed)
    if not seed:
        raise EmptyGenerators("saturation needs a seed")
    handle = seed[0].handle
    for I in seed:
        if I.handle != handle:
            raise HandleMismatch("seed ideals over different rings")
    base = []
    keys = set()
    for I in seed:
        if I.key() not in keys:
            keys.add(I.key())
            base.append(I)
    if len(base) > max_ideals:
        raise ValueError("budget smaller than the seed itself")

    lost = None
    for rnd in range(rounds):
        candidates = []
        if witness is not None:
            for I in base:
                candidates.extend(witness.family(I))
        for J in base:
            gens = _ideal_generators(J)
            for K in base:
                candidates.append(translate_product(gens, K))
        for i in range(len(base)):
            for j in range(i + 1, len(base)):
                candidates.append(ideal_intersect(base[i], base[j]))
        added = False
        for H in candidates:
            if any(H.contains_ideal(W) for W in base):
                continue
            if len(base) < max_ideals:
                base.append(H)
                keys.add(H.key())
                added = True
            elif any(W.contains_ideal(H) for W in base):
                pass
            elif lost is None:
                lost = {"round": rnd, "candidate": H}
        if not added and lost is None:
            break

    out = _shape_base(handle, base)
    check_axioms(out)
    if lost is not None:
        raise PartialClosure(
            "size budget %d dropped a candidate not below the bound: %s"
            % (max_ideals, lost["candidate"].describe()),
            result=out,
            lost=lost,
        )
    return out


def _shape_base(handle, ideals):
    """Pick the strongest kind the material supports."""
    if handle.is_finite:
        return TopologyBase(handle, ideals, kind="full_enumeration")
    ordered = sorted(ideals, key=_containment_rank(ideals))
    if len(ordered) >= 2 and _is_descending(ordered):
        return TopologyBase(handle, ordered, kind="chain", depth=len(ordered))
    return TopologyBase(handle, ideals, kind="finite_set", truncated=True)


def _containment_rank(ideals):
    def rank(I):
        return -sum(1 for W in ideals if I.contains_ideal(W))
    return rank


def _is_descending(ideals):
    return all(a.contains_ideal(b) for a, b in zip(ideals, ideals[1:]))


def topology_le(A, B):
    """Filter refinement at the materialized depth: every base ideal of
    A is open for B."""
    if A.handle != B.handle:
        raise HandleMismatch("comparing topologies over different rings")
    return all(B.in_filter(I) for I in A.ideals)


def same_filter(A, B):
    return topology_le(A, B) and topology_le(B, A)


class TopologyFamily:
    """A list of topology bases with its refinement order made explicit.

    ``order[i][j]`` records whether member i is refined by member j at
    the materialized depth, and ``upper`` maps each index pair to some
    member above both.  ``directed`` is true when every pair has one.
    """

    __slots__ = ("members", "order", "upper", "directed")

    def __init__(self, members):
        members = list(members)
        if not members:
            raise EmptyGenerators("a family needs at least one member")
        handle = members[0].handle
        for M in members:
            if M.handle != handle:
                raise HandleMismatch("family members over different rings")
        n = len(members)
        self.members = members
        self.order = [[topology_le(members[i], members[j]) for j in range(n)]
                      for i in range(n)]
        self.upper = {}
        directed = True
        for i in range(n):
            for j in range(n):
                bound = None
                for k in range(n):
                    if self.order[i][k] and self.order[j][k]:
                        bound = k
                        break
                if bound is None:
                    directed = False
                else:
                    self.upper[(i, j)] = bound
        self.directed = directed


def union_topologies(F):
    """Merge a directed family into one base and re-run the axioms.

    Every member must already carry a verified translate-product flag;
    unchecked members are checked here first.  The merged base keeps
    the escape semantics of its weakest member: one truncated member
    makes the union truncated.
    """
    if not isinstance(F, TopologyFamily):
        F = TopologyFamily(F)
    if not F.directed:
        bad = next(
            (i, j)
            for i in range(len(F.members))
            for j in range(len(F.members))
            if (i, j) not in F.upper
        )
        raise NotDirected("no upper bound for members %d and %d" % bad)
    for M in F.members:
        if M.axiom_flags["T4p"].status == "unchecked":
            check_axioms(M)
        if not M.axiom_flags["T4p"].is_verified:
            raise BadCertificate(
                "family member %s lacks a verified translate-product flag"
                % M.describe())

    handle = F.members[0].handle
    merged = []
    keys = set()
    truncated = False
    for M in F.members:
        truncated = truncated or M.truncated
        for I in M.ideals:
            if I.key() not in keys:
                keys.add(I.key())
                merged.append(I)
    if len(F.members) == 1:
        out = F.members[0]
        check_axioms(out)
        return out
    if handle.is_finite:
        out = TopologyBase(handle, merged, kind="full_enumeration")
    else:
        out = TopologyBase(handle, merged, kind="finite_set", truncated=truncated)
    check_axioms(out)
    return out


def all_right_ideals(handle):
    """Every right ideal of a finite ring, found by summing cyclic ones."""
    if not handle.is_finite:
        raise FiniteOnly("right ideal enumeration needs a finite ring")
    elems = [handle.canon(x) for x in handle.elements()]
    seen = {}
    for x in elems:
        I = Ideal(handle, [x])
        seen.setdefault(I.key(), I)
    frontier = list(seen.values())
    while frontier:
        fresh = []
        for I in frontier:
            for x in elems:
                J = Ideal(handle, list(I.element_list()) + [x])
                if J.key() not in seen:
                    seen[J.key()] = J
                    fresh.append(J)
        frontier = fresh
    return sorted(seen.values(), key=lambda I: (len(I.data), I.key()))
