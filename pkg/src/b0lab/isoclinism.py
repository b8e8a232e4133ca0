"""Isoclinism tests and the per-family B0 constancy experiment.

Two groups are isoclinic when compatible isomorphisms of the central
quotients and of the derived subgroups carry the commutator pairing of one
onto the other.  The search backtracks over images of a pc generating
sequence of G1/Z(G1); each full candidate forces the derived-subgroup map on
commutator values, and the forced map is checked for well-definedness,
homomorphism property, and bijectivity through a graph-subgroup computation.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import pcgroup as pc
from .pcgroup import Element, PcPresentation


@dataclass
class CommutatorPairing:
    group: PcPresentation
    quotient: PcPresentation  # G/Z(G)
    projection: pc.Homomorphism
    table: dict  # (idx(a~), idx(b~)) -> Element of [G, G]
    section: list  # per quotient index, a representative Element of G

    def value(self, qa: Element, qb: Element) -> Element:
        return self.table[(self.quotient.index_of(qa), self.quotient.index_of(qb))]


def commutator_pairing(G: PcPresentation) -> CommutatorPairing:
    """The map (aZ, bZ) -> [a, b], tabulated over (G/Z)^2.

    Representative independence is checked by sweeping all of Z(G) against a
    generating set of coset representatives.
    """
    if "pairing" in G._cache:
        return G._cache["pairing"]
    Z = pc.center(G)
    Q, proj = pc.quotient(G, Z)
    section = [None] * Q.order
    for x in G.all_elements():
        i = Q.index_of(proj.apply(x))
        if section[i] is None:
            section[i] = x
    table = {}
    for i, a in enumerate(section):
        for j, b in enumerate(section):
            table[(i, j)] = pc.commutator(a, b)
    # representative independence: vary one side over all of Z on generators
    for g in G.generators():
        qi = Q.index_of(proj.apply(g))
        for z in Z.elements():
            for h in G.generators():
                qj = Q.index_of(proj.apply(h))
                if pc.commutator(g * z, h) != table[(qi, qj)]:
                    raise pc.CollectionError("commutator pairing depends on representatives")
    pairing = CommutatorPairing(G, Q, proj, table, section)
    G._cache["pairing"] = pairing
    return pairing


def family_fingerprint(G: PcPresentation):
    """Structural profile: |Z|, |G'|, lower central orders, exponent,
    abelianization, conjugacy class size multiset.

    Not every component is an isoclinism invariant (exponent and
    abelianization already differ between isoclinic abelian groups); the
    pre-filter inside is_isoclinic uses isoclinism_invariants instead.
    """
    key = "fingerprint"
    if key in G._cache:
        return G._cache[key]
    fp = (
        pc.center(G).order,
        pc.derived_subgroup(G).order,
        tuple(s.order for s in pc.lower_central_series(G)),
        pc.group_exponent(G),
        tuple(pc.abelianization_invariants(G)),
        tuple(pc.conjugacy_class_sizes(G)),
    )
    G._cache[key] = fp
    return fp


def isoclinism_invariants(G: PcPresentation):
    """Data genuinely preserved by isoclinism: |G/Z|, the lower central
    orders from gamma_2 down, and the class-size multiset at the G/Z level
    (one entry per central coset)."""
    key = "iso_invariants"
    if key in G._cache:
        return G._cache[key]
    P = commutator_pairing(G)
    Q = P.quotient
    sizes = []
    for ia in range(Q.order):
        cent = sum(1 for ib in range(Q.order) if P.table[(ia, ib)].is_identity())
        sizes.append(Q.order // cent)
    out = (
        Q.order,
        tuple(s.order for s in pc.lower_central_series(G)[1:]),
        tuple(sorted(sizes)),
    )
    G._cache[key] = out
    return out


@dataclass
class IsoclinismWitness:
    theta_images: list  # Element of Q2 per pc generator of Q1
    phi_pairs: list  # (Element of G1', Element of G2') generating the graph


def _iso_images_candidates(Q2: PcPresentation):
    """Quotient elements bucketed by order."""
    buckets = {}
    for x in Q2.all_elements():
        buckets.setdefault(pc.order_of(x), []).append(x)
    return buckets


def _theta_search(Q1: PcPresentation, Q2: PcPresentation, pair_filter=None):
    """Yield generator-image tuples defining isomorphisms Q1 -> Q2.

    pair_filter = (P2, gen_pair_value) prunes assignments whose pairing
    values disagree with Q1's in triviality or element order."""
    n = Q1.n
    gens = [Q1.generator(i) for i in range(n)]
    orders = [pc.order_of(g) for g in gens]
    buckets = _iso_images_candidates(Q2)

    def relations_hold(images, upto):
        # relations among the first `upto` generators only
        for i in range(upto):
            w = Q1.power_tail(i)
            if all(a < upto for a, _ in w):
                lhs = pc.power(images[i], Q1.p)
                rhs = Q2.identity()
                for a, e in w:
                    rhs = rhs * pc.power(images[a], e)
                if lhs != rhs:
                    return False
        for j in range(upto):
            for i in range(j):
                w = Q1.comm_tail(j, i)
                if all(a < upto for a, _ in w):
                    lhs = pc.commutator(images[j], images[i])
                    rhs = Q2.identity()
                    for a, e in w:
                        rhs = rhs * pc.power(images[a], e)
                    if lhs != rhs:
                        return False
        return True

    images = [None] * n

    def pairing_ok(k):
        if pair_filter is None:
            return True
        P2, gen_pair_value = pair_filter
        for i in range(k):
            triv, order = gen_pair_value[(k, i)]
            v2 = P2.value(images[k], images[i])
            if v2.is_identity() != triv:
                return False
            if pc.order_of(v2) != order:
                return False
        return True

    def rec(k):
        if k == n:
            if pc.subgroup_closure(Q2, images).order == Q2.order:
                yield list(images)
            return
        for cand in buckets.get(orders[k], []):
            images[k] = cand
            if pairing_ok(k) and relations_hold(images, k + 1):
                yield from rec(k + 1)
        images[k] = None

    yield from rec(0)


def _phi_graph_check(P1, P2, hom, D1, D2, prod):
    """Validate the forced derived-subgroup map for a full theta candidate.

    Cheap screen first: tabulate v1 -> v2 over all quotient pairs and reject
    direct conflicts or order mismatches, then confirm with the graph
    subgroup (functional, injective, onto)."""
    Q1 = P1.quotient
    n1 = D1.parent.n
    img_idx = {}
    for qa in Q1.all_elements():
        img_idx[Q1.index_of(qa)] = P2.quotient.index_of(hom.apply(qa))
    forced = {}
    for (ia, ib), v1 in P1.table.items():
        v2 = P2.table[(img_idx[ia], img_idx[ib])]
        if v1.is_identity() != v2.is_identity():
            return None
        prev = forced.get(v1.exps)
        if prev is None:
            forced[v1.exps] = v2.exps
        elif prev != v2.exps:
            return None
    graph_gens = [prod.element(v1 + v2) for v1, v2 in forced.items()]
    graph = pc.subgroup_closure(prod, graph_gens)
    if graph.order != D1.order:
        return None
    for s in graph.seq:
        if not any(s.exps[:n1]) and any(s.exps[n1:]):
            return None
    img = pc.subgroup_closure(D2.parent, [D2.parent.element(s.exps[n1:]) for s in graph.seq])
    if img.order != D2.order:
        return None
    return [
        (D1.parent.element(s.exps[:n1]), D2.parent.element(s.exps[n1:]))
        for s in graph.seq
    ]


def is_isoclinic(G1: PcPresentation, G2: PcPresentation, budget=200_000):
    """Decide isoclinism; returns (bool, witness-or-None).

    Backtracks over isomorphisms theta of the central quotients, pruned by
    element orders, partial relation checks, and the requirement that the
    pairing values of assigned generator pairs match in triviality and
    order; each surviving candidate forces the derived map phi, which is
    checked as a bijective homomorphism via a graph-subgroup computation.
    """
    if G1.p != G2.p:
        return False, None
    if isoclinism_invariants(G1) != isoclinism_invariants(G2):
        return False, None
    P1 = commutator_pairing(G1)
    P2 = commutator_pairing(G2)
    Q1, Q2 = P1.quotient, P2.quotient
    if Q1.order != Q2.order:
        return False, None
    D1 = pc.derived_subgroup(G1)
    D2 = pc.derived_subgroup(G2)
    prod, _ = pc.direct_product(D1.parent, D2.parent)

    def finish(theta):
        hom = pc.Homomorphism(Q1, Q2, theta)
        pairs = _phi_graph_check(P1, P2, hom, D1, D2, prod)
        if pairs is None:
            return None
        return IsoclinismWitness(theta_images=list(theta), phi_pairs=pairs)

    # fast path: identical quotient presentations often admit the identity
    from .catalog import canonical_text

    if canonical_text(Q1) == canonical_text(Q2):
        theta = Q2.generators()
        hom = pc.Homomorphism(Q1, Q2, theta)
        if not hom.failures(limit=1) and hom.image_subgroup().order == Q2.order:
            witness = finish(theta)
            if witness is not None:
                return True, witness

    gen_pair_value = {}
    for j in range(Q1.n):
        for i in range(j):
            v = P1.value(Q1.generator(j), Q1.generator(i))
            gen_pair_value[(j, i)] = (v.is_identity(), pc.order_of(v))

    steps = 0
    for theta in _theta_search(Q1, Q2, pair_filter=(P2, gen_pair_value)):
        steps += 1
        if steps > budget:
            raise pc.CollectionError("isoclinism search budget exceeded")
        witness = finish(theta)
        if witness is not None:
            return True, witness
    return False, None


def b0_constancy_report(corpus_reports):
    """Group (family, invariants) rows and check per-family constancy.

    corpus_reports: iterable of (family_label, B0Report).  Empirical check of
    the isoclinism question: B0 should be constant inside each family.
    """
    families = {}
    for fam, rep in corpus_reports:
        families.setdefault(fam, []).append(rep)
    rows = []
    ok = True
    for fam in sorted(families, key=str):
        invs = {tuple(r.invariants) for r in families[fam]}
        constant = len(invs) == 1
        ok = ok and constant
        rows.append(
            {
                "family": fam,
                "groups": len(families[fam]),
                "invariants": sorted(invs),
                "constant": constant,
            }
        )
    return {"ok": ok, "rows": rows}
