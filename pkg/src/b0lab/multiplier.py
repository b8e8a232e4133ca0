"""Nonabelian exterior square, Schur multiplier, and the tensor-side B0.

The doubled-generator presentation tau(G) is built on x- and y-copies of the
pc generators with crossed commutator relations and a killed diagonal; its
p-quotient contains G wedge G as the subgroup generated by the [x_i, y_j].
The commutator homomorphism kappa maps wedges onto [G, G]; its kernel is the
Schur multiplier M(G), the wedges of commuting pairs generate M0(G), and
B0(G) = M(G)/M0(G).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import pcgroup as pc
from .pcgroup import Element, Homomorphism, PcPresentation, Subgroup
from .pquotient import (
    FpPresentation,
    PcQuotient,
    p_quotient,
    word_comm,
    word_conj,
    word_inverse,
)


class ClassCapExceeded(RuntimeError):
    """The tau p-quotient did not stabilize under the class cap."""


class GuardFailure(RuntimeError):
    """An internal cross-check failed; results would not be authoritative."""


class PairCapExceeded(RuntimeError):
    """Commuting-pair enumeration exceeded the configured cap."""


def tau_presentation(G: PcPresentation) -> FpPresentation:
    """Doubled-generator presentation whose p-quotient is tau(G).

    Generators x_1..x_n, y_1..y_n; relators: both copies of the pc relations,
    the crossed relations [x_i, y_j]^{x_k} = [x_i^{x_k}, y_j^{y_k}] and
    [x_i, y_j]^{y_k} = [x_i^{x_k}, y_j^{y_k}] for all i, j, k, and the
    diagonal killers [x_i, y_i] and [x_i, y_j][x_j, y_i].
    """
    n, p = G.n, G.p
    names = [f"x{i+1}" for i in range(n)] + [f"y{i+1}" for i in range(n)]
    F = FpPresentation(names)

    def copy_relations(off):
        for i in range(n):
            w = tuple((a + off, e) for a, e in G.power_tail(i))
            F.add_relator(((i + off, p),) + word_inverse(w))
        for j in range(n):
            for i in range(j):
                w = tuple((a + off, e) for a, e in G.comm_tail(j, i))
                F.add_relator(word_comm(((j + off, 1),), ((i + off, 1),)) + word_inverse(w))

    copy_relations(0)
    copy_relations(n)

    for i in range(n):
        for j in range(n):
            wedge = word_comm(((i, 1),), ((j + n, 1),))
            for k in range(n):
                rhs = word_comm(word_conj(((i, 1),), ((k, 1),)), word_conj(((j + n, 1),), ((k + n, 1),)))
                F.add_relator(word_inverse(word_conj(wedge, ((k, 1),))) + rhs)
                F.add_relator(word_inverse(word_conj(wedge, ((k + n, 1),))) + rhs)

    for i in range(n):
        F.add_relator(word_comm(((i, 1),), ((i + n, 1),)))
    for i in range(n):
        for j in range(i + 1, n):
            F.add_relator(
                word_comm(((i, 1),), ((j + n, 1),)) + word_comm(((j, 1),), ((i + n, 1),))
            )
    return F


@dataclass
class ExteriorSquareData:
    group: PcPresentation
    quotient: PcQuotient
    tau_to_g: Homomorphism
    wedge_subgroup: Subgroup  # W = G ^ G inside tau
    multiplier_subgroup: Subgroup  # M(G) = ker(kappa) inside W
    derived_order: int
    _lift_cache: dict = field(default_factory=dict)

    @property
    def tau(self) -> PcPresentation:
        return self.quotient.pc

    @property
    def x_images(self):
        return self.quotient.images[: self.group.n]

    @property
    def y_images(self):
        return self.quotient.images[self.group.n :]

    def lift_x(self, g: Element) -> Element:
        return self._lift(g, 0)

    def lift_y(self, g: Element) -> Element:
        return self._lift(g, 1)

    def _lift(self, g: Element, side) -> Element:
        key = (side, g.exps)
        hit = self._lift_cache.get(key)
        if hit is None:
            images = self.x_images if side == 0 else self.y_images
            hit = self.tau.identity()
            for i, e in enumerate(g.exps):
                if e:
                    hit = hit * pc.power(images[i], e)
            self._lift_cache[key] = hit
        return hit

    def kappa(self, w: Element) -> Element:
        return self.tau_to_g.apply(w)


def _tau_to_g_hom(G: PcPresentation, Q: PcQuotient) -> Homomorphism:
    """The map tau -> G sending both copies x_i, y_i to g_i.

    Images of the tau pc generators are rebuilt from their recorded
    definitions (class-1 image, power tail, or commutator tail).
    """
    n = G.n
    images = []
    for k, df in enumerate(Q.definitions):
        if df[0] == "img":
            fp = df[1]
            images.append(G.generator(fp if fp < n else fp - n))
        elif df[0] == "pow":
            _, i, w_old = df
            val = _eval_word_under(images, w_old, G).inverse() * pc.power(images[i], G.p)
            images.append(val)
        else:
            _, j, i, w_old = df
            val = _eval_word_under(images, w_old, G).inverse() * pc.commutator(images[j], images[i])
            images.append(val)
    return Homomorphism(Q.pc, G, images)


def _eval_word_under(images, word, G: PcPresentation) -> Element:
    out = G.identity()
    for i, e in word:
        out = out * pc.power(images[i], e)
    return out


def exterior_square(G: PcPresentation, class_cap=None) -> ExteriorSquareData:
    """tau(G), the wedge subgroup, kappa, and M(G); order guards enforced."""
    if class_cap is None:
        if "extsq" in G._cache:
            return G._cache["extsq"]
        class_cap = 2 * pc.exponent_p_class(G) + 2
    F = tau_presentation(G)
    Q = p_quotient(F, G.p, class_cap)
    if not Q.stable:
        raise ClassCapExceeded(
            f"tau quotient still growing at class {Q.cls} (order {Q.order}); raise the cap"
        )
    psi = _tau_to_g_hom(G, Q)
    bad = psi.failures(limit=1)
    if bad:
        raise GuardFailure(f"tau -> G map is not a homomorphism: {bad}")
    n = G.n
    tau = Q.pc
    wedges = [
        pc.commutator(Q.images[i], Q.images[j + n])
        for i in range(n)
        for j in range(n)
        if i != j
    ]
    W = pc.normal_closure(tau, wedges)
    derived = pc.derived_subgroup(G)
    image = pc.subgroup_closure(G, [psi.apply(w) for w in W.seq])
    if image.order != derived.order:
        raise GuardFailure(
            f"kappa image has order {image.order}, derived subgroup has order {derived.order}"
        )
    if tau.order != G.order**2 * W.order:
        raise GuardFailure(
            f"|tau| = {tau.order} does not equal |G|^2 * |G^G| = {G.order**2 * W.order}"
        )
    M = psi.kernel_on(W)
    if M.order * derived.order != W.order:
        raise GuardFailure("|G^G| != |M(G)| * |G'|")
    if not M.is_abelian():
        raise GuardFailure("Schur multiplier came out nonabelian")
    out = ExteriorSquareData(
        group=G,
        quotient=Q,
        tau_to_g=psi,
        wedge_subgroup=W,
        multiplier_subgroup=M,
        derived_order=derived.order,
    )
    G._cache.setdefault("extsq", out)
    return out


def schur_multiplier(G: PcPresentation, class_cap=None):
    """Abelian invariants of M(G) = ker(kappa), via the exterior square."""
    return pc.abelian_invariants(exterior_square(G, class_cap).multiplier_subgroup)


def commuting_wedge(data: ExteriorSquareData, x: Element, y: Element) -> Element:
    """The wedge x ^ y in tau(G); only defined for commuting pairs."""
    if not pc.commutator(x, y).is_identity():
        raise ValueError("commuting_wedge requires a commuting pair")
    w = pc.commutator(data.lift_x(x), data.lift_y(y))
    if not data.kappa(w).is_identity():
        raise GuardFailure("commuting wedge does not map into ker(kappa)")
    return w


@dataclass
class B0Report:
    name: str
    p: int
    order_exponent: int
    method: str
    invariants: list
    m_order: int
    m0_order: int
    certificates: dict = field(default_factory=dict)
    elapsed: float = 0.0
    status: str = "ok"

    @property
    def nonzero(self):
        return bool(self.invariants)

    def b0_order(self):
        n = 1
        for d in self.invariants:
            n *= d
        return n


def m0_subgroup(data: ExteriorSquareData, pairs="full", pair_cap=None, check_kernel=True) -> Subgroup:
    """Subgroup of M(G) generated by wedges of commuting pairs.

    pairs="full" enumerates every unordered commuting pair (the default);
    pairs="bicyclic" takes one generating pair per bicyclic subgroup, which
    is equivalent by bilinearity of the wedge on abelian subgroups.  Stops
    early once M0 = M since M0 can only grow inside M.
    """
    G = data.group
    tau = data.tau
    M = data.multiplier_subgroup
    M0 = pc.trivial_subgroup(tau)

    def absorb(w):
        nonlocal M0
        if M0.contains(w):
            return False
        if check_kernel and not data.kappa(w).is_identity():
            raise GuardFailure("wedge of a commuting pair escapes ker(kappa)")
        if not M.contains(w):
            raise GuardFailure("wedge of a commuting pair escapes M(G)")
        M0 = pc.subgroup_closure(tau, list(M0.seq) + [w])
        return True

    if pairs == "bicyclic":
        for S in pc.enumerate_bicyclic_subgroups(G):
            if len(S.seq) == 0:
                continue
            x = S.seq[0]
            y = S.seq[1] if len(S.seq) > 1 else S.seq[0]
            absorb(pc.commutator(data.lift_x(x), data.lift_y(y)))
            if M0.order == M.order:
                break
        return M0

    if pairs != "full":
        raise ValueError("pairs must be 'full' or 'bicyclic'")
    elems = G.all_elements()
    size = G.order
    if pair_cap is not None and size * size > pair_cap:
        raise PairCapExceeded(f"{size * size} pairs exceed the configured cap {pair_cap}")
    cp = G.conj_power_tables()
    idx = np.arange(size, dtype=np.int64)
    lift_x = [None] * size
    inv_x = [None] * size
    lift_y = [None] * size
    done = False
    for yi in range(1, size):
        if done:
            break
        y = elems[yi]
        perm = None
        for i, e in enumerate(y.exps):
            if e:
                t = cp[i][e]
                perm = t if perm is None else t[perm]
        Ly = lift_y[yi] = data.lift_y(y) if lift_y[yi] is None else lift_y[yi]
        Ly_inv = Ly.inverse()
        for xi in np.nonzero(perm == idx)[0]:
            xi = int(xi)
            if xi == 0 or xi > yi:
                continue
            if lift_x[xi] is None:
                lift_x[xi] = data.lift_x(elems[xi])
                inv_x[xi] = lift_x[xi].inverse()
            w = ((inv_x[xi] * Ly_inv) * lift_x[xi]) * Ly
            if absorb(w) and M0.order == M.order:
                done = True
                break
    return M0


def b0_tensor(G: PcPresentation, pairs="full", class_cap=None, pair_cap=None, name=None) -> B0Report:
    """B0(G) = M(G)/M0(G) computed through the exterior square."""
    t0 = time.time()
    data = exterior_square(G, class_cap)
    M = data.multiplier_subgroup
    M0 = m0_subgroup(data, pairs=pairs, pair_cap=pair_cap)
    inv = pc.abelian_quotient_invariants(M, M0)
    return B0Report(
        name=name or G.name or "<unnamed>",
        p=G.p,
        order_exponent=G.n,
        method="tensor",
        invariants=inv,
        m_order=M.order,
        m0_order=M0.order,
        certificates={
            "tau_order": data.tau.order,
            "wedge_order": data.wedge_subgroup.order,
            "derived_order": data.derived_order,
            "pairs": pairs,
        },
        elapsed=time.time() - t0,
    )


@dataclass
class VerificationRow:
    name: str
    family: int | None
    gap_id: int | None
    report: B0Report

    @property
    def nonzero(self):
        return self.report.nonzero


@dataclass
class VerificationResult:
    p: int
    rows: list
    ok: bool
    offenders: list

    def summary(self):
        nz = [r.name for r in self.rows if r.nonzero]
        return {
            "p": self.p,
            "groups": len(self.rows),
            "nonzero": nz,
            "ok": self.ok,
            "offenders": self.offenders,
        }


def verify_theorem(p: int, corpus=None, pairs="full", progress=None) -> VerificationResult:
    """B0 != 0 exactly on the Phi_10 members of the corpus.

    corpus entries are CatalogGroup-like (with .group and .fid.family) or
    bare presentations; bare entries get their family decided by isoclinism
    against a catalog Phi_10 representative.
    """
    from .catalog import build_phi10, catalog_groups, phi10_variants
    from .isoclinism import is_isoclinic

    if corpus is None:
        corpus = catalog_groups(p)
    phi10_rep = build_phi10(p, phi10_variants(p)[0])
    rows = []
    offenders = []
    for entry in corpus:
        G = getattr(entry, "group", entry)
        family = entry.fid.family if hasattr(entry, "fid") else None
        gap_id = getattr(entry, "gap_id", None)
        if family is None:
            family = 10 if is_isoclinic(G, phi10_rep)[0] else 0
        try:
            rep = b0_tensor(G, pairs=pairs)
        except ClassCapExceeded as exc:
            rep = B0Report(G.name or "<unnamed>", p, G.n, "tensor", [], 0, 0, status=f"capped: {exc}")
            offenders.append((rep.name, "class cap"))
            rows.append(VerificationRow(rep.name, family, gap_id, rep))
            continue
        rows.append(VerificationRow(rep.name, family, gap_id, rep))
        if rep.nonzero != (family == 10):
            offenders.append((rep.name, f"B0 {'nonzero' if rep.nonzero else 'zero'} but family {family}"))
        if progress:
            progress(rows[-1])
    return VerificationResult(p=p, rows=rows, ok=not offenders, offenders=offenders)
