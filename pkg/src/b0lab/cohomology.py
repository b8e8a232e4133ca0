"""Brute-force cohomology oracle and the transgression / 7-term criteria.

H^2(G, Q/Z) is modeled as normalized bar 2-cochains with values in Z/n,
n = |G|: cocycles modulo coboundaries modulo the Bockstein image of
Hom(G, Z/n).  Cochains are parametrized by their values on (generator,
element) pairs; all other values follow from the cocycle recursion
f(sg', k) = f(g', k) + f(s, g'k) - f(s, g'), so the cocycle condition
reduces to the generator triples d^2 f(s, h, k) = 0.

On top of the oracle: the transgression non-surjectivity certificate for
B0 != 0 (fixed characters of a normal subgroup against H^2 of the quotient
and cyclicity of bicyclic images), and the 7-term-sequence certificate for
B0 = 0 through injectivity of the lambda map into H^3 of a cyclic quotient,
detected by cupping with the fundamental class.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from . import pcgroup as pc
from .linalg import (
    HowellAccumulator,
    intersect_spans,
    nullspace_mod_pk,
    quotient_structure,
    span_howell,
)
from .pcgroup import Element, PcPresentation, Subgroup


class OracleCapExceeded(RuntimeError):
    """Refusal to run the brute-force oracle above its size cap."""


def default_oracle_cap(p: int) -> int:
    return p**4 if p == 3 else p**3


# -- Q/Z values ---------------------------------------------------------------


@dataclass(frozen=True)
class QZValue:
    """a / p^e in Q/Z, restricted to p-power torsion; canonical form."""

    num: int
    exp: int
    p: int

    @staticmethod
    def make(num, exp, p):
        num %= p**exp if exp else 1
        while exp > 0 and num % p == 0:
            num //= p
            exp -= 1
        if num == 0:
            exp = 0
        return QZValue(num, exp, p)

    @staticmethod
    def from_mod(a, p, k):
        """The class of a / p^k."""
        return QZValue.make(int(a) % p**k, k, p)

    def to_mod(self, k):
        """Integer a with self = a / p^k; requires exp <= k."""
        if self.exp > k:
            raise ValueError("value has larger denominator than the target modulus")
        return self.num * self.p ** (k - self.exp) % self.p**k

    def is_zero(self):
        return self.num == 0

    def __add__(self, other):
        k = max(self.exp, other.exp)
        return QZValue.from_mod(self.to_mod(k) + other.to_mod(k), self.p, k)

    def __neg__(self):
        return QZValue.make(-self.num, self.exp, self.p)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return QZValue.make(self.num * int(c), self.exp, self.p)

    def __str__(self):
        return f"{self.num}/{self.p**self.exp}" if self.num else "0"


# -- characters ---------------------------------------------------------------


@dataclass
class Character:
    """Homomorphism from a subgroup to Q/Z, stored by values on the canonical
    generating sequence (as integers mod p^k, meaning value/p^k)."""

    domain: Subgroup
    values: tuple  # per sequence element, in Z/p^k
    k: int

    def value_on(self, x: Element) -> QZValue:
        co = self.domain.coords(x)
        if co is None:
            raise ValueError("element outside the character's domain")
        p = self.domain.parent.p
        tot = sum(c * v for c, v in zip(co, self.values))
        return QZValue.from_mod(tot, p, self.k)

    def __call__(self, x):
        return self.value_on(x)

    def coord_vector(self):
        return np.array(self.values, dtype=np.int64)


def character_space(S: Subgroup, k=None):
    """Generators of Hom(S, Z/p^k) as coordinate columns on S.seq.

    Constraints: p * chi(s_i) = chi(coords of s_i^p) and chi kills every
    commutator [s_j, s_i].  Returns (matrix columns, k).
    """
    P = S.parent
    p = P.p
    if k is None:
        k = pc._seq_modulus_exponent(S)
    m = len(S.seq)
    if m == 0:
        return np.zeros((0, 0), dtype=np.int64), k
    rows = []
    for i, s in enumerate(S.seq):
        co = S.coords(pc.power(s, p))
        row = [0] * m
        row[i] = p
        for j, c in enumerate(co):
            row[j] -= c
        rows.append(row)
    for j in range(m):
        for i in range(j):
            co = S.coords(pc.commutator(S.seq[j], S.seq[i]))
            if co is None:
                raise ValueError("subgroup is not closed under commutators")
            if any(co):
                rows.append(co)
    A = np.array(rows, dtype=np.int64) % p**k
    return nullspace_mod_pk(A, p, k), k


def hom_group_order(S: Subgroup) -> int:
    cols, k = character_space(S)
    if cols.shape[1] == 0:
        return 1
    return span_howell(cols.T, cols.shape[0], S.parent.p, k).order()


def conj_action_matrix(N: Subgroup, g: Element):
    """Matrix A with (g.chi)(s_i) = sum_j A[i, j] chi(s_j), for the action
    (g.chi)(x) = chi(g^-1 x g)."""
    rows = []
    for s in N.seq:
        co = N.coords(s.conj(g))
        if co is None:
            raise ValueError("subgroup is not normalized by g")
        rows.append(co)
    return np.array(rows, dtype=np.int64)


def h1_invariants(N: Subgroup, G: PcPresentation):
    """Generating characters of Hom(N, Q/Z)^G (the G-fixed points).

    Returns (characters, k) with values understood mod p^k.
    """
    if N.parent is not G:
        raise ValueError("subgroup must live in G")
    if not N.is_normal():
        raise ValueError("h1_invariants requires a normal subgroup")
    p = G.p
    cols, k = character_space(N)
    m = len(N.seq)
    if m == 0 or cols.shape[1] == 0:
        return [], k
    pk = p**k
    blocks = []
    for g in G.generators():
        A = conj_action_matrix(N, g)
        blocks.append((A @ cols - cols) % pk)
    stacked = np.vstack(blocks)
    C = nullspace_mod_pk(stacked, p, k)
    gens = (cols @ C) % pk
    if gens.shape[1] == 0:
        return [], k
    acc = span_howell(gens.T, m, p, k)
    chars = [Character(N, tuple(int(x) for x in row), k) for row in acc.basis()]
    return chars, k


# -- H^2 via normalized bar cochains ------------------------------------------


@dataclass
class H2Structure:
    group: PcPresentation
    modulus: int  # n = p^k
    k: int
    invariants: list
    basis: list  # representative parameter rows for the quotient generators
    cocycle_span: HowellAccumulator
    boundary_span: HowellAccumulator
    param_count: int
    _tables: object = None  # F tensor, when kept
    _mult: object = None

    @property
    def order(self):
        n = 1
        for d in self.invariants:
            n *= d
        return n

    def cochain_table(self, param_row):
        """Full normalized table f(g, h) (size x size) for a parameter row."""
        if self._tables is None:
            raise ValueError("cochain tables were not kept for this H2Structure")
        F = self._tables
        v = np.asarray(param_row, dtype=np.int64)
        return (F.reshape(-1, self.param_count) @ v).reshape(F.shape[0], F.shape[1]) % self.modulus


def _element_order_key(G: PcPresentation):
    """Element indices sorted by word length, plus (leading gen, parent idx)."""
    size = G.order
    p, n = G.p, G.n
    lengths = np.zeros(size, dtype=np.int64)
    parent = np.zeros(size, dtype=np.int64)
    lead = np.zeros(size, dtype=np.int64)
    for idx, exps in enumerate(itertools.product(range(p), repeat=n)):
        if idx == 0:
            continue
        lengths[idx] = sum(exps)
        for i, e in enumerate(exps):
            if e:
                lead[idx] = i
                vec = list(exps)
                vec[i] -= 1
                pidx = 0
                for x in vec:
                    pidx = pidx * p + x
                parent[idx] = pidx
                break
    return lengths, parent, lead


def h2_qz(G: PcPresentation, size_cap=None, keep_tables=True, progress=None) -> H2Structure:
    """H^2(G, Q/Z) ~= H^2(G, Z/n)/Bockstein, n = |G|, as an H2Structure."""
    p = G.p
    if size_cap is None:
        size_cap = default_oracle_cap(p)
    size = G.order
    if size > size_cap:
        raise OracleCapExceeded(f"|G| = {size} exceeds the oracle size cap {size_cap}")
    cached = G._cache.get("h2")
    if cached is not None and (cached._tables is not None or not keep_tables):
        return cached
    text_key = None
    if not keep_tables:
        from .catalog import canonical_text

        text_key = canonical_text(G)
        hit = _H2_BY_TEXT.get(text_key)
        if hit is not None:
            return hit
    k = G.n
    n_mod = size  # p^k
    ns = G.n
    P = ns * (size - 1)

    T = _mult_table_array(G)
    lengths, parent, lead = _element_order_key(G)
    gen_idx = [G.index_of(G.generator(i)) for i in range(ns)]

    def pid(s, h):
        return s * (size - 1) + (h - 1)

    # F[g, h, :] . params = f(g, h)
    F = np.zeros((size, size, P), dtype=np.int16)
    for s in range(ns):
        g = gen_idx[s]
        for h in range(1, size):
            F[g, h, pid(s, h)] += 1
    order_by_len = sorted(range(1, size), key=lambda i: (int(lengths[i]), i))
    for g in order_by_len:
        if int(lengths[g]) <= 1:
            continue
        s = int(lead[g])
        gp = int(parent[g])
        F[g] = F[gp]
        prod = T[gp]  # g' * k for all k
        ks = np.nonzero(prod)[0]
        F[g, ks, pid(s, 0) + prod[ks]] += 1
        F[g, :, pid(s, gp)] -= 1

    acc = HowellAccumulator(P, p, k)
    flush_at = max(2048, 8 * (size - 1))
    buf = []
    buf_rows = 0
    for s in range(ns):
        sg = gen_idx[s]
        for h in range(1, size):
            sh = int(T[sg, h])
            block = F[h, 1:].astype(np.int64) - F[sh, 1:].astype(np.int64)
            hk = T[h, 1:]
            nzk = np.nonzero(hk)[0]
            block[nzk, pid(s, 0) + hk[nzk]] += 1
            block[:, pid(s, h)] -= 1
            buf.append(block)
            buf_rows += block.shape[0]
            if buf_rows >= flush_at:
                acc.insert_chunk(np.vstack(buf))
                buf, buf_rows = [], 0
        if progress:
            progress(f"equations for generator {s + 1}/{ns} done")
    if buf:
        acc.insert_chunk(np.vstack(buf))

    E = acc.basis()
    K = nullspace_mod_pk(E, p, k) if E.shape[0] else np.eye(P, dtype=np.int64)
    Z = span_howell(K.T, P, p, k)

    # coboundaries of the unit 1-cochains: dc(s, x) = c(s) + c(x) - c(sx)
    D = HowellAccumulator(P, p, k)
    inv_idx = np.empty(size, dtype=np.int64)
    for idx in range(size):
        inv_idx[idx] = G.index_of(G.element_of_index(idx).inverse())
    rows = []
    for h in range(1, size):
        row = np.zeros(P, dtype=np.int64)
        for s in range(ns):
            sg = gen_idx[s]
            if sg == h:
                row[pid(s, 1) : pid(s, 1) + size - 1] += 1  # c(s) term, all x
            row[pid(s, h)] += 1  # c(x) term at x = h
            x = int(T[int(inv_idx[sg]), h])  # sx = h at x = s^-1 h
            if x:
                row[pid(s, x)] -= 1
        rows.append(row)
    # Bockstein of Hom(G, Z/n) generators
    W = pc.whole_group(G)
    cols, kk = character_space(W, k=k)
    for t in range(cols.shape[1]):
        chi_seq = cols[:, t]
        table = np.zeros(size, dtype=np.int64)
        for idx, exps in enumerate(itertools.product(range(p), repeat=G.n)):
            co = W.coords(G.element(exps))
            table[idx] = sum(int(c) * int(v) for c, v in zip(co, chi_seq)) % n_mod
        row = np.zeros(P, dtype=np.int64)
        for s in range(ns):
            sg = gen_idx[s]
            for h in range(1, size):
                sh = int(T[sg, h])
                row[pid(s, h)] = (int(table[sg]) + int(table[h]) - int(table[sh])) // n_mod % n_mod
        rows.append(row)
    for row in rows:
        if not Z.contains(row):
            raise RuntimeError("coboundary/Bockstein row is not a cocycle (internal error)")
        D.insert(row)

    invariants, reps = quotient_structure(Z, [r for r in rows], p, k)
    out = H2Structure(
        group=G,
        modulus=n_mod,
        k=k,
        invariants=invariants,
        basis=reps,
        cocycle_span=Z,
        boundary_span=D,
        param_count=P,
        _tables=F if keep_tables else None,
        _mult=T if keep_tables else None,
    )
    G._cache["h2"] = out
    if text_key is not None:
        _H2_BY_TEXT[text_key] = out
    return out


_H2_BY_TEXT: dict = {}


def _mult_table_array(G: PcPresentation):
    if "mult_idx" in G._cache:
        return G._cache["mult_idx"]
    size = G.order
    p, n = G.p, G.n
    elems = list(itertools.product(range(p), repeat=n))
    T = np.empty((size, size), dtype=np.int32)
    for a_i, a in enumerate(elems):
        for b_i, b in enumerate(elems):
            vec = list(a)
            G._collect(vec, [(i, e) for i, e in enumerate(b) if e])
            idx = 0
            for e in vec:
                idx = idx * p + e
            T[a_i, b_i] = idx
    G._cache["mult_idx"] = T
    return T


# -- restriction to subgroups and the oracle B0 --------------------------------


def _subgroup_cochain_space(G, H2: H2Structure, A: Subgroup):
    """Indices of A's elements, plus the span of B^2(A) + Bockstein_A inside
    the normalized A-cochain coordinate space."""
    n_mod, k = H2.modulus, H2.k
    T = H2._mult
    a_idx = sorted(G.index_of(x) for x in A.elements())
    assert a_idx[0] == 0
    na = len(a_idx)
    dim = (na - 1) * (na - 1)
    aarr = np.array(a_idx, dtype=np.int64)
    local = np.full(G.order, -1, dtype=np.int64)
    local[aarr] = np.arange(na)
    Lab = local[np.asarray(T)[np.ix_(aarr[1:], aarr[1:])]]  # local index of a*b
    rows = []
    arange = np.arange(1, na)
    for h in range(1, na):
        block = (arange[:, None] == h).astype(np.int64) + (arange[None, :] == h) - (Lab == h)
        rows.append((block % n_mod).reshape(dim))
    cols, _ = character_space(A, k=k)
    if cols.shape[1]:
        coords_arr = np.array(
            [A.coords(G.element_of_index(gi)) for gi in a_idx], dtype=np.int64
        )
        for t in range(cols.shape[1]):
            tab = (coords_arr @ cols[:, t]) % n_mod
            block = (tab[1:, None] + tab[None, 1:] - tab[Lab]) // n_mod % n_mod
            rows.append(block.reshape(dim))
    return a_idx, rows, dim


def restriction_vector(H2: H2Structure, param_row, a_idx):
    """Pullback of a cocycle (parameter row) to the subgroup's cochain coords."""
    table = H2.cochain_table(param_row)
    na = len(a_idx)
    out = np.empty((na - 1) * (na - 1), dtype=np.int64)
    r = 0
    for ai in a_idx[1:]:
        out[r : r + na - 1] = table[ai, a_idx[1:]]
        r += na - 1
    return out


def b0_oracle(G: PcPresentation, size_cap=None, name=None):
    """B0(G) by Theorem-1.4 restriction kernels over all bicyclic subgroups.

    Works in class coordinates: with H^2 = sum Z/d_i on basis classes b_i,
    the kernel of res_A is {c : sum c_i res(b_i) lies in B^2(A) + delta_A},
    since coboundaries and Bocksteins restrict to the same kind.  B0 is the
    intersection of these kernels, a subgroup of H^2.
    """
    from .multiplier import B0Report

    t0 = time.time()
    p = G.p
    H2 = h2_qz(G, size_cap=size_cap, keep_tables=True)
    k = H2.k
    pk = p**k
    r = len(H2.invariants)
    n_bicyclic = 0
    if r == 0:
        C = None
    else:
        d_rows = np.diag([d for d in H2.invariants]).astype(np.int64)
        C = span_howell(np.vstack([np.eye(r, dtype=np.int64), d_rows]), r, p, k)
        res_cache = None
        for A in pc.enumerate_bicyclic_subgroups(G):
            if A.order == 1:
                continue
            n_bicyclic += 1
            a_idx, srows, dim = _subgroup_cochain_space(G, H2, A)
            res_rows = np.array(
                [restriction_vector(H2, H2.basis[i], a_idx) for i in range(r)], dtype=np.int64
            )
            S = np.array(srows, dtype=np.int64).reshape(-1, dim)
            M = np.vstack([res_rows, S]).T % pk
            sol = nullspace_mod_pk(M, p, k)
            gens = np.vstack([sol[:r].T % pk, d_rows])
            KA = span_howell(gens, r, p, k)
            inter = intersect_spans(C, KA, p, k)
            C = span_howell(np.vstack([inter, d_rows]) if inter.size else d_rows, r, p, k)
            if C.order() == _span_order(d_rows, r, p, k):
                break
    if C is None:
        invariants = []
    else:
        invariants, _ = quotient_structure(C, list(np.diag([d for d in H2.invariants]).astype(np.int64)), p, k)
    m_order = H2.order
    b0_order = 1
    for d in invariants:
        b0_order *= d
    return B0Report(
        name=name or G.name or "<unnamed>",
        p=p,
        order_exponent=G.n,
        method="oracle",
        invariants=invariants,
        m_order=m_order,
        m0_order=m_order // b0_order,
        certificates={"h2_invariants": H2.invariants, "bicyclic_subgroups": n_bicyclic},
        elapsed=time.time() - t0,
    )


def _span_order(rows, m, p, k):
    return span_howell(rows, m, p, k).order()


# -- transgression criterion (Lemma of the 5-term sequence) ---------------------


def restricted_character_span(G: PcPresentation, N: Subgroup, k: int):
    """Image of res: Hom(G, Q/Z) -> Hom(N, Q/Z) as rows on N.seq mod p^k.

    Characters of G are solved at G's own modulus (possibly larger than p^k)
    and the restricted values are re-expressed mod p^k; they fit because the
    order of a restricted value divides the order of the sequence element.
    """
    p = G.p
    W = pc.whole_group(G)
    cols, kg = character_space(W)
    rows = []
    for t in range(cols.shape[1]):
        chi = cols[:, t]
        row = []
        for s in N.seq:
            co = W.coords(s)
            val = QZValue.from_mod(sum(int(c) * int(v) for c, v in zip(co, chi)), p, kg)
            row.append(val.to_mod(k))
        rows.append(row)
    return rows


def transgression_cokernel(G: PcPresentation, N: Subgroup, h2_cap=None):
    """(order of coker(tr), certificate) through 5-term exactness:
    |im tr| = |H^1(N)^G| / |im res|, coker = |H^2(G/N)| / |im tr|."""
    chars, k = h1_invariants(N, G)
    m = len(N.seq)
    p = G.p
    if chars:
        fixed = span_howell([c.coord_vector() for c in chars], m, p, k)
        h1ng = fixed.order()
    else:
        fixed = None
        h1ng = 1
    res_rows = restricted_character_span(G, N, k)
    if res_rows and m:
        res_span = span_howell(res_rows, m, p, k)
        im_res = res_span.order()
        if fixed is not None:
            for row in res_span.basis():
                if not fixed.contains(row):
                    raise RuntimeError("restriction image is not G-fixed (internal error)")
    else:
        im_res = 1
    Q, _ = pc.quotient(G, N)
    H2Q = h2_qz(Q, size_cap=h2_cap, keep_tables=False)
    h2_order = H2Q.order
    if h1ng % im_res:
        raise RuntimeError("res image does not divide |H^1(N)^G| (internal error)")
    im_tr = h1ng // im_res
    if h2_order % im_tr:
        raise RuntimeError("tr image does not divide |H^2(G/N)| (internal error)")
    coker = h2_order // im_tr
    cert = {
        "h1_fixed_order": h1ng,
        "im_res_order": im_res,
        "im_tr_order": im_tr,
        "h2_quotient_order": h2_order,
        "h2_quotient_invariants": H2Q.invariants,
        "coker_order": coker,
    }
    return coker, cert


def bicyclic_images_cyclic(G: PcPresentation, N: Subgroup):
    """Do all bicyclic subgroups A of G have cyclic image AN/N?

    Exact reformulation: every bicyclic subgroup is generated by a commuting
    pair, and conversely, so it suffices that the image of every commuting
    pair generates a cyclic subgroup of G/N.  Returns (bool, witness pair).
    """
    Q, proj = pc.quotient(G, N)
    size = G.order
    qsize = Q.order
    proj_idx = np.empty(size, dtype=np.int64)
    for idx in range(size):
        proj_idx[idx] = Q.index_of(proj.apply(G.element_of_index(idx)))
    # cyclic-pair table on Q: <a,b> cyclic iff a in <b> or b in <a>
    powers = np.zeros((qsize, qsize), dtype=bool)
    for qi in range(qsize):
        x = Q.element_of_index(qi)
        y = Q.identity()
        powers[qi, 0] = True
        while True:
            y = y * x
            if y.is_identity():
                break
            powers[qi, Q.index_of(y)] = True
    cyc = powers | powers.T
    cp = G.conj_power_tables()
    idx = np.arange(size, dtype=np.int64)
    for yi in range(1, size):
        y = G.element_of_index(yi)
        perm = None
        for i, e in enumerate(y.exps):
            if e:
                t = cp[i][e]
                perm = t if perm is None else t[perm]
        comm = np.nonzero(perm == idx)[0]
        ok = cyc[proj_idx[comm], proj_idx[yi]]
        if not ok.all():
            xi = int(comm[int(np.nonzero(~ok)[0][0])])
            return False, (G.element_of_index(xi), y)
    return True, None


def lemma21_check(G: PcPresentation, N: Subgroup, h2_cap=None):
    """Transgression not surjective + all bicyclic images cyclic => B0 != 0.

    Returns (bool, certificate).  The certificate records the three orders
    from the 5-term sequence and the failing subgroup pair, if any.
    """
    coker, cert = transgression_cokernel(G, N, h2_cap=h2_cap)
    cert = dict(cert)
    if coker <= 1:
        cert["verdict"] = "transgression surjective"
        return False, cert
    cyclic, witness = bicyclic_images_cyclic(G, N)
    if not cyclic:
        cert["verdict"] = "bicyclic subgroup with non-cyclic image"
        cert["failing_pair"] = tuple(x.exps for x in witness)
        return False, cert
    cert["verdict"] = "B0 nonzero by transgression criterion"
    return True, cert


def lemma22_check(G: PcPresentation, f_indices=None, h2_cap=None):
    """Conditions (i)-(iii) on generators f_1..f_5, then the transgression
    criterion with N = <f_4, f_5>.  Refuses p = 2."""
    if G.p == 2:
        raise ValueError("the transgression criterion requires p >= 3")
    if f_indices is None:
        f_indices = list(range(5))
    if len(f_indices) != 5:
        raise ValueError("need exactly five generator indices f_1..f_5")
    f = {i + 1: G.generator(gi) for i, gi in enumerate(f_indices)}
    p = G.p
    cert = {}
    cond_i = (
        pc.power(f[4], p).is_identity()
        and pc.power(f[5], p).is_identity()
        and all(pc.commutator(f[5], g).is_identity() for g in G.generators())
    )
    cert["condition_i"] = cond_i
    pairs = [
        (f[2], f[1], f[3]),
        (f[3], f[1], f[4]),
        (f[4], f[1], f[5]),
        (f[3], f[2], f[5]),
    ]
    cond_ii = all(pc.commutator(a, b) == c for a, b, c in pairs)
    cond_ii = cond_ii and pc.commutator(f[4], f[2]).is_identity() and pc.commutator(f[4], f[3]).is_identity()
    cert["condition_ii"] = cond_ii
    N = pc.subgroup_closure(G, [f[4], f[5]])
    cond_iii = N.order == p * p and N.is_abelian() and pc.abelian_invariants(N) == [p, p]
    if cond_iii:
        Q, _ = pc.quotient(G, N)
        nonab = any(
            not pc.commutator(a, b).is_identity() for a in Q.generators() for b in Q.generators()
        )
        cond_iii = Q.order == p**3 and nonab and pc.group_exponent(Q) == p
    cert["condition_iii"] = cond_iii
    if not (cond_i and cond_ii and cond_iii):
        cert["verdict"] = "hypotheses fail"
        return False, cert
    ok, sub = lemma21_check(G, N, h2_cap=h2_cap)
    cert.update(sub)
    return ok, cert


# -- cyclic-group cohomology helpers (7-term certificate) ------------------------


@dataclass
class CyclicH1:
    """Ker(Norm)/Im(sigma - 1) for a C_n action on a finite module.

    Module elements are coordinate columns mod p^k; the action is a matrix.
    """

    action: np.ndarray
    ambient_dim: int
    p: int
    k: int
    n: int
    invariants: list
    reps: list  # representative columns

    def cocycle(self, x):
        """Normalized 1-cocycle beta_x(sigma^i) = x + sigma x + ... (i terms)."""
        out = [np.zeros(self.ambient_dim, dtype=np.int64)]
        acc = np.zeros(self.ambient_dim, dtype=np.int64)
        cur = np.asarray(x, dtype=np.int64)
        for _ in range(1, self.n):
            acc = (acc + cur) % self.p**self.k
            out.append(acc.copy())
            cur = (self.action @ cur) % self.p**self.k
        return out


def cyclic_h1(module_gens, action, n, p, k) -> CyclicH1:
    """H^1(C_n, M) = Ker(Norm)/Im(sigma - 1) on the span of module_gens.

    module_gens: rows spanning M inside (Z/p^k)^d; action: d x d matrix of
    sigma.  The action must have order dividing n on the span.
    """
    pk = p**k
    gens = np.array(module_gens, dtype=np.int64) % pk
    d = gens.shape[1] if gens.size else 0
    A = np.asarray(action, dtype=np.int64) % pk
    power = np.eye(d, dtype=np.int64)
    for _ in range(n):
        power = (A @ power) % pk
    span = span_howell(gens, d, p, k)
    for row in gens:
        if not span.contains((power @ row) % pk):
            raise ValueError("action does not have order dividing n on the module")
        if not np.array_equal((power @ row) % pk, row % pk):
            raise ValueError("sigma^n is not the identity on the module")
    norm = np.zeros((d, d), dtype=np.int64)
    cur = np.eye(d, dtype=np.int64)
    for _ in range(n):
        norm = (norm + cur) % pk
        cur = (cur @ A) % pk
    B = span.basis()
    if B.shape[0] == 0:
        return CyclicH1(A, d, p, k, n, [], [])
    ker_c = nullspace_mod_pk((norm @ B.T) % pk, p, k)
    ker_gens = (ker_c.T @ B) % pk
    U = span_howell(ker_gens, d, p, k)
    im_gens = (B @ (A - np.eye(d, dtype=np.int64)).T) % pk
    for row in im_gens:
        if not U.contains(row):
            raise ValueError("Im(sigma - 1) escapes Ker(Norm)")
    invariants, reps = quotient_structure(U, list(im_gens), p, k)
    return CyclicH1(A, d, p, k, n, invariants, reps)


@dataclass
class Cocycle2:
    """Section-defect 2-cocycle on (G/N)^2 with values in N:
    u(s^i) u(s^j) = eps(i, j) u(s^(i+j))."""

    p: int
    table: dict  # (i, j) -> Element of N

    def value(self, i, j) -> Element:
        return self.table[(i % self.p, j % self.p)]

    def is_cocycle(self, conj_section) -> bool:
        """eps(i,j) eps(i+j,l) = (u(i) eps(j,l) u(i)^-1) eps(i, j+l);
        conj_section(x, i) must return u(s^i) x u(s^i)^-1."""
        p = self.p
        for i in range(p):
            for j in range(p):
                for l in range(p):
                    lhs = self.value(i, j) * self.value(i + j, l)
                    rhs = conj_section(self.value(j, l), i) * self.value(i, j + l)
                    if lhs != rhs:
                        return False
        return True


def section_cocycle(G: PcPresentation, N: Subgroup) -> Cocycle2:
    """The defect of the power section u(s^i) = t^i over a cyclic quotient
    of order p, where t is the unique pc generator spanning G/N."""
    p = G.p
    if G.order != N.order * p:
        raise ValueError("section_cocycle requires a quotient of order p")
    t_idx = [i for i in range(G.n) if i not in set(N.pivots)]
    if len(t_idx) != 1:
        raise ValueError("quotient generator is not unique in the pc sequence")
    t = G.generator(t_idx[0])
    u = [pc.power(t, i) for i in range(p)]
    table = {}
    for i in range(p):
        for j in range(p):
            e = (u[i] * u[j]) * u[(i + j) % p].inverse()
            if not N.contains(e):
                raise ValueError("section defect leaves N")
            table[(i, j)] = e
    return Cocycle2(p, table)


@dataclass
class Cocycle3:
    """Explicit 3-cocycle table on (C_p)^3 with Q/Z values."""

    p: int
    table: dict  # (i, j, l) -> QZValue

    def value(self, i, j, l):
        return self.table[(i % self.p, j % self.p, l % self.p)]

    def is_cocycle(self):
        """Pointwise 3-cocycle identity (trivial action):
        c(j,k,l) - c(i+j,k,l) + c(i,j+k,l) - c(i,j,k+l) + c(i,j,k) = 0."""
        p = self.p
        zero = QZValue.make(0, 0, p)
        for i, j, kk, l in itertools.product(range(p), repeat=4):
            tot = (
                self.value(j, kk, l)
                - self.value(i + j, kk, l)
                + self.value(i, j + kk, l)
                - self.value(i, j, kk + l)
                + self.value(i, j, kk)
            )
            if tot != zero:
                return False
        return True

    def minus(self, other):
        return Cocycle3(self.p, {key: v - other.table[key] for key, v in self.table.items()})


def cup_fundamental(beta_values, p, action=None, module_eval=None) -> Cocycle3:
    """alpha cup beta for the fundamental 2-cocycle of C_p.

    beta_values[l] is beta(sigma^l); entries are QZValue (trivial action) or
    coordinate columns when `action` and `module_eval` are given.  The result
    is gamma(s^i, s^j, s^l) = 0 for i+j <= p-1 and (sigma^(i+j) beta)(sigma^l)
    otherwise.
    """
    table = {}
    zero = QZValue.make(0, 0, p)
    for i in range(p):
        for j in range(p):
            for l in range(p):
                if i + j <= p - 1:
                    table[(i, j, l)] = zero
                else:
                    if action is None:
                        table[(i, j, l)] = beta_values[l]
                    else:
                        x = beta_values[l]
                        power = (i + j) % p
                        for _ in range(power):
                            x = action @ x
                        table[(i, j, l)] = module_eval(x)
    return Cocycle3(p, table)


def lambda_map(G: PcPresentation, N: Subgroup, gamma_chars) -> Cocycle3:
    """The 7-term-sequence map on a 1-cocycle gamma: G/N -> H^1(N, Q/Z).

    Requires G/N cyclic of order p; gamma_chars[i] is the character
    gamma(sigma^i).  c(s^i, s^j, s^l) = (u(s^{i+j}) . gamma(s^l))(eps(i, j))
    with the section u(sigma^i) = t^i for the pc generator t spanning G/N.
    """
    p = G.p
    if G.order != N.order * p:
        raise ValueError("lambda_map requires a quotient of order p")
    eps = section_cocycle(G, N)
    t_idx = [i for i in range(G.n) if i not in set(N.pivots)]
    t = G.generator(t_idx[0])
    u = [pc.power(t, i) for i in range(p)]
    table = {}
    for i in range(p):
        for j in range(p):
            e = eps.value(i, j).conj(u[(i + j) % p])
            for l in range(p):
                table[(i, j, l)] = gamma_chars[l].value_on(e)
    return Cocycle3(p, table)


def _coboundary3_membership(c: Cocycle3, k_model):
    """Is c a 3-coboundary of C_p with Z/p^k_model coefficients?"""
    p = c.p
    dim = (p - 1) * (p - 1)
    pk = p**k_model

    def wpos(i, j):
        return (i - 1) * (p - 1) + (j - 1)

    cols = HowellAccumulator(p**3, p, k_model)
    # column for each unknown w(i, j): its contribution to every d2 w entry
    basis_rows = []
    for i in range(1, p):
        for j in range(1, p):
            col = np.zeros(p**3, dtype=np.int64)
            for a in range(p):
                for b in range(p):
                    for cc in range(p):
                        v = 0
                        # d2 w(a,b,c) = w(b,c) - w(a+b,c) + w(a,b+c) - w(a,b)
                        if (b, cc) == (i, j):
                            v += 1
                        if ((a + b) % p, cc) == (i, j):
                            v -= 1
                        if (a, (b + cc) % p) == (i, j):
                            v += 1
                        if (a, b) == (i, j):
                            v -= 1
                        if v:
                            col[a * p * p + b * p + cc] = v % pk
            basis_rows.append(col)
    for row in basis_rows:
        cols.insert(row)
    target = np.zeros(p**3, dtype=np.int64)
    for (i, j, l), v in c.table.items():
        target[i * p * p + j * p + l] = v.to_mod(k_model)
    return cols.contains(target)


def h3_class_of(c: Cocycle3, k_model=None):
    """The class of c in H^3(C_p, Q/Z) = Z/p, via the Thm-5.5 correspondence.

    Tests c - gamma_a for coboundary membership where gamma_a is the cup of
    the fundamental class with beta_a(sigma^l) = a l / p; exactly one a must
    match, and the class is a.
    """
    p = c.p
    if k_model is None:
        k_model = max((v.exp for v in c.table.values()), default=1) + 1
    matches = []
    for a in range(p):
        beta = [QZValue.make(a * l, 1, p) for l in range(p)]
        gamma_a = cup_fundamental(beta, p)
        if _coboundary3_membership(c.minus(gamma_a), k_model):
            matches.append(a)
    if len(matches) != 1:
        raise RuntimeError(f"H3 class extraction matched {matches}; model modulus too small?")
    return matches[0]


def thm56_certificate(G: PcPresentation, N: Subgroup, h2_cap=None):
    """Certify B0(G) = 0 via the 7-term sequence over a cyclic quotient.

    Premises (checked): |N| <= p^4 so B0(N) = 0, G/N of order p, and
    H^2(G/N) = 0.  The certificate fires when H^1(G/N, H^1(N)) vanishes or
    when the lambda map is injective on its single C_p level.
    Returns (bool, certificate).
    """
    p = G.p
    cert = {}
    if N.order > p**4:
        raise ValueError("premise violated: need |N| <= p^4 for B0(N) = 0")
    if G.order != N.order * p:
        raise ValueError("premise violated: need [G : N] = p")
    if not N.is_normal():
        raise ValueError("premise violated: N must be normal")
    Q, _ = pc.quotient(G, N)
    H2Q = h2_qz(Q, keep_tables=False)
    cert["h2_quotient_invariants"] = H2Q.invariants
    if H2Q.invariants:
        raise ValueError("premise violated: H^2(G/N) != 0")
    chars_cols, k = character_space(N)
    m = len(N.seq)
    t_idx = [i for i in range(G.n) if i not in set(N.pivots)]
    if len(t_idx) != 1:
        raise ValueError("pc sequence does not split over N")
    t = G.generator(t_idx[0])
    A = conj_action_matrix(N, t)
    H1 = cyclic_h1(chars_cols.T, A, p, p, k)
    cert["h1_invariants"] = H1.invariants
    if not H1.invariants:
        cert["verdict"] = "H1(G/N, H1(N)) = 0, so H2(G)_1 = 0"
        return True, cert
    if H1.invariants != [p]:
        cert["verdict"] = "H1(G/N, H1(N)) too large for an injective lambda into C_p"
        return False, cert
    x = H1.reps[0]
    beta = H1.cocycle(x)
    gamma_chars = [Character(N, tuple(int(v) for v in col), k) for col in beta]
    c = lambda_map(G, N, gamma_chars)
    cls = h3_class_of(c)
    cert["lambda_beta_class"] = cls
    cert["lambda_table_row"] = [str(c.value(1, p - 1, l)) for l in range(p)]
    if cls != 0:
        cert["verdict"] = "lambda injective; H2(G)_1 = 0"
        return True, cert
    cert["verdict"] = "lambda(beta) = 0; no certificate"
    return False, cert
