"""Lower exponent-p central series quotients of finitely presented groups.

Class-by-class construction: attach one new central tail generator to every
power and commutator relation of the current quotient, harvest GF(p)-linear
relations among the tails from all consistency overlaps and from the images
of the defining relators, echelonize, and keep the surviving tails as the
next layer.  Tails go on every relation, not just definitions: simpler and
correct at the sizes this package targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import rref_mod_p
from .pcgroup import CollectionError, Element, PcPresentation, power

# -- free-group words ----------------------------------------------------------


def word_inverse(w):
    return tuple((i, -e) for i, e in reversed(w))


def word_conj(w, by):
    return word_inverse(by) + tuple(w) + tuple(by)


def word_comm(a, b):
    return word_inverse(a) + word_inverse(b) + tuple(a) + tuple(b)


def word_pow(w, k):
    if k < 0:
        return word_inverse(word_pow(w, -k))
    return tuple(w) * k


@dataclass
class FpPresentation:
    generators: list
    relators: list = field(default_factory=list)  # words: tuples of (gen index, exponent)

    def add_relator(self, word):
        word = tuple((int(i), int(e)) for i, e in word if int(e))
        for i, _ in word:
            if not (0 <= i < len(self.generators)):
                raise ValueError(f"relator references unknown generator {i}")
        self.relators.append(word)

    def __repr__(self):
        return f"<FpPresentation on {len(self.generators)} generators, {len(self.relators)} relators>"


@dataclass
class PcQuotient:
    fp: FpPresentation
    pc: PcPresentation
    cls: int
    images: list  # Element per FP generator
    weights: list
    definitions: list  # per pc generator, see extend_one_class
    stable: bool = False
    capped: bool = False

    @property
    def order(self):
        return self.pc.order

    def lift_word(self, word) -> Element:
        """Image of an FP word under the epimorphism, in normal form."""
        out = self.pc.identity()
        for i, e in word:
            if not (0 <= i < len(self.fp.generators)):
                raise ValueError(f"unknown generator index {i}")
            out = out * power(self.images[i], e)
        return out

    def relator_failures(self):
        return [w for w in self.fp.relators if not self.lift_word(w).is_identity()]


def class1_quotient(F: FpPresentation, p: int) -> PcQuotient:
    """Largest elementary abelian quotient F/[F,F]F^p with recorded images."""
    d = len(F.generators)
    rows = np.zeros((max(len(F.relators), 1), d), dtype=np.int64)
    for r, w in enumerate(F.relators):
        for i, e in w:
            rows[r, i] += e
    E, pivots = rref_mod_p(rows % p, p)
    free = [c for c in range(d) if c not in pivots]
    n = len(free)
    pc = PcPresentation(p, n, {}, {})
    col_of = {c: k for k, c in enumerate(free)}
    images = []
    for gi in range(d):
        vec = [0] * n
        if gi in col_of:
            vec[col_of[gi]] = 1
        else:
            r = pivots.index(gi)
            for c in free:
                vec[col_of[c]] = (-int(E[r, c])) % p
        images.append(pc.element(vec))
    Q = PcQuotient(
        fp=F,
        pc=pc,
        cls=1,
        images=images,
        weights=[1] * n,
        definitions=[("img", c) for c in free],
    )
    bad = Q.relator_failures()
    if bad:
        raise CollectionError(f"class-1 quotient does not satisfy relators: {bad[:3]}")
    return Q


def _covering(pc: PcPresentation, definitions):
    """Tail a new central generator onto every non-defining relation of pc.

    Relations that define a generator of weight >= 2 must stay exact;
    otherwise the defined generator escapes the Frattini subgroup and the
    covering is no longer generated by the epimorphism images (a tail on
    the definition g1 := a^3 of C9 would let the quotient grow forever).
    """
    n, p = pc.n, pc.p
    defined = set()
    for df in definitions:
        if df[0] == "pow":
            defined.add(("pow", df[1]))
        elif df[0] == "comm":
            defined.add(("comm", df[1], df[2]))
    tails = []  # (kind, data, old word)
    pows = {}
    comms = {}
    for i in range(n):
        w = pc.power_tail(i)
        if ("pow", i) in defined:
            if w:
                pows[i] = tuple(w)
            continue
        t = n + len(tails)
        tails.append(("pow", i, w))
        pows[i] = tuple(w) + ((t, 1),)
    for j in range(n):
        for i in range(j):
            w = pc.comm_tail(j, i)
            if ("comm", j, i) in defined:
                if w:
                    comms[(j, i)] = tuple(w)
                continue
            t = n + len(tails)
            tails.append(("comm", j, i, w))
            comms[(j, i)] = tuple(w) + ((t, 1),)
    m = len(tails)
    cover = PcPresentation(p, n + m, pows, comms)
    return cover, tails


def extend_one_class(Q: PcQuotient):
    """One covering-and-consistency step; returns the next quotient or None
    when no tail survives (the quotient is stable)."""
    pc = Q.pc
    n, p = pc.n, pc.p
    cover, tails = _covering(pc, Q.definitions)
    m = len(tails)
    rows = []

    def mv(u, v):
        return cover._mult_vec(u, v)

    def harvest(u, v, what):
        if u[:n] != v[:n]:
            raise CollectionError(f"covering overlap {what} disagrees outside the tail block")
        row = [(a - b) % p for a, b in zip(u[n:], v[n:])]
        if any(row):
            rows.append(row)

    N = n + m
    gen = []
    for i in range(n):
        v = [0] * N
        v[i] = 1
        gen.append(v)
    powv = []
    for i in range(n):
        v = [0] * N
        cover._collect(v, cover.power_tail(i))
        powv.append(v)
    genp1 = []
    for i in range(n):
        v = [0] * N
        v[i] = p - 1
        genp1.append(v)

    for k in range(2, n):
        for j in range(1, k):
            for i in range(j):
                harvest(mv(gen[k], mv(gen[j], gen[i])), mv(mv(gen[k], gen[j]), gen[i]), ("assoc", k, j, i))
    for j in range(n):
        for i in range(j):
            harvest(mv(powv[j], gen[i]), mv(genp1[j], mv(gen[j], gen[i])), ("pow-left", j, i))
            harvest(mv(gen[j], powv[i]), mv(mv(gen[j], gen[i]), genp1[i]), ("pow-right", j, i))
    for i in range(n):
        harvest(mv(gen[i], powv[i]), mv(powv[i], gen[i]), ("pow-self", i))

    # Defining relators, evaluated through verbatim lifts of the images.
    # The epimorphism to the next quotient may correct each image by a
    # central tail word z_i, so a relator with exponent sums eps imposes
    # v + sum_i eps_i z_i = 0: only the eps-free combinations force tail
    # relations, the rest determine the image corrections.
    d = len(Q.fp.generators)
    img_letters = [tuple((a, e) for a, e in enumerate(im.exps) if e) for im in Q.images]
    inv_cache = {}

    def inv_letters(i):
        if i not in inv_cache:
            inv = cover._inverse_vec(_expand_letters(img_letters[i], N))
            inv_cache[i] = tuple((a, ee) for a, ee in enumerate(inv) if ee)
        return inv_cache[i]

    comb = []
    for w in Q.fp.relators:
        vec = [0] * N
        eps = [0] * d
        for i, e in w:
            eps[i] += e
            letters = img_letters[i] if e > 0 else inv_letters(i)
            for _ in range(abs(e)):
                cover._collect(vec, letters)
        if any(vec[:n]):
            raise CollectionError("relator image leaves the tail block in the covering")
        row = [x % p for x in eps] + [x % p for x in vec[n:]]
        if any(row):
            comb.append(row)

    corrections = [[0] * m for _ in range(d)]
    if comb:
        CE, cpivots = rref_mod_p(np.array(comb, dtype=np.int64), p)
        for r, c in enumerate(cpivots):
            if c < d:
                # image correction for FP generator c: z_c = -v-part
                for t in range(m):
                    corrections[c][t] = (-int(CE[r, d + t])) % p
            else:
                rows.append([int(x) for x in CE[r, d:]])

    if rows:
        E, pivots = rref_mod_p(np.array(rows, dtype=np.int64), p)
    else:
        E, pivots = np.zeros((0, m), dtype=np.int64), []
    piv_set = set(pivots)
    free = [t for t in range(m) if t not in piv_set]
    s = len(free)
    if s == 0:
        return None
    new_index = {t: n + k for k, t in enumerate(free)}
    # substitution word for each tail variable
    subst = {}
    for t in free:
        subst[t] = ((new_index[t], 1),)
    for r, c in enumerate(pivots):
        word = []
        for t in free:
            coef = (-int(E[r, t])) % p
            if coef:
                word.append((new_index[t], coef))
        subst[c] = tuple(sorted(word))

    tail_of = {}
    for ti, kind in enumerate(tails):
        key = ("pow", kind[1]) if kind[0] == "pow" else ("comm", kind[1], kind[2])
        tail_of[key] = ti
    pows = {}
    comms = {}
    for i in range(n):
        ti = tail_of.get(("pow", i))
        word = tuple(pc.power_tail(i)) + (subst[ti] if ti is not None else ())
        if word:
            pows[i] = word
    for j in range(n):
        for i in range(j):
            ti = tail_of.get(("comm", j, i))
            word = tuple(pc.comm_tail(j, i)) + (subst[ti] if ti is not None else ())
            if word:
                comms[(j, i)] = word
    new_pc = PcPresentation(p, n + s, pows, comms)
    images = []
    for gi, im in enumerate(Q.images):
        extra = [0] * s
        for t, coef in enumerate(corrections[gi]):
            if coef:
                for idx, e in subst[t]:
                    extra[idx - n] = (extra[idx - n] + coef * e) % p
        images.append(new_pc.element(tuple(im.exps) + tuple(extra)))
    defs = list(Q.definitions)
    for t in free:
        kind = tails[t]
        if kind[0] == "pow":
            defs.append(("pow", kind[1], kind[2]))
        else:
            defs.append(("comm", kind[1], kind[2], kind[3]))
    return PcQuotient(
        fp=Q.fp,
        pc=new_pc,
        cls=Q.cls + 1,
        images=images,
        weights=list(Q.weights) + [Q.cls + 1] * s,
        definitions=defs,
    )


def _expand_letters(letters, n):
    vec = [0] * n
    for i, e in letters:
        vec[i] = e
    return vec


def p_quotient(F: FpPresentation, p: int, max_class: int, check=True) -> PcQuotient:
    """Iterate extend_one_class until stable or the class cap is reached.

    A capped result is flagged, not fatal; callers decide whether partial
    output is acceptable.
    """
    if max_class < 1:
        raise ValueError("max_class must be >= 1")
    Q = class1_quotient(F, p)
    while Q.cls < max_class:
        nxt = extend_one_class(Q)
        if nxt is None:
            Q.stable = True
            break
        Q = nxt
    else:
        nxt = extend_one_class(Q)
        if nxt is None:
            Q.stable = True
        else:
            Q.capped = True
    if check:
        bad = Q.relator_failures()
        if bad:
            raise CollectionError(f"p-quotient violates relators: {bad[:3]}")
    return Q


def lift_word(Q: PcQuotient, word) -> Element:
    return Q.lift_word(word)


def pc_to_fp(P: PcPresentation) -> FpPresentation:
    """Presentation of the pc group as an FP group (relators of both kinds)."""
    F = FpPresentation([f"g{i+1}" for i in range(P.n)])
    for i in range(P.n):
        w = P.power_tail(i)
        F.add_relator(((i, P.p),) + word_inverse(w))
    for j in range(P.n):
        for i in range(j):
            w = P.comm_tail(j, i)
            rel = word_comm(((j, 1),), ((i, 1),)) + word_inverse(w)
            F.add_relator(rel)
    return F
