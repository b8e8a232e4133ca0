"""Power-commutator presentations of finite p-groups.

A presentation has generators g_0..g_{n-1}, every relative order equal to p,
power relations g_i^p = w_i and commutator relations [g_j, g_i] = w_ji (j > i)
where the right-hand words involve only generators of index > i resp. > j.
Normal forms are exponent vectors; arithmetic is collection from the left
with an explicit work stack.  Commutator convention: [a, b] = a^-1 b^-1 a b.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .linalg import inv_mod, smith_invariants

MAX_ENUM = 2_000_000  # element-enumeration guard
_MAX_STEPS = 200_000_000  # collection runaway guard


class CollectionError(RuntimeError):
    pass


def _check_word(word, owner, n, p, kind):
    prev = owner
    for idx, exp in word:
        if not (0 <= idx < n):
            raise ValueError(f"{kind}: generator index {idx} out of range")
        if idx <= prev:
            raise ValueError(f"{kind}: tail must use strictly increasing indices above {owner}")
        if not (1 <= exp < p):
            raise ValueError(f"{kind}: exponent {exp} outside [1, {p})")
        prev = idx


class PcPresentation:
    """Presentation container; run is_consistent() to certify unique normal forms."""

    def __init__(self, p, n, power_tails=None, comm_tails=None, name=None, weights=None):
        if p < 2:
            raise ValueError("p must be a prime >= 2")
        self.p = int(p)
        self.n = int(n)
        self.name = name
        self.weights = tuple(weights) if weights else None
        pow_list = [()] * n
        if power_tails is not None:
            items = power_tails.items() if isinstance(power_tails, dict) else enumerate(power_tails)
            for i, w in items:
                w = tuple((int(a), int(b) % p) for a, b in w if int(b) % p)
                _check_word(w, i, n, p, f"power tail of g{i}")
                pow_list[i] = w
        self._pow = tuple(pow_list)
        comm = [[None] * n for _ in range(n)]
        if comm_tails:
            for (j, i), w in comm_tails.items():
                if not j > i:
                    raise ValueError("commutator tails are keyed by (j, i) with j > i")
                w = tuple((int(a), int(b) % p) for a, b in w if int(b) % p)
                _check_word(w, j, n, p, f"commutator tail [g{j}, g{i}]")
                if w:
                    comm[j][i] = w
        self._comm = comm
        self._pow_inv_cache = [None] * n
        self._cache = {}

    # -- basic data ---------------------------------------------------------

    @property
    def order(self):
        return self.p**self.n

    def power_tail(self, i):
        return self._pow[i]

    def comm_tail(self, j, i):
        return self._comm[j][i] or ()

    def comm_tails_dict(self):
        return {
            (j, i): self._comm[j][i]
            for j in range(self.n)
            for i in range(j)
            if self._comm[j][i]
        }

    def identity(self):
        return Element(self, (0,) * self.n)

    def generator(self, i):
        vec = [0] * self.n
        vec[i] = 1
        return Element(self, tuple(vec))

    def generators(self):
        return [self.generator(i) for i in range(self.n)]

    def element(self, exps):
        exps = tuple(int(e) % self.p for e in exps)
        if len(exps) != self.n:
            raise ValueError("exponent vector has wrong length")
        return Element(self, exps)

    def __repr__(self):
        nm = f" {self.name!r}" if self.name else ""
        return f"<PcPresentation{nm} p={self.p} n={self.n}>"

    # -- collection ---------------------------------------------------------

    def _pow_inv_letters(self, i):
        cached = self._pow_inv_cache[i]
        if cached is None:
            vec = [0] * self.n
            self._collect(vec, self._pow[i])
            inv = self._inverse_vec(vec)
            cached = tuple((j, e) for j, e in enumerate(inv) if e)
            self._pow_inv_cache[i] = cached
        return cached

    def _collect(self, vec, letters):
        """Multiply normal form `vec` (list, mutated in place) by a word."""
        p = self.p
        n = self.n
        comm = self._comm
        pow_ = self._pow
        stack = list(letters)
        stack.reverse()
        steps = 0
        while stack:
            steps += 1
            if steps > _MAX_STEPS:
                raise CollectionError("collection did not terminate")
            i, e = stack.pop()
            if e == 0:
                continue
            if e < 0 or e >= p:
                q, e = divmod(e, p)
                if q:
                    w = pow_[i] if q > 0 else self._pow_inv_letters(i)
                    rw = tuple(reversed(w))
                    for _ in range(abs(q)):
                        stack.extend(rw)
                if e == 0:
                    continue
            m = -1
            for j in range(n - 1, i, -1):
                if vec[j]:
                    m = j
                    break
            if m < 0:
                tot = vec[i] + e
                if tot < p:
                    vec[i] = tot
                else:
                    vec[i] = tot - p
                    w = pow_[i]
                    if w:
                        stack.extend(reversed(w))
                continue
            w = comm[m][i]
            a = vec[m]
            vec[m] = 0
            if w is None:
                stack.append((m, a))
                stack.append((i, e))
            else:
                # g_m^a g_i^e -> g_i (g_m w)^a g_i^(e-1)
                if e > 1:
                    stack.append((i, e - 1))
                rw = tuple(reversed(w))
                for _ in range(a):
                    stack.extend(rw)
                    stack.append((m, 1))
                stack.append((i, 1))
        return vec

    def _mult_vec(self, u, v):
        vec = list(u)
        self._collect(vec, [(i, e) for i, e in enumerate(v) if e])
        return vec

    def _inverse_vec(self, u):
        p = self.p
        a = list(u)
        x = [0] * self.n
        while True:
            lead = -1
            for i, e in enumerate(a):
                if e:
                    lead = i
                    break
            if lead < 0:
                return x
            f = [(lead, p - a[lead])]
            self._collect(a, f)
            self._collect(x, f)

    def collect_word(self, letters):
        """Normal form of an arbitrary word, given as (index, exponent) pairs."""
        vec = [0] * self.n
        self._collect(vec, list(letters))
        return Element(self, tuple(vec))

    def power_element(self, i):
        """The element g_i^p (the value of the power relation)."""
        vec = [0] * self.n
        self._collect(vec, self._pow[i])
        return Element(self, tuple(vec))

    # -- consistency --------------------------------------------------------

    def consistency_failures(self, limit=None):
        """Collect all overlap checks; returns a list of failure descriptions.

        Checked overlaps: g_k (g_j g_i) = (g_k g_j) g_i for k > j > i,
        g_j^p g_i = g_j^(p-1) (g_j g_i), g_j g_i^p = (g_j g_i) g_i^(p-1),
        and g_i g_i^p = g_i^p g_i.
        """
        n = self.n
        failures = []

        def mv(u, v):
            return self._mult_vec(u, v)

        gen = []
        for i in range(n):
            v = [0] * n
            v[i] = 1
            gen.append(v)
        powv = []
        for i in range(n):
            v = [0] * n
            self._collect(v, self._pow[i])
            powv.append(v)
        genp1 = []  # g_i^(p-1)
        for i in range(n):
            v = [0] * n
            v[i] = self.p - 1
            genp1.append(v)

        for k in range(2, n):
            for j in range(1, k):
                for i in range(j):
                    lhs = mv(gen[k], mv(gen[j], gen[i]))
                    rhs = mv(mv(gen[k], gen[j]), gen[i])
                    if lhs != rhs:
                        failures.append(("assoc", k, j, i, tuple(lhs), tuple(rhs)))
                        if limit and len(failures) >= limit:
                            return failures
        for j in range(n):
            for i in range(j):
                lhs = mv(powv[j], gen[i])
                rhs = mv(genp1[j], mv(gen[j], gen[i]))
                if lhs != rhs:
                    failures.append(("power-left", j, i, tuple(lhs), tuple(rhs)))
                    if limit and len(failures) >= limit:
                        return failures
                lhs = mv(gen[j], powv[i])
                rhs = mv(mv(gen[j], gen[i]), genp1[i])
                if lhs != rhs:
                    failures.append(("power-right", j, i, tuple(lhs), tuple(rhs)))
                    if limit and len(failures) >= limit:
                        return failures
        for i in range(n):
            lhs = mv(gen[i], powv[i])
            rhs = mv(powv[i], gen[i])
            if lhs != rhs:
                failures.append(("power-self", i, tuple(lhs), tuple(rhs)))
                if limit and len(failures) >= limit:
                    return failures
        return failures

    def is_consistent(self):
        return not self.consistency_failures(limit=1)

    # -- element indexing / tables ------------------------------------------

    def all_elements(self):
        if self.order > MAX_ENUM:
            raise ValueError(f"group too large to enumerate ({self.order} elements)")
        return [Element(self, exps) for exps in itertools.product(range(self.p), repeat=self.n)]

    def index_of(self, elt):
        idx = 0
        for e in elt.exps:
            idx = idx * self.p + e
        return idx

    def element_of_index(self, idx):
        exps = []
        for _ in range(self.n):
            exps.append(idx % self.p)
            idx //= self.p
        return Element(self, tuple(reversed(exps)))

    def conj_gen_tables(self):
        """For each generator g, a numpy permutation idx(x) -> idx(g^-1 x g)."""
        if "conj_tables" in self._cache:
            return self._cache["conj_tables"]
        if self.order > MAX_ENUM:
            raise ValueError("group too large for conjugation tables")
        p, n = self.p, self.n
        tables = []
        for t in range(n):
            g = self.generator(t)
            ginv = g.inverse()
            base = [((ginv * self.generator(j)) * g) for j in range(n)]
            base_letters = [tuple((i, e) for i, e in enumerate(b.exps) if e) for b in base]
            tbl = np.empty(self.order, dtype=np.int64)
            for idx, exps in enumerate(itertools.product(range(p), repeat=n)):
                word = []
                for j, e in enumerate(exps):
                    if e:
                        word.extend(base_letters[j] * e)
                vec = [0] * n
                self._collect(vec, word)
                out = 0
                for e in vec:
                    out = out * p + e
                tbl[idx] = out
            tables.append(tbl)
        self._cache["conj_tables"] = tables
        return tables

    def conj_power_tables(self):
        """Permutation tables for conjugation by g_t^e, 1 <= e < p."""
        if "conj_pow" in self._cache:
            return self._cache["conj_pow"]
        tables = self.conj_gen_tables()
        out = []
        for t in range(self.n):
            row = [None] * self.p
            acc = np.arange(self.order, dtype=np.int64)
            for e in range(1, self.p):
                acc = tables[t][acc]
                row[e] = acc
            out.append(row)
        self._cache["conj_pow"] = out
        return out

    def conj_perm(self, y):
        """Permutation idx(x) -> idx(y^-1 x y) for an element y."""
        cp = self.conj_power_tables()
        perm = None
        for i, e in enumerate(y.exps):
            if e:
                t = cp[i][e]
                perm = t if perm is None else t[perm]
        if perm is None:
            return np.arange(self.order, dtype=np.int64)
        return perm

    def mult_table(self):
        if "mult_table" in self._cache:
            return self._cache["mult_table"]
        if self.order > 3000:
            raise ValueError("multiplication table restricted to small groups")
        elems = self.all_elements()
        size = self.order
        tbl = np.empty((size, size), dtype=np.int32)
        for a_i, a in enumerate(elems):
            for b_i, b in enumerate(elems):
                tbl[a_i, b_i] = self.index_of(a * b)
        self._cache["mult_table"] = tbl
        return tbl


@dataclass(frozen=True, eq=False)
class Element:
    parent: PcPresentation
    exps: tuple

    def __mul__(self, other):
        _same_parent(self, other)
        return Element(self.parent, tuple(self.parent._mult_vec(self.exps, other.exps)))

    def inverse(self):
        return Element(self.parent, tuple(self.parent._inverse_vec(self.exps)))

    def __pow__(self, k):
        return power(self, k)

    def is_identity(self):
        return not any(self.exps)

    def leading(self):
        for i, e in enumerate(self.exps):
            if e:
                return i
        return None

    def conj(self, g):
        """g^-1 * self * g."""
        _same_parent(self, g)
        return (g.inverse() * self) * g

    def __hash__(self):
        return hash((id(self.parent), self.exps))

    def __eq__(self, other):
        return isinstance(other, Element) and self.parent is other.parent and self.exps == other.exps

    def __repr__(self):
        if self.is_identity():
            return "<id>"
        return "*".join(f"g{i}^{e}" if e > 1 else f"g{i}" for i, e in enumerate(self.exps) if e)


def _same_parent(a, b):
    if a.parent is not b.parent:
        raise ValueError("elements live in different presentations")


# -- spec-level operations ---------------------------------------------------


def multiply(a: Element, b: Element) -> Element:
    return a * b


def inverse(a: Element) -> Element:
    return a.inverse()


def power(a: Element, k: int) -> Element:
    P = a.parent
    if k < 0:
        a = a.inverse()
        k = -k
    result = P.identity()
    base = a
    while k:
        if k & 1:
            result = result * base
        base = base * base
        k >>= 1
    return result


def commutator(a: Element, b: Element) -> Element:
    _same_parent(a, b)
    return ((a.inverse() * b.inverse()) * a) * b


def order_of(a: Element) -> int:
    m = 1
    x = a
    while not x.is_identity():
        x = power(x, a.parent.p)
        m *= a.parent.p
        if m > a.parent.order:
            raise CollectionError("order computation exceeded group order")
    return m


def group_exponent(P: PcPresentation) -> int:
    if P.order > MAX_ENUM:
        raise ValueError("group too large for exponent enumeration")
    return max(order_of(x) for x in P.all_elements())


def is_consistent(P: PcPresentation) -> bool:
    return P.is_consistent()


# -- subgroups ---------------------------------------------------------------


class Subgroup:
    """Canonical generating sequence: strictly increasing leading indices,
    leading exponents 1, entries at other pivot positions reduced to 0."""

    def __init__(self, parent: PcPresentation, seq):
        self.parent = parent
        self.seq = list(seq)
        self.pivots = [s.leading() for s in self.seq]
        self._by_pivot = dict(zip(self.pivots, self.seq))

    @property
    def order(self):
        return self.parent.p ** len(self.seq)

    def key(self):
        return tuple(s.exps for s in self.seq)

    def sift(self, x: Element):
        """Residue of x after stripping pivots; identity iff member."""
        p = self.parent.p
        while not x.is_identity():
            i = x.leading()
            s = self._by_pivot.get(i)
            if s is None:
                return x
            x = power(s, p - x.exps[i]) * x
        return x

    def contains(self, x: Element) -> bool:
        return self.sift(x).is_identity()

    def coords(self, x: Element):
        """Exponents c with x = prod seq[i]^c[i] (pivot order); None if not member.

        Strips with s^(-e), not s^(p-e): the two differ by s^p, which matters
        exactly when a sequence element has a nontrivial power relation.
        """
        out = [0] * len(self.seq)
        while not x.is_identity():
            i = x.leading()
            s = self._by_pivot.get(i)
            if s is None:
                return None
            e = x.exps[i]
            out[self.pivots.index(i)] = e
            x = power(s, -e) * x
        return out

    def elements(self):
        if self.order > MAX_ENUM:
            raise ValueError("subgroup too large to enumerate")
        P = self.parent
        out = [P.identity()]
        for s in reversed(self.seq):
            pows = [P.identity()]
            for _ in range(P.p - 1):
                pows.append(pows[-1] * s)
            out = [pw * x for pw in pows for x in out]
        return out

    def random_element(self, rng):
        x = self.parent.identity()
        for s in self.seq:
            x = x * power(s, rng.randrange(self.parent.p))
        return x

    def is_abelian(self) -> bool:
        return all(
            commutator(a, b).is_identity()
            for i, a in enumerate(self.seq)
            for b in self.seq[i + 1 :]
        )

    def is_normal(self) -> bool:
        for s in self.seq:
            for g in self.parent.generators():
                if not self.contains(s.conj(g)):
                    return False
        return True

    def __repr__(self):
        return f"<Subgroup order {self.order} of {self.parent!r}>"


def subgroup_closure(P: PcPresentation, gens, normal=False) -> Subgroup:
    """Smallest subgroup containing gens (normal closure when normal=True).

    Sifting-based: new sequence elements trigger power, commutator, and
    (optionally) conjugation obligations until the sequence is closed.
    """
    p = P.p
    seq = {}
    work = [g for g in gens if not g.is_identity()]
    all_gens = P.generators() if normal else None
    while work:
        x = work.pop()
        while not x.is_identity():
            i = x.leading()
            s = seq.get(i)
            if s is not None:
                x = power(s, p - x.exps[i]) * x
            else:
                y = power(x, inv_mod(x.exps[i], p))
                seq[i] = y
                work.append(power(y, p))
                for z in list(seq.values()):
                    if z is not y:
                        work.append(commutator(y, z))
                if normal:
                    for g in all_gens:
                        work.append(y.conj(g))
                break
    pivots = sorted(seq)
    rows = [seq[i] for i in pivots]
    # reduce entries at later pivot positions to zero (canonical form)
    for a in range(len(pivots) - 1, -1, -1):
        for b in range(a):
            e = rows[b].exps[pivots[a]]
            if e:
                rows[b] = rows[b] * power(rows[a], p - e)
    return Subgroup(P, rows)


def normal_closure(P: PcPresentation, gens) -> Subgroup:
    return subgroup_closure(P, gens, normal=True)


def trivial_subgroup(P: PcPresentation) -> Subgroup:
    return Subgroup(P, [])


def whole_group(P: PcPresentation) -> Subgroup:
    return subgroup_closure(P, P.generators())


def center(P: PcPresentation) -> Subgroup:
    if "center" in P._cache:
        return P._cache["center"]
    tables = P.conj_gen_tables()
    idx = np.arange(P.order, dtype=np.int64)
    fixed = np.ones(P.order, dtype=bool)
    for t in tables:
        fixed &= t == idx
    gens = [P.element_of_index(int(i)) for i in np.nonzero(fixed)[0] if i]
    Z = subgroup_closure(P, gens)
    P._cache["center"] = Z
    return Z


def derived_subgroup(P: PcPresentation) -> Subgroup:
    if "derived" in P._cache:
        return P._cache["derived"]
    gens = [
        commutator(P.generator(j), P.generator(i))
        for j in range(P.n)
        for i in range(j)
    ]
    D = normal_closure(P, gens)
    P._cache["derived"] = D
    return D


def lower_central_series(P: PcPresentation):
    """[G, gamma_2, gamma_3, ...] down to the trivial subgroup."""
    if "lcs" in P._cache:
        return P._cache["lcs"]
    series = [whole_group(P)]
    while series[-1].order > 1:
        cur = series[-1]
        gens = [commutator(x, g) for x in cur.seq for g in P.generators()]
        nxt = normal_closure(P, gens)
        if nxt.order == cur.order:
            raise CollectionError("lower central series does not descend")
        series.append(nxt)
    P._cache["lcs"] = series
    return series


def nilpotency_class(P: PcPresentation) -> int:
    return len(lower_central_series(P)) - 1


def lower_p_central_series(P: PcPresentation):
    """[G, P_2(G), ...] with P_{i+1} = [P_i, G] P_i^p, down to trivial."""
    if "lpcs" in P._cache:
        return P._cache["lpcs"]
    series = [whole_group(P)]
    while series[-1].order > 1:
        cur = series[-1]
        gens = [commutator(x, g) for x in cur.seq for g in P.generators()]
        gens += [power(x, P.p) for x in cur.seq]
        nxt = normal_closure(P, gens)
        if nxt.order == cur.order:
            raise CollectionError("lower exponent-p central series does not descend")
        series.append(nxt)
    P._cache["lpcs"] = series
    return series


def exponent_p_class(P: PcPresentation) -> int:
    return len(lower_p_central_series(P)) - 1


def _seq_modulus_exponent(S: Subgroup) -> int:
    """Smallest K with p^K at least the order of every sequence element."""
    p = S.parent.p
    K = 1
    for s in S.seq:
        e = 0
        o = order_of(s)
        while o > 1:
            o //= p
            e += 1
        K = max(K, e)
    return K + 1


def _abelian_relation_rows(S: Subgroup, pK: int):
    p = S.parent.p
    k = len(S.seq)
    rows = []
    for i, s in enumerate(S.seq):
        co = S.coords(power(s, p))
        row = [0] * k
        row[i] = p
        for j, c in enumerate(co):
            row[j] = (row[j] - c) % pK
        rows.append(row)
    return rows


def abelian_invariants(S: Subgroup):
    """Invariant factors (p-powers, ascending) of an abelian subgroup."""
    if not S.is_abelian():
        raise ValueError("abelian_invariants requires an abelian subgroup")
    k = len(S.seq)
    if k == 0:
        return []
    p = S.parent.p
    K = _seq_modulus_exponent(S)
    rows = _abelian_relation_rows(S, p**K)
    return smith_invariants(np.array(rows, dtype=np.int64), k, p, K)


def abelian_quotient_invariants(M: Subgroup, M0: Subgroup):
    """Invariant factors of M / M0 for abelian M with M0 contained in M."""
    if not M.is_abelian():
        raise ValueError("quotient invariants require an abelian ambient subgroup")
    k = len(M.seq)
    if k == 0:
        return []
    p = M.parent.p
    K = _seq_modulus_exponent(M)
    rows = _abelian_relation_rows(M, p**K)
    for s in M0.seq:
        co = M.coords(s)
        if co is None:
            raise ValueError("M0 is not contained in M")
        rows.append([c % p**K for c in co])
    return smith_invariants(np.array(rows, dtype=np.int64), k, p, K)


def abelianization_invariants(P: PcPresentation):
    """Invariant factors of G/[G,G], straight from the presentation."""
    p, n = P.p, P.n
    K = n + 1
    rows = []
    for i in range(n):
        row = [0] * n
        row[i] = p
        for j, e in P._pow[i]:
            row[j] = (row[j] - e) % p**K
        rows.append(row)
    for j in range(n):
        for i in range(j):
            w = P._comm[j][i]
            if w:
                row = [0] * n
                for a, e in w:
                    row[a] = e
                rows.append(row)
    return smith_invariants(np.array(rows, dtype=np.int64), n, p, K)


def is_bicyclic(S: Subgroup) -> bool:
    """Cyclic or a direct product of two cyclics: abelian of rank <= 2."""
    return S.is_abelian() and len(abelian_invariants(S)) <= 2


def commuting_pairs(P: PcPresentation):
    """Iterator over all ordered pairs (x, y) with [x, y] = 1."""
    elems = P.all_elements()
    cp = P.conj_power_tables()
    idx = np.arange(P.order, dtype=np.int64)
    for y in elems:
        perm = None
        for i, e in enumerate(y.exps):
            if e:
                t = cp[i][e]
                perm = t if perm is None else t[perm]
        if perm is None:
            for x in elems:
                yield x, y
            continue
        for i in np.nonzero(perm == idx)[0]:
            yield elems[int(i)], y


def commuting_pair_count(P: PcPresentation) -> int:
    cp = P.conj_power_tables()
    idx = np.arange(P.order, dtype=np.int64)
    total = 0
    for exps in itertools.product(range(P.p), repeat=P.n):
        perm = None
        for i, e in enumerate(exps):
            if e:
                t = cp[i][e]
                perm = t if perm is None else t[perm]
        total += P.order if perm is None else int(np.count_nonzero(perm == idx))
    return total


def enumerate_bicyclic_subgroups(P: PcPresentation):
    """All bicyclic subgroups: closures of commuting pairs, deduplicated."""
    if "bicyclic" in P._cache:
        return P._cache["bicyclic"]
    seen = {}
    elems = P.all_elements()
    cp = P.conj_power_tables()
    idx = np.arange(P.order, dtype=np.int64)
    for yi, y in enumerate(elems):
        perm = None
        for i, e in enumerate(y.exps):
            if e:
                t = cp[i][e]
                perm = t if perm is None else t[perm]
        commuting = range(P.order) if perm is None else [int(i) for i in np.nonzero(perm == idx)[0]]
        for xi in commuting:
            if xi < yi:
                continue
            S = subgroup_closure(P, [elems[xi], y])
            seen.setdefault(S.key(), S)
    out = list(seen.values())
    P._cache["bicyclic"] = out
    return out


def conjugacy_class_sizes(P: PcPresentation):
    """Multiset (sorted list) of conjugacy class sizes."""
    tables = P.conj_gen_tables()
    size = P.order
    seen = np.zeros(size, dtype=bool)
    sizes = []
    for start in range(size):
        if seen[start]:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            x = frontier.pop()
            for t in tables:
                y = int(t[x])
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        for x in orbit:
            seen[x] = True
        sizes.append(len(orbit))
    return sorted(sizes)


# -- quotients and homomorphisms ---------------------------------------------


class Homomorphism:
    def __init__(self, source: PcPresentation, target: PcPresentation, images):
        if len(images) != source.n:
            raise ValueError("need one image per source generator")
        self.source = source
        self.target = target
        self.images = list(images)

    def apply(self, x: Element) -> Element:
        out = self.target.identity()
        for i, e in enumerate(x.exps):
            if e:
                out = out * power(self.images[i], e)
        return out

    def __call__(self, x):
        return self.apply(x)

    def validate(self) -> bool:
        return not self.failures(limit=1)

    def failures(self, limit=None):
        """Relations of the source that do not hold for the images."""
        out = []
        P, ims = self.source, self.images
        for i in range(P.n):
            lhs = power(ims[i], P.p)
            rhs = self.apply(P.power_element(i))
            if lhs != rhs:
                out.append(("power", i))
                if limit and len(out) >= limit:
                    return out
        for j in range(P.n):
            for i in range(j):
                lhs = commutator(ims[j], ims[i])
                w = P._comm[j][i] or ()
                rhs = self.apply(P.collect_word(w))
                if lhs != rhs:
                    out.append(("comm", j, i))
                    if limit and len(out) >= limit:
                        return out
        return out

    def image_subgroup(self) -> Subgroup:
        return subgroup_closure(self.target, self.images)

    def kernel_on(self, W: Subgroup) -> Subgroup:
        """Kernel of the restriction of self to the subgroup W of the source."""
        D, emb = direct_product(self.target, self.source)
        pairs = []
        for w in W.seq:
            img = self.apply(w)
            pairs.append(D.element(tuple(img.exps) + tuple(w.exps)))
        graph = subgroup_closure(D, pairs)
        nt = self.target.n
        kern_gens = []
        for s in graph.seq:
            if any(s.exps[:nt]):
                continue
            kern_gens.append(self.source.element(s.exps[nt:]))
        return subgroup_closure(self.source, kern_gens)

    def kernel(self) -> Subgroup:
        return self.kernel_on(whole_group(self.source))


def hom_validate(h: Homomorphism) -> bool:
    return h.validate()


def direct_product(P1: PcPresentation, P2: PcPresentation):
    """Block presentation of P1 x P2 (P1 block first); returns (D, offset)."""
    if P1.p != P2.p:
        raise ValueError("direct product requires equal primes")
    n = P1.n + P2.n
    off = P1.n
    pows = {}
    comms = {}
    for i in range(P1.n):
        if P1._pow[i]:
            pows[i] = P1._pow[i]
    for i in range(P2.n):
        if P2._pow[i]:
            pows[off + i] = tuple((a + off, e) for a, e in P2._pow[i])
    for j in range(P1.n):
        for i in range(j):
            w = P1._comm[j][i]
            if w:
                comms[(j, i)] = w
    for j in range(P2.n):
        for i in range(j):
            w = P2._comm[j][i]
            if w:
                comms[(off + j, off + i)] = tuple((a + off, e) for a, e in w)
    D = PcPresentation(P1.p, n, pows, comms, name=None)
    return D, off


def quotient(P: PcPresentation, N: Subgroup):
    """Presentation of G/N plus the projection homomorphism."""
    if N.parent is not P:
        raise ValueError("subgroup belongs to a different presentation")
    if not N.is_normal():
        raise ValueError("quotient requires a normal subgroup")
    p = P.p
    I = set(N.pivots)
    J = [i for i in range(P.n) if i not in I]
    reindex = {old: new for new, old in enumerate(J)}

    def reduce_mod(x: Element) -> Element:
        for i in sorted(I):
            e = x.exps[i]
            if e:
                x = power(N._by_pivot[i], p - e) * x
        return x

    def to_word(x: Element):
        if any(x.exps[i] for i in I):
            raise CollectionError("coset representative has support in N")
        return tuple((reindex[i], x.exps[i]) for i in J if x.exps[i])

    pows = {}
    comms = {}
    for jnew, j in enumerate(J):
        w = to_word(reduce_mod(power(P.generator(j), p)))
        if w:
            pows[jnew] = w
    for b in range(len(J)):
        for a in range(b):
            w = to_word(reduce_mod(commutator(P.generator(J[b]), P.generator(J[a]))))
            if w:
                comms[(b, a)] = w
    name = f"{P.name}/N" if P.name else None
    Q = PcPresentation(p, len(J), pows, comms, name=name)
    images = [Q.element(_expand(to_word(reduce_mod(P.generator(i))), len(J))) for i in range(P.n)]
    proj = Homomorphism(P, Q, images)
    return Q, proj


def _expand(word, n):
    vec = [0] * n
    for i, e in word:
        vec[i] = e
    return vec
