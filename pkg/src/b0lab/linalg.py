"""Linear algebra over GF(p) and Z/p^k.

Everything downstream (consistency tails, cocycle spaces, abelian invariants)
reduces to three primitives: echelonization with unit pivots and p-layer
deferral (Howell-style), nullspaces mod p^k, and p-local Smith normal form.
Row convention throughout: subgroups/spans of (Z/p^k)^m are given by
generator *rows*; nullspaces are returned as generator *columns*.
"""

from __future__ import annotations

import numpy as np


def val_p(x: int, p: int, k: int) -> int:
    """p-adic valuation of x mod p^k; val(0) = k."""
    if x == 0:
        return k
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def inv_mod(a: int, m: int) -> int:
    return pow(int(a), -1, m)


def _as_matrix(rows, m):
    if len(rows) == 0:
        return np.zeros((0, m), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


class HowellAccumulator:
    """Incremental echelon basis of a row span in (Z/p^k)^m.

    Rows are inserted one at a time or in chunks; each kept row has a unique
    pivot column with leading entry p^v (unit part normalized away).  Rows
    whose leading entry is a non-unit are not discarded: their p^(k-v)
    multiples ("shadows") are re-inserted so the final basis spans the row
    module closure needed for membership tests (Howell property).
    """

    def __init__(self, m: int, p: int, k: int):
        self.m = m
        self.p = p
        self.k = k
        self.pk = p**k
        self.rows: dict[int, np.ndarray] = {}  # pivot col -> row
        self.vals: dict[int, int] = {}  # pivot col -> valuation of lead

    def insert(self, row):
        """Insert one row; returns the (pivot, row) pairs newly installed."""
        p, k, pk = self.p, self.k, self.pk
        created = []
        work = [np.asarray(row, dtype=np.int64) % pk]
        while work:
            r = work.pop()
            nz = np.nonzero(r)[0]
            while nz.size:
                c = int(nz[0])
                v = val_p(int(r[c]), p, k)
                if c in self.rows:
                    e = self.rows[c]
                    ev = self.vals[c]
                    if ev <= v:
                        r = (r - (int(r[c]) // int(e[c])) * e) % pk
                    else:
                        r = (r * inv_mod(int(r[c]) // p**v, pk)) % pk
                        self.rows[c], self.vals[c] = r, v
                        created.append((c, r))
                        if v > 0:
                            work.append((r * p ** (k - v)) % pk)
                        r = e
                    nz = np.nonzero(r)[0]
                else:
                    r = (r * inv_mod(int(r[c]) // p**v, pk)) % pk
                    self.rows[c] = r
                    self.vals[c] = v
                    created.append((c, r))
                    if v > 0:
                        work.append((r * p ** (k - v)) % pk)
                    break
        return created

    def insert_chunk(self, C) -> None:
        """Insert many rows; newly found unit pivots are eliminated from the
        remainder of the chunk with vectorized column updates."""
        C = np.asarray(C, dtype=np.int64) % self.pk
        piv0 = sorted(c for c, v in self.vals.items() if v == 0)
        if piv0:
            E0 = np.array([self.rows[c] for c in piv0], dtype=np.int64)
            # exact in float64: entries < p^k <= ~2200, width <= ~2500
            red = np.rint(C[:, piv0].astype(np.float64) @ E0.astype(np.float64))
            C = (C - red.astype(np.int64)) % self.pk
        C = C[C.any(axis=1)]
        for i in range(C.shape[0]):
            r = C[i]
            if not r.any():
                continue
            created = self.insert(r.copy())
            rest = C[i + 1 :]
            if rest.shape[0] == 0:
                continue
            for c, erow in created:
                if erow[c] != 1:  # only unit pivots eliminate unconditionally
                    continue
                col = rest[:, c]
                if col.any():
                    rest -= np.outer(col, erow)
                    rest %= self.pk

    def basis(self) -> np.ndarray:
        """Canonical basis matrix, pivot columns increasing, reduced upward."""
        pivots = sorted(self.rows)
        rows = [self.rows[c].copy() for c in pivots]
        for a in range(len(pivots) - 1, -1, -1):
            for b in range(a):
                c = pivots[a]
                lead = self.p ** self.vals[c]
                f = int(rows[b][c]) // lead
                if f:
                    rows[b] = (rows[b] - f * rows[a]) % self.pk
        return _as_matrix(rows, self.m)

    def pivot_vals(self):
        return [(c, self.vals[c]) for c in sorted(self.rows)]

    def order(self) -> int:
        n = 1
        for _, v in self.pivot_vals():
            n *= self.p ** (self.k - v)
        return n

    def reduce(self, row):
        """Residue of row modulo the span (zero iff member)."""
        r = np.asarray(row, dtype=np.int64) % self.pk
        for c in sorted(self.rows):
            x = int(r[c])
            if x == 0:
                continue
            lead = self.p ** self.vals[c]
            if x % lead:
                # cannot be cleared; leave for caller (non-member)
                continue
            r = (r - (x // lead) * self.rows[c]) % self.pk
        return r

    def contains(self, row) -> bool:
        return not self.reduce(row).any()

    def coords(self, row):
        """Coefficients per basis row reproducing `row`; None if non-member."""
        r = np.asarray(row, dtype=np.int64) % self.pk
        out = {}
        for c in sorted(self.rows):
            x = int(r[c])
            if x == 0:
                out[c] = 0
                continue
            lead = self.p ** self.vals[c]
            if x % lead:
                return None
            f = x // lead
            out[c] = f
            r = (r - f * self.rows[c]) % self.pk
        if r.any():
            return None
        return [out[c] for c in sorted(self.rows)]


def span_howell(gens, m: int, p: int, k: int) -> HowellAccumulator:
    acc = HowellAccumulator(m, p, k)
    g = _as_matrix(list(gens), m)
    if g.shape[0]:
        acc.insert_chunk(g)
    return acc


def rref_mod_p(A, p: int):
    """Reduced row echelon form over GF(p): returns (rows, pivot columns)."""
    A = np.asarray(A, dtype=np.int64) % p
    m = A.shape[1]
    rows: list[np.ndarray] = []
    pivots: list[int] = []
    pivot_of = {}
    chunk = 8192
    for lo in range(0, A.shape[0], chunk):
        C = A[lo : lo + chunk].copy()
        if rows:
            E = np.array(rows, dtype=np.int64)
            red = np.rint(C[:, pivots].astype(np.float64) @ E.astype(np.float64))
            C = (C - red.astype(np.int64)) % p
        for i in np.nonzero(C.any(axis=1))[0]:
            r = C[i]
            # reduce against every existing pivot (rows are inter-reduced, so
            # one sweep per pass cannot reintroduce pivot-column entries)
            while True:
                nz = np.nonzero(r)[0]
                touched = False
                for c2 in nz:
                    idx = pivot_of.get(int(c2))
                    if idx is not None and r[c2]:
                        r = (r - r[c2] * rows[idx]) % p
                        touched = True
                if not touched:
                    break
            nz = np.nonzero(r)[0]
            if not nz.size:
                continue
            c = int(nz[0])
            r = (r * inv_mod(int(r[c]), p)) % p
            for j, rr in enumerate(rows):
                if rr[c]:
                    rows[j] = (rr - rr[c] * r) % p
            pivot_of[c] = len(rows)
            rows.append(r)
            pivots.append(c)
    order = np.argsort(pivots)
    rows_m = _as_matrix([rows[i] for i in order], m)
    return rows_m, [pivots[i] for i in order]


def nullspace_mod_p(A, p: int) -> np.ndarray:
    """Basis of {x : Ax = 0 mod p}, as columns of an (m x d) matrix."""
    A = np.asarray(A, dtype=np.int64)
    m = A.shape[1]
    E, pivots = rref_mod_p(A, p)
    free = [c for c in range(m) if c not in pivots]
    N = np.zeros((m, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        N[f, j] = 1
        for i, c in enumerate(pivots):
            N[c, j] = (-E[i, f]) % p
    return N


def nullspace_mod_pk(A, p: int, k: int) -> np.ndarray:
    """Generators (columns) of {x in (Z/p^k)^m : Ax = 0 mod p^k}.

    Layer lifting: solve mod p, write x = N c + p y, divide through by p and
    recurse on the stacked system in (c, y).
    """
    A = np.asarray(A, dtype=np.int64) % p**k
    m = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(m, dtype=np.int64)
    if k == 1:
        return nullspace_mod_p(A, p)
    N = nullspace_mod_p(A, p)
    d = N.shape[1]
    if d == 0:
        return np.zeros((m, 0), dtype=np.int64)
    prod = A.astype(np.float64) @ N.astype(np.float64)
    B = (np.rint(prod).astype(np.int64) // p) % p ** (k - 1)
    W = nullspace_mod_pk(np.hstack([B, A % p ** (k - 1)]), p, k - 1)
    X = (N @ W[:d] + p * W[d:]) % p**k
    X = np.hstack([X, (p ** (k - 1) * N) % p**k])
    keep = X.any(axis=0)
    return X[:, keep]


def smith_invariants(R, r: int, p: int, k: int):
    """Invariant factors of Z^r / (rowspan(R) + p^k Z^r), as p-powers > 1.

    p-local SNF: pivot on a global minimum-valuation entry, clear its row and
    column (divisions are exact), recurse on the remaining block.
    """
    diag, _ = _snf_local(R, r, p, k, want_transform=False)
    return sorted(p**d for d in diag if d >= 1)


def smith_quotient_generators(R, r: int, p: int, k: int):
    """Like smith_invariants but also returns generator rows of the quotient.

    Returns (invariants, gens) where gens[i] is a length-r coefficient row
    (w.r.t. the original generators) of order invariants[i].
    """
    diag, Q = _snf_local(R, r, p, k, want_transform=True)
    Qinv = inv_mod_pk(Q, p, k)
    inv, gens = [], []
    for i, d in enumerate(diag):
        if d >= 1:
            inv.append(p**d)
            gens.append(Qinv[i] % p**k)
    order = np.argsort(inv, kind="stable")
    return [inv[i] for i in order], [gens[i] for i in order]


def _snf_local(R, r, p, k, want_transform):
    pk = p**k
    A = _as_matrix(list(R), r) % pk
    nrows = A.shape[0]
    if nrows < r:
        A = np.vstack([A, np.zeros((r - nrows, r), dtype=np.int64)])
        nrows = A.shape[0]
    Q = np.eye(r, dtype=np.int64) if want_transform else None
    diag = []
    vals = np.full(A.shape, k, dtype=np.int64)
    nz = A != 0
    tmp = A.copy()
    vals[nz] = 0
    while nz.any():
        nz = nz & (tmp % p == 0)
        tmp[nz] //= p
        vals[nz] += 1
        nz = nz & (tmp != 0)
    for pos in range(r):
        sub = vals[pos:, pos:]
        v = int(sub.min()) if sub.size else k
        if v >= k:
            diag.append(k)
            continue
        i, j = np.unravel_index(int(sub.argmin()), sub.shape)
        i, j = i + pos, j + pos
        if i != pos:
            A[[pos, i]] = A[[i, pos]]
            vals[[pos, i]] = vals[[i, pos]]
        if j != pos:
            A[:, [pos, j]] = A[:, [j, pos]]
            vals[:, [pos, j]] = vals[:, [j, pos]]
            if want_transform:
                Q[:, [pos, j]] = Q[:, [j, pos]]
        lead = p**v
        u = inv_mod(int(A[pos, pos]) // lead, pk)
        A[pos] = (A[pos] * u) % pk
        col = A[pos + 1 :, pos]
        if col.any():
            f = col // lead
            A[pos + 1 :] = (A[pos + 1 :] - np.outer(f, A[pos])) % pk
        row = A[pos, pos + 1 :]
        if row.any():
            f = row // lead
            A[pos, pos + 1 :] = 0
            if want_transform:
                Q[:, pos + 1 :] = (Q[:, pos + 1 :] - np.outer(Q[:, pos], f)) % pk
        diag.append(v)
        sub2 = A[pos + 1 :, pos + 1 :]
        vs = np.full(sub2.shape, k, dtype=np.int64)
        nz2 = sub2 != 0
        t2 = sub2.copy()
        vs[nz2] = 0
        while nz2.any():
            nz2 = nz2 & (t2 % p == 0)
            t2[nz2] //= p
            vs[nz2] += 1
            nz2 = nz2 & (t2 != 0)
        vals[pos + 1 :, pos + 1 :] = vs
    return diag, Q


def inv_mod_pk(Q, p: int, k: int) -> np.ndarray:
    """Inverse of a matrix unimodular mod p^k (Gaussian, unit pivots)."""
    pk = p**k
    n = Q.shape[0]
    A = Q.copy() % pk
    I = np.eye(n, dtype=np.int64)
    for c in range(n):
        rows = [i for i in range(c, n) if A[i, c] % p != 0]
        if not rows:
            raise ValueError("matrix not invertible mod p^k")
        i = rows[0]
        if i != c:
            A[[c, i]] = A[[i, c]]
            I[[c, i]] = I[[i, c]]
        u = inv_mod(int(A[c, c]), pk)
        A[c] = (A[c] * u) % pk
        I[c] = (I[c] * u) % pk
        for j in range(n):
            if j != c and A[j, c]:
                f = A[j, c]
                A[j] = (A[j] - f * A[c]) % pk
                I[j] = (I[j] - f * I[c]) % pk
    return I


def quotient_invariants(U: HowellAccumulator, V_gens, p: int, k: int):
    """Abelian invariants of span(U)/span(V_gens); V must lie inside U."""
    inv, _ = quotient_structure(U, V_gens, p, k)
    return inv


def quotient_structure(U: HowellAccumulator, V_gens, p: int, k: int):
    """Invariants plus representative rows (ambient coords) of span(U)/span(V)."""
    pivots = sorted(U.rows)
    r = len(pivots)
    if r == 0:
        return [], []
    basis = [U.rows[c] for c in pivots]
    rel = []
    for i, c in enumerate(pivots):
        mult = p ** (k - U.vals[c])
        co = U.coords((basis[i] * mult) % U.pk)
        if co is None:
            raise ValueError("Howell basis lost closure (internal error)")
        row = [-x % U.pk for x in co]
        row[i] = (row[i] + mult) % U.pk
        rel.append(row)
    for g in V_gens:
        co = U.coords(g)
        if co is None:
            raise ValueError("quotient_structure: V not contained in U")
        rel.append(co)
    inv, gens = smith_quotient_generators(_as_matrix(rel, r), r, p, k)
    B = _as_matrix(basis, U.m)
    reps = [(g @ B) % U.pk for g in gens]
    return inv, reps


def intersect_spans(U: HowellAccumulator, W: HowellAccumulator, p: int, k: int):
    """Generator rows of span(U) & span(W)."""
    BU = U.basis()
    BW = W.basis()
    if BU.shape[0] == 0 or BW.shape[0] == 0:
        return np.zeros((0, U.m), dtype=np.int64)
    M = np.hstack([BU.T, (-BW.T) % p**k])
    K = nullspace_mod_pk(M, p, k)
    gens = (K[: BU.shape[0]].T @ BU) % p**k
    keep = gens.any(axis=1)
    return gens[keep]
