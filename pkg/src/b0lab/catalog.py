"""Built-in presentations for groups of order p^5 and the pcp text format.

Families covered by constructors: Phi_1 (abelian), Phi_5, Phi_6, Phi_7 and
Phi_10, in the already-expanded form (power tails explicit, commutator tails
explicit, relative order p everywhere).  The remaining families have no
complete printed presentations and enter only through pcp-file ingestion.
Generator indices are 0-based internally; the text format is 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .pcgroup import PcPresentation


@dataclass(frozen=True)
class FamilyId:
    family: int  # isoclinism family index, 1..10
    variant: str
    p: int

    def __str__(self):
        return f"Phi{self.family}({self.variant})"


@dataclass
class CatalogGroup:
    fid: FamilyId
    group: PcPresentation
    gap_id: int | None = None
    roles: dict = field(default_factory=dict)  # classical symbol -> generator index

    @property
    def name(self):
        return self.group.name


class NumberTheoryContext:
    """Smallest primitive root g and smallest quadratic non-residue nu mod p."""

    def __init__(self, p: int):
        if p < 3 or not _is_prime(p):
            raise ValueError("need an odd prime")
        self.p = p
        self.g = smallest_primitive_root(p)
        self.nu = smallest_nonresidue(p)
        self.alpha = self.g  # same convention in the Phi10 power relations

    def __repr__(self):
        return f"NumberTheoryContext(p={self.p}, g={self.g}, nu={self.nu})"


def _is_prime(m):
    if m < 2:
        return False
    for d in range(2, int(m**0.5) + 1):
        if m % d == 0:
            return False
    return True


def smallest_primitive_root(p: int) -> int:
    for g in range(2, p):
        seen = 1
        x = g
        order = 1
        while x != 1:
            x = x * g % p
            order += 1
        if order == p - 1:
            return g
    raise ValueError("no primitive root found")


def smallest_nonresidue(p: int) -> int:
    for x in range(2, p):
        if pow(x, (p - 1) // 2, p) == p - 1:
            return x
    raise ValueError("no quadratic non-residue found")


def _require_odd_prime(p):
    if p == 2 or not _is_prime(p):
        raise ValueError(f"p={p}: constructors require an odd prime")


# -- Phi_10 -------------------------------------------------------------------

_PHI10_COMMS = {
    (1, 0): ((2, 1),),  # [f2,f1] = f3
    (2, 0): ((3, 1),),  # [f3,f1] = f4
    (3, 0): ((4, 1),),  # [f4,f1] = f5
    (2, 1): ((4, 1),),  # [f3,f2] = f5
}

_PHI10_ROLES = {"f1": 0, "f2": 1, "f3": 2, "f4": 3, "f5": 4}


def phi10_variants(p: int):
    if p == 3:
        return ["1^5", "(2111)a_0", "(2111)a_1"]
    out = ["1^5"]
    out += [f"(2111)a_{r}" for r in range(math.gcd(4, p - 1))]
    out += [f"(2111)b_{r}" for r in range(math.gcd(3, p - 1))]
    return out


_PHI10_GAP3 = {"1^5": 28, "(2111)a_0": 29, "(2111)a_1": 30}


def build_phi10(p: int, variant) -> PcPresentation:
    _require_odd_prime(p)
    variant = str(variant)
    if p == 3:
        alias = {"28": "1^5", "29": "(2111)a_0", "30": "(2111)a_1"}
        variant = alias.get(variant, variant)
        pows = {1: ((3, 2),), 2: ((4, 2),)}  # f2^3 = f4^-1, f3^3 = f5^-1
        if variant == "1^5":
            pass
        elif variant == "(2111)a_0":
            pows[0] = ((4, 1),)  # f1^3 = f5
        elif variant == "(2111)a_1":
            pows[0] = ((4, 2),)  # f1^3 = f5^-1
        else:
            raise ValueError(f"unknown Phi10 variant {variant!r} for p=3")
        name = f"G(3^5,{_PHI10_GAP3[variant]})"
        return PcPresentation(3, 5, pows, dict(_PHI10_COMMS), name=name)
    if variant not in phi10_variants(p):
        raise ValueError(f"unknown Phi10 variant {variant!r} for p={p}")
    alpha = smallest_primitive_root(p)
    pows = {}
    if variant.startswith("(2111)a_"):
        r = int(variant.rsplit("_", 1)[1])
        pows[0] = ((4, pow(alpha, r, p)),)
    elif variant.startswith("(2111)b_"):
        r = int(variant.rsplit("_", 1)[1])
        pows[1] = ((4, pow(alpha, r, p)),)
    return PcPresentation(p, 5, pows, dict(_PHI10_COMMS), name=f"Phi10({variant})@p={p}")


# -- Phi_5 --------------------------------------------------------------------

_PHI5_COMMS_OF = lambda p: {
    (1, 0): ((4, p - 1),),  # [f2,f1] = f5^-1, i.e. [f1,f2] = f5
    (3, 2): ((4, p - 1),),  # [f4,f3] = f5^-1, i.e. [f3,f4] = f5
}

_PHI5_ROLES = {"f1": 0, "f2": 1, "f3": 2, "f4": 3, "f5": 4}


def phi5_variants(p: int):
    return ["2111", "1^5"]


def build_phi5(p: int, variant) -> PcPresentation:
    _require_odd_prime(p)
    variant = str(variant)
    pows = {}
    if variant == "2111":
        pows[0] = ((4, 1),)  # f1^p = f5
    elif variant != "1^5":
        raise ValueError(f"unknown Phi5 variant {variant!r}")
    return PcPresentation(p, 5, pows, _PHI5_COMMS_OF(p), name=f"Phi5({variant})@p={p}")


# -- Phi_6 --------------------------------------------------------------------

# generator order f1, f2, f0, h1, h2
_PHI6_COMMS_OF = lambda p: {
    (1, 0): ((2, p - 1),),  # [f2,f1] = f0^-1, i.e. [f1,f2] = f0
    (2, 0): ((3, 1),),  # [f0,f1] = h1
    (2, 1): ((4, 1),),  # [f0,f2] = h2
}

_PHI6_ROLES = {"f1": 0, "f2": 1, "f0": 2, "h1": 3, "h2": 4}


def phi6_variants(p: int):
    nu = smallest_nonresidue(p)
    out = ["(221)a"]
    out += [f"(221)b_{r}" for r in range(1, (p - 1) // 2 + 1)]
    out += ["(221)c_1", f"(221)c_{nu}"]
    out += ["(221)d_0"]
    out += [f"(221)d_{r}" for r in range(1, (p - 1) // 2 + 1)]
    if p >= 5:
        out += ["(2111)a", "(2111)b_1", f"(2111)b_{nu}"]
    out += ["1^5"]
    return out


def build_phi6(p: int, variant) -> PcPresentation:
    _require_odd_prime(p)
    variant = str(variant)
    if variant not in phi6_variants(p):
        raise ValueError(f"unknown Phi6 variant {variant!r} for p={p}")
    g = smallest_primitive_root(p)
    nu = smallest_nonresidue(p)
    inv4 = pow(4, -1, p)
    pows = {}
    if variant == "(221)a":
        pows = {0: ((3, 1),), 1: ((4, 1),)}
    elif variant.startswith("(221)b_"):
        r = int(variant.rsplit("_", 1)[1])
        pows = {0: ((3, pow(g, r, p)),), 1: ((4, 1),)}
    elif variant.startswith("(221)c_"):
        r = int(variant.rsplit("_", 1)[1])
        e = (-r * inv4) % p  # h2^(-r/4), fractional exponent mod p
        pows = {1: ((3, r), (4, r))}
        if e:
            pows[0] = ((4, e),)
    elif variant == "(221)d_0":
        pows = {0: ((4, 1),), 1: ((3, nu),)}
    elif variant.startswith("(221)d_"):
        r = int(variant.rsplit("_", 1)[1])
        k = (pow(g, 2 * r + 1, p) - 1) * inv4 % p  # 4k = g^(2r+1) - 1
        pows = {1: ((3, 1), (4, 1))}
        if k:
            pows[0] = ((4, k),)
    elif variant == "(2111)a":
        pows = {0: ((3, 1),)}
    elif variant.startswith("(2111)b_"):
        r = int(variant.rsplit("_", 1)[1])
        pows = {1: ((3, r),)}
    elif variant == "1^5":
        pows = {}
    return PcPresentation(p, 5, pows, _PHI6_COMMS_OF(p), name=f"Phi6({variant})@p={p}")


# -- Phi_7 --------------------------------------------------------------------

# p >= 5: generator order f0, f1, f4, f2, f3
_PHI7_COMMS_5 = lambda p: {
    (1, 0): ((3, 1),),  # [f1,f0] = f2
    (3, 0): ((4, 1),),  # [f2,f0] = f3
    (2, 1): ((4, p - 1),),  # [f4,f1] = f3^-1, i.e. [f1,f4] = f3
}

_PHI7_ROLES_5 = {"f0": 0, "f1": 1, "f4": 2, "f2": 3, "f3": 4}

# p = 3: generator order f1..f5 (GAP ids 56..60)
_PHI7_COMMS_3 = {
    (1, 0): ((3, 1),),  # [f2,f1] = f4
    (2, 1): ((4, 1),),  # [f3,f2] = f5
    (3, 0): ((4, 1),),  # [f4,f1] = f5
}

_PHI7_ROLES_3 = {"f1": 0, "f2": 1, "f3": 2, "f4": 3, "f5": 4}

_PHI7_GAP3 = {"56": "(2111)b_1", "57": "(2111)b_nu", "58": "1^5", "59": "(2111)a", "60": "(2111)c"}


def phi7_variants(p: int):
    if p == 3:
        return ["56", "57", "58", "59", "60"]
    nu = smallest_nonresidue(p)
    return ["(2111)a", "(2111)b_1", f"(2111)b_{nu}", "(2111)c", "1^5"]


def build_phi7(p: int, variant) -> PcPresentation:
    _require_odd_prime(p)
    variant = str(variant)
    if p == 3:
        alias = {v: k for k, v in _PHI7_GAP3.items()}
        variant = alias.get(variant, variant)
        pows = {
            "56": {},
            "57": {1: ((4, 1),)},  # f2^3 = f5
            "58": {1: ((4, 2),)},  # f2^3 = f5^2
            "59": {0: ((4, 1),), 1: ((4, 2),)},  # f1^3 = f5, f2^3 = f5^-1
            "60": {2: ((4, 1),)},  # f3^3 = f5
        }.get(variant)
        if pows is None:
            raise ValueError(f"unknown Phi7 variant {variant!r} for p=3")
        return PcPresentation(3, 5, pows, dict(_PHI7_COMMS_3), name=f"G(3^5,{variant})")
    if variant not in phi7_variants(p):
        raise ValueError(f"unknown Phi7 variant {variant!r} for p={p}")
    nu = smallest_nonresidue(p)
    pows = {}
    if variant == "(2111)a":
        pows[0] = ((4, 1),)  # f0^p = f3
    elif variant == "(2111)b_1":
        pows[1] = ((4, 1),)  # f1^p = f3
    elif variant == f"(2111)b_{nu}":
        pows[1] = ((4, nu),)  # f1^p = f3^nu
    elif variant == "(2111)c":
        pows[2] = ((4, 1),)  # f4^p = f3
    return PcPresentation(p, 5, pows, _PHI7_COMMS_5(p), name=f"Phi7({variant})@p={p}")


# -- Phi_1 (abelian) ----------------------------------------------------------

PARTITIONS_OF_5 = [(5,), (4, 1), (3, 2), (3, 1, 1), (2, 2, 1), (2, 1, 1, 1), (1, 1, 1, 1, 1)]


def abelian_presentation(parts, p: int, name=None) -> PcPresentation:
    """Abelian p-group of type C_{p^a} x C_{p^b} x ... for parts (a, b, ...)."""
    parts = tuple(int(x) for x in parts)
    if any(x < 1 for x in parts):
        raise ValueError("partition entries must be positive")
    n = sum(parts)
    pows = {}
    i = 0
    for lam in parts:
        for j in range(lam - 1):
            pows[i + j] = ((i + j + 1, 1),)
        i += lam
    return PcPresentation(p, n, pows, {}, name=name)


def build_abelian(partition, p: int) -> PcPresentation:
    partition = tuple(sorted((int(x) for x in partition), reverse=True))
    if sum(partition) != 5:
        raise ValueError("need a partition of 5")
    name = f"Phi1({''.join(map(str, partition))})@p={p}"
    return abelian_presentation(partition, p, name=name)


# -- counts and GAP ids --------------------------------------------------------


def family_counts(p: int) -> dict:
    """Per-family group counts for order p^5, plus the total."""
    if p == 2 or not _is_prime(p):
        raise ValueError("odd prime required")
    g3 = math.gcd(3, p - 1)
    g4 = math.gcd(4, p - 1)
    counts = {
        1: 7,
        2: 15,
        3: 13,
        4: p + 8,
        5: 2,
        6: 7 if p == 3 else p + 7,
        7: 5,
        8: 1,
        9: g3 + 2,
        10: 3 if p == 3 else g4 + g3 + 1,
    }
    counts["total"] = sum(v for k, v in counts.items() if k != "total")
    return counts


def phi10_count(p: int) -> int:
    return family_counts(p)[10]


def bagnera_total(p: int) -> int:
    """Bagnera's count of groups of order p^5; valid only for p >= 5."""
    if p < 5:
        raise ValueError("Bagnera's formula is correct only for p >= 5")
    return 2 * p + 61 + math.gcd(4, p - 1) + 2 * math.gcd(3, p - 1)


def gap_id_map(p: int) -> dict:
    """GAP SmallGroup ids for the catalog Phi10 (and p=3 Phi7) variants."""
    if p == 3:
        return {
            "phi10": {"1^5": 28, "(2111)a_0": 29, "(2111)a_1": 30},
            "phi7": {v: int(k) for k, v in _PHI7_GAP3.items()},
        }
    if p == 5:
        ids = list(range(33, 39))
    elif p == 7:
        ids = list(range(37, 43))
    elif p == 11:
        # stored verbatim from the source table: four ids, matching the
        # 1 + gcd(4,10) + gcd(3,10) = 4 family members
        ids = list(range(39, 43))
    else:
        raise ValueError(f"no GAP id table for p={p}")
    variants = phi10_variants(p)
    if len(variants) != len(ids):
        raise RuntimeError("GAP id table does not match the variant count")
    return {"phi10": dict(zip(variants, ids))}


def catalog_groups(p: int):
    """All built-in groups of order p^5: Phi_1, Phi_5, Phi_6, Phi_7, Phi_10."""
    _require_odd_prime(p)
    out = []
    for part in PARTITIONS_OF_5:
        fid = FamilyId(1, "".join(map(str, part)), p)
        out.append(CatalogGroup(fid, build_abelian(part, p)))
    for v in phi5_variants(p):
        out.append(CatalogGroup(FamilyId(5, v, p), build_phi5(p, v), roles=dict(_PHI5_ROLES)))
    for v in phi6_variants(p):
        out.append(CatalogGroup(FamilyId(6, v, p), build_phi6(p, v), roles=dict(_PHI6_ROLES)))
    for v in phi7_variants(p):
        roles = dict(_PHI7_ROLES_3 if p == 3 else _PHI7_ROLES_5)
        gap7 = int(v) if p == 3 else None
        out.append(CatalogGroup(FamilyId(7, v, p), build_phi7(p, v), gap_id=gap7, roles=roles))
    gap10 = gap_id_map(p)["phi10"] if p in (3, 5, 7, 11) else {}
    for v in phi10_variants(p):
        out.append(
            CatalogGroup(FamilyId(10, v, p), build_phi10(p, v), gap_id=gap10.get(v), roles=dict(_PHI10_ROLES))
        )
    return out


def catalog_group(p: int, family: int, variant) -> CatalogGroup:
    variant = str(variant)
    for cg in catalog_groups(p):
        if cg.fid.family == family and (
            cg.fid.variant == variant or (cg.gap_id is not None and str(cg.gap_id) == variant)
        ):
            return cg
    raise ValueError(f"no catalog group Phi{family}({variant}) at p={p}")


# -- pcp text format ------------------------------------------------------------


class PcpSyntaxError(ValueError):
    def __init__(self, message, line, col=None):
        self.line = line
        self.col = col
        where = f"line {line}" + (f", col {col}" if col is not None else "")
        super().__init__(f"{where}: {message}")


class InconsistentPresentationError(ValueError):
    def __init__(self, failures):
        self.failures = failures
        kind = failures[0]
        super().__init__(f"presentation is inconsistent; first failing overlap: {kind}")


def _parse_word(text, p, n, owner, lineno, colbase):
    word = []
    prev = owner
    col = colbase
    for factor in text.split():
        pos = text.index(factor, col - colbase) + colbase
        if "^" not in factor:
            raise PcpSyntaxError(f"factor {factor!r} must look like k^e", lineno, pos)
        ks, es = factor.split("^", 1)
        try:
            k = int(ks)
            e = int(es)
        except ValueError:
            raise PcpSyntaxError(f"bad factor {factor!r}", lineno, pos) from None
        if not (1 <= k <= n):
            raise PcpSyntaxError(f"generator index {k} out of range 1..{n}", lineno, pos)
        if k - 1 <= prev:
            raise PcpSyntaxError(
                f"factor indices must strictly increase and stay above {owner + 1}", lineno, pos
            )
        e %= p
        if e:
            word.append((k - 1, e))
        prev = k - 1
    return tuple(word)


def parse_pcp(text: str, check=True) -> PcPresentation:
    """Parse the line-oriented pcp format; validates consistency by default."""
    p = None
    n = None
    name = None
    pows = {}
    comms = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        head = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        if head == "p":
            try:
                p = int(rest.split()[0])
            except (ValueError, IndexError):
                raise PcpSyntaxError("expected `p <prime>`", lineno) from None
            if not _is_prime(p):
                raise PcpSyntaxError(f"{p} is not prime", lineno)
        elif head == "gens":
            try:
                n = int(rest.split()[0])
            except (ValueError, IndexError):
                raise PcpSyntaxError("expected `gens <n>`", lineno) from None
            if n < 0:
                raise PcpSyntaxError("generator count must be >= 0", lineno)
        elif head == "name":
            name = rest.strip()
        elif head == "pow":
            if p is None or n is None:
                raise PcpSyntaxError("`p` and `gens` must come before relations", lineno)
            if ":" not in rest:
                raise PcpSyntaxError("expected `pow <i> : <word>`", lineno)
            idx_part, word_part = rest.split(":", 1)
            try:
                (i,) = (int(t) for t in idx_part.split())
            except ValueError:
                raise PcpSyntaxError("expected `pow <i> : <word>`", lineno) from None
            if not (1 <= i <= n):
                raise PcpSyntaxError(f"generator index {i} out of range 1..{n}", lineno)
            if i - 1 in pows:
                raise PcpSyntaxError(f"duplicate power relation for generator {i}", lineno)
            pows[i - 1] = _parse_word(word_part.strip(), p, n, i - 1, lineno, 0)
        elif head == "comm":
            if p is None or n is None:
                raise PcpSyntaxError("`p` and `gens` must come before relations", lineno)
            if ":" not in rest:
                raise PcpSyntaxError("expected `comm <j> <i> : <word>`", lineno)
            idx_part, word_part = rest.split(":", 1)
            try:
                j, i = (int(t) for t in idx_part.split())
            except ValueError:
                raise PcpSyntaxError("expected `comm <j> <i> : <word>`", lineno) from None
            if not (1 <= i <= n and 1 <= j <= n):
                raise PcpSyntaxError("generator index out of range", lineno)
            if j <= i:
                raise PcpSyntaxError("comm requires j > i", lineno)
            if (j - 1, i - 1) in comms:
                raise PcpSyntaxError(f"duplicate comm relation ({j},{i})", lineno)
            word = _parse_word(word_part.strip(), p, n, j - 1, lineno, 0)
            if word:
                comms[(j - 1, i - 1)] = word
        else:
            raise PcpSyntaxError(f"unknown directive {head!r}", lineno)
    if p is None:
        raise PcpSyntaxError("missing `p <prime>` header", 1)
    if n is None:
        raise PcpSyntaxError("missing `gens <n>` header", 1)
    try:
        P = PcPresentation(p, n, pows, comms, name=name)
    except ValueError as exc:
        raise PcpSyntaxError(str(exc), 1) from None
    if check:
        failures = P.consistency_failures(limit=1)
        if failures:
            raise InconsistentPresentationError(failures)
    return P


def serialize_pcp(P: PcPresentation, include_name=True) -> str:
    """Canonical text: header, then pow lines by index, comm lines by (j, i)."""
    lines = [f"p {P.p}", f"gens {P.n}"]
    if include_name and P.name:
        lines.append(f"name {P.name}")
    for i in range(P.n):
        w = P.power_tail(i)
        if w:
            lines.append(f"pow {i + 1} : " + " ".join(f"{a + 1}^{e}" for a, e in w))
    for j in range(P.n):
        for i in range(j):
            w = P.comm_tail(j, i)
            if w:
                lines.append(f"comm {j + 1} {i + 1} : " + " ".join(f"{a + 1}^{e}" for a, e in w))
    return "\n".join(lines) + "\n"


def canonical_text(P: PcPresentation) -> str:
    """Name-independent serialization used for hashing/caching."""
    return serialize_pcp(P, include_name=False)
