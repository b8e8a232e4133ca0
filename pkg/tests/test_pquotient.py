import pytest

from b0lab import pcgroup as pc
from b0lab.catalog import abelian_presentation, build_phi6, build_phi10
from b0lab.pquotient import (
    FpPresentation,
    class1_quotient,
    extend_one_class,
    lift_word,
    p_quotient,
    pc_to_fp,
    word_comm,
)


def fp_c3xc3():
    F = FpPresentation(["x", "y"])
    F.add_relator(((0, 3),))
    F.add_relator(((1, 3),))
    F.add_relator(word_comm(((1, 1),), ((0, 1),)))
    return F


def test_class1_examples():
    Q = class1_quotient(fp_c3xc3(), 3)
    assert Q.order == 9 and Q.cls == 1
    # free group rank 2
    Q = class1_quotient(FpPresentation(["x", "y"]), 3)
    assert Q.order == 9
    # Phi10 relators: rank 2 (f3, f4, f5 are commutators)
    Q = class1_quotient(pc_to_fp(build_phi10(3, "28")), 3)
    assert Q.order == 9


def test_extend_stable_on_elementary_abelian():
    Q = class1_quotient(fp_c3xc3(), 3)
    assert extend_one_class(Q) is None


def test_free_rank2_class2():
    # independent oracle: BFS in H(Z/9)/<3z>, triples (a, b, c) with
    # (a,b,c)(a',b',c') = (a+a', b+b', c+c'+b a'); that group is the free
    # class-2 quotient of the rank-2 free pro-p group at p=3 (order 243:
    # the p-th power layer survives alongside the commutator)
    def mul(u, v):
        return ((u[0] + v[0]) % 9, (u[1] + v[1]) % 9, (u[2] + v[2] + u[1] * v[0]) % 3)

    seen = {(0, 0, 0)}
    frontier = [(0, 0, 0)]
    gens = [(1, 0, 0), (0, 1, 0)]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = mul(x, g)
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    Q = p_quotient(FpPresentation(["x", "y"]), 3, 2)
    assert Q.order == len(seen) == 243
    assert Q.capped and not Q.stable


def test_burnside_2_3_is_heisenberg():
    # B(2,3): cubes of x, y, xy, xy^2 suffice; the quotient must stabilize at
    # the extraspecial exponent-3 group of order 27
    F = FpPresentation(["x", "y"])
    F.add_relator(((0, 3),))
    F.add_relator(((1, 3),))
    F.add_relator(((0, 1), (1, 1)) * 3)
    F.add_relator(((0, 1), (1, 2)) * 3)
    Q = p_quotient(F, 3, 6)
    assert Q.stable and Q.order == 27
    assert pc.group_exponent(Q.pc) == 3
    assert pc.center(Q.pc).order == 3


def test_c3_free_product_c3_grows():
    # <x, y | x^3, y^3> is C3 * C3: the 3-quotient tower never stabilizes
    F = FpPresentation(["x", "y"])
    F.add_relator(((0, 3),))
    F.add_relator(((1, 3),))
    Q = p_quotient(F, 3, 4)
    assert Q.capped and not Q.stable
    assert Q.order > 27


@pytest.mark.parametrize("part", [(2,), (3,), (2, 1), (2, 2)])
def test_abelian_roundtrip(part):
    P = abelian_presentation(part, 3)
    Q = p_quotient(pc_to_fp(P), 3, 12)
    assert Q.stable and Q.order == P.order


def test_phi10_roundtrip_and_stabilization(catalog3):
    G = build_phi10(3, "28")
    Q = p_quotient(pc_to_fp(G), 3, 10)
    assert Q.stable and Q.order == 3**5
    assert Q.pc.is_consistent()
    assert pc.center(Q.pc).order == 3
    assert pc.derived_subgroup(Q.pc).order == 27


def test_phi6_roundtrip():
    G = build_phi6(3, "(221)a")
    Q = p_quotient(pc_to_fp(G), 3, 10)
    assert Q.stable and Q.order == 3**5


def test_catalog_roundtrip_invariants(catalog3):
    for cg in catalog3:
        G = cg.group
        Q = p_quotient(pc_to_fp(G), 3, 10)
        assert Q.stable and Q.order == G.order, cg.name
        assert pc.center(Q.pc).order == pc.center(G).order, cg.name
        assert pc.derived_subgroup(Q.pc).order == pc.derived_subgroup(G).order, cg.name
        assert pc.group_exponent(Q.pc) == pc.group_exponent(G), cg.name


def test_monotonicity_and_idempotence():
    F = pc_to_fp(build_phi10(3, "29"))
    Q = class1_quotient(F, 3)
    orders = [Q.order]
    while True:
        nxt = extend_one_class(Q)
        if nxt is None:
            break
        Q = nxt
        orders.append(Q.order)
    assert orders == sorted(set(orders))  # strictly increasing
    assert extend_one_class(Q) is None  # idempotent once stable
    assert not Q.relator_failures()


def test_epimorphism_property_every_class():
    F = pc_to_fp(build_phi6(3, "(221)c_1"))
    Q = class1_quotient(F, 3)
    while True:
        assert not Q.relator_failures()
        nxt = extend_one_class(Q)
        if nxt is None:
            break
        Q = nxt


def test_lift_word():
    F = pc_to_fp(build_phi10(3, "28"))
    Q = p_quotient(F, 3, 10)
    assert lift_word(Q, ()).is_identity()
    for rel in F.relators:
        assert lift_word(Q, rel).is_identity()
    # f2 f1 commutes with pcgroup multiplication through the epimorphism
    img = lift_word(Q, ((1, 1), (0, 1)))
    assert img == Q.images[1] * Q.images[0]
    with pytest.raises(ValueError):
        lift_word(Q, ((99, 1),))


def test_class_cap_status():
    Q = p_quotient(FpPresentation(["x", "y"]), 3, 3)
    assert Q.capped and not Q.stable and Q.cls == 3
