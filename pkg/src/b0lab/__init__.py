"""Bogomolov multipliers of finite p-groups.

Two independent computations of B0(G): the exterior-square route
(M(G)/M0(G) through a doubled-generator presentation and the p-quotient
algorithm) and a brute-force bar-resolution cohomology oracle with
restriction kernels over bicyclic subgroups; plus the transgression and
7-term-sequence certificates, isoclinism testing, and a catalog of the
order-p^5 families the criteria apply to.
"""

__version__ = "0.1.0"

from .pcgroup import (  # noqa: F401
    Element,
    Homomorphism,
    PcPresentation,
    Subgroup,
    abelian_invariants,
    center,
    commutator,
    derived_subgroup,
    group_exponent,
    inverse,
    is_bicyclic,
    is_consistent,
    multiply,
    order_of,
    power,
    quotient,
    subgroup_closure,
)
from .catalog import (  # noqa: F401
    CatalogGroup,
    FamilyId,
    NumberTheoryContext,
    bagnera_total,
    build_abelian,
    build_phi5,
    build_phi6,
    build_phi7,
    build_phi10,
    catalog_groups,
    family_counts,
    gap_id_map,
    parse_pcp,
    serialize_pcp,
)
from .pquotient import FpPresentation, PcQuotient, class1_quotient, extend_one_class, p_quotient  # noqa: F401
from .multiplier import (  # noqa: F401
    B0Report,
    ExteriorSquareData,
    b0_tensor,
    commuting_wedge,
    exterior_square,
    schur_multiplier,
    tau_presentation,
    verify_theorem,
)
from .cohomology import (  # noqa: F401
    Character,
    Cocycle2,
    Cocycle3,
    H2Structure,
    QZValue,
    b0_oracle,
    cup_fundamental,
    cyclic_h1,
    h1_invariants,
    h2_qz,
    lambda_map,
    lemma21_check,
    lemma22_check,
    section_cocycle,
    thm56_certificate,
    transgression_cokernel,
)
from .isoclinism import (  # noqa: F401
    CommutatorPairing,
    b0_constancy_report,
    commutator_pairing,
    family_fingerprint,
    is_isoclinic,
    isoclinism_invariants,
)
