"""Computational algebra engine for finite partial groups and localities.

Builds amalgam partial groups and group-derived localities, classifies
subsets, certifies products of partial normal subgroups, constructs
quotient localities, and machine-verifies the structural lemmas behind all
of it on every instance it touches.
"""

from .groups import (
    FiniteGroup,
    Landmarks,
    SizeCapExceeded,
    SubgroupRef,
    all_subgroups,
    generate_group,
    group_landmarks,
    subgroup_closure,
    sylow_p,
)
from .locality import (
    ConjChain,
    DeltaFamily,
    Locality,
    LocalityConstructionError,
    as_locality,
    check_locality,
    conj_iso,
    conjugate_elem,
    delta_close,
    domain_chain,
    locality_from_group,
    normalizer_in_L,
    s_of_word,
)
from .normal import (
    ProductCertificate,
    enumerate_partial_normals,
    is_partial_normal,
    partial_normal_closure,
    product_theorem1,
    product_theorem2,
    strongly_closed_and_T,
)
from .partial import (
    AmalgamPartialGroup,
    AmalgamSpec,
    AmalgamSpecError,
    AxiomReport,
    CorruptedProducts,
    GroupPartialGroup,
    PartialGroup,
    SubsetHandle,
    Word,
    build_amalgam,
    check_axioms,
    classify_subset,
    dedekind_verify,
    invert_word,
    partial_subgroup_closure,
    pi,
    subset_product,
    swap_two_products,
)
from .quotient import (
    CosetRecord,
    LDeltaPair,
    QuotientBundle,
    QuotientConstructionError,
    build_quotient,
    coset_partition,
    is_up_maximal,
    maximal_cosets,
    transporter_in_K,
    up_relates,
    verify_quotient_lemmas,
)
from .report import CheckRecord, VerificationReport

__version__ = "0.1.0"
