"""Exact solvers for locally constrained graph homomorphisms (LSHom, LBHom,
LIHom) and role assignment, with brute-force oracles, reduction-instance
generators and certificate verification."""

from .graphs import (
    BudgetExceededError,
    EquitablePartitionResult,
    Graph,
    GraphError,
    TreeDecomposition,
    connected_components,
    drm_equal,
    equitable_partition_drm,
    find_c_deletion_set,
    format_graph,
    is_extended_deletion_set,
    max_matching,
    parse_graph,
    tree_decomposition_from_structure,
)
from .homs import (
    HOM,
    LOC_BIJ,
    LOC_INJ,
    LOC_SURJ,
    Mode,
    PartialHom,
    augments,
    brute_force_hom,
    brute_force_role,
    check_mapping,
    weak_surj,
    witness_from_json,
    witness_to_json,
)
from .structure import (
    Extension,
    TypeClass,
    canonical_form,
    compute_types,
    enumerate_abstract_types,
    enumerate_sub_extensions,
    extension_from,
    pinned_isomorphic,
    type_census,
    type_of,
)
from .dp import can_be_mapped, exists_augmenting_hom
from .ilp import (
    ILPModel,
    LinearConstraint,
    TargetDescription,
    build_model_I,
    build_model_SB,
    dump_model,
    solve_feasibility,
)
from .pipeline import (
    MappingSets,
    SolveReport,
    compute_mapping_sets,
    dec_part,
    discover_parameters,
    enumerate_partial_homs,
    high_degree_set,
    solve_constrained_hom,
    solve_lihom_special,
    solve_lihom_xp,
    solve_role_assignment,
)
from .generators import (
    gen_3partition_reduction,
    gen_hprime_partition_reduction,
    gen_random_bounded_fracture,
    known_lbhom_witness,
    three_partition,
    verify_reduction_invariants,
)
