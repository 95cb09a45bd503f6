"""hotc: exact calculus for higher-order quantum-map types.

Boolean type functions and their Moebius/poset representations, decision and
decomposition procedures, and a numerical affine-subspace layer realizing
each type as a subspace of multipartite hermitian-matrix space.
"""

from .boolfun import (
    BoolFun,
    MobiusCoeffs,
    SubsetMask,
    block_permutation,
    canonical,
    from_mobius,
    join,
    make_p,
    meet,
    mobius,
    ones,
    permute,
    star,
    tensorf,
)
from .typealg import (
    IOSets,
    StructureForm,
    causal,
    causal_rev,
    enumerate_types,
    evaluate_structure,
    expr_to_type,
    gamma,
    hom,
    io_sets,
    is_type,
    parse_expr,
    structure_form,
    subtype_bounds,
)
from .poset import (
    CombStructure,
    LabelledPoset,
    build_poset,
    chain_info,
    decompose,
    factor_dual_product,
    factor_product,
    free_indices,
    independent_components,
    ordinal_sum_check,
    p0,
    rank_of_index,
    reconstruct,
    strip_chain_bottom,
    strip_chain_top,
    to_dot,
)
from .linal import AffSpace, Subspace, aff_dual, aff_hom, aff_tensor, contains, morphism_check
from .quantum import (
    FirstOrderObj,
    build_Sf,
    comb_oracle,
    hom_q,
    is_channel_member,
    object_from_expr,
    projector_lattice_check,
    random_cptp,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
