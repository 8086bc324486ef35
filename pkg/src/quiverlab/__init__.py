"""Exact computation with doubled quivers, framed representation spaces,
moment fibers, reflection functors, covariants, and fiber strata.

Everything is exact: matrices live over Q, Q(i), or F_p, and every advertised
identity is checked with equality, not tolerances.
"""

from .errors import (
    BalanceViolated,
    BudgetExceeded,
    FiberSampleFailed,
    InvalidQuiver,
    MomentMismatch,
    NoSolution,
    NotFiniteType,
    NotSquare,
    QuiverLabError,
    RangeViolation,
    RankTooLarge,
    ReflectionUndefined,
    ShapeMismatch,
    SingularBlock,
    SingularMatrix,
    WrongField,
)
from .fields import (
    QQ,
    QQI,
    FpScalar,
    GaussianRational,
    GaussianRationalField,
    PrimeField,
    RationalField,
    field_from_name,
)
from .linalg import (
    Mat,
    SolveResult,
    block,
    column_space_basis,
    complete_to_basis,
    det,
    hstack,
    inverse,
    is_invertible,
    kernel_basis,
    random_invertible,
    random_matrix,
    rank,
    rref,
    solve_right,
    vstack,
)
from .quiver import (
    Arrow,
    CartanData,
    CorootVec,
    Dominance,
    GenericityResult,
    Quiver,
    RootVec,
    WeightVec,
    WeylElement,
    cartan_data,
    dominance,
    dot_action,
    doubled_quiver,
    dynkin_quiver,
    enumerate_weyl,
    genericity,
    is_finite_type,
    pair,
    reflect_coroot,
    reflect_weight,
    variety_dimension,
)
from .repspace import (
    DimData,
    FramedPoint,
    GroupElement,
    ParameterPair,
    VertexAB,
    assemble_ab,
    group_act,
    identity_group,
    moment_map,
    moment_map_real,
    moment_matches,
    random_group,
    sample_fiber,
)
from .paths import (
    BPathExpr,
    HomSolution,
    Intertwiner,
    OrbitDecision,
    PathExpr,
    empty_path,
    enumerate_paths,
    evaluate,
    format_bpath,
    format_path,
    hom_space,
    identity_like,
    is_intertwiner,
    lusztig_invariants,
    orbit_equivalent,
    parse_bpath,
    parse_expr,
    parse_path,
)
from .covariants import (
    BlockFamily,
    ChiData,
    ContingencyMatrix,
    basis_rank_check,
    certify_semistable,
    enumerate_S_XY,
    eval_covariant,
    eval_fS,
    eval_phi_ab,
    is_semistable_mplus,
    random_block_family,
    reachable_dims,
    validate_chi_data,
)
from .reflection import (
    CoxeterReport,
    ReductionTrace,
    ReflectionResult,
    RelationCheck,
    WordResult,
    ZReport,
    check_coxeter,
    j_embed,
    limit_project,
    reduce_to_dominant,
    reflect_point,
    reflect_word,
    verify_Z_conditions,
)
from .strata import (
    CodimReport,
    CountResult,
    StratumInfo,
    codim_report,
    count_points_Fq,
    growth_slope,
    stratum_dimension,
    v_plus,
)

__version__ = "0.1.0"
