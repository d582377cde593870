"""Operator-induced semi-distances on complex projective space and tools to
test whether they satisfy the triangle inequality."""
from .distmat import (
    DistanceMatrix,
    NotEmbeddable,
    PointCloud,
    StructureError,
    Validity,
    delta_product,
    embed_points,
    from_points,
    hadamard_power,
    schoenberg_gram,
    validate,
)
from .harness import (
    SearchReport,
    TrialConfig,
    linf_distance_matrix,
    random_distance_matrix,
    reproduce_table,
    run_search,
)
from .semimetrics import (
    NotPSDError,
    WedgeOperatorQ,
    cost_matrix,
    hs_distance,
    pure_state_cost,
    semidistance,
)
from .triangular import (
    CriterionReport,
    DeficitRecord,
    Method,
    SingularConfigurationError,
    Verdict,
    certify_sufficient,
    check_3d_criterion,
    cone_combine,
    conjugate_local,
    criterion_witness,
    deficit,
    deficit_gradient,
    extreme_ray_n3,
    minimize_deficit,
    mu_closed_form_n3,
    permute_wedge_basis,
    restriction,
    sample_triples_test,
    stationarity_residual,
)
from .trig_lemma import F_eval, TrigParams, omega_closed_form, omega_min
from .wedge import (
    DimensionError,
    PairIndexMap,
    RankDeficiencyError,
    bivector_vee,
    compound2,
    gram_schmidt,
    haar_random_state,
    haar_unitary,
    inner,
    pair_map,
    vee_apply,
    wedge,
)

__version__ = "0.1.0"
