"""Linear algebra over the max-times semiring on nonnegative reals."""

from .dynamics import (
    CommonEigenbasis,
    OracleTrace,
    PeriodicPoint,
    PeriodReport,
    PowerLimit,
    TwoMatrixLimit,
    Word,
    boolean_period,
    check_coherence,
    common_eigenbasis,
    commuting_word_limit,
    elsner_period,
    lc_limit,
    oracle_iterate,
    periodic_point,
    power_limit,
    step_cap,
    two_matrix_boolean_limit,
    word_product,
)
from .errors import (
    DimensionError,
    InconclusiveError,
    IterationCancelled,
    MaxAlgebraError,
    ParseError,
    PreconditionError,
)
from .graphstruct import (
    Digraph,
    FrobeniusForm,
    apply_permutation,
    block,
    communication_classes,
    frobenius_form,
    is_block_upper_triangular,
    is_irreducible,
    strongly_connected_components,
    to_digraph,
)
from .maxcore import (
    EXACT_TOL,
    STRUCT_TOL,
    MaxMatrix,
    allclose,
    bool_residual_split,
    diag_nilpotent_split,
    kleene_star,
    max_add,
    max_apply,
    max_mul,
    max_pow,
)
from .spectral import (
    CommutingReport,
    CriticalGraph,
    SpectralReport,
    check_commuting_mu,
    critical_graph,
    dad_scale,
    is_eigenpair,
    mu,
    mu_bounds,
    principal_eigenvector,
    spectrum,
)

__version__ = "0.1.0"
