"""csskit: closest separable / closest PPT states in Hilbert-Schmidt geometry.

Core pipeline: build or load a density matrix (:mod:`csskit.states`), run the
three-step spectral loop (:mod:`csskit.solver`) to get the closest separable
state (2x2, 2x3) or closest PPT state (any bipartition) and the minimum
squared Hilbert-Schmidt distance, then derive negativity, the tight lower
bound, and optimal witnesses (:mod:`csskit.metrics`). An independent
Gilbert-style oracle (:mod:`csskit.gilbert`) upper-bounds the distance in any
dimension, and :mod:`csskit.channels` provides the CPTP-map harness used to
probe monotonicity under local maps.
"""

from .config import ATOL, SOLVER_TOL
from .errors import (
    CsskitError,
    DegenerateBasisWarning,
    DegenerateInput,
    DimensionMismatch,
    InvalidCss,
    LengthMismatch,
    MaxIterationsExceeded,
    NoConvergence,
    NotHermitian,
    NotPSD,
    ShapeMismatch,
    StateFileError,
    StateValidationError,
    TraceNotOne,
    UnknownName,
)
from .linalg import (
    HermitianEigenDecomposition,
    herm_eig,
    hs_distance_sq,
    hs_norm,
    kron,
    matrix_abs,
    partial_trace,
    partial_transpose,
    permute_subsystems,
    rank_with_tol,
    unitary_from_hermitian,
)
from .states import (
    Bipartition,
    DensityMatrix,
    bell_state,
    ghz_state,
    load_state,
    max_mixed,
    named_state,
    random_product_pure,
    random_state,
    save_state,
    validate,
    w_state,
    werner_state,
)
from .solver import (
    CaseFormulaResult,
    CssResult,
    IterationRecord,
    VerifyReport,
    case_formula,
    closest_separable,
    min_hsd,
    verify_result,
)
from .metrics import (
    LowerBoundReport,
    SpectrumReport,
    WitnessOperator,
    build_witness,
    eval_witness,
    lower_bound,
    lower_bound_report,
    negativity,
    paper_negativity,
    probe_witness_min,
    pt_spectrum_report,
)
from .gilbert import GilbertTrace, commutator_norm, gilbert_css
from .channels import (
    ChannelSpec,
    DilationChannel,
    GellMannBasis,
    KrausChannel,
    LoccSearchReport,
    MajorizationReport,
    TransitionMatrix,
    apply_channel,
    apply_dilation,
    gell_mann,
    kraus_from_dilation,
    locc_search,
    majorization_check,
    random_unital_channel,
    transition_matrix,
    unitary_from_params,
)

__version__ = "0.1.0"
