"""Spectra, Schatten sums and sharp Sobolev constants for Green operators
on compact Heisenberg manifolds."""

__version__ = "0.1.0"

from .errors import (
    BudgetExceeded,
    FunctionFormatError,
    HeisenspecError,
    InvalidGrid,
    InvalidR,
    InvalidUse,
    KernelIndex,
    ProbeTooSmall,
    SingularBasis,
    ValidationError,
)
from .lattice import (
    DEFAULT_BUDGET,
    LatticeBasis,
    LatticePoint,
    Shell,
    dual_lattice,
    enumerate_by_norm,
    lattice_from_jsonable,
    lattice_to_jsonable,
    make_lattice,
    minimal_vector,
    shell_count_upper_bound,
    zn_lattice,
)
from .spectrum import (
    CoalescedLine,
    EigenRecord,
    ManifoldParams,
    TypeAIndex,
    TypeBIndex,
    counting_function,
    is_kernel,
    kernel_type_a_indices,
    lambda_of,
    mu_of,
    multiplicity_of,
    spectrum_stream,
    type_a_lambda,
    type_a_multiplicity,
    type_b_lambda,
)
from .schatten import (
    Converges,
    Diverges,
    DivergenceEvidence,
    SchattenCutoffs,
    SchattenReport,
    TailBreakdown,
    divergence_witness,
    schatten_partial,
    tail_bound,
    tail_breakdown,
    witness_growth_prediction,
    witness_slope_constant,
)
from .green import (
    Bounded,
    ConstantReport,
    GainCheck,
    SpectralFunction,
    SpectralTerm,
    Unbounded,
    closed_form_constant,
    function_from_jsonable,
    function_to_jsonable,
    green_apply,
    l2_norm,
    monotonicity_check,
    operator_apply,
    ratio,
    ratio_bounded_verdict,
    scale,
    sharp_constant,
    sobolev_gain_check,
    sobolev_norm,
    validate_function,
)
