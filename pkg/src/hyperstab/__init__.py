"""Stability certificates for discrete-time polynomial systems on hypergraphs."""

from .control import (
    ControllerSpec,
    closed_loop,
    controlled_certificate,
    eigenvalue_shift_certificate,
    make_controller,
    sign_matched_identity,
    z_identity,
)
from .dynamics import (
    Label,
    RegionSample,
    SimParams,
    Trajectory,
    Verdict,
    build_sis,
    lyapunov_trace,
    sample_region,
    simulate,
    verify_certificate,
)
from .errors import (
    ConditionViolated,
    HyperstabError,
    InputError,
    NoCommonEigenvectorError,
    PreconditionError,
    SolverError,
    UnsupportedDimensionError,
)
from .spectral import (
    ZEigenpair,
    common_perron_eigenvector,
    is_irreducible,
    perron_z_eigenpair,
    reducibility_witness,
    z_eigenpairs_oracle,
)
from .stability import (
    AttractionCertificate,
    LocalVerdict,
    Theorem,
    cubic_certificate,
    local_stability,
    positive_root,
    quadratic_certificate,
    shift_equilibrium,
    theorem1_certificate,
    theorem2_certificate,
    theorem3_certificate,
)
from .tensor_core import (
    PolySystem,
    Tensor,
    abs_tensor,
    contract,
    evaluate,
    is_supersymmetric,
    row_absolute_sum,
)

__version__ = "0.1.0"
