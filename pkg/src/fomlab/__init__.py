"""Fixed-step first-order methods for decreasing the gradient norm.

Step-coefficient triangles and efficient forms of GM, FGM, OGM and OGM-G,
closed-form dual certificates with a verifier, and the tight worst-case
instances. ``fomlab.BACKEND`` reports whether the compiled kernels loaded.
"""
__version__ = "0.1.0"

from ._core import BACKEND
from .certificate import (
    DualCertificate,
    SymMatrix,
    assemble_S,
    certified_bound,
    dual_certificate,
    pep_matrices,
    verify_certificate,
)
from .engine import Trace, run_chain, run_fsfom, run_method, trace_metrics
from .errors import (
    ContractError,
    DataError,
    FomLabError,
    InternalConsistencyError,
    NumericalFailure,
    OracleInconsistencyError,
    ParameterError,
    UnsupportedError,
)
from .oracle import ProblemInstance, SmoothOracle, make_instance, radius_from_gap
from .schedule import MomentumCoeffs, ThetaSeq, momentum_coefficients, theta_sequence, verify_theta_identities
from .stepmatrix import StepSchedule, closed_form_h, column_tail_sums, step_schedule, symmetry_check
from .worstcase import WorstInstance, verify_exact_bound, worst_instance

__all__ = [name for name in dir() if not name.startswith("_")]
