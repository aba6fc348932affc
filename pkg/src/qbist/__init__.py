"""SIC-POVM probability representation of quantum states and the geometry of QBist state spaces."""

from .sic_core import (
    Fiducial,
    GramReport,
    SearchFailure,
    SicError,
    SicSystem,
    known_fiducial,
    orbit,
    search_fiducial,
    verify_sic,
    wh_displacement,
)
from .representation import (
    born_rule,
    caratheodory_decompose,
    conditional_matrix,
    positivity_check,
    probs_to_state,
    purity_conditions,
    quadratic_fixed_point,
    state_to_probs,
    structure_constants,
    total_probability,
    trace_inner_from_probs,
)

__version__ = "0.1.0"
