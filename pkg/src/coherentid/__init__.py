"""Unambiguous identification of unknown coherent states.

Library + CLI covering four identification strategies and their
cross-checks: exact coherent-state propagation through beamsplitter
circuits with threshold photodetection, closed-form probability curves,
finite-dimensional POVM constructions with positivity certification,
truncated number-space proof that one balanced splitter is the optimal
state comparator, and the N-reference search circuit.
"""

__version__ = "0.1.0"

from .optics import (
    BeamsplitterOp,
    Circuit,
    ClickPattern,
    CoherentRegister,
    OutcomeRecord,
    apply_beamsplitter,
    build_ui2_circuit,
    classify_ui2,
    coherent_overlap_sq,
    no_click_probability,
    run_circuit,
    sample_clicks,
)
from .strategies import (
    Priors,
    mean_p_universal,
    optimize_t1,
    p_bs,
    p_idp_known,
    p_opt,
    p_sb,
    p_sbf,
    verify_ordering,
)

__all__ = [
    "__version__",
    "BeamsplitterOp",
    "Circuit",
    "ClickPattern",
    "CoherentRegister",
    "OutcomeRecord",
    "Priors",
    "apply_beamsplitter",
    "build_ui2_circuit",
    "classify_ui2",
    "coherent_overlap_sq",
    "mean_p_universal",
    "no_click_probability",
    "optimize_t1",
    "p_bs",
    "p_idp_known",
    "p_opt",
    "p_sb",
    "p_sbf",
    "run_circuit",
    "sample_clicks",
    "verify_ordering",
]
