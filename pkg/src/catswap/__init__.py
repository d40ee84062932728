"""Entanglement swapping over entangled coherent states.

An exact closed-form engine for superpositions of multimode coherent
states (production, swapping, photon loss, entanglement and fidelity
metrics), arbitrated by a brute-force truncated-Fock oracle, with a CLI
for parameter sweeps and closed-form audits.
"""
from .states import (
    CoherentTerm,
    DegenerateStateError,
    DyadTerm,
    MixedState,
    ModeMismatchError,
    PureState,
    coherent,
    inner,
    merge_dyads,
    merge_terms,
    norm,
    normalize,
    overlap,
    state_from_text,
    state_to_text,
    tensor,
    to_density,
    trace,
    vacuum,
)
from .optics import (
    BeamSplitterParams,
    ChannelParams,
    bs_apply,
    eta_from_distance,
    loss_apply,
)
from .protocol import (
    ChainReport,
    DegenerateProjectionError,
    QbsmOutcome,
    entangle_pair,
    odd_cat,
    qbs_state,
    qbsm_project,
    run_chain,
)
from .metrics import (
    AuditRow,
    FidelityTarget,
    audit_formulas,
    closed_form_entropy,
    closed_form_fidelity,
    entropy_ad,
    fidelity,
    fidelity_ad,
    linear_entropy,
    lossy_swap_pipeline,
    partial_trace,
    purity,
    swapped_density,
    target_for_case,
    target_state,
)
from .fock import (
    CrossCheck,
    FockDensity,
    FockState,
    MemoryBudgetError,
    TailBudgetError,
    bs_unitary,
    cross_check,
    cutoff_for,
    encode,
    fock_bs,
    fock_fidelity,
    fock_loss,
    fock_partial_trace,
    fock_purity,
    lossy_swap_report,
)

__version__ = "0.1.0"
