"""Resonant subspace engineering for bosonic Fock-state preparation.

Build rank-1 phase oracles on a truncated Fock space, reduce the dynamics to
the invariant subspace they span, and compile/optimize displacement + SNAP
sequences that prepare large Fock states and their superpositions.
"""

from .fockspace import (
    BosonicState,
    DomainError,
    FockSpace,
    coherent_state,
    fidelity,
    fock_state,
    inner,
    recommended_dim,
)
from .gates import (
    Displacement,
    GateSequence,
    Snap,
    UnitaryOperator,
    apply_sequence,
    coherent_goo,
    displacement,
    fock_goo,
    multi_fock_goo,
    rank1_phase,
    sequence_unitary,
    snap,
)

__all__ = [
    "BosonicState",
    "DomainError",
    "FockSpace",
    "coherent_state",
    "fidelity",
    "fock_state",
    "inner",
    "recommended_dim",
    "Displacement",
    "GateSequence",
    "Snap",
    "UnitaryOperator",
    "apply_sequence",
    "coherent_goo",
    "displacement",
    "fock_goo",
    "multi_fock_goo",
    "rank1_phase",
    "sequence_unitary",
    "snap",
]
