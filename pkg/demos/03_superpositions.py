"""
Fock superpositions from a single coherent state
================================================

With K target levels the reference and targets span a (K+1)-dimensional
invariant subspace. Optimizing there is cheap, and the compiled gates act the
same way on the full truncated space.
"""

import math

import numpy as np

from rse.fockspace import BosonicState, FockSpace, coherent_state, fidelity, fock_state, recommended_dim
from rse.gates import apply_sequence
from rse.optimizer import OptimizerConfig, optimize
from rse.protocol import discrete_protocol
from rse.subspace import build_subspace, leakage

alpha = math.sqrt(88)
targets = {
    "phi1": ([(70, 0.3), (100, 0.7)], 5),
    "phi2": ([(70, 0.2), (85, 0.5), (100, 0.3)], 4),
    "phi3": ([(70, 0.1), (80, 0.3), (90, 0.4), (100, 0.2)], 3),
}

for name, (comps, N) in targets.items():
    levels = [lv for lv, _ in comps]
    space = FockSpace(recommended_dim(alpha, max(levels)))
    model = build_subspace([fock_state(space, lv) for lv in levels], coherent_state(space, alpha))
    coords = np.array([math.sqrt(w) for _, w in comps] + [0.0], dtype=complex)
    res = optimize(model, coords, N, OptimizerConfig(seed=0))
    final = apply_sequence(discrete_protocol(res.params, alpha, levels), model.reference)
    target = BosonicState(space, model.basis @ coords)
    print(f"{name}: N = {N}, F = {fidelity(target, final):.6f}, leakage = {leakage(model, final):.1e}")
    # populations on the target levels
    print("   ", {lv: round(float(final.populations()[lv]), 4) for lv in levels})
