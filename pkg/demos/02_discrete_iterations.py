"""
Few-iteration preparation with displacement and SNAP gates
==========================================================

Optimize the oracle angles in the two-dimensional subspace, then compile the
result into an explicit gate list and check it in the full Fock space.
"""

import math

from rse.fockspace import FockSpace, coherent_state, fidelity, fock_state, recommended_dim
from rse.gates import apply_sequence
from rse.optimizer import OptimizerConfig, minimal_iterations
from rse.protocol import discrete_protocol
from rse.subspace import build_subspace

for n in (100, 380):
    alpha = math.sqrt(n)
    space = FockSpace(recommended_dim(alpha, n))
    model = build_subspace([fock_state(space, n)], coherent_state(space, alpha))
    N, res = minimal_iterations(model, [1, 0], 7, 0.995, OptimizerConfig(seed=0))
    seq = discrete_protocol(res.params, alpha, [n])
    f_full = fidelity(fock_state(space, n), apply_sequence(seq, model.reference))
    print(f"|{n}>: N = {N}, reduced F = {res.fidelity:.8f}, full-space F = {f_full:.8f}, gates = {seq.counts()}")

# The gate list is plain text, one gate per line.
print(seq.to_text()[:200])
