"""
How the transfer time grows with photon number
==============================================

With alpha = sqrt(n) the overlap falls off like n^(-1/4), and so does the
coupling, so the transfer time grows only as a quarter power.
"""

import math

import numpy as np

from rse.fockspace import FockSpace, coherent_state, fock_state, recommended_dim
from rse.optimizer import fit_scaling_exponent
from rse.subspace import build_subspace, reduced_hamiltonian, resonance_weights, transfer_time
from rse.svg import emit_svg

ns = np.arange(16, 401, 8)
T, bound = [], []
for n in ns:
    a = math.sqrt(n)
    space = FockSpace(recommended_dim(a, int(n)))
    model = build_subspace([fock_state(space, int(n))], coherent_state(space, a))
    tt = transfer_time(model, reduced_hamiltonian(model, 1.0, [resonance_weights(model, 1.0)]))
    T.append(tt.time)
    bound.append(tt.bound)

print("exponent of T(n):     ", fit_scaling_exponent(list(zip(ns, T)))[0])
print("exponent of the bound:", fit_scaling_exponent(list(zip(ns, bound)))[0])
emit_svg({"T": (ns, T), "bound": (ns, bound)}, "scaling.svg", title="transfer time", xlabel="n", ylabel="T")
