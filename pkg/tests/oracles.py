"""Independent reference computations (mpmath, dense linear algebra).

Nothing here imports the code under test.
"""

import mpmath as mp
import numpy as np
import scipy.linalg

mp.mp.dps = 50


def poisson_pmf(k, lam):
    lam = mp.mpf(lam)
    if lam == 0:
        return mp.mpf(1) if k == 0 else mp.mpf(0)
    return mp.e ** (-lam + k * mp.log(lam) - mp.loggamma(k + 1))


def poisson_tail(kmax, lam):
    """P(X >= kmax) for X ~ Poisson(lam)."""
    return 1 - mp.fsum(poisson_pmf(k, lam) for k in range(kmax))


def gram_schmidt(vectors):
    out = []
    for v in vectors:
        w = np.array(v, dtype=complex)
        for u in out:
            w = w - np.vdot(u, w) * u
        out.append(w / np.linalg.norm(w))
    return np.stack(out, axis=1)


def expm_anti_hermitian(H, t):
    return scipy.linalg.expm(-1j * t * H)


def two_level_amplitude(mu, s, h11, h22, h12, t):
    """Target amplitude of exp(-i H t)(-i mu, s) for a real 2x2 H (closed form)."""
    mbar = 0.5 * (h11 + h22)
    d = 0.5 * (h11 - h22)
    om = np.hypot(d, h12)
    c, sn = np.cos(om * t), np.sin(om * t)
    a = (c - 1j * sn * d / om) * (-1j * mu) + (-1j * sn * h12 / om) * s
    return np.exp(-1j * mbar * t) * a


# frozen with the functions above at 50 digits
MU_100 = 0.19965218959266922          # <100|alpha=10>
PMF_100 = 0.039860996809147135        # |<100|alpha=10>|^2
OMEGA_N_100 = 0.92027800638170573     # 1 - 2 PMF_100
H11_100 = 0.96013900319085286
H12_100 = 0.19563255798186634
T_EQ5_100 = 7.0018681439993835
T_BOUND_100 = 7.8676639109224813
FIRST_PASSAGE_999_100 = 6.840197460122197
MISMATCH_PEAK_100 = 0.82098457495511548  # max over t in [0, 40], H11 = 0.8 H22
