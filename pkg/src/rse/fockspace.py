"""Truncated single-mode Fock space: states, overlaps and the truncation rule."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

NORM_TOL = 1e-9


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


@dataclass(frozen=True)
class FockSpace:
    """Fock levels |0>, ..., |dim-1>."""

    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))


@dataclass(frozen=True, eq=False)
class BosonicState:
    """Complex amplitude vector on a FockSpace.

    The amplitude array is stored read-only; derive new states instead of
    mutating.
    """

    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.dim,):
            raise DomainError(
                f"expected {self.space.dim} amplitudes, got shape {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.space.dim

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> BosonicState:
        nrm = self.norm()
        if nrm == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return BosonicState(self.space, self.amplitudes / nrm)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) < tol

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def fock_state(space: FockSpace, n: int) -> BosonicState:
    if not 0 <= n < space.dim:
        raise DomainError(f"level {n} outside Fock space of dim {space.dim}")
    amps = np.zeros(space.dim, dtype=complex)
    amps[n] = 1.0
    return BosonicState(space, amps)


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Raw coherent-state amplitudes exp(-|a|^2/2) a^n / sqrt(n!) for n < dim.

    Evaluated in the log domain so large n does not overflow. Not renormalized.
    """
    alpha = complex(alpha)
    amps = np.zeros(dim, dtype=complex)
    if alpha == 0:
        amps[0] = 1.0
        return amps
    n = np.arange(dim)
    r = abs(alpha)
    log_mod = -0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1)
    return np.exp(log_mod) * np.exp(1j * n * np.angle(alpha))


def coherent_state(space: FockSpace, alpha: complex) -> BosonicState:
    """Coherent state |alpha>, truncated to `space` and renormalized."""
    need = recommended_dim(alpha, 0)
    if space.dim < need:
        warnings.warn(
            f"dim={space.dim} is below the recommended {need} for |alpha|={abs(alpha):.4g}",
            stacklevel=2,
        )
    amps = coherent_amplitudes(alpha, space.dim)
    return BosonicState(space, amps / np.linalg.norm(amps))


def _check_same_space(a: BosonicState, b: BosonicState):
    if a.dim != b.dim:
        raise DomainError(f"dimension mismatch: {a.dim} vs {b.dim}")


def inner(a: BosonicState, b: BosonicState) -> complex:
    """<a|b>, conjugate-linear in `a`."""
    _check_same_space(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: BosonicState, b: BosonicState) -> float:
    f = abs(inner(a, b)) ** 2
    return float(min(1.0, max(0.0, f)))


def recommended_dim(alpha: complex, n_max: int) -> int:
    """Truncation rule: Poisson mean plus eight standard deviations plus 20 levels,
    and at least 25 levels of headroom above the highest addressed Fock level."""
    r = abs(alpha)
    return int(max(n_max + 25, math.ceil(r * r + 8 * r + 20)))
