"""Invariant subspace spanned by orthonormal targets and a reference state.

The basis is ordered ``[targets..., complement]`` where the complement is the
normalized part of the reference orthogonal to every target. Any Hamiltonian
``phi_0 |ref><ref| + sum_k phi_k |t_k><t_k|`` acts inside this span, so the
full-space dynamics reduce exactly to a (K+1)-dimensional matrix problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .fockspace import NORM_TOL, BosonicState, DomainError, FockSpace

ORTHO_TOL = 1e-8
OVERLAP_FLOOR = 1e-8
DEGENERACY_MARGIN = 1e-10


class UnreachableTargetError(DomainError):
    """A target has (numerically) zero overlap with the reference state."""


class DegenerateSubspaceError(DomainError):
    """The reference lies inside the span of the targets."""


@dataclass(frozen=True, eq=False)
class SubspaceModel:
    space: FockSpace
    targets: tuple
    reference: BosonicState
    overlaps: np.ndarray
    complement: BosonicState

    @property
    def K(self) -> int:
        return len(self.targets)

    @property
    def complement_weight(self) -> float:
        """sqrt(1 - sum |mu_k|^2), the reference amplitude on the complement."""
        return math.sqrt(max(0.0, 1.0 - float(np.sum(np.abs(self.overlaps) ** 2))))

    @property
    def theta(self) -> float:
        if self.K != 1:
            raise DomainError("theta is defined for a single target only")
        return float(np.angle(self.overlaps[0]))

    @property
    def basis(self) -> np.ndarray:
        """dim x (K+1) matrix whose columns are the orthonormal basis vectors."""
        cols = [t.amplitudes for t in self.targets] + [self.complement.amplitudes]
        return np.stack(cols, axis=1)

    @property
    def reference_coords(self) -> np.ndarray:
        return np.append(self.overlaps, self.complement_weight).astype(complex)


def build_subspace(targets: Sequence[BosonicState], reference: BosonicState) -> SubspaceModel:
    targets = tuple(targets)
    if not targets:
        raise DomainError("at least one target is required")
    space = reference.space
    if not reference.is_normalized(NORM_TOL):
        raise DomainError("reference state must be normalized")
    for t in targets:
        if t.dim != space.dim:
            raise DomainError(f"dimension mismatch: {t.dim} vs {space.dim}")
    tmat = np.stack([t.amplitudes for t in targets], axis=1)
    gram = tmat.conj().T @ tmat
    if np.max(np.abs(gram - np.eye(len(targets)))) > ORTHO_TOL:
        raise DomainError("targets are not orthonormal")

    mu = tmat.conj().T @ reference.amplitudes
    for k, m in enumerate(mu):
        if abs(m) <= OVERLAP_FLOOR:
            raise UnreachableTargetError(
                f"target {k} has overlap {abs(m):.3g} with the reference (floor {OVERLAP_FLOOR})"
            )
    in_span = float(np.sum(np.abs(mu) ** 2))
    if in_span >= 1.0 - DEGENERACY_MARGIN:
        raise DegenerateSubspaceError(f"reference lies in the target span (weight {in_span:.12g})")

    rest = reference.amplitudes - tmat @ mu
    # re-orthogonalize once against rounding in the projection
    rest = rest - tmat @ (tmat.conj().T @ rest)
    complement = BosonicState(space, rest / math.sqrt(1.0 - in_span))
    mu = np.array(mu, dtype=complex)
    mu.setflags(write=False)
    return SubspaceModel(space, targets, reference, mu, complement)


@dataclass(frozen=True, eq=False)
class ReducedHamiltonian:
    """Reduced generator in the model basis; ``omega`` weighs the reference
    projector and ``target_weights`` the target projectors."""

    matrix: np.ndarray
    omega: float
    target_weights: tuple

    @property
    def h11(self) -> float:
        return float(self.matrix[0, 0].real)

    @property
    def h22(self) -> float:
        return float(self.matrix[-1, -1].real)

    @property
    def h12(self) -> complex:
        return complex(self.matrix[0, -1])

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


def reduced_hamiltonian(model: SubspaceModel, omega: float, target_weights) -> ReducedHamiltonian:
    """Project omega |ref><ref| + sum_k w_k |t_k><t_k| onto the model basis."""
    w = np.atleast_1d(np.asarray(target_weights, dtype=float))
    if w.shape != (model.K,):
        raise DomainError(f"expected {model.K} target weights, got {w.shape}")
    v = model.reference_coords
    mat = omega * np.outer(v, v.conj())
    mat[np.arange(model.K), np.arange(model.K)] += w
    # exact hermitian symmetrization of the rank-1 term
    mat = 0.5 * (mat + mat.conj().T)
    mat.setflags(write=False)
    return ReducedHamiltonian(mat, float(omega), tuple(float(x) for x in w))


def full_hamiltonian(model: SubspaceModel, omega: float, target_weights) -> np.ndarray:
    """Dense dim x dim operator; used for cross-checks against the reduced form."""
    w = np.atleast_1d(np.asarray(target_weights, dtype=float))
    r = model.reference.amplitudes
    h = omega * np.outer(r, r.conj())
    for wk, t in zip(w, model.targets):
        h = h + wk * np.outer(t.amplitudes, t.amplitudes.conj())
    return h


def resonance_weights(model: SubspaceModel, omega: float) -> float:
    """Target weight that equalizes the two diagonal entries: omega (1 - 2|mu|^2)."""
    if model.K != 1:
        raise NotImplementedError("closed-form resonance only for a single target")
    return float(omega * (1.0 - 2.0 * abs(model.overlaps[0]) ** 2))


def phase_matching_mismatch(model: SubspaceModel, H: ReducedHamiltonian) -> float:
    """arg(H_12) - theta - pi/2 wrapped to (-pi, pi]; zero when matched."""
    if model.K != 1:
        raise NotImplementedError("phase matching is defined for a single target")
    if abs(H.h12) == 0.0:
        raise DomainError("coupling H_12 vanishes; its phase is undefined")
    d = math.remainder(np.angle(H.h12) - model.theta - math.pi / 2, 2 * math.pi)
    return d + 2 * math.pi if d <= -math.pi else d


class TransferTime(NamedTuple):
    time: float
    bound: float


def transfer_time(model: SubspaceModel, H: ReducedHamiltonian) -> TransferTime:
    """Resonant transfer time arccos|mu| / |H_12| and the bound pi / (2 omega |mu|)."""
    if model.K != 1:
        raise NotImplementedError("transfer time is defined for a single target")
    h12 = abs(H.h12)
    if abs(H.h11 - H.h22) >= 1e-9 * h12:
        raise DomainError(
            f"resonance violated: H11 - H22 = {H.h11 - H.h22:.3g}, |H12| = {h12:.3g}"
        )
    mu = abs(model.overlaps[0])
    return TransferTime(math.acos(min(1.0, mu)) / h12, float(math.pi / (2 * abs(H.omega) * mu)))


def project_state(model: SubspaceModel, state: BosonicState) -> np.ndarray:
    if state.dim != model.space.dim:
        raise DomainError(f"dimension mismatch: {state.dim} vs {model.space.dim}")
    return model.basis.conj().T @ state.amplitudes


def lift_state(model: SubspaceModel, coords) -> BosonicState:
    coords = np.asarray(coords, dtype=complex)
    if coords.shape != (model.K + 1,):
        raise DomainError(f"expected {model.K + 1} coordinates, got {coords.shape}")
    return BosonicState(model.space, model.basis @ coords)


def leakage(model: SubspaceModel, state: BosonicState) -> float:
    """Population of `state` outside the model subspace."""
    c = project_state(model, state)
    return max(0.0, float(state.norm() ** 2 - np.sum(np.abs(c) ** 2)))
