"""Continuous and discrete state-transfer protocols and their fidelity traces."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.optimize

from .fockspace import BosonicState, DomainError, fidelity
from .gates import (
    GateSequence,
    apply_gate,
    apply_sequence,
    coherent_goo,
    fock_goo,
    multi_fock_goo,
)
from .subspace import (
    ReducedHamiltonian,
    SubspaceModel,
    full_hamiltonian,
    lift_state,
    project_state,
    reduced_hamiltonian,
)

TIME_RESOLUTION = 1e-6
HORIZON_PERIODS = 5


def pre_rotation_gate(n: int) -> GateSequence:
    """exp(-i pi/2 |n><n|): multiplies the |n> amplitude by -i."""
    return fock_goo(n, math.pi / 2)


def evolve_reduced(H: ReducedHamiltonian, t: float, coords) -> np.ndarray:
    w, V = np.linalg.eigh(H.matrix)
    c = np.asarray(coords, dtype=complex)
    return V @ (np.exp(-1j * w * t) * (V.conj().T @ c))


def evolve_full(model: SubspaceModel, H: ReducedHamiltonian, t: float, state: BosonicState) -> BosonicState:
    """exp(-i H t) on the full space: the subspace part is evolved in reduced
    coordinates, the orthogonal remainder is left untouched."""
    c = project_state(model, state)
    dark = state.amplitudes - model.basis @ c
    evolved = evolve_reduced(H, t, c)
    return BosonicState(state.space, model.basis @ evolved + dark)


class SubspaceEvolver:
    """Cached eigendecomposition of the reduced generator; call with (t, state)."""

    def __init__(self, model: SubspaceModel, H: ReducedHamiltonian):
        self.model = model
        self.H = H
        self._w, self._V = np.linalg.eigh(H.matrix)
        self._basis = model.basis

    def __call__(self, t: float, state: BosonicState) -> BosonicState:
        c = self._basis.conj().T @ state.amplitudes
        dark = state.amplitudes - self._basis @ c
        ct = self._V @ (np.exp(-1j * self._w * t) * (self._V.conj().T @ c))
        return BosonicState(state.space, self._basis @ ct + dark)


class DenseEvolver:
    """exp(-i H t) from a dense eigendecomposition of the full-space operator."""

    def __init__(self, model: SubspaceModel, H: ReducedHamiltonian):
        h = full_hamiltonian(model, H.omega, H.target_weights)
        self._w, self._V = np.linalg.eigh(0.5 * (h + h.conj().T))

    def __call__(self, t: float, state: BosonicState) -> BosonicState:
        amps = self._V @ (np.exp(-1j * self._w * t) * (self._V.conj().T @ state.amplitudes))
        return BosonicState(state.space, amps)


def rabi_period(H: ReducedHamiltonian) -> float:
    w = np.linalg.eigvalsh(H.matrix)
    spread = float(w[-1] - w[0])
    return math.inf if spread == 0 else 2 * math.pi / spread


def default_horizon(H: ReducedHamiltonian) -> float:
    return HORIZON_PERIODS * rabi_period(H)


@dataclass(frozen=True)
class ContinuousProtocol:
    model: SubspaceModel
    omega: float
    target_weights: tuple
    duration: float
    pre_rotation: Optional[GateSequence] = None

    def __post_init__(self):
        if self.duration < 0:
            raise DomainError("duration must be non-negative")
        object.__setattr__(self, "target_weights", tuple(float(w) for w in np.atleast_1d(self.target_weights)))

    @property
    def hamiltonian(self) -> ReducedHamiltonian:
        return reduced_hamiltonian(self.model, self.omega, self.target_weights)

    def initial_state(self) -> BosonicState:
        ref = self.model.reference
        return apply_sequence(self.pre_rotation, ref) if self.pre_rotation else ref

    def evolver(self, method: str = "subspace"):
        if method == "subspace":
            return SubspaceEvolver(self.model, self.hamiltonian)
        if method == "dense":
            return DenseEvolver(self.model, self.hamiltonian)
        raise DomainError(f"unknown evolution method {method!r}")

    def final_state(self, method: str = "subspace") -> BosonicState:
        return self.evolver(method)(self.duration, self.initial_state())


@dataclass(frozen=True, eq=False)
class FidelityTrace:
    times: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)
    sampler: Optional[Callable[[float], float]] = field(default=None, repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.clip(np.asarray(self.values, dtype=float), 0.0, 1.0)
        if t.shape != v.shape or t.ndim != 1:
            raise DomainError("times and values must be 1-d arrays of equal length")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise DomainError("trace times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def peak(self) -> tuple[float, float]:
        i = int(np.argmax(self.values))
        return float(self.times[i]), float(self.values[i])

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "fidelity"])
        for t, v in zip(self.times, self.values):
            w.writerow([f"{t:.17g}", f"{v:.17g}"])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text


def fidelity_trace(source, initial: BosonicState, target: BosonicState, grid, metadata=None) -> FidelityTrace:
    """Sample fidelity with `target` along an evolution.

    `source` is either a callable ``(t, state) -> state`` for continuous
    evolution, or a GateSequence, in which case `grid` holds gate counts
    (0 = before any gate).
    """
    grid = np.asarray(grid)
    meta = dict(metadata or {})
    if isinstance(source, GateSequence):
        counts = grid.astype(int)
        if np.any(counts < 0) or np.any(counts > len(source)):
            raise DomainError("gate-count grid outside the sequence")
        values = []
        state, done = initial, 0
        for k in counts:
            while done < k:
                state = apply_gate(source[done], state)
                done += 1
            values.append(fidelity(target, state))
        return FidelityTrace(counts.astype(float), np.array(values), meta)

    def sample(t: float) -> float:
        return fidelity(target, source(t, initial))

    values = np.array([sample(t) for t in grid])
    return FidelityTrace(grid, values, meta, sampler=sample)


def first_passage(trace: FidelityTrace, threshold: float, resolution: float = TIME_RESOLUTION) -> Optional[float]:
    """Earliest time the trace reaches `threshold`, refined by bisection when
    the trace carries a continuous sampler."""
    hits = np.nonzero(trace.values >= threshold)[0]
    if hits.size == 0:
        return None
    i = int(hits[0])
    if i == 0 or trace.sampler is None:
        return float(trace.times[i])
    lo, hi = float(trace.times[i - 1]), float(trace.times[i])
    return float(scipy.optimize.brentq(lambda t: trace.sampler(t) - threshold, lo, hi, xtol=resolution))


def trotter_compile(alpha: complex, levels: Sequence[int], omega: float, target_weights, t: float, steps: int) -> GateSequence:
    """First-order Trotterization of exp(-i t (omega |alpha><alpha| + sum_j w_j |n_j><n_j|)).

    Each step applies the Fock oracles first, then the coherent oracle.
    """
    if steps < 1:
        raise DomainError("steps must be >= 1")
    weights = np.atleast_1d(np.asarray(target_weights, dtype=float))
    levels = list(levels)
    if len(levels) != len(weights):
        raise DomainError("one weight per target level is required")
    dt = t / steps
    step = multi_fock_goo(zip(levels, weights * dt)) + coherent_goo(alpha, omega * dt)
    return GateSequence(step.gates * steps)


def discrete_protocol(params, alpha: complex, levels: Sequence[int], final_phase: bool = True) -> GateSequence:
    """Iterations [Fock oracles b_j, coherent oracle c_j] for j = 1..N, then an
    optional trailing Fock-oracle SNAP with ``params.final_phase``."""
    levels = list(levels)
    B = np.asarray(params.B, dtype=float).reshape(params.N, -1) if params.N else np.zeros((0, len(levels)))
    if B.shape[1] != len(levels) or len(params.c) != params.N:
        raise DomainError(f"params sized for {B.shape[1]} targets, got {len(levels)} levels")
    seq = GateSequence()
    for b_row, c in zip(B, params.c):
        seq = seq + multi_fock_goo(zip(levels, b_row)) + coherent_goo(alpha, c)
    if final_phase and params.final_phase is not None:
        if len(params.final_phase) != len(levels):
            raise DomainError("final_phase must have one entry per target level")
        seq = seq + multi_fock_goo(zip(levels, params.final_phase))
    return seq
