"""Displacement and SNAP primitives, rank-1 phase oracles, and gate sequences.

Conventions
-----------
* A rank-1 phase oracle ``O(psi, phi) = exp(-i phi |psi><psi|)`` multiplies the
  ``psi`` component by ``exp(-i phi)``.
* A SNAP gate stores phases ``theta_n`` with ``U = sum_n exp(i theta_n) |n><n|``,
  so the Fock oracle ``O(|n>, phi)`` is ``Snap({n: -phi})``.
* A :class:`GateSequence` is applied left to right: ``gates[0]`` acts first.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

import numpy as np
import scipy.linalg

from .fockspace import NORM_TOL, BosonicState, DomainError, FockSpace

UNITARITY_TOL = 1e-10


def wrap_phase(x: float) -> float:
    """Map an angle onto (-pi, pi]. Values already in range are returned unchanged."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"phase must be finite, got {x}")
    if -math.pi < x <= math.pi:
        return x
    y = math.remainder(x, 2 * math.pi)
    if y <= -math.pi:
        y += 2 * math.pi
    return y


def wrap_phases(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    return np.vectorize(wrap_phase, otypes=[float])(arr) if arr.size else arr.copy()


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise DomainError(f"matrix shape {m.shape} does not match dim {self.space.dim}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def unitarity_error(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.space.dim))))

    def is_unitary(self, tol: float = UNITARITY_TOL) -> bool:
        return self.unitarity_error() < tol

    def apply(self, state: BosonicState) -> BosonicState:
        if state.dim != self.space.dim:
            raise DomainError(f"dimension mismatch: {state.dim} vs {self.space.dim}")
        return BosonicState(self.space, self.matrix @ state.amplitudes)

    def dagger(self) -> UnitaryOperator:
        return UnitaryOperator(self.space, self.matrix.conj().T)

    def __matmul__(self, other: UnitaryOperator) -> UnitaryOperator:
        if other.space.dim != self.space.dim:
            raise DomainError("dimension mismatch")
        return UnitaryOperator(self.space, self.matrix @ other.matrix)


@dataclass(frozen=True)
class Displacement:
    amplitude: complex

    def __post_init__(self):
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    def max_level(self) -> int:
        return -1


@dataclass(frozen=True)
class Snap:
    """Diagonal phase gate; ``phases`` is a tuple of ``(level, theta)`` pairs
    sorted by level, with theta wrapped to (-pi, pi]."""

    phases: tuple = ()

    def __post_init__(self):
        pairs = [(int(n), wrap_phase(p)) for n, p in self.phases]
        levels = [n for n, _ in pairs]
        if len(set(levels)) != len(levels):
            raise DomainError(f"duplicate SNAP levels in {levels}")
        if any(n < 0 for n in levels):
            raise DomainError("SNAP levels must be non-negative")
        object.__setattr__(self, "phases", tuple(sorted(pairs)))

    def max_level(self) -> int:
        return max((n for n, _ in self.phases), default=-1)

    def compose(self, other: Snap) -> Snap:
        """SNAP equal to applying ``self`` then ``other`` (phases add)."""
        acc = dict(self.phases)
        for n, p in other.phases:
            acc[n] = acc.get(n, 0.0) + p
        return Snap(tuple(acc.items()))


Gate = Union[Displacement, Snap]


@dataclass(frozen=True)
class GateSequence:
    gates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        gates = tuple(self.gates)
        for g in gates:
            if not isinstance(g, (Displacement, Snap)):
                raise DomainError(f"not a primitive gate: {g!r}")
        object.__setattr__(self, "gates", gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __getitem__(self, idx):
        out = self.gates[idx]
        return GateSequence(out) if isinstance(idx, slice) else out

    def __add__(self, other: GateSequence) -> GateSequence:
        return GateSequence(self.gates + tuple(other.gates))

    def max_level(self) -> int:
        return max((g.max_level() for g in self.gates), default=-1)

    def counts(self) -> dict:
        return {
            "displacement": sum(isinstance(g, Displacement) for g in self.gates),
            "snap": sum(isinstance(g, Snap) for g in self.gates),
        }

    def to_text(self) -> str:
        return "".join(line + "\n" for line in map(format_gate, self.gates))

    @classmethod
    def from_text(cls, text: str) -> GateSequence:
        return cls(tuple(parse_gate(line) for line in text.splitlines() if line.strip()))


def format_gate(gate: Gate) -> str:
    if isinstance(gate, Displacement):
        a = gate.amplitude + 0.0  # drops negative zeros
        return f"D {a.real:.17g} {a.imag:.17g}"
    body = ",".join(f"{n}:{p:.17g}" for n, p in gate.phases)
    return f"SNAP {body}" if body else "SNAP"


_SNAP_ITEM = re.compile(r"^\s*(\d+)\s*:\s*(\S+)\s*$")


def parse_gate(line: str) -> Gate:
    parts = line.split(None, 1)
    head = parts[0]
    rest = parts[1].strip() if len(parts) > 1 else ""
    if head == "D":
        try:
            re_, im_ = (float(v) for v in rest.split())
        except ValueError:
            raise DomainError(f"malformed displacement line: {line!r}") from None
        return Displacement(complex(re_, im_))
    if head == "SNAP":
        pairs = []
        for item in filter(None, (s.strip() for s in rest.split(","))):
            m = _SNAP_ITEM.match(item)
            if not m:
                raise DomainError(f"malformed SNAP entry {item!r}")
            pairs.append((int(m.group(1)), float(m.group(2))))
        return Snap(tuple(pairs))
    raise DomainError(f"unknown gate {head!r}")


def annihilation(space: FockSpace) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, space.dim, dtype=float)), 1).astype(complex)


@lru_cache(maxsize=64)
def _displacement_matrix(dim: int, alpha: complex) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
    gen = alpha * a.T - np.conj(alpha) * a
    mat = scipy.linalg.expm(gen)
    mat.setflags(write=False)
    return mat


def displacement(space: FockSpace, alpha: complex) -> UnitaryOperator:
    """exp(alpha a^dag - alpha^* a) with the generator truncated to `space`."""
    alpha = complex(alpha)
    if alpha == 0:
        return UnitaryOperator(space, np.eye(space.dim))
    return UnitaryOperator(space, _displacement_matrix(space.dim, alpha))


def snap_diagonal(space: FockSpace, phase_map) -> np.ndarray:
    pairs = phase_map.phases if isinstance(phase_map, Snap) else Snap(tuple(phase_map)).phases
    diag = np.ones(space.dim, dtype=complex)
    for n, theta in pairs:
        if n >= space.dim:
            raise DomainError(f"SNAP level {n} outside Fock space of dim {space.dim}")
        diag[n] = np.exp(1j * theta)
    return diag


def snap(space: FockSpace, phase_map) -> UnitaryOperator:
    """Diagonal unitary with exp(i theta_n) on each listed level."""
    return UnitaryOperator(space, np.diag(snap_diagonal(space, phase_map)))


def rank1_phase(psi: BosonicState, phi: float) -> UnitaryOperator:
    """exp(-i phi |psi><psi|) = I + (exp(-i phi) - 1) |psi><psi| for normalized psi."""
    if not psi.is_normalized(NORM_TOL):
        raise DomainError(f"oracle state must be normalized (norm={psi.norm():.12g})")
    v = psi.amplitudes
    mat = np.eye(psi.dim, dtype=complex) + (np.exp(-1j * phi) - 1.0) * np.outer(v, v.conj())
    return UnitaryOperator(psi.space, mat)


def apply_rank1_phase(psi: BosonicState, phi: float, state: BosonicState) -> BosonicState:
    """Matrix-free action of exp(-i phi |psi><psi|) on `state`."""
    if psi.dim != state.dim:
        raise DomainError(f"dimension mismatch: {psi.dim} vs {state.dim}")
    v = psi.amplitudes
    amps = state.amplitudes + (np.exp(-1j * phi) - 1.0) * np.vdot(v, state.amplitudes) * v
    return BosonicState(state.space, amps)


def fock_goo(n: int, phi: float) -> GateSequence:
    return GateSequence((Snap(((n, -phi),)),))


def multi_fock_goo(pairs: Iterable[tuple[int, float]]) -> GateSequence:
    """Product of commuting Fock oracles as one SNAP."""
    return GateSequence((Snap(tuple((n, -phi) for n, phi in pairs)),))


def coherent_goo(alpha: complex, phi: float) -> GateSequence:
    """D(alpha) O(|0>, phi) D(-alpha), listed in application order."""
    return GateSequence((Displacement(-complex(alpha)), Snap(((0, -phi),)), Displacement(alpha)))


def _check_levels(seq: GateSequence, space: FockSpace):
    if seq.max_level() >= space.dim:
        raise DomainError(f"sequence addresses level {seq.max_level()} beyond dim {space.dim}")


def gate_unitary(gate: Gate, space: FockSpace) -> UnitaryOperator:
    if isinstance(gate, Displacement):
        return displacement(space, gate.amplitude)
    return snap(space, gate)


def sequence_unitary(seq: GateSequence, space: FockSpace) -> UnitaryOperator:
    _check_levels(seq, space)
    mat = np.eye(space.dim, dtype=complex)
    for g in seq:
        if isinstance(g, Snap):
            mat = snap_diagonal(space, g)[:, None] * mat
        else:
            mat = displacement(space, g.amplitude).matrix @ mat
    return UnitaryOperator(space, mat)


def apply_gate(gate: Gate, state: BosonicState) -> BosonicState:
    space = state.space
    if isinstance(gate, Snap):
        if gate.max_level() >= space.dim:
            raise DomainError(f"SNAP level {gate.max_level()} beyond dim {space.dim}")
        return BosonicState(space, snap_diagonal(space, gate) * state.amplitudes)
    return displacement(space, gate.amplitude).apply(state)


def apply_sequence(seq: GateSequence | Sequence[Gate], state: BosonicState) -> BosonicState:
    for g in seq:
        state = apply_gate(g, state)
    return state
