"""Angle optimization for discrete oracle sequences inside the invariant subspace.

An iteration ``j`` acts on reduced coordinates as ``R(c_j) D(b_j)``, where
``D(b) = diag(exp(-i b_1), ..., exp(-i b_K), 1)`` are the Fock oracles and
``R(c) = I + (exp(-i c) - 1) v v^dag`` is the reference oracle with
``v = project(reference)``. Because everything stays in the (K+1)-dimensional
span, each objective evaluation costs O(N K^2) regardless of the photon
numbers involved.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.optimize

from .fockspace import DomainError
from .gates import wrap_phases
from .subspace import SubspaceModel

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ProtocolParams:
    c: np.ndarray
    B: np.ndarray
    final_phase: Optional[np.ndarray] = None

    def __post_init__(self):
        c = wrap_phases(np.atleast_1d(np.asarray(self.c, dtype=float)).ravel())
        B = np.asarray(self.B, dtype=float)
        if len(c):
            B = B.reshape(len(c), -1)
        else:
            B = B.reshape(0, B.shape[-1] if B.ndim == 2 else 0)
        B = wrap_phases(B)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "B", B)
        if self.final_phase is not None:
            object.__setattr__(self, "final_phase", wrap_phases(np.atleast_1d(np.asarray(self.final_phase, dtype=float))))

    @property
    def N(self) -> int:
        return len(self.c)

    @property
    def K(self) -> int:
        return self.B.shape[1]

    @classmethod
    def zeros(cls, N: int, K: int, final_phase: bool = False) -> ProtocolParams:
        return cls(np.zeros(N), np.zeros((N, K)), np.zeros(K) if final_phase else None)

    def to_vector(self) -> np.ndarray:
        parts = [self.c, self.B.ravel()]
        if self.final_phase is not None:
            parts.append(self.final_phase)
        return np.concatenate(parts)

    @classmethod
    def from_vector(cls, x, N: int, K: int, final_phase: bool) -> ProtocolParams:
        x = np.asarray(x, dtype=float)
        expected = N + N * K + (K if final_phase else 0)
        if x.shape != (expected,):
            raise DomainError(f"expected {expected} angles, got {x.shape}")
        fp = x[N + N * K:] if final_phase else None
        return cls(x[:N], x[N:N + N * K].reshape(N, K), fp)

    def to_dict(self, achieved_fidelity: Optional[float] = None, seed: Optional[int] = None) -> dict:
        return {
            "N": self.N,
            "c": [float(v) for v in self.c],
            "B": [[float(v) for v in row] for row in self.B],
            "final_phase": None if self.final_phase is None else [float(v) for v in self.final_phase],
            "achieved_fidelity": achieved_fidelity,
            "seed": seed,
        }

    def to_json(self, achieved_fidelity=None, seed=None) -> str:
        return json.dumps(self.to_dict(achieved_fidelity, seed), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> ProtocolParams:
        N = int(d["N"])
        c = np.asarray(d["c"], dtype=float)
        B = np.asarray(d["B"], dtype=float)
        if len(c) != N or (N and B.shape[0] != N):
            raise DomainError("record N does not match c/B sizes")
        fp = d.get("final_phase")
        return cls(c, B.reshape(N, -1) if N else B.reshape(0, 0), None if fp is None else np.asarray(fp, dtype=float))

    @classmethod
    def from_json(cls, text: str) -> ProtocolParams:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    max_evals: int = 2000
    tol: float = 1e-12
    seed: int = 0
    stop_fidelity: Optional[float] = None
    final_phase: Optional[bool] = None  # default: on for K > 1

    def __post_init__(self):
        if self.restarts < 1:
            raise DomainError("restarts must be positive")


def _check_target(model: SubspaceModel, target_coords) -> np.ndarray:
    t = np.asarray(target_coords, dtype=complex)
    if t.shape != (model.K + 1,):
        raise DomainError(f"target needs {model.K + 1} coordinates, got {t.shape}")
    if abs(np.linalg.norm(t) - 1.0) > 1e-9:
        raise DomainError("target coordinates must be normalized")
    return t


def _check_params(params: ProtocolParams, model: SubspaceModel):
    if params.N and params.K != model.K:
        raise DomainError(f"params carry {params.K} Fock phases per iteration, model has K={model.K}")
    if params.final_phase is not None and len(params.final_phase) != model.K:
        raise DomainError("final_phase must have K entries")


class _Problem:
    """Objective and adjoint gradient for fixed (model, target, N)."""

    def __init__(self, model: SubspaceModel, target, N: int, final_phase: bool):
        self.v = model.reference_coords
        self.t = _check_target(model, target)
        self.K = model.K
        self.N = N
        self.final_phase = final_phase

    def unpack(self, x):
        N, K = self.N, self.K
        c = x[:N]
        B = x[N:N + N * K].reshape(N, K)
        f = x[N + N * K:] if self.final_phase else None
        return c, B, f

    def _diag(self, b):
        return np.append(np.exp(-1j * b), 1.0)

    def forward(self, x):
        c, B, f = self.unpack(x)
        v = self.v
        states = [v]
        psi = v
        for j in range(self.N):
            phi = self._diag(B[j]) * psi
            psi = phi + (np.exp(-1j * c[j]) - 1.0) * np.vdot(v, phi) * v
            states.append(psi)
        out = psi if f is None else self._diag(f) * psi
        return states, out

    def amplitude(self, x) -> complex:
        return complex(np.vdot(self.t, self.forward(x)[1]))

    def value(self, x) -> float:
        return abs(self.amplitude(x)) ** 2

    def value_and_grad(self, x):
        c, B, f = self.unpack(x)
        v, K = self.v, self.K
        states, out = self.forward(x)
        A = complex(np.vdot(self.t, out))
        gc = np.zeros(self.N)
        gB = np.zeros((self.N, K))
        gf = None
        # costate lam satisfies A = <lam | psi_j> after iteration j
        lam = self.t.copy()
        if f is not None:
            d = self._diag(f)
            psiN = states[-1]
            dA = -1j * np.conj(self.t[:K]) * d[:K] * psiN[:K]
            gf = 2.0 * np.real(np.conj(A) * dA)
            lam = np.conj(d) * lam
        for j in range(self.N - 1, -1, -1):
            psi_prev = states[j]
            phi = self._diag(B[j]) * psi_prev
            e = np.exp(-1j * c[j])
            # d/dc of R(c) is -i e v v^dag
            dA_c = -1j * e * np.vdot(lam, v) * np.vdot(v, phi)
            gc[j] = 2.0 * np.real(np.conj(A) * dA_c)
            mu = lam + (np.conj(e) - 1.0) * np.vdot(v, lam) * v  # R(c)^dag lam
            dA_b = -1j * np.conj(mu[:K]) * phi[:K]
            gB[j] = 2.0 * np.real(np.conj(A) * dA_b)
            lam = np.conj(self._diag(B[j])) * mu
        parts = [gc, gB.ravel()]
        if gf is not None:
            parts.append(gf)
        return abs(A) ** 2, np.concatenate(parts)


def reduced_objective(params: ProtocolParams, model: SubspaceModel, target_coords) -> float:
    """|<target| U_seq |reference>|^2 evaluated in reduced coordinates."""
    _check_params(params, model)
    prob = _Problem(model, target_coords, params.N, params.final_phase is not None)
    return float(min(1.0, max(0.0, prob.value(params.to_vector()))))


def objective_gradient(params: ProtocolParams, model: SubspaceModel, target_coords) -> np.ndarray:
    """Analytic gradient, ordered as ``params.to_vector()``: c, B row-major, final_phase."""
    _check_params(params, model)
    prob = _Problem(model, target_coords, params.N, params.final_phase is not None)
    return prob.value_and_grad(params.to_vector())[1]


@dataclass(frozen=True)
class OptimizationResult:
    params: ProtocolParams
    fidelity: float
    restart: int
    evaluations: int

    def __iter__(self):
        yield self.params
        yield self.fidelity


def _local_search(prob: _Problem, x0, config: OptimizerConfig):
    def neg(x):
        val, g = prob.value_and_grad(x)
        return -val, -g

    res = scipy.optimize.minimize(
        neg, x0, jac=True, method="L-BFGS-B",
        options={"maxfun": config.max_evals, "ftol": config.tol, "gtol": 1e-12},
    )
    x, fval, nev = res.x, -res.fun, res.nfev
    # a stalled gradient search gets a derivative-free polish
    if 1.0 - fval > 1e-6 and nev < config.max_evals:
        nm = scipy.optimize.minimize(
            lambda y: -prob.value(y), x, method="Nelder-Mead",
            options={"maxfev": config.max_evals - nev, "xatol": 1e-10, "fatol": config.tol},
        )
        nev += nm.nfev
        if -nm.fun > fval:
            x, fval = nm.x, -nm.fun
    return x, fval, nev


def optimize(model: SubspaceModel, target_coords, N: int, config: OptimizerConfig = OptimizerConfig()) -> OptimizationResult:
    """Multi-start maximization of the reduced fidelity over N iterations.

    Restart 0 starts from the Grover point (all angles pi); the others draw
    angles uniformly from (-pi, pi]. Ties keep the lowest restart index.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    use_fp = config.final_phase if config.final_phase is not None else model.K > 1
    prob = _Problem(model, target_coords, N, use_fp)
    n_angles = N + N * model.K + (model.K if use_fp else 0)
    rng = np.random.default_rng(config.seed)
    best = None
    evaluations = 0
    for r in range(config.restarts):
        if r == 0:
            x0 = np.full(n_angles, math.pi)
            if use_fp:
                x0[N + N * model.K:] = 0.0
        else:
            x0 = -rng.uniform(-math.pi, math.pi, n_angles)
        x, fval, nev = _local_search(prob, x0, config)
        evaluations += nev
        fval = float(min(1.0, max(0.0, prob.value(x))))
        if best is None or fval > best[1]:
            best = (x, fval, r)
        if config.stop_fidelity is not None and best[1] >= config.stop_fidelity:
            break
    x, fval, r = best
    params = ProtocolParams.from_vector(wrap_phases(x), N, model.K, use_fp)
    log.debug("optimize N=%d: fidelity %.12f at restart %d (%d evals)", N, fval, r, evaluations)
    return OptimizationResult(params, fval, r, evaluations)


def minimal_iterations(model: SubspaceModel, target_coords, N_max: int, F_threshold: float,
                       config: OptimizerConfig = OptimizerConfig()):
    """Smallest N <= N_max whose optimized fidelity reaches F_threshold.

    Returns ``(N, result)`` or ``(None, best_result_seen)``.
    """
    if N_max < 1:
        raise DomainError("N_max must be >= 1")
    cfg = OptimizerConfig(config.restarts, config.max_evals, config.tol, config.seed,
                          F_threshold, config.final_phase)
    last = None
    for N in range(1, N_max + 1):
        res = optimize(model, target_coords, N, cfg)
        if res.fidelity >= F_threshold:
            return N, res
        last = res
    return None, last


def fit_scaling_exponent(pairs: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares slope and intercept of log(value) against log(n)."""
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 3 or arr.shape[1] != 2:
        raise DomainError("need at least three (n, value) pairs")
    n, y = arr[:, 0], arr[:, 1]
    if np.any(n < 1) or np.any(y <= 0):
        raise DomainError("n must be >= 1 and values positive")
    if np.ptp(n) == 0:
        raise DomainError("all n are equal; slope is undefined")
    slope, intercept = np.polyfit(np.log(n), np.log(y), 1)
    return float(slope), float(intercept)
