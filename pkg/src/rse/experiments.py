"""Experiment runners behind the command-line harness.

Each runner takes an :class:`ExperimentConfig`, writes its artifacts under
``config.out`` and returns a JSON-serializable summary.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np

from .fockspace import BosonicState, DomainError, FockSpace, coherent_state, fidelity, fock_state, recommended_dim
from .gates import GateSequence, apply_sequence
from .optimizer import OptimizerConfig, ProtocolParams, fit_scaling_exponent, minimal_iterations, optimize
from .protocol import (
    ContinuousProtocol,
    discrete_protocol,
    fidelity_trace,
    first_passage,
    pre_rotation_gate,
)
from .subspace import build_subspace, reduced_hamiltonian, resonance_weights, transfer_time

DEFAULT_SCALING_NS = (16, 25, 50, 100, 200, 400)


@dataclass
class ExperimentConfig:
    kind: str = "trace"
    n: int = 100
    components: Optional[list] = None  # [[level, weight, phase], ...]
    alpha: Optional[complex] = None
    omega: float = 1.0
    mismatch: float = 0.8
    horizon: float = 20.0
    grid_step: float = 0.01
    threshold: float = 0.999
    N: Optional[int] = None
    N_max: int = 7
    F_threshold: float = 0.995
    restarts: int = 64
    max_evals: int = 2000
    seed: int = 0
    dim: Optional[int] = None
    n_values: list = field(default_factory=lambda: list(DEFAULT_SCALING_NS))
    out: str = "rse_out"

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise DomainError(f"unknown config fields: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path: str) -> ExperimentConfig:
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def validate(self):
        if self.alpha is not None:
            if isinstance(self.alpha, (list, tuple)):
                self.alpha = complex(*self.alpha)
            self.alpha = complex(self.alpha)
        if self.components is not None:
            comps = [list(c) + [0.0] * (3 - len(c)) for c in self.components]
            levels = [int(c[0]) for c in comps]
            if len(set(levels)) != len(levels):
                raise DomainError("superposition levels must be distinct")
            weights = [float(c[1]) for c in comps]
            if any(w <= 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
                raise DomainError(f"component weights must be positive and sum to 1, got {sum(weights)!r}")
            self.components = [[lv, w, float(c[2])] for lv, w, c in zip(levels, weights, comps)]
        if self.n < 0 or self.horizon <= 0 or self.grid_step <= 0:
            raise DomainError("n must be >= 0; horizon and grid_step positive")
        if not 0 < self.threshold <= 1:
            raise DomainError("threshold must lie in (0, 1]")
        if self.restarts < 1 or self.N_max < 1:
            raise DomainError("restarts and N_max must be positive")
        if self.dim is not None and self.dim < 1:
            raise DomainError("dim must be positive")

    # derived quantities

    @property
    def levels(self) -> list:
        return [c[0] for c in self.components] if self.components else [self.n]

    @property
    def alpha_value(self) -> complex:
        if self.alpha is not None:
            return complex(self.alpha)
        if self.components:
            return complex(math.sqrt(sum(c[0] * c[1] for c in self.components)))
        return complex(math.sqrt(self.n))

    def space(self) -> FockSpace:
        if self.dim is not None:
            return FockSpace(self.dim)
        return FockSpace(recommended_dim(self.alpha_value, max(self.levels)))

    def target_coords(self) -> np.ndarray:
        if not self.components:
            return np.array([1.0, 0.0], dtype=complex)
        amps = [math.sqrt(w) * np.exp(1j * ph) for _, w, ph in self.components]
        return np.array(amps + [0.0], dtype=complex)

    def optimizer_config(self, **kw) -> OptimizerConfig:
        return OptimizerConfig(restarts=self.restarts, max_evals=self.max_evals, seed=self.seed, **kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.alpha is not None:
            d["alpha"] = [self.alpha.real, self.alpha.imag]
        return d


def _outdir(cfg: ExperimentConfig) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _target_state(space: FockSpace, cfg: ExperimentConfig) -> BosonicState:
    amps = np.zeros(space.dim, dtype=complex)
    for lv, c in zip(cfg.levels, cfg.target_coords()[:-1]):
        if lv >= space.dim:
            raise DomainError(f"level {lv} outside Fock space of dim {space.dim}")
        amps[lv] = c
    return BosonicState(space, amps)


def detuned_weight(model, omega: float, factor: float) -> float:
    """Fock weight giving H_11 = factor * H_22 for a single target."""
    if factor == 1.0:
        return resonance_weights(model, omega)
    p = abs(model.overlaps[0]) ** 2
    return factor * omega * (1.0 - p) - omega * p


def single_fock_model(n: int, alpha: complex, space: FockSpace):
    return build_subspace([fock_state(space, n)], coherent_state(space, alpha))


def run_trace(cfg: ExperimentConfig) -> dict:
    """Matched and detuned continuous transfer to |n>, as CSV traces plus summary.json."""
    out = _outdir(cfg)
    space = cfg.space()
    model = single_fock_model(cfg.n, cfg.alpha_value, space)
    target = fock_state(space, cfg.n)
    grid = np.arange(0.0, cfg.horizon + 0.5 * cfg.grid_step, cfg.grid_step)
    summary = {"config": cfg.to_dict(), "dim": space.dim, "mu": abs(model.overlaps[0])}
    traces = {}
    for label, factor in (("matched", 1.0), ("mismatched", cfg.mismatch)):
        w = detuned_weight(model, cfg.omega, factor)
        proto = ContinuousProtocol(model, cfg.omega, (w,), cfg.horizon, pre_rotation_gate(cfg.n))
        H = proto.hamiltonian
        tr = fidelity_trace(proto.evolver(), proto.initial_state(), target, grid,
                            metadata={"case": label, "omega_n": w})
        traces[label] = tr
        _write(os.path.join(out, f"trace_{label}.csv"), tr.to_csv())
        t_peak, f_peak = tr.peak()
        summary[label] = {
            "omega_n": w,
            "H11": H.h11,
            "H22": H.h22,
            "H12": [H.h12.real, H.h12.imag],
            "peak_fidelity": f_peak,
            "peak_time": t_peak,
            "first_passage": first_passage(tr, cfg.threshold),
        }
        if factor == 1.0:
            tt = transfer_time(model, H)
            summary["T_eq5"] = tt.time
            summary["T_bound"] = tt.bound
    _write(os.path.join(out, "summary.json"), json.dumps(summary, indent=2) + "\n")
    summary["traces"] = traces
    return summary


def scaling_row(n: int, cfg: ExperimentConfig) -> dict:
    alpha = math.sqrt(n)
    space = FockSpace(cfg.dim) if cfg.dim is not None else FockSpace(recommended_dim(alpha, n))
    model = single_fock_model(n, alpha, space)
    H = reduced_hamiltonian(model, cfg.omega, [resonance_weights(model, cfg.omega)])
    tt = transfer_time(model, H)
    N_min, res = minimal_iterations(model, [1.0, 0.0], cfg.N_max, cfg.F_threshold, cfg.optimizer_config())
    return {"n": n, "alpha": alpha, "mu": abs(model.overlaps[0]), "T_eq5": tt.time,
            "T_bound": tt.bound, "N_min": N_min, "fidelity": res.fidelity if res else None}


def run_scaling(cfg: ExperimentConfig) -> dict:
    """Closed-form transfer times and optimized iteration counts versus n, with alpha = sqrt(n)."""
    out = _outdir(cfg)
    ns = sorted(int(n) for n in cfg.n_values)
    if len(ns) < 1 or ns[0] < 1:
        raise DomainError("n_values must be positive")
    rows = [scaling_row(n, cfg) for n in ns]
    cols = ["n", "alpha", "mu", "T_eq5", "T_bound", "N_min"]
    with open(os.path.join(out, "scaling.csv"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([r["n"]] + [f"{r[c]:.17g}" for c in cols[1:5]] + ["" if r["N_min"] is None else r["N_min"]])
    fits = {}
    if len(rows) >= 3:
        for col in ("T_eq5", "T_bound", "N_min"):
            pairs = [(r["n"], r[col]) for r in rows if r[col] is not None]
            if len(pairs) >= 3 and len({p[0] for p in pairs}) > 1:
                slope, icpt = fit_scaling_exponent(pairs)
                fits[col] = {"exponent": slope, "intercept": icpt}
    _write(os.path.join(out, "scaling_fit.json"), json.dumps(fits, indent=2) + "\n")
    return {"rows": rows, "fits": fits}


def _discrete_setup(cfg: ExperimentConfig):
    space = cfg.space()
    ref = coherent_state(space, cfg.alpha_value)
    model = build_subspace([fock_state(space, lv) for lv in cfg.levels], ref)
    return space, model


def run_optimize(cfg: ExperimentConfig) -> dict:
    """Optimize iteration angles (fixed N, or the minimal N when cfg.N is unset)."""
    out = _outdir(cfg)
    _, model = _discrete_setup(cfg)
    tc = cfg.target_coords()
    if cfg.N is not None:
        res = optimize(model, tc, cfg.N, cfg.optimizer_config())
        N = cfg.N
    else:
        N, res = minimal_iterations(model, tc, cfg.N_max, cfg.F_threshold, cfg.optimizer_config())
    _write(os.path.join(out, "params.json"), res.params.to_json(res.fidelity, cfg.seed) + "\n")
    return {"N": N, "fidelity": res.fidelity, "params": res.params}


def verify_params(cfg: ExperimentConfig, params: ProtocolParams) -> dict:
    """Re-simulate the compiled displacement+SNAP program on the full truncated space."""
    from .optimizer import reduced_objective

    space, model = _discrete_setup(cfg)
    seq = discrete_protocol(params, cfg.alpha_value, cfg.levels)
    final = apply_sequence(seq, model.reference)
    f_full = fidelity(_target_state(space, cfg), final)
    f_red = reduced_objective(params, model, cfg.target_coords())
    return {"sequence": seq, "dim": space.dim, "reduced_fidelity": f_red,
            "full_fidelity": f_full, "difference": abs(f_full - f_red), "gate_counts": seq.counts()}


def run_superposition(cfg: ExperimentConfig) -> dict:
    """Optimize in the reduced space, then verify the compiled gates in full space."""
    if not cfg.components:
        raise DomainError("superposition run needs components")
    out = _outdir(cfg)
    N = cfg.N if cfg.N is not None else cfg.N_max
    _, model = _discrete_setup(cfg)
    res = optimize(model, cfg.target_coords(), N, cfg.optimizer_config())
    report = verify_params(cfg, res.params)
    seq = report.pop("sequence")
    _write(os.path.join(out, "params.json"), res.params.to_json(res.fidelity, cfg.seed) + "\n")
    _write(os.path.join(out, "gates.txt"), seq.to_text())
    report.update({"N": N, "components": cfg.components, "alpha": [cfg.alpha_value.real, cfg.alpha_value.imag]})
    _write(os.path.join(out, "report.json"), json.dumps(report, indent=2) + "\n")
    report["params"] = res.params
    return report


def export_gates(params: ProtocolParams, cfg: ExperimentConfig, path: Optional[str] = None) -> GateSequence:
    seq = discrete_protocol(params, cfg.alpha_value, cfg.levels)
    path = path or os.path.join(_outdir(cfg), "gates.txt")
    _write(path, seq.to_text())
    return seq


def read_trace_csv(path: str):
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path} is empty")
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) if v else np.nan for v in r] for r in body]) if body else np.zeros((0, len(header)))
    return header, data
