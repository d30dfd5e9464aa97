"""Command-line harness.

Exit codes: 0 success, 2 configuration/domain error, 3 I/O error,
4 fidelity below ``--require-fidelity``.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import experiments as ex
from .fockspace import DomainError
from .optimizer import ProtocolParams
from .svg import emit_svg

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_THRESHOLD = 0, 2, 3, 4


def _components(text: str):
    comps = []
    for item in text.split(","):
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise argparse.ArgumentTypeError(f"bad component {item!r}; use level:weight[:phase]")
        comps.append([int(parts[0]), float(parts[1]), float(parts[2]) if len(parts) == 3 else 0.0])
    return comps


def _complex(text: str) -> complex:
    return complex(text.replace(" ", ""))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment record; flags override its fields")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--dim", type=int, help="override the Fock-space truncation")
    common.add_argument("--require-fidelity", type=float, dest="require_fidelity")
    common.add_argument("-v", "--verbose", action="store_true")

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("--n", type=int)
    scen.add_argument("--alpha", type=_complex)
    scen.add_argument("--components", type=_components, help="e.g. 70:0.3,100:0.7")
    scen.add_argument("--N", type=int, dest="N")
    scen.add_argument("--N-max", type=int, dest="N_max")
    scen.add_argument("--F-threshold", type=float, dest="F_threshold")
    scen.add_argument("--restarts", type=int)
    scen.add_argument("--max-evals", type=int, dest="max_evals")

    p = argparse.ArgumentParser(prog="rse", description="Resonant subspace engineering experiments")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("trace", parents=[common, scen], help="matched vs detuned continuous transfer")
    t.add_argument("--omega", type=float)
    t.add_argument("--mismatch", type=float)
    t.add_argument("--horizon", type=float)
    t.add_argument("--grid-step", type=float, dest="grid_step")
    t.add_argument("--threshold", type=float)

    s = sub.add_parser("scaling", parents=[common, scen], help="transfer time and iterations versus n")
    s.add_argument("--n-values", type=lambda x: [int(v) for v in x.split(",")], dest="n_values")

    sub.add_parser("superpose", parents=[common, scen], help="prepare a Fock superposition")
    sub.add_parser("optimize", parents=[common, scen], help="optimize iteration angles")

    e = sub.add_parser("export-gates", parents=[common, scen], help="write the displacement/SNAP program")
    e.add_argument("--params", required=True, help="params.json from optimize/superpose")

    pl = sub.add_parser("plot", parents=[common], help="render CSV outputs as an SVG line chart")
    pl.add_argument("inputs", nargs="+", help="trace_*.csv or scaling.csv")
    pl.add_argument("--output", help="SVG path (default <out>/plot.svg)")
    pl.add_argument("--title", default="")
    return p


_SKIP = {"command", "config", "require_fidelity", "verbose", "params", "inputs", "output", "title"}


def load_config(args, kind: str) -> ex.ExperimentConfig:
    base = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            base = json.load(fh)
    base["kind"] = kind
    for key, val in vars(args).items():
        if key in _SKIP or val is None:
            continue
        base[key] = [val.real, val.imag] if isinstance(val, complex) else val
    return ex.ExperimentConfig.from_dict(base)


def _require(args, value) -> int:
    if args.require_fidelity is not None and (value is None or value < args.require_fidelity):
        print(f"fidelity {value} below required {args.require_fidelity}", file=sys.stderr)
        return EXIT_THRESHOLD
    return EXIT_OK


def _plot(args) -> int:
    series = {}
    xlabel = ylabel = ""
    for path in args.inputs:
        header, data = ex.read_trace_csv(path)
        if data.shape[0] == 0:
            raise DomainError(f"{path} has no data rows")
        stem = os.path.splitext(os.path.basename(path))[0]
        if header[:2] == ["t", "fidelity"]:
            series[stem] = (data[:, 0], data[:, 1])
            xlabel, ylabel = "t", "fidelity"
        else:
            for k, col in enumerate(header[1:], start=1):
                if col in ("T_eq5", "T_bound"):
                    series[col] = (data[:, 0], data[:, k])
            xlabel, ylabel = header[0], "T"
    out = args.output or os.path.join(args.out or ".", "plot.svg")
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    emit_svg(series, out, title=args.title, xlabel=xlabel, ylabel=ylabel)
    print(out)
    return EXIT_OK


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "plot":
            return _plot(args)
        cfg = load_config(args, args.command)
        if args.command == "trace":
            summary = ex.run_trace(cfg)
            summary.pop("traces")
            print(json.dumps({k: summary[k] for k in ("T_eq5", "T_bound", "matched", "mismatched")}, indent=2))
            return _require(args, summary["matched"]["peak_fidelity"])
        if args.command == "scaling":
            result = ex.run_scaling(cfg)
            for r in result["rows"]:
                print(f"n={r['n']:4d}  T_eq5={r['T_eq5']:.6f}  T_bound={r['T_bound']:.6f}  N_min={r['N_min']}")
            print(json.dumps(result["fits"], indent=2))
            return EXIT_OK
        if args.command == "superpose":
            report = ex.run_superposition(cfg)
            report.pop("params")
            print(json.dumps(report, indent=2))
            return _require(args, report["full_fidelity"])
        if args.command == "optimize":
            result = ex.run_optimize(cfg)
            print(f"N={result['N']} fidelity={result['fidelity']:.12f}")
            return _require(args, result["fidelity"])
        if args.command == "export-gates":
            with open(args.params, encoding="utf-8") as fh:
                params = ProtocolParams.from_json(fh.read())
            seq = ex.export_gates(params, cfg)
            print(f"wrote {len(seq)} gates to {os.path.join(cfg.out, 'gates.txt')}")
            return EXIT_OK
    except (DomainError, ValueError, KeyError, TypeError, NotImplementedError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_CONFIG


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
