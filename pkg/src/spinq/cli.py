"""``spinq`` command line: one JSON document on stdout per invocation.

Exit codes: 0 success, 1 self-check mismatch, 2 usage or input error,
3 domain error. Errors are reported as ``{"error": {"kind": ..., "message": ...}}``.
"""
from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from . import __version__, io
from .cdt import decode, encode, metropolis_sample, observables
from .circuit import DEFAULT_MAX_PERIODIC_WIDTH, DEFAULT_MAX_WIDTH, contract
from .errors import SpinqError
from .estimator import DEFAULT_TOL, estimate_partition_function
from .kernels import backend_name
from .model import partition_function_exact
from .overlap import (alpha_covector, pair, phi_state, project, project_edges_y,
                      vertex_phase_correction)
from .rewrite import delete, merge, specialize_clique


class UsageError(Exception):
    kind = "UsageError"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read_json(path):
    try:
        return io.read_json(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except ValueError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _model(path):
    return io.model_from_json(_read_json(path))


def _lattice(path):
    return io.lattice_from_json(_read_json(path))


def _forks(path):
    try:
        return io.read_fork_array(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


# -- commands -------------------------------------------------------------------

def cmd_z(args):
    if args.method == "exact":
        model = _model(args.file)
        z = partition_function_exact(model, threads=args.threads)
        return {**io.complex_json(z), "method": "exact", "n": model.n, "q": model.q}
    if args.method == "overlap":
        model = _model(args.file)
        phi = phi_state(model)
        z = pair(alpha_covector(model), phi)
        return {**io.complex_json(z), "method": "overlap", "qudits": len(phi.qudit_dims),
                "amplitudes": int(phi.amplitudes.size)}
    circuit = _lattice(args.file).to_circuit()
    z = contract(circuit, max_width=args.max_width, max_periodic_width=args.max_periodic_width,
                 threads=args.threads)
    return {**io.complex_json(z), "method": "circuit", "width": circuit.width, "layers": len(circuit.layers),
            "boundary": circuit.boundary.kind}


def cmd_estimate(args):
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if not 0 <= args.seed < 2 ** 64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    report = estimate_partition_function(_lattice(args.file), args.samples, args.seed, tol=args.tol,
                                         max_width=args.max_width)
    return report.to_dict()


def cmd_rewrite(args):
    model = _model(args.file)
    out = merge(model, args.index) if args.rule == "merge" else delete(model, args.index)
    return {"model": io.model_to_json(out)}


def cmd_reduce(args):
    return {"model": io.model_to_json(specialize_clique(args.n, _model(args.file)))}


def cmd_project(args):
    model = _model(args.file)
    phi = phi_state(model)
    if args.y_edges:
        state = project_edges_y(model, phi)
        if args.phase_correct:
            state = vertex_phase_correction(model, state)
    else:
        if args.phase_correct:
            raise UsageError("--phase-correct needs --y-edges")
        state = project(phi, io.gamma_from_json(_read_json(args.gamma)))
    return {"state": io.state_to_json(state)}


def cmd_cdt(args):
    if args.action == "decode":
        return {"triangulation": io.triangulation_to_json(decode(_forks(args.file)))}
    if args.action == "encode":
        doc = _read_json(args.file)
        tri = io.triangulation_from_json(doc.get("triangulation", doc))
        return {"array": encode(tri).to_text().split()}
    if args.action == "observe":
        return observables(decode(_forks(args.file)), args.lambda_cc)
    if args.steps < 1 or args.thin < 1 or args.rows < 1 or args.cols < 1:
        raise UsageError("--rows, --cols, --steps and --thin must be >= 1")
    if not 0 <= args.seed < 2 ** 64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    result = metropolis_sample(args.rows, args.cols, args.lambda_cc, args.steps, args.seed, thin=args.thin)
    if args.csv:
        Path(args.csv).write_text(result.csv())
    if args.output == "csv":
        return result.csv()
    return result.summary()


def _golden_dir():
    return resources.files("spinq") / "data" / "golden"


def _matches(expected, actual, rtol):
    if isinstance(expected, dict):
        return isinstance(actual, dict) and all(k in actual and _matches(v, actual[k], rtol)
                                                for k, v in expected.items())
    if isinstance(expected, list):
        return (isinstance(actual, list) and len(expected) == len(actual)
                and all(_matches(e, a, rtol) for e, a in zip(expected, actual)))
    if isinstance(expected, float) and isinstance(actual, (int, float)):
        return abs(actual - expected) <= rtol * max(abs(expected), 1.0)
    return expected == actual


def cmd_selfcheck(args):
    """Re-run every command listed in the golden manifest and compare with the stored values."""
    root = Path(args.data_dir) if args.data_dir else _golden_dir()
    manifest = _read_json(root / "manifest.json")
    checks = []
    parser = build_parser()
    for entry in manifest["checks"]:
        argv = [str(root / a) if (root / a).is_file() else a for a in entry["argv"]]
        sub = parser.parse_args(argv)
        sub.threads, sub.max_width = args.threads, args.max_width
        sub.max_periodic_width = args.max_periodic_width
        try:
            out = sub.func(sub)
            ok = "expect_error" not in entry and _matches(entry["expect"], out, entry.get("rtol", 1e-9))
        except SpinqError as exc:
            ok = entry.get("expect_error") == exc.kind
        checks.append({"name": entry["name"], "ok": bool(ok)})
    return {"ok": all(c["ok"] for c in checks), "backend": backend_name(), "checks": checks}


# -- parser -------------------------------------------------------------------

def _global_flags(p, top):
    d = {} if top else {"default": argparse.SUPPRESS}
    p.add_argument("--threads", type=int, help="worker threads for enumeration and traces", **d)
    p.add_argument("--max-width", type=int, help="dense amplitude cap, as log2 of the amplitude count", **d)
    p.add_argument("--max-periodic-width", type=int, help="amplitude cap for periodic traces (log2)", **d)
    p.add_argument("--pretty", action="store_true", help="indent the JSON output", **d)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinq", description="Partition functions of spin models and fork-encoded triangulations.")
    parser.add_argument("--version", action="version", version=__version__)
    _global_flags(parser, top=True)
    parser.set_defaults(threads=1, max_width=DEFAULT_MAX_WIDTH, max_periodic_width=DEFAULT_MAX_PERIODIC_WIDTH,
                        pretty=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def leaf(subparsers, name, func, help_):
        p = subparsers.add_parser(name, help=help_)
        _global_flags(p, top=False)
        p.set_defaults(func=func)
        return p

    z = sub.add_parser("z", help="partition function")
    zsub = z.add_subparsers(dest="method", required=True, parser_class=_Parser)
    for method, help_ in (("exact", "brute-force enumeration of a model or family file"),
                          ("overlap", "pairing of the weight covector with the configuration state"),
                          ("circuit", "dense contraction of a lattice file's circuit")):
        leaf(zsub, method, cmd_z, help_).add_argument("file")

    p = leaf(sub, "estimate", cmd_estimate, "simulated Hadamard-test estimate of a lattice's partition function")
    p.add_argument("file")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="unitarity tolerance")

    r = sub.add_parser("rewrite", help="merge or delete one interaction")
    rsub = r.add_subparsers(dest="rule", required=True, parser_class=_Parser)
    for rule in ("merge", "delete"):
        p = leaf(rsub, rule, cmd_rewrite, f"{rule} interaction --index")
        p.add_argument("file")
        p.add_argument("--index", type=int, required=True)

    r = sub.add_parser("reduce", help="reductions between models")
    rsub = r.add_subparsers(dest="target", required=True, parser_class=_Parser)
    p = leaf(rsub, "clique", cmd_reduce, "complete-graph Ising model reproducing the target")
    p.add_argument("file")
    p.add_argument("--n", type=int, required=True, help="clique size")

    p = leaf(sub, "project", cmd_project, "contract some qudits of the configuration state")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gamma", help="JSON file with the projection vectors")
    g.add_argument("--y-edges", action="store_true", help="project every Ising edge qubit on <0_Y|")
    p.add_argument("--phase-correct", action="store_true", help="apply diag(1, i^deg) on vertex qubits")

    c = sub.add_parser("cdt", help="fork-encoded foliated triangulations")
    csub = c.add_subparsers(dest="action", required=True, parser_class=_Parser)
    leaf(csub, "decode", cmd_cdt, "fork array file -> triangulation").add_argument("file")
    leaf(csub, "encode", cmd_cdt, "triangulation JSON -> fork array").add_argument("file")
    p = leaf(csub, "observe", cmd_cdt, "volume, action, coordination and deficit angles")
    p.add_argument("file")
    p.add_argument("--lambda-cc", type=float, default=0.0)
    p = leaf(csub, "sample", cmd_cdt, "Metropolis chain over fork arrays")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--lambda-cc", type=float, default=0.0)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--thin", type=int, default=1000)
    p.add_argument("--csv", help="also write the thinned sample stream to this file")
    p.add_argument("--output", choices=("json", "csv"), default="json")

    p = leaf(sub, "selfcheck", cmd_selfcheck, "recompute the bundled golden files")
    p.add_argument("--data-dir", help="directory holding manifest.json (default: bundled)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    pretty = False
    try:
        args = parser.parse_args(argv)
        pretty = args.pretty
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        result = args.func(args)
    except UsageError as exc:
        sys.stdout.write(io.dumps({"error": {"kind": exc.kind, "message": str(exc)}}, pretty) + "\n")
        return 2
    except SpinqError as exc:
        sys.stdout.write(io.dumps({"error": exc.to_dict()}, pretty) + "\n")
        return 3
    if isinstance(result, str):
        sys.stdout.write(result)
        return 0
    sys.stdout.write(io.dumps(result, pretty) + "\n")
    if args.command == "selfcheck" and not result["ok"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
