"""Command-line front end.

Subcommands: ``css``, ``metrics``, ``witness``, ``gilbert``, ``locc-search``,
``random``. States travel as JSON files ``{"dims": [...], "matrix":
[[[re, im], ...], ...]}``; iteration traces as CSV. Exit codes: 0 ok,
1 input error, 2 invalid-CSS diagnostic, 3 separable input for witness,
4 monotonicity violation found.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import SOLVER_TOL, TOL_ENV_VAR
from .errors import CsskitError, DegenerateInput, InvalidCss
from .gilbert import gilbert_css
from .metrics import (
    build_witness,
    eval_witness,
    lower_bound,
    negativity,
    paper_negativity,
    probe_witness_min,
)
from .channels import locc_search
from .solver import closest_separable, verify_result
from .states import (
    Bipartition,
    DensityMatrix,
    load_state,
    max_mixed,
    named_state,
    random_state,
    save_state,
    state_to_dict,
    werner_state,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVALID_CSS = 2
EXIT_SEPARABLE = 3
EXIT_VIOLATION = 4


def _default_tol() -> float:
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None:
        return SOLVER_TOL
    try:
        tol = float(raw)
    except ValueError as exc:
        raise CsskitError(f"{TOL_ENV_VAR} must be a float, got {raw!r}") from exc
    if tol <= 0:
        raise CsskitError(f"{TOL_ENV_VAR} must be positive, got {tol}")
    return tol


def _add_state_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", metavar="PATH", help="JSON state file")
    p.add_argument("--demo", choices=("bell", "ghz", "w"), help="use a named demo state")
    p.add_argument(
        "--cut",
        metavar="LIST",
        default="0",
        help="comma-separated side-A subsystem indices (default: 0)",
    )
    p.add_argument("--tol", type=float, default=None, metavar="REAL", help="solver tolerance")
    p.add_argument("--seed", type=int, default=0, metavar="UINT")
    p.add_argument("--json", action="store_true", help="emit machine-readable JSON")
    p.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")
    p.add_argument("--jobs", type=int, default=1, metavar="N", help="worker threads")


def _load_input(args: argparse.Namespace) -> DensityMatrix:
    if args.demo and args.input:
        raise CsskitError("use either --input or --demo, not both")
    if args.demo:
        return named_state(args.demo)
    if args.input:
        return load_state(args.input)
    raise CsskitError("missing input state: pass --input PATH or --demo NAME")


def _parse_cut(args: argparse.Namespace, state: DensityMatrix) -> Bipartition:
    try:
        indices = [int(tok) for tok in args.cut.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise CsskitError(f"--cut must be comma-separated integers, got {args.cut!r}") from exc
    if not indices:
        raise CsskitError("--cut must name at least one subsystem")
    return Bipartition.from_cut(indices, len(state.dims))


def _emit(args: argparse.Namespace, payload: dict, text: str) -> None:
    body = json.dumps(payload, indent=2) + "\n" if args.json else text
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def cmd_css(args: argparse.Namespace) -> int:
    rho = _load_input(args)
    cut = _parse_cut(args, rho)
    tol = args.tol if args.tol is not None else _default_tol()
    result = closest_separable(rho, cut, tol)
    report = verify_result(rho, result)

    payload = {
        "label": result.label,
        "distance_sq": result.distance_sq,
        "css": state_to_dict(result.css),
        "iterations": [
            {
                "iteration": i + 1,
                "spectrum_in": [float(v) for v in rec.spectrum_in],
                "n_i": rec.n_i,
                "r_i": rec.r_i,
                "shift": rec.shift,
            }
            for i, rec in enumerate(result.iterations)
        ],
        "verify": {
            "passed": report.passed,
            "commutator_hs": report.commutator_hs,
            "case_id": report.case.case_id,
            "case_distance_sq": report.case.distance_sq,
            "failures": report.failures(),
        },
    }
    lines = [
        f"label: {result.label}",
        f"distance_sq: {result.distance_sq!r}",
        f"iterations: {len(result.iterations)}",
    ]
    for i, rec in enumerate(result.iterations, start=1):
        spectrum = ", ".join(f"{v:.6f}" for v in rec.spectrum_in)
        lines.append(f"  [{i}] spectrum=({spectrum}) N={rec.n_i:.6e} r={rec.r_i}")
    lines.append(f"verify: {'ok' if report.passed else 'FAILED ' + '; '.join(report.failures())}")
    lines.append(f"case: {report.case.case_id}")
    lines.append("css:")
    lines.append(json.dumps(state_to_dict(result.css)))
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    rho = _load_input(args)
    cut = _parse_cut(args, rho)
    tol = args.tol if args.tol is not None else _default_tol()
    neg = negativity(rho, cut)
    bound = lower_bound(rho, cut)
    dist = closest_separable(rho, cut, tol).distance_sq
    tight = abs(bound - dist) <= 1e-9
    payload = {
        "negativity": neg,
        "paper_negativity": paper_negativity(rho, cut),
        "lower_bound": bound,
        "min_hsd": dist,
        "tight": tight,
    }
    text = (
        f"negativity: {neg!r}\n"
        f"paper_negativity: {2 * neg!r}\n"
        f"lower_bound: {bound!r}\n"
        f"min_hsd: {dist!r}\n"
        f"tight: {tight}\n"
    )
    _emit(args, payload, text)
    return EXIT_OK


def cmd_witness(args: argparse.Namespace) -> int:
    rho = _load_input(args)
    cut = _parse_cut(args, rho)
    tol = args.tol if args.tol is not None else _default_tol()
    result = closest_separable(rho, cut, tol)
    witness = build_witness(rho, result.css)
    tr_rho = eval_witness(witness, rho)
    probe_min = probe_witness_min(
        witness, rho.dims, cut, probes=args.probes, seed=args.seed
    )
    payload = {
        "witness": {"dims": list(rho.dims), "matrix": _matrix_to_pairs(witness.w)},
        "norm_check": witness.norm_check,
        "tr_w_rho": tr_rho,
        "tr_w_css": eval_witness(witness, result.css),
        "probes": args.probes,
        "probe_min": probe_min,
    }
    text = (
        f"tr_w_rho: {tr_rho!r}\n"
        f"tr_w_css: {eval_witness(witness, result.css)!r}\n"
        f"probe_min over {args.probes} product states: {probe_min!r}\n"
        f"witness:\n{json.dumps(payload['witness'])}\n"
    )
    _emit(args, payload, text)
    return EXIT_OK


def cmd_gilbert(args: argparse.Namespace) -> int:
    rho = _load_input(args)
    cut = _parse_cut(args, rho)
    tol = args.tol if args.tol is not None else _default_tol()
    trace = gilbert_css(rho, cut, iters=args.iters, restarts=args.restarts, seed=args.seed)

    if args.trace_path:
        with open(args.trace_path, "w", encoding="utf-8") as fh:
            fh.write("iter,distance_sq_upper,commutator_hs\n")
            for i, d, c in trace.rows():
                fh.write(f"{i},{d:.15e},{c:.15e}\n")

    upper = float(trace.distance_sq_upper[-1])
    result = closest_separable(rho, cut, tol)
    exact = result.distance_sq if result.label == "separable-certified" else None
    payload = {
        "iters": args.iters,
        "final_upper_bound": upper,
        "exact_min_hsd": exact,
        "gap": (upper - exact) if exact is not None else None,
        "ppt_distance_sq": result.distance_sq,
        "trace_path": args.trace_path,
    }
    lines = [f"final_upper_bound: {upper!r}"]
    if exact is not None:
        lines.append(f"exact_min_hsd: {exact!r}")
        lines.append(f"gap: {upper - exact!r}")
    else:
        lines.append(f"ppt_distance_sq (lower reference): {result.distance_sq!r}")
    if args.trace_path:
        lines.append(f"trace written to {args.trace_path}")
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_locc_search(args: argparse.Namespace) -> int:
    rho = _load_input(args)
    if args.env and args.env_werner is not None:
        raise CsskitError("use either --env or --env-werner, not both")
    if args.env:
        env = load_state(args.env)
    elif args.env_werner is not None:
        env = werner_state(args.env_werner)
    else:
        env = max_mixed((2, 2))
    report = locc_search(
        rho,
        env,
        restarts=args.restarts,
        evals=args.evals,
        seed=args.seed,
        jobs=args.jobs,
    )
    payload = report.to_dict()
    text = (
        f"baseline_min_hsd: {report.baseline_min_hsd!r}\n"
        f"best_value: {report.best_value!r}\n"
        f"violation: {report.violation}\n"
    )
    _emit(args, payload, text)
    if report.violation:
        sys.stderr.write(
            "MONOTONICITY VIOLATION: best value exceeds the input's minimum distance; "
            "full report emitted above\n"
        )
        if not args.json:
            sys.stderr.write(json.dumps(payload, indent=2) + "\n")
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_random(args: argparse.Namespace) -> int:
    dims_raw = args.dims.lower().replace("x", ",")
    try:
        dims = tuple(int(tok) for tok in dims_raw.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise CsskitError(f"--dims must look like 2x2 or 2,3, got {args.dims!r}") from exc
    if not dims or any(d < 2 for d in dims):
        raise CsskitError(f"--dims needs factors >= 2, got {args.dims!r}")
    if args.count < 1:
        raise CsskitError(f"--count must be >= 1, got {args.count}")
    os.makedirs(args.out, exist_ok=True)

    streams = np.random.SeedSequence(args.seed).spawn(args.count)

    def write_one(i: int) -> str:
        state = random_state(dims, np.random.default_rng(streams[i]))
        path = os.path.join(args.out, f"state_{i:04d}.json")
        save_state(state, path)
        return path

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            paths = list(pool.map(write_one, range(args.count)))
    else:
        paths = [write_one(i) for i in range(args.count)]
    payload = {"dims": list(dims), "count": args.count, "seed": args.seed,
               "ensemble": "ginibre", "files": paths}
    # --out names the target directory here, so results go to stdout directly
    if args.json:
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        sys.stdout.write("\n".join(paths) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csskit",
        description="Closest separable / closest PPT states and Hilbert-Schmidt "
        "entanglement metrics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("css", help="closest separable (or PPT) state and distance")
    _add_state_options(p)
    p.set_defaults(func=cmd_css)

    p = sub.add_parser("metrics", help="negativity, lower bound, minimum distance")
    _add_state_options(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("witness", help="optimal entanglement witness")
    _add_state_options(p)
    p.add_argument("--probes", type=int, default=10_000, metavar="N",
                   help="random product states for the positivity probe")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("gilbert", help="iterative upper bound and commutator trace")
    _add_state_options(p)
    p.add_argument("--iters", type=int, default=2000, metavar="N")
    p.add_argument("--restarts", type=int, default=5, metavar="N")
    p.add_argument("--trace-path", metavar="PATH", help="write the CSV iteration trace here")
    p.set_defaults(func=cmd_gilbert)

    p = sub.add_parser("locc-search", help="search local maps for a distance increase")
    _add_state_options(p)
    p.add_argument("--env", metavar="PATH", help="environment state file (default: I/4)")
    p.add_argument("--env-werner", type=float, default=None, metavar="P",
                   help="use a Werner environment with parameter P")
    p.add_argument("--restarts", type=int, default=20, metavar="N")
    p.add_argument("--evals", type=int, default=2000, metavar="N",
                   help="objective evaluations per restart")
    p.set_defaults(func=cmd_locc_search)

    p = sub.add_parser("random", help="write random state files")
    p.add_argument("--dims", required=True, metavar="SPEC", help="e.g. 2x2 or 2x3 or 2x2x2")
    p.add_argument("--count", type=int, default=1, metavar="N")
    p.add_argument("--seed", type=int, default=0, metavar="UINT")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--jobs", type=int, default=1, metavar="N")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_random)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidCss as exc:
        sys.stderr.write(f"invalid closest state: {exc}\n")
        return EXIT_INVALID_CSS
    except DegenerateInput as exc:
        sys.stderr.write(f"separable input: {exc}\n")
        return EXIT_SEPARABLE
    except (CsskitError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
