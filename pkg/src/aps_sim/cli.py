"""Command-line front end: ``aps-sim {grover,aps,eigen-scan}``.

Exit codes: 0 success, 2 invalid input, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import traceback
from pathlib import Path

import numpy as np

from . import __version__
from .eigenscan import (
    DEFAULT_MIN_PROMINENCE,
    DEFAULT_STEP,
    DEFAULT_TOL,
    POLICIES,
    SweepConfig,
    find_peaks,
    peak_report,
    scan_lambda,
    sweep_to_doc,
    write_json,
    write_sweep_csv,
)
from .engine import (
    RunConfig,
    Schedule,
    default_schedule,
    grover_success_probability,
    run_aps,
    run_grover_baseline,
    search_main_reps,
)
from .metrics import Histogram, format_bits, kld_vs_uniform, write_histogram_csv
from .oracles import (
    DiagonalHamiltonian,
    Graph,
    InstanceError,
    SubsetSumInstance,
    build_phase_table,
    hamiltonian_of,
    instance_to_doc,
    parse_instance,
)
from .state import RegisterLayout

BIT_ORDER_NOTE = (
    "Bitstrings are printed most-significant work bit first: character l of "
    "the string is work qubit l, i.e. element l of a subset-sum set or vertex l "
    "of a graph."
)


class UsageError(Exception):
    """Bad command-line input; maps to exit code 2."""


# --- readers for the files this CLI writes ---------------------------------


def histogram_from_doc(doc: dict) -> Histogram:
    rows = doc["histogram"]
    n = len(rows[0]["bitstring"])
    probs = np.zeros(1 << n)
    for row in rows:
        probs[int(row["bitstring"], 2)] = float(row["probability"])
    return Histogram(n, probs, 1.0)


def sidecar(path: Path, suffix: str) -> Path:
    return path.with_name(path.stem + suffix)


# --- shared helpers --------------------------------------------------------


def _load_instance(path: str):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read instance {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None
    try:
        return doc, parse_instance(doc)
    except InstanceError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _instance_width(inst) -> int:
    if isinstance(inst, SubsetSumInstance):
        return inst.n
    if isinstance(inst, Graph):
        return inst.vertices
    return inst.n_work


def _layout(args, inst) -> RegisterLayout:
    n = _instance_width(inst)
    if args.n is not None and args.n != n:
        raise UsageError(f"--n {args.n} does not match the instance size {n}")
    m = n if args.m is None else args.m
    if m < 2:
        raise UsageError(f"--m must be at least 2, got {m}")
    try:
        return RegisterLayout(n, m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_sampling(args) -> None:
    if args.shots < 0:
        raise UsageError("--shots must be >= 0")
    if args.shots > 0 and args.seed is None:
        raise UsageError("--shots > 0 requires --seed")


def _default_target(doc: dict, inst) -> float:
    """Target cost c0: S for subset-sum, total edge weight for max-cut."""
    if isinstance(inst, SubsetSumInstance):
        return inst.target
    if "target" in doc:
        return float(doc["target"])
    if isinstance(inst, Graph):
        # no edges: every cost is zero, so any non-zero lambda yields the zero table
        return inst.total_weight if inst.edges else 1.0
    raise UsageError("diagonal instances need a target: pass --target or a \"target\" key")


def _emit_table(out: Path | None, write_csv, doc: dict, fmt: str, extra: dict[str, dict],
                protect: str | None = None) -> None:
    if out is not None and protect is not None:
        targets = [out] if fmt == "json" else [out] + [sidecar(out, s) for s in extra]
        if any(Path(protect).resolve() == t.resolve() for t in targets):
            raise UsageError(f"refusing to overwrite the instance file {protect}")
    if out is None:
        if fmt == "json":
            json.dump(doc, sys.stdout, indent=2, sort_keys=True)
            sys.stdout.write("\n")
        else:
            write_csv(sys.stdout)
        return
    if fmt == "json":
        write_json(doc, out)
        return
    write_csv(out)
    for suffix, payload in extra.items():
        write_json(payload, sidecar(out, suffix))


# --- subcommands -----------------------------------------------------------


def cmd_grover(args) -> int:
    n = args.n
    if n < 1:
        raise UsageError("--n must be >= 1")
    marked = []
    for token in args.marked.split(","):
        token = token.strip()
        if len(token) != n or set(token) - {"0", "1"}:
            raise UsageError(f"marked state {token!r} is not a {n}-bit string")
        marked.append(int(token, 2))
    if args.iterations < 0:
        raise UsageError("--iterations must be >= 0")
    try:
        RegisterLayout(n, 0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    dist = run_grover_baseline(n, marked, args.iterations)
    hist = Histogram.exact(dist)
    p_marked = float(dist[sorted(set(marked))].sum())
    predicted = grover_success_probability(n, len(set(marked)), args.iterations)
    doc = {
        "command": "grover",
        "n_work": n,
        "marked": [format_bits(x, n) for x in sorted(set(marked))],
        "iterations": args.iterations,
        "p_marked": p_marked,
        "p_marked_closed_form": predicted,
        "histogram": [{"bitstring": b, "probability": p} for b, p in hist.ranked()],
    }
    out = Path(args.out) if args.out else None
    _emit_table(out, lambda dest: write_histogram_csv(hist, dest), doc, args.format,
                {".meta.json": {k: v for k, v in doc.items() if k != "histogram"}})
    print(f"P(marked) = {p_marked:.9f}  closed form = {predicted:.9f}", file=sys.stderr)
    return 0


def cmd_aps(args) -> int:
    doc, inst = _load_instance(args.instance)
    layout = _layout(args, inst)
    _check_sampling(args)
    H = hamiltonian_of(inst)
    target = args.target if args.target is not None else _default_target(doc, inst)
    if target == 0:
        raise UsageError("target cost (S or lambda) must be non-zero")

    sched = default_schedule(layout.n_work, layout.m_ancilla)
    pre = sched.preprocessing_reps if args.pre_reps is None else args.pre_reps
    auto = args.main_reps == "auto"
    if auto:
        main = sched.main_reps
    else:
        try:
            main = sched.main_reps if args.main_reps is None else int(args.main_reps)
        except ValueError:
            raise UsageError(f"--main-reps must be an integer or 'auto', got {args.main_reps!r}") from None
    try:
        config = RunConfig(layout, Schedule(pre, main), args.shots, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    phase_map = args.phase_map
    if not isinstance(inst, SubsetSumInstance) and phase_map == "linear":
        phase_map = "hamiltonian"
    table = build_phase_table(H.diag, phase_map, target)

    result = search_main_reps(config, table) if auto else run_aps(config, table)
    hist = result.histogram
    probs = hist.probabilities
    states = []
    for bits, p in hist.ranked():
        cost = float(H.diag[int(bits, 2)])
        states.append({"bitstring": bits, "probability": p, "cost": cost,
                       "deviation": abs(cost - target)})
    meta = {
        "command": "aps",
        "instance": instance_to_doc(inst),
        "target": target,
        "phase_map": args.phase_map,
        "n_work": layout.n_work,
        "m_ancilla": layout.m_ancilla,
        "schedule": {"preprocessing_reps": result.config.schedule.preprocessing_reps,
                     "main_reps": result.config.schedule.main_reps},
        "main_reps_policy": "best-kld" if auto else "fixed",
        "shots": args.shots,
        "seed": args.seed,
        "kld_vs_uniform": kld_vs_uniform(probs),
        "states": states,
    }
    doc_out = dict(meta, histogram=[{"bitstring": s["bitstring"], "probability": s["probability"]}
                                    for s in states])
    out = Path(args.out) if args.out else None
    _emit_table(out, lambda dest: write_histogram_csv(hist, dest), doc_out, args.format,
                {".meta.json": meta}, protect=args.instance)
    top = states[0]
    print(f"top state {top['bitstring']} (cost {top['cost']:g}, p = {top['probability']:.6f}); "
          f"KLD vs uniform = {meta['kld_vs_uniform']:.6f}; "
          f"schedule = ({meta['schedule']['preprocessing_reps']}, {meta['schedule']['main_reps']})",
          file=sys.stderr)
    return 0


def cmd_eigen_scan(args) -> int:
    doc, inst = _load_instance(args.instance)
    layout = _layout(args, inst)
    _check_sampling(args)
    H: DiagonalHamiltonian = hamiltonian_of(inst)

    sched = default_schedule(layout.n_work, layout.m_ancilla)
    pre = sched.preprocessing_reps if args.pre_reps is None else args.pre_reps
    main = sched.main_reps if args.main_reps is None else args.main_reps
    lam_min = 0.5 if args.lambda_min is None else args.lambda_min
    lam_max = max(float(H.diag.max()), 0.0) + 0.5 if args.lambda_max is None else args.lambda_max
    try:
        base = RunConfig(layout, Schedule(pre, main), args.shots, args.seed)
        sweep = SweepConfig(lam_min, lam_max, args.lambda_step, base, policy=args.policy,
                            phase_map=args.phase_map, tol=args.tol, space=args.space,
                            workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    result = scan_lambda(H, sweep)
    peaks = find_peaks(result, args.min_prominence) if len(result.records) >= 3 else []
    report = peak_report(H, result, peaks, args.tol)
    result.metadata["min_prominence"] = args.min_prominence

    out = Path(args.out) if args.out else None
    _emit_table(out, lambda dest: write_sweep_csv(result, dest), sweep_to_doc(result, report), args.format,
                {".peaks.json": {"metadata": result.metadata, "peaks": report}},
                protect=args.instance)
    if not report:
        print("warning: no KLD peaks detected in the scanned range", file=sys.stderr)
    for row in report:
        print(f"peak at lambda = {row['lambda']:g}: top state {row['top_state']} "
              f"(degeneracy {row['degeneracy']})", file=sys.stderr)
    return 0


# --- parser ----------------------------------------------------------------


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", required=True, help="problem instance JSON")
    p.add_argument("--n", type=int, help="work qubits; must match the instance")
    p.add_argument("--m", type=int, help="ancilla qubits (default: n)")
    p.add_argument("--pre-reps", type=int, help="preprocessing rounds (default floor(pi/4 sqrt(2^m)))")
    p.add_argument("--shots", type=int, default=0, help="0 = exact probabilities (default)")
    p.add_argument("--seed", type=int, help="RNG seed, required with --shots")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aps-sim",
        description="Approximate phase search and eigenvalue scans on a statevector simulator.",
        epilog=BIT_ORDER_NOTE + " Set APS_SIM_MAX_QUBITS to change the qubit cap (default 26).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("grover", help="plain Grover baseline", epilog=BIT_ORDER_NOTE)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--marked", required=True, help="comma-separated bitstrings, e.g. 101,011")
    g.add_argument("-r", "--iterations", "--main-reps", dest="iterations", type=int, default=1)
    g.add_argument("--out")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.set_defaults(func=cmd_grover)

    a = sub.add_parser("aps", help="approximate phase search on one instance", epilog=BIT_ORDER_NOTE)
    _add_run_flags(a)
    a.add_argument("--main-reps", help="global rounds, or 'auto' to pick round(sqrt(2^n))+-1 by KLD")
    a.add_argument("--phase-map", choices=("linear", "triangular"), default="linear")
    a.add_argument("--target", type=float, help="target cost / lambda (default: S, or total edge weight)")
    a.set_defaults(func=cmd_aps)

    e = sub.add_parser("eigen-scan", help="sweep lambda and report KLD peaks", epilog=BIT_ORDER_NOTE)
    _add_run_flags(e)
    e.add_argument("--main-reps", type=int, help="global rounds for --policy fixed")
    e.add_argument("--lambda-min", type=float)
    e.add_argument("--lambda-max", type=float)
    e.add_argument("--lambda-step", type=float, default=DEFAULT_STEP)
    e.add_argument("--policy", choices=POLICIES, default="degeneracy-adaptive")
    e.add_argument("--phase-map", choices=("auto", "linear", "triangular"), default="auto")
    e.add_argument("--space", choices=("work", "joint"), default="work",
                   help="N in sqrt(N/k): 2^n (work) or 2^(n+m) (joint)")
    e.add_argument("--tol", type=float, default=DEFAULT_TOL)
    e.add_argument("--min-prominence", type=float, default=DEFAULT_MIN_PROMINENCE)
    e.add_argument("--workers", type=int, default=1)
    e.set_defaults(func=cmd_eigen_scan)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
