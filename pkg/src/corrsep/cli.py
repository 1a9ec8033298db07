"""Command-line interface.

Exit codes: 0 success / not detected, 2 entanglement detected (``detect``),
1 error. Machine-readable output goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import states as st
from .bases import canonical_basis, sic_basis, validate_basis
from .criteria import DETECTION_TOL, THRESHOLD_TOL, canonical_correlation, gap_from_tensor, make_criterion, threshold_scan
from .exceptions import CorrsepError
from .filtering import local_filter_normal_form
from .io import dump_state, load_state, state_to_dict
from .witnesses import _cplx_to_json, build_witness, export_witness, load_witness, witness_expectation

EXIT_OK, EXIT_ERROR, EXIT_DETECTED = 0, 1, 2


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _load(args) -> st.DensityMatrix:
    return load_state(_read_text(args.state), rounded=args.rounded)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _criterion_from_args(args):
    if args.x is not None or args.y is not None:
        if args.x is None or args.y is None:
            raise CorrsepError("--x and --y must be given together")
        return make_criterion("family", args.x, args.y, tol=args.tol), f"family(x={args.x:g},y={args.y:g})"
    xs = _floats(args.xs) if getattr(args, "xs", None) else None
    return make_criterion(args.criterion, xs=xs, tol=args.tol), args.criterion


# ---------------------------------------------------------------------------

def cmd_state(args) -> int:
    gen = args.generator
    if gen == "rudolph":
        rho = st.rudolph_state(args.r, args.s, args.t)
    elif gen == "chessboard":
        params = {k: getattr(args, k) for k in "abcdmnst"}
        params = {k: (st.CHESSBOARD_PARAMS[k] if v is None else v) for k, v in params.items()}
        rho = st.chessboard_state(**params)
    elif gen == "upb":
        rho = st.upb_state(args.kind)
    elif gen == "bell":
        rho = st.bell_state()
    elif gen == "ghz":
        rho = st.ghz_state(args.parties)
    elif gen == "w":
        rho = st.w_state(args.parties)
    elif gen == "mixed":
        rho = st.maximally_mixed(_ints(args.dims))
    elif gen == "random-product":
        rho = st.random_product_state(_ints(args.dims), args.seed, pure=args.pure)
    elif gen == "random-separable":
        rho = st.random_separable_state(_ints(args.dims), args.terms, args.seed)
    else:  # pragma: no cover - argparse restricts choices
        raise CorrsepError(f"unknown generator {gen!r}")
    if args.p is not None:
        rho = st.mix_with_white_noise(rho, args.p)
    sys.stdout.write(dump_state(rho) + "\n")
    return EXIT_OK


def cmd_detect(args) -> int:
    rho = _load(args)
    if args.witness:
        W = load_witness(_read_text(args.witness))
        value = witness_expectation(W, rho)
        detected = value < -args.tol
        _emit({"criterion": "witness", "params": [W.x, W.y], "expectation": value, "detected": detected, "tol": args.tol})
        print(f"witness(x={W.x:g},y={W.y:g}): Tr(W rho)={value:.6e} -> "
              f"{'ENTANGLED (detected)' if detected else 'not detected'}", file=sys.stderr)
        return EXIT_DETECTED if detected else EXIT_OK
    crit, _ = _criterion_from_args(args)
    report = crit(rho)
    _emit(report.to_dict())
    print(report.summary(), file=sys.stderr)
    return EXIT_DETECTED if report.detected else EXIT_OK


def scan_grid(rho, xs, ys) -> np.ndarray:
    C = canonical_correlation(rho)
    return np.array([[gap_from_tensor(C, x, y) for y in ys] for x in xs])


def cmd_scan(args) -> int:
    rho = _load(args)
    if args.steps < 2 or args.xmax <= args.xmin or args.ymax <= args.ymin:
        raise CorrsepError("scan ranges must have positive length and steps >= 2")
    if args.xmin < 0 or args.ymin < 0:
        raise CorrsepError("scan ranges must be nonnegative")
    xs = np.linspace(args.xmin, args.xmax, args.steps)
    ys = np.linspace(args.ymin, args.ymax, args.steps)
    f = scan_grid(rho, xs, ys)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["x", "y", "f"])
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            w.writerow([f"{x:.12g}", f"{y:.12g}", f"{f[i, j]:.12g}"])
    neg = int(np.sum(f < 0))
    print(f"scanned {f.size} points, {neg} in the detecting area (f < 0), min f = {f.min():.6e}", file=sys.stderr)
    return EXIT_OK


FAMILIES = {
    "pp": lambda: st.upb_family("pyramid"),
    "tiles": lambda: st.upb_family("tiles"),
    "chessboard": st.chessboard_family,
}


def cmd_threshold(args) -> int:
    family = FAMILIES[args.family]()
    crit, label = _criterion_from_args(args)
    res = threshold_scan(family, crit, tol=args.bisect_tol)
    p = None if res.p_star is None else round(res.p_star, 4)
    _emit({"family": args.family, "criterion": label, "p_star": p, "bracket": res.bracket})
    print(f"{args.family:10s} {label:24s} p* = {'never detected' if p is None else f'{p:.4f}'}", file=sys.stderr)
    return EXIT_OK


def cmd_witness(args) -> int:
    rho = _load(args)
    W = build_witness(rho, args.x, args.y)
    sys.stdout.write(export_witness(W) + "\n")
    print(f"Tr(W rho) = {witness_expectation(W, rho):.6e}", file=sys.stderr)
    return EXIT_OK


def cmd_filter(args) -> int:
    rho = _load(args)
    res = local_filter_normal_form(rho, args.tol, args.max_iter)
    _emit({
        "filtered": state_to_dict(res.filtered),
        "A": _cplx_to_json(res.A),
        "B": _cplx_to_json(res.B),
        "residual": res.residual,
        "iterations": res.iterations,
        "converged": res.converged,
    })
    print(f"filtering {'converged' if res.converged else 'did NOT converge'} after {res.iterations} "
          f"iterations, residual {res.residual:.3e}", file=sys.stderr)
    return EXIT_OK if res.converged else EXIT_ERROR


def cmd_bases_validate(args) -> int:
    basis = canonical_basis(args.d) if args.kind == "canonical" else sic_basis(args.d, args.kind.split("-")[1])
    rep = validate_basis(basis)
    _emit({"d": args.d, "kind": basis.kind, "size_ok": rep.size_ok,
           "orthonormality_defect": rep.orthonormality_defect,
           "hermiticity_defect": rep.hermiticity_defect, "ok": rep.ok})
    return EXIT_OK if rep.ok else EXIT_ERROR


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corrsep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_state_arg(p):
        p.add_argument("state", help="state JSON file ('-' for stdin)")
        p.add_argument("--rounded", action="store_true",
                       help="accept matrices printed with 4 decimals (looser PSD/trace checks)")

    def add_criterion_args(p):
        p.add_argument("--criterion", default="ccnr",
                       help="dv, ccnr, fei, esic, esic-direct, ppt, filtered-dv, optimal, kyfan, nuclear-lb")
        p.add_argument("--x", type=float, help="family parameter x (scales party A)")
        p.add_argument("--y", type=float, help="family parameter y (scales party B)")
        p.add_argument("--xs", help="comma-separated per-party scalings for multipartite criteria")
        p.add_argument("--tol", type=float, default=DETECTION_TOL, help="detection tolerance on the gap")

    p = sub.add_parser("state", help="write a benchmark state as JSON")
    p.add_argument("generator", choices=["rudolph", "chessboard", "upb", "bell", "ghz", "w", "mixed",
                                         "random-product", "random-separable"])
    for k in "rst":
        p.add_argument(f"--{k}", type=float, default=None)
    for k in "abcdmn":
        p.add_argument(f"--{k}", type=float, default=None)
    p.add_argument("--kind", choices=["tiles", "pyramid"], default="tiles")
    p.add_argument("--parties", type=int, default=3, help="number of qubits for ghz / w")
    p.add_argument("--dims", default="2,2")
    p.add_argument("--terms", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pure", action="store_true")
    p.add_argument("--p", type=float, default=None, help="mix with white noise: p*rho + (1-p)*1/D")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("detect", help="evaluate a criterion or a witness on a state")
    add_state_arg(p)
    add_criterion_args(p)
    p.add_argument("--witness", help="witness JSON file; evaluates Tr(W rho) instead of a criterion")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("scan", help="CSV grid of the family gap f(x, y)")
    add_state_arg(p)
    for k in ("xmin", "ymin"):
        p.add_argument(f"--{k}", type=float, default=0.0)
    for k in ("xmax", "ymax"):
        p.add_argument(f"--{k}", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=101)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("threshold", help="detection threshold p* along a noisy state family")
    p.add_argument("family", choices=sorted(FAMILIES))
    add_criterion_args(p)
    p.add_argument("--bisect-tol", type=float, default=THRESHOLD_TOL)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("witness", help="build the witness W^{xy}_O for a state")
    add_state_arg(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("filter", help="local filtering to maximally mixed marginals")
    add_state_arg(p)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("bases-validate", help="check orthonormality of an operator basis")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--kind", choices=["canonical", "sic-minus", "sic-plus"], default="canonical")
    p.set_defaults(func=cmd_bases_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "state" and args.generator == "rudolph":
        args.r, args.s, args.t = (v or 0.0 for v in (args.r, args.s, args.t))
    try:
        return args.func(args)
    except (CorrsepError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
