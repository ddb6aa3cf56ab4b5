"""``lp-imager`` command line.

Exit codes: 0 success, 1 validation warnings, 2 invalid arguments, 3 I/O or
file-format failure, 4 receptive field above the cell cap, 5 no objective
frame available (neither ``--z`` nor a box for ``--auto-frame``).

Human-readable summaries go to stdout; warnings go to stderr; machine-readable
output only to files.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import costmodel
from .bench import run_bench
from .field import DEFAULT_CELL_CAP, FieldCapError, FieldSpec, build_basis, count_G, field_size
from .generator import GeneratorParams, ProblemFormatError, generate, read_problem, write_problem
from .image import build_image_sequential
from .model import (
    DEFAULT_EPS_FEAS,
    DEFAULT_EPS_REC,
    DEFAULT_EPS_SIGMA,
    ObjectiveFrame,
    build_frame,
    membership,
    validate_problem,
)
from .parallel import BACKENDS, STRATEGIES, build_image_parallel
from .projection import ProjectionContext

EXIT_OK, EXIT_WARN, EXIT_USAGE, EXIT_IO, EXIT_CAP, EXIT_FRAME = 0, 1, 2, 3, 4, 5
CAP_ENV = "LP_IMAGER_MAX_CELLS"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("worker counts must be positive")
    return vals


def _positive_float(text: str) -> float:
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return val


def _positive_int(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return val


def _cell_cap(args) -> int:
    if args.max_cells is not None:
        return args.max_cells
    env = os.environ.get(CAP_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise CliError(EXIT_USAGE, f"{CAP_ENV} must be an integer, got {env!r}") from None
    return DEFAULT_CELL_CAP


def _load(path):
    try:
        return read_problem(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from None
    except ProblemFormatError as exc:
        raise CliError(EXIT_IO, f"{path}: {exc}") from None


def _check_z(bundle, frame: ObjectiveFrame, samples: int = 1000) -> None:
    p = bundle.problem
    points = []
    if bundle.interior_point is not None:
        points.append(np.asarray(bundle.interior_point))
    if bundle.box is not None:
        rng = np.random.default_rng(0)
        points.extend(x for x in bundle.box.sample(rng, samples) if membership(p, x))
    above = [x for x in points if frame.level(x) > 0]
    if above:
        _warn(f"{len(above)} sampled feasible point(s) lie above the objective hyperplane, e.g. {above[0].tolist()}")


def _frame(args, bundle) -> ObjectiveFrame:
    p = bundle.problem
    if args.z is not None:
        if len(args.z) != p.n:
            raise CliError(EXIT_USAGE, f"--z has {len(args.z)} coordinates, problem has n={p.n}")
        frame = ObjectiveFrame(p.c, np.array(args.z))
        _check_z(bundle, frame)
        return frame
    if args.auto_frame is None:
        raise CliError(EXIT_FRAME, "no objective frame: pass --z or --auto-frame MARGIN")
    if bundle.box is None:
        raise CliError(EXIT_FRAME, "--auto-frame needs a problem file with a 'box'")
    anchor = {"origin": None, "box-center": bundle.box.center, "feasible": bundle.interior_point}[args.anchor]
    if args.anchor == "feasible" and anchor is None:
        raise CliError(EXIT_FRAME, "--anchor feasible needs a 'feasible_point' in the problem file")
    try:
        return build_frame(p, bundle.box, args.auto_frame, anchor=anchor)
    except ValueError as exc:
        raise CliError(EXIT_FRAME, str(exc)) from None


def _field(args, frame, cap):
    spec = FieldSpec(frame.z, args.eta, args.delta)
    try:
        size = field_size(spec, cap=cap)
    except FieldCapError as exc:
        raise CliError(EXIT_CAP, str(exc)) from None
    return spec, size


def cmd_gen(args) -> int:
    try:
        params = GeneratorParams(box_hi=args.box_hi, slack_margin=args.slack_margin, coeff_range=(args.coeff_lo, args.coeff_hi))
        bundle = generate(args.n, args.m_extra, args.seed, params)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    try:
        write_problem(bundle, args.out)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from None
    p = bundle.problem
    print(f"wrote {args.out}: n={p.n} m={p.m} box=[0, {args.box_hi}]^{p.n} seed={args.seed}")
    return EXIT_OK


def cmd_image(args) -> int:
    bundle = _load(args.problem)
    p = bundle.problem
    frame = _frame(args, bundle)
    cap = _cell_cap(args)
    spec, size = _field(args, frame, cap)
    basis = build_basis(p.c)
    ctx = ProjectionContext(p, frame, eps_feas=args.eps_feas, eps_rec=args.eps_rec, eps_sigma=args.eps_sigma)
    if args.workers == 1 and args.strategy is None:
        image = build_image_sequential(p, frame, spec, basis, cap=cap, ctx=ctx)
    else:
        image = build_image_parallel(p, frame, spec, basis, args.workers, args.strategy or "point-split", args.backend, cap=cap, ctx=ctx)
    try:
        image.write(args.out, args.format)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from None
    low = image.min_finite()
    print(f"receptive points K_G = {size}")
    print(f"hits = {image.hits}, misses = {image.misses}")
    print(f"min finite distance = {low if low is not None else 'none'}")
    print(f"wall time = {image.wall_time:.3f} s ({image.mode}, workers={image.workers})")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    bundle = _load(args.problem)
    p = bundle.problem
    report = validate_problem(p, tol=args.tol)
    clean = report.ok
    if bundle.interior_point is not None and not membership(p, bundle.interior_point):
        _warn("feasible_point violates the constraints")
        clean = False
    print(f"n={p.n} m={p.m}")
    print(f"zero rows: {report.row_zero_violations or 'none'}")
    print(f"coincident hyperplane pairs: {report.degenerate_pairs or 'none'}")
    print("status: clean" if clean else "status: warnings")
    return EXIT_OK if clean else EXIT_WARN


def cmd_bench(args) -> int:
    bundle = _load(args.problem)
    p = bundle.problem
    frame = _frame(args, bundle)
    spec, size = _field(args, frame, _cell_cap(args))
    basis = build_basis(p.c)
    report = run_bench(p, frame, spec, basis, args.workers_list, args.strategy, args.backend, repeats=args.repeats)
    try:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.report}: {exc}") from None
    print(f"K_G = {size}, strategy = {report['strategy']}, cores = {report['cores']}")
    for run in report["runs"]:
        print(f"  workers={run['workers']:>3}  wall={run['wall_time']:.3f} s  speedup={run['speedup']:.2f}")
    print(f"images identical: {report['identical_images']}")
    if report["fit"] is not None:
        fit = report["fit"]
        print(f"fitted t_c={fit['t_c']:.3g} s t_map={fit['t_map']:.3g} s t_a={fit['t_a']:.3g} s")
        print(f"predicted L_max = {report['predicted_L_max']}")
        for w in fit["warnings"]:
            _warn(w)
    print(f"wrote {args.report}")
    return EXIT_OK


def cmd_cost(args) -> int:
    n, m = args.n, args.m
    params = costmodel.CostParams.from_machine(n, m, args.tau_op, args.tau_tr, args.D)
    print(f"c_G   = {count_G(n)}")
    print(f"c_Fk  = {costmodel.count_Fk(n, m)}")
    print(f"c_Map = {costmodel.count_Map(n, m)}")
    print(f"t_c = {params.t_c:.6g} s, t_Map = {params.t_map:.6g} s, t_a = {params.t_a:.6g} s")
    print(f"L_max = {costmodel.scalability_bound_analytic(n, m, args.tau_op, args.tau_tr, args.D):.6g}")
    return EXIT_OK


def _add_frame_args(sp) -> None:
    sp.add_argument("problem", help="problem file (.lp.json)")
    sp.add_argument("--eta", type=_positive_int, required=True, help="field rank (half-width in cells)")
    sp.add_argument("--delta", type=_positive_float, required=True, help="field density (cell edge)")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--z", type=_floats, help="explicit field centre, comma-separated")
    group.add_argument("--auto-frame", type=_positive_float, metavar="MARGIN", help="place the hyperplane MARGIN above the box")
    sp.add_argument("--anchor", choices=("origin", "box-center", "feasible"), default="origin",
                    help="with --auto-frame: point projected onto the hyperplane to give z")
    sp.add_argument("--backend", choices=BACKENDS, default=None)
    sp.add_argument("--max-cells", type=_positive_int, default=None, help=f"cell cap (default ${CAP_ENV} or 2^40)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lp-imager", description="Build images of linear programs.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", help="generate a random bounded LP")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m-extra", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--box-hi", type=float, default=GeneratorParams.box_hi)
    sp.add_argument("--slack-margin", type=float, default=GeneratorParams.slack_margin)
    sp.add_argument("--coeff-lo", type=float, default=GeneratorParams.coeff_range[0])
    sp.add_argument("--coeff-hi", type=float, default=GeneratorParams.coeff_range[1])
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("image", help="build the image of a problem")
    _add_frame_args(sp)
    sp.add_argument("--workers", type=_positive_int, default=1)
    sp.add_argument("--strategy", choices=STRATEGIES, default=None)
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--eps-feas", type=float, default=DEFAULT_EPS_FEAS)
    sp.add_argument("--eps-rec", type=float, default=DEFAULT_EPS_REC)
    sp.add_argument("--eps-sigma", type=float, default=DEFAULT_EPS_SIGMA)
    sp.set_defaults(func=cmd_image)

    sp = sub.add_parser("validate", help="check a problem file")
    sp.add_argument("problem")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("bench", help="time image builds over worker counts")
    _add_frame_args(sp)
    sp.add_argument("--workers-list", type=_ints, default=[1, 2, 4, 8])
    sp.add_argument("--strategy", choices=STRATEGIES, default="point-split")
    sp.add_argument("--repeats", type=_positive_int, default=1)
    sp.add_argument("--report", required=True)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("cost", help="evaluate operation counts and the scalability bound")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--tau-op", type=_positive_float, required=True)
    sp.add_argument("--tau-tr", type=float, default=0.0)
    sp.add_argument("--D", type=float, default=0.0)
    sp.set_defaults(func=cmd_cost)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "cost" and (args.n < 2 or args.m < 1 or args.tau_tr < 0 or args.D < 0):
            raise CliError(EXIT_USAGE, "cost needs n >= 2, m >= 1 and nonnegative --tau-tr/--D")
        return args.func(args)
    except CliError as exc:
        print(f"lp-imager: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
