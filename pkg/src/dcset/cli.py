"""Command-line front end: reproducible experiments with JSON/CSV outputs.

Every subcommand is a pure function of its flags (plus an optional JSON config
file supplying defaults); all randomness flows from --seed.  Exit codes:
0 = expectations met (including expected-fail modes), 1 = an asserted property
was violated, 2 = usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path


from . import formats
from .duality import MarginalCaps, SupportMask, duality_gap, max_coupling, min_cover
from .errors import (
    BadParameter,
    DcsetError,
    InsufficientDensity,
    ParseError,
    SweepTooLarge,
    UnknownGenerator,
)
from .generators import (
    Enumeration,
    Seed,
    brownian_minima,
    counterexample_mix,
    poisson_on_cantor,
    revealing_selectors,
    sample_uniform,
)
from .grid_measure import BinSet, UnitGrid, fat_cantor_build
from .selector import (
    Ensemble,
    interleave_containment,
    interleaved_enumeration,
    sample_ensemble,
    uniform_selector,
    verify_selector,
)
from .stats import (
    chi_square_independence,
    count_in,
    distinguish_counterexample,
    fragment_independence_test,
    ks_uniform,
    shift_hit_curve,
    stationarity_test,
)

GENERATORS = ("sample", "minima", "poisson", "counterexample", "revealing")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _echo_config(args: argparse.Namespace) -> None:
    config = {
        k: v for k, v in sorted(vars(args).items()) if k != "func" and v is not None
    }
    print(f"# config: {json.dumps(config, default=str, sort_keys=True)}", file=sys.stderr)


def _need_seed(args) -> int:
    if args.seed is None:
        raise BadParameter("--seed is required for stochastic subcommands")
    return args.seed


def _cantor_of(args):
    return fat_cantor_build(Fraction(args.gap), args.cantor_depth)


def _sweep_chunk(rows: int, cols: int, lo: int, hi: int) -> tuple[int, int, str]:
    nonzero = 0
    worst = Fraction(0)
    for bits in range(lo, hi):
        gap = duality_gap(SupportMask.from_bits(rows, cols, bits))
        if gap != 0:
            nonzero += 1
            worst = max(worst, abs(gap))
    return hi - lo, nonzero, str(worst)


def cmd_duality(args) -> int:
    if args.sweep:
        rows, cols = args.sweep
        if rows < 1 or cols < 1:
            raise BadParameter("sweep bounds must be positive")
        if rows * cols > 16:
            raise SweepTooLarge(f"{rows}x{cols} gives 2**{rows * cols} masks; limit is n*m <= 16")
        total_masks = 1 << (rows * cols)
        jobs = max(1, args.jobs)
        if jobs == 1:
            chunks = [_sweep_chunk(rows, cols, 0, total_masks)]
        else:
            bounds = [total_masks * k // jobs for k in range(jobs + 1)]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                chunks = list(
                    pool.map(_sweep_chunk, [rows] * jobs, [cols] * jobs, bounds[:-1], bounds[1:])
                )
        count = sum(c for c, _, _ in chunks)
        nonzero = sum(nz for _, nz, _ in chunks)
        worst = max((Fraction(w) for _, _, w in chunks), default=Fraction(0))
        report = {
            "mode": "sweep",
            "rows": rows,
            "cols": cols,
            "masks": count,
            "nonzero_gaps": nonzero,
            "max_gap": str(worst),
            "all_zero": nonzero == 0,
        }
        _emit(formats.dump_json(report), args.out)
        return 0 if nonzero == 0 else 1

    if not args.mask:
        raise BadParameter("give a mask file or --sweep n m")
    mask = formats.parse_mask(Path(args.mask).read_text())
    if args.row_caps or args.col_caps:
        if not (args.row_caps and args.col_caps):
            raise BadParameter("--row-caps and --col-caps must be given together")
        caps = MarginalCaps(
            formats.parse_caps_side(Path(args.row_caps).read_text(), mask.rows),
            formats.parse_caps_side(Path(args.col_caps).read_text(), mask.cols),
        )
    else:
        caps = MarginalCaps.uniform(mask.rows, mask.cols)
    value, coupling = max_coupling(mask, caps)
    cover_cost, cover = min_cover(mask, caps)
    gap = duality_gap(mask, caps)
    report = {
        "mode": "single",
        "rows": mask.rows,
        "cols": mask.cols,
        "coupling_value": str(value),
        "cover_value": str(cover_cost),
        "gap": str(gap),
        "coupling": formats.coupling_to_json(coupling),
        "cover": formats.cover_to_json(cover, caps),
    }
    _emit(formats.dump_json(report), args.out)
    return 0 if gap == 0 else 1


def cmd_simulate(args) -> int:
    seed = _need_seed(args)
    name = args.generator
    if name not in GENERATORS:
        raise UnknownGenerator(f"unknown generator {name!r}; known: {', '.join(GENERATORS)}")
    _echo_config(args)
    if name == "sample":
        text = formats.enumeration_to_csv(sample_uniform(args.depth, Seed(seed)))
    elif name == "minima":
        text = formats.enumeration_to_csv(brownian_minima(args.steps, Seed(seed)))
    elif name == "poisson":
        points = poisson_on_cantor(_cantor_of(args), Seed(seed))
        enum = Enumeration(points, depth=len(points), provenance="poisson")
        text = formats.enumeration_to_csv(enum)
    elif name == "counterexample":
        text = formats.enumeration_to_csv(
            counterexample_mix(args.depth, _cantor_of(args), Seed(seed))
        )
    else:
        text = formats.revealing_to_csv(revealing_selectors(args.depth, Seed(seed)))
    _emit(text, args.out)
    return 0


def cmd_distinguish(args) -> int:
    seed = _need_seed(args)
    report = distinguish_counterexample(
        _cantor_of(args), args.depth, args.replicas, seed,
        level=args.level, jobs=max(1, args.jobs),
    )
    payload = formats.report_to_json(report)
    payload["expected_outcome"] = "reject"
    _emit(formats.dump_json(payload), args.out)
    if args.csv:
        Path(args.csv).write_text(formats.report_to_csv(report))
    return 0 if report.rejected else 1


_OBSERVABLES = ("count-half", "count-cantor")


def cmd_stationarity(args) -> int:
    seed = _need_seed(args)
    cantor = _cantor_of(args)
    if args.gen == "sample":
        make = lambda s: sample_uniform(args.depth, s)
    elif args.gen == "minima":
        make = lambda s: brownian_minima(args.steps, s)
    elif args.gen == "counterexample":
        make = lambda s: counterexample_mix(args.depth, cantor, s)
    else:
        raise UnknownGenerator(f"unknown generator {args.gen!r}")
    observable_name = args.observable or (
        "count-cantor" if args.gen == "counterexample" else "count-half"
    )
    if observable_name == "count-half":
        observable = count_in(BinSet(UnitGrid(2), frozenset({0})))
    elif observable_name == "count-cantor":
        observable = count_in(cantor)
    else:
        raise BadParameter(f"unknown observable {observable_name!r}; known: {_OBSERVABLES}")
    expect = args.expect or ("fail" if args.gen == "counterexample" else "pass")
    report = stationarity_test(
        make, observable, args.replicas, seed, level=args.level, jobs=max(1, args.jobs)
    )
    payload = formats.report_to_json(report)
    payload["expected_outcome"] = expect
    payload["observable"] = observable_name
    _emit(formats.dump_json(payload), args.out)
    if args.csv:
        Path(args.csv).write_text(formats.report_to_csv(report))
    return 0 if report.passed == (expect == "pass") else 1


def cmd_independence(args) -> int:
    seed = _need_seed(args)
    kind = {"sample": "sample", "minima": "walk"}.get(args.gen)
    if kind is None:
        raise UnknownGenerator(f"unknown generator {args.gen!r}")
    cuts = [float(Fraction(c)) for c in args.cuts.split(",")]
    report = fragment_independence_test(
        kind, cuts, args.replicas, seed, level=args.level, steps=args.steps
    )
    _emit(formats.dump_json(formats.report_to_json(report)), args.out)
    if args.csv:
        Path(args.csv).write_text(formats.report_to_csv(report))
    return 0 if report.passed else 1


def cmd_shifthit(args) -> int:
    seed = _need_seed(args)
    grid = UnitGrid(args.grid)
    if args.bins:
        members = frozenset(int(b) for b in args.bins.split(","))
    else:
        members = frozenset(range(0, grid.n, 2))
    region = BinSet(grid, members)
    depths = [int(d) for d in args.depths.split(",")]
    curve = shift_hit_curve(region, depths, args.shifts, seed)
    _emit(formats.dump_json(formats.curve_to_json(curve)), args.out)
    if args.csv:
        Path(args.csv).write_text(formats.curve_to_csv(curve))
    means_ok = all(
        abs(mean - exp) <= 0.1 * exp for mean, exp in zip(curve.means, curve.expected)
    )
    growing = all(a < b for a, b in zip(curve.means, curve.means[1:]))
    return 0 if (means_ok and growing and curve.medians_nondecreasing) else 1


def cmd_selector(args) -> int:
    seed = _need_seed(args)
    grid = UnitGrid(args.grid)
    if args.gen == "sample":
        ensemble = sample_ensemble(args.depth, args.replicas, grid, seed)
    elif args.gen == "sample-upper":
        # Deliberately thin ensemble: all points in (1/2, 1), lower bins empty.
        def upper(s):
            pts = 0.5 + 0.5 * sample_uniform(args.depth, s).points
            return Enumeration(pts, depth=args.depth, provenance="sample-upper")

        ensemble = Ensemble.generate(upper, args.replicas, grid, seed)
    else:
        raise UnknownGenerator(f"unknown generator {args.gen!r}")
    expect = args.expect or "pass"
    try:
        table = uniform_selector(ensemble, Seed(seed))
    except InsufficientDensity as exc:
        payload = {
            "outcome": "obstruction",
            "cover": {"U_size": len(exc.cover.U), "V": sorted(exc.cover.V)},
            "cover_cost": str(exc.cost),
            "thin_bins": sorted(exc.thin_bins),
        }
        _emit(formats.dump_json(payload), args.out)
        return 0 if expect == "obstruction" else 1
    report = ks_uniform(table.values, level=args.level, seed=seed)
    sound = verify_selector(ensemble, table)
    if args.csv:
        Path(args.csv).write_text(formats.selector_to_csv(table))
    payload = formats.report_to_json(report)
    payload["outcome"] = "pass" if (report.passed and sound) else "fail"
    payload["membership_exact"] = sound
    _emit(formats.dump_json(payload), args.out)
    return 0 if (payload["outcome"] == expect) else 1


def cmd_enumerate(args) -> int:
    seed = _need_seed(args)
    ensemble = sample_ensemble(args.depth, args.replicas, UnitGrid(args.grid), seed)
    tables = interleaved_enumeration(ensemble, args.rounds, UnitGrid(args.coarse), Seed(seed))
    contained = interleave_containment(ensemble, tables)
    all_contained = bool(contained.all())
    by_round = [bool(contained[:, j].all()) for j in range(contained.shape[1])]
    first_bins = ensemble.grid.bins(tables[0].values)
    steps = []
    for j in range(1, args.rounds + 1):
        even = tables[2 * j - 1]
        entry = {"table": 2 * j, "ks_statistic": None, "chi2_statistic": None}
        ks = ks_uniform(even.values, level=args.level, seed=seed)
        entry["ks_statistic"] = ks.statistic
        entry["ks_passed"] = ks.passed
        try:
            chi = chi_square_independence(
                first_bins, ensemble.grid.bins(even.values),
                ensemble.grid.n, ensemble.grid.n, args.level, seed,
            )
            entry["chi2_statistic"] = chi.statistic
            entry["chi2_passed"] = chi.passed
        except DcsetError as exc:
            entry["chi2_skipped"] = str(exc)
        steps.append(entry)
    payload = {
        "rounds": args.rounds,
        "replicas": args.replicas,
        "containment": all_contained,
        "containment_by_round": by_round,
        "steps": steps,
    }
    _emit(formats.dump_json(payload), args.out)
    return 0 if all_contained else 1


def cmd_cantor(args) -> int:
    cantor = _cantor_of(args)
    _emit(formats.dump_json(formats.cantor_to_json(cantor)), args.out)
    print(
        f"# fat Cantor: depth {cantor.depth}, gap {cantor.gap_measure}, "
        f"measure {cantor.measure}",
        file=sys.stderr,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="root seed (required for stochastic commands)")
    common.add_argument("--jobs", type=int, default=1, help="replica-level parallelism")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--level", type=float, default=0.01, help="significance level")
    common.add_argument("--config", default=None, help="JSON file with flag defaults")

    cantorish = argparse.ArgumentParser(add_help=False)
    cantorish.add_argument("--gap", default="1/2", help="fat-Cantor target gap p/q")
    cantorish.add_argument("--cantor-depth", type=int, default=10, help="fat-Cantor construction depth")

    parser = argparse.ArgumentParser(
        prog="dcset",
        description="Exact marginal/cover duality, random-set simulators, selectors and tests.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("duality", parents=[common], help="solve one mask or sweep all masks")
    p.add_argument("mask", nargs="?", help="mask file: 'n m' then rows of 0/1")
    p.add_argument("--sweep", nargs=2, type=int, metavar=("N", "M"), help="sweep all masks up to n*m <= 16")
    p.add_argument("--row-caps", help="CSV 'index,p/q' for row budgets")
    p.add_argument("--col-caps", help="CSV 'index,p/q' for column budgets")
    p.set_defaults(func=cmd_duality)

    p = sub.add_parser("simulate", parents=[common, cantorish], help="write one truncated enumeration")
    p.add_argument("generator", help=f"one of: {', '.join(GENERATORS)}")
    p.add_argument("--depth", type=int, default=100)
    p.add_argument("--steps", type=int, default=10000)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("distinguish", parents=[common, cantorish], help="tell the counterexample from the sample")
    p.add_argument("--depth", type=int, default=200)
    p.add_argument("--replicas", type=int, default=500)
    p.add_argument("--csv", default=None, help="also write the report as flat CSV here")
    p.set_defaults(func=cmd_distinguish, level=1e-6)

    p = sub.add_parser("stationarity", parents=[common, cantorish], help="two-sample shift-invariance test")
    p.add_argument("--gen", default="sample", help="sample | minima | counterexample")
    p.add_argument("--observable", default=None, help="count-half | count-cantor")
    p.add_argument("--expect", choices=("pass", "fail"), default=None,
                   help="expected outcome (default: fail for counterexample, else pass)")
    p.add_argument("--depth", type=int, default=200)
    p.add_argument("--steps", type=int, default=4096)
    p.add_argument("--replicas", type=int, default=400)
    p.add_argument("--csv", default=None, help="also write the report as flat CSV here")
    p.set_defaults(func=cmd_stationarity)

    p = sub.add_parser("independence", parents=[common], help="fragment independence test")
    p.add_argument("--gen", default="sample", help="sample | minima")
    p.add_argument("--cuts", default="0,1/2,1", help="comma-separated cut points")
    p.add_argument("--replicas", type=int, default=400)
    p.add_argument("--steps", type=int, default=2048)
    p.add_argument("--csv", default=None, help="also write the report as flat CSV here")
    p.set_defaults(func=cmd_independence)

    p = sub.add_parser("shifthit", parents=[common], help="hit counts of shifted dyadic prefixes")
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--bins", default=None, help="comma-separated bin indices (default every other bin)")
    p.add_argument("--depths", default="64,256,1024")
    p.add_argument("--shifts", type=int, default=200)
    p.add_argument("--csv", default=None, help="also write the curve as CSV here")
    p.set_defaults(func=cmd_shifthit)

    p = sub.add_parser("selector", parents=[common], help="uniform selector over a sample ensemble")
    p.add_argument("--gen", default="sample", help="sample | sample-upper (thin, for obstructions)")
    p.add_argument("--depth", type=int, default=64)
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--replicas", type=int, default=5000)
    p.add_argument("--expect", choices=("pass", "obstruction"), default=None)
    p.add_argument("--csv", default=None, help="write the selector table as CSV here")
    p.set_defaults(func=cmd_selector)

    p = sub.add_parser("enumerate", parents=[common], help="interleaved enumeration with containment check")
    p.add_argument("--rounds", type=int, default=10)
    # Conditioning cells shrink to single replicas, so every replica must
    # cover every bin: depth far above grid*log(grid) keeps that sure.
    p.add_argument("--depth", type=int, default=256)
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--coarse", type=int, default=2)
    p.add_argument("--replicas", type=int, default=500)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("cantor", parents=[common, cantorish], help="build and serialize a fat Cantor set")
    p.set_defaults(func=cmd_cantor)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    # Config files supply flag values; explicitly passed flags win.
    if getattr(args, "config", None):
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: bad --config: {exc}", file=sys.stderr)
            return 2
        for key, value in config.items():
            dest = key.replace("-", "_")
            if f"--{key.replace('_', '-')}" in argv:
                continue
            if hasattr(args, dest):
                setattr(args, dest, value)
    try:
        return args.func(args)
    except (ParseError, SweepTooLarge, UnknownGenerator, BadParameter) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DcsetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
