"""Command-line front end for reproducible LON campaigns.

Subcommands map one-to-one onto the pipeline stages: gen, build, filter,
detect, nulltest, assort, anova, report. Flags may also be supplied through
a JSON config file (--config); explicit flags win over config values.

Exit codes: 0 success, 2 usage error, 3 data error (missing or malformed
inputs, size-guard breaches), 4 compute error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import campaign
from .community import GREEDY, MCL, SPINGLASS
from .errors import ComputeError, ParseError, QaplonError, SizeGuardError
from .generators import INSTANCE_CLASSES

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_COMPUTE = 4


def _add_config_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, default=None,
                   help="JSON file with default values for this subcommand's "
                        "flags; explicit flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qaplon",
        description="exact local optima networks for small QAP instances",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate seeded QAP instances")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--class", dest="instance_class", required=True,
                   choices=INSTANCE_CLASSES)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--count", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--coord-range", type=float, default=100.0)
    p.add_argument("--flow-max", type=int, default=100)
    p.add_argument("--sparsity", type=float, default=0.6)
    p.add_argument("--amplitude", type=float, default=4.0)
    _add_config_flag(p)

    p = sub.add_parser("build", help="build exact LONs from instance files")
    p.add_argument("--instances", required=True, nargs="+")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--force-large", action="store_true",
                   help=f"lift the default size guard of n <= {campaign.CLI_MAX_N}")
    _add_config_flag(p)

    p = sub.add_parser("filter", help="symmetrize and quantile-filter LONs")
    p.add_argument("--lons", required=True, nargs="+")
    p.add_argument("--out", required=True, type=Path)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--pi", type=float, default=None,
                   help="fixed filtering quantile in [0, 1]")
    g.add_argument("--auto", action="store_true",
                   help="largest grid quantile preserving connectivity (default)")
    p.add_argument("--grid-step", type=float, default=0.01)
    _add_config_flag(p)

    p = sub.add_parser("detect", help="run a community detector")
    p.add_argument("--graphs", required=True, nargs="+",
                   help="filtered .ulon.json inputs (greedy/spinglass) or "
                        "directed .lon.json inputs (mcl)")
    p.add_argument("--algo", required=True, choices=(GREEDY, SPINGLASS, MCL))
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-k", type=int, default=20)
    p.add_argument("--sweeps", type=int, default=2000)
    p.add_argument("--t-initial", type=float, default=0.5)
    p.add_argument("--cooling", type=float, default=0.995)
    p.add_argument("--inflation", type=float, default=2.0)
    p.add_argument("--prune-eps", type=float, default=1e-5)
    p.add_argument("--max-iters", type=int, default=200)
    _add_config_flag(p)

    p = sub.add_parser("nulltest", help="modularity significance vs rewired nulls")
    p.add_argument("--filtered", required=True, nargs="+")
    p.add_argument("--partitions", required=True, type=Path)
    p.add_argument("--detector", required=True, choices=(GREEDY, SPINGLASS))
    p.add_argument("--m", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--dump-samples", action="store_true")
    _add_config_flag(p)

    p = sub.add_parser("assort", help="fitness assortativity reports")
    p.add_argument("--lons", required=True, nargs="+")
    p.add_argument("--filtered", type=Path, default=None)
    p.add_argument("--out", required=True, type=Path)
    _add_config_flag(p)

    p = sub.add_parser("anova", help="permutation ANOVA over stored Q scores")
    p.add_argument("--partitions", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--n-perm", type=int, default=999)
    p.add_argument("--seed", type=int, default=0)
    _add_config_flag(p)

    p = sub.add_parser("report", help="summary tables and figures")
    p.add_argument("--campaign", required=True, type=Path)
    p.add_argument("--out", type=Path, default=None)
    _add_config_flag(p)

    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    cfg_path = getattr(args, "config", None)
    if cfg_path is None:
        return args
    try:
        cfg = json.loads(Path(cfg_path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read config {cfg_path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ParseError(f"config {cfg_path} must hold a JSON object")
    # re-parse with config values as defaults so explicit flags stay on top
    subparser = None
    for action in parser._subparsers._group_actions:  # noqa: SLF001
        subparser = action.choices.get(args.command)
    unknown = set(cfg) - {a.dest for a in subparser._actions}  # noqa: SLF001
    if unknown:
        raise ParseError(f"config {cfg_path} has unknown keys: {sorted(unknown)}")
    subparser.set_defaults(**cfg)
    return parser.parse_args(argv)


def _run(args: argparse.Namespace) -> None:
    if args.command == "gen":
        paths = campaign.stage_gen(
            args.out, args.instance_class, args.n, args.count, args.seed,
            coord_range=args.coord_range, flow_max=args.flow_max,
            reallike_sparsity=args.sparsity, reallike_amplitude=args.amplitude,
        )
        print(f"wrote {len(paths)} instances to {args.out}")
    elif args.command == "build":
        paths = campaign.stage_build(args.instances, args.out,
                                     workers=args.workers,
                                     force_large=args.force_large)
        print(f"built {len(paths)} LONs into {args.out}")
    elif args.command == "filter":
        pi = None if (args.auto or args.pi is None) else args.pi
        paths = campaign.stage_filter(args.lons, args.out, pi=pi,
                                      grid_step=args.grid_step)
        print(f"filtered {len(paths)} networks into {args.out}")
    elif args.command == "detect":
        if args.algo == SPINGLASS:
            options = {"max_k": args.max_k, "sweeps": args.sweeps,
                       "t_initial": args.t_initial, "cooling": args.cooling}
        elif args.algo == MCL:
            options = {"inflation": args.inflation, "prune_eps": args.prune_eps,
                       "max_iters": args.max_iters}
        else:
            options = {}
        paths = campaign.stage_detect(args.graphs, args.algo, args.out,
                                      seed=args.seed, options=options)
        print(f"wrote {len(paths)} partitions into {args.out}")
    elif args.command == "nulltest":
        paths = campaign.stage_nulltest(args.filtered, args.partitions,
                                        args.detector, args.m, args.seed,
                                        args.out, dump_samples=args.dump_samples)
        print(f"wrote {len(paths)} significance reports into {args.out}")
    elif args.command == "assort":
        paths = campaign.stage_assort(args.lons, args.out,
                                      filtered_dir=args.filtered)
        print(f"wrote {len(paths)} assortativity reports into {args.out}")
    elif args.command == "anova":
        out = campaign.stage_anova(args.partitions, args.out,
                                   n_perm=args.n_perm, seed=args.seed)
        print(f"wrote {out}")
    elif args.command == "report":
        out = campaign.stage_report(args.campaign, args.out)
        print(f"wrote {out}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, list(sys.argv[1:] if argv is None else argv))
        _run(args)
    except (ParseError, FileNotFoundError, SizeGuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ComputeError, QaplonError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
