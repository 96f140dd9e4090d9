"""``locklab`` command-line interface.

Exit codes: 0 success (including an expected locking termination),
1 invalid input, 2 acceptance failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from locklab.config import CASE_DESCRIPTIONS, CASES, ConfigError, RunConfig, SweepSpec, load_config, parse_range
from locklab.errors import ParameterError
from locklab.materials import MaterialModel, ModelKind
from locklab.runner import execute

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ACCEPTANCE = 2


def _model_from_args(args):
    kind = ModelKind(args.model)
    if kind is ModelKind.NEO_HOOKEAN:
        return MaterialModel.neo_hookean(mu0=args.model_mu0)
    a = 5.0 if args.a is None else args.a
    if kind is ModelKind.GENT:
        return MaterialModel.gent(a, mu0=args.model_mu0)
    return MaterialModel.kilian(a, mu0=args.model_mu0, alpha=args.alpha, f=args.f)


def _sweep_config(args):
    if args.kind is None:
        raise ConfigError("sweep needs --kind", source="command line")
    text = args.gamma if args.gamma is not None else args.range
    if text is None:
        raise ConfigError("sweep needs --gamma or --range START..STOP", source="command line")
    try:
        rng = parse_range(text)
        spec = SweepSpec(args.kind, rng, args.steps)
        return RunConfig(model=_model_from_args(args), command="sweep", name=args.name or f"sweep-{args.kind}", sweeps=(spec,))
    except (ValueError, ParameterError) as exc:
        raise ConfigError(str(exc), source="command line") from None


def resolve(target, args) -> RunConfig:
    if target == "sweep":
        cfg = _sweep_config(args)
    elif target in CASES:
        cfg = CASES[target]
    elif os.path.isfile(target):
        cfg = load_config(target)
    else:
        raise ConfigError(f"{target!r} is neither a case name nor a config file; see 'locklab list-cases'", source="command line")
    if args.mode is not None:
        cfg = cfg.with_mode(args.mode)
    return cfg


def cmd_run(args):
    try:
        cfg = resolve(args.target, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.print_config:
        sys.stdout.write(cfg.to_ini())
        return EXIT_OK
    out = execute(cfg, scale=args.mu0)
    os.makedirs(args.out, exist_ok=True)
    stem = out.name if args.mode is None else f"{out.name}-{cfg.mode.value}"
    csv_path = os.path.join(args.out, stem + ".csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(out.table.to_csv())
    print(f"wrote {csv_path} ({len(out.table.rows)} rows)")
    if out.report is not None:
        rep_path = os.path.join(args.out, stem + ".report.json")
        with open(rep_path, "w", encoding="utf-8") as fh:
            fh.write(out.report_json())
        print(f"wrote {rep_path}")
        for key in ("termination", "limiting_element", "locked_elements", "max_exp_le1"):
            if key in out.report:
                print(f"  {key}: {out.report[key]}")
    return EXIT_OK


def cmd_list(args):
    for name in sorted(CASES):
        print(f"{name:8s} {CASES[name].command:8s} {CASE_DESCRIPTIONS[name]}")
    return EXIT_OK


def cmd_verify(args):
    from locklab.acceptance import run_all

    results = run_all(quick=args.quick)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_ACCEPTANCE


class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors, keep exit code 2 for acceptance failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="locklab", description="Strain-locking hyperelasticity toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a library case, a config file, or an ad-hoc sweep")
    r.add_argument("target", help="case name (see list-cases), path to an INI config, or 'sweep'")
    r.add_argument("--mode", choices=("guarded", "unguarded"), default=None, help="override the locking mode")
    r.add_argument("--out", default=".", help="output directory (default: current)")
    r.add_argument("--mu0", type=float, default=1.0, help="multiply emitted stresses by this modulus")
    r.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
    g = r.add_argument_group("ad-hoc sweep")
    g.add_argument("--kind", choices=("shear", "uniaxial", "biaxial"))
    g.add_argument("--gamma", help="shear range START..STOP")
    g.add_argument("--range", help="control range START..STOP")
    g.add_argument("--steps", type=int, default=100)
    g.add_argument("--name", default=None)
    g.add_argument("--model", choices=[k.value for k in ModelKind], default="kilian")
    g.add_argument("-a", type=float, default=None, help="locking parameter (default 5)")
    g.add_argument("--alpha", type=float, default=0.0)
    g.add_argument("-f", type=float, default=0.0)
    g.add_argument("--model-mu0", type=float, default=1.0)
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--quick", action="store_true", help="fewer random samples")
    v.set_defaults(func=cmd_verify)

    lc = sub.add_parser("list-cases", help="list the built-in cases")
    lc.set_defaults(func=cmd_list)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run" and not args.mu0 > 0:
        print("error: --mu0 must be positive", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
