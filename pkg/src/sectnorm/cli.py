"""Command-line entry point.

Subcommands: extend (per-degree gap report), spectral (doubling-sequence
table for one section), perturb (perturbation neutrality table), check
(invariant self-test suite).  Exit codes: 0 all asserted invariants hold,
1 usage or config error, 2 an invariant failed.
"""

import argparse
import json
import sys

from .experiment import (
    ConfigError,
    InvariantViolation,
    extension_csv,
    extension_json,
    load_config,
    perturb_csv,
    perturb_json,
    run_check_suite,
    run_extension,
    run_perturbation_study,
    run_spectral_study,
    spectral_csv,
    spectral_json,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="sectnorm",
        description="Exact norms on graded section algebras over p-adic fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--depth", type=int, default=None, help="spectral depth override")
        sp.add_argument("--seed", type=int, default=None, help="seed override")

    common(sub.add_parser("extend", help="per-degree quotient/sup gap report"))
    sp = sub.add_parser("spectral", help="spectral doubling sequence for one section")
    common(sp)
    sp.add_argument("--section", default=None,
                    help="section literal (falls back to the config's 'section')")
    common(sub.add_parser("perturb", help="perturbation neutrality study"))
    sp = sub.add_parser("check", help="run the invariant suites")
    sp.add_argument("--seed", type=int, default=7)
    return parser


def _load(args) -> "ExperimentConfig":
    try:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from None
    if args.depth is not None:
        data["spectral_depth"] = args.depth
    if args.seed is not None:
        data["seed"] = args.seed
    return load_config(data)


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "check":
            results = run_check_suite(args.seed)
            failed = 0
            for name, ok, detail in results:
                line = f"{'ok' if ok else 'FAIL'}  {name}"
                if detail:
                    line += f"  ({detail})"
                print(line)
            failed = sum(1 for _, ok, _ in results if not ok)
            print(f"{len(results) - failed}/{len(results)} invariant suites passed")
            return 2 if failed else 0

        cfg = _load(args)
        if args.command == "extend":
            report = run_extension(cfg)
            text = (
                extension_csv(report)
                if args.format == "csv"
                else extension_json(report, cfg)
            )
        elif args.command == "spectral":
            literal = args.section or cfg.section
            if not literal:
                raise ConfigError("spectral needs --section or a 'section' config key")
            rows = run_spectral_study(cfg, literal)
            text = spectral_csv(rows) if args.format == "csv" else spectral_json(rows, cfg)
        elif args.command == "perturb":
            rows = run_perturbation_study(cfg)
            text = perturb_csv(rows) if args.format == "csv" else perturb_json(rows, cfg)
            if any(not r.equal for r in rows):
                _emit(text, args.out)
                print("perturbation neutrality violated", file=sys.stderr)
                return 2
        else:  # pragma: no cover
            raise ConfigError(f"unknown command {args.command}")
        _emit(text, args.out)
        return 0
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    except InvariantViolation as err:
        print(f"invariant failed: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
