from __future__ import annotations

import argparse
import sys

from .. import __version__
from ..errors import ConfigError, QuasiCommError
from .config import SUITES, TrialConfig
from .report import emit_report
from .suites import run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _parse_tol(raw: str) -> tuple[str, float]:
    name, sep, value = raw.partition("=")
    if not sep or not name:
        raise ConfigError(f"--tol expects name=value, got {raw!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise ConfigError(f"--tol value for {name!r} is not a number: {value!r}") from None


def _parse_grid(raw: str) -> tuple[complex, ...]:
    try:
        return tuple(complex(tok.strip().replace(" ", "")) for tok in raw.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"bad --eps-grid {raw!r}: {exc}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="verify",
        description="Seeded verification runs for commutator / quasi-commutator reductions.",
    )
    parser.add_argument("suite", choices=SUITES)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--dim1", type=int, default=4)
    parser.add_argument("--dim2", type=int, default=None, help="defaults to 3 (to --dim1 for the commuting suite)")
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--function", default="x2",
                        help="catalog name: exp, sin, sqrt, abs, identity, x2, x3, 3x2+x, poly:c0,c1,..., affine:m,f0")
    parser.add_argument("--ensemble", default=None,
                        help="HermitianGaussian, NormalRandom, DiagonalizableRandom or CommutingDiagonalPair")
    parser.add_argument("--eps-grid", default=None,
                        help="comma-separated complex shifts, e.g. --eps-grid=-0.5,0.1,1j")
    parser.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                        help="override a residual tolerance (repeatable)")
    parser.add_argument("--out", default=None, help="write the line-delimited JSON report here")
    parser.add_argument("--parallel", type=int, default=1, help="worker processes")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.parallel < 1:
            raise ConfigError("--parallel must be at least 1")
        config = TrialConfig(
            suite=args.suite,
            seed=args.seed,
            dim1=args.dim1,
            dim2=args.dim2 if args.dim2 is not None else (args.dim1 if args.suite == "commuting" else 3),
            ensemble=args.ensemble,
            function_name=args.function,
            trials=args.trials,
            tolerance_overrides=dict(_parse_tol(t) for t in args.tol),
            eps_grid=_parse_grid(args.eps_grid) if args.eps_grid else None,
        )
    except ConfigError as exc:
        print(f"verify: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        report = run_suite(config, parallel=args.parallel)
        if args.out:
            emit_report(report, args.out)
    except QuasiCommError as exc:
        print(f"verify: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED

    agg = report.aggregate
    status = "PASS" if report.all_passed else "FAIL"
    print(
        f"{status} {config.suite} f={config.function_name} ensemble={config.resolved_ensemble.value} "
        f"passed={agg['passed']}/{agg['total']} max_residual={agg['max_residual']} "
        f"min_margin={agg['min_margin']} ({report.duration_s:.2f}s)"
    )
    return EXIT_OK if report.all_passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
