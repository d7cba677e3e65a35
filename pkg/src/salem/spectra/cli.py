"""Command-line front end: one subcommand per module operation, CSV or JSON on stdout."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from collections.abc import Callable, Sequence
from fractions import Fraction
from typing import Any

from salem.spectra import census, diophantine, polynomials, quadform, spectrum
from salem.spectra.config import (
    MAX_PRECISION,
    MIN_PRECISION,
    OUTPUT_FORMATS,
    RunConfig,
    as_rational,
    resolve_budget,
)
from salem.spectra.errors import BudgetExceeded
from salem.spectra.reports import CountReport, Report, compute_hash, count_row

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3

# subcommands whose single-record result reads best as JSON
_JSON_DEFAULT = {"classify", "constants", "integralize", "compat"}
_RUN_FLAGS = {"subcommand", "out", "format", "threads", "budget", "precision", "verbose"}


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError as exc:
        msg = f"expected comma-separated integers, got {text!r}"
        raise argparse.ArgumentTypeError(msg) from exc


def _rational_list(text: str) -> list[Fraction]:
    try:
        return [as_rational(tok.strip()) for tok in text.split(",")]
    except ValueError as exc:
        msg = f"expected comma-separated rationals, got {text!r}"
        raise argparse.ArgumentTypeError(msg) from exc


def _region(text: str) -> diophantine.ConvexRegion:
    kind, _, params = text.partition(":")
    try:
        if kind == "unit_disk" and not params:
            return diophantine.ConvexRegion.unit_disk()
        if kind == "ellipse_sector":
            d1, d2 = (int(tok) for tok in params.split(","))
            return diophantine.ConvexRegion.ellipse_sector(d1, d2)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"malformed region {text!r}: {exc}") from exc
    raise argparse.ArgumentTypeError(
        f"region must be unit_disk or ellipse_sector:D1,D2, got {text!r}"
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=OUTPUT_FORMATS, default=None, help="report format")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--threads", type=int, default=1, help="worker processes")
    common.add_argument("--budget", type=int, default=None, help="candidate cap for enumerations")
    common.add_argument(
        "--precision",
        type=float,
        default=polynomials.DEFAULT_PRECISION,
        help=f"lambda precision in [{MIN_PRECISION}, {MAX_PRECISION}]",
    )
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

    parser = argparse.ArgumentParser(
        prog="salem-spectra",
        description="Salem polynomial census, Diophantine counts and length-spectrum bounds.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify a palindromic polynomial")
    p.add_argument("--poly", required=True, help="coefficients, constant term first")

    p = sub.add_parser("count-triples", parents=[common], help="count primitive A^2+DB^2=C^2")
    p.add_argument("--d", type=_int_list, required=True, help="D values, comma-separated")
    p.add_argument("--x", type=_int_list, required=True, help="bounds on |C|, comma-separated")
    p.add_argument("--method", choices=diophantine.METHODS, default="param")

    p = sub.add_parser("gen-triples", parents=[common], help="list primitive solutions")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--method", choices=diophantine.METHODS, default="param")

    p = sub.add_parser("lattice", parents=[common], help="lattice points in a dilated region")
    p.add_argument("--region", type=_region, default=diophantine.ConvexRegion.unit_disk())
    p.add_argument("--alpha", type=_rational_list, required=True, help="dilations, comma-separated")
    p.add_argument("--variant", choices=diophantine.VARIANTS, default="all")

    p = sub.add_parser("census", parents=[common], help="count Salem polynomials up to Q")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--q", type=_rational_list, required=True, help="ascending Q grid")
    p.add_argument("--include-reducible", action="store_true")

    p = sub.add_parser("constants", parents=[common], help="omega, kappa0 and kappa")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, default=1)

    p = sub.add_parser("spectrum", parents=[common], help="candidate lengths or bound calculators")
    p.add_argument("--m", type=int, default=None, help="half degree for the length census")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--l", type=float, required=True, help="length bound L (also used as ell)")
    p.add_argument("--n", type=int, default=None, help="dimension; selects the bound report")
    p.add_argument("--r", type=float, default=None, help="group constant r; omit to skip r bounds")
    p.add_argument("--form", default=None, help="derive n and D from this form")

    p = sub.add_parser("integralize", parents=[common], help="integral conjugate of an isometry")
    p.add_argument("--form", required=True)
    p.add_argument("--isometry", required=True, help="row-major matrix, e.g. 3:1,-2,2,...")

    p = sub.add_parser("compat", parents=[common], help="form versus polynomial square class")
    p.add_argument("--form", required=True)
    p.add_argument("--poly", required=True)
    return parser


# -- handlers -------------------------------------------------------------------------


def _classify(args: argparse.Namespace, config: RunConfig) -> Report:
    f = polynomials.parse_polynomial(args.poly)
    verdict = polynomials.classify(f, config.precision)
    row = {"coefficients": polynomials.format_polynomial(f), **verdict.summary()}
    return Report(kind="classify", columns=tuple(row), rows=(row,))


def _count_triples(args: argparse.Namespace, config: RunConfig) -> Report:
    return diophantine.count_report(args.d, args.x, args.method, workers=config.workers)


def _gen_triples(args: argparse.Namespace, config: RunConfig) -> Report:
    if args.method == "brute":
        triples = diophantine.brute_force_primitive_solutions(args.d, args.x)
    else:
        triples = diophantine.generate_primitive_solutions(args.d, args.x, workers=config.workers)
    rows = tuple(
        {"A": t.A, "B": t.B, "C": t.C, "D": t.D}
        for t in sorted(triples, key=lambda t: (abs(t.C), t.C, t.A, t.B))
    )
    return Report(kind="triples_set", columns=("A", "B", "C", "D"), rows=rows)


def _lattice(args: argparse.Namespace, config: RunConfig) -> Report:
    region = args.region
    name = region.kind if region.kind == "unit_disk" else f"{region.kind}:{region.D1},{region.D2}"
    rows = []
    for alpha in args.alpha:
        count = diophantine.lattice_count(region, alpha, args.variant, budget=config.budget)
        main = diophantine.lattice_main_term(region, alpha, args.variant)
        inputs = {"region": name, "alpha": alpha, "variant": args.variant}
        rows.append(count_row(inputs, count, main))
    return CountReport(
        kind="lattice",
        columns=("region", "alpha", "variant", "count", "main_term", "abs_error", "ratio"),
        rows=tuple(rows),
    )


def _census(args: argparse.Namespace, config: RunConfig) -> Report:
    return census.census_report(
        args.m,
        args.d,
        args.q,
        workers=config.workers,
        budget=config.budget,
        precision=config.precision,
        include_reducible=args.include_reducible,
    )


def _constants(args: argparse.Namespace, _config: RunConfig) -> Report:
    bundle = census.ConstantsBundle.for_family(args.m, args.d)
    row = {"m": args.m, "D": args.d, **bundle.summary()}
    return Report(kind="constants", columns=tuple(row), rows=(row,))


def _spectrum(args: argparse.Namespace, config: RunConfig) -> Report:
    if args.form is not None:
        bounds = spectrum.SpectrumBounds.from_form(quadform.parse_form(args.form), args.r)
        return spectrum.bounds_report(bounds, args.l)
    if args.n is not None:
        if args.d is None:
            raise ValueError("--n requires --d")
        return spectrum.bounds_report(spectrum.SpectrumBounds(args.n, args.d, args.r), args.l)
    if args.m is None or args.d is None:
        raise ValueError("length census requires --m and --d")
    entries = spectrum.realized_length_census(
        args.m,
        args.d,
        args.l,
        budget=config.budget,
        workers=config.workers,
        precision=config.precision,
    )
    return spectrum.lengths_report(entries, {"m": args.m, "D": args.d, "L": args.l})


def _integralize(args: argparse.Namespace, _config: RunConfig) -> Report:
    q = quadform.parse_form(args.form)
    T = quadform.RationalIsometry(quadform.parse_matrix(args.isometry), q)
    q_new, t_new, g = quadform.integralize(q, T)
    row = {
        "form": quadform.format_form(q_new),
        "isometry": quadform.format_matrix(t_new),
        "basis": quadform.format_matrix(g),
        "charpoly": ",".join(str(c) for c in quadform.characteristic_polynomial(t_new)),
    }
    return Report(kind="integralize", columns=tuple(row), rows=(row,))


def _compat(args: argparse.Namespace, _config: RunConfig) -> Report:
    q = quadform.parse_form(args.form)
    f = polynomials.parse_polynomial(args.poly)
    n_p, n_n = quadform.signature(q)
    row = {
        "form": quadform.format_form(q),
        "poly": polynomials.format_polynomial(f),
        "signature": [n_p, n_n],
        "reduced_determinant": quadform.reduced_determinant(q),
        "admissible": quadform.is_admissible_over_Q(q, q.rank - 1),
        "compatible": quadform.compatible_with_polynomial(q, f),
    }
    return Report(kind="compat", columns=tuple(row), rows=(row,))


HANDLERS: dict[str, Callable[[argparse.Namespace, RunConfig], Report]] = {
    "classify": _classify,
    "count-triples": _count_triples,
    "gen-triples": _gen_triples,
    "lattice": _lattice,
    "census": _census,
    "constants": _constants,
    "spectrum": _spectrum,
    "integralize": _integralize,
    "compat": _compat,
}


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _request_hash(args: argparse.Namespace, config: RunConfig) -> str:
    request: dict[str, Any] = {k: v for k, v in vars(args).items() if k not in _RUN_FLAGS}
    return compute_hash({**config.summary(), "args": request})


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    _configure_logging(args.verbose)

    try:
        config = RunConfig(
            subcommand=args.subcommand,
            output=args.out,
            output_format=args.format or ("json" if args.subcommand in _JSON_DEFAULT else "csv"),
            workers=args.threads,
            precision=args.precision,
            budget=resolve_budget(args.budget),
        )
        logger.debug("running %s with %s", config.subcommand, config.summary())
        report = HANDLERS[config.subcommand](args, config)
        report = dataclasses.replace(report, config_hash=_request_hash(args, config))
        text = report.write(config.output, config.output_format)
    except BudgetExceeded as exc:
        logger.error("%s", exc)
        return EXIT_BUDGET
    except ValueError as exc:
        logger.error("%s", exc)
        return EXIT_VALIDATION

    if config.output is None:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
