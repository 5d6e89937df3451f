"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import bench as benchmod
from .center import CenterFactorization, EmptySetError, NotConjugateClosedError, factor_iterated
from .coeffs import DEFAULT_PROBE_WINDOW, NotExactError, WindowTooSmallError, ZeroTermError
from .corpus import CORPUS, CorpusEntry, UnknownEntryError, verify_entry
from .descriptor import DescriptorError, SeriesSpec, resolve
from .evaluation import (DEFAULT_EXCLUSION_WINDOW, EvalQuery, EvaluationReport, SpecialPointError,
                         eval_center, eval_direct)
from .singularity import (NonMonotonicError, NotPowerLawError, PatternUnsupportedError,
                          SingularitySet, classify_sequence, detect_dominant)

EXIT_OK, EXIT_INVALID, EXIT_MISMATCH = 0, 1, 2

VALIDATION_ERRORS = (DescriptorError, UnknownEntryError, PatternUnsupportedError, NonMonotonicError,
                     NotPowerLawError, EmptySetError, NotConjugateClosedError, WindowTooSmallError,
                     ZeroTermError, NotExactError, OSError)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


def _emit(args, filename: str, text: str) -> None:
    if args.output_dir:
        out = Path(args.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text)
    else:
        sys.stdout.write(text)


def _singularities(desc: SeriesSpec) -> SingularitySet:
    if desc.singularities is not None:
        return desc.singularities.dominant
    try:
        return detect_dominant(desc.sequence).dominant
    except (PatternUnsupportedError, NonMonotonicError) as exc:
        raise PatternUnsupportedError(
            f"{exc}; add a 'singularities' list to the descriptor to factor this series") from None


def _factorization(desc: SeriesSpec, rounds: int = 1) -> CenterFactorization:
    sset = _singularities(desc)
    return factor_iterated(desc.sequence, [sset] * rounds)


def classification_report(desc: SeriesSpec) -> dict:
    try:
        c = classify_sequence(desc.sequence, DEFAULT_PROBE_WINDOW, desc.singularities)
        rep = c.as_report()
    except NotPowerLawError as exc:
        rep = {"class_tag": None, "p": None, "info": str(exc),
               "super_polynomial": exc.super_polynomial}
        if desc.singularities is not None:
            rep["dominant"] = desc.singularities.dominant.as_list()
        else:
            try:
                rep["dominant"] = detect_dominant(desc.sequence).dominant.as_list()
            except (PatternUnsupportedError, NonMonotonicError, NotPowerLawError):
                rep["dominant"] = []
    rep["name"] = desc.name
    return rep


def factor_report(desc: SeriesSpec, rounds: int, exact: bool) -> dict:
    fact = _factorization(desc, rounds)
    rep = fact.as_report()
    rep["name"] = desc.name
    if exact:
        try:
            rep["residual_preview"] = [str(fact.residual.exact_coefficient(k)) for k in range(1, 17)]
        except NotExactError:
            rep["residual_preview_note"] = "residual is not exactly representable; float preview"
    return rep


def _grid(args) -> np.ndarray:
    return np.linspace(args.start, args.stop, args.count)


def eval_rows(desc: SeriesSpec, args) -> list[dict]:
    method = args.method
    const = complex(float(desc.constant))
    fact = _factorization(desc) if method == "center" else None
    rows = []
    for theta in _grid(args):
        theta = float(theta)
        q = EvalQuery(theta, args.rho, args.max_terms, args.tolerance, method)
        if method == "direct":
            rep = eval_direct(desc.sequence, q).shifted(const)
        elif method == "center":
            try:
                rep = eval_center(fact, q, args.exclusion_window).shifted(const)
            except SpecialPointError as exc:
                rep = exc.report
        else:
            rep = _oracle(desc, theta, args.exclusion_window)
        rows.append(rep.as_row())
    return rows


def _oracle(desc: SeriesSpec, theta: float, window: float) -> EvaluationReport:
    entry = desc.entry
    if entry is None or (entry.target_f_c is None and entry.target_f_s is None):
        raise DescriptorError("closed-form-oracle needs a corpus entry with closed-form targets", "rule")
    if any(r.distance(theta) < window for r in entry.root_angles):
        return EvaluationReport(None, 0, math.inf, "closed-form-oracle", special_point=True,
                                converged=False, theta=theta)
    t = np.array([theta])
    fc = float(entry.target_f_c(t)[0]) if entry.target_f_c is not None else math.nan
    fs = float(entry.target_f_s(t)[0]) if entry.target_f_s is not None else math.nan
    return EvaluationReport(complex(fc, fs), 0, 0.0, "closed-form-oracle", theta=theta)


def _rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    fields = ["theta", "f_c", "f_s", "terms_used", "error_estimate", "special_point"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r[k] is None else repr(r[k]) if isinstance(r[k], float) else r[k])
                    for k in fields})
    return buf.getvalue()


def _entry_for(desc: SeriesSpec) -> CorpusEntry:
    if desc.entry is not None and desc.singularities is desc.entry.singularities:
        return desc.entry
    sset = _singularities(desc)
    base = desc.entry
    return CorpusEntry(desc.name, desc.name, desc.kind, desc.sequence, sset,
                       target_f_s=base.target_f_s if base else None,
                       target_f_c=base.target_f_c if base else None,
                       constant=desc.constant)


# --- subcommands ----------------------------------------------------------------------

def cmd_list(args) -> int:
    rows = [{"name": e.name, "title": e.title, "kind": e.kind,
             "singularities": e.singularities.as_list()} for e in CORPUS.values()]
    if args.format == "json":
        _emit(args, "examples.json", _dump(rows))
    else:
        lines = ["name,kind,title"] + [f"{r['name']},{r['kind']},{r['title']}" for r in rows]
        _emit(args, "examples.csv", "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_classify(args) -> int:
    desc = resolve(args.series)
    _emit(args, "classification.json", _dump(classification_report(desc)))
    return EXIT_OK


def cmd_factor(args) -> int:
    desc = resolve(args.series)
    _emit(args, "factorization.json", _dump(factor_report(desc, args.rounds, args.precision == "exact")))
    return EXIT_OK


def cmd_eval(args) -> int:
    desc = resolve(args.series)
    rows = eval_rows(desc, args)
    if args.format == "json":
        _emit(args, "evaluation.json", _dump(rows))
    else:
        _emit(args, "evaluation.csv", _rows_csv(rows))
    return EXIT_OK


def cmd_bench(args) -> int:
    tols = args.tol or [1e-1, 1e-3, 1e-6]
    results = []
    for name in args.series or list(CORPUS):
        desc = resolve(name)
        entry = _entry_for(desc)
        thetas = args.theta if args.theta else (
            benchmod.default_thetas(entry) + (benchmod.near_root_thetas(entry) if not args.no_near_root else []))
        results.extend(benchmod.bench_entry(entry, thetas, tols, args.cap))
    results.sort(key=lambda r: (r.series, r.theta, r.tolerance))
    out_dir = Path(args.output_dir or "results")
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.format == "json":
        (out_dir / "benchmark.json").write_text(benchmod.to_json(results))
    else:
        (out_dir / "benchmark.csv").write_text(benchmod.to_csv(results))
    return EXIT_OK


def cmd_verify(args) -> int:
    names = list(CORPUS) if args.name == "all" else [args.name]
    records = [verify_entry(n, exact=args.precision == "exact") for n in names]
    _emit(args, "verification.json", _dump([r.as_dict() for r in records]))
    return EXIT_OK if all(r.passed for r in records) else EXIT_MISMATCH


def cmd_pipeline(args) -> int:
    desc = resolve(args.series)
    out = Path(args.output_dir or "pipeline-out")
    out.mkdir(parents=True, exist_ok=True)
    cls = classification_report(desc)
    fac = factor_report(desc, 1, args.precision == "exact")
    rows = eval_rows(desc, args)
    (out / "classification.json").write_text(_dump(cls))
    (out / "factorization.json").write_text(_dump(fac))
    (out / "evaluation.csv").write_text(_rows_csv(rows))
    summary = {"name": desc.name, "class_tag": cls.get("class_tag"),
               "roots_over_pi": fac["poly"]["roots_over_pi"],
               "files": ["classification.json", "factorization.json", "evaluation.csv"]}
    (out / "report.json").write_text(_dump(summary))
    return EXIT_OK


# --- parser --------------------------------------------------------------------------------

def _add_grid(p: argparse.ArgumentParser, method: str) -> None:
    p.add_argument("--start", type=float, default=-math.pi)
    p.add_argument("--stop", type=float, default=math.pi)
    p.add_argument("--count", type=int, default=37)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--method", choices=["direct", "center", "closed-form-oracle"], default=method)
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--max-terms", type=int, default=100_000)


GLOBAL_DEFAULTS = {"precision": "exact", "output_dir": None, "format": "csv",
                   "exclusion_window": DEFAULT_EXCLUSION_WINDOW, "cap": benchmod.DEFAULT_CAP}


def _add_globals(p: argparse.ArgumentParser, defaults: dict) -> None:
    p.add_argument("--precision", choices=["float", "exact"], default=defaults["precision"])
    p.add_argument("--output-dir", default=defaults["output_dir"])
    p.add_argument("--format", choices=["csv", "json"], default=defaults["format"])
    p.add_argument("--exclusion-window", type=float, default=defaults["exclusion_window"])
    p.add_argument("--cap", type=int, default=defaults["cap"])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="centerseries",
                                 description="Classify and accelerate definite-parity Fourier series.")
    _add_globals(ap, GLOBAL_DEFAULTS)
    # the same flags are accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    _add_globals(common, {k: argparse.SUPPRESS for k in GLOBAL_DEFAULTS})
    sub = ap.add_subparsers(dest="command", required=True)
    real_add = sub.add_parser

    def add_parser(name, **kw):
        return real_add(name, parents=[common], **kw)
    sub.add_parser = add_parser

    sub.add_parser("list-examples", help="list the built-in corpus").set_defaults(func=cmd_list)

    p = sub.add_parser("classify", help="classification report for a series")
    p.add_argument("series", help="corpus name or descriptor file")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("factor", help="center-series factorization report")
    p.add_argument("series")
    p.add_argument("--rounds", type=int, default=1, help="repeat the dominant set this many times")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("eval", help="evaluate on a theta grid")
    p.add_argument("series")
    _add_grid(p, "center")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="terms-to-tolerance benchmark")
    p.add_argument("series", nargs="*")
    p.add_argument("--theta", type=float, action="append")
    p.add_argument("--tol", type=float, action="append")
    p.add_argument("--no-near-root", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="check a corpus entry against its oracles")
    p.add_argument("name", help="corpus name or 'all'")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pipeline", help="classify, factor and evaluate into an output directory")
    p.add_argument("series")
    _add_grid(p, "center")
    p.set_defaults(func=cmd_pipeline)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
