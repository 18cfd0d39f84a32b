"""Command line entry point ``carpetquant``.

Machine-readable output goes to stdout and log lines to stderr.  Exit codes:
0 on success, 2 for invalid input, 3 when a file cannot be read or written.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .asymptotics import beta, dimension_estimate, scaled_profile, write_profile_csv
from .distortion import distortion_bounds
from .documents import CodebookDocument, fraction_str
from .errors import CarpetQuantError, InputError
from .geometry import Codebook
from .measure import check_word
from .optimal import optimal_count, optimal_set, optimal_set_at, quantization_error, variant_maps
from .oracle import OracleConfig, brute_force
from .render import MAX_CARPET_DEPTH, render_svg

log = logging.getLogger("carpetquant")

EXIT_OK, EXIT_INPUT, EXIT_IO = 0, 2, 3
DEFAULT_LIMIT = 1000


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _parse_levels(text: str) -> list[int]:
    """``"1,2,5"`` or ``"1:10"`` (inclusive) or a mix of both."""
    levels: list[int] = []
    try:
        for part in text.split(","):
            if ":" in part:
                lo, hi = part.split(":")
                levels.extend(range(int(lo), int(hi) + 1))
            elif part.strip():
                levels.append(int(part))
    except ValueError:
        raise InputError(f"cannot parse levels {text!r}") from None
    if not levels:
        raise InputError("no levels given")
    return levels


def _parse_t(text: Optional[str]) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(check_word(w.strip()) for w in text.split(",") if w.strip())


def _parse_variants(text: Optional[str], n: int):
    if text is None:
        return None
    try:
        if n < 4:
            return int(text)
        out = {}
        for item in text.split(","):
            if item.strip():
                w, v = item.split(":")
                out[check_word(w.strip())] = int(v)
        return out
    except ValueError:
        raise InputError(f"cannot parse variants {text!r}; use e.g. '1:1,3:0' (or an integer for n <= 3)") from None


def _read_document(path: str) -> CodebookDocument:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise _IOFailure(str(exc)) from None
    return CodebookDocument.from_json(text)


class _IOFailure(Exception):
    pass


def _write_text(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise _IOFailure(str(exc)) from None
    log.info("wrote %s", path)


# --- optimal -------------------------------------------------------------

def _family(n: int, t: tuple[str, ...], variants, limit: int) -> list[CodebookDocument]:
    """Documents for one request of the ``optimal`` command."""
    if variants is not None:
        cb = optimal_set(n, t, variants)
        return [CodebookDocument(cb, t=t, variants=variants if isinstance(variants, dict) else {})]
    if t:
        if n < 4:
            raise InputError("--t is only meaningful for n >= 4")
        t = tuple(sorted(t))
        return [
            CodebookDocument(optimal_set(n, t, var), t=t, variants=var)
            for var in itertools.islice(variant_maps(n, t), limit)
        ]
    docs = []
    for i in range(min(limit, optimal_count(n))):
        cb, tt, var = optimal_set_at(n, i)
        docs.append(CodebookDocument(cb, t=tt, variants=var))
    return docs


def cmd_optimal(args) -> int:
    n = args.n
    if n < 1:
        raise InputError("--n must be positive")
    limit = args.limit if args.limit is not None else DEFAULT_LIMIT
    if limit < 1:
        raise InputError("--limit must be at least 1")
    docs = _family(n, _parse_t(args.t), _parse_variants(args.variants, n), limit)
    total = optimal_count(n)
    if args.limit is None and total > DEFAULT_LIMIT and not args.t:
        log.warning("showing the first %d of %d optimal sets; pass --limit to change", DEFAULT_LIMIT, total)
    if args.format == "json":
        body = {
            "n": n,
            "family_count": total,
            "quantization_error": fraction_str(quantization_error(n)),
            "documents": [d.to_dict() for d in docs],
        }
        sys.stdout.write(json.dumps(body, indent=2) + "\n")
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["set_index", "n", "point_index", "x", "y"])
        for i, d in enumerate(docs):
            for j, (x, y) in enumerate(d.codebook):
                w.writerow([i, n, j, fraction_str(x), fraction_str(y)])
    return EXIT_OK


# --- error, dimension, coefficient ---------------------------------------

def cmd_error(args) -> int:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "v_n", "decimal"])
    for n in args.n:
        if n < 1:
            raise InputError("n must be positive")
        v = quantization_error(n)
        w.writerow([n, fraction_str(v), f"{float(v):.6g}"])
    return EXIT_OK


def cmd_dimension(args) -> int:
    levels = _parse_levels(args.levels)
    if min(levels) < 1:
        raise InputError("levels must be positive")
    b = beta()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["ell", "estimate", "beta", "gap"])
    for lv in levels:
        est = dimension_estimate(4**lv)
        w.writerow([lv, f"{est:.12g}", f"{b:.12g}", f"{b - est:.6g}"])
    return EXIT_OK


def cmd_coefficient(args) -> int:
    levels = _parse_levels(args.levels)
    report = scaled_profile(min(levels), max(levels), args.grid)
    summary = {
        "inf_observed": report.inf_observed,
        "sup_observed": report.sup_observed,
        "inf_lower_half": report.inf_lower_half,
        "sup_lower_half": report.sup_lower_half,
        "gap": report.sup_observed - report.inf_observed,
        "f_paper_range": list(report.f_paper_range),
    }
    if args.format == "csv":
        write_profile_csv(report, sys.stdout)
        log.info("inf %.9f  sup %.9f  gap %.9f", report.inf_observed, report.sup_observed, summary["gap"])
    else:
        # n = 4^l, reported by level to keep the JSON small
        summary["dimension_estimates"] = [
            {"ell": (n.bit_length() - 1) // 2, "estimate": e} for n, e in report.dimension_estimates
        ]
        summary["samples"] = [
            {"ell": s.level, "n": s.n, "x": s.x, "v_n": fraction_str(s.v_n),
             "scaled": s.scaled, "g_or_h": s.limit, "f_paper": s.f_paper}
            for s in report.samples
        ]
        sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


# --- lloyd, distortion, render -------------------------------------------

def cmd_lloyd(args) -> int:
    config = OracleConfig(args.n, args.depth, args.restarts, args.seed, args.max_iter)
    log.info("running %d restarts at depth %d", config.restarts, config.depth)
    res = brute_force(config)
    body = {
        "config": {"n": config.n, "depth": config.depth, "restarts": config.restarts,
                   "seed": config.seed, "max_iter": config.max_iter},
        "best": {
            "document": CodebookDocument(res.best.codebook, provenance="lloyd").to_dict(),
            "distortion": fraction_str(res.best.distortion),
            "iterations": res.best.iterations,
            "converged": res.best.converged,
            "history": [fraction_str(h) for h in res.best.history],
        },
        "best_restart": res.best_restart,
        "corrected_distortion": fraction_str(res.corrected_distortion),
        "corrected_decimal": float(res.corrected_distortion),
        "quantization_error": fraction_str(quantization_error(config.n)),
        "matched_optimal": res.matched_optimal,
        "best_hits": res.best_hits,
        "degenerate_restarts": res.degenerate_restarts,
    }
    sys.stdout.write(json.dumps(body, indent=2) + "\n")
    return EXIT_OK


def cmd_distortion(args) -> int:
    doc = _read_document(args.codebook)
    iv = distortion_bounds(doc.codebook, args.depth_cap)
    body = {"n": doc.n, "depth_cap": args.depth_cap, "lo": fraction_str(iv.lo),
            "hi": fraction_str(iv.hi), "exact": iv.exact, "lo_decimal": float(iv.lo),
            "hi_decimal": float(iv.hi)}
    sys.stdout.write(json.dumps(body, indent=2) + "\n")
    return EXIT_OK


def cmd_render(args) -> int:
    if (args.n is None) == (args.codebook is None):
        raise InputError("give exactly one of --n or --codebook")
    if not 0 <= args.carpet_depth <= MAX_CARPET_DEPTH:
        raise InputError(f"--carpet-depth must lie in 0..{MAX_CARPET_DEPTH}")
    if args.codebook is not None:
        codebook: Codebook = _read_document(args.codebook).codebook
        title = f"codebook from {Path(args.codebook).name}"
    else:
        if args.n < 1:
            raise InputError("--n must be positive")
        codebook = optimal_set_at(args.n, args.index)[0]
        title = f"optimal set of {args.n}-means"
    _write_text(args.out, render_svg(codebook, args.carpet_depth, title))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="carpetquant", description="Optimal quantizers for the carpet measure.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("optimal", help="construct optimal sets of n-means")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--t", help="comma-separated level words that receive an extra point")
    s.add_argument("--variants", help="word:index pairs, e.g. '1:1,3:0'; an integer for n <= 3")
    s.add_argument("--limit", type=int, help=f"maximum number of sets (default {DEFAULT_LIMIT})")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_optimal)

    s = sub.add_parser("error", help="exact quantization errors")
    s.add_argument("--n", type=int, nargs="+", required=True)
    s.set_defaults(func=cmd_error)

    s = sub.add_parser("lloyd", help="multi-start Lloyd on the atomic measure")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--depth", type=int, default=5)
    s.add_argument("--restarts", type=int, default=64)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-iter", type=int, default=100)
    s.set_defaults(func=cmd_lloyd)

    s = sub.add_parser("dimension", help="dimension estimates at n = 4^l")
    s.add_argument("--levels", default="1:10", help="e.g. '1:10' or '1,10,100,1000'")
    s.set_defaults(func=cmd_dimension)

    s = sub.add_parser("coefficient", help="profile of the scaled error n^(2/beta) V_n")
    s.add_argument("--levels", default="10")
    s.add_argument("--grid", type=int, default=64)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_coefficient)

    s = sub.add_parser("distortion", help="certified distortion of a codebook document")
    s.add_argument("--codebook", required=True, help="JSON file, or '-' for stdin")
    s.add_argument("--depth-cap", type=int, default=10)
    s.set_defaults(func=cmd_distortion)

    s = sub.add_parser("render", help="SVG picture of a codebook on the carpet")
    s.add_argument("--n", type=int)
    s.add_argument("--index", type=int, default=0, help="which optimal set, in enumeration order")
    s.add_argument("--codebook", help="JSON codebook document")
    s.add_argument("--carpet-depth", type=int, default=3)
    s.add_argument("--out", help="output path (default stdout)")
    s.set_defaults(func=cmd_render)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except _IOFailure as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (CarpetQuantError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
