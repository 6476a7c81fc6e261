"""Command-line front end.

Exit status: 0 on success, 1 on a domain error (reported as JSON on
stderr), 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from pathlib import Path

from .config import exact_patch, generic_patch, patch_from_dict, patch_from_text
from .errors import DomainError, LcmOverflow
from .megf import reconstruct
from .mirsky import PatternQuery, density, empirical_frequency, pattern_frequency_exact
from .proximal import (
    ProximalReport,
    best_agreement,
    disagreement_density,
    empirical_disagreement_density,
    find_agreement_window,
)
from .rotation import GOLDEN, RotationSystem, block_ones_stats, injectivity_probe, union_measure
from .scheme import (
    Scheme,
    TruncatedInternalPoint,
    delta_embed,
    load_scheme,
    resolve_moduli,
    validate_moduli,
    window_period_group,
)
from . import selftest


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.replace(" ", "").split(",") if t]


def _common(p: argparse.ArgumentParser, scheme: bool = True) -> None:
    if scheme:
        p.add_argument("--scheme", type=Path, help="scheme JSON file (default: square-free)")
        p.add_argument("--level", type=int, help="truncation level K (number of moduli)")
    p.add_argument("--N", type=int, help="orbit length for empirical counts")
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--out", type=Path, help="output file (default stdout)")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bfreedyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a configuration patch")
    _common(p)
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--stop", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--m", type=int, help="orbit point shifted by m (exact sieve)")
    g.add_argument("--residues", help="comma-separated residues of a level-K point")

    p = sub.add_parser("freq", help="cylinder frequencies as CSV")
    _common(p)
    p.add_argument("--pattern", action="append", default=[], help="0/1 word or pos:bit list")
    p.add_argument("--words", type=int, help="all 0/1 words of this length")
    p.set_defaults(format="csv")

    p = sub.add_parser("density", help="density of the B-free set")
    _common(p)

    p = sub.add_parser("reconstruct", help="recover the internal point from a patch")
    _common(p)
    p.add_argument("--patch", type=Path, required=True, help="patch JSON, or 0/1 text with --start")
    p.add_argument("--start", type=int, default=0)

    p = sub.add_parser("proximal", help="agreement windows and disagreement density")
    _common(p)
    p.add_argument("--h1", required=True, help="residues of the first point, or n for Delta(n) with --embed")
    p.add_argument("--h2", required=True)
    p.add_argument("--embed", action="store_true", help="treat --h1/--h2 as integers n and use Delta(n)")
    p.add_argument("--L", type=int, default=0, help="target agreement half-length")
    p.add_argument("--R", type=int, default=100, help="search radius")

    p = sub.add_parser("rotation", help="rotation coding statistics")
    _common(p, scheme=False)
    p.add_argument("--alpha", type=float, default=GOLDEN)
    p.add_argument("--level", type=int, default=20, help="number of arc families n_max")
    p.add_argument("--block", type=int, default=3)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--placement-seed", type=int)
    p.add_argument("--pairs", type=int, default=0, help="pairs for the injectivity probe")
    p.add_argument("--L", type=int, default=1000, help="coding half-width for the injectivity probe")
    p.add_argument("--arcs-csv", type=Path, help="also write arc endpoints as CSV")

    p = sub.add_parser("aperiodicity", help="period group of the window")
    _common(p)

    p = sub.add_parser("selftest", help="reduced-budget oracle and acceptance checks")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path)
    return parser


def _scheme(args) -> Scheme:
    if args.scheme is None:
        return Scheme(validate_moduli([], "prime-squares"))
    return load_scheme(args.scheme)


def _config(args, scheme: Scheme | None = None) -> dict:
    # worker count and output path must not change the output bytes
    cfg = {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())
           if v is not None and k not in ("workers", "out")}
    if scheme is not None:
        cfg["scheme_resolved"] = scheme.to_dict()
    return cfg


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_generate(args) -> str:
    sch = _scheme(args)
    ms = resolve_moduli(sch.moduli, args.level)
    if args.residues is not None:
        patch = generic_patch(TruncatedInternalPoint(ms, tuple(_ints(args.residues))), sch.window,
                              (args.start, args.stop))
    elif args.m is not None:
        patch = exact_patch(args.m, (args.start, args.stop), sch.moduli, sch.window)
    else:
        patch = exact_patch(0, (args.start, args.stop), sch.moduli, sch.window)
    if args.format == "text":
        return patch.to_text() + "\n"
    return _json({"config": _config(args, sch), "patch": patch.to_dict()})


def cmd_freq(args) -> str:
    sch = _scheme(args)
    queries = [PatternQuery.parse(t) for t in args.pattern]
    if args.words:
        queries += [PatternQuery.from_word("".join(w)) for w in itertools.product("01", repeat=args.words)]
    if not queries:
        raise DomainError("give --pattern or --words")
    rows = []
    for q in queries:
        f = pattern_frequency_exact(q, sch.moduli, sch.window, level=args.level)
        emp = empirical_frequency(q, sch.moduli, args.N, sch.window, workers=args.workers) if args.N else None
        rows.append({"pattern": str(q), "exact_num": str(f.exact.numerator), "exact_den": str(f.exact.denominator),
                     "tail_error": f.tail_error, "empirical": emp, "N": args.N, "level": f.level})
    if args.format == "json":
        return _json({"config": _config(args, sch), "rows": rows})
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(_config(args, sch), sort_keys=True) + "\n")
    w = csv.DictWriter(buf, ["pattern", "exact_num", "exact_den", "tail_error", "empirical", "N", "level"],
                       lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def cmd_density(args) -> str:
    sch = _scheme(args)
    rep = density(sch.moduli, sch.window, args.level, args.N, workers=args.workers)
    return _json({"config": _config(args, sch), "density": rep.to_dict()})


def _load_patch(args):
    text = args.patch.read_text()
    if text.lstrip().startswith("{"):
        return patch_from_dict(json.loads(text))
    return patch_from_text(text, args.start)


def cmd_reconstruct(args) -> str:
    sch = _scheme(args)
    res = reconstruct(_load_patch(args), sch.moduli, sch.window, args.level)
    return _json({"config": _config(args, sch), "result": res.to_dict()})


def cmd_proximal(args) -> str:
    sch = _scheme(args)
    ms = resolve_moduli(sch.moduli, args.level)
    if args.embed:
        h1, h2 = delta_embed(int(args.h1), ms), delta_embed(int(args.h2), ms)
    else:
        h1 = TruncatedInternalPoint(ms, tuple(_ints(args.h1)))
        h2 = TruncatedInternalPoint(ms, tuple(_ints(args.h2)))
    note = None
    try:
        rep = disagreement_density(h1, h2, sch.window, args.N, args.R)
    except LcmOverflow as exc:
        # too long to enumerate; keep the empirical and agreement parts
        note = str(exc)
        emp = empirical_disagreement_density(h1, h2, sch.window, args.N) if args.N else None
        rep = ProximalReport(*best_agreement(h1, h2, sch.window, args.R), args.R, None, emp, args.N)
    out = rep.to_dict()
    if note:
        out["exact_skipped"] = note
    out["target_half_length"] = args.L
    out["target_witness"] = find_agreement_window(h1, h2, sch.window, args.L, max(args.R, args.L))
    return _json({"config": _config(args, sch), "report": out})


def cmd_rotation(args) -> str:
    sys_ = RotationSystem.make(args.alpha, args.level, args.placement_seed)
    stats = block_ones_stats(sys_, args.block, args.samples, args.seed, workers=args.workers)
    out = {"system": sys_.metadata(), "block": stats.to_dict(), "measure": union_measure(sys_.E)}
    if args.pairs:
        out["injectivity"] = {"pairs": args.pairs, "L": args.L,
                              "fraction": injectivity_probe(sys_, args.pairs, args.L, args.seed)}
    if args.arcs_csv:
        args.arcs_csv.write_text(sys_.E.to_csv())
    return _json({"config": _config(args), "rotation": out})


def cmd_aperiodicity(args) -> str:
    sch = _scheme(args)
    ms = resolve_moduli(sch.moduli, args.level)
    periods = window_period_group(sch.window, ms)
    return _json({"config": _config(args, sch), "moduli": list(ms),
                  "periods": [list(h.residues) for h in periods], "haar_aperiodic": len(periods) == 1})


def cmd_selftest(args) -> tuple[str, bool]:
    lines, ok = selftest.run(args.seed, args.workers)
    return "\n".join(lines) + "\n", ok


COMMANDS = {
    "generate": cmd_generate,
    "freq": cmd_freq,
    "density": cmd_density,
    "reconstruct": cmd_reconstruct,
    "proximal": cmd_proximal,
    "rotation": cmd_rotation,
    "aperiodicity": cmd_aperiodicity,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    ok = True
    try:
        if args.command == "selftest":
            text, ok = cmd_selftest(args)
        else:
            text = COMMANDS[args.command](args)
    except (DomainError, ValueError) as exc:
        err = exc.to_dict() if isinstance(exc, DomainError) else {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 1
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
