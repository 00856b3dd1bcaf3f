"""Command-line front end.

Every subcommand writes CSV (or JSON for code specs) with a metadata header
that echoes the parameters and the seed.  Exit status is 0 on success, 1 when
a requested ``--check`` finds a violated bound, and 2 on usage or input
errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path as FsPath
from typing import Sequence

import numpy as np

from . import __version__
from . import formats as fm
from .channel import bsc_soft, offset_from
from .codebook import Path, encode_monomial_sum, encode_plotkin, rm_info_set
from .ordering import cmu_compare, construct_code, eps_grid, example3_compare, order_scan, sbu_compare
from .polarization import SQRT3_2, default_grid, expected_v, ratio_R
from .scdecoder import genie_error_rates, sc_decode

log = logging.getLogger("polarmoments")


class CheckFailed(Exception):
    pass


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "pretty"), default="csv")


def _add_channel(p: argparse.ArgumentParser, required: bool = True, b0: bool = False) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--epsilon", type=float, help="BSC offset eps = 1 - 2p")
    g.add_argument("--crossover", type=float, help="BSC crossover probability p")
    if b0:
        g.add_argument("--b0", type=float, help="initial B-moment directly")


def _offset(args) -> float:
    return offset_from(epsilon=args.epsilon, crossover=args.crossover)


def _base_moment(args) -> float:
    if getattr(args, "b0", None) is not None:
        if not 0.0 <= args.b0 <= 1.0:
            raise ValueError(f"--b0 must lie in [0, 1], got {args.b0}")
        return args.b0
    eps = _offset(args)
    return 1.0 - eps * eps


def _params(args) -> dict:
    skip = {"func", "format", "out", "seed", "command", "verbose"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _meta(args) -> list[str]:
    return fm.metadata_lines(args.command, _params(args), args.seed)


def _emit_table(args, header, rows, meta=None) -> None:
    rows = list(rows)
    meta = _meta(args) if meta is None else meta
    if args.format == "pretty":
        cells = [list(header)] + [[fm.fmt(v) for v in r] for r in rows]
        widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
        text = "\n".join(meta) + "\n"
        text += "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells) + "\n"
    else:
        text = fm.write_csv(header, rows, meta)
    fm.write_text(args.out, text)


def _read(path: str) -> str:
    try:
        return FsPath(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc.strerror}") from None


def cmd_construct(args) -> int:
    if args.rm_r is not None:
        spec = rm_info_set(args.rm_r, args.m)
        design = None
    else:
        if args.k is None or (args.epsilon is None and args.crossover is None):
            raise ValueError("construct needs --k with --epsilon/--crossover, or --rm-r")
        spec, design = construct_code(args.m, args.k, _offset(args))
    meta = {
        "tool": "polarmoments",
        "version": __version__,
        "command": "construct",
        "params": _params(args),
        "seed": args.seed,
    }
    if design is not None:
        meta["sum_selected_B"] = fm.fmt(design.sum_selected_B)
    fm.write_text(args.out, fm.dump_spec(spec, meta))
    if design is not None:
        if args.design:
            args_design = argparse.Namespace(**{**vars(args), "out": args.design})
            _emit_table(
                args_design,
                ("path", "B", "selected"),
                ((str(p), b, s) for p, b, s in design.rows()),
            )
        # the union bound goes to stderr when the spec itself is on stdout
        stream = sys.stderr if args.out in (None, "-") else sys.stdout
        print(f"sum_selected_B={fm.fmt(design.sum_selected_B)}", file=stream)
    return 0


def cmd_encode(args) -> int:
    spec = fm.load_spec(_read(args.spec))
    if args.random:
        bits = np.random.default_rng(args.seed).integers(0, 2, spec.k)
        msg = {p: int(b) for p, b in zip(spec.paths, bits)}
        if args.message_out:
            fm.write_text(args.message_out, fm.dump_message(msg))
    elif args.message:
        msg = fm.load_message(_read(args.message))
    else:
        raise ValueError("encode needs --message FILE or --random")
    enc = encode_plotkin if args.encoder == "plotkin" else encode_monomial_sum
    fm.write_text(args.out, fm.dump_codeword(enc(spec, msg)))
    return 0


def cmd_decode(args) -> int:
    spec = fm.load_spec(_read(args.spec))
    if args.soft:
        llr = fm.load_soft(_read(args.soft))
    elif args.received:
        received = fm.load_codeword(_read(args.received))
        llr = bsc_soft(1 - 2 * received.astype(int), _offset(args)).llr
    else:
        raise ValueError("decode needs --soft FILE or --received FILE with --epsilon/--crossover")
    if llr.size != spec.n:
        raise ValueError(f"soft input has {llr.size} values, spec needs {spec.n}")
    out = sc_decode(spec, llr)
    fm.write_text(args.out, fm.dump_message(out.message))
    return 0


def cmd_simulate(args) -> int:
    spec = fm.load_spec(_read(args.spec))
    if args.trials <= 0:
        raise ValueError("--trials must be positive")
    rep = genie_error_rates(spec, _offset(args), args.trials, seed=args.seed)
    rows = [
        (str(p), rep.trials, e, r, a, b, z, zo, bo)
        for p, e, r, a, b, z, zo, bo in zip(
            rep.paths, rep.errors, rep.rates, rep.A, rep.B, rep.Z, rep.z_bound_ok, rep.b_bound_ok
        )
    ]
    _emit_table(
        args, ("path", "trials", "errors", "rate", "A", "B", "Z", "z_bound_ok", "b_bound_ok"), rows
    )
    if args.check:
        bad = [r for r in rows if not (r[7] and r[8])]
        if bad:
            for r in bad:
                which = " and ".join(n for n, ok in (("Z", r[7]), ("B", r[8])) if not ok)
                print(f"bound violated on path {r[0]}: rate {fm.fmt(r[3])} exceeds {which} + 5 sigma", file=sys.stderr)
            raise CheckFailed
    return 0


def cmd_trace(args) -> int:
    b0 = _base_moment(args)
    _emit_table(args, fm.TRAJECTORY_HEADER, fm.trajectory_rows(b0, Path.parse(args.path)))
    return 0


def cmd_polarize(args) -> int:
    b0 = _base_moment(args)
    levels = range(1, args.levels + 1) if args.all_levels else [args.levels]
    stats = [expected_v(lv, b0) for lv in levels]
    _emit_table(
        args,
        ("level", "b0", "mean_V", "bound", "fraction_ge_threshold"),
        ((s.level, s.b0, s.mean_V, s.bound, s.fraction_ge_threshold) for s in stats),
    )
    if args.histogram:
        hist_args = argparse.Namespace(**{**vars(args), "out": args.histogram})
        _emit_table(hist_args, ("bucket_lo", "bucket_hi", "count"), stats[-1].histogram)
    if args.check:
        bad = [s for s in stats if not s.holds]
        for s in bad:
            print(
                f"bound violated at level {s.level}: mean V {fm.fmt(s.mean_V)} > {fm.fmt(s.bound)}",
                file=sys.stderr,
            )
        if bad:
            raise CheckFailed
    return 0


def cmd_order_scan(args) -> int:
    rep = order_scan(args.m, args.w, eps_grid(args.grid))
    rows = []
    for pair in rep.pairs:
        found = rep.crossings.get(pair)
        if not found:
            rows.append((str(pair[0]), str(pair[1]), True, None, None))
        for c in found or ():
            rows.append((str(pair[0]), str(pair[1]), False, c.lo, c.hi))
    _emit_table(args, ("pair_a", "pair_b", "permanent", "crossing_eps_lo", "crossing_eps_hi"), rows)
    return 0


def cmd_curves(args) -> int:
    if args.kind == "ratio":
        x = default_grid(args.points)
        _emit_table(args, ("x", "R", "bound"), ((a, b, SQRT3_2) for a, b in zip(x, ratio_R(x))))
        return 0
    rows = []
    for e in eps_grid(args.points):
        if args.kind == "sbu":
            b01, b10, _ = sbu_compare(e)
            rows.append((e, b01, b10))
        elif args.kind == "cmu":
            rows.append((e, *cmu_compare(e)))
        else:
            rows.append((e, *example3_compare(e)))
    names = {"sbu": ("B_01", "B_10"), "cmu": ("B_0110", "B_1001"), "example3": ("B_100101", "B_011010")}
    _emit_table(args, ("epsilon",) + names[args.kind], rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polarmoments", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log decoder events")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build C(m, T) by B-moment ordering or as RM(r, m)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--rm-r", type=int, dest="rm_r")
    p.add_argument("--design", help="write the full path,B,selected table here")
    _add_channel(p, required=False)
    _add_common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("encode", help="encode a message file into a codeword line")
    p.add_argument("--spec", required=True)
    p.add_argument("--message")
    p.add_argument("--random", action="store_true", help="draw a random message from --seed")
    p.add_argument("--message-out", dest="message_out", help="save the drawn random message")
    p.add_argument("--encoder", choices=("plotkin", "monomial"), default="plotkin")
    _add_common(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="SC-decode soft values or hard BSC outputs")
    p.add_argument("--spec", required=True)
    p.add_argument("--soft", help="one log-likelihood per line (inf/-inf allowed)")
    p.add_argument("--received", help="received bits as one line of 0/1")
    _add_channel(p, required=False)
    _add_common(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="genie-aided per-path error rates over a BSC")
    p.add_argument("--spec", required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--check", action="store_true", help="fail if any rate exceeds Z or B + 5 sigma")
    _add_channel(p)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("trace", help="B-moment trajectory along one path")
    p.add_argument("--path", required=True)
    _add_channel(p, b0=True)
    _add_common(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("polarize", help="exact mean potential over all paths of a level")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--all-levels", action="store_true", dest="all_levels", help="one row per level 1..L")
    p.add_argument("--histogram", help="write the log2(AB) histogram here")
    p.add_argument("--check", action="store_true", help="fail if mean V exceeds (sqrt3/2)^level")
    _add_channel(p, b0=True)
    _add_common(p)
    p.set_defaults(func=cmd_polarize)

    p = sub.add_parser("order-scan", help="look for B-order crossings among weight-w paths")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--grid", type=int, default=99, help="number of interior eps grid points")
    _add_common(p)
    p.set_defaults(func=cmd_order_scan)

    p = sub.add_parser("curves", help="plottable CSV for R(x) and the path comparisons")
    p.add_argument("--kind", choices=("ratio", "sbu", "cmu", "example3"), required=True)
    p.add_argument("--points", type=int, default=99)
    _add_common(p)
    p.set_defaults(func=cmd_curves)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except CheckFailed:
        return 1
    except ValueError as exc:
        print(f"polarmoments {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
