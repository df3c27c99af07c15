"""Command-line entry point: gen, check, run, compare, bench.

Exit codes: 0 accept or ok, 1 reject or mismatch, 2 input error,
3 environment error.  Machine-readable lines go to stdout, diagnostics
to stderr.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .errors import LConvexError, PictureFormatError
from .picture import RANDOM_KINDS, Picture, parse_picture

EXIT_OK = 0
EXIT_NO = 1
EXIT_INPUT = 2
EXIT_ENV = 3


class _Parser(argparse.ArgumentParser):
    # long options only: no abbreviations, so scripts cannot drift
    def __init__(self, *a, **kw):
        kw.setdefault("allow_abbrev", False)
        super().__init__(*a, **kw)


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read_picture(path: str) -> Picture:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_picture(text)


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _non_negative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be at least 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    from .recognizer.layers import LAYERS

    ap = _Parser(prog="lconvex-ca", description="Real-time cellular-automaton recognizer for L-convex polyomino pictures.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a seeded corpus of .pic files and manifest.tsv")
    g.add_argument("--kind", choices=RANDOM_KINDS, required=True)
    g.add_argument("--width", type=_positive, required=True)
    g.add_argument("--height", type=_positive, required=True)
    g.add_argument("--count", type=_non_negative, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output directory")

    c = sub.add_parser("check", help="print both oracles' verdicts for one picture file")
    c.add_argument("file", help="picture file, or - for stdin")

    r = sub.add_parser("run", help="run the recognizer on one picture file")
    r.add_argument("file", help="picture file, or - for stdin")
    r.add_argument("--trace", metavar="DIR", help="write space-time traces into DIR")
    r.add_argument(
        "--layer", action="append", choices=sorted(LAYERS), help="trace layer (repeatable; default: all)"
    )
    r.add_argument("--max-steps", type=_non_negative, help="run exactly this many steps instead of until the decision")

    m = sub.add_parser("compare", help="differential test of recognizer against both oracles")
    m.add_argument("--mode", choices=("exhaustive", "random", "corpus"), required=True)
    m.add_argument("--width", type=_positive, default=4, help="exhaustive: max width; random: max width")
    m.add_argument("--height", type=_positive, default=4)
    m.add_argument(
        "--pictures", choices=("bitmaps", "polyomino", "hv-convex"), default="bitmaps",
        help="exhaustive: which pictures to enumerate",
    )
    m.add_argument("--count", type=_positive, default=1000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--corpus", metavar="DIR")
    m.add_argument("--out", metavar="DIR", help="write report.tsv and failures/*.pic here")
    m.add_argument("--jobs", type=_positive, default=1)

    b = sub.add_parser("bench", help="wall-clock timing of decisions on random pictures")
    b.add_argument("--kind", choices=RANDOM_KINDS, default="l-convex")
    b.add_argument("--width", type=_positive, default=32)
    b.add_argument("--height", type=_positive, default=32)
    b.add_argument("--count", type=_positive, default=20)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--jobs", type=_positive, default=1)
    return ap


# ---------------------------------------------------------------- commands


def cmd_gen(a: argparse.Namespace) -> int:
    from .harness import generate_corpus

    try:
        path = generate_corpus(a.kind, a.width, a.height, a.count, a.seed, Path(a.out))
    except OSError as exc:
        _err(f"cannot write corpus: {exc}")
        return EXIT_ENV
    print(f"manifest={path} count={a.count}")
    return EXIT_OK


def cmd_check(a: argparse.Namespace) -> int:
    from .oracle import is_hv_convex, is_l_convex_corner, is_l_convex_definitional, is_polyomino_picture

    p = _read_picture(a.file)
    poly = is_polyomino_picture(p)
    hv = poly and is_hv_convex(p)
    ldef = poly and is_l_convex_definitional(p)
    lcor = poly and is_l_convex_corner(p)
    print(f"polyomino={str(poly).lower()} hv_convex={str(hv).lower()} "
          f"l_convex_definitional={str(ldef).lower()} l_convex_corner={str(lcor).lower()}")
    return EXIT_OK if ldef else EXIT_NO


def cmd_run(a: argparse.Namespace) -> int:
    from .engine import format_trace, make_picture_configuration, run
    from .recognizer import recognizer_rule, run_recognizer
    from .recognizer.layers import LAYERS

    p = _read_picture(a.file)
    _, report = run_recognizer(p, steps=a.max_steps)
    print(report.line())
    if a.trace:
        rule = recognizer_rule()
        layers = a.layer or list(LAYERS)
        c = make_picture_configuration(p, rule, halo=1)
        steps = a.max_steps if a.max_steps is not None else report.decision_step
        _, frames = run(c, rule, steps, layers)
        out = Path(a.trace)
        stem = "stdin" if a.file == "-" else Path(a.file).stem
        try:
            out.mkdir(parents=True, exist_ok=True)
            for layer in layers:
                (out / f"{stem}.{layer}.trace").write_text(format_trace(frames, rule, c, layer))
        except OSError as exc:
            _err(f"cannot write traces: {exc}")
            return EXIT_ENV
    return EXIT_OK if report.accepted else EXIT_NO


def cmd_compare(a: argparse.Namespace) -> int:
    from . import harness

    problems: list[str] = []
    if a.mode == "exhaustive":
        rep = harness.run_exhaustive(a.width, a.height, a.pictures, jobs=a.jobs)
    elif a.mode == "random":
        rep = harness.run_random(a.count, a.width, a.height, a.seed, jobs=a.jobs)
    else:
        if not a.corpus:
            _err("--mode corpus needs --corpus DIR")
            return EXIT_INPUT
        try:
            rep, problems = harness.run_corpus(Path(a.corpus), jobs=a.jobs)
        except OSError as exc:
            _err(f"cannot read corpus: {exc}")
            return EXIT_ENV
    for msg in problems:
        _err(f"skipped {msg}")
    print(rep.summary())
    if a.out:
        try:
            out = Path(a.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "report.tsv").write_text(rep.to_tsv())
            if rep.mismatches:
                for path in harness.save_failures(rep, out / "failures"):
                    _err(f"minimized failure written to {path}")
        except OSError as exc:
            _err(f"cannot write report: {exc}")
            return EXIT_ENV
    return EXIT_OK if rep.ok and not problems else EXIT_NO


def cmd_bench(a: argparse.Namespace) -> int:
    from .picture import random_picture
    from .recognizer import decide_batch, run_recognizer
    from .harness import case_seed

    pics = [random_picture(a.kind, a.width, a.height, case_seed(a.seed, i)) for i in range(a.count)]
    t0 = time.perf_counter()
    for p in pics:
        run_recognizer(p, jobs=a.jobs)
    single = time.perf_counter() - t0
    t0 = time.perf_counter()
    decide_batch(pics)
    batched = time.perf_counter() - t0
    print(
        f"kind={a.kind} size={a.width}x{a.height} count={a.count} jobs={a.jobs} "
        f"single_s={single:.3f} per_picture_ms={1000 * single / a.count:.2f} "
        f"batched_s={batched:.3f} batched_per_picture_ms={1000 * batched / a.count:.2f}"
    )
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "check": cmd_check, "run": cmd_run, "compare": cmd_compare, "bench": cmd_bench}


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[a.command](a)
    except PictureFormatError as exc:
        _err(f"parse error: {exc}")
        return EXIT_INPUT
    except FileNotFoundError as exc:
        _err(f"no such file: {exc.filename}")
        return EXIT_INPUT
    except OSError as exc:
        _err(f"environment error: {exc}")
        return EXIT_ENV
    except LConvexError as exc:
        _err(str(exc))
        return EXIT_INPUT


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
