"""Acceptance suite: one test and one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are
printed in the "acceptance criteria" section at the end.  The whole suite
takes about 13 minutes on one core.
"""

from __future__ import annotations

import functools
import itertools
import time

import numpy as np
import pytest
from conftest import CRITERIA

from lconvex_ca.engine import format_trace, make_picture_configuration, parse_trace, run
from lconvex_ca.harness import (
    SIZE_BUCKETS,
    DiffReport,
    evaluate,
    exhaustive_pictures,
    random_cases,
    run_random,
)
from lconvex_ca.oracle import is_hv_convex, is_polyomino_picture
from lconvex_ca.picture import Picture, enumerate_hv_convex_pictures, random_picture
from lconvex_ca.recognizer import K_LATENESS, decide_batch, recognizer_rule
from lconvex_ca.recognizer.audit import AuditReport, audit_batch, block_dirinfo, picture_dirinfo

SEED = 20240601
RANDOM_COUNT = 10_000
WIDE_COUNT = 1_500
CHUNK = 20_000
# exact count of polyomino pictures with an exactly 6x6 bounding box is out of
# reach; this is the sampled estimate (see the decisions ledger)
SIX_BY_SIX_ESTIMATE = 1.56e9

RULE = recognizer_rule()
pytestmark = pytest.mark.slow


def verdict(k: int, ok: bool, text: str, seconds: float) -> None:
    CRITERIA[k] = f"criterion {k}: {'PASS' if ok else 'FAIL'} - {text} ({seconds:.0f}s)"
    print(CRITERIA[k])


def _judge(pictures) -> DiffReport:
    rep = DiffReport()
    it = iter(pictures)
    while chunk := list(itertools.islice(it, CHUNK)):
        rep = rep.merge(evaluate(chunk))
    return rep


def _six_wide_hv():
    # HV-convex pictures with a side of 6; the smaller ones are in the polyomino run
    return (p for p in enumerate_hv_convex_pictures(6, 6) if max(p.n, p.m) == 6)


@functools.cache
def exhaustive_polyomino() -> tuple[DiffReport, float]:
    t = time.time()
    rep = _judge(itertools.chain(exhaustive_pictures(5, 5, "polyomino"), _six_wide_hv()))
    return rep, time.time() - t


@functools.cache
def exhaustive_bitmaps() -> tuple[DiffReport, float]:
    t = time.time()
    rep = _judge(exhaustive_pictures(4, 4, "bitmaps"))
    return rep, time.time() - t


@functools.cache
def random_corpus() -> list[Picture]:
    return [p for *_, p in random_cases(RANDOM_COUNT, 32, 32, SEED) if isinstance(p, Picture)]


@functools.cache
def random_report() -> tuple[DiffReport, float]:
    t = time.time()
    rep = run_random(RANDOM_COUNT, 32, 32, SEED)
    return rep, time.time() - t


@functools.cache
def wide_corpus() -> list[Picture]:
    return [p for *_, p in random_cases(WIDE_COUNT, 64, 64, SEED + 1, min_side=4) if isinstance(p, Picture)]


@functools.cache
def wide_report() -> tuple[DiffReport, float]:
    t = time.time()
    rep = run_random(WIDE_COUNT, 64, 64, SEED + 1, min_side=4)
    return rep, time.time() - t


def _oracle_disagreements(rep: DiffReport) -> int:
    return sum(mm.definitional != mm.corner for mm in rep.mismatches)


def _recognizer_disagreements(rep: DiffReport) -> int:
    return sum(mm.definitional != mm.recognizer for mm in rep.mismatches)


# ---------------------------------------------------------------- 1


def test_criterion_1_oracle_equivalence():
    rep, secs = exhaustive_polyomino()
    bad = _oracle_disagreements(rep)
    text = (
        f"{bad} oracle disagreements on {rep.total_cases:,} polyomino pictures "
        f"(all up to 5x5, all HV-convex up to 6x6); the remaining ~{SIX_BY_SIX_ESTIMATE:.2g} "
        f"non-HV-convex 6x6 pictures were not enumerated, so the stated scope is not met"
    )
    verdict(1, False, text, secs)
    assert bad == 0, rep.summary()
    pytest.fail("exhaustive 6x6 scope not run: " + text)


# ---------------------------------------------------------------- 2


def test_criterion_2_exhaustive_correctness():
    bits, s1 = exhaustive_bitmaps()
    poly, s2 = exhaustive_polyomino()
    bad_bits = _recognizer_disagreements(bits)
    bad_poly = _recognizer_disagreements(poly)
    text = (
        f"(a) {bad_bits} mismatches on all {bits.total_cases:,} bitmaps up to 4x4; "
        f"(b) {bad_poly} mismatches on {poly.total_cases:,} polyomino pictures, "
        f"all up to 5x5 plus HV-convex up to 6x6; the full 6x6 scope of (b) was not run"
    )
    verdict(2, False, text, s1 + s2)
    assert bad_bits == 0 and bad_poly == 0, bits.summary() + "\n" + poly.summary()
    pytest.fail("exhaustive 6x6 scope of (b) not run: " + text)


# ---------------------------------------------------------------- 3


def test_criterion_3_random_correctness():
    rep, secs = random_report()
    ok = rep.ok and rep.total_cases == RANDOM_COUNT and not rep.generation_errors
    verdict(
        3,
        ok,
        f"{len(rep.mismatches)} mismatches on {rep.total_cases:,} random pictures up to 32x32 "
        f"({rep.accepted} accepted, {len(rep.generation_errors)} generation errors)",
        secs,
    )
    assert ok, rep.summary()


# ---------------------------------------------------------------- 4


def test_criterion_4_constant_lateness():
    t = time.time()
    wide, _ = wide_report()
    narrow, _ = random_report()
    rep = wide.merge(narrow)
    named = {f"{lo}-{hi}" for lo, hi in SIZE_BUCKETS}
    maxima = {b: v for b, v in rep.worst_lateness_by_size.items() if b in named}
    ok = set(maxima) == named and rep.bucket_maxima_equal()
    shown = " ".join(f"{b}:{maxima.get(b)}" for b in sorted(named, key=lambda b: int(b.split("-")[0])))
    verdict(
        4,
        ok,
        f"worst lateness per bucket {shown} over {rep.total_cases:,} pictures (K={K_LATENESS}); "
        f"lateness values seen {sorted(rep.lateness_histogram)}",
        time.time() - t,
    )
    assert ok, rep.summary()


# ---------------------------------------------------------------- 5


def _compression_matches(p: Picture) -> bool:
    # read the input layer back from the printed trace; arena column i must hold
    # original columns 2i and 2i+1 at step i+2 (column 0 already packs rows then)
    c = make_picture_configuration(p, RULE, halo=1)
    frames = {f.t: f.grid for f in parse_trace(format_trace(run(c, RULE, 4, ["input"])[1], RULE, c, "input"))[1]}
    for i in range(3):
        g = frames[i + 2]
        for y in range(p.m):
            if i == 0 and y > 0:
                continue
            want = int(p[2 * i, y]) + 2 * int(p[2 * i + 1, y])
            if g[len(g) - 2 - y][1 + i] != "0123"[want]:
                return False
    # after 3 steps nothing is left east of arena column 2
    g = frames[4]
    return all(set(row[4:-1]) <= {".", "_"} for row in g[1:-1])


def _dirinfo_matches(p: Picture, steps: int) -> bool:
    from lconvex_ca.recognizer import run_recognizer

    conf, _ = run_recognizer(p, steps=steps)
    got = block_dirinfo(conf.grid, conf.halo, p.n, p.m)
    want = picture_dirinfo(p)
    if is_polyomino_picture(p) and is_hv_convex(p):
        return got == want
    # east and north are derived assuming single runs; west and south are exact everywhere
    return all(got[k][0] == want[k][0] and got[k][3] == want[k][3] for k in want)


def test_criterion_5_compression_geometry():
    t = time.time()
    # every 37th of the 2^18 bit patterns, plus random pictures of each kind
    six_by_three = [Picture(((v >> np.arange(18)) & 1).astype(bool).reshape(3, 6)) for v in range(0, 1 << 18, 37)]
    six_by_three += [random_picture(k, 6, 3, s) for s in range(40) for k in ("any-bits", "hv-convex", "l-convex")]
    comp_bad = sum(not _compression_matches(p) for p in six_by_three)
    dir_pics = list(enumerate_hv_convex_pictures(4, 4))
    dir_pics += [random_picture(k, n, m, s) for s, (n, m) in enumerate([(6, 3), (7, 5), (9, 9), (12, 7), (16, 16)] * 20)
                 for k in ("any-bits", "hv-convex", "l-convex")]
    dir_bad = sum(not _dirinfo_matches(p, (p.n + 1) // 2 + (p.m + 1) // 2 + 3) for p in dir_pics)
    ok = comp_bad == 0 and dir_bad == 0
    verdict(
        5,
        ok,
        f"compression pairing wrong on {comp_bad} of {len(six_by_three)} 6x3 traces; "
        f"dirInfo wrong on {dir_bad} of {len(dir_pics)} pictures",
        time.time() - t,
    )
    assert ok


# ---------------------------------------------------------------- 6


def test_criterion_6_signal_audits():
    t = time.time()
    rep = AuditReport()
    for corpus in (random_corpus(), wide_corpus()):
        for k in range(0, len(corpus), 500):
            rep = rep.merge(audit_batch(corpus[k : k + 500]))
    verdict(
        6,
        rep.ok,
        f"{len(rep.collisions)} lane collisions, {len(rep.v1_mismatches)} v1 count mismatches "
        f"({rep.v1_checked:,} HV-convex pictures), {len(rep.counter_mismatches)} counter mismatches "
        f"({rep.counters_checked:,} words checked, {rep.counters_invalidated:,} invalidated) "
        f"over {rep.pictures:,} pictures and {rep.steps:,} steps",
        time.time() - t,
    )
    assert rep.ok, (rep.collisions[:5], rep.v1_mismatches[:5], rep.counter_mismatches[:5])


# ---------------------------------------------------------------- 7


def _locality_samples(count: int, rng: np.random.Generator) -> tuple[int, int]:
    """Next state of sampled cells against the rule applied to their neighbourhood alone."""
    from lconvex_ca.engine import step

    bad = checked = 0
    pics = [p for *_, p in random_cases(600, 20, 20, SEED + 2) if isinstance(p, Picture)]
    per = -(-count // len(pics))
    for p in pics:
        c = make_picture_configuration(p, RULE, halo=1)
        c = run(c, RULE, int(rng.integers(0, p.n + p.m + K_LATENESS)))[0]
        nxt = step(c, RULE)
        for _ in range(min(per, count - checked)):
            x = int(rng.integers(-1, c.n + 1))
            y = int(rng.integers(-1, c.m + 1))
            hood = (c.cell(x, y), c.cell(x, y + 1), c.cell(x, y - 1), c.cell(x + 1, y), c.cell(x - 1, y))
            a = RULE.apply(*hood)
            b = RULE.apply(*hood)
            bad += not (np.array_equal(a, nxt.cell(x, y)) and np.array_equal(a, b))
            checked += 1
        if checked >= count:
            break
    return checked, bad


def test_criterion_7_engine_invariants():
    t = time.time()
    reports = [exhaustive_bitmaps()[0], exhaustive_polyomino()[0], random_report()[0], wide_report()[0]]
    runs = sum(r.total_cases for r in reports)
    halo = sum(len(r.halo_violations) for r in reports)
    checked, bad = _locality_samples(100_000, np.random.default_rng(SEED))
    # determinism: the same batch twice gives identical reports
    sample = random_corpus()[:400]
    same = decide_batch(sample) == decide_batch(sample)
    ok = halo == 0 and bad == 0 and checked == 100_000 and same
    verdict(
        7,
        ok,
        f"halo active in {halo} of {runs:,} runs; {bad} locality or determinism violations in "
        f"{checked:,} sampled cells; repeated batch identical: {same}",
        time.time() - t,
    )
    assert ok
