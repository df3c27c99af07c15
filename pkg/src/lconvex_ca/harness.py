"""Differential testing of the recognizer against both oracles.

Every case is judged three ways: the definitional oracle (polyomino
picture and L-convex), the corner-zone oracle, and the cellular
automaton.  Any disagreement among the three is a mismatch.
"""

from __future__ import annotations

import csv
import io
import itertools
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np

from .errors import GenerationError, InvalidInputError, RefusalError
from .oracle import is_hv_convex, is_l_convex_corner, is_l_convex_definitional, is_polyomino_picture
from .picture import (
    RANDOM_KINDS,
    Picture,
    enumerate_hv_convex_pictures,
    enumerate_polyomino_pictures,
    random_picture,
    render_picture,
)
from .recognizer import RunReport, decide_batch

BITMAP_LIMIT = 4
POLYOMINO_LIMIT = 6
BATCH = 4000
SIZE_BUCKETS = ((4, 8), (9, 16), (17, 32), (33, 64))
MANIFEST = "manifest.tsv"
MANIFEST_HEADER = ("filename", "n", "m", "verdict", "seed")


def expected_verdict(p: Picture) -> bool:
    return is_polyomino_picture(p) and is_l_convex_definitional(p)


def corner_verdict(p: Picture) -> bool:
    return is_polyomino_picture(p) and is_l_convex_corner(p)


def size_bucket(n: int, m: int) -> str | None:
    """Bucket by the larger side, for pictures whose smaller side is at least 4."""
    if min(n, m) < 4:
        return None
    big = max(n, m)
    for lo, hi in SIZE_BUCKETS:
        if lo <= big <= hi:
            return f"{lo}-{hi}"
    return None


@dataclass(frozen=True)
class Mismatch:
    picture: Picture
    definitional: bool
    corner: bool
    recognizer: bool
    label: str = ""

    def describe(self) -> str:
        tag = f" {self.label}" if self.label else ""
        return (
            f"{self.picture.n}x{self.picture.m}{tag}: definitional={self.definitional} "
            f"corner={self.corner} recognizer={self.recognizer}"
        )


@dataclass
class DiffReport:
    total_cases: int = 0
    agreements: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)
    lateness_histogram: Counter = field(default_factory=Counter)
    worst_lateness_by_size: dict[str, int] = field(default_factory=dict)
    # first error arrival at the origin minus real time, worst per bucket
    worst_error_arrival_by_size: dict[str, int] = field(default_factory=dict)
    accepted: int = 0
    generation_errors: list[str] = field(default_factory=list)
    # pictures whose surrounding ring of quiescent cells ever became active
    halo_violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.halo_violations and self.total_cases == self.agreements

    def merge(self, other: "DiffReport") -> "DiffReport":
        out = DiffReport(
            self.total_cases + other.total_cases,
            self.agreements + other.agreements,
            self.mismatches + other.mismatches,
            self.lateness_histogram + other.lateness_histogram,
            _max_merge(self.worst_lateness_by_size, other.worst_lateness_by_size),
            _max_merge(self.worst_error_arrival_by_size, other.worst_error_arrival_by_size),
            self.accepted + other.accepted,
            self.generation_errors + other.generation_errors,
            self.halo_violations + other.halo_violations,
        )
        return out

    def bucket_maxima_equal(self) -> bool:
        # only the named buckets: pictures with a side under 4 are left out
        vals = {v for b, v in self.worst_lateness_by_size.items() if b[0].isdigit()}
        return len(vals) == 1

    def summary(self) -> str:
        lines = [
            f"cases={self.total_cases} agreements={self.agreements} mismatches={len(self.mismatches)} "
            f"accepted={self.accepted} generation_errors={len(self.generation_errors)} "
            f"halo_violations={len(self.halo_violations)}",
            "lateness histogram: " + " ".join(f"{k}:{v}" for k, v in sorted(self.lateness_histogram.items())),
        ]
        if self.worst_lateness_by_size:
            lines.append(
                "worst lateness by size: "
                + " ".join(f"{b}:{v}" for b, v in sorted(self.worst_lateness_by_size.items(), key=_bucket_key))
            )
        if self.worst_error_arrival_by_size:
            lines.append(
                "worst error arrival after real time: "
                + " ".join(f"{b}:{v}" for b, v in sorted(self.worst_error_arrival_by_size.items(), key=_bucket_key))
            )
        lines.extend("mismatch " + mm.describe() for mm in self.mismatches[:20])
        lines.extend("generation error " + g for g in self.generation_errors[:20])
        lines.extend("halo activated " + h for h in self.halo_violations[:20])
        return "\n".join(lines)

    def to_tsv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, delimiter="\t", lineterminator="\n")
        w.writerow(("key", "value"))
        w.writerow(("total_cases", self.total_cases))
        w.writerow(("agreements", self.agreements))
        w.writerow(("mismatches", len(self.mismatches)))
        w.writerow(("accepted", self.accepted))
        w.writerow(("halo_violations", len(self.halo_violations)))
        for k, v in sorted(self.lateness_histogram.items()):
            w.writerow((f"lateness={k}", v))
        for b, v in sorted(self.worst_lateness_by_size.items(), key=_bucket_key):
            w.writerow((f"worst_lateness[{b}]", v))
        for b, v in sorted(self.worst_error_arrival_by_size.items(), key=_bucket_key):
            w.writerow((f"worst_error_arrival[{b}]", v))
        for mm in self.mismatches:
            w.writerow(("mismatch", mm.describe() + " " + "/".join(mm.picture.rows())))
        return buf.getvalue()


def _bucket_key(item: tuple[str, int]) -> int:
    b = item[0]
    return int(b.split("-")[0]) if b[0].isdigit() else -1


def _max_merge(a: dict[str, int], b: dict[str, int]) -> dict[str, int]:
    out = dict(a)
    for k, v in b.items():
        out[k] = max(out.get(k, v), v)
    return out


# ---------------------------------------------------------------- evaluation


def _bucket_all(n: int, m: int) -> str:
    return size_bucket(n, m) or "small"


def _evaluate_chunk(args: tuple[list[Picture], list[str], list[bool] | None]) -> DiffReport:
    pictures, labels, expected = args
    rep = DiffReport()
    for i, (p, r) in enumerate(zip(pictures, decide_batch(pictures))):
        want = expected[i] if expected is not None else expected_verdict(p)
        _record(rep, p, want, corner_verdict(p), r, labels[i])
    return rep


def evaluate(
    pictures: list[Picture],
    labels: list[str] | None = None,
    expected: list[bool] | None = None,
    jobs: int = 1,
) -> DiffReport:
    """Judge pictures three ways; ``expected`` overrides the definitional verdicts.

    Chunks go to a process pool when ``jobs`` > 1.  Results are merged in
    chunk order, so the report is the same for any number of jobs.
    """
    labels = labels if labels is not None else [""] * len(pictures)
    chunks = [
        (pictures[k : k + BATCH], labels[k : k + BATCH], None if expected is None else expected[k : k + BATCH])
        for k in range(0, len(pictures), BATCH)
    ]
    rep = DiffReport()
    if jobs > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            parts = list(pool.map(_evaluate_chunk, chunks))
    else:
        parts = [_evaluate_chunk(c) for c in chunks]
    for part in parts:
        rep = rep.merge(part)
    return rep


def _record(rep: DiffReport, p: Picture, want: bool, corner: bool, r: RunReport, label: str) -> None:
    rep.total_cases += 1
    got = r.accepted
    rep.accepted += got
    if want == corner == got:
        rep.agreements += 1
    else:
        rep.mismatches.append(Mismatch(p, want, corner, got, label))
    if not r.halo_quiet:
        rep.halo_violations.append(f"{p.n}x{p.m} {label} {'/'.join(p.rows())}")
    rep.lateness_histogram[r.lateness] += 1
    b = _bucket_all(p.n, p.m)
    rep.worst_lateness_by_size[b] = max(rep.worst_lateness_by_size.get(b, r.lateness), r.lateness)
    if r.first_error_step is not None:
        late = r.first_error_step - r.real_time
        rep.worst_error_arrival_by_size[b] = max(rep.worst_error_arrival_by_size.get(b, late), late)


def bitmaps(n: int, m: int) -> Iterator[Picture]:
    cells = n * m
    weights = 1 << np.arange(cells)
    for v in range(1 << cells):
        yield Picture(((v & weights) != 0).reshape(m, n))


def exhaustive_pictures(max_w: int, max_h: int, mode: str = "bitmaps") -> Iterator[Picture]:
    if max_w < 1 or max_h < 1:
        raise InvalidInputError("bounds must be at least 1")
    if mode == "bitmaps":
        if max_w > BITMAP_LIMIT or max_h > BITMAP_LIMIT:
            raise RefusalError(f"bitmap mode is limited to {BITMAP_LIMIT}x{BITMAP_LIMIT}")
        for n in range(1, max_w + 1):
            for m in range(1, max_h + 1):
                yield from bitmaps(n, m)
    elif mode == "polyomino":
        if max_w > POLYOMINO_LIMIT or max_h > POLYOMINO_LIMIT:
            raise RefusalError(f"polyomino mode is limited to {POLYOMINO_LIMIT}x{POLYOMINO_LIMIT}")
        yield from enumerate_polyomino_pictures(max_w, max_h)
    elif mode == "hv-convex":
        if max_w > POLYOMINO_LIMIT or max_h > POLYOMINO_LIMIT:
            raise RefusalError(f"hv-convex mode is limited to {POLYOMINO_LIMIT}x{POLYOMINO_LIMIT}")
        yield from enumerate_hv_convex_pictures(max_w, max_h)
    else:
        raise InvalidInputError(f"unknown exhaustive mode {mode!r}; expected bitmaps, polyomino or hv-convex")


def run_exhaustive(
    max_w: int,
    max_h: int,
    mode: str = "bitmaps",
    progress: Callable[[int], None] | None = None,
    jobs: int = 1,
) -> DiffReport:
    """Every picture of the mode within the bounds, judged three ways."""
    rep = DiffReport()
    it = exhaustive_pictures(max_w, max_h, mode)
    while True:
        chunk = list(itertools.islice(it, BATCH * jobs))
        if not chunk:
            break
        rep = rep.merge(evaluate(chunk, jobs=jobs))
        if progress is not None:
            progress(rep.total_cases)
    return rep


def case_seed(seed: int, i: int) -> int:
    return int(np.random.SeedSequence([seed, i]).generate_state(1, np.uint64)[0] >> 1)


def random_cases(
    count: int, max_n: int, max_m: int, seed: int, kinds: Iterable[str] = RANDOM_KINDS, min_side: int = 1
) -> Iterator[tuple[int, str, int, int, Picture | GenerationError]]:
    """Deterministic corpus: (index, kind, n, m, picture or generation error)."""
    if count < 1:
        raise InvalidInputError("count must be at least 1")
    if max_n < min_side or max_m < min_side:
        raise InvalidInputError("size bounds below the minimum side")
    kinds = tuple(kinds)
    rng = np.random.default_rng(seed)
    for i in range(count):
        kind = kinds[i % len(kinds)]
        n = int(rng.integers(min_side, max_n + 1))
        m = int(rng.integers(min_side, max_m + 1))
        try:
            p: Picture | GenerationError = random_picture(kind, n, m, case_seed(seed, i))
        except GenerationError as exc:
            p = exc
        yield i, kind, n, m, p


def run_random(
    count: int,
    max_n: int,
    max_m: int,
    seed: int,
    kinds: Iterable[str] = RANDOM_KINDS,
    min_side: int = 1,
    jobs: int = 1,
) -> DiffReport:
    pics: list[Picture] = []
    labels: list[str] = []
    errors: list[str] = []
    for i, kind, n, m, p in random_cases(count, max_n, max_m, seed, kinds, min_side):
        if isinstance(p, GenerationError):
            errors.append(f"case {i} {kind} {n}x{m}: {p}")
            continue
        pics.append(p)
        labels.append(f"case={i} kind={kind}")
    rep = evaluate(pics, labels, jobs=jobs)
    rep.generation_errors = errors
    return rep


# ---------------------------------------------------------------- corpora


def verdict_label(p: Picture) -> str:
    return "L" if expected_verdict(p) else "N"


def write_corpus(pictures: Iterable[tuple[Picture, int]], out_dir: Path) -> Path:
    """Write ``.pic`` files and a manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, (p, seed) in enumerate(pictures):
        name = f"case{i:05d}.pic"
        (out_dir / name).write_text(render_picture(p))
        rows.append((name, p.n, p.m, verdict_label(p), seed))
    path = out_dir / MANIFEST
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(MANIFEST_HEADER)
        w.writerows(rows)
    return path


def generate_corpus(kind: str, width: int, height: int, count: int, seed: int, out_dir: Path) -> Path:
    pics = []
    for i in range(count):
        s = case_seed(seed, i)
        pics.append((random_picture(kind, width, height, s), s))
    return write_corpus(pics, out_dir)


def read_manifest(corpus: Path) -> list[dict[str, str]]:
    with (Path(corpus) / MANIFEST).open(newline="") as fh:
        return list(csv.DictReader(fh, delimiter="\t"))


def run_corpus(corpus: Path, jobs: int = 1) -> tuple[DiffReport, list[str]]:
    """Judge every manifest entry; the manifest verdict must agree too.

    Returns the report and a list of per-file problems (unreadable or
    unparsable files), which do not stop the run.
    """
    from .picture import parse_picture

    corpus = Path(corpus)
    problems: list[str] = []
    pics: list[Picture] = []
    labels: list[str] = []
    listed: list[bool] = []
    for row in read_manifest(corpus):
        name = row.get("filename", "")
        try:
            p = parse_picture((corpus / name).read_text())
        except (OSError, ValueError) as exc:
            problems.append(f"{name}: {exc}")
            continue
        pics.append(p)
        labels.append(f"file={name} manifest={row.get('verdict', '')}")
        listed.append(row.get("verdict", "") == "L")
    rep = evaluate(pics, labels, jobs=jobs)
    # a manifest label that disagrees with the oracle is a mismatch as well
    already = {mm.label for mm in rep.mismatches}
    for p, lab, want in zip(pics, labels, listed):
        truth = expected_verdict(p)
        if want != truth:
            if lab not in already:
                rep.agreements -= 1
            rep.mismatches.append(Mismatch(p, truth, corner_verdict(p), want, lab + " (manifest)"))
    return rep, problems


# ---------------------------------------------------------------- shrinking


def _drop(p: Picture, axis: int, k: int) -> Picture | None:
    bits = np.delete(p.bits, k, axis=axis)
    if bits.size == 0:
        return None
    return Picture(bits)


def shrink(p: Picture, failing: Callable[[Picture], bool]) -> Picture:
    """Greedy row/column deletion while ``failing`` holds.

    When the input is a polyomino picture, removals that leave a
    non-polyomino picture are skipped.
    """
    keep_valid = is_polyomino_picture(p)
    cur = p
    changed = True
    while changed:
        changed = False
        for axis in (0, 1):
            k = 0
            while k < cur.bits.shape[axis]:
                q = _drop(cur, axis, k)
                if q is not None and (not keep_valid or is_polyomino_picture(q)) and failing(q):
                    cur = q
                    changed = True
                else:
                    k += 1
    return cur


def mismatch_persists(mm: Mismatch) -> Callable[[Picture], bool]:
    def failing(q: Picture) -> bool:
        got = decide_batch([q])[0].accepted
        return not (expected_verdict(q) == corner_verdict(q) == got)

    return failing


def save_failures(rep: DiffReport, out_dir: Path, minimize: bool = True) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, mm in enumerate(rep.mismatches):
        if mm.label.endswith("(manifest)"):
            continue
        p = shrink(mm.picture, mismatch_persists(mm)) if minimize else mm.picture
        path = out_dir / f"failure{i:04d}.pic"
        head = f"# {mm.describe()}\n"
        path.write_text(head + render_picture(p))
        paths.append(path)
    return paths
