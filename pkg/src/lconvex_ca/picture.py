"""Pictures, placed polyominoes, enumeration and seeded random generation.

Coordinates put the origin at the south-west corner, x grows east and y
grows north.  Text files list the northmost row first, so ``bits[y, x]``
of a parsed picture is line ``m-1-y`` and column ``x`` of the file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import GenerationError, InvalidInputError, PictureFormatError, RefusalError

ENUMERATION_LIMIT = 7
BRUTE_FORCE_CELLS = 16
DEFAULT_RETRIES = 2000
RANDOM_KINDS = ("any-bits", "hv-convex", "l-convex")


@dataclass(frozen=True, eq=False)
class Picture:
    """A rectangular 0/1 grid; ``bits[y, x]`` with (0, 0) at the SW corner."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        b = np.array(self.bits, dtype=bool, copy=True)
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] < 1:
            raise InvalidInputError(f"picture needs a nonempty 2-D grid, got shape {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @property
    def n(self) -> int:
        return int(self.bits.shape[1])

    @property
    def m(self) -> int:
        return int(self.bits.shape[0])

    def __getitem__(self, xy: tuple[int, int]) -> bool:
        x, y = xy
        if 0 <= x < self.n and 0 <= y < self.m:
            return bool(self.bits[y, x])
        return False

    def cells(self) -> list[tuple[int, int]]:
        ys, xs = np.nonzero(self.bits)
        return sorted(zip(xs.tolist(), ys.tolist()))

    def rows(self) -> list[str]:
        """Rows north to south, as in the file format."""
        return ["".join("1" if v else "0" for v in row) for row in self.bits[::-1]]

    @classmethod
    def from_rows(cls, rows: Iterable[str]) -> "Picture":
        return parse_picture("\n".join(rows) + "\n")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Picture):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.bits.shape, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"Picture({self.rows()!r})"


@dataclass(frozen=True)
class PlacedPolyomino:
    cells: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        cells = frozenset((int(x), int(y)) for x, y in self.cells)
        if not cells:
            raise InvalidInputError("a polyomino needs at least one cell")
        if not _connected(cells):
            raise InvalidInputError("polyomino cells are not 4-connected")
        object.__setattr__(self, "cells", cells)


def _connected(cells: frozenset[tuple[int, int]]) -> bool:
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        x, y = stack.pop()
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(cells)


def parse_picture(text: str) -> Picture:
    rows: list[str] = []
    lineno: list[int] = []
    for i, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("#"):
            continue
        line = raw.rstrip("\r")
        if line == "":
            # a trailing blank line is tolerated, an interior one is not
            rows.append(line)
            lineno.append(i)
            continue
        rows.append(line)
        lineno.append(i)
    while rows and rows[-1] == "":
        rows.pop()
        lineno.pop()
    if not rows:
        raise PictureFormatError("picture has no rows")
    width = len(rows[0])
    for row, ln in zip(rows, lineno):
        for col, ch in enumerate(row, start=1):
            if ch not in "01":
                raise PictureFormatError(f"unexpected character {ch!r}", ln, col)
        if len(row) != width:
            raise PictureFormatError(f"ragged row: length {len(row)}, expected {width}", ln)
    grid = np.array([[c == "1" for c in row] for row in reversed(rows)], dtype=bool)
    return Picture(grid)


def render_picture(p: Picture) -> str:
    return "\n".join(p.rows()) + "\n"


def picture_of(poly: PlacedPolyomino | Iterable[tuple[int, int]]) -> Picture:
    if not isinstance(poly, PlacedPolyomino):
        poly = PlacedPolyomino(frozenset(poly))
    xs = [c[0] for c in poly.cells]
    ys = [c[1] for c in poly.cells]
    x0, y0 = min(xs), min(ys)
    grid = np.zeros((max(ys) - y0 + 1, max(xs) - x0 + 1), dtype=bool)
    for x, y in poly.cells:
        grid[y - y0, x - x0] = True
    return Picture(grid)


# ---------------------------------------------------------------- enumeration


def _touches_borders(mask: int, n: int, m: int) -> bool:
    row0 = (1 << n) - 1
    col0 = sum(1 << (y * n) for y in range(m))
    return bool(
        mask & row0
        and mask & (row0 << ((m - 1) * n))
        and mask & col0
        and mask & (col0 << (n - 1))
    )


def _mask_connected(mask: int, n: int, m: int) -> bool:
    if not mask:
        return False
    low = mask & -mask
    seen = low
    frontier = low
    left = ~sum(1 << (y * n + n - 1) for y in range(m))
    right = ~sum(1 << (y * n) for y in range(m))
    while frontier:
        grow = (frontier << n) | (frontier >> n) | ((frontier & left) << 1) | ((frontier & right) >> 1)
        frontier = grow & mask & ~seen
        seen |= frontier
    return seen == mask


def _mask_to_picture(mask: int, n: int, m: int) -> Picture:
    flat = np.array([(mask >> i) & 1 for i in range(n * m)], dtype=bool)
    return Picture(flat.reshape(m, n))


def _brute_box(n: int, m: int) -> Iterator[Picture]:
    """Filter every bit-grid of the box; the reference enumeration."""
    for mask in range(1, 1 << (n * m)):
        if _touches_borders(mask, n, m) and _mask_connected(mask, n, m):
            yield _mask_to_picture(mask, n, m)


def _neighbour_masks(n: int, m: int) -> list[int]:
    out = []
    for y in range(m):
        for x in range(n):
            nb = 0
            if x > 0:
                nb |= 1 << (y * n + x - 1)
            if x < n - 1:
                nb |= 1 << (y * n + x + 1)
            if y > 0:
                nb |= 1 << ((y - 1) * n + x)
            if y < m - 1:
                nb |= 1 << ((y + 1) * n + x)
            out.append(nb)
    return out


def _grown_box(n: int, m: int) -> Iterator[Picture]:
    """Grow connected cell sets inside the box, each exactly once.

    Every set is generated from its lowest-index cell; a cell once offered
    to a branch is never re-offered to a sibling branch, so no set appears
    twice and no deduplication table is needed.
    """
    nbrs = _neighbour_masks(n, m)
    total = n * m
    for v in range(total):
        anchor = 1 << v
        below = anchor - 1
        # stack entries: (set, untried, seen)
        stack = [(0, anchor, anchor | below)]
        while stack:
            s, untried, seen = stack.pop()
            if s and _touches_borders(s, n, m):
                yield _mask_to_picture(s, n, m)
            # expand in reverse so the pop order matches the recursive order
            children = []
            while untried:
                w = untried & -untried
                untried ^= w
                idx = w.bit_length() - 1
                fresh = nbrs[idx] & ~seen
                children.append((s | w, untried | fresh, seen | fresh))
            stack.extend(reversed(children))


def enumerate_polyomino_pictures(max_w: int, max_h: int, method: str = "auto") -> Iterator[Picture]:
    """Yield every polyomino picture with width <= max_w and height <= max_h.

    Sizes are visited by width then height.  Boxes with at most 16 cells
    are produced by filtering all bit-grids; larger boxes by growth.
    """
    if max_w < 1 or max_h < 1:
        raise InvalidInputError("bounds must be at least 1")
    if max_w > ENUMERATION_LIMIT or max_h > ENUMERATION_LIMIT:
        raise RefusalError(
            f"enumeration is limited to {ENUMERATION_LIMIT}x{ENUMERATION_LIMIT}; "
            f"a {max_w}x{max_h} bound is beyond desk scale"
        )
    if method not in ("auto", "brute", "grow"):
        raise InvalidInputError(f"unknown enumeration method {method!r}")
    for n in range(1, max_w + 1):
        for m in range(1, max_h + 1):
            if method == "brute" or (method == "auto" and n * m <= BRUTE_FORCE_CELLS):
                yield from _brute_box(n, m)
            else:
                yield from _grown_box(n, m)


def enumerate_hv_convex_pictures(max_w: int, max_h: int) -> Iterator[Picture]:
    """Yield every HV-convex polyomino picture within the bounds.

    Columns are built west to east as vertical runs; each new run must
    overlap the previous one, and row convexity is kept by forbidding a
    row from restarting once it has stopped.
    """
    if max_w < 1 or max_h < 1:
        raise InvalidInputError("bounds must be at least 1")
    for n in range(1, max_w + 1):
        for m in range(1, max_h + 1):
            runs = [(b, t) for b in range(m) for t in range(b, m)]
            yield from _hv_box(n, m, runs)


def _hv_box(n: int, m: int, runs: list[tuple[int, int]]) -> Iterator[Picture]:
    full = (1 << m) - 1

    def rec(cols: list[tuple[int, int]], active: int, closed: int) -> Iterator[Picture]:
        if len(cols) == n:
            if min(b for b, _ in cols) == 0 and max(t for _, t in cols) == m - 1:
                grid = np.zeros((m, n), dtype=bool)
                for x, (b, t) in enumerate(cols):
                    grid[b : t + 1, x] = True
                yield Picture(grid)
            return
        pb, pt = cols[-1]
        for b, t in runs:
            if b > pt or t < pb:
                continue
            run = ((1 << (t + 1)) - 1) ^ ((1 << b) - 1)
            if run & closed:
                continue
            cols.append((b, t))
            yield from rec(cols, run, closed | (active & ~run & full))
            cols.pop()

    for b, t in runs:
        run = ((1 << (t + 1)) - 1) ^ ((1 << b) - 1)
        yield from rec([(b, t)], run, 0)


# ---------------------------------------------------------------- random


def _rng(seed: int) -> np.random.Generator:
    # PCG64 with a plain integer seed is stable across platforms and numpy versions
    return np.random.Generator(np.random.PCG64(seed))


def _unimodal(rng: np.random.Generator, n: int, top: int, peak_lo: int, peak_hi: int) -> np.ndarray:
    """Non-decreasing up to a plateau at ``top`` then non-increasing."""
    a = np.sort(rng.integers(0, top + 1, size=peak_lo))
    c = np.sort(rng.integers(0, top + 1, size=n - 1 - peak_hi))[::-1]
    return np.concatenate([a, np.full(peak_hi - peak_lo + 1, top), c]).astype(np.int64)


def _hv_attempt(rng: np.random.Generator, n: int, m: int) -> np.ndarray | None:
    p = np.sort(rng.integers(0, n, size=2))
    q = np.sort(rng.integers(0, n, size=2))
    top = _unimodal(rng, n, m - 1, int(p[0]), int(p[1]))
    bot = (m - 1) - _unimodal(rng, n, m - 1, int(q[0]), int(q[1]))
    if np.any(bot > top):
        return None
    if n > 1 and (np.any(bot[1:] > top[:-1]) or np.any(bot[:-1] > top[1:])):
        return None
    ys = np.arange(m)[:, None]
    return (ys >= bot[None, :]) & (ys <= top[None, :])


def _hv_walk_attempt(rng: np.random.Generator, n: int, m: int) -> np.ndarray | None:
    """Columns as a short-step walk around a drifting centre line.

    Used alongside the profile sampler because independent profiles rarely
    overlap at large sizes.
    """
    half = max(1, m // 2)
    lo = int(rng.integers(0, half))
    hi = int(rng.integers(m - half, m))
    bot = np.empty(n, np.int64)
    top = np.empty(n, np.int64)
    b, t = lo, hi
    rise_b = rise_t = True
    for x in range(n):
        bot[x], top[x] = b, t
        step_b = int(rng.integers(0, 3))
        step_t = int(rng.integers(0, 3))
        # bottom: descends then ascends; top: ascends then descends
        if rise_b and rng.random() < 2.0 / max(n, 2):
            rise_b = False
        if rise_t and rng.random() < 2.0 / max(n, 2):
            rise_t = False
        b = b - step_b if rise_b else b + step_b
        t = t + step_t if rise_t else t - step_t
        b = min(max(b, 0), m - 1)
        t = min(max(t, 0), m - 1)
        if b > t:
            b = t = (b + t) // 2
    bot -= bot.min()
    top = np.minimum(top + (m - 1 - top.max()), m - 1)
    if np.any(bot > top):
        return None
    if n > 1 and (np.any(bot[1:] > top[:-1]) or np.any(bot[:-1] > top[1:])):
        return None
    ys = np.arange(m)[:, None]
    grid = (ys >= bot[None, :]) & (ys <= top[None, :])
    return grid


def _nested_rectangles(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    """Union of rectangles I_i x J_i with I growing to full width and J shrinking
    from full height; every pair of cells has a bend cell inside one rectangle."""
    k = int(rng.integers(1, min(n, m, 6) + 1))
    grid = np.zeros((m, n), dtype=bool)
    ilo, ihi = sorted(int(v) for v in rng.integers(0, n, size=2))
    jlo, jhi = 0, m - 1
    for i in range(k):
        if i == k - 1:
            ilo, ihi = 0, n - 1
        grid[jlo : jhi + 1, ilo : ihi + 1] = True
        ilo = int(rng.integers(0, ilo + 1))
        ihi = int(rng.integers(ihi, n))
        jlo = int(rng.integers(jlo, jhi + 1))
        jhi = int(rng.integers(jlo, jhi + 1))
    return grid


def random_picture(kind: str, n: int, m: int, seed: int, retries: int = DEFAULT_RETRIES) -> Picture:
    """Seeded random picture of the given kind.

    ``hv-convex`` alternates two rejection samplers and raises
    GenerationError after ``retries`` failed attempts.  ``l-convex``
    rejects HV-convex samples that fail the definition for ``retries``
    attempts, then falls back to a union of nested crossing rectangles.
    """
    from .oracle import is_hv_convex, is_l_convex_definitional, is_polyomino_picture

    if n < 1 or m < 1:
        raise InvalidInputError("width and height must be at least 1")
    if kind not in RANDOM_KINDS:
        raise InvalidInputError(f"unknown kind {kind!r}; expected one of {', '.join(RANDOM_KINDS)}")
    rng = _rng(seed)
    if kind == "any-bits":
        return Picture(rng.integers(0, 2, size=(m, n)).astype(bool))

    def hv_sample() -> Picture | None:
        grid = _hv_attempt(rng, n, m) if rng.random() < 0.5 else _hv_walk_attempt(rng, n, m)
        if grid is None:
            return None
        p = Picture(grid)
        if is_polyomino_picture(p) and is_hv_convex(p):
            return p
        return None

    for _ in range(retries):
        p = hv_sample()
        if p is None:
            continue
        if kind == "hv-convex" or is_l_convex_definitional(p):
            return p
    if kind == "hv-convex":
        raise GenerationError(f"hv-convex generation failed after the retry budget of {retries} attempts")
    return Picture(_nested_rectangles(rng, n, m))
