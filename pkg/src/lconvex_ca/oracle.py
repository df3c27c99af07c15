"""Reference deciders for L-convexity, with no notion of time.

Two independent routes are provided.  ``is_l_convex_definitional`` checks
the pairwise bend condition directly.  ``is_l_convex_corner`` checks three
empty zones around every NE corner and the mirrored zones around every NW
corner.

Zone inequalities, for a NE corner (x, y) whose column reaches down to
(x, y') and whose row reaches west to (x', y):

    A: x'' > x   and y'' < y'     (south-east of the column foot)
    B: x'' < x'  and y'' > y      (north-west of the row end)
    C: x'' < x'  and y'' < y'     (south-west of both)

A second reading of these inequalities also circulates, in which B is
bounded by ``y'' > y'`` rather than ``y'' > y``.  Under that reading B can
hold ordinary cells of an L-convex shape (rows between y' and y that reach
further west than the corner row), so it would reject valid inputs.  The version above is the one whose corner test agrees with
the pairwise definition on every exhaustively enumerated picture; that
agreement, not either text, is what the tests bind to.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidInputError
from .picture import Picture


class CornerType(str, Enum):
    NE = "NE"
    NW = "NW"
    SE = "SE"
    SW = "SW"


@dataclass(frozen=True)
class CornerExtent:
    """A NE or NW corner with the far ends of its column and row.

    ``y_prime`` is the south end of the corner's column.  ``x_prime`` is the
    west end of its row for a NE corner and the east end for a NW corner.
    """

    x: int
    y: int
    y_prime: int
    x_prime: int
    kind: CornerType = CornerType.NE


@dataclass(frozen=True)
class ZoneReport:
    zone_id: str
    witness: tuple[int, int] | None = None

    @property
    def empty(self) -> bool:
        return self.witness is None


ZONES = ("A", "B", "C")


# ---------------------------------------------------------------- basic predicates


def is_polyomino_picture(p: Picture) -> bool:
    b = p.bits
    if not b.any():
        return False
    if not (b[0].any() and b[-1].any() and b[:, 0].any() and b[:, -1].any()):
        return False
    # bit-parallel flood fill: rows packed into one int, with a 0 guard
    # column so that shifting by one never wraps into the next row
    m, n = b.shape
    s = n + 1
    padded = np.zeros((m, s), dtype=bool)
    padded[:, :n] = b
    mask = int.from_bytes(np.packbits(padded.ravel(), bitorder="little").tobytes(), "little")
    fill = mask & -mask
    while True:
        grown = (fill | fill << 1 | fill >> 1 | fill << s | fill >> s) & mask
        if grown == fill:
            return fill == mask
        fill = grown


def _single_runs(lines: np.ndarray) -> bool:
    # each line may switch on at most once: count rising edges with a 0 pad
    padded = np.zeros((lines.shape[0], lines.shape[1] + 1), dtype=np.int8)
    padded[:, 1:] = lines
    rises = (np.diff(padded, axis=1) == 1).sum(axis=1)
    return bool((rises <= 1).all())


def is_hv_convex(p: Picture) -> bool:
    return _single_runs(p.bits) and _single_runs(p.bits.T)


def _require_polyomino(p: Picture) -> None:
    if not is_polyomino_picture(p):
        raise InvalidInputError("expected a polyomino picture (nonempty, 4-connected, touching all borders)")


_CORNER_DIRS = {
    CornerType.NE: ((0, 1), (1, 0)),
    CornerType.NW: ((0, 1), (-1, 0)),
    CornerType.SE: ((0, -1), (1, 0)),
    CornerType.SW: ((0, -1), (-1, 0)),
}


def corners(p: Picture) -> list[tuple[tuple[int, int], CornerType]]:
    _require_polyomino(p)
    out = []
    for x, y in p.cells():
        for kind, ((ax, ay), (bx, by)) in _CORNER_DIRS.items():
            if not p[x + ax, y + ay] and not p[x + bx, y + by]:
                out.append(((x, y), kind))
    return out


def corner_extent(p: Picture, x: int, y: int, kind: CornerType | str = CornerType.NE) -> CornerExtent:
    kind = CornerType(kind)
    if kind not in (CornerType.NE, CornerType.NW):
        raise InvalidInputError("zones are defined for NE and NW corners only")
    if ((x, y), kind) not in corners(p):
        raise InvalidInputError(f"({x}, {y}) is not a {kind.value} corner")
    return _extent(p, x, y, kind)


def _extent(p: Picture, x: int, y: int, kind: CornerType) -> CornerExtent:
    yp = y
    while p[x, yp - 1]:
        yp -= 1
    step = -1 if kind is CornerType.NE else 1
    xp = x
    while p[xp + step, y]:
        xp += step
    return CornerExtent(x, y, yp, xp, kind)


# ---------------------------------------------------------------- definitional


_PAIR_BLOCK = 1 << 22


def is_l_convex_definitional(p: Picture) -> bool:
    """HV-convex and every pair of cells has at least one bend cell set."""
    _require_polyomino(p)
    if not is_hv_convex(p):
        return False
    ys, xs = np.nonzero(p.bits)
    # bend[i, j] = p(x_i, y_j), checked in row blocks to bound memory
    step = max(1, _PAIR_BLOCK // len(ys))
    for lo in range(0, len(ys), step):
        i = slice(lo, lo + step)
        bend = p.bits[ys[None, :], xs[i, None]]
        other = p.bits[ys[i, None], xs[None, :]]
        if not (bend | other).all():
            return False
    return True


# ---------------------------------------------------------------- zones


def _zone_box(p: Picture, e: CornerExtent, zone_id: str) -> tuple[range, range]:
    """Column and row ranges of a zone, clipped to the picture."""
    n, m = p.n, p.m
    if e.kind is CornerType.NE:
        boxes = {
            "A": (range(e.x + 1, n), range(0, e.y_prime)),
            "B": (range(0, e.x_prime), range(e.y + 1, m)),
            "C": (range(0, e.x_prime), range(0, e.y_prime)),
        }
    else:
        boxes = {
            "A": (range(0, e.x), range(0, e.y_prime)),
            "B": (range(e.x_prime + 1, n), range(e.y + 1, m)),
            "C": (range(e.x_prime + 1, n), range(0, e.y_prime)),
        }
    return boxes[zone_id]


def _half_lines(p: Picture, e: CornerExtent, zone_id: str) -> list[tuple[range, range]]:
    """The two half-lines bounding a zone, as (xs, ys) pairs."""
    n, m = p.n, p.m
    ne = e.kind is CornerType.NE
    if zone_id == "A":
        col = e.x + 1 if ne else e.x - 1
        xs = range(e.x + 1, n) if ne else range(0, e.x)
        row, ys = e.y_prime - 1, range(0, e.y_prime)
    else:
        col = e.x_prime - 1 if ne else e.x_prime + 1
        xs = range(0, e.x_prime) if ne else range(e.x_prime + 1, n)
        if zone_id == "B":
            row, ys = e.y + 1, range(e.y + 1, m)
        else:
            row, ys = e.y_prime - 1, range(0, e.y_prime)
    return [(xs, range(row, row + 1)), (range(col, col + 1), ys)]


def _first_cell(p: Picture, xs: range, ys: range) -> tuple[int, int] | None:
    for x in xs:
        for y in ys:
            if p[x, y]:
                return (x, y)
    return None


def _validate_extent(p: Picture, e: CornerExtent) -> None:
    try:
        ok = corner_extent(p, e.x, e.y, e.kind) == e
    except InvalidInputError:
        ok = False
    if not ok:
        raise InvalidInputError(f"{e} is not a valid corner extent of this picture")


def zone_empty(p: Picture, e: CornerExtent, zone_id: str, method: str = "half-line") -> ZoneReport:
    """Check one zone of a corner; ``method`` is "half-line" or "scan".

    The half-line method only looks at the zone's two bounding half-lines,
    which suffices on HV-convex polyominoes because any cell in the zone
    connects to the corner through one of them.
    """
    if zone_id not in ZONES:
        raise InvalidInputError(f"zone must be one of {ZONES}, got {zone_id!r}")
    if method not in ("half-line", "scan"):
        raise InvalidInputError(f"unknown zone method {method!r}")
    _validate_extent(p, e)
    return _zone(p, e, zone_id, method)


def _zone(p: Picture, e: CornerExtent, zone_id: str, method: str) -> ZoneReport:
    if method == "scan":
        xs, ys = _zone_box(p, e, zone_id)
        return ZoneReport(zone_id, _first_cell(p, xs, ys))
    for xs, ys in _half_lines(p, e, zone_id):
        hit = _first_cell(p, xs, ys)
        if hit is not None:
            return ZoneReport(zone_id, hit)
    return ZoneReport(zone_id, None)


def corner_violations(p: Picture, method: str = "half-line") -> list[tuple[CornerExtent, ZoneReport]]:
    out = []
    for (x, y), kind in corners(p):
        if kind not in (CornerType.NE, CornerType.NW):
            continue
        e = _extent(p, x, y, kind)
        for z in ZONES:
            r = _zone(p, e, z, method)
            if not r.empty:
                out.append((e, r))
    return out


def is_l_convex_corner(p: Picture, method: str = "half-line") -> bool:
    _require_polyomino(p)
    if not is_hv_convex(p):
        return False
    return not corner_violations(p, method)
