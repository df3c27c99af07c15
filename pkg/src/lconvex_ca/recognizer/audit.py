"""Trace audits of the recognizer's signals.

The audits run on a batched arena (see ``decide_batch``) and inspect
every configuration of the run:

* collisions: at every step each picture has at most one westward and
  one southward (a)/(b) check signal per lane, for both corner passes;
* v1 multiplicity: the v1 signals spawned for a picture equal the number
  of southern-border segments that own a corner (NE and NW separately);
* counters: every counter word that reaches the south border without
  being invalidated holds 1 plus the deltas applied to its head, summed
  along the head's path through the trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..engine import Stepper, real_time
from ..oracle import is_hv_convex, is_polyomino_picture
from ..picture import Picture
from . import fields as F
from .rule import K_LATENESS


@dataclass
class AuditReport:
    pictures: int = 0
    steps: int = 0
    collisions: list[str] = field(default_factory=list)
    v1_mismatches: list[str] = field(default_factory=list)
    v1_checked: int = 0
    counter_mismatches: list[str] = field(default_factory=list)
    counters_checked: int = 0
    counters_invalidated: int = 0
    max_word_cells: int = 0
    counter_values: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.collisions or self.v1_mismatches or self.counter_mismatches)

    def merge(self, o: "AuditReport") -> "AuditReport":
        return AuditReport(
            self.pictures + o.pictures,
            self.steps + o.steps,
            self.collisions + o.collisions,
            self.v1_mismatches + o.v1_mismatches,
            self.v1_checked + o.v1_checked,
            self.counter_mismatches + o.counter_mismatches,
            self.counters_checked + o.counters_checked,
            self.counters_invalidated + o.counters_invalidated,
            max(self.max_word_cells, o.max_word_cells),
            self.counter_values + o.counter_values,
        )


def _column_bottoms(p: Picture) -> list[int]:
    return [int(np.nonzero(p.bits[:, x])[0].min()) for x in range(p.n)]


def owned_segments(p: Picture, kind: str) -> int:
    """Southern-border segments (maximal runs of columns sharing a bottom row) holding a corner column."""
    b = _column_bottoms(p)
    seg = [0] * p.n
    for x in range(1, p.n):
        seg[x] = seg[x - 1] + (b[x] != b[x - 1])
    owners = set()
    for x, y in p.cells():
        if p[x, y + 1]:
            continue
        side = p[x + 1, y] if kind == "ne" else p[x - 1, y]
        if not side:
            owners.add(seg[x])
    return len(owners)


def _layout(pictures: list[Picture], width: int = 256):
    places = []
    x = y = 1
    shelf = 0
    for p in pictures:
        if x + p.n + 1 > width and x > 1:
            x, y = 1, y + shelf + 1
            shelf = 0
        places.append((x, y))
        x += p.n + 1
        shelf = max(shelf, p.m)
    W = max(width, max(px + p.n + 1 for p, (px, _) in zip(pictures, places)))
    return places, W, y + shelf + 1


def audit_batch(pictures: list[Picture]) -> AuditReport:
    from . import recognizer_rule

    rule = recognizer_rule()
    rep = AuditReport(pictures=len(pictures))
    if not pictures:
        return rep
    places, W, H = _layout(pictures)
    g = np.zeros((H, W, F.NF), np.int8)
    owner = np.full((H, W), -1, np.int64)
    for i, (p, (px, py)) in enumerate(zip(pictures, places)):
        blk = g[py : py + p.m, px : px + p.n]
        blk[~p.bits] = rule.embed[0]
        blk[p.bits] = rule.embed[1]
        owner[py : py + p.m, px : px + p.n] = i
    npic = len(pictures)
    limit = max(real_time(p.n, p.m) for p in pictures) + K_LATENESS
    rows = np.broadcast_to(np.arange(H)[:, None], (H, W))
    cols = np.broadcast_to(np.arange(W)[None, :], (H, W))
    # the one-corner-per-line guarantee holds for HV-convex polyominoes only
    valid = np.array([is_polyomino_picture(p) and is_hv_convex(p) for p in pictures] + [False])
    inside = valid[owner]
    v1_count = np.zeros((npic, 2), np.int64)

    # counter tracking: value of each head by (lane kind, arena row, arena column, lane)
    heads: dict[tuple[str, int, int, int], int] = {}
    sink_words: dict[tuple[int, int, int], list] = {}

    def check_lanes(t: int, base: int, axis: str, what: str) -> None:
        for lane in range(2):
            hit = inside & (g[:, :, base + lane] != 0)
            if not hit.any():
                continue
            line = rows if axis == "row" else cols
            key = owner[hit] * (H + W) + line[hit]
            counts = np.bincount(key)
            for k in np.nonzero(counts > 1)[0]:
                rep.collisions.append(
                    f"picture {k // (H + W)} t={t}: {counts[k]} {what} signals on {axis} {k % (H + W)} lane {lane}"
                )

    nxt = np.empty_like(g)
    with Stepper(rule) as st:
        for t in range(1, limit + 1):
            st.advance(g, nxt)
            g, nxt = nxt, g
            rep.steps += 1
            check_lanes(t, F.HAB, "row", "ne westward")
            check_lanes(t, F.VAB, "column", "ne southward")
            check_lanes(t, F.HABN, "row", "nw eastward")
            check_lanes(t, F.VABN, "column", "nw southward")
            ev = g[:, :, F.EV].astype(np.int64)
            if ev.any():
                for bit, k in ((F.E_V1, 0), (F.E_V1 << 1, 0), (F.E_V1N, 1), (F.E_V1N << 1, 1)):
                    hit = inside & ((ev & bit) != 0)
                    if hit.any():
                        np.add.at(v1_count[:, k], owner[hit], 1)
            heads = _advance_heads(g, heads)
            _collect_sink(g, t, heads, sink_words, rep, owner)

    for i, p in enumerate(pictures):
        if not valid[i]:
            continue
        rep.v1_checked += 1
        for k, kind in enumerate(("ne", "nw")):
            want = owned_segments(p, kind)
            if v1_count[i, k] != want:
                rep.v1_mismatches.append(
                    f"picture {i} ({p.n}x{p.m} {'/'.join(p.rows())}): {kind} v1 spawned {v1_count[i, k]}, segments {want}"
                )
    return rep


def _advance_heads(g: np.ndarray, prev: dict) -> dict:
    """Values of the word heads present now, from the heads one step earlier."""
    cur: dict[tuple[str, int, int, int], int] = {}
    for lane in range(2):
        ys, xs = np.nonzero((g[:, :, F.HW + lane] & F.W_HEAD) != 0)
        for y, x in zip(ys.tolist(), xs.tolist()):
            d = int(g[y, x, F.HD + lane])
            base = prev.get(("h", y, x + 1, lane), 1)
            cur[("h", y, x, lane)] = base + d
    for lane in range(2):
        ys, xs = np.nonzero((g[:, :, F.VW + lane] & F.W_HEAD) != 0)
        for y, x in zip(ys.tolist(), xs.tolist()):
            d = int(g[y, x, F.VD + lane])
            # a head may reach this spot by turning here (lane 0 first) or from the north
            base = None
            for dy in range(2):
                if g[y, x, F.MK + dy] == 1 + lane and ("h", y, x + 1, dy) in prev:
                    base = prev[("h", y, x + 1, dy)]
                    break
            if base is None:
                base = prev.get(("v", y + 1, x, lane), 1)
            cur[("v", y, x, lane)] = base + d
    return cur


def _collect_sink(g, t, heads, words, rep: AuditReport, owner) -> None:
    """Read counter words cell by cell as they arrive at the south border."""
    for lane in range(2):
        ys, xs = np.nonzero(g[:, :, F.SK + lane] != 0)
        for y, x in zip(ys.tolist(), xs.tolist()):
            ev = int(g[y, x, F.SK + lane])
            key = (y, x, lane)
            if ev & F.K_HEAD:
                words[key] = [heads.get(("v", y, x, lane)), [], False]
            if key not in words:
                continue
            word = words[key]
            word[1].append(1 if ev & F.K_BIT else 0)
            word[2] = word[2] or bool(ev & F.K_UND)
            if ev & F.K_END:
                del words[key]
                want, bits, und = word
                rep.max_word_cells = max(rep.max_word_cells, len(bits))
                if und:
                    rep.counters_invalidated += 1
                    continue
                value = sum(b << i for i, b in enumerate(bits))
                if ev & F.K_POS:
                    value += 1 << len(bits)
                rep.counters_checked += 1
                rep.counter_values.append(value)
                if want is None or value != want:
                    rep.counter_mismatches.append(
                        f"picture {owner[y, x]} t={t} column {x} lane {lane}: read {value}, recount {want}"
                    )


def block_dirinfo(grid: np.ndarray, halo: int, n: int, m: int) -> dict[tuple[int, int], tuple[bool, bool, bool, bool]]:
    """(west, east, north, south) flags of every original cell, read from main-phase blocks.

    East and north are derived the same way the rule derives them: from
    the cell's own neighbour memory when it holds a 1, else from the
    absence of a 1 on the other side of its single-run row or column.
    """
    out = {}
    for x in range(n):
        for y in range(m):
            blk = grid[halo + y // 2, halo + x // 2]
            if blk[F.PH] != F.P_MAIN:
                raise ValueError(f"block of cell ({x}, {y}) is not in the main phase")
            k = 2 * (y % 2) + x % 2
            si = int(blk[F.SI + k])
            sa = int(blk[F.SA + k])
            west = bool(si & F.S_W1)
            south = bool(sa & F.A_S1)
            if si & F.S_B:
                east, north = bool(si & F.S_ME), bool(si & F.S_MN)
            else:
                east, north = not west, not south
            out[(x, y)] = (west, east, north, south)
    return out


def picture_dirinfo(p: Picture) -> dict[tuple[int, int], tuple[bool, bool, bool, bool]]:
    b = p.bits
    return {
        (x, y): (bool(b[y, :x].any()), bool(b[y, x + 1 :].any()), bool(b[y + 1 :, x].any()), bool(b[:y, x].any()))
        for x in range(p.n)
        for y in range(p.m)
    }
