"""Real-time recognizer for pictures of L-convex polyominoes."""

from __future__ import annotations

import functools

from dataclasses import dataclass

import numpy as np

from ..engine import Configuration, Layer, Rule, Stepper, make_picture_configuration, real_time
from ..picture import Picture
from . import fields as F
from .rule import K_LATENESS, transition

__all__ = ["K_LATENESS", "RunReport", "decide", "decide_batch", "recognizer_rule", "run_recognizer"]


@dataclass(frozen=True)
class RunReport:
    verdict: str
    decision_step: int
    real_time: int
    lateness: int
    first_error_step: int | None = None
    error_mask: int = 0
    # the one-cell ring around the picture stayed quiescent at every step
    halo_quiet: bool = True

    @property
    def accepted(self) -> bool:
        return self.verdict == "accept"

    def line(self) -> str:
        return (
            f"verdict={self.verdict} decision_step={self.decision_step} "
            f"real_time={self.real_time} lateness={self.lateness}"
        )


def _embed(bit: int) -> np.ndarray:
    v = np.zeros(F.NF, np.int8)
    v[F.PH] = F.P_RAW
    v[F.IT0] = bit
    return v


_RULE: Rule | None = None


def recognizer_rule() -> Rule:
    global _RULE
    if _RULE is None:
        from .layers import LAYERS

        _RULE = Rule("l-convex-recognizer", F.FIELDS, transition, (_embed(0), _embed(1)), LAYERS)
    return _RULE


@functools.lru_cache(maxsize=4096)
def _ring_template(n: int, m: int, W: int) -> np.ndarray:
    xs = np.arange(-1, n + 1)
    ys = np.arange(m) * W
    return np.concatenate([xs - W, xs + m * W, ys - 1, ys + n])


def _ring(x: int, y: int, n: int, m: int, W: int) -> np.ndarray:
    """Flat arena indices of the cells bordering the box at (x, y)."""
    return _ring_template(n, m, W) + (y * W + x)


def run_recognizer(p: Picture, steps: int | None = None, observe=None, jobs: int = 1):
    """Run until the origin decides, or for exactly ``steps`` steps.

    Returns the final configuration and a RunReport.  Without a decision
    (a step budget shorter than the finish signal) the origin's latch
    gives the verdict: rejected once an error arrived, accepting otherwise.
    """
    rule = recognizer_rule()
    c = make_picture_configuration(p, rule, halo=1)
    rt = real_time(p.n, p.m)
    limit = rt + K_LATENESS if steps is None else steps
    cur = c.grid.copy()
    nxt = np.empty_like(cur)
    h = c.halo
    first_err = None
    dec_step = None
    ring = _ring(h, h, p.n, p.m, cur.shape[1])
    quiet = True
    t = 0
    if observe is not None:
        observe(c)
    with Stepper(rule, jobs) as st:
        while t < limit:
            st.advance(cur, nxt)
            cur, nxt = nxt, cur
            t += 1
            quiet = quiet and not cur.reshape(-1, F.NF)[ring].any()
            o = cur[h, h]
            if first_err is None and o[F.ERR]:
                first_err = t
            if dec_step is None and o[F.DEC]:
                dec_step = t
            if observe is not None:
                observe(Configuration(cur.copy(), c.n, c.m, h, t))
            if dec_step is not None and steps is None:
                break
    o = cur[h, h]
    if o[F.DEC]:
        accept = o[F.DEC] == F.DEC_ACCEPT
    else:
        accept = o[F.ERR] == 0
    d = dec_step if dec_step is not None else t
    report = RunReport("accept" if accept else "reject", d, rt, d - rt, first_err, int(o[F.ERR]), quiet)
    return Configuration(cur.copy(), c.n, c.m, h, t), report


def decide(p: Picture) -> RunReport:
    return run_recognizer(p)[1]


def decide_batch(pictures: list[Picture], width: int = 256) -> list[RunReport]:
    """Decide many pictures in one arena, separated by quiescent gaps.

    A quiescent cell stays quiescent, and no state crosses a quiescent
    gap, so every picture runs exactly as it would alone.  The ring of
    cells around each picture is checked at every step: any activity
    outside a picture has to pass through it first.
    """
    rule = recognizer_rule()
    if not pictures:
        return []
    # shelf packing: pictures left to right, new shelf when the row is full
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
    H = y + shelf + 1
    g = np.zeros((H, W, F.NF), np.int8)
    for p, (px, py) in zip(pictures, places):
        blk = g[py : py + p.m, px : px + p.n]
        blk[~p.bits] = rule.embed[0]
        blk[p.bits] = rule.embed[1]
    oy = np.array([py for _, py in places])
    ox = np.array([px for px, _ in places])
    rts = np.array([real_time(p.n, p.m) for p in pictures])
    limit = int(rts.max()) + K_LATENESS
    ring = np.concatenate([_ring(px, py, p.n, p.m, W) for p, (px, py) in zip(pictures, places)])
    ring_owner = np.concatenate(
        [np.full(2 * (p.n + p.m) + 4, i) for i, p in enumerate(pictures)]
    )
    loud = np.zeros(len(pictures), bool)
    dec_step = np.full(len(pictures), -1)
    err_step = np.full(len(pictures), -1)
    nxt = np.empty_like(g)
    with Stepper(rule) as st:
        for t in range(1, limit + 1):
            st.advance(g, nxt)
            g, nxt = nxt, g
            act = g.reshape(-1, F.NF)[ring].any(axis=1)
            if act.any():
                # a ring cell between two pictures is blamed on both
                loud[ring_owner[act]] = True
            o = g[oy, ox]
            err_step[(err_step < 0) & (o[:, F.ERR] != 0)] = t
            dec_step[(dec_step < 0) & (o[:, F.DEC] != 0)] = t
            if (dec_step >= 0).all():
                break
    o = g[oy, ox]
    out = []
    for i, p in enumerate(pictures):
        d = int(dec_step[i]) if dec_step[i] >= 0 else limit
        verdict = "accept" if o[i, F.DEC] == F.DEC_ACCEPT else "reject"
        fe = int(err_step[i]) if err_step[i] >= 0 else None
        out.append(RunReport(verdict, d, int(rts[i]), d - int(rts[i]), fe, int(o[i, F.ERR]), not loud[i]))
    return out
