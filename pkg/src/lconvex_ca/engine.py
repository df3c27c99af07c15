"""Synchronous von Neumann cellular automata over a quiescent background.

A cell state is a fixed-width vector of small integers (one per named
field, stored as int8).  The all-zero vector is the quiescent state.  A
configuration is an array ``grid[y + h, x + h, f]`` covering the picture
box plus a halo of width ``h``; everything outside the array is read as
quiescent.

A rule's local function is a numba-compiled
``transition(c, n, s, e, w, out)`` over int8 vectors.  One compiled sweep
kernel takes the transition as an argument, so a step is a single call
into native code regardless of the rule.
"""

from __future__ import annotations

import functools
import string
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numba as nb
import numpy as np

from .errors import InvalidInputError
from .picture import Picture

VON_NEUMANN = ((0, 0), (0, 1), (0, -1), (1, 0), (-1, 0))
SYMBOLS = "." + string.digits[1:] + string.ascii_letters + "#"


# The sweep does no refcounting of its own.  Views handed to the
# transition are borrowed for the duration of one call, and skipping the
# reference counts on them is several times faster per cell.  It is built
# per kernel and not disk-cached: numba's cache index cannot re-pickle a
# dispatcher-typed signature written by another process.
@functools.lru_cache(maxsize=None)
def _sweeper(kern):
    @nb.njit(nogil=True, _nrt=False)
    def sweep(g, out, zero, r0, r1):
        rows, cols, nf = g.shape
        for r in range(r0, r1):
            for q in range(cols):
                north = g[r + 1, q] if r + 1 < rows else zero
                south = g[r - 1, q] if r > 0 else zero
                east = g[r, q + 1] if q + 1 < cols else zero
                west = g[r, q - 1] if q > 0 else zero
                kern(g[r, q], north, south, east, west, out[r, q])

    return sweep


@dataclass(frozen=True)
class Layer:
    """Projection of a configuration onto one printable symbol per cell."""

    name: str
    project: Callable[[np.ndarray], np.ndarray]
    legend: str


def field_layer(name: str, index: int) -> Layer:
    def project(grid: np.ndarray) -> np.ndarray:
        v = grid[:, :, index].astype(np.int64)
        return np.asarray(list(SYMBOLS))[np.clip(v, 0, len(SYMBOLS) - 1)]

    return Layer(name, project, "value 0 '.', 1-9 digits, 10+ letters")


@dataclass(frozen=True)
class Rule:
    """A local rule with named int8 fields and an input embedding.

    ``embed[b]`` is the state placed on a picture cell holding bit ``b``.
    The quiescent fixed point is checked on construction.
    """

    name: str
    fields: tuple[str, ...]
    transition: Callable
    embed: tuple[np.ndarray, np.ndarray]
    layers: dict[str, Layer] = field(default_factory=dict)

    def __post_init__(self) -> None:
        nf = len(self.fields)
        embed = tuple(np.asarray(e, dtype=np.int8).reshape(nf) for e in self.embed)
        object.__setattr__(self, "embed", embed)
        layers = {f: field_layer(f, i) for i, f in enumerate(self.fields)}
        layers.update(self.layers)
        object.__setattr__(self, "layers", layers)
        q = np.zeros(nf, np.int8)
        if self.apply(q, q, q, q, q).any():
            raise InvalidInputError(f"rule {self.name!r} does not keep the quiescent state fixed")

    @property
    def width(self) -> int:
        return len(self.fields)

    def index(self, name: str) -> int:
        return self.fields.index(name)

    def apply(self, c, n, s, e, w) -> np.ndarray:
        out = np.zeros(self.width, np.int8)
        self.transition(*(np.ascontiguousarray(v, dtype=np.int8) for v in (c, n, s, e, w)), out)
        return out


@dataclass(frozen=True, eq=False)
class Configuration:
    grid: np.ndarray
    n: int
    m: int
    halo: int
    t: int = 0

    def cell(self, x: int, y: int) -> np.ndarray:
        """State at picture coordinates; quiescent outside the arena."""
        h = self.halo
        if -h <= x < self.n + h and -h <= y < self.m + h:
            return self.grid[y + h, x + h].copy()
        return np.zeros(self.grid.shape[2], np.int8)

    def halo_quiescent(self) -> bool:
        h = self.halo
        inner = np.zeros(self.grid.shape[:2], dtype=bool)
        inner[h : h + self.m, h : h + self.n] = True
        return not self.grid[~inner].any()

    def same_state(self, other: "Configuration") -> bool:
        return self.grid.shape == other.grid.shape and bool(np.array_equal(self.grid, other.grid))


@dataclass(frozen=True)
class TraceFrame:
    t: int
    layer_name: str
    grid: list[str]


def real_time(n: int, m: int) -> int:
    if n < 1 or m < 1:
        raise InvalidInputError("dimensions must be at least 1")
    return n + m - 2


def make_picture_configuration(p: Picture, rule: Rule, halo: int = 1) -> Configuration:
    if halo < 1:
        raise InvalidInputError("halo width must be at least 1")
    if not isinstance(p, Picture) or p.bits.size == 0:
        raise InvalidInputError("empty picture")
    g = np.zeros((p.m + 2 * halo, p.n + 2 * halo, rule.width), np.int8)
    inner = g[halo : halo + p.m, halo : halo + p.n]
    inner[~p.bits] = rule.embed[0]
    inner[p.bits] = rule.embed[1]
    return Configuration(g, p.n, p.m, halo)


def _bands(rows: int, jobs: int) -> list[tuple[int, int]]:
    jobs = max(1, min(jobs, rows))
    cuts = np.linspace(0, rows, jobs + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]


class Stepper:
    """Double-buffered sweeps; reuses its buffers across steps."""

    def __init__(self, rule: Rule, jobs: int = 1):
        self.rule = rule
        self.jobs = max(1, int(jobs))
        self._pool = ThreadPoolExecutor(self.jobs) if self.jobs > 1 else None
        self._zero = np.zeros(rule.width, np.int8)

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self) -> "Stepper":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def advance(self, g: np.ndarray, out: np.ndarray) -> None:
        sweep = _sweeper(self.rule.transition)
        zero = self._zero
        if self._pool is None:
            sweep(g, out, zero, 0, g.shape[0])
            return
        futs = [self._pool.submit(sweep, g, out, zero, a, b) for a, b in _bands(g.shape[0], self.jobs)]
        for f in futs:
            f.result()


def step(c: Configuration, r: Rule, jobs: int = 1) -> Configuration:
    out = np.empty_like(c.grid)
    with Stepper(r, jobs) as st:
        st.advance(c.grid, out)
    return replace(c, grid=out, t=c.t + 1)


def project(c: Configuration, r: Rule, layer: str) -> list[str]:
    if layer not in r.layers:
        raise InvalidInputError(f"unknown trace layer {layer!r}; known: {', '.join(sorted(r.layers))}")
    sym = r.layers[layer].project(c.grid)
    return ["".join(row) for row in sym[::-1]]


def run(
    c: Configuration,
    r: Rule,
    t: int,
    trace_layers: Sequence[str] | None = None,
    jobs: int = 1,
    observe: Callable[[Configuration], None] | None = None,
) -> tuple[Configuration, list[TraceFrame]]:
    """Iterate ``t`` steps, optionally recording frames for t=0..t.

    ``observe`` is called on every configuration including the first,
    which lets callers check invariants per step without a trace.
    """
    if t < 0:
        raise InvalidInputError("step count must be non-negative")
    layers = list(trace_layers or [])
    for name in layers:
        if name not in r.layers:
            raise InvalidInputError(f"unknown trace layer {name!r}")
    frames: list[TraceFrame] = []

    def record(conf: Configuration) -> None:
        for name in layers:
            frames.append(TraceFrame(conf.t, name, project(conf, r, name)))
        if observe is not None:
            observe(conf)

    cur = c.grid.copy()
    nxt = np.empty_like(cur)
    conf = replace(c, grid=cur)
    record(conf)
    with Stepper(r, jobs) as st:
        for _ in range(t):
            st.advance(cur, nxt)
            cur, nxt = nxt, cur
            conf = replace(c, grid=cur, t=conf.t + 1)
            if layers or observe is not None:
                record(replace(conf, grid=cur.copy()))
    return replace(conf, grid=cur.copy()), frames


def format_trace(frames: Iterable[TraceFrame], r: Rule, c: Configuration, layer: str) -> str:
    lines = [
        f"# trace layer={layer} n={c.n} m={c.m} halo={c.halo}",
        f"# legend {r.layers[layer].legend}",
    ]
    for fr in frames:
        if fr.layer_name != layer:
            continue
        lines.append(f"t={fr.t}")
        lines.extend(fr.grid)
        lines.append("")
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> tuple[dict[str, str], list[TraceFrame]]:
    header: dict[str, str] = {}
    frames: list[TraceFrame] = []
    layer = ""
    cur_t: int | None = None
    rows: list[str] = []
    for line in text.splitlines():
        if line.startswith("# trace"):
            header = dict(kv.split("=", 1) for kv in line.split()[2:])
            layer = header.get("layer", "")
        elif line.startswith("#"):
            continue
        elif line.startswith("t="):
            cur_t, rows = int(line[2:]), []
        elif line == "":
            if cur_t is not None:
                frames.append(TraceFrame(cur_t, layer, rows))
                cur_t = None
        else:
            rows.append(line)
    if cur_t is not None:
        frames.append(TraceFrame(cur_t, layer, rows))
    return header, frames
