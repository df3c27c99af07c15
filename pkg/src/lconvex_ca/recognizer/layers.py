"""Printable trace layers of the recognizer.

Each projection maps the whole grid to one character per cell, so traces
stay in arena coordinates (compressed blocks occupy the south-west part
of the arena once compression is over).
"""

from __future__ import annotations

import numpy as np

from ..engine import SYMBOLS, Layer
from . import fields as F


def _chars(values: np.ndarray) -> np.ndarray:
    return np.asarray(list(SYMBOLS))[np.clip(values, 0, len(SYMBOLS) - 1)]


def _input(g: np.ndarray) -> np.ndarray:
    # bits of the cell's own content: raw item, or the 2x2 block as a hex digit
    ph = g[:, :, F.PH]
    raw = (g[:, :, F.IT0] & F.I_B).astype(np.int64)
    block = sum(((g[:, :, F.SI + k] & F.S_B) != 0).astype(np.int64) << k for k in range(4))
    out = np.where((ph == F.P_RAW) | (ph == F.P_HC), raw, block)
    sym = np.where(out > 0, np.asarray(list("0123456789abcdef"))[np.clip(out, 0, 15)], "0")
    return np.where(ph == 0, ".", np.where(ph == F.P_VAC, "_", sym))


def _compress(g: np.ndarray) -> np.ndarray:
    return np.asarray(list(".rhvm_"))[g[:, :, F.PH].astype(np.int64)]


def _dirinfo(g: np.ndarray) -> np.ndarray:
    # bit 0: subcell (0,0) has a 1 strictly west, bit 1: 1 strictly south
    si = g[:, :, F.SI].astype(np.int64)
    sa = g[:, :, F.SA].astype(np.int64)
    v = ((si & F.S_W1) != 0).astype(np.int64) | (((sa & F.A_S1) != 0).astype(np.int64) << 1)
    return np.where(g[:, :, F.PH] == F.P_MAIN, _chars(v), ".")


def _any(g: np.ndarray, idx: list[int]) -> np.ndarray:
    return np.any(np.stack([g[:, :, i] != 0 for i in idx]), axis=0)


def _ab(g: np.ndarray) -> np.ndarray:
    h = _any(g, [F.HAB, F.HAB + 1]).astype(np.int64)
    v = _any(g, [F.VAB, F.VAB + 1]).astype(np.int64) << 1
    return _chars(h | v)


def _c(g: np.ndarray) -> np.ndarray:
    h1 = _any(g, [F.HW, F.HW + 1]) & np.any(
        np.stack([(g[:, :, F.HW + k] & F.W_HEAD) != 0 for k in range(2)]), axis=0
    )
    v1 = _any(g, [F.V1, F.V1 + 1])
    h2 = _any(g, [F.H2, F.H2 + 1])
    v2 = np.any(np.stack([(g[:, :, F.VW + k] & F.W_HEAD) != 0 for k in range(2)]), axis=0)
    v = h1.astype(np.int64) | (v1.astype(np.int64) << 1) | (h2.astype(np.int64) << 2) | (v2.astype(np.int64) << 3)
    return _chars(v)


def _counters(g: np.ndarray) -> np.ndarray:
    # h-lane 0 or v-lane 0 word cell: '0'/'1' bit, upper case head, '|' end
    cell = np.where(g[:, :, F.VW] != 0, g[:, :, F.VW], g[:, :, F.HW]).astype(np.int64)
    for k in (1,):
        cell = np.where(cell == 0, np.where(g[:, :, F.VW + k] != 0, g[:, :, F.VW + k], g[:, :, F.HW + k]), cell)
    bit = (cell & F.W_BIT) != 0
    head = (cell & F.W_HEAD) != 0
    end = (cell & F.W_END) != 0
    sym = np.where(head, np.where(bit, "I", "O"), np.where(bit, "1", "0"))
    sym = np.where(end & ~head, np.where(bit, "!", "|"), sym)
    return np.where((cell & F.W_P) != 0, sym, ".")


def _nw(g: np.ndarray) -> np.ndarray:
    ab = _any(g, [F.HABN, F.HABN + 1, F.VABN, F.VABN + 1]).astype(np.int64)
    h1 = _any(g, [F.H1N, F.H1N + 1]).astype(np.int64) << 1
    v1 = _any(g, [F.V1N, F.V1N + 1, F.H2N, F.H2N + 1]).astype(np.int64) << 2
    v2 = _any(g, [F.V2N, F.V2N + 1]).astype(np.int64) << 3
    return _chars(ab | h1 | v1 | v2)


def _error(g: np.ndarray) -> np.ndarray:
    e = (g[:, :, F.ERR] != 0).astype(np.int64) | ((g[:, :, F.FIN] != 0).astype(np.int64) << 1)
    d = g[:, :, F.DEC].astype(np.int64)
    return np.where(d == F.DEC_ACCEPT, "A", np.where(d == F.DEC_REJECT, "R", _chars(e)))


LAYERS: dict[str, Layer] = {
    "input": Layer("input", _input, "raw bit, then 2x2 block bits as hex (bit k = subcell 2dy+dx); '_' vacated"),
    "compress": Layer("compress", _compress, "phase: r raw, h h-compressing, v v-compressing, m main, _ vacated"),
    "dirinfo": Layer("dirinfo", _dirinfo, "subcell (0,0): 1 = a 1 strictly west, 2 = strictly south, 3 = both"),
    "ab-signals": Layer("ab-signals", _ab, "1 westward check, 2 southward check, 3 both"),
    "c-signals": Layer("c-signals", _c, "bit mask: 1 h1 head, 2 v1, 4 h2, 8 v2 head"),
    "counters": Layer("counters", _counters, "word cells: I/O head bit, 1/0 bit, !/| end bit"),
    "nw-signals": Layer("nw-signals", _nw, "bit mask: 1 ab checks, 2 h1, 4 v1 or h2, 8 v2"),
    "error": Layer("error", _error, "1 error, 2 finish, 3 both; A accept, R reject at the origin"),
}
