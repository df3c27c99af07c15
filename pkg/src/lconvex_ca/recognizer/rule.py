"""The recognizer's local transition.

Timeline for a picture of width n and height m (compressed block (X, Y)
holds original cells (2X+dx, 2Y+dy)):

* step 0 -> 1: every input cell memorises which of its four neighbours
  hold a 1 and whether it sits on the north or east border.
* horizontal compression: items move west one cell per step until they
  pile up two per cell.  Cell X of every row is complete at t = X+2 and
  computes its row prefix (1 to the west, number of run starts, contact
  with the row above) from its west neighbour, which completed one step
  earlier.  The east end of each row checks that the row is one nonempty
  run touching the row above.
* vertical compression: the same, southward, inside each compressed
  column.  Block (X, Y) is complete at t = X+Y+3; it computes column
  prefixes and the southern-segment marks, and the top of each column
  checks that the column is one nonempty run.
* main phase: a block is ready one step after all its neighbours are
  complete, so at t = X+Y+5.  Corner signals start there and every signal
  crosses one block per step, turning with no delay.
* error bits travel west to column 0 then south to the origin; a finish
  signal leaves the north-east block on a timer and fixes the verdict at
  the origin at t = n+m-2+K.
"""

from __future__ import annotations

import numba as nb
import numpy as np

# Every function here is compiled without refcounting (see the engine's
# sweep), so none of them may allocate.

from .fields import (
    A_ON, A_S1, A_SE, A_SW, CD, CNT, DEC, DEC_ACCEPT, DEC_REJECT, E_V1, E_V1N, ERR, ERR_COL, ERR_NE_AB,
    ERR_NE_C, ERR_NW_AB, ERR_NW_C, ERR_ROW, EV, FIN, H2, H2N, H_ANY, H_OVN, H_ST_SHIFT, HAB, HABN, HD,
    HG, HP, HSUM, HW, H1N, I_B, I_ME, I_MN, I_MS, I_MW, I_OE, I_ON, IT0, K_BIT, K_END, K_ERR, K_HEAD,
    K_P, K_POS, K_UND, MK, MKN, N_AFTER, N_CNT_MAX, N_CNT_SHIFT, N_SEEK, NF, P_HC, P_MAIN, P_RAW,
    P_VAC, P_VC, PH, RDY, S_B, S_EX, S_ME, S_MN, S_MS, S_MW, S_W1, SA, SI, SK, SKN, SN, V1, V1N, V2N,
    V_ANY, V_SE, V_ST_SHIFT, V_SW, V_TME, V_TMW, VAB, VABN, VD, VG, VP, VS, VW, W_AFTER, W_BIT, W_END,
    W_HEAD, W_P, W_SEEK, W_UND,
)

# Lateness constant: the origin decides at t = n+m-2+K.  Chosen from the
# measured worst error arrival (see the acceptance suite), plus margin.
K_LATENESS = 9


# ---------------------------------------------------------------- neighbour lookups


@nb.njit(cache=True, inline="always", _nrt=False)
def _sub(c, n, s, e, w, dx, dy, base):
    """Field ``base + 2*dy + dx`` of a subcell given relative to this block.

    dx and dy range over -1..2; at most one of them leaves the block.
    Blocks that are not in the main phase read as empty.
    """
    if dx < 0:
        blk = w
        dx += 2
    elif dx > 1:
        blk = e
        dx -= 2
    elif dy < 0:
        blk = s
        dy += 2
    elif dy > 1:
        blk = n
        dy -= 2
    else:
        blk = c
    if blk[PH] != P_MAIN:
        return 0
    return np.int64(blk[base + 2 * dy + dx])


@nb.njit(cache=True, inline="always", _nrt=False)
def _w1(c, n, s, e, w, dx, dy):
    return (_sub(c, n, s, e, w, dx, dy, SI) & S_W1) != 0


@nb.njit(cache=True, inline="always", _nrt=False)
def _s1(c, n, s, e, w, dx, dy):
    return (_sub(c, n, s, e, w, dx, dy, SA) & A_S1) != 0


@nb.njit(cache=True, inline="always", _nrt=False)
def _e1(c, n, s, e, w, dx, dy):
    # rows are single runs on any input that passes the row check
    si = _sub(c, n, s, e, w, dx, dy, SI)
    if not si & S_EX:
        return False
    if si & S_B:
        return (si & S_ME) != 0
    return (si & S_W1) == 0


@nb.njit(cache=True, inline="always", _nrt=False)
def _n1(c, n, s, e, w, dx, dy):
    si = _sub(c, n, s, e, w, dx, dy, SI)
    if not si & S_EX:
        return False
    if si & S_B:
        return (si & S_MN) != 0
    return (_sub(c, n, s, e, w, dx, dy, SA) & A_S1) == 0


# ---------------------------------------------------------------- early phases


@nb.njit(cache=True, inline="always", _nrt=False)
def _bit_of_raw(blk):
    return 1 if blk[PH] == P_RAW and blk[IT0] != 0 else 0


@nb.njit(cache=True, _nrt=False)
def _phase_raw(c, n, s, e, w, out):
    item = 0
    if c[IT0] != 0:
        item |= I_B
    if _bit_of_raw(n):
        item |= I_MN
    if _bit_of_raw(s):
        item |= I_MS
    if _bit_of_raw(e):
        item |= I_ME
    if _bit_of_raw(w):
        item |= I_MW
    if n[PH] == 0:
        item |= I_ON
    if e[PH] == 0:
        item |= I_OE
    out[PH] = P_HC
    out[IT0] = item
    out[CNT] = 1
    return 0


@nb.njit(cache=True, _nrt=False)
def _phase_hc(c, n, s, e, w, out):
    leaving = w[PH] == P_HC
    receiving = e[PH] == P_HC
    if leaving:
        if receiving:
            out[PH] = P_HC
            out[IT0] = e[IT0]
            out[CNT] = 1
        else:
            out[PH] = P_VAC
        return 0
    # settled: this cell is complete; compute the row prefix
    hs = np.int64(w[HSUM]) if w[PH] == P_VC else 0
    anyb = (hs & H_ANY) != 0
    starts = (hs >> H_ST_SHIFT) & 3
    ovn = (hs & H_OVN) != 0
    err = 0
    items = (np.int64(c[IT0]), np.int64(e[IT0]) if receiving else -1)
    for dx in range(2):
        it = items[dx]
        if it < 0:
            continue
        si = S_EX
        if it & I_B:
            si |= S_B
        if it & I_MN:
            si |= S_MN
        if it & I_MS:
            si |= S_MS
        if it & I_ME:
            si |= S_ME
        if it & I_MW:
            si |= S_MW
        if anyb:
            si |= S_W1
        out[SI + dx] = si
        out[SA + dx] = A_ON if it & I_ON else 0
        b = (it & I_B) != 0
        if b and not it & I_MW:
            starts = min(starts + 1, 2)
        if b and it & I_MN:
            ovn = True
        anyb = anyb or b
        if it & I_OE:
            if starts != 1 or not ((it & I_ON) or ovn):
                err |= ERR_ROW
    out[HSUM] = (1 if anyb else 0) | (starts << H_ST_SHIFT) | (H_OVN if ovn else 0)
    out[PH] = P_VC
    out[CNT] = 1
    return err


@nb.njit(cache=True, _nrt=False)
def _phase_vc(c, n, s, e, w, out):
    leaving = s[PH] == P_VC
    receiving = n[PH] == P_VC
    if leaving:
        if receiving:
            out[PH] = P_VC
            out[CNT] = 1
            for k in range(2):
                out[SI + k] = n[SI + k]
                out[SA + k] = n[SA + k]
        else:
            out[PH] = P_VAC
        return 0
    for k in range(2):
        out[SI + k] = c[SI + k]
        out[SA + k] = c[SA + k]
        if receiving:
            out[SI + 2 + k] = n[SI + k]
            out[SA + 2 + k] = n[SA + k]
    err = 0
    for dx in range(2):
        vs = np.int64(s[VS + dx]) if s[PH] == P_MAIN else 0
        anyb = (vs & V_ANY) != 0
        starts = (vs >> V_ST_SHIFT) & 3
        below_mw = (vs & V_TMW) != 0
        below_me = (vs & V_TME) != 0
        sw = (vs & V_SW) != 0
        se = (vs & V_SE) != 0
        for dy in range(2):
            k = 2 * dy + dx
            si = np.int64(out[SI + k])
            if not si & S_EX:
                continue
            sa = np.int64(out[SA + k]) & A_ON
            if anyb:
                sa |= A_S1
            b = (si & S_B) != 0
            if b and not si & S_MS:
                starts = min(starts + 1, 2)
                if starts == 1:
                    sw = (not si & S_MW) or below_mw
                    se = (not si & S_ME) or below_me
            if sw:
                sa |= A_SW
            if se:
                sa |= A_SE
            out[SA + k] = sa
            anyb = anyb or b
            below_mw = (si & S_MW) != 0
            below_me = (si & S_ME) != 0
            if sa & A_ON and starts != 1:
                err |= ERR_COL
        out[VS + dx] = (
            (V_ANY if anyb else 0)
            | (starts << V_ST_SHIFT)
            | (V_TMW if below_mw else 0)
            | (V_TME if below_me else 0)
            | (V_SW if sw else 0)
            | (V_SE if se else 0)
        )
    out[PH] = P_MAIN
    out[RDY] = 0
    return err


# ---------------------------------------------------------------- counter words


@nb.njit(cache=True, inline="always", _nrt=False)
def _floor_half(v):
    return v // 2  # python semantics in numba: floor for negatives


@nb.njit(cache=True, _nrt=False)
def _adder(cell, p, grow, delta, own_prev, sink):
    """Serial adder at one lane spot.

    ``cell`` is the incoming word cell (0 if none), ``p`` and ``grow`` the
    spot's pending carry and grow flag, ``own_prev`` whether the spot held
    a word cell last step.  Returns (cell out, pending, grow, sink flags).
    """
    skev = 0
    if cell & W_P:
        head = (cell & W_HEAD) != 0
        if not head and not own_prev:
            # a tail whose predecessor never came through: drop it
            return 0, 0, 0, 0
        bit = 1 if cell & W_BIT else 0
        if head:
            s_ = bit + delta
        else:
            s_ = bit + p
        outbit = s_ - 2 * _floor_half(s_)
        np_ = _floor_half(s_)
        res = (cell & ~(W_BIT | W_END | W_UND)) | (W_BIT if outbit else 0)
        und = (cell & W_UND) != 0
        ng = 0
        pos = False
        if cell & W_END:
            if und:
                np_ = 0
            elif np_ > 0:
                pos = True
                if sink:
                    res |= W_END
                else:
                    ng = 1
            elif np_ < 0:
                und = True
                np_ = 0
            if not ng:
                res |= W_END
            if sink:
                np_ = 0
        if und:
            res |= W_UND
        if sink:
            skev = K_P | (K_BIT if outbit else 0) | (K_HEAD if head else 0)
            if res & W_END:
                skev |= K_END
            if und:
                skev |= K_UND
            if pos:
                skev |= K_POS
        return res, np_, ng, skev
    if grow:
        # the previous end cell overflowed: append a new end cell holding the carry
        res = W_P | W_END | (W_BIT if p & 1 else 0)
        if sink:
            skev = K_P | K_END | (K_BIT if p & 1 else 0)
        return res, 0, 0, skev
    return 0, 0, 0, 0


# ---------------------------------------------------------------- main phase


@nb.njit(cache=True, inline="always", _nrt=False)
def _pg(v, k):
    # per-lane scratch values live in 16-bit slots of one integer, since a
    # heap array anywhere in the rule costs refcounting on every call
    return ((v >> (16 * k)) & 0xFFFF) - 0x8000


@nb.njit(cache=True, inline="always", _nrt=False)
def _ps(v, k, x):
    return (v & ~(0xFFFF << (16 * k))) | ((x + 0x8000) << (16 * k))


@nb.njit(cache=True, inline="always", _nrt=False)
def _pair(x):
    return _ps(_ps(np.int64(0), 0, x), 1, x)


@nb.njit(cache=True, _nrt=False)
def _phase_main(c, n, s, e, w, out, K):
    for i in range(SI, SI + 4):
        out[i] = c[i]
    for i in range(SA, SA + 4):
        out[i] = c[i]
    out[VS] = c[VS]
    out[VS + 1] = c[VS + 1]
    out[PH] = P_MAIN
    for k in range(2):
        out[MK + k] = c[MK + k]
        out[MKN + k] = c[MKN + k]
    creating = False
    if c[RDY] == 0:
        for blk in (n, s, e, w):
            ph = blk[PH]
            if ph != P_MAIN and ph != P_VAC and ph != 0:
                out[CD] = c[CD]
                return 0, 0
        creating = 1
    out[RDY] = 1

    err = 0
    fin = 0
    west_main = w[PH] == P_MAIN
    east_main = e[PH] == P_MAIN
    south_main = s[PH] == P_MAIN
    sink = s[PH] == 0

    # finish timer, armed at the north-east block
    cd = np.int64(c[CD])
    if creating and e[PH] != P_MAIN and n[PH] != P_MAIN:
        ex_x = 1 if c[SI + 1] & S_EX else 0
        ex_y = 1 if c[SI + 2] & S_EX else 0
        cd = K - 4 + ex_x + ex_y
        if cd <= 0:
            cd = 1
        out[CD] = cd
    elif cd > 1:
        out[CD] = cd - 1
    elif cd == 1:
        fin = 1
        out[CD] = 0

    # corners present at creation
    ne_corner = 0
    nw_corner = 0
    if creating:
        for k in range(4):
            si = np.int64(c[SI + k])
            if si & S_EX and si & S_B and not si & S_MN:
                if not si & S_ME:
                    ne_corner |= 1 << k
                if not si & S_MW:
                    nw_corner |= 1 << k

    # ---------------- NE (a)/(b)
    for dy in range(2):
        start = -1
        if east_main and e[HAB + dy]:
            start = 1
        for dx in range(1, -1, -1):
            if (ne_corner >> (2 * dy + dx) & 1):
                start = dx
                break
        if start < 0:
            continue
        done = False
        for dx in range(start, -1, -1):
            si = np.int64(c[SI + 2 * dy + dx])
            if not si & S_B:
                done = 1
                break
            if not si & S_MW:
                if _w1(c, n, s, e, w, dx, dy + 1) or _n1(c, n, s, e, w, dx - 1, dy):
                    err |= ERR_NE_AB
                done = 1
                break
        if not done and west_main:
            out[HAB + dy] = 1
    for dx in range(2):
        start = -1
        if n[PH] == P_MAIN and n[VAB + dx]:
            start = 1
        for dy in range(1, -1, -1):
            if (ne_corner >> (2 * dy + dx) & 1):
                start = dy
                break
        if start < 0:
            continue
        done = False
        for dy in range(start, -1, -1):
            si = np.int64(c[SI + 2 * dy + dx])
            if not si & S_B:
                done = 1
                break
            if not si & S_MS:
                if _e1(c, n, s, e, w, dx, dy - 1) or _s1(c, n, s, e, w, dx + 1, dy):
                    err |= ERR_NE_AB
                done = 1
                break
        if not done and south_main:
            out[VAB + dx] = 1

    # ---------------- NE (c): h1 heads
    # per h-lane: window of columns visited, v1 emitted column, turn column
    h1_head = _pair(0)  # word cell of the head after this block, 0 if gone
    h1_win = _pair(0)
    h1_emit = _pair(-1)
    h1_turn = _pair(-1)
    h1_exit = _pair(0)
    for dy in range(2):
        head = 0
        start = -1
        first = -1
        inc_cell = np.int64(e[HW + dy]) if east_main else 0
        if inc_cell & W_P and inc_cell & W_HEAD:
            head = inc_cell
            start = 1
        for dx in range(1, -1, -1):
            if (ne_corner >> (2 * dy + dx) & 1):
                head = W_P | W_HEAD | W_END | W_BIT | W_SEEK
                start = dx
                first = dx
                break
        if start < 0:
            continue
        alive = 1
        for dx in range(start, -1, -1):
            si = np.int64(c[SI + 2 * dy + dx])
            sa = np.int64(c[SA + 2 * dy + dx])
            if not si & S_B:
                alive = False
                break
            seeking = (head & W_SEEK) != 0
            if seeking and dx != first and si & S_MN:
                alive = False
                break
            h1_win = _ps(h1_win, dy, _pg(h1_win, dy) | (1 << dx))
            westend = not si & S_MW
            if seeking and (sa & A_SW or westend):
                h1_emit = _ps(h1_emit, dy, dx)
                head = (head & ~W_SEEK) | W_AFTER
            if westend:
                h1_turn = _ps(h1_turn, dy, dx)
                break
        if not alive:
            h1_win = _ps(h1_win, dy, 0)
            continue
        h1_head = _ps(h1_head, dy, head)
        if _pg(h1_turn, dy) < 0:
            h1_exit = _ps(h1_exit, dy, 1)
    # ---------------- NE v1
    v1_win = _pair(0)
    h2_cov = _pair(0)
    ev = 0
    for dx in range(2):
        start = -1
        if n[PH] == P_MAIN and n[V1 + dx]:
            start = 1
        for dy in range(2):
            if _pg(h1_emit, dy) == dx:
                start = max(start, dy)
                ev |= E_V1 << dx
        if start < 0:
            continue
        done = False
        for dy in range(start, -1, -1):
            si = np.int64(c[SI + 2 * dy + dx])
            if not si & S_B:
                done = 1
                break
            v1_win = _ps(v1_win, dx, _pg(v1_win, dx) | (1 << dy))
            if not si & S_MS:
                h2_cov = _ps(h2_cov, dy, _pg(h2_cov, dy) | (3 if dx == 1 else 1))
                done = 1
                break
        if not done and south_main:
            out[V1 + dx] = 1
    # ---------------- NE h2
    for dy in range(2):
        if east_main and e[H2 + dy]:
            h2_cov = _ps(h2_cov, dy, _pg(h2_cov, dy) | 3)
        if _pg(h2_cov, dy) and west_main:
            out[H2 + dy] = 1
    # ---------------- NE increments for h1 heads
    h1_inc = _pair(0)
    for dy in range(2):
        if _pg(h1_head, dy) == 0:
            continue
        for dx in range(2):
            if _pg(h1_win, dy) >> dx & 1 and _pg(v1_win, dx) >> dy & 1 and _pg(h1_emit, dy) != dx:
                h1_inc = _ps(h1_inc, dy, _pg(h1_inc, dy) + 1)
    # ---------------- marks for turns made this step
    mk = _pair(0)
    for dy in range(2):
        mk = _ps(mk, dy, np.int64(c[MK + dy]))
        if _pg(h1_turn, dy) >= 0 and _pg(h1_head, dy) != 0:
            mk = _ps(mk, dy, 1 + _pg(h1_turn, dy))
            out[MK + dy] = _pg(mk, dy)

    # ---------------- h-lane word cells
    for dy in range(2):
        cell = 0
        delta = 0
        if _pg(h1_head, dy) != 0 and _pg(h1_exit, dy):
            cell = _pg(h1_head, dy)
            delta = _pg(h1_inc, dy)
        else:
            inc_cell = np.int64(e[HW + dy]) if east_main else 0
            if inc_cell & W_P and not inc_cell & W_HEAD and np.int64(c[MK + dy]) == 0:
                cell = inc_cell
        own_prev = (c[HW + dy] & W_P) != 0
        grow = c[HG + dy] if (cell == 0) else 0
        res, p2, g2, _sk = _adder(cell, np.int64(c[HP + dy]), grow, delta, own_prev, False)
        if not west_main and res & W_P and not res & W_HEAD:
            res = 0
        out[HW + dy] = res
        out[HP + dy] = p2
        out[HG + dy] = g2
        out[HD + dy] = delta if cell & W_HEAD else 0

    # ---------------- v-lane word cells with priority
    for dx in range(2):
        cell = 0
        start = -1
        turned_dy = -1
        # candidates in priority order: turned from lane 0, turned from lane 1, from the north
        for dy in range(2):
            if _pg(mk, dy) != 1 + dx:
                continue
            if dy == 1 and _pg(mk, 0) == 1 + dx:
                continue
            if _pg(h1_turn, dy) == dx and _pg(h1_head, dy) != 0:
                cell = _pg(h1_head, dy)
            else:
                inc_cell = np.int64(e[HW + dy]) if east_main else 0
                if inc_cell & W_P and not inc_cell & W_HEAD and np.int64(c[MK + dy]) == 1 + dx:
                    cell = inc_cell
            if cell:
                start = dy
                turned_dy = dy
                break
        if cell == 0 and _pg(mk, 0) != 1 + dx and _pg(mk, 1) != 1 + dx and n[PH] == P_MAIN:
            inc_cell = np.int64(n[VW + dx])
            if inc_cell & W_P:
                cell = inc_cell
                start = 1
        delta = 0
        if cell & W_HEAD:
            if turned_dy >= 0:
                delta = _pg(h1_inc, turned_dy)
            cell = cell & ~(W_SEEK | W_AFTER)
            for dy in range(start, -1, -1):
                if _pg(h2_cov, dy) >> dx & 1:
                    if not (_w1(c, n, s, e, w, dx, dy - 1) or _s1(c, n, s, e, w, dx - 1, dy)):
                        delta -= 1
        own_prev = (c[VW + dx] & W_P) != 0
        grow = c[VG + dx] if cell == 0 else 0
        res, p2, g2, skev = _adder(cell, np.int64(c[VP + dx]), grow, delta, own_prev, sink)
        out[VW + dx] = res
        out[VP + dx] = p2
        out[VG + dx] = g2
        out[VD + dx] = delta if cell & W_HEAD else 0
        if sink and skev & K_P:
            seen = (skev & K_BIT) != 0
            if not skev & K_HEAD:
                seen = seen or c[SN + dx] != 0
            if skev & K_END:
                if (seen or skev & K_POS) and not skev & K_UND:
                    err |= ERR_NE_C
                    skev |= K_ERR
                seen = False
            out[SN + dx] = 1 if seen else 0
        out[SK + dx] = skev

    # ---------------- NW (a)/(b)
    for dy in range(2):
        start = -1
        if west_main and w[HABN + dy]:
            start = 0
        for dx in range(2):
            if (nw_corner >> (2 * dy + dx) & 1):
                start = dx
                break
        if start < 0:
            continue
        done = False
        for dx in range(start, 2):
            si = np.int64(c[SI + 2 * dy + dx])
            if not si & S_B:
                done = 1
                break
            if not si & S_ME:
                if _e1(c, n, s, e, w, dx, dy + 1) or _n1(c, n, s, e, w, dx + 1, dy):
                    err |= ERR_NW_AB
                done = 1
                break
        if not done and east_main:
            out[HABN + dy] = 1
    for dx in range(2):
        start = -1
        if n[PH] == P_MAIN and n[VABN + dx]:
            start = 1
        for dy in range(1, -1, -1):
            if (nw_corner >> (2 * dy + dx) & 1):
                start = dy
                break
        if start < 0:
            continue
        done = False
        for dy in range(start, -1, -1):
            si = np.int64(c[SI + 2 * dy + dx])
            if not si & S_B:
                done = 1
                break
            if not si & S_MS:
                if _w1(c, n, s, e, w, dx, dy - 1) or _s1(c, n, s, e, w, dx - 1, dy):
                    err |= ERR_NW_AB
                done = 1
                break
        if not done and south_main:
            out[VABN + dx] = 1

    # ---------------- NW (c): h1n heads moving east
    n_head = _pair(0)
    n_win = _pair(0)
    n_emit = _pair(-1)
    n_turn = _pair(-1)
    for dy in range(2):
        head = 0
        start = -1
        first = -1
        if west_main and w[H1N + dy]:
            head = np.int64(w[H1N + dy])
            start = 0
        for dx in range(2):
            if (nw_corner >> (2 * dy + dx) & 1):
                head = N_SEEK | (1 << N_CNT_SHIFT)
                start = dx
                first = dx
                break
        if start < 0:
            continue
        alive = 1
        for dx in range(start, 2):
            si = np.int64(c[SI + 2 * dy + dx])
            sa = np.int64(c[SA + 2 * dy + dx])
            if not si & S_B:
                alive = False
                break
            seeking = (head & N_SEEK) != 0
            if seeking and dx != first and si & S_MN:
                alive = False
                break
            n_win = _ps(n_win, dy, _pg(n_win, dy) | (1 << dx))
            eastend = not si & S_ME
            if seeking and (sa & A_SE or eastend):
                n_emit = _ps(n_emit, dy, dx)
                head = (head & ~N_SEEK) | N_AFTER
            if eastend:
                n_turn = _ps(n_turn, dy, dx)
                break
        if not alive:
            n_win = _ps(n_win, dy, 0)
            continue
        n_head = _ps(n_head, dy, head)
    v1n_win = _pair(0)
    h2n_cov = _pair(0)
    for dx in range(2):
        start = -1
        if n[PH] == P_MAIN and n[V1N + dx]:
            start = 1
        for dy in range(2):
            if _pg(n_emit, dy) == dx:
                start = max(start, dy)
                ev |= E_V1N << dx
        if start < 0:
            continue
        done = False
        for dy in range(start, -1, -1):
            si = np.int64(c[SI + 2 * dy + dx])
            if not si & S_B:
                done = 1
                break
            v1n_win = _ps(v1n_win, dx, _pg(v1n_win, dx) | (1 << dy))
            if not si & S_MS:
                h2n_cov = _ps(h2n_cov, dy, _pg(h2n_cov, dy) | (3 if dx == 0 else 2))
                done = 1
                break
        if not done and south_main:
            out[V1N + dx] = 1
    for dy in range(2):
        if west_main and w[H2N + dy]:
            h2n_cov = _ps(h2n_cov, dy, _pg(h2n_cov, dy) | 3)
        if _pg(h2n_cov, dy) and east_main:
            out[H2N + dy] = 1
    for dy in range(2):
        if _pg(n_head, dy) == 0:
            continue
        cnt = (_pg(n_head, dy) >> N_CNT_SHIFT) & 3
        for dx in range(2):
            if _pg(n_win, dy) >> dx & 1 and _pg(v1n_win, dx) >> dy & 1 and _pg(n_emit, dy) != dx:
                cnt = min(cnt + 1, N_CNT_MAX)
        n_head = _ps(n_head, dy, (_pg(n_head, dy) & 3) | (cnt << N_CNT_SHIFT))
        if _pg(n_turn, dy) < 0 and east_main:
            out[H1N + dy] = _pg(n_head, dy)
    mkn = _pair(0)
    for dy in range(2):
        mkn = _ps(mkn, dy, np.int64(c[MKN + dy]))
        if _pg(n_turn, dy) >= 0 and _pg(n_head, dy) != 0:
            mkn = _ps(mkn, dy, 1 + _pg(n_turn, dy))
            out[MKN + dy] = _pg(mkn, dy)
    skn = 0
    for dx in range(2):
        cnt = -1
        start = -1
        for dy in range(2):
            if _pg(mkn, dy) != 1 + dx:
                continue
            if dy == 1 and _pg(mkn, 0) == 1 + dx:
                continue
            if _pg(n_turn, dy) == dx and _pg(n_head, dy) != 0:
                cnt = (_pg(n_head, dy) >> N_CNT_SHIFT) & 3
                start = dy
                break
        if cnt < 0 and _pg(mkn, 0) != 1 + dx and _pg(mkn, 1) != 1 + dx and n[PH] == P_MAIN and n[V2N + dx]:
            cnt = np.int64(n[V2N + dx]) - 1
            start = 1
        if cnt < 0:
            continue
        for dy in range(start, -1, -1):
            if _pg(h2n_cov, dy) >> dx & 1:
                if not (_e1(c, n, s, e, w, dx, dy - 1) or _s1(c, n, s, e, w, dx + 1, dy)):
                    cnt = max(cnt - 1, 0)
        if sink:
            skn |= 1 << (2 * dx)
            if cnt > 0:
                err |= ERR_NW_C
                skn |= 2 << (2 * dx)
        elif south_main:
            out[V2N + dx] = cnt + 1
    out[SKN] = skn
    out[EV] = ev
    return err, fin


# ---------------------------------------------------------------- the rule


@nb.njit(cache=True, nogil=True, _nrt=False)
def transition(c, n, s, e, w, out):
    for i in range(NF):
        out[i] = 0
    ph = c[PH]
    if ph == 0:
        return
    gen_err = 0
    gen_fin = 0
    if ph == P_RAW:
        _phase_raw(c, n, s, e, w, out)
    elif ph == P_HC:
        gen_err = _phase_hc(c, n, s, e, w, out)
    elif ph == P_VC:
        gen_err = _phase_vc(c, n, s, e, w, out)
    elif ph == P_MAIN:
        gen_err, gen_fin = _phase_main(c, n, s, e, w, out, K_LATENESS)
    else:
        out[PH] = P_VAC
    # errors and the finish signal go west to column 0, then south
    west_open = w[PH] == 0
    inc_err = np.int64(e[ERR])
    inc_fin = np.int64(e[FIN])
    if west_open:
        inc_err |= np.int64(n[ERR])
        inc_fin |= np.int64(n[FIN])
    if west_open and s[PH] == 0:
        latch = np.int64(c[ERR]) | inc_err | gen_err
        out[ERR] = latch
        if c[DEC] != 0:
            out[DEC] = c[DEC]
        elif inc_fin or gen_fin:
            out[DEC] = DEC_ACCEPT if latch == 0 else DEC_REJECT
    else:
        out[ERR] = inc_err | gen_err
        out[FIN] = 1 if (inc_fin or gen_fin) else 0
