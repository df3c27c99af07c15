"""State layout of the recognizer.

Every cell state is a vector of int8 fields.  Names ending in a digit are
per-lane: ``hw0``/``hw1`` are the two horizontal lanes (virtual rows 2Y and
2Y+1 of a compressed block), ``vw0``/``vw1`` the two vertical lanes
(virtual columns 2X and 2X+1).  Subcell fields ``si``/``sa`` are indexed
``2*dy + dx``.

Lane fields hold a signal that is in transit out of the block: the
neighbour reads it on the next step and processes it there.
"""

from __future__ import annotations

FIELDS: tuple[str, ...] = (
    # phase, error routing and decision
    "ph", "err", "fin", "dec", "cd", "rdy", "ev",
    # raw input and compression
    "it0", "cnt", "hsum",
    # compressed block: subcell info, auxiliary flags, column summaries
    "si0", "si1", "si2", "si3", "sa0", "sa1", "sa2", "sa3", "vs0", "vs1",
    # NE conditions (a)/(b)
    "hab0", "hab1", "vab0", "vab1",
    # NE condition (c): counter words, pending carries, grow flags
    "hw0", "hw1", "hp0", "hp1", "hg0", "hg1",
    "vw0", "vw1", "vp0", "vp1", "vg0", "vg1", "sn0", "sn1",
    "v1a", "v1b", "h2a", "h2b", "mk0", "mk1",
    # NW pass
    "habn0", "habn1", "vabn0", "vabn1", "h1n0", "h1n1", "v1n0", "v1n1",
    "h2n0", "h2n1", "v2n0", "v2n1", "mkn0", "mkn1",
    # per-step audit events
    "hd0", "hd1", "vd0", "vd1", "sk0", "sk1", "skn",
)

_IX = {name: i for i, name in enumerate(FIELDS)}
NF = len(FIELDS)

PH = _IX["ph"]
ERR = _IX["err"]
FIN = _IX["fin"]
DEC = _IX["dec"]
CD = _IX["cd"]
RDY = _IX["rdy"]
EV = _IX["ev"]
IT0 = _IX["it0"]
CNT = _IX["cnt"]
HSUM = _IX["hsum"]
SI = _IX["si0"]
SA = _IX["sa0"]
VS = _IX["vs0"]
HAB = _IX["hab0"]
VAB = _IX["vab0"]
HW = _IX["hw0"]
HP = _IX["hp0"]
HG = _IX["hg0"]
VW = _IX["vw0"]
VP = _IX["vp0"]
VG = _IX["vg0"]
SN = _IX["sn0"]
V1 = _IX["v1a"]
H2 = _IX["h2a"]
MK = _IX["mk0"]
HABN = _IX["habn0"]
VABN = _IX["vabn0"]
H1N = _IX["h1n0"]
V1N = _IX["v1n0"]
H2N = _IX["h2n0"]
V2N = _IX["v2n0"]
MKN = _IX["mkn0"]
HD = _IX["hd0"]
VD = _IX["vd0"]
SK = _IX["sk0"]
SKN = _IX["skn"]

# phases
P_RAW = 1
P_HC = 2
P_VC = 3
P_MAIN = 4
P_VAC = 5
PHASE_NAMES = {0: "quiescent", P_RAW: "raw", P_HC: "h-compressing", P_VC: "v-compressing", P_MAIN: "main", P_VAC: "vacated"}

# item memorised at step 1 (it0 during horizontal compression)
I_B = 1
I_MN = 2
I_MS = 4
I_ME = 8
I_MW = 16
I_ON = 32
I_OE = 64

# subcell info (si): bit, neighbour memory, existence, 1 strictly west
S_B = 1
S_MN = 2
S_MS = 4
S_ME = 8
S_MW = 16
S_EX = 32
S_W1 = 64

# subcell auxiliary (sa): 1 strictly south, southern segment ends, top row
A_S1 = 1
A_SW = 2
A_SE = 4
A_ON = 8

# row summary (hsum) and column summary (vs)
H_ANY = 1
H_ST_SHIFT = 1  # 2-bit saturating run-start count
H_OVN = 8
V_ANY = 1
V_ST_SHIFT = 1
V_TMW = 8
V_TME = 16
V_SW = 32
V_SE = 64

# counter word cell (hw*, vw*)
W_P = 1
W_BIT = 2
W_HEAD = 4
W_END = 8
W_UND = 16
W_SEEK = 32
W_AFTER = 64

# NW h1n lane: state bits then counter in bits 2-3
N_SEEK = 1
N_AFTER = 2
N_CNT_SHIFT = 2
N_CNT_MAX = 3

# audit events (ev)
E_V1 = 1  # bit dx: NE v1 spawned in column dx
E_V1N = 4  # bit 2+dx: NW v1 spawned in column dx

# sink events (sk*)
K_P = 1
K_BIT = 2
K_HEAD = 4
K_END = 8
K_UND = 16
K_POS = 32
K_ERR = 64

# error mask bits, one per source layer
ERR_ROW = 1
ERR_COL = 2
ERR_NE_AB = 4
ERR_NE_C = 8
ERR_NW_AB = 16
ERR_NW_C = 32
ERROR_LAYERS = {
    ERR_ROW: "row-check",
    ERR_COL: "column-check",
    ERR_NE_AB: "ne-ab",
    ERR_NE_C: "ne-c",
    ERR_NW_AB: "nw-ab",
    ERR_NW_C: "nw-c",
}

# decision
DEC_ACCEPT = 1
DEC_REJECT = 2

# Value ranges of each field, used to state the size of the state set.
FIELD_RANGES: dict[str, tuple[int, int]] = {name: (0, 127) for name in FIELDS}
FIELD_RANGES.update(
    ph=(0, 5), err=(0, 63), fin=(0, 1), dec=(0, 2), rdy=(0, 1), ev=(0, 15), cnt=(0, 1), hsum=(0, 15),
    hab0=(0, 1), hab1=(0, 1), vab0=(0, 1), vab1=(0, 1),
    hp0=(-2, 2), hp1=(-2, 2), vp0=(-2, 2), vp1=(-2, 2),
    hg0=(0, 1), hg1=(0, 1), vg0=(0, 1), vg1=(0, 1), sn0=(0, 1), sn1=(0, 1),
    v1a=(0, 1), v1b=(0, 1), h2a=(0, 1), h2b=(0, 1), mk0=(0, 2), mk1=(0, 2),
    habn0=(0, 1), habn1=(0, 1), vabn0=(0, 1), vabn1=(0, 1), h1n0=(0, 15), h1n1=(0, 15),
    v1n0=(0, 1), v1n1=(0, 1), h2n0=(0, 1), h2n1=(0, 1), v2n0=(0, 4), v2n1=(0, 4),
    mkn0=(0, 2), mkn1=(0, 2), hd0=(-2, 2), hd1=(-2, 2), vd0=(-4, 4), vd1=(-4, 4), skn=(0, 15),
)


def index(name: str) -> int:
    return _IX[name]
