import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lconvex_ca.engine import Configuration, format_trace, make_picture_configuration, parse_trace, run
from lconvex_ca.harness import random_cases
from lconvex_ca.oracle import CornerType, corner_violations, is_l_convex_definitional, is_polyomino_picture
from lconvex_ca.picture import Picture, enumerate_hv_convex_pictures, random_picture
from lconvex_ca.recognizer import K_LATENESS, decide, decide_batch, recognizer_rule, run_recognizer
from lconvex_ca.recognizer import fields as F
from lconvex_ca.recognizer.audit import audit_batch, block_dirinfo, owned_segments, picture_dirinfo

STAIRCASE = ["0011", "0111", "1110", "1100"]
RULE = recognizer_rule()


def P(*rows: str) -> Picture:
    return Picture.from_rows(rows)


def zone_mask(p: Picture) -> int:
    mask = 0
    for e, z in corner_violations(p):
        ne = e.kind == CornerType.NE
        if z.zone_id in ("A", "B"):
            mask |= F.ERR_NE_AB if ne else F.ERR_NW_AB
        else:
            mask |= F.ERR_NE_C if ne else F.ERR_NW_C
    return mask


# ---------------------------------------------------------------- rule basics


def test_quiescent_fixed_point():
    q = np.zeros(F.NF, np.int8)
    assert not RULE.apply(q, q, q, q, q).any()


@pytest.mark.parametrize(
    "rows, verdict",
    [
        (["1"], "accept"),
        (STAIRCASE, "reject"),
        (["0"], "reject"),
        (["111"], "accept"),
        (["1", "1", "1"], "accept"),
        (["11", "11"], "accept"),
        (["101"], "reject"),
        (["10", "01"], "reject"),
        (["000", "000"], "reject"),
    ],
)
def test_decide_examples(rows, verdict):
    r = decide(P(*rows))
    assert r.verdict == verdict
    assert r.lateness == K_LATENESS and r.decision_step == r.real_time + K_LATENESS


def test_row_check_errors():
    assert decide(P("101")).error_mask & F.ERR_ROW
    assert decide(P("11", "11")).error_mask == 0
    assert decide(P("10", "01")).error_mask & F.ERR_ROW


def test_column_check_errors():
    assert decide(P("1", "0", "1")).error_mask & F.ERR_COL


def test_staircase_caught_by_counter_only():
    # HV-convex, so no row or column error; the zone-C witness is caught by the NE counter
    mask = decide(P(*STAIRCASE)).error_mask
    assert mask & F.ERR_NE_C
    assert not mask & (F.ERR_ROW | F.ERR_COL | F.ERR_NE_AB)


def test_staircase_mirror_caught_by_nw_pass():
    mirror = [r[::-1] for r in STAIRCASE]
    r = decide(P(*mirror))
    assert r.verdict == "reject"
    assert r.error_mask & F.ERR_NW_C and not r.error_mask & F.ERR_NE_C


def test_rectangle_raises_nothing():
    assert decide(P("1111", "1111", "1111")).error_mask == 0


def test_layer_bits_follow_the_zone_oracle():
    # (a)/(b) checks match the oracle's zones A/B exactly; (c) counters match
    # zone C whenever the (a)/(b) conditions of that pass hold
    pics = list(enumerate_hv_convex_pictures(4, 4))
    for p, r in zip(pics, decide_batch(pics)):
        want = zone_mask(p)
        ab = F.ERR_NE_AB | F.ERR_NW_AB
        assert r.error_mask & ab == want & ab, p.rows()
        if not want & F.ERR_NE_AB:
            assert bool(r.error_mask & F.ERR_NE_C) == bool(want & F.ERR_NE_C), p.rows()
        if not want & F.ERR_NW_AB:
            assert bool(r.error_mask & F.ERR_NW_C) == bool(want & F.ERR_NW_C), p.rows()


def test_decide_batch_matches_single_runs():
    pics = [random_picture(k, 7, 6, s) for s in range(6) for k in ("any-bits", "hv-convex", "l-convex")]
    assert decide_batch(pics) == [decide(p) for p in pics]


# ---------------------------------------------------------------- error routing


def _inject(p: Picture, x: int, y: int) -> Configuration:
    c = make_picture_configuration(p, RULE, halo=1)
    c.grid[1 + y, 1 + x, F.ERR] = 1
    return c


@pytest.mark.parametrize("n, m", [(1, 1), (4, 3), (7, 5), (2, 9)])
def test_error_reaches_origin_in_manhattan_time(n, m):
    p = Picture(np.ones((m, n), bool))
    c = _inject(p, n - 1, m - 1)
    arrivals = []
    run(c, RULE, n + m, observe=lambda k: arrivals.append((k.t, int(k.cell(0, 0)[F.ERR]))))
    first = min(t for t, e in arrivals if e)
    assert first <= n + m - 2


def test_origin_latch_is_permanent():
    p = P(*STAIRCASE)
    conf, r = run_recognizer(p, steps=r_steps(p) + 15)
    assert r.verdict == "reject"
    seen = []
    run_recognizer(p, steps=r_steps(p) + 15, observe=lambda k: seen.append(int(k.cell(0, 0)[F.DEC])))
    decided = [d for d in seen if d]
    assert decided and set(decided) == {F.DEC_REJECT}
    assert seen.index(decided[0]) == r.decision_step


def test_accepting_origin_never_sees_an_error():
    seen = []
    run_recognizer(P("111", "111"), observe=lambda k: seen.append(int(k.cell(0, 0)[F.ERR])))
    assert not any(seen)


def r_steps(p: Picture) -> int:
    return p.n + p.m - 2 + K_LATENESS


# ---------------------------------------------------------------- compression


def test_horizontal_compression_positions():
    # read from the printed input layer: block bits as a hex digit, bit dx for column 2i+dx
    p = random_picture("any-bits", 6, 3, 5)
    c = make_picture_configuration(p, RULE, halo=1)
    text = format_trace(run(c, RULE, 4, ["input", "compress"])[1], RULE, c, "input")
    frames = {f.t: f.grid for f in parse_trace(text)[1]}
    phases = {f.t: f.grid for f in parse_trace(format_trace(run(c, RULE, 4, ["compress"])[1], RULE, c, "compress"))[1]}

    def sym(t: int, x: int, y: int) -> str:
        g = frames[t]
        return g[len(g) - 1 - (1 + y)][1 + x]

    # arena column i holds original columns 2i and 2i+1 at step i+2
    for i in range(3):
        for y in range(3):
            if i == 0 and y > 0:
                continue  # column 0 is already packing rows southward
            want = int(p[2 * i, y]) + 2 * int(p[2 * i + 1, y])
            assert sym(i + 2, i, y) == "0123"[want]
    # after three compression steps nothing is left east of column 2
    for row in phases[4][1:4]:
        assert set(row[4:8]) <= {".", "_"}


def test_odd_width_block_holds_single_column():
    p = P("1", "1", "1")
    conf, _ = run_recognizer(p, steps=5)
    blk = conf.cell(0, 0)
    assert blk[F.SI] & F.S_EX and not blk[F.SI + 1] & F.S_EX


@pytest.mark.parametrize("seed", range(8))
def test_dirinfo_matches_picture(seed):
    p = random_picture("hv-convex", 6 + seed % 3, 3 + seed, seed)
    # all blocks are in the main phase by step n/2 + m/2 + 4
    conf, _ = run_recognizer(p, steps=(p.n + 1) // 2 + (p.m + 1) // 2 + 3)
    assert block_dirinfo(conf.grid, conf.halo, p.n, p.m) == picture_dirinfo(p)


def test_dirinfo_exhaustive_small():
    for p in enumerate_hv_convex_pictures(4, 4):
        conf, _ = run_recognizer(p, steps=8)
        assert block_dirinfo(conf.grid, conf.halo, p.n, p.m) == picture_dirinfo(p)


# ---------------------------------------------------------------- audits


def test_rectangle_counter_lifecycle():
    rep = audit_batch([P("111", "111")])
    assert rep.ok and rep.counters_checked == 1 and rep.counter_values == [0]


def test_staircase_counter_positive():
    rep = audit_batch([P(*STAIRCASE)])
    assert rep.ok and any(v > 0 for v in rep.counter_values)


def test_one_v1_per_owned_segment():
    p = P("1000", "1100", "1110", "1111")
    assert owned_segments(p, "ne") == 1
    rep = audit_batch([p])
    assert rep.ok and rep.v1_checked == 1


def test_audits_on_random_corpus():
    pics = [p for _, _, _, _, p in random_cases(300, 24, 24, 3)]
    rep = audit_batch(pics)
    assert rep.ok, (rep.collisions[:3], rep.v1_mismatches[:3], rep.counter_mismatches[:3])
    assert rep.counters_checked > 100 and rep.v1_checked > 100


# ---------------------------------------------------------------- totality, determinism, finiteness


def _harvest(pictures, limit: int, rng: np.random.Generator) -> np.ndarray:
    tuples = []
    for p in pictures:
        c = make_picture_configuration(p, RULE, halo=1)

        def grab(k: Configuration) -> None:
            g = np.pad(k.grid, ((1, 1), (1, 1), (0, 0)))
            act = g.any(axis=2)
            near = act.copy()
            near[1:] |= act[:-1]
            near[:-1] |= act[1:]
            near[:, 1:] |= act[:, :-1]
            near[:, :-1] |= act[:, 1:]
            near[[0, -1], :] = False
            near[:, [0, -1]] = False
            ys, xs = np.nonzero(near)
            for y, x in zip(ys, xs):
                tuples.append(np.stack([g[y, x], g[y + 1, x], g[y - 1, x], g[y, x + 1], g[y, x - 1]]))

        run(c, RULE, p.n + p.m - 2 + K_LATENESS, observe=grab)
        if len(tuples) >= limit:
            break
    arr = np.stack(tuples)
    return arr[rng.permutation(len(arr))[:limit]]


def test_totality_on_harvested_tuples():
    rng = np.random.default_rng(0)
    pics = [p for _, _, _, _, p in random_cases(400, 12, 12, 9)]
    tuples = _harvest(pics, 100_000, rng)
    assert len(tuples) == 100_000
    lo = np.array([F.FIELD_RANGES[f][0] for f in F.FIELDS])
    hi = np.array([F.FIELD_RANGES[f][1] for f in F.FIELDS])
    for t in tuples:
        out = RULE.apply(*t)
        assert ((out >= lo) & (out <= hi)).all()


def test_determinism_of_traces():
    p = random_picture("l-convex", 9, 7, 2)
    c = make_picture_configuration(p, RULE, halo=1)
    layers = list(RULE.layers)
    a = run(c, RULE, 20, layers)
    b = run(c, RULE, 20, layers)
    assert a[0].same_state(b[0]) and a[1] == b[1]


def test_observed_states_within_documented_ranges():
    lo = np.array([F.FIELD_RANGES[f][0] for f in F.FIELDS])
    hi = np.array([F.FIELD_RANGES[f][1] for f in F.FIELDS])
    for _, _, _, _, p in random_cases(60, 40, 40, 4):
        def check(k: Configuration) -> None:
            g = k.grid.reshape(-1, F.NF)
            assert ((g >= lo) & (g <= hi)).all()
            assert k.halo_quiescent() or k.t > 0
        run_recognizer(p, observe=check)


def test_halo_never_activates():
    for _, _, _, _, p in random_cases(60, 16, 16, 8):
        c = make_picture_configuration(p, RULE, halo=3)
        run(c, RULE, p.n + p.m + K_LATENESS, observe=lambda k: _halo_ok(k))


def _halo_ok(k: Configuration) -> None:
    h = k.halo
    g = k.grid.copy()
    g[h : h + k.m, h : h + k.n] = 0
    assert not g.any(), f"halo activated at t={k.t}"


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 10**6), st.sampled_from(["any-bits", "hv-convex", "l-convex"]))
def test_decide_agrees_with_definition(n, m, seed, kind):
    p = random_picture(kind, n, m, seed)
    want = is_polyomino_picture(p) and is_l_convex_definitional(p)
    assert decide(p).accepted == want


def test_parallel_sweep_identical():
    p = random_picture("l-convex", 20, 18, 1)
    a = run_recognizer(p, jobs=1)
    b = run_recognizer(p, jobs=3)
    assert a[0].same_state(b[0]) and a[1] == b[1]


def test_ring_is_the_box_border():
    from lconvex_ca.recognizer import _ring

    W = 9
    idx = set(_ring(2, 1, 3, 2, W).tolist())
    want = {r * W + q for r in range(0, 4) for q in range(1, 6)} - {r * W + q for r in (1, 2) for q in (2, 3, 4)}
    assert idx == want and len(_ring(2, 1, 3, 2, W)) == 2 * (3 + 2) + 4


def test_runs_report_a_quiet_halo():
    pics = [random_picture(k, 9, 8, s) for s in range(5) for k in ("any-bits", "l-convex")]
    assert all(r.halo_quiet for r in decide_batch(pics))
    assert all(run_recognizer(p)[1].halo_quiet for p in pics[:3])
