"""Building layer: canonical chamber keys, panels, Frobenius action, balls.

The strongest checks here are external: ball layer sizes must equal
|{w : len(w) = l}| * q^l, the Frobenius-fixed chambers must form the thinner
building with q0 in place of q, and the Hecke structure constants computed
from pure algebra must match pair counts in the explored geometry.
"""

from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from heckegamma.building import Building, default_precision
from heckegamma.errors import RegionError
from heckegamma.hecke import HeckeElem
from heckegamma.weyl import AffinePerm, CoxeterSystem


def layer_counts(graph):
    return Counter(int(d) for d in graph.dist_base)


def weyl_layer_sizes(n, upto):
    ws = CoxeterSystem(n)
    out = Counter()
    for w in ws.elements_of_length_upto(upto):
        out[ws.length(w)] += 1
    return out


# -- standard chamber ---------------------------------------------------------


def test_standard_chamber_shape():
    for n in (2, 3, 4):
        b = Building(n, 2)
        c = b.standard_chamber()
        verts = c.vertices()
        assert [v.type for v in verts] == list(range(n))
        for v in verts:
            piv = v.pivots()
            assert sum(piv) == v.type
            assert all(x in (0, 1) for x in piv)
        assert b.is_rational(c)
        assert b.theta(c) == c


def test_chamber_key_roundtrip():
    b = Building(3, 2)
    c = b.standard_chamber()
    again = b.chamber(c.key)
    assert again == c
    with pytest.raises(Exception):
        b.chamber(c.key[:-1])


# -- panels --------------------------------------------------------------------


@pytest.mark.parametrize("n,q0", [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)])
def test_panel_neighbors_basic(n, q0):
    b = Building(n, q0)
    c0 = b.standard_chamber()
    for s in range(n):
        nbrs = b.panel_neighbors(c0, s)
        assert len(nbrs) == b.q + 1
        keys = [x.key for x in nbrs]
        assert keys == sorted(keys)
        assert c0 in nbrs
        # all members agree on what the panel is
        for x in nbrs[: 3 if b.q > 4 else None]:
            again = {y.key for y in b.panel_neighbors(x, s)}
            assert again == set(keys)
        # only the type-s vertex varies
        spans = b.kernel(16).vertex_spans(c0.key)
        for x in nbrs:
            sp2 = b.kernel(16).vertex_spans(x.key)
            for t in range(n):
                if t != s:
                    assert x.key[sp2[t][0] : sp2[t][1]] == c0.key[spans[t][0] : spans[t][1]]


def test_panel_neighbors_second_shell():
    # same laws one step out, where entries are non-trivial
    b = Building(3, 2)
    g = b.explore(1)
    for i in range(1, len(g)):
        c = g.chamber(i)
        for s in range(3):
            nbrs = b.panel_neighbors(c, s)
            assert len(nbrs) == b.q + 1
            assert c in nbrs
            for x in nbrs:
                assert {y.key for y in b.panel_neighbors(x, s)} == {
                    y.key for y in nbrs
                }


# -- canonical form invariance ---------------------------------------------------


def test_canonical_form_invariance():
    b = Building(3, 2)
    g = b.explore(2)
    kern = b.kernel(default_precision(2, 3))
    checked = 0
    for i in range(0, len(g), 7):
        key = g.key(i)
        for start, end in kern.vertex_spans(key):
            vkey = key[start:end]
            piv, cols, _ = kern._parse_vertex(key, start)

            # reversing the columns must not change the canonical key
            alt = [list(c) for c in reversed(cols)]
            assert kern._canonical_vertex(alt) == vkey

            # scaling a column by a unit of the residue field
            gcode = b.gf.generator
            alt = [list(c) for c in cols]
            alt[0] = [kern._scale(e, gcode) for e in alt[0]]
            assert kern._canonical_vertex(alt) == vkey

            # adding t * (another column)
            alt = [list(c) for c in cols]
            tmul = (1, (1,), 1 << 30)
            alt[1] = [
                kern._add(alt[1][r], kern._mul(tmul, alt[0][r])) for r in range(3)
            ]
            assert kern._canonical_vertex(alt) == vkey

            # homothety by t changes nothing after type reduction
            alt = [[kern._shift(e, 3) for e in c] for c in cols]
            assert kern._canonical_vertex(alt) == vkey
            checked += 1
    assert checked >= 20


# -- balls ------------------------------------------------------------------------


@pytest.mark.parametrize(
    "n,q0,radius",
    [(2, 2, 3), (2, 3, 3), (3, 2, 2), (3, 3, 1), (4, 2, 1)],
)
def test_ball_layer_sizes(n, q0, radius):
    b = Building(n, q0)
    g = b.explore(radius)
    assert not g.truncated
    got = layer_counts(g)
    wl = weyl_layer_sizes(n, radius)
    for l in range(radius + 1):
        assert got[l] == wl[l] * b.q**l, f"layer {l}"
    assert g.interior_count == sum(got[l] for l in range(radius))


def test_ball_size_nine_at_radius_one():
    g = Building(2, 2).explore(1)
    assert len(g) == 9


@pytest.mark.parametrize("n,q0,radius", [(2, 2, 3), (2, 3, 2), (3, 2, 2)])
def test_stable_chambers_form_thin_building(n, q0, radius):
    b = Building(n, q0)
    g = b.explore(radius)
    wl = weyl_layer_sizes(n, radius)
    stable_layers = Counter(
        int(g.dist_base[i]) for i in range(len(g)) if g.stable[i]
    )
    for l in range(radius + 1):
        assert stable_layers[l] == wl[l] * q0**l, f"layer {l}"


def test_truncation_is_honest():
    b = Building(2, 2)
    g = b.explore(3, cap_chambers=30)
    assert g.truncated
    assert len(g) <= 30
    assert not g.certified.any()


# -- Frobenius ----------------------------------------------------------------------


@pytest.mark.parametrize("n,q0,radius", [(2, 2, 2), (2, 3, 2), (3, 2, 2)])
def test_theta_involution_and_stability(n, q0, radius):
    b = Building(n, q0)
    g = b.explore(radius)
    kern = b.kernel(16)
    for i in g.iter_ids():
        k = g.key(i)
        tk = kern.theta(k)
        assert kern.theta(tk) == k
        j = g.index_of(tk)  # theta preserves the ball
        assert g.dist_base[j] == g.dist_base[i]
        assert (tk == k) == bool(g.stable[i])
        assert bool(g.stable[i]) == kern.is_rational(k)


# -- distance to the fixed subbuilding ------------------------------------------------


@pytest.mark.parametrize("n,q0,radius", [(2, 2, 3), (3, 2, 2), (3, 3, 1)])
def test_dist_xf_zero_iff_stable(n, q0, radius):
    g = Building(n, q0).explore(radius)
    for i in g.iter_ids():
        if not g.certified[i]:
            continue
        assert (int(g.dist_xf[i]) == 0) == bool(g.stable[i])


def test_dist_xf_panel_span():
    g = Building(3, 2).explore(2)
    for i in range(g.interior_count):
        for s in range(3):
            ids = g.members(i, s)
            if not all(g.certified[j] for j in ids):
                continue
            vals = sorted({int(g.dist_xf[j]) for j in ids})
            assert len(vals) <= 2
            if len(vals) == 2:
                assert vals[1] == vals[0] + 1


def test_tree_formula_against_bfs():
    # n = 2: the closed-form distance must match a breadth-first search
    # wherever the search is conclusive
    for q0 in (2, 3):
        b = Building(2, q0)
        g = b.explore(3)
        bfs = np.full(len(g), -1, dtype=int)
        from collections import deque

        dq = deque()
        for i in g.iter_ids():
            if g.stable[i]:
                bfs[i] = 0
                dq.append(i)
        while dq:
            u = dq.popleft()
            if not g.is_interior(u):
                continue
            for s in range(2):
                for v in g.members(u, s):
                    if bfs[v] < 0:
                        bfs[v] = bfs[u] + 1
                        dq.append(v)
        for i in g.iter_ids():
            formula = int(g.dist_xf[i])
            if bfs[i] >= 0:
                assert bfs[i] >= formula
                if int(g.dist_base[i]) + bfs[i] <= g.radius:
                    assert bfs[i] == formula


# -- panel census -----------------------------------------------------------------------


@pytest.mark.parametrize("n,q0,radius", [(2, 2, 3), (2, 3, 3), (3, 2, 2)])
def test_panel_census_two_value_law(n, q0, radius):
    b = Building(n, q0)
    g = b.explore(radius)
    census = g.panel_census()
    assert census.violations == []
    assert census.certified_panels > 0
    near = (q0 + 1, q0 * q0 - q0)
    far = (1, q0 * q0)
    assert set(census.fixed_splits) == {near}
    assert set(census.crossing_splits) <= {near, far}
    if n == 2 and radius >= 2:
        # a tree vertex off the fixed subtree has a single edge toward it
        assert set(census.crossing_splits) == {far}


def test_panel_stats_match_census():
    b = Building(2, 2)
    g = b.explore(2)
    census = g.panel_census()
    total = sum(census.fixed_splits.values()) + sum(census.crossing_splits.values())
    seen = set()
    cnt = 0
    for i in range(g.interior_count):
        for s in range(2):
            ids = g.members(i, s)
            if ids in seen:
                continue
            seen.add(ids)
            st = g.panel_stats(i, s)
            assert st.minus + st.plus == b.q + 1
            cnt += 1
    assert cnt == total + census.skipped_panels


# -- Weyl windows -------------------------------------------------------------------------


@pytest.mark.parametrize("n,q0,radius", [(2, 2, 3), (3, 2, 2)])
def test_weyl_windows(n, q0, radius):
    b = Building(n, q0)
    g = b.explore(radius, want_weyl=True)
    ws = b.ws
    for i in g.iter_ids():
        w = g.weyl_to_base(i)
        assert ws.length(w) == int(g.dist_base[i])
    # each window is realized by exactly q^l chambers
    per = Counter(tuple(int(x) for x in g.weyl[i]) for i in g.iter_ids())
    for win, cnt in per.items():
        assert cnt == b.q ** ws.length(AffinePerm(win))
    # delta from the centre agrees with the stored windows
    wins = g.windows_from(0, radius - 1)
    for j, w in wins.items():
        assert w.window == tuple(int(x) for x in g.weyl[j])


def test_weyl_distance_antisymmetry():
    b = Building(3, 2)
    g = b.explore(2, want_weyl=True)
    ws = b.ws
    # delta(C,D) = delta(D,C)^{-1} on a sample of interior pairs
    rng = np.random.default_rng(7)
    ids = rng.choice(g.interior_count, size=6, replace=False)
    for i in ids[:3]:
        for j in ids[3:]:
            d1 = g.weyl_distance(int(i), int(j))
            d2 = g.weyl_distance(int(j), int(i))
            assert ws.mul(d1, d2) == ws.identity


# -- Hecke structure constants against geometry ---------------------------------------------


def _oracle_product(g, b, w, wp):
    """Pair counting: coeff of e_u in e_w * e_wp, from the explored ball."""
    ws = b.ws
    lw = ws.length(w)
    lwp = ws.length(wp)
    win_w = np.asarray(w.window, dtype=g.weyl.dtype)
    cands = np.nonzero((g.weyl == win_w).all(axis=1))[0]
    assert len(cands) == b.q**lw
    pairs = Counter()
    for c in cands:
        wins = g.windows_from(int(c), lwp)
        for d, win in wins.items():
            if win == wp:
                u = g.weyl_to_base(d)
                pairs[u.window] += 1
    out = {}
    for uwin, cnt in pairs.items():
        lu = ws.length(AffinePerm(uwin))
        num = Fraction(cnt, b.q**lu)
        assert num.denominator == 1, "pair count not divisible by q^l(u)"
        out[uwin] = num
    return out


@pytest.mark.parametrize(
    "n,q0,radius,maxlen",
    [(2, 2, 4, 2), (3, 2, 3, 2)],
)
def test_hecke_products_match_geometry(n, q0, radius, maxlen):
    b = Building(n, q0)
    g = b.explore(radius, want_weyl=True)
    ws = b.ws
    elems = [
        w
        for w in ws.elements_of_length_upto(maxlen)
        if 1 <= ws.length(w) <= maxlen
    ]
    done = 0
    for w in elems:
        for wp in elems:
            if ws.length(w) + ws.length(wp) > radius:
                continue
            alg = HeckeElem.basis(ws, q0, w) * HeckeElem.basis(ws, q0, wp)
            geo = _oracle_product(g, b, w, wp)
            assert {k.window: v for k, v in alg.terms.items()} == geo
            done += 1
    assert done >= 8


# -- determinism and precision ------------------------------------------------------------------


def test_precision_does_not_change_results():
    for n, q0, radius in [(2, 3, 2), (3, 2, 2)]:
        g1 = Building(n, q0).explore(radius)
        g2 = Building(n, q0, precision=default_precision(radius, n) + 13).explore(
            radius
        )
        assert g1._blob == g2._blob
        assert np.array_equal(g1.dist_base, g2.dist_base)
        assert np.array_equal(g1.dist_xf, g2.dist_xf)
        assert np.array_equal(g1._members, g2._members)


def test_rerun_is_deterministic():
    g1 = Building(3, 2).explore(2)
    g2 = Building(3, 2).explore(2)
    assert g1._blob == g2._blob
    assert np.array_equal(g1._members, g2._members)


# -- region discipline ----------------------------------------------------------------------------


def test_boundary_access_raises():
    g = Building(2, 2).explore(1)
    boundary = g.interior_count
    with pytest.raises(RegionError):
        g.members(boundary, 0)
    with pytest.raises(RegionError):
        g.windows_from(0, 5)


def test_census_shape():
    g = Building(2, 2).explore(2)
    c = g.census()
    assert c["chambers"] == 41
    assert c["interior_chambers"] == 9
    assert c["by_dist_base"] == [1, 8, 32]
    assert not c["truncated"]
