"""Pure-Python kernel: canonical lattice chains and ball exploration.

This module is the reference implementation of the hot geometric core; the
compiled kernel (_kernel_cy) reproduces its outputs byte for byte.  Both are
selected through heckegamma._kernel.

Geometry.  A vertex of the building is a homothety class of O-lattices in
E^n, O = k[[t]], k = GF(q0^2).  Its canonical representative is a column
Hermite form: lower triangular, diagonal exactly t^{a_i}, the entry at
(i, j), j < i, a polynomial reduced mod t^{a_i}, and the homothety scaled so
that val(det) = sum a_i lies in {0..n-1}; that value is the vertex type.  A
chamber is a full chain L_0 > L_1 > ... > L_{n-1} > t L_0 with val(det L_i)
= i, so the canonical vertex representatives themselves form the chain.

Scalars.  Kernel scalars are triples (lo, digits, hi): digit codes for
t^lo..t^(lo+len-1), all digits below hi accounted for, hi = KINF meaning the
value is an exact polynomial.  Canonicalization keeps everything exact except
the one inverse of a unit series, whose truncation is tracked by hi and
checked against every reduction, so a canonical key is always exact or the
kernel raises PrecisionError.

Key layout per vertex: n bytes (a_i + PIV_OFF), then the n(n-1)/2
below-diagonal entries row-major, each serialized as [0] when zero or
[ndigits, lo + PIV_OFF, digit codes...].  A chamber key concatenates its
vertex keys in type order.  Digitwise Frobenius preserves the layout, which
is what makes the theta action a byte map.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .errors import InvariantViolation, PrecisionError
from .scalars import GF

KINF = 1 << 30
PIV_OFF = 64

_ZERO = (0, (), KINF)


def _apply_right(win: tuple[int, ...], i: int) -> tuple[int, ...]:
    # right action of s_i on a window, kept local so the kernel stands alone
    n = len(win)
    out = list(win)
    if i == 0:
        out[0] = win[n - 1] - n
        out[n - 1] = win[0] + n
    else:
        out[i - 1], out[i] = win[i], win[i - 1]
    return tuple(out)


class PureKernel:
    """Exact chamber operations for one session (n, q0, precision)."""

    backend = "pure"

    def __init__(self, n: int, q0: int, prec: int):
        if n < 2:
            raise ValueError("need n >= 2")
        if prec < 4:
            raise ValueError("precision too small to invert anything")
        gf = GF(q0)
        self.n = n
        self.q0 = q0
        self.q = gf.q
        self.prec = prec
        self.gf = gf
        self._add_t = gf.add_codes
        self._mul_t = gf.mul_codes
        self._neg_t = gf.neg_codes
        self._inv_t = gf.inv_codes
        self._frob_t = gf.frob_codes

    # -- scalar helpers ------------------------------------------------------

    def _norm(self, lo, ds, hi):
        k = 0
        m = len(ds)
        while k < m and ds[k] == 0:
            k += 1
        lo += k
        if hi < KINF and lo + (m - k) > hi:
            m = k + max(0, hi - lo)
        while m > k and ds[m - 1] == 0:
            m -= 1
        if k == m:
            return (0, (), hi)
        return (lo, tuple(ds[k:m]), hi)

    def _add(self, x, y):
        xlo, xds, xhi = x
        ylo, yds, yhi = y
        hi = min(xhi, yhi)
        if not xds:
            return self._norm(ylo, yds, hi)
        if not yds:
            return self._norm(xlo, xds, hi)
        lo = min(xlo, ylo)
        end = max(xlo + len(xds), ylo + len(yds))
        out = [0] * (end - lo)
        for i, d in enumerate(xds):
            out[xlo - lo + i] = d
        add = self._add_t
        for i, d in enumerate(yds):
            k = ylo - lo + i
            out[k] = add[out[k]][d]
        return self._norm(lo, out, hi)

    def _neg(self, x):
        lo, ds, hi = x
        neg = self._neg_t
        return (lo, tuple(neg[d] for d in ds), hi)

    def _sub(self, x, y):
        return self._add(x, self._neg(y))

    def _mul(self, x, y):
        xlo, xds, xhi = x
        ylo, yds, yhi = y
        east = xlo if xds else xhi
        west = ylo if yds else yhi
        hi = min(east + yhi, west + xhi)
        hi = min(hi, KINF)
        if not xds or not yds:
            return (0, (), hi)
        out = [0] * (len(xds) + len(yds) - 1)
        add = self._add_t
        mul = self._mul_t
        for i, da in enumerate(xds):
            if da:
                row = mul[da]
                for j, db in enumerate(yds):
                    if db:
                        k = i + j
                        out[k] = add[out[k]][row[db]]
        return self._norm(xlo + ylo, out, hi)

    def _scale(self, x, code):
        if code == 0:
            return _ZERO
        if code == 1:
            return x
        lo, ds, hi = x
        row = self._mul_t[code]
        return (lo, tuple(row[d] for d in ds), hi)

    def _shift(self, x, k):
        lo, ds, hi = x
        return (lo + k, ds, hi if hi >= KINF else hi + k)

    def _inv_unit(self, x, want):
        lo, ds, hi = x
        if not ds:
            raise PrecisionError("cannot invert: zero at the known precision")
        avail = want if hi >= KINF else min(want, hi - lo)
        if avail <= 0:
            raise PrecisionError("no usable digits for inversion")
        a = list(ds[:avail]) + [0] * max(0, avail - len(ds))
        add = self._add_t
        mul = self._mul_t
        neg = self._neg_t
        inv0 = self._inv_t[a[0]]
        out = [0] * avail
        out[0] = inv0
        maxi = len(a) - 1
        for k in range(1, avail):
            s = 0
            top = k if k < maxi else maxi
            for i in range(1, top + 1):
                ai = a[i]
                if ai:
                    s = add[s][mul[ai][out[k - i]]]
            out[k] = mul[inv0][neg[s]]
        return self._norm(-lo, out, -lo + avail)

    # -- canonical form ------------------------------------------------------

    def _canonical_vertex(self, cols):
        """Reduce columns to the canonical vertex form; returns the key.

        ``cols`` is a list of m >= n columns, each a list of n scalars, and
        is consumed.  The O-span must be a full lattice.
        """
        n = self.n
        m = len(cols)
        pivots = [0] * n
        for i in range(n):
            best_j = -1
            best_lo = 0
            for j in range(i, m):
                lo, ds, _hi = cols[j][i]
                if ds and (best_j < 0 or lo < best_lo):
                    best_j = j
                    best_lo = lo
            if best_j < 0:
                raise InvariantViolation(f"no pivot available in row {i}")
            for j in range(i, m):
                _lo, ds, hi = cols[j][i]
                if not ds and hi <= best_lo:
                    raise PrecisionError(
                        f"row {i}: a window ends at t^{hi}, cannot certify the pivot t^{best_lo}"
                    )
            if best_j != i:
                cols[i], cols[best_j] = cols[best_j], cols[i]
            a = best_lo
            pivots[i] = a
            col_i = cols[i]
            _lo, ds, _hi = col_i[i]
            if ds != (1,):
                # multiply the column by the unit t^a / pivot, making the
                # pivot exactly t^a
                uinv = self._shift(self._inv_unit(col_i[i], self.prec), a)
                for r in range(i + 1, n):
                    col_i[r] = self._mul(col_i[r], uinv)
            col_i[i] = (a, (1,), KINF)
            for j in range(i + 1, m):
                lo, ds, hi = cols[j][i]
                if ds:
                    if lo < a:
                        raise InvariantViolation("pivot was not minimal")
                    c = (lo - a, ds, hi if hi >= KINF else hi - a)
                    col_j = cols[j]
                    col_j[i] = (0, (), hi)
                    for r in range(i + 1, n):
                        col_j[r] = self._sub(col_j[r], self._mul(c, col_i[r]))
                elif hi < KINF:
                    # the unseen tail beyond t^hi still divides by the pivot;
                    # cap the lower rows' windows accordingly
                    tail = (0, (), hi - a)
                    col_j = cols[j]
                    for r in range(i + 1, n):
                        col_j[r] = self._sub(col_j[r], self._mul(tail, col_i[r]))
        for j in range(n, m):
            for r in range(n):
                if cols[j][r][1]:
                    raise InvariantViolation("dependent column did not vanish")
        # reduce below-diagonal entries mod the pivot of their row
        for j in range(n - 1):
            col_j = cols[j]
            for i in range(j + 1, n):
                lo, ds, hi = col_j[i]
                a = pivots[i]
                if hi < a:
                    raise PrecisionError(
                        f"entry ({i},{j}) known below t^{hi} only, needs t^{a}"
                    )
                if ds:
                    cut = a - lo
                    if cut < len(ds):
                        rem = ds[: max(0, cut)]
                        qlo = max(lo, a)
                        quot = (qlo - a, ds[max(0, cut):], hi if hi >= KINF else hi - a)
                        col_i = cols[i]
                        for r in range(i + 1, n):
                            col_j[r] = self._sub(col_j[r], self._mul(quot, col_i[r]))
                        col_j[i] = self._norm(lo, rem, KINF)
                        continue
                    col_j[i] = (lo, ds, KINF)
                else:
                    col_j[i] = _ZERO
                if hi < KINF:
                    tail = (0, (), hi - a)
                    col_i = cols[i]
                    for r in range(i + 1, n):
                        col_j[r] = self._sub(col_j[r], self._mul(tail, col_i[r]))
        # homothety: scale so that val(det) becomes its residue mod n
        d = sum(pivots)
        shift = (d % n - d) // n
        if shift:
            for i in range(n):
                pivots[i] += shift
                for r in range(n):
                    cols[i][r] = self._shift(cols[i][r], shift)
        return self._serialize(pivots, cols)

    def _serialize(self, pivots, cols):
        out = bytearray()
        for a in pivots:
            b = a + PIV_OFF
            if not 0 <= b < 256:
                raise PrecisionError(f"pivot exponent {a} out of serializable range")
            out.append(b)
        for i in range(1, self.n):
            for j in range(i):
                lo, ds, hi = cols[j][i]
                if hi < KINF:
                    raise InvariantViolation("inexact canonical entry")
                if not ds:
                    out.append(0)
                else:
                    if len(ds) >= 255:
                        raise PrecisionError("entry too long to serialize")
                    b = lo + PIV_OFF
                    if not 0 <= b < 256:
                        raise PrecisionError(f"entry valuation {lo} out of range")
                    out.append(len(ds))
                    out.append(b)
                    out.extend(ds)
        return bytes(out)

    # -- keys ----------------------------------------------------------------

    def vertex_spans(self, key: bytes) -> list[tuple[int, int]]:
        """Byte ranges of the n vertex keys inside a chamber key."""
        n = self.n
        spans = []
        off = 0
        for _v in range(n):
            start = off
            off += n
            for _e in range(n * (n - 1) // 2):
                cnt = key[off]
                off += 1 if cnt == 0 else 2 + cnt
            spans.append((start, off))
        if off != len(key):
            raise ValueError("malformed chamber key")
        return spans

    def _parse_vertex(self, key: bytes, off: int):
        """Returns (pivots, cols, end_offset); cols are fresh lists."""
        n = self.n
        pivots = [key[off + i] - PIV_OFF for i in range(n)]
        off += n
        cols = [[_ZERO] * n for _ in range(n)]
        for i in range(n):
            cols[i][i] = (pivots[i], (1,), KINF)
        for i in range(1, n):
            for j in range(i):
                cnt = key[off]
                off += 1
                if cnt:
                    lo = key[off] - PIV_OFF
                    ds = tuple(key[off + 1 : off + 1 + cnt])
                    off += 1 + cnt
                    cols[j][i] = (lo, ds, KINF)
        return pivots, cols, off

    def standard_chamber_key(self) -> bytes:
        n = self.n
        out = bytearray()
        for typ in range(n):
            for i in range(n):
                out.append((1 if i >= n - typ else 0) + PIV_OFF)
            out.extend(b"\x00" * (n * (n - 1) // 2))
        return bytes(out)

    def theta(self, key: bytes) -> bytes:
        """Digitwise Frobenius on a chamber key."""
        n = self.n
        frob = self._frob_t
        out = bytearray(key)
        off = 0
        for _v in range(n):
            off += n
            for _e in range(n * (n - 1) // 2):
                cnt = key[off]
                if cnt == 0:
                    off += 1
                else:
                    for k in range(cnt):
                        out[off + 2 + k] = frob[key[off + 2 + k]]
                    off += 2 + cnt
        return bytes(out)

    def is_rational(self, key: bytes) -> bool:
        """True when every digit lies in the fixed subfield GF(q0)."""
        n = self.n
        frob = self._frob_t
        off = 0
        for _v in range(n):
            off += n
            for _e in range(n * (n - 1) // 2):
                cnt = key[off]
                if cnt == 0:
                    off += 1
                else:
                    for k in range(cnt):
                        d = key[off + 2 + k]
                        if frob[d] != d:
                            return False
                    off += 2 + cnt
        return True

    # -- panels --------------------------------------------------------------

    def neighbors(self, key: bytes, s: int) -> list[bytes]:
        """All q+1 chamber keys of the type-s panel of ``key``, sorted.

        The input chamber is one of them.
        """
        n = self.n
        if not 0 <= s < n:
            raise ValueError(f"panel type {s} out of range")
        spans = self.vertex_spans(key)
        mats = []
        for start, _end in spans:
            mats.append(self._parse_vertex(key, start))
        if s >= 1:
            a_piv, a_cols, _ = mats[s - 1]
        else:
            a_piv, a_cols, _ = mats[n - 1]
        if 1 <= s <= n - 2:
            b_piv, b_cols, _ = mats[s + 1]
            b_shift = 0
        else:
            b_piv, b_cols, _ = mats[(s + 1) % n]
            b_shift = 1
        if b_shift:
            b_cols = [[self._shift(e, 1) for e in col] for col in b_cols]
            b_piv = [a + 1 for a in b_piv]
        else:
            b_cols = [list(col) for col in b_cols]

        # T = A^{-1} B column by column, exact forward substitution
        tcols = []
        for col in b_cols:
            x = [None] * n
            for i in range(n):
                acc = col[i]
                for k2 in range(i):
                    ent = a_cols[k2][i]
                    if ent[1]:
                        acc = self._sub(acc, self._mul(ent, x[k2]))
                xi = self._shift(acc, -a_piv[i])
                if xi[1] and xi[0] < 0:
                    raise InvariantViolation("panel neighbour matrix not integral")
                x[i] = xi
            tcols.append(x)

        # A/B is a 2-dimensional residue plane: rank of T mod t must be n-2
        red_cols = []
        for x in tcols:
            v = [0] * n
            for i in range(n):
                lo, ds, _hi = x[i]
                if ds and lo == 0:
                    v[i] = ds[0]
            red_cols.append(v)
        pivot_rows = self._echelon_pivot_rows(red_cols)
        if len(pivot_rows) != n - 2:
            raise InvariantViolation(
                f"panel quotient has rank {len(pivot_rows)}, expected {n - 2}"
            )
        free = [i for i in range(n) if i not in pivot_rows]
        r1, r2 = free

        out = set()
        start, end = spans[s]
        for c in list(range(self.q)) + [None]:
            if c is None:
                vcol = [a_cols[r2][i] for i in range(n)]
            else:
                vcol = [
                    self._add(a_cols[r1][i], self._scale(a_cols[r2][i], c))
                    for i in range(n)
                ]
            cand = [list(col) for col in b_cols] + [vcol]
            vkey = self._canonical_vertex(cand)
            out.add(key[:start] + vkey + key[end:])
        if len(out) != self.q + 1:
            raise InvariantViolation(
                f"panel has {len(out)} chambers, expected {self.q + 1}"
            )
        if key not in out:
            raise InvariantViolation("panel lost its own chamber")
        return sorted(out)

    def _echelon_pivot_rows(self, cols):
        """Column echelon over the residue field; returns the set of pivot rows."""
        mul = self._mul_t
        add = self._add_t
        neg = self._neg_t
        inv = self._inv_t
        n = self.n
        pivots = {}
        for v in cols:
            v = list(v)
            while True:
                lead = next((i for i in range(n) if v[i]), None)
                if lead is None:
                    break
                if lead in pivots:
                    w = pivots[lead]
                    c = neg[v[lead]]
                    for i in range(lead, n):
                        if w[i]:
                            v[i] = add[v[i]][mul[c][w[i]]]
                else:
                    c = inv[v[lead]]
                    pivots[lead] = [mul[c][x] if x else 0 for x in v]
                    break
        return set(pivots)

    # -- the tree formula (n = 2) ---------------------------------------------

    def tree_crossing_distance(self, key: bytes) -> int:
        """Distance from a chamber to the Frobenius-fixed subtree, exactly.

        Works only for n = 2: there a vertex class [M] with M lower
        triangular sits at vertex distance val-defect of M^{-1} theta(M),
        which collapses to max(0, a_1 - val(theta(e) - e)) for the single
        below-diagonal entry e; the chamber distance is the max over its two
        vertices.
        """
        if self.n != 2:
            raise ValueError("tree formula only applies to n = 2")
        frob = self._frob_t
        best = 0
        off = 0
        for _v in range(2):
            a1 = key[off + 1] - PIV_OFF
            cnt = key[off + 2]
            if cnt == 0:
                off += 3
                continue
            lo = key[off + 3] - PIV_OFF
            dv = 0
            for k2 in range(cnt):
                d = key[off + 4 + k2]
                if frob[d] != d:
                    dv = max(0, a1 - (lo + k2))
                    break
            best = max(best, dv)
            off += 4 + cnt
        return best

    # -- exploration -----------------------------------------------------------

    def explore(self, radius: int, cap_chambers: int, want_weyl: bool) -> dict:
        """Breadth-first ball around the standard chamber.

        Returns plain arrays: chamber keys in discovery order, gallery
        distance to the base chamber, distance to the Frobenius-fixed
        subbuilding (exact for n = 2 via the tree formula, else the in-ball
        multi-source estimate), Frobenius-fixed flags, panel membership rows
        for every interior chamber, and optionally the Weyl distance window
        of every chamber.
        """
        if radius < 0:
            raise ValueError("radius must be >= 0")
        n = self.n
        std = self.standard_chamber_key()
        keys = [std]
        index = {std: 0}
        dist = [0]
        stable = [1 if self.is_rational(std) else 0]
        weyl = [tuple(range(1, n + 1))] if want_weyl else None
        rows = []
        truncated = False
        head = 0
        for d in range(radius):
            layer_end = len(keys)
            while head < layer_end:
                u = head
                ku = keys[u]
                urow = []
                for s in range(n):
                    ids = []
                    for k in self.neighbors(ku, s):
                        j = index.get(k)
                        if j is None:
                            if len(keys) >= cap_chambers:
                                truncated = True
                                break
                            j = len(keys)
                            index[k] = j
                            keys.append(k)
                            dist.append(d + 1)
                            stable.append(1 if self.is_rational(k) else 0)
                            if want_weyl:
                                weyl.append(_apply_right(weyl[u], s))
                        elif want_weyl and dist[j] == d + 1:
                            if weyl[j] != _apply_right(weyl[u], s):
                                raise InvariantViolation(
                                    "Weyl distance is not well defined along the ball"
                                )
                        ids.append(j)
                    if truncated:
                        break
                    ids.sort()
                    urow.append(ids)
                if truncated:
                    break
                rows.append(urow)
                head += 1
            if truncated:
                break
        nch = len(keys)
        interior = head
        dxf = [-1] * nch
        if not truncated:
            if n == 2:
                for i, k in enumerate(keys):
                    dxf[i] = self.tree_crossing_distance(k)
            else:
                self._crossing_bfs(dist, stable, rows, interior, radius, dxf)

        blob = b"".join(keys)
        offs = np.zeros(nch + 1, dtype=np.int64)
        pos = 0
        for i, k in enumerate(keys):
            offs[i] = pos
            pos += len(k)
        offs[nch] = pos
        members = np.full((interior, n, self.q + 1), -1, dtype=np.int32)
        for u in range(interior):
            for s in range(n):
                members[u, s, :] = rows[u][s]
        return {
            "n": n,
            "q0": self.q0,
            "radius": radius,
            "keys_blob": blob,
            "key_offsets": offs,
            "dist_base": np.asarray(dist, dtype=np.int32),
            "dist_xf": np.asarray(dxf, dtype=np.int32),
            "stable": np.asarray(stable, dtype=np.uint8),
            "members": members,
            "weyl": (np.asarray(weyl, dtype=np.int16) if want_weyl else None),
            "interior_count": interior,
            "truncated": truncated,
            "index": index,
        }

    def _crossing_bfs(self, dist, stable, rows, interior, radius, dxf):
        # edges incident to at least one interior chamber are visible; give
        # boundary chambers their interior neighbours as reverse adjacency
        back = {}
        for u in range(interior):
            for srow in rows[u]:
                for v in srow:
                    if v >= interior and v != u:
                        back.setdefault(v, []).append(u)
        dq = deque()
        for i, st in enumerate(stable):
            if st:
                dxf[i] = 0
                dq.append(i)
        while dq:
            u = dq.popleft()
            du = dxf[u]
            if u < interior:
                nbrs = (v for srow in rows[u] for v in srow)
            else:
                nbrs = iter(back.get(u, ()))
            for v in nbrs:
                if dxf[v] < 0:
                    dxf[v] = du + 1
                    dq.append(v)
