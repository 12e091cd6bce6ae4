# cython: language_level=3
"""Compiled kernel: canonical lattice chains and ball exploration.

Same contract and byte-identical outputs as the pure kernel in
heckegamma._kernel_py; that module carries the layout documentation.  The
scalar encoding, key format, and every ordering decision are shared; this
file only moves the digit loops into C.
"""

from collections import deque

import numpy as np

from .errors import InvariantViolation, PrecisionError
from .scalars import GF

KINF = 1 << 30
PIV_OFF = 64

cdef long long C_KINF = 1 << 30
cdef int C_PIV = 64
# digit buffers; serialization rejects entries at 255 digits, so intermediate
# products stay far below this
DEF BUF = 4096

_ZERO = (0, (), KINF)


def _apply_right(win, int i):
    cdef int n = len(win)
    out = list(win)
    if i == 0:
        out[0] = win[n - 1] - n
        out[n - 1] = win[0] + n
    else:
        out[i - 1], out[i] = win[i], win[i - 1]
    return tuple(out)


cdef class CompiledKernel:
    """Exact chamber operations for one session (n, q0, precision)."""

    cdef public int n
    cdef public int q0
    cdef public int q
    cdef public int prec
    cdef public object gf
    cdef readonly str backend
    cdef unsigned char _cadd[32][32]
    cdef unsigned char _cmul[32][32]
    cdef unsigned char _cneg[32]
    cdef unsigned char _cinv[32]
    cdef unsigned char _cfrob[32]

    def __init__(self, int n, int q0, int prec):
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
        self.backend = "compiled"
        cdef int i, j
        if gf.q > 32:
            raise ValueError("residue field too large for the compiled tables")
        for i in range(gf.q):
            for j in range(gf.q):
                self._cadd[i][j] = gf.add_codes[i][j]
                self._cmul[i][j] = gf.mul_codes[i][j]
            self._cneg[i] = gf.neg_codes[i]
            self._cinv[i] = gf.inv_codes[i]
            self._cfrob[i] = gf.frob_codes[i]

    # -- scalar helpers ------------------------------------------------------

    cdef tuple _norm_buf(self, long long lo, unsigned char *ds, Py_ssize_t m, long long hi):
        cdef Py_ssize_t k = 0
        while k < m and ds[k] == 0:
            k += 1
        lo += k
        if hi < C_KINF and lo + (m - k) > hi:
            m = k + (hi - lo if hi > lo else 0)
        while m > k and ds[m - 1] == 0:
            m -= 1
        if k == m:
            return (0, (), hi if hi < C_KINF else KINF)
        return (lo, tuple([ds[i] for i in range(k, m)]), hi if hi < C_KINF else KINF)

    cdef Py_ssize_t _load(self, ds, unsigned char *buf) except -1:
        cdef Py_ssize_t m = len(ds)
        cdef Py_ssize_t i
        if m > BUF:
            raise PrecisionError("scalar digit string too long for the kernel buffer")
        for i in range(m):
            buf[i] = ds[i]
        return m

    cpdef tuple _norm(self, lo, ds, hi):
        cdef unsigned char buf[BUF]
        cdef Py_ssize_t m = self._load(ds, buf)
        return self._norm_buf(lo, buf, m, hi)

    cpdef tuple _add(self, tuple x, tuple y):
        xlo, xds, xhi = x
        ylo, yds, yhi = y
        cdef long long hi = min(xhi, yhi)
        if not xds:
            return self._norm(ylo, yds, hi)
        if not yds:
            return self._norm(xlo, xds, hi)
        cdef long long lo = min(xlo, ylo)
        cdef long long end = max(xlo + len(xds), ylo + len(yds))
        cdef Py_ssize_t width = end - lo
        cdef unsigned char out[BUF]
        cdef Py_ssize_t i
        if width > BUF:
            raise PrecisionError("scalar digit string too long for the kernel buffer")
        for i in range(width):
            out[i] = 0
        cdef Py_ssize_t base = <Py_ssize_t> (xlo - lo)
        for i in range(len(xds)):
            out[base + i] = xds[i]
        base = <Py_ssize_t> (ylo - lo)
        cdef unsigned char d
        for i in range(len(yds)):
            d = yds[i]
            out[base + i] = self._cadd[out[base + i]][d]
        return self._norm_buf(lo, out, width, hi)

    cpdef tuple _neg(self, tuple x):
        lo, ds, hi = x
        return (lo, tuple([self._cneg[<unsigned char> d] for d in ds]), hi)

    cpdef tuple _sub(self, tuple x, tuple y):
        return self._add(x, self._neg(y))

    cpdef tuple _mul(self, tuple x, tuple y):
        xlo, xds, xhi = x
        ylo, yds, yhi = y
        east = xlo if xds else xhi
        west = ylo if yds else yhi
        cdef long long hi = min(east + yhi, west + xhi)
        if hi > C_KINF:
            hi = C_KINF
        if not xds or not yds:
            return (0, (), hi if hi < C_KINF else KINF)
        cdef unsigned char xb[BUF]
        cdef unsigned char yb[BUF]
        cdef unsigned char ob[BUF]
        cdef Py_ssize_t xm = self._load(xds, xb)
        cdef Py_ssize_t ym = self._load(yds, yb)
        cdef Py_ssize_t om = xm + ym - 1
        cdef Py_ssize_t i, j
        cdef unsigned char da
        if om > BUF:
            raise PrecisionError("scalar digit string too long for the kernel buffer")
        for i in range(om):
            ob[i] = 0
        for i in range(xm):
            da = xb[i]
            if da:
                for j in range(ym):
                    if yb[j]:
                        ob[i + j] = self._cadd[ob[i + j]][self._cmul[da][yb[j]]]
        return self._norm_buf(<long long> xlo + <long long> ylo, ob, om, hi)

    cpdef tuple _scale(self, tuple x, int code):
        if code == 0:
            return _ZERO
        if code == 1:
            return x
        lo, ds, hi = x
        return (lo, tuple([self._cmul[code][<unsigned char> d] for d in ds]), hi)

    cpdef tuple _shift(self, tuple x, k):
        lo, ds, hi = x
        return (lo + k, ds, hi if hi >= KINF else hi + k)

    cpdef tuple _inv_unit(self, tuple x, int want):
        lo, ds, hi = x
        if not ds:
            raise PrecisionError("cannot invert: zero at the known precision")
        cdef long long avail = want if hi >= KINF else min(<long long> want, hi - lo)
        if avail <= 0:
            raise PrecisionError("no usable digits for inversion")
        cdef unsigned char a[BUF]
        cdef unsigned char out[BUF]
        cdef Py_ssize_t m = len(ds)
        cdef Py_ssize_t k, i, top, maxi
        cdef unsigned char s, ai, inv0
        if avail > BUF:
            raise PrecisionError("scalar digit string too long for the kernel buffer")
        for k in range(<Py_ssize_t> avail):
            a[k] = ds[k] if k < m else 0
        inv0 = self._cinv[a[0]]
        for k in range(<Py_ssize_t> avail):
            out[k] = 0
        out[0] = inv0
        maxi = (m if m < <Py_ssize_t> avail else <Py_ssize_t> avail) - 1
        for k in range(1, <Py_ssize_t> avail):
            s = 0
            top = k if k < maxi else maxi
            for i in range(1, top + 1):
                ai = a[i]
                if ai:
                    s = self._cadd[s][self._cmul[ai][out[k - i]]]
            out[k] = self._cmul[inv0][self._cneg[s]]
        return self._norm_buf(-(<long long> lo), out, <Py_ssize_t> avail, -(<long long> lo) + avail)

    # -- canonical form ------------------------------------------------------

    def _canonical_vertex(self, list cols):
        """Reduce columns to the canonical vertex form; returns the key.

        ``cols`` is a list of m >= n columns, each a list of n scalars, and
        is consumed.  The O-span must be a full lattice.
        """
        cdef int n = self.n
        cdef int m = len(cols)
        cdef int i, j, r, best_j
        cdef long long best_lo, a, d, dmod, shift
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
        d = 0
        for i in range(n):
            d += <long long> pivots[i]
        dmod = d % n
        if dmod < 0:
            dmod += n
        shift = (dmod - d) // n  # exact division, sign-safe
        if shift:
            for i in range(n):
                pivots[i] += shift
                for r in range(n):
                    cols[i][r] = self._shift(cols[i][r], shift)
        return self._serialize(pivots, cols)

    def _serialize(self, pivots, cols):
        cdef int i, j
        cdef long long b
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

    def vertex_spans(self, bytes key):
        """Byte ranges of the n vertex keys inside a chamber key."""
        cdef int n = self.n
        cdef Py_ssize_t off = 0, start
        cdef int v, e, cnt
        cdef const unsigned char *p = key
        cdef Py_ssize_t total = len(key)
        spans = []
        for v in range(n):
            start = off
            off += n
            for e in range(n * (n - 1) // 2):
                if off >= total:
                    raise ValueError("malformed chamber key")
                cnt = p[off]
                off += 1 if cnt == 0 else 2 + cnt
            spans.append((start, off))
        if off != total:
            raise ValueError("malformed chamber key")
        return spans

    def _parse_vertex(self, bytes key, Py_ssize_t off):
        """Returns (pivots, cols, end_offset); cols are fresh lists."""
        cdef int n = self.n
        cdef int i, j, cnt
        cdef const unsigned char *p = key
        pivots = [p[off + i] - PIV_OFF for i in range(n)]
        off += n
        cols = [[_ZERO] * n for _ in range(n)]
        for i in range(n):
            cols[i][i] = (pivots[i], (1,), KINF)
        for i in range(1, n):
            for j in range(i):
                cnt = p[off]
                off += 1
                if cnt:
                    lo = p[off] - PIV_OFF
                    ds = tuple([p[off + 1 + k] for k in range(cnt)])
                    off += 1 + cnt
                    cols[j][i] = (lo, ds, KINF)
        return pivots, cols, off

    def standard_chamber_key(self):
        cdef int n = self.n
        cdef int typ, i
        out = bytearray()
        for typ in range(n):
            for i in range(n):
                out.append((1 if i >= n - typ else 0) + PIV_OFF)
            out.extend(b"\x00" * (n * (n - 1) // 2))
        return bytes(out)

    def theta(self, bytes key):
        """Digitwise Frobenius on a chamber key."""
        cdef int n = self.n
        cdef Py_ssize_t off = 0
        cdef int v, e, cnt, k
        out = bytearray(key)
        cdef unsigned char *o = out
        cdef const unsigned char *p = key
        for v in range(n):
            off += n
            for e in range(n * (n - 1) // 2):
                cnt = p[off]
                if cnt == 0:
                    off += 1
                else:
                    for k in range(cnt):
                        o[off + 2 + k] = self._cfrob[p[off + 2 + k]]
                    off += 2 + cnt
        return bytes(out)

    def is_rational(self, bytes key):
        """True when every digit lies in the fixed subfield GF(q0)."""
        cdef int n = self.n
        cdef Py_ssize_t off = 0
        cdef int v, e, cnt, k
        cdef unsigned char d
        cdef const unsigned char *p = key
        for v in range(n):
            off += n
            for e in range(n * (n - 1) // 2):
                cnt = p[off]
                if cnt == 0:
                    off += 1
                else:
                    for k in range(cnt):
                        d = p[off + 2 + k]
                        if self._cfrob[d] != d:
                            return False
                    off += 2 + cnt
        return True

    # -- panels --------------------------------------------------------------

    def neighbors(self, bytes key, int s):
        """All q+1 chamber keys of the type-s panel of ``key``, sorted.

        The input chamber is one of them.
        """
        cdef int n = self.n
        cdef int i, k2, c
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
        for cc in list(range(self.q)) + [None]:
            if cc is None:
                vcol = [a_cols[r2][i] for i in range(n)]
            else:
                c = cc
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
        cdef int n = self.n
        cdef int i, lead
        cdef unsigned char c
        pivots = {}
        for v0 in cols:
            v = list(v0)
            while True:
                lead = -1
                for i in range(n):
                    if v[i]:
                        lead = i
                        break
                if lead < 0:
                    break
                if lead in pivots:
                    w = pivots[lead]
                    c = self._cneg[<unsigned char> v[lead]]
                    for i in range(lead, n):
                        if w[i]:
                            v[i] = self._cadd[<unsigned char> v[i]][self._cmul[c][<unsigned char> w[i]]]
                else:
                    c = self._cinv[<unsigned char> v[lead]]
                    pivots[lead] = [self._cmul[c][<unsigned char> x] if x else 0 for x in v]
                    break
        return set(pivots)

    # -- the tree formula (n = 2) ---------------------------------------------

    def tree_crossing_distance(self, bytes key):
        """Distance from a chamber to the Frobenius-fixed subtree, exactly.

        n = 2 only; see the pure kernel for the valuation identity.
        """
        if self.n != 2:
            raise ValueError("tree formula only applies to n = 2")
        cdef const unsigned char *p = key
        cdef int best = 0, dv
        cdef Py_ssize_t off = 0
        cdef int v, a1, cnt, lo, k2
        cdef unsigned char d
        for v in range(2):
            a1 = p[off + 1] - PIV_OFF
            cnt = p[off + 2]
            if cnt == 0:
                off += 3
                continue
            lo = p[off + 3] - PIV_OFF
            dv = 0
            for k2 in range(cnt):
                d = p[off + 4 + k2]
                if self._cfrob[d] != d:
                    dv = a1 - (lo + k2)
                    if dv < 0:
                        dv = 0
                    break
            if dv > best:
                best = dv
            off += 4 + cnt
        return best

    # -- exploration -----------------------------------------------------------

    def explore(self, int radius, cap_chambers, bint want_weyl):
        """Breadth-first ball around the standard chamber.

        Output dict matches the pure kernel field for field; see there.
        """
        if radius < 0:
            raise ValueError("radius must be >= 0")
        cdef int n = self.n
        cdef int s, d
        cdef Py_ssize_t u, head, layer_end, j, cap = cap_chambers
        std = self.standard_chamber_key()
        keys = [std]
        index = {std: 0}
        dist = [0]
        stable = [1 if self.is_rational(std) else 0]
        weyl = [tuple(range(1, n + 1))] if want_weyl else None
        rows = []
        cdef bint truncated = False
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
                        jj = index.get(k)
                        if jj is None:
                            if len(keys) >= cap:
                                truncated = True
                                break
                            jj = len(keys)
                            index[k] = jj
                            keys.append(k)
                            dist.append(d + 1)
                            stable.append(1 if self.is_rational(k) else 0)
                            if want_weyl:
                                weyl.append(_apply_right(weyl[u], s))
                        elif want_weyl and dist[jj] == d + 1:
                            if weyl[jj] != _apply_right(weyl[u], s):
                                raise InvariantViolation(
                                    "Weyl distance is not well defined along the ball"
                                )
                        ids.append(jj)
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
        cdef Py_ssize_t nch = len(keys)
        cdef Py_ssize_t interior = head
        dxf = [-1] * nch
        if not truncated:
            if n == 2:
                for u in range(nch):
                    dxf[u] = self.tree_crossing_distance(keys[u])
            else:
                self._crossing_bfs(dist, stable, rows, interior, radius, dxf)

        blob = b"".join(keys)
        offs = np.zeros(nch + 1, dtype=np.int64)
        cdef Py_ssize_t pos = 0
        for u in range(nch):
            offs[u] = pos
            pos += len(keys[u])
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

    def _crossing_bfs(self, dist, stable, rows, Py_ssize_t interior, int radius, dxf):
        # edges incident to at least one interior chamber are visible; give
        # boundary chambers their interior neighbours as reverse adjacency
        cdef Py_ssize_t u, i
        back = {}
        for u in range(interior):
            for srow in rows[u]:
                for v in srow:
                    if v >= interior and v != u:
                        back.setdefault(v, []).append(u)
        dq = deque()
        for i in range(len(stable)):
            if stable[i]:
                dxf[i] = 0
                dq.append(i)
        while dq:
            uu = dq.popleft()
            du = dxf[uu]
            if uu < interior:
                nbrs = (v for srow in rows[uu] for v in srow)
            else:
                nbrs = iter(back.get(uu, ()))
            for v in nbrs:
                if dxf[v] < 0:
                    dxf[v] = du + 1
                    dq.append(v)
