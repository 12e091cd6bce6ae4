"""The Bruhat-Tits building of SL(n) over k((t)), k = GF(q0^2), with the
digitwise Frobenius action and exploration of balls around the standard
chamber.

Chambers are canonical byte keys produced by the kernel; this module wraps
them in friendly objects and exposes the explored ball as a ChamberGraph
carrying distances, panel membership, Frobenius data, and censuses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ._kernel import default_backend_name, make_kernel
from ._kernel_py import PIV_OFF
from .errors import InvariantViolation, RegionError
from .hecke import PanelStats
from .scalars import GF, LaurentScalar
from .weyl import AffinePerm, CoxeterSystem

__all__ = ["Building", "Chamber", "ChamberGraph", "Vertex", "default_precision"]


def default_precision(radius: int, n: int) -> int:
    """Digits kept by unit-series inversion; ample for the given ball."""
    return 4 * radius + 2 * n + 8


class Building:
    """A session: fixed n, q0, and working precision policy."""

    def __init__(self, n: int, q0: int, precision: int | None = None, backend: str | None = None):
        self.n = n
        self.q0 = q0
        self.gf = GF(q0)
        self.q = self.gf.q
        self.precision = precision
        self.backend = backend
        self.ws = CoxeterSystem(n)
        self._kernels: dict[int, object] = {}

    def _prec_for_radius(self, radius: int) -> int:
        if self.precision is not None:
            return self.precision
        return default_precision(radius, self.n)

    def _prec_for_key(self, key: bytes) -> int:
        if self.precision is not None:
            return self.precision
        spread = max((abs(b - PIV_OFF) for b in key), default=0)
        return default_precision(spread + 1, self.n)

    def kernel(self, prec: int):
        k = self._kernels.get(prec)
        if k is None:
            k = make_kernel(self.n, self.q0, prec, self.backend)
            self._kernels[prec] = k
        return k

    @property
    def backend_name(self) -> str:
        return self.backend or default_backend_name()

    # -- chamber-level operations -------------------------------------------

    def standard_chamber(self) -> "Chamber":
        return Chamber(self, self.kernel(16).standard_chamber_key())

    def chamber(self, key: bytes) -> "Chamber":
        self.kernel(self._prec_for_key(key)).vertex_spans(key)  # validates
        return Chamber(self, key)

    def panel_neighbors(self, chamber: "Chamber", s: int) -> list["Chamber"]:
        """All q+1 chambers of the type-s panel, sorted by key."""
        kern = self.kernel(self._prec_for_key(chamber.key))
        return [Chamber(self, k) for k in kern.neighbors(chamber.key, s)]

    def theta(self, chamber: "Chamber") -> "Chamber":
        """The Frobenius twist; canonical keys map by digitwise Frobenius."""
        return Chamber(self, self.kernel(16).theta(chamber.key))

    def is_rational(self, chamber: "Chamber") -> bool:
        return self.kernel(16).is_rational(chamber.key)

    def explore(
        self,
        radius: int,
        cap_chambers: int = 5_000_000,
        want_weyl: bool = False,
    ) -> "ChamberGraph":
        kern = self.kernel(self._prec_for_radius(radius))
        data = kern.explore(radius, cap_chambers, want_weyl)
        return ChamberGraph(self, data)


class Chamber:
    """A chamber, owned by a Building, identified by its canonical key."""

    __slots__ = ("building", "key")

    def __init__(self, building: Building, key: bytes):
        self.building = building
        self.key = key

    def vertices(self) -> list["Vertex"]:
        b = self.building
        kern = b.kernel(16)
        return [
            Vertex(b, self.key[s:e], typ)
            for typ, (s, e) in enumerate(kern.vertex_spans(self.key))
        ]

    def json_obj(self) -> dict:
        return {
            "key": self.key.hex(),
            "vertices": [v.json_obj() for v in self.vertices()],
        }

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Chamber)
            and self.building.n == other.building.n
            and self.building.q0 == other.building.q0
            and self.key == other.key
        )

    def __hash__(self) -> int:
        return hash((self.building.n, self.building.q0, self.key))

    def __repr__(self) -> str:
        return f"Chamber({self.key.hex()})"


class Vertex:
    """A vertex: homothety class of lattices, canonical triangular basis."""

    __slots__ = ("building", "key", "type")

    def __init__(self, building: Building, key: bytes, typ: int):
        self.building = building
        self.key = key
        self.type = typ

    def pivots(self) -> tuple[int, ...]:
        n = self.building.n
        return tuple(self.key[i] - PIV_OFF for i in range(n))

    def matrix(self) -> list[list[LaurentScalar]]:
        """The canonical lattice basis, columns spanning the lattice."""
        n = self.building.n
        gf = self.building.gf
        piv = self.pivots()
        rows = [
            [LaurentScalar.zero(gf) for _ in range(n)] for _ in range(n)
        ]
        for i in range(n):
            rows[i][i] = LaurentScalar.uniformizer(gf, piv[i])
        off = n
        for i in range(1, n):
            for j in range(i):
                cnt = self.key[off]
                off += 1
                if cnt:
                    lo = self.key[off] - PIV_OFF
                    ds = list(self.key[off + 1 : off + 1 + cnt])
                    off += 1 + cnt
                    rows[i][j] = LaurentScalar(gf, lo, ds)
        return rows

    def json_obj(self) -> dict:
        mat = self.matrix()
        entries = {}
        for i in range(1, self.building.n):
            for j in range(i):
                if not mat[i][j].is_zero:
                    entries[f"{i},{j}"] = mat[i][j].json_obj()
        return {
            "type": self.type,
            "pivots": list(self.pivots()),
            "entries": entries,
        }

    def __repr__(self) -> str:
        return f"Vertex(type={self.type}, pivots={self.pivots()})"


@dataclass
class PanelCensus:
    """Split histogram over all certified panels of an explored ball."""

    certified_panels: int
    skipped_panels: int
    fixed_splits: dict[tuple[int, int], int]
    crossing_splits: dict[tuple[int, int], int]
    violations: list[dict]

    def json_obj(self) -> dict:
        def _h(d):
            return {f"{m},{p}": c for (m, p), c in sorted(d.items())}

        return {
            "certified_panels": self.certified_panels,
            "skipped_panels": self.skipped_panels,
            "fixed_splits": _h(self.fixed_splits),
            "crossing_splits": _h(self.crossing_splits),
            "violations": self.violations,
        }


class ChamberGraph:
    """An explored ball: keys, distances, panel membership, Frobenius data.

    Chamber ids are discovery order of the breadth-first exploration, which
    both kernels reproduce exactly.  Ids below ``interior_count`` have their
    panel membership rows available; those are exactly the chambers at
    gallery distance < radius.
    """

    def __init__(self, building: Building, data: dict):
        self.building = building
        self.radius = data["radius"]
        self._blob = data["keys_blob"]
        self._offs = data["key_offsets"]
        self.dist_base = data["dist_base"]
        self.dist_xf = data["dist_xf"]
        self.stable = data["stable"]
        self._members = data["members"]
        self.weyl = data["weyl"]
        self.interior_count = data["interior_count"]
        self.truncated = data["truncated"]
        self._index = data.get("index")
        n = building.n
        if self.truncated:
            self.certified = np.zeros(len(self.dist_base), dtype=bool)
        elif n == 2:
            self.certified = np.ones(len(self.dist_base), dtype=bool)
        else:
            self.certified = (self.dist_xf >= 0) & (
                self.dist_base.astype(np.int64) + self.dist_xf <= self.radius
            )

    def __len__(self) -> int:
        return len(self.dist_base)

    # -- chamber access -------------------------------------------------------

    def key(self, i: int) -> bytes:
        return self._blob[self._offs[i] : self._offs[i + 1]]

    def chamber(self, i: int) -> Chamber:
        return Chamber(self.building, self.key(i))

    def index_of(self, key: bytes) -> int:
        if self._index is None:
            self._index = {self.key(i): i for i in range(len(self))}
        j = self._index.get(key)
        if j is None:
            raise KeyError("chamber not in the explored ball")
        return j

    def iter_ids(self) -> Iterator[int]:
        return iter(range(len(self)))

    def is_interior(self, i: int) -> bool:
        return i < self.interior_count

    def members(self, i: int, s: int) -> tuple[int, ...]:
        """Ids of the q+1 chambers of the type-s panel of chamber i."""
        if i >= self.interior_count:
            raise RegionError(
                f"chamber {i} sits on the ball boundary; its panels are incomplete"
            )
        return tuple(int(x) for x in self._members[i, s])

    def theta_index(self, i: int) -> int:
        kern = self.building.kernel(16)
        return self.index_of(kern.theta(self.key(i)))

    def weyl_to_base(self, i: int) -> AffinePerm:
        if self.weyl is None:
            raise ValueError("ball was explored without Weyl windows")
        return AffinePerm(tuple(int(x) for x in self.weyl[i]))

    # -- panels ----------------------------------------------------------------

    def panel_stats(self, i: int, s: int) -> PanelStats:
        """Exact (minus, plus) split of the type-s panel of chamber i.

        Requires every panel chamber certified; raises InvariantViolation if
        the split breaks the two-value law.
        """
        ids = self.members(i, s)
        if not all(self.certified[j] for j in ids):
            raise RegionError(
                f"panel ({i},{s}) touches uncertified chambers; grow the radius"
            )
        dists = [int(self.dist_xf[j]) for j in ids]
        d = min(dists)
        minus = sum(1 for x in dists if x == d)
        plus = sum(1 for x in dists if x == d + 1)
        if minus + plus != len(ids):
            raise InvariantViolation(
                f"panel ({i},{s}) spans distances beyond d and d+1: {sorted(dists)}"
            )
        stats = PanelStats(gen=s, minus=minus, plus=plus, dist=d)
        try:
            stats.validate(self.building.q0)
        except ValueError as exc:
            raise InvariantViolation(str(exc)) from exc
        return stats

    def panel_census(self) -> PanelCensus:
        """Histogram of panel splits over every certified panel, with any
        law violations collected rather than raised."""
        q0 = self.building.q0
        n = self.building.n
        fixed: dict[tuple[int, int], int] = {}
        crossing: dict[tuple[int, int], int] = {}
        violations: list[dict] = []
        seen = 0
        skipped = 0
        allowed = {(q0 + 1, q0 * q0 - q0), (1, q0 * q0)}
        for i in range(self.interior_count):
            for s in range(n):
                ids = self._members[i, s]
                if int(ids.min()) != i:
                    continue  # each panel is counted at its smallest member
                if not all(self.certified[j] for j in ids):
                    skipped += 1
                    continue
                seen += 1
                dists = [int(self.dist_xf[j]) for j in ids]
                d = min(dists)
                minus = sum(1 for x in dists if x == d)
                plus = sum(1 for x in dists if x == d + 1)
                rec = None
                if minus + plus != len(ids):
                    rec = "panel distances span more than two values"
                elif (minus, plus) not in allowed:
                    rec = "split outside the two admissible values"
                elif d == 0 and (minus, plus) != (q0 + 1, q0 * q0 - q0):
                    rec = "fixed panel with the non-fixed split"
                if rec is not None:
                    violations.append(
                        {
                            "chamber": self.key(i).hex(),
                            "panel_type": s,
                            "dist": d,
                            "split": [minus, plus],
                            "reason": rec,
                        }
                    )
                    continue
                target = fixed if d == 0 else crossing
                target[(minus, plus)] = target.get((minus, plus), 0) + 1
        return PanelCensus(seen, skipped, fixed, crossing, violations)

    # -- Weyl distances ----------------------------------------------------------

    def windows_from(self, src: int, max_depth: int) -> dict[int, AffinePerm]:
        """Weyl windows delta(src, .) for chambers within max_depth of src.

        Every chamber expanded on the way must be interior; otherwise the
        ball cannot certify the answer and RegionError is raised.
        """
        ws = self.building.ws
        out = {src: ws.identity}
        depth = {src: 0}
        frontier = [src]
        for _d in range(max_depth):
            nxt = []
            for u in frontier:
                if not self.is_interior(u):
                    raise RegionError(
                        "Weyl window walk hit the ball boundary; grow the radius"
                    )
                du = depth[u]
                wu = out[u]
                for s in range(self.building.n):
                    for v in self.members(u, s):
                        if v == u:
                            continue
                        if v not in depth:
                            depth[v] = du + 1
                            out[v] = ws.apply_gen(wu, s, side="right")
                            nxt.append(v)
            frontier = nxt
            if not frontier:
                break
        return out

    def weyl_distance(self, i: int, j: int) -> AffinePerm:
        """delta(C_i, C_j) along any minimal in-ball gallery."""
        ws = self.building.ws
        out = {i: ws.identity}
        frontier = [i]
        while frontier:
            if j in out:
                return out[j]
            nxt = []
            for u in frontier:
                if not self.is_interior(u):
                    continue
                wu = out[u]
                for s in range(self.building.n):
                    for v in self.members(u, s):
                        if v != u and v not in out:
                            out[v] = ws.apply_gen(wu, s, side="right")
                            nxt.append(v)
            frontier = nxt
        if j in out:
            return out[j]
        raise RegionError("no in-ball gallery connects the chambers")

    # -- summaries -----------------------------------------------------------------

    def census(self) -> dict:
        by_base = np.bincount(self.dist_base, minlength=self.radius + 1)
        cert = self.certified
        dxf = self.dist_xf[cert]
        by_xf = np.bincount(dxf, minlength=1) if len(dxf) else np.zeros(1, dtype=int)
        return {
            "chambers": int(len(self)),
            "interior_chambers": int(self.interior_count),
            "by_dist_base": [int(x) for x in by_base],
            "by_dist_xf_certified": [int(x) for x in by_xf],
            "stable_chambers": int(self.stable.sum()),
            "certified_chambers": int(cert.sum()),
            "uncertified_chambers": int((~cert).sum()),
            "truncated": bool(self.truncated),
        }
