"""Admissible galleries: minimal galleries from the Frobenius-fixed
subbuilding to a chamber, seen as a layered DAG graded by crossing distance.

A chamber C at crossing distance d is reached by galleries C_0, ..., C_d = C
with C_0 fixed and dist(C_i) = i.  Predecessor edges carry the panel type
crossed; the step signature is (panel type, minus-count of the panel), which
is exactly what the panel's Hecke element depends on.  Signature sets are
computed bottom-up, so a chamber's gallery diversity is known without
materializing every gallery.
"""

from __future__ import annotations

from dataclasses import dataclass

from .building import ChamberGraph
from .errors import InvariantViolation, RegionError
from .hecke import HeckeElem, PanelStats, gallery_element, inverse_of_panel_product

__all__ = ["Gallery", "GalleryDag", "build_dag"]

Sig = tuple[tuple[int, int], ...]  # ((panel type, minus), ...) in gallery order


@dataclass(frozen=True)
class Gallery:
    """A concrete admissible gallery: chamber ids and crossed panel types.

    ``ids[0]`` is Frobenius-fixed, ``ids[-1]`` the terminal; ``types[i]`` is
    the panel crossed between ids[i] and ids[i+1].
    """

    ids: tuple[int, ...]
    types: tuple[int, ...]

    def __post_init__(self):
        if len(self.ids) != len(self.types) + 1:
            raise ValueError("gallery shape mismatch")

    @property
    def length(self) -> int:
        return len(self.types)

    def json_obj(self, graph: ChamberGraph, sig: Sig | None = None) -> dict:
        obj = {
            "chambers": [graph.key(i).hex() for i in self.ids],
            "panel_types": list(self.types),
        }
        if sig is not None:
            obj["panel_minus"] = [m for (_s, m) in sig]
        return obj


class GalleryDag:
    """Predecessor structure of admissible galleries over an explored ball.

    Only the backward closure of the requested terminals is materialized.
    A chamber is *gallery-complete* when its full predecessor cone is inside
    the certified region with every step panel's split exactly determined;
    signature sets are only trusted for gallery-complete chambers.
    """

    def __init__(self, graph: ChamberGraph, cap_sigs: int = 10_000):
        self.graph = graph
        self.cap_sigs = cap_sigs
        self.truncated = False
        self._preds: dict[int, tuple[tuple[int, int], ...]] = {}
        self._minus: dict[tuple[int, int], int | None] = {}
        self._gc: dict[int, bool] = {}
        self._sigs: dict[int, tuple[Sig, ...]] = {}
        self._sig_intern: dict[Sig, Sig] = {}

    # -- structure ------------------------------------------------------------

    def preds(self, c: int) -> tuple[tuple[int, int], ...]:
        """Predecessor edges (chamber id, panel type), sorted by chamber key.

        Predecessors are the panel mates one crossing step closer to the
        fixed subbuilding.
        """
        cached = self._preds.get(c)
        if cached is not None:
            return cached
        g = self.graph
        level = int(g.dist_xf[c])
        if level <= 0:
            out: tuple[tuple[int, int], ...] = ()
        else:
            found: dict[int, int] = {}
            for s in range(g.building.n):
                for m in g.members(c, s):
                    if m != c and int(g.dist_xf[m]) == level - 1:
                        if m in found:
                            raise InvariantViolation(
                                "two distinct panels join the same chamber pair"
                            )
                        found[m] = s
            out = tuple(
                (m, found[m]) for m in sorted(found, key=lambda i: g.key(i))
            )
        self._preds[c] = out
        return out

    def step_minus(self, p: int, c: int, s: int) -> int | None:
        """Minus-count of the panel crossed from p to c, or None if the ball
        cannot determine it exactly.

        Uses full certification when available, else the two sound
        determinations implied by the split law: at least two certified
        closer chambers force the split (q0+1, q0^2-q0), and a fully
        certified complement forces (1, q0^2).
        """
        key = (c, s)
        if key in self._minus:
            return self._minus[key]
        g = self.graph
        q0 = g.building.q0
        d = int(g.dist_xf[p])
        if not (g.certified[p] and g.certified[c] and int(g.dist_xf[c]) == d + 1):
            raise ValueError("step_minus needs a certified crossing edge")
        ids = g.members(c, s)
        low = high = unknown = 0
        for j in ids:
            if g.certified[j]:
                dj = int(g.dist_xf[j])
                if dj == d:
                    low += 1
                elif dj == d + 1:
                    high += 1
                else:
                    raise InvariantViolation(
                        f"panel ({c},{s}) spans distances {d}..{dj}"
                    )
            else:
                unknown += 1
        minus: int | None
        if unknown == 0:
            minus = low
        elif low >= 2:
            minus = q0 + 1  # the split law leaves only (q0+1, q0^2-q0)
        else:
            minus = None
        if minus is not None and minus not in (1, q0 + 1):
            raise InvariantViolation(
                f"panel ({c},{s}) has minus-count {minus}, law allows 1 or {q0 + 1}"
            )
        self._minus[key] = minus
        return minus

    def gallery_complete(self, c: int) -> bool:
        """True when every admissible gallery to c is visible and exact."""
        cached = self._gc.get(c)
        if cached is not None:
            return cached
        g = self.graph
        # iterative dependency walk; the DAG is graded so this terminates
        stack = [c]
        while stack:
            x = stack[-1]
            if x in self._gc:
                stack.pop()
                continue
            if not g.certified[x]:
                self._gc[x] = False
                stack.pop()
                continue
            level = int(g.dist_xf[x])
            if level == 0:
                self._gc[x] = True
                stack.pop()
                continue
            if not g.is_interior(x):
                self._gc[x] = False
                stack.pop()
                continue
            ps = self.preds(x)
            if not ps:
                raise InvariantViolation(
                    f"chamber {x} at crossing distance {level} has no predecessor"
                )
            missing = [p for (p, _s) in ps if p not in self._gc]
            if missing:
                stack.extend(missing)
                continue
            ok = all(self._gc[p] for (p, _s) in ps) and all(
                self.step_minus(p, x, s) is not None for (p, s) in ps
            )
            self._gc[x] = ok
            stack.pop()
        return self._gc[c]

    # -- signatures -------------------------------------------------------------

    def signatures(self, c: int) -> tuple[Sig, ...]:
        """All step-signature sequences of admissible galleries to c, sorted.

        Requires gallery completeness.  Capped at ``cap_sigs`` per chamber;
        hitting the cap sets ``self.truncated``.
        """
        cached = self._sigs.get(c)
        if cached is not None:
            return cached
        if not self.gallery_complete(c):
            raise RegionError(f"chamber {c} is not gallery-complete at this radius")
        order = [c]
        seen = {c}
        k = 0
        while k < len(order):
            x = order[k]
            k += 1
            if int(self.graph.dist_xf[x]) > 0:
                for p, _s in self.preds(x):
                    if p not in seen and p not in self._sigs:
                        seen.add(p)
                        order.append(p)
        for x in sorted(order, key=lambda i: int(self.graph.dist_xf[i])):
            if x in self._sigs:
                continue
            if int(self.graph.dist_xf[x]) == 0:
                self._sigs[x] = ((),)
                continue
            acc: set[Sig] = set()
            for p, s in self.preds(x):
                step = (s, self.step_minus(p, x, s))
                for sig in self._sigs[p]:
                    acc.add(sig + (step,))
                    if len(acc) > self.cap_sigs:
                        break
            sigs = sorted(acc)
            if len(sigs) > self.cap_sigs:
                sigs = sigs[: self.cap_sigs]
                self.truncated = True
            self._sigs[x] = tuple(self._sig_intern.setdefault(s, s) for s in sigs)
        return self._sigs[c]

    # -- concrete galleries -------------------------------------------------------

    def reference_gallery(self, c: int) -> Gallery:
        """The enumeration-first gallery: greedy smallest-key predecessor."""
        ids = [c]
        types = []
        x = c
        while int(self.graph.dist_xf[x]) > 0:
            p, s = self.preds(x)[0]
            ids.append(p)
            types.append(s)
            x = p
        return Gallery(tuple(reversed(ids)), tuple(reversed(types)))

    def gallery_with_signature(self, c: int, sig: Sig) -> Gallery:
        """The enumeration-first gallery to c realizing the given signature."""
        ids = [c]
        types = []
        x = c
        rest = sig
        while rest:
            step = rest[-1]
            prefix = rest[:-1]
            for p, s in self.preds(x):
                if (s, self.step_minus(p, x, s)) == step and prefix in self._sigs.get(
                    p, ()
                ):
                    ids.append(p)
                    types.append(s)
                    x = p
                    rest = prefix
                    break
            else:
                raise InvariantViolation("signature not realizable; sig sets corrupt")
        if int(self.graph.dist_xf[x]) != 0:
            raise InvariantViolation("gallery walk did not reach the fixed subbuilding")
        return Gallery(tuple(reversed(ids)), tuple(reversed(types)))

    def signature_of(self, gal: Gallery) -> Sig:
        out = []
        for p, c, s in zip(gal.ids, gal.ids[1:], gal.types):
            m = self.step_minus(p, c, s)
            if m is None:
                raise RegionError("gallery crosses a panel with undetermined split")
            out.append((s, m))
        return tuple(out)

    def enumerate_galleries(self, c: int, cap: int) -> tuple[list[Gallery], bool]:
        """Depth-first gallery enumeration, predecessors in key order.

        Returns (galleries, truncated).  The first gallery is the reference
        gallery.  Genuinely exponential in bad cases, hence the cap.
        """
        if not self.gallery_complete(c):
            raise RegionError(f"chamber {c} is not gallery-complete at this radius")
        out: list[Gallery] = []
        truncated = False

        def walk(x: int, ids: list[int], types: list[int]) -> bool:
            if int(self.graph.dist_xf[x]) == 0:
                out.append(
                    Gallery(tuple(reversed(ids)), tuple(reversed(types)))
                )
                return len(out) < cap
            for p, s in self.preds(x):
                ids.append(p)
                types.append(s)
                alive = walk(p, ids, types)
                ids.pop()
                types.pop()
                if not alive:
                    return False
            return True

        alive = walk(c, [c], [])
        truncated = not alive
        return out, truncated

    # -- Hecke elements -------------------------------------------------------------

    def stats_of_sig(self, sig: Sig) -> list[PanelStats]:
        q = self.graph.building.q
        out = []
        for i, (s, minus) in enumerate(sig):
            out.append(PanelStats(gen=s, minus=minus, plus=q + 1 - minus, dist=i))
        return out

    def hecke_element(self, sig: Sig) -> HeckeElem:
        b = self.graph.building
        return gallery_element(b.ws, b.q0, self.stats_of_sig(sig))

    def hecke_element_inverse(self, sig: Sig) -> HeckeElem:
        b = self.graph.building
        return inverse_of_panel_product(b.ws, b.q0, self.stats_of_sig(sig))


def build_dag(graph: ChamberGraph, cap_sigs: int = 10_000) -> GalleryDag:
    return GalleryDag(graph, cap_sigs=cap_sigs)
