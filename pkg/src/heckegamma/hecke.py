"""The Iwahori-Hecke algebra of type A_{n-1}~ over the rationals.

Elements are finite rational combinations of the standard basis {e_w},
w in the affine Weyl group, with e_1 the unit.  The defining relations at
parameter q = q0^2:

    (e_s + e_1) * (e_s - q e_1) = 0,
    e_s * e_w = e_{sw}                     if length(sw) > length(w),
    e_s * e_w = q e_{sw} + (q-1) e_w       otherwise,

plus the braid relations of the Coxeter system.  General products expand the
left factor along its deterministic reduced word, so associativity holds by
construction and is cross-checked against a chamber-counting oracle in the
tests.

The panel elements this engine multiplies are the invertible ones attached to
a panel with chamber statistics (minus, plus): (1/plus) (e_s - (minus-1) e_1).
Their inverses swap minus and plus, which is what makes gallery elements
invertible without ever inverting a generic algebra element.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .weyl import AffinePerm, CoxeterSystem

__all__ = [
    "HeckeElem",
    "PanelStats",
    "gallery_element",
    "inverse_of_panel_product",
    "panel_element",
]


class HeckeElem:
    """Immutable element of the Hecke algebra for a fixed (n, q0)."""

    __slots__ = ("ws", "q0", "terms")

    def __init__(
        self,
        ws: CoxeterSystem,
        q0: int,
        terms: Mapping[AffinePerm, Fraction] | Iterable[tuple[AffinePerm, Fraction]] = (),
    ):
        self.ws = ws
        self.q0 = q0
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[AffinePerm, Fraction] = {}
        for w, c in items:
            if w.n != ws.n:
                raise ValueError("basis element from the wrong Weyl group")
            c = Fraction(c)
            if c:
                acc[w] = acc.get(w, Fraction(0)) + c
        self.terms = {w: c for w, c in acc.items() if c}

    # -- constructors --------------------------------------------------------

    @classmethod
    def unit(cls, ws: CoxeterSystem, q0: int) -> "HeckeElem":
        return cls(ws, q0, {ws.identity: Fraction(1)})

    @classmethod
    def basis(cls, ws: CoxeterSystem, q0: int, w: AffinePerm) -> "HeckeElem":
        return cls(ws, q0, {w: Fraction(1)})

    @classmethod
    def gen(cls, ws: CoxeterSystem, q0: int, i: int) -> "HeckeElem":
        return cls.basis(ws, q0, ws.apply_gen(ws.identity, i))

    @classmethod
    def zero(cls, ws: CoxeterSystem, q0: int) -> "HeckeElem":
        return cls(ws, q0)

    # -- linear structure ----------------------------------------------------

    def _check(self, other: "HeckeElem") -> None:
        if self.ws is not other.ws or self.q0 != other.q0:
            raise ValueError("elements of different Hecke algebras")

    def __add__(self, other: "HeckeElem") -> "HeckeElem":
        self._check(other)
        acc = dict(self.terms)
        for w, c in other.terms.items():
            acc[w] = acc.get(w, Fraction(0)) + c
        return HeckeElem(self.ws, self.q0, acc)

    def __sub__(self, other: "HeckeElem") -> "HeckeElem":
        return self + other.scale(Fraction(-1))

    def scale(self, c: Fraction | int) -> "HeckeElem":
        c = Fraction(c)
        return HeckeElem(self.ws, self.q0, {w: c * d for w, d in self.terms.items()})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def is_unit(self) -> bool:
        """True iff this is exactly the basis element of the identity."""
        return len(self.terms) == 1 and self.terms.get(self.ws.identity) == 1

    def coeff(self, w: AffinePerm) -> Fraction:
        return self.terms.get(w, Fraction(0))

    # -- multiplication ------------------------------------------------------

    def _gen_mul_left(self, i: int) -> "HeckeElem":
        """e_{s_i} * self via the length rule."""
        ws = self.ws
        q = Fraction(self.q0 * self.q0)
        acc: dict[AffinePerm, Fraction] = {}
        for w, c in self.terms.items():
            sw = ws.apply_gen(w, i, side="left")
            if ws.is_left_descent(w, i):
                # length decreases: e_s e_w = q e_{sw} + (q-1) e_w
                acc[sw] = acc.get(sw, Fraction(0)) + q * c
                acc[w] = acc.get(w, Fraction(0)) + (q - 1) * c
            else:
                acc[sw] = acc.get(sw, Fraction(0)) + c
        return HeckeElem(ws, self.q0, acc)

    def __mul__(self, other: "HeckeElem") -> "HeckeElem":
        self._check(other)
        ws = self.ws
        out = HeckeElem.zero(ws, self.q0)
        for w, c in self.terms.items():
            acc = other
            for i in reversed(ws.reduced_word(w)):
                acc = acc._gen_mul_left(i)
            out = out + acc.scale(c)
        return out

    def anti_involution(self) -> "HeckeElem":
        """The linear anti-automorphism e_w -> e_{w^{-1}}."""
        ws = self.ws
        return HeckeElem(ws, self.q0, {ws.inverse(w): c for w, c in self.terms.items()})

    # -- comparison / io -----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HeckeElem):
            return NotImplemented
        return self.ws.n == other.ws.n and self.q0 == other.q0 and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ws.n, self.q0, self.key()))

    def key(self) -> tuple:
        """Canonical hashable form: terms sorted by window."""
        return tuple(sorted((w.window, c) for w, c in self.terms.items()))

    def json_obj(self) -> list[dict]:
        return [
            {"window": list(win), "coeff": str(c)}
            for win, c in self.key()
        ]

    def __repr__(self) -> str:
        if not self.terms:
            return "HeckeElem(0)"
        parts = [f"{c}*e{list(win)}" for win, c in self.key()]
        return "HeckeElem(" + " + ".join(parts) + ")"


@dataclass(frozen=True)
class PanelStats:
    """Chamber statistics of a panel D at crossing distance d.

    ``minus`` chambers of the panel sit at distance d from the fixed
    subbuilding and ``plus`` chambers at distance d+1; ``gen`` is the panel
    type (the Coxeter generator it realizes).  Only two splits can occur:
    (q0+1, q0^2-q0) and (1, q0^2).
    """

    gen: int
    minus: int
    plus: int
    dist: int

    def validate(self, q0: int) -> None:
        allowed = {(q0 + 1, q0 * q0 - q0), (1, q0 * q0)}
        if (self.minus, self.plus) not in allowed:
            raise ValueError(
                f"panel split {(self.minus, self.plus)} not in {sorted(allowed)}"
            )
        if self.minus + self.plus != q0 * q0 + 1:
            raise ValueError("panel statistics do not sum to q+1")


def panel_element(ws: CoxeterSystem, q0: int, stats: PanelStats) -> HeckeElem:
    """The invertible element (1/plus) (e_s - (minus-1) e_1) of a panel."""
    stats.validate(q0)
    s = HeckeElem.gen(ws, q0, stats.gen)
    unit = HeckeElem.unit(ws, q0)
    return (s - unit.scale(stats.minus - 1)).scale(Fraction(1, stats.plus))


def _panel_inverse(ws: CoxeterSystem, q0: int, stats: PanelStats) -> HeckeElem:
    # ((1/a)(e_s-(b-1)))^{-1} = (1/b)(e_s-(a-1)) whenever a+b = q+1
    swapped = PanelStats(gen=stats.gen, minus=stats.plus, plus=stats.minus, dist=stats.dist)
    s = HeckeElem.gen(ws, q0, stats.gen)
    unit = HeckeElem.unit(ws, q0)
    return (s - unit.scale(swapped.minus - 1)).scale(Fraction(1, swapped.plus))


def gallery_element(ws: CoxeterSystem, q0: int, stats_seq: Sequence[PanelStats]) -> HeckeElem:
    """Product of panel elements along a gallery, last panel leftmost.

    The empty gallery gives the unit.
    """
    out = HeckeElem.unit(ws, q0)
    for stats in stats_seq:  # gallery order; left-multiply so the last ends leftmost
        out = panel_element(ws, q0, stats) * out
    return out


def inverse_of_panel_product(
    ws: CoxeterSystem, q0: int, stats_seq: Sequence[PanelStats]
) -> HeckeElem:
    """Inverse of ``gallery_element(stats_seq)`` as a closed-form product."""
    out = HeckeElem.unit(ws, q0)
    for stats in stats_seq:  # reversed factor order relative to gallery_element
        out = out * _panel_inverse(ws, q0, stats)
    return out
