"""Generators of the truncated gallery-quotient group.

Any two admissible galleries G1, G2 sharing a terminal chamber yield a unit
e(G2)^{-1} * e(G1) of the Hecke algebra; these units generate the group.  The
truncation at radius L keeps the terminals whose full gallery cone is visible
and exact inside the explored radius-L ball.  A gallery's unit depends only
on its step signature, so generators are harvested from signature pairs: the
enumeration-first reference signature of each terminal against every other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .building import Building, ChamberGraph
from .galleries import Gallery, GalleryDag, Sig
from .hecke import HeckeElem

__all__ = ["GammaReport", "gamma_generators", "gamma_at_radius"]


@dataclass
class GammaWitness:
    terminal: int
    ref_sig: Sig
    other_sig: Sig
    ref_gallery: Gallery
    other_gallery: Gallery

    def json_obj(self, graph: ChamberGraph) -> dict:
        return {
            "terminal": graph.key(self.terminal).hex(),
            "reference": self.ref_gallery.json_obj(graph, self.ref_sig),
            "other": self.other_gallery.json_obj(graph, self.other_sig),
        }


@dataclass
class GammaReport:
    n: int
    q0: int
    radius: int
    terminals_considered: int = 0
    terminals_skipped: int = 0
    truncated: bool = False
    generators: list[HeckeElem] = field(default_factory=list)
    witnesses: list[GammaWitness] = field(default_factory=list)

    @property
    def status(self) -> str:
        """Triviality of the truncated group, as far as this ball can tell."""
        if self.generators:
            return "nontrivial"
        if self.truncated or self.terminals_skipped:
            return "inconclusive"
        return "trivial"

    def is_trivial_at_radius(self) -> bool | None:
        """True/False when decided; None when the ball is inconclusive."""
        st = self.status
        if st == "trivial":
            return True
        if st == "nontrivial":
            return False
        return None

    def json_obj(self, graph: ChamberGraph | None = None) -> dict:
        obj = {
            "n": self.n,
            "q0": self.q0,
            "radius": self.radius,
            "status": self.status,
            "terminals_considered": self.terminals_considered,
            "terminals_skipped": self.terminals_skipped,
            "truncated": self.truncated,
            "generator_count": len(self.generators),
            "generators": [g.json_obj() for g in self.generators],
        }
        if graph is not None:
            obj["witnesses"] = [w.json_obj(graph) for w in self.witnesses]
        return obj


def gamma_generators(
    graph: ChamberGraph,
    cap_sigs: int = 10_000,
    with_witnesses: bool = True,
    truncation_radius: int | None = None,
) -> GammaReport:
    """Harvest the generators visible in an explored ball.

    Terminals are the certified chambers at crossing distance >= 1 within
    ``truncation_radius`` of the base chamber (the whole ball by default).
    A terminal whose gallery cone crosses a panel the ball cannot split
    exactly is skipped and counted; an empty generator list is conclusive
    only when nothing was skipped or capped.
    """
    b = graph.building
    tr = graph.radius if truncation_radius is None else truncation_radius
    rep = GammaReport(n=b.n, q0=b.q0, radius=tr)
    if graph.truncated:
        rep.truncated = True
        return rep
    dag = GalleryDag(graph, cap_sigs=cap_sigs)

    terminal_ids = [
        int(i)
        for i in np.nonzero(
            graph.certified & (graph.dist_xf >= 1) & (graph.dist_base <= tr)
        )[0]
    ]
    terminal_ids.sort(key=graph.key)

    seen_pairs: set[tuple[Sig, Sig]] = set()
    seen_elems: dict[tuple, HeckeElem] = {}
    witness_for: dict[tuple, GammaWitness] = {}

    for c in terminal_ids:
        rep.terminals_considered += 1
        if not dag.gallery_complete(c):
            rep.terminals_skipped += 1
            continue
        sigs = dag.signatures(c)
        if len(sigs) <= 1:
            continue
        ref = dag.signature_of(dag.reference_gallery(c))
        for sig in sigs:
            if sig == ref:
                continue
            pair = (ref, sig)
            if pair in seen_pairs:
                continue
            seen_pairs.add(pair)
            elem = dag.hecke_element_inverse(ref) * dag.hecke_element(sig)
            if elem.is_unit():
                continue
            k = elem.key()
            if k in seen_elems:
                continue
            seen_elems[k] = elem
            if with_witnesses:
                witness_for[k] = GammaWitness(
                    terminal=c,
                    ref_sig=ref,
                    other_sig=sig,
                    ref_gallery=dag.reference_gallery(c),
                    other_gallery=dag.gallery_with_signature(c, sig),
                )

    rep.truncated = dag.truncated
    for k in sorted(seen_elems):
        rep.generators.append(seen_elems[k])
        if with_witnesses:
            rep.witnesses.append(witness_for[k])
    return rep


def gamma_at_radius(
    building: Building,
    radius: int,
    cap_sigs: int = 10_000,
    cap_chambers: int = 5_000_000,
) -> tuple[GammaReport, ChamberGraph]:
    """Explore enough of the building to settle the radius-L truncation.

    For n = 2 the crossing distance is exact everywhere, so one extra shell
    is explored purely to expose the rim chambers' panel membership; the
    report's truncation radius stays L.
    """
    explore_radius = radius + 1 if building.n == 2 else radius
    graph = building.explore(explore_radius, cap_chambers=cap_chambers)
    rep = gamma_generators(graph, cap_sigs=cap_sigs, truncation_radius=radius)
    return rep, graph
