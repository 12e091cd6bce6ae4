"""Exact engine for Iwahori-Hecke algebras over Bruhat-Tits buildings of
SL(n) on a ramified-free quadratic extension of Laurent-series fields, with
Frobenius actions, gallery combinatorics, and module distinction."""

__version__ = "0.1.0"

from .scalars import GF, EXACT, FieldElem, LaurentScalar, PrecisionError, Rat
from .weyl import AffinePerm, CoxeterSystem
from .hecke import (
    HeckeElem,
    PanelStats,
    gallery_element,
    inverse_of_panel_product,
    panel_element,
)
from .errors import InvariantViolation, RegionError
from .building import Building, Chamber, ChamberGraph, PanelCensus, Vertex
from .galleries import Gallery, GalleryDag, build_dag
from .gamma import GammaReport, GammaWitness, gamma_at_radius, gamma_generators
from .modules import (
    Distinction,
    HModule,
    check_local_relation,
    distinction,
    evaluate,
    evaluate_contragredient,
    gamma_fixed_dim,
    reconstruct_f,
)

__all__ = [
    "GF",
    "EXACT",
    "AffinePerm",
    "Building",
    "Chamber",
    "ChamberGraph",
    "CoxeterSystem",
    "Distinction",
    "FieldElem",
    "Gallery",
    "GalleryDag",
    "GammaReport",
    "GammaWitness",
    "HModule",
    "HeckeElem",
    "InvariantViolation",
    "LaurentScalar",
    "PanelCensus",
    "PanelStats",
    "PrecisionError",
    "Rat",
    "RegionError",
    "Vertex",
    "build_dag",
    "check_local_relation",
    "distinction",
    "evaluate",
    "evaluate_contragredient",
    "gallery_element",
    "gamma_at_radius",
    "gamma_fixed_dim",
    "gamma_generators",
    "inverse_of_panel_product",
    "panel_element",
    "reconstruct_f",
    "__version__",
]
