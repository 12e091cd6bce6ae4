"""Finite-dimensional Hecke modules and the distinction decision.

A module is one exact rational matrix per simple generator, subject to the
quadratic relation (A + 1)(A - q) = 0 and the braid relations.  The
contragredient twists the action by the anti-involution; its fixed space
under the truncated gallery-quotient group decides distinction, and each
fixed vector reconstructs a chamber distribution checked against the local
panel relation.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction

from .building import ChamberGraph
from .errors import RegionError
from .galleries import GalleryDag
from .gamma import GammaReport
from .hecke import HeckeElem, panel_element
from .linalg import Mat, Vec, identity, mat_mul, mat_vec, nullspace, transpose
from .weyl import AffinePerm, CoxeterSystem

__all__ = [
    "HModule",
    "evaluate",
    "evaluate_contragredient",
    "gamma_fixed_dim",
    "distinction",
    "reconstruct_f",
    "check_local_relation",
]


def _mat_from_str(rows: list[list[str]]) -> Mat:
    return [[Fraction(x) for x in row] for row in rows]


def _mat_to_str(mat: Mat) -> list[list[str]]:
    return [[str(x) for x in row] for row in mat]


@dataclass
class HModule:
    """An exact ℋ-module: one dim x dim matrix per simple generator."""

    ws: CoxeterSystem
    q0: int
    mats: dict[int, Mat]

    def __post_init__(self):
        n = self.ws.n
        if sorted(self.mats) != list(range(n)):
            raise ValueError(f"need one matrix per generator 0..{n - 1}")
        m = self.dim
        for i, a in self.mats.items():
            if len(a) != m or any(len(row) != m for row in a):
                raise ValueError("generator matrices must be square, same size")
        self.validate()

    @property
    def dim(self) -> int:
        return len(self.mats[0])

    @property
    def q(self) -> int:
        return self.q0 * self.q0

    def validate(self) -> None:
        """Quadratic relation per generator, braid relation per pair."""
        m = self.dim
        q = Fraction(self.q)
        ident = identity(m)
        zero = [[Fraction(0)] * m for _ in range(m)]
        for i, a in self.mats.items():
            plus = [[a[r][c] + ident[r][c] for c in range(m)] for r in range(m)]
            minus = [[a[r][c] - q * ident[r][c] for c in range(m)] for r in range(m)]
            if mat_mul(plus, minus) != zero:
                raise ValueError(f"generator {i} violates the quadratic relation")
        n = self.ws.n
        for i in range(n):
            for j in range(i + 1, n):
                order = self.ws.braid_order(i, j)
                if order == 0:
                    continue
                a, b = self.mats[i], self.mats[j]
                lhs, rhs = identity(m), identity(m)
                for k in range(order):
                    lhs = mat_mul(lhs, a if k % 2 == 0 else b)
                    rhs = mat_mul(rhs, b if k % 2 == 0 else a)
                if lhs != rhs:
                    raise ValueError(f"generators {i},{j} violate the braid relation")

    # -- constructors ------------------------------------------------------

    @classmethod
    def trivial(cls, ws: CoxeterSystem, q0: int) -> "HModule":
        q = Fraction(q0 * q0)
        return cls(ws, q0, {i: [[q]] for i in range(ws.n)})

    @classmethod
    def sign(cls, ws: CoxeterSystem, q0: int) -> "HModule":
        return cls(ws, q0, {i: [[Fraction(-1)]] for i in range(ws.n)})

    @classmethod
    def random_two_dim(cls, ws: CoxeterSystem, q0: int, seed: int) -> "HModule":
        """A random valid 2-dimensional module; n = 2 only, where the two
        generators face no braid constraint."""
        if ws.n != 2:
            raise ValueError("random 2-dimensional modules are built for n = 2")
        rng = random.Random(seed)
        q = Fraction(q0 * q0)
        mats = {}
        for i in range(2):
            while True:
                p = [[Fraction(rng.randint(-4, 4)) for _ in range(2)] for _ in range(2)]
                det = p[0][0] * p[1][1] - p[0][1] * p[1][0]
                if det:
                    break
            inv = [
                [p[1][1] / det, -p[0][1] / det],
                [-p[1][0] / det, p[0][0] / det],
            ]
            diag = [[q, Fraction(0)], [Fraction(0), Fraction(-1)]]
            mats[i] = mat_mul(mat_mul(p, diag), inv)
        return cls(ws, q0, mats)

    # -- serialization --------------------------------------------------------

    @classmethod
    def from_json_obj(cls, obj: dict) -> "HModule":
        ws = CoxeterSystem(int(obj["n"]))
        mats = {int(k): _mat_from_str(v) for k, v in obj["generators"].items()}
        return cls(ws, int(obj["q0"]), mats)

    @classmethod
    def load(cls, path: str) -> "HModule":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_obj(json.load(fh))

    def json_obj(self) -> dict:
        return {
            "n": self.ws.n,
            "q0": self.q0,
            "dim": self.dim,
            "generators": {str(i): _mat_to_str(a) for i, a in sorted(self.mats.items())},
        }


class _Evaluator:
    """Caches r(e_w) = A_{i1} ... A_{ik} along reduced words."""

    def __init__(self, mod: HModule):
        self.mod = mod
        self._cache: dict[tuple[int, ...], Mat] = {}

    def basis_matrix(self, w: AffinePerm) -> Mat:
        win = w.window
        got = self._cache.get(win)
        if got is None:
            word = self.mod.ws.reduced_word(w)
            got = identity(self.mod.dim)
            for i in word:
                got = mat_mul(got, self.mod.mats[i])
            self._cache[win] = got
        return got

    def __call__(self, h: HeckeElem) -> Mat:
        m = self.mod.dim
        out = [[Fraction(0)] * m for _ in range(m)]
        for w, c in h.terms.items():
            bw = self.basis_matrix(w)
            for r in range(m):
                br = bw[r]
                orow = out[r]
                for j in range(m):
                    if br[j]:
                        orow[j] += c * br[j]
        return out


def evaluate(mod: HModule, h: HeckeElem) -> Mat:
    """r(h) for the module's defining action."""
    return _Evaluator(mod)(h)


def evaluate_contragredient(mod: HModule, h: HeckeElem) -> Mat:
    """r~(h) = r(anti(h))^T, the contragredient action."""
    return transpose(evaluate(mod, h.anti_involution()))


def gamma_fixed_dim(
    mod: HModule, gens: GammaReport | list[HeckeElem]
) -> tuple[int, list[Vec]]:
    """Dimension and canonical basis of the generator-fixed subspace of the
    contragredient module."""
    elems = gens.generators if isinstance(gens, GammaReport) else list(gens)
    m = mod.dim
    rows: Mat = []
    ev = _Evaluator(mod)
    for g in elems:
        mat = transpose(ev(g.anti_involution()))
        for r in range(m):
            row = [mat[r][c] - Fraction(int(r == c)) for c in range(m)]
            if any(row):
                rows.append(row)
    basis = nullspace(rows, cols=m)
    return len(basis), basis


@dataclass
class Distinction:
    """The decision: multiplicity = dim of the Γ-fixed contragredient space."""

    multiplicity: int
    basis: list[Vec]
    status: str  # conclusive-at-radius | upper-bound (truncated group)

    def json_obj(self) -> dict:
        return {
            "multiplicity": self.multiplicity,
            "fixed_basis": [[str(x) for x in v] for v in self.basis],
            "status": self.status,
        }


def distinction(mod: HModule, rep: GammaReport) -> Distinction:
    """Decide distinction against the truncated group.

    A truncated or skipped harvest can only shrink the group, so the
    computed dimension is an upper bound for the untruncated answer; the
    status says whether it is exact at this radius.
    """
    dim, basis = gamma_fixed_dim(mod, rep)
    status = "conclusive-at-radius" if rep.status != "inconclusive" else "upper-bound"
    return Distinction(multiplicity=dim, basis=basis, status=status)


# -- distribution functions ------------------------------------------------------


def reconstruct_f(
    mod: HModule,
    graph: ChamberGraph,
    m_tilde: Vec,
    dag: GalleryDag | None = None,
    chamber_ids: list[int] | None = None,
) -> dict[int, Vec]:
    """Values f(C) = r~(e_G) m~ on every gallery-complete chamber.

    Well-definedness across galleries is asserted edge by edge; a
    disagreement means m~ is not fixed by the truncated group, and is
    reported as ValueError with the offending chamber.
    """
    if dag is None:
        dag = GalleryDag(graph)
    if chamber_ids is None:
        chamber_ids = [
            i
            for i in graph.iter_ids()
            if graph.certified[i] and dag.gallery_complete(i)
        ]
    ev = _Evaluator(mod)
    order = sorted(chamber_ids, key=lambda i: int(graph.dist_xf[i]))
    f: dict[int, Vec] = {}
    for c in order:
        level = int(graph.dist_xf[c])
        if level == 0:
            f[c] = list(m_tilde)
            continue
        value: Vec | None = None
        for p, s in dag.preds(c):
            if p not in f:
                continue
            minus = dag.step_minus(p, c, s)
            stats = dag.stats_of_sig(((s, minus),))[0]
            e_d = panel_element(mod.ws, mod.q0, stats)
            step = transpose(ev(e_d.anti_involution()))
            cand = mat_vec(step, f[p])
            if value is None:
                value = cand
            elif value != cand:
                raise ValueError(
                    f"chamber {c}: galleries disagree; the vector is not "
                    "fixed by the truncated group"
                )
        if value is None:
            raise RegionError(f"chamber {c} has no reconstructed predecessor")
        f[c] = value
    return f


def check_local_relation(
    mod: HModule,
    graph: ChamberGraph,
    f: dict[int, Vec],
) -> list[dict]:
    """Verify r~(e_s) f(C) = sum of f over the other panel chambers.

    Runs on every panel whose members all carry f values; returns the list
    of violations (empty means the distribution law holds on the region).
    """
    ev = _Evaluator(mod)
    ws = mod.ws
    violations = []
    gen_mats = {
        s: transpose(ev(HeckeElem.gen(ws, mod.q0, s).anti_involution()))
        for s in range(ws.n)
    }
    for c in f:
        if not graph.is_interior(c):
            continue
        for s in range(ws.n):
            ids = graph.members(c, s)
            if any(j not in f for j in ids):
                continue
            lhs = mat_vec(gen_mats[s], f[c])
            rhs = [Fraction(0)] * mod.dim
            for j in ids:
                if j != c:
                    rhs = [a + b for a, b in zip(rhs, f[j])]
            if lhs != rhs:
                violations.append(
                    {
                        "chamber": graph.key(c).hex(),
                        "panel_type": s,
                        "lhs": [str(x) for x in lhs],
                        "rhs": [str(x) for x in rhs],
                    }
                )
    return violations
