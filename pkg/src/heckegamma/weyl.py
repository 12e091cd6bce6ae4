"""The affine Weyl group of type A_{n-1}~ as affine permutations.

An affine permutation is a bijection w of the integers with
w(i + n) = w(i) + n and sum_{i=1}^{n} (w(i) - i) = 0; it is stored by its
window (w(1), ..., w(n)).  The Coxeter generators s_0, ..., s_{n-1} act by
swapping the congruence classes i and i+1 mod n.  For n = 2 the group is
infinite dihedral; for n >= 3 consecutive generators (cyclically) braid with
m = 3 and all other pairs commute.

>>> W = CoxeterSystem(3)
>>> w = W.from_word([0, 1, 0])
>>> W.length(w) == 3 and W.reduced_word(w) == (0, 1, 0)
True
"""

from __future__ import annotations

from typing import Iterable, Sequence

__all__ = ["AffinePerm", "CoxeterSystem"]


class AffinePerm:
    """Immutable affine permutation, identified by its window."""

    __slots__ = ("n", "window")

    def __init__(self, window: Sequence[int]):
        win = tuple(window)
        n = len(win)
        if n < 2:
            raise ValueError("need n >= 2")
        if sum(win) != n * (n + 1) // 2:
            raise ValueError(f"window {win} does not sum to {n*(n+1)//2}")
        if len({v % n for v in win}) != n:
            raise ValueError(f"window {win} is not a system of residues mod {n}")
        self.n = n
        self.window = win

    def __call__(self, i: int) -> int:
        base = (i - 1) % self.n
        return self.window[base] + (i - 1 - base)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AffinePerm)
            and self.n == other.n
            and self.window == other.window
        )

    def __hash__(self) -> int:
        return hash(self.window)

    def __repr__(self) -> str:
        return f"AffinePerm{self.window}"


class CoxeterSystem:
    """Type A_{n-1}~ Coxeter system with generators indexed by Z/n."""

    _cache: dict[int, "CoxeterSystem"] = {}

    def __new__(cls, n: int) -> "CoxeterSystem":
        if n in cls._cache:
            return cls._cache[n]
        if n < 2:
            raise ValueError("need n >= 2")
        self = super().__new__(cls)
        self.n = n
        self.identity = AffinePerm(range(1, n + 1))
        cls._cache[n] = self
        return self

    @property
    def generators(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    def braid_order(self, i: int, j: int) -> int:
        """Coxeter exponent m(s_i, s_j); 0 stands for infinity (n = 2)."""
        if i == j:
            return 1
        n = self.n
        if n == 2:
            return 0
        return 3 if (i - j) % n in (1, n - 1) else 2

    # -- group operations ----------------------------------------------------

    def apply_gen(self, w: AffinePerm, i: int, side: str = "right") -> AffinePerm:
        """s_i * w (side="left") or w * s_i (side="right")."""
        n = self.n
        if not 0 <= i < n:
            raise ValueError(f"generator index {i} out of range")
        win = list(w.window)
        if side == "right":
            # permute positions: w*s_i sends x to w(s_i(x))
            if i == 0:
                win[0], win[n - 1] = w.window[n - 1] - n, w.window[0] + n
            else:
                win[i - 1], win[i] = w.window[i], w.window[i - 1]
        elif side == "left":
            # permute values: s_i*w sends x to s_i(w(x))
            for k, v in enumerate(win):
                r = v % n
                if r == i % n:
                    win[k] = v + 1
                elif r == (i + 1) % n:
                    win[k] = v - 1
        else:
            raise ValueError("side must be 'left' or 'right'")
        return AffinePerm(win)

    def mul(self, a: AffinePerm, b: AffinePerm) -> AffinePerm:
        """Composition a*b, acting as (a*b)(x) = a(b(x))."""
        return AffinePerm([a(b(i)) for i in range(1, self.n + 1)])

    def inverse(self, w: AffinePerm) -> AffinePerm:
        # w(i) = v forces w^{-1}(v) = i; shift each value into the window
        n = self.n
        win = [0] * n
        for i in range(1, n + 1):
            v = w.window[i - 1]
            base = (v - 1) % n
            shift = (v - 1 - base) // n
            win[base] = i - n * shift
        return AffinePerm(win)

    def length(self, w: AffinePerm) -> int:
        """Coxeter length: the number of affine inversions.

        Counts pairs i < j (i in the window, j ranging over all integers)
        with w(i) > w(j).
        """
        n = self.n
        ell = 0
        for i in range(1, n + 1):
            wi = w.window[i - 1]
            for j0 in range(1, n + 1):
                wj = w.window[j0 - 1]
                # j = j0 + k*n > i  and  w(j) = wj + k*n < wi
                kmin = (i - j0) // n + 1
                kmax = -((wj - wi) // n) - 1  # k <= ceil((wi-wj)/n) - 1
                if kmax >= kmin:
                    ell += kmax - kmin + 1
        return ell

    def is_right_descent(self, w: AffinePerm, i: int) -> bool:
        """True when length(w * s_i) < length(w), i.e. w(i) > w(i+1)."""
        if i == 0:
            return w.window[self.n - 1] - self.n > w.window[0]
        return w.window[i - 1] > w.window[i]

    def is_left_descent(self, w: AffinePerm, i: int) -> bool:
        """True when length(s_i * w) < length(w)."""
        # s_i*w has a descent at i iff w^{-1}(i) > w^{-1}(i+1); read it off
        # from the positions of the residues i, i+1 mod n among all integers.
        n = self.n
        pos_i = pos_i1 = None
        for k in range(1, n + 1):
            v = w.window[k - 1]
            r = v % n
            if r == i % n:
                pos_i = k + (i - v)  # w(pos_i) = i modulo translation
            if r == (i + 1) % n:
                pos_i1 = k + (i + 1 - v)
        assert pos_i is not None and pos_i1 is not None
        return pos_i > pos_i1

    def descents(self, w: AffinePerm, side: str = "right") -> tuple[int, ...]:
        test = self.is_right_descent if side == "right" else self.is_left_descent
        return tuple(i for i in range(self.n) if test(w, i))

    def reduced_word(self, w: AffinePerm) -> tuple[int, ...]:
        """Deterministic reduced word: peel the smallest left descent.

        Returns (i_1, ..., i_k) with w = s_{i_1} * ... * s_{i_k}.
        """
        word = []
        u = w
        while u != self.identity:
            ds = self.descents(u, side="left")
            if not ds:
                raise AssertionError("non-identity element without left descent")
            i = ds[0]
            word.append(i)
            u = self.apply_gen(u, i, side="left")
        return tuple(word)

    def from_word(self, word: Iterable[int]) -> AffinePerm:
        u = self.identity
        for i in word:
            u = self.apply_gen(u, i, side="right")
        return u

    def elements_of_length_upto(self, bound: int) -> list[AffinePerm]:
        """All group elements of length <= bound, by breadth-first products."""
        seen = {self.identity}
        frontier = [self.identity]
        out = [self.identity]
        for _ in range(bound):
            nxt = []
            for u in frontier:
                for i in range(self.n):
                    v = self.apply_gen(u, i, side="right")
                    if v not in seen:
                        seen.add(v)
                        nxt.append(v)
            frontier = sorted(nxt, key=lambda x: x.window)
            out.extend(frontier)
        return out
