"""Exact scalar arithmetic: residue fields GF(q0^2), truncated Laurent series.

The residue field k = GF(q) with q = q0^2 is presented as GF(p)[x]/(f) for a
fixed monic irreducible f (the lexicographically first one, so the tables are
reproducible).  Elements are digit vectors over the prime field, packed into
integer codes in base p; all arithmetic goes through precomputed tables, which
is cheap because q <= 25.

Laurent scalars are truncated series sum_i c_i t^i over k.  A scalar knows its
digits on the window [valuation, valuation + len(digits)) and that every digit
up to ``known_upto`` is accounted for; ``known_upto = EXACT`` means the value
is an exact finite sum.  Addition and multiplication propagate the windows;
only inversion of a unit series truncates, so exactness is lost in one place.

>>> F = GF(3)
>>> g = F.elem(F.generator)
>>> (g * g.frobenius()).code == F.norm_codes[g.code]
True
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "EXACT",
    "GF",
    "FieldElem",
    "LaurentScalar",
    "Rat",
    "rat_from_str",
    "rat_to_str",
]

Rat = Fraction

# sentinel for "every digit is accounted for"; large enough that window
# arithmetic never wraps for any radius this engine can reach
EXACT = 1 << 30

# per q0: (prime p, coefficients of the irreducible f from the constant term
# up, leading 1 omitted).  Each f is the lexicographically first monic
# irreducible of its degree over GF(p).
_MODULI = {
    2: (2, (1, 1)),  # x^2 + x + 1
    3: (3, (1, 0)),  # x^2 + 1
    4: (2, (1, 1, 0, 0)),  # x^4 + x + 1, GF(16) built straight over GF(2)
    5: (5, (2, 0)),  # x^2 + 2
}

SUPPORTED_Q0 = tuple(sorted(_MODULI))


def _poly_mul_mod(a: int, b: int, p: int, mod_coeffs: Sequence[int]) -> int:
    """Multiply two base-p digit codes modulo the fixed irreducible."""
    deg = len(mod_coeffs)
    da = []
    while a:
        da.append(a % p)
        a //= p
    db = []
    while b:
        db.append(b % p)
        b //= p
    prod = [0] * (len(da) + len(db))
    for i, ca in enumerate(da):
        if ca:
            for j, cb in enumerate(db):
                prod[i + j] = (prod[i + j] + ca * cb) % p
    # reduce: x^deg = -mod_coeffs
    for k in range(len(prod) - 1, deg - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for j, m in enumerate(mod_coeffs):
                prod[k - deg + j] = (prod[k - deg + j] - c * m) % p
    code = 0
    for c in reversed(prod[:deg]):
        code = code * p + c
    return code


class GF:
    """The residue field GF(q0^2) together with its Frobenius x -> x^q0.

    Instances are cached per q0.  All element-level operations are table
    lookups on integer codes 0..q-1; :class:`FieldElem` wraps a code for
    friendlier use.
    """

    _cache: dict[int, "GF"] = {}

    def __new__(cls, q0: int) -> "GF":
        if q0 in cls._cache:
            return cls._cache[q0]
        if q0 not in _MODULI:
            raise ValueError(f"unsupported q0={q0}; supported: {SUPPORTED_Q0}")
        self = super().__new__(cls)
        self._build(q0)
        cls._cache[q0] = self
        return self

    def _build(self, q0: int) -> None:
        p, mod_coeffs = _MODULI[q0]
        deg = len(mod_coeffs)
        q = p**deg
        if q != q0 * q0:
            raise AssertionError("modulus degree inconsistent with q0")
        self.q0 = q0
        self.p = p
        self.q = q
        self.deg = deg
        self.mod_coeffs = tuple(mod_coeffs)

        add = [[0] * q for _ in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            for b in range(a, q):
                s = 0
                pw = 1
                aa, bb = a, b
                for _ in range(deg):
                    s += ((aa + bb) % p) * pw
                    aa //= p
                    bb //= p
                    pw *= p
                add[a][b] = add[b][a] = s
                m = _poly_mul_mod(a, b, p, mod_coeffs)
                mul[a][b] = mul[b][a] = m
        self.add_codes = tuple(tuple(r) for r in add)
        self.mul_codes = tuple(tuple(r) for r in mul)

        neg = [0] * q
        for a in range(q):
            s = 0
            pw = 1
            aa = a
            for _ in range(deg):
                s += ((-aa) % p) * pw
                aa //= p
                pw *= p
            neg[a] = s
        self.neg_codes = tuple(neg)

        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    inv[a] = b
                    break
            else:
                raise AssertionError(f"modulus for q0={q0} is not irreducible")
        self.inv_codes = tuple(inv)

        frob = [0] * q
        for a in range(q):
            acc = a
            for _ in range(q0 - 1):
                acc = mul[acc][a]
            frob[a] = acc  # a^q0
        self.frob_codes = tuple(frob)
        # Frobenius is an involution on GF(q0^2)
        for a in range(q):
            if frob[frob[a]] != a:
                raise AssertionError("Frobenius is not an involution")
        self.fixed_codes = tuple(a for a in range(q) if frob[a] == a)

        norm = tuple(mul[a][frob[a]] for a in range(q))
        self.norm_codes = norm  # lands in the fixed subfield
        for a in range(q):
            if frob[norm[a]] != norm[a]:
                raise AssertionError("norm left the fixed subfield")

        gen = 0
        for a in range(2, q):
            seen = set()
            x = 1
            for _ in range(q - 1):
                x = mul[x][a]
                seen.add(x)
            if len(seen) == q - 1:
                gen = a
                break
        self.generator = gen

    def elem(self, code: int) -> "FieldElem":
        return FieldElem(self, code)

    def from_coeffs(self, coeffs: Iterable[int]) -> "FieldElem":
        """Build an element from prime-field digits, constant term first."""
        cs = list(coeffs)
        if len(cs) > self.deg:
            raise ValueError("too many digits")
        code = 0
        for c in reversed(cs):
            code = code * self.p + (c % self.p)
        return FieldElem(self, code)

    def __repr__(self) -> str:
        return f"GF({self.q0}^2)"


class FieldElem:
    """An element of GF(q0^2), wrapping its base-p digit code."""

    __slots__ = ("gf", "code")

    def __init__(self, gf: GF, code: int):
        if not 0 <= code < gf.q:
            raise ValueError(f"code {code} out of range for {gf}")
        self.gf = gf
        self.code = code

    @property
    def coeffs(self) -> tuple[int, ...]:
        cs = []
        c = self.code
        for _ in range(self.gf.deg):
            cs.append(c % self.gf.p)
            c //= self.gf.p
        return tuple(cs)

    def __add__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem(self.gf, self.gf.add_codes[self.code][other.code])

    def __sub__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        oc = self.gf.neg_codes[other.code]
        return FieldElem(self.gf, self.gf.add_codes[self.code][oc])

    def __neg__(self) -> "FieldElem":
        return FieldElem(self.gf, self.gf.neg_codes[self.code])

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem(self.gf, self.gf.mul_codes[self.code][other.code])

    def inverse(self) -> "FieldElem":
        if self.code == 0:
            raise ZeroDivisionError("inverse of zero field element")
        return FieldElem(self.gf, self.gf.inv_codes[self.code])

    def frobenius(self) -> "FieldElem":
        return FieldElem(self.gf, self.gf.frob_codes[self.code])

    def is_rational(self) -> bool:
        """True when the element lies in the fixed subfield GF(q0)."""
        return self.gf.frob_codes[self.code] == self.code

    def _check(self, other: "FieldElem") -> None:
        if self.gf is not other.gf:
            raise ValueError("mixed fields")

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldElem)
            and self.gf is other.gf
            and self.code == other.code
        )

    def __hash__(self) -> int:
        return hash((id(self.gf), self.code))

    def __bool__(self) -> bool:
        return self.code != 0

    def __repr__(self) -> str:
        return f"FieldElem(q0={self.gf.q0}, code={self.code})"


class LaurentScalar:
    """A truncated Laurent series over GF(q0^2).

    ``digits`` are field codes for t^valuation, t^(valuation+1), ...; the
    first and last stored digits are nonzero.  Digits at exponents in
    [valuation + len(digits), known_upto) are known to be zero; nothing is
    known from ``known_upto`` on.  The zero scalar stores no digits and uses
    ``valuation = None``.
    """

    __slots__ = ("gf", "_val", "digits", "known_upto")

    def __init__(self, gf: GF, val: int, digits: Sequence[int], known_upto: int = EXACT):
        ds = list(digits)
        # normalize: strip zero digits at both ends, clamp to the window
        while ds and ds[0] == 0:
            ds.pop(0)
            val += 1
        while ds and ds[-1] == 0:
            ds.pop()
        if ds and val + len(ds) > known_upto:
            ds = ds[: max(0, known_upto - val)]
            while ds and ds[-1] == 0:
                ds.pop()
        self.gf = gf
        self._val = val if ds else 0
        self.digits = tuple(ds)
        self.known_upto = known_upto
        if any(not 0 <= d < gf.q for d in self.digits):
            raise ValueError("digit code out of range")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, gf: GF, known_upto: int = EXACT) -> "LaurentScalar":
        return cls(gf, 0, (), known_upto)

    @classmethod
    def one(cls, gf: GF) -> "LaurentScalar":
        return cls(gf, 0, (1,))

    @classmethod
    def uniformizer(cls, gf: GF, power: int = 1) -> "LaurentScalar":
        return cls(gf, power, (1,))

    @classmethod
    def constant(cls, elem: FieldElem) -> "LaurentScalar":
        return cls(elem.gf, 0, (elem.code,))

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        """True when no nonzero digit is stored (zero as far as known)."""
        return not self.digits

    @property
    def valuation(self) -> int | None:
        return self._val if self.digits else None

    def coeff(self, exponent: int) -> FieldElem:
        if exponent >= self.known_upto:
            raise PrecisionError(f"digit at t^{exponent} is beyond the known window")
        if self.digits and self._val <= exponent < self._val + len(self.digits):
            return FieldElem(self.gf, self.digits[exponent - self._val])
        return FieldElem(self.gf, 0)

    @property
    def is_exact(self) -> bool:
        return self.known_upto >= EXACT

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "LaurentScalar") -> None:
        if self.gf is not other.gf:
            raise ValueError("mixed fields")

    def __add__(self, other: "LaurentScalar") -> "LaurentScalar":
        self._check(other)
        upto = min(self.known_upto, other.known_upto)
        if not self.digits:
            return LaurentScalar(other.gf, other._val, other.digits, upto)
        if not other.digits:
            return LaurentScalar(self.gf, self._val, self.digits, upto)
        lo = min(self._val, other._val)
        hi = max(self._val + len(self.digits), other._val + len(other.digits))
        add = self.gf.add_codes
        out = [0] * (hi - lo)
        for i, d in enumerate(self.digits):
            out[self._val - lo + i] = d
        for i, d in enumerate(other.digits):
            k = other._val - lo + i
            out[k] = add[out[k]][d]
        return LaurentScalar(self.gf, lo, out, upto)

    def __neg__(self) -> "LaurentScalar":
        neg = self.gf.neg_codes
        return LaurentScalar(self.gf, self._val, [neg[d] for d in self.digits], self.known_upto)

    def __sub__(self, other: "LaurentScalar") -> "LaurentScalar":
        return self + (-other)

    def __mul__(self, other: "LaurentScalar") -> "LaurentScalar":
        self._check(other)
        # knowledge windows: a known below a.hi, so a*b known below
        # min(val(a)+hi(b), val(b)+hi(a)); a stored zero counts from its bound
        lo_a = self._val if self.digits else self.known_upto
        lo_b = other._val if other.digits else other.known_upto
        upto = min(lo_a + other.known_upto, lo_b + self.known_upto, EXACT)
        if not self.digits or not other.digits:
            return LaurentScalar.zero(self.gf, upto)
        add = self.gf.add_codes
        mul = self.gf.mul_codes
        out = [0] * (len(self.digits) + len(other.digits) - 1)
        for i, da in enumerate(self.digits):
            if da:
                row = mul[da]
                for j, db in enumerate(other.digits):
                    if db:
                        out[i + j] = add[out[i + j]][row[db]]
        return LaurentScalar(self.gf, self._val + other._val, out, upto)

    def shift(self, k: int) -> "LaurentScalar":
        """Multiply by t^k."""
        upto = self.known_upto if self.known_upto >= EXACT else self.known_upto + k
        return LaurentScalar(self.gf, self._val + k, self.digits, upto)

    def inverse(self, precision: int) -> "LaurentScalar":
        """Invert a unit series, keeping ``precision`` digits of the result.

        The result is known on [-(valuation), -(valuation) + precision).
        """
        if not self.digits:
            if self.is_exact:
                raise ZeroDivisionError("inverse of the zero scalar")
            raise PrecisionError("cannot invert: zero at the known precision")
        if precision <= 0:
            raise ValueError("precision must be positive")
        avail = (
            precision
            if self.is_exact
            else min(precision, self.known_upto - self._val)
        )
        if avail <= 0:
            raise PrecisionError("no usable digits for inversion")
        mul = self.gf.mul_codes
        add = self.gf.add_codes
        neg = self.gf.neg_codes
        a = list(self.digits[:avail]) + [0] * max(0, avail - len(self.digits))
        inv0 = self.gf.inv_codes[a[0]]
        out = [0] * avail
        out[0] = inv0
        for k in range(1, avail):
            # coefficient of t^k in a*out must vanish
            s = 0
            for i in range(1, min(k, len(a) - 1) + 1):
                if a[i]:
                    s = add[s][mul[a[i]][out[k - i]]]
            out[k] = mul[inv0][neg[s]]
        return LaurentScalar(self.gf, -self._val, out, -self._val + avail)

    def truncate(self, upto: int) -> "LaurentScalar":
        """Forget all digits at exponents >= upto."""
        if upto >= self.known_upto:
            return self
        return LaurentScalar(self.gf, self._val, self.digits, upto)

    def frobenius(self) -> "LaurentScalar":
        """Digitwise Frobenius; valuation and windows are unchanged."""
        fr = self.gf.frob_codes
        return LaurentScalar(self.gf, self._val, [fr[d] for d in self.digits], self.known_upto)

    def is_rational(self) -> bool:
        fr = self.gf.frob_codes
        return all(fr[d] == d for d in self.digits)

    # -- comparison / io ----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentScalar):
            return NotImplemented
        return (
            self.gf is other.gf
            and self.digits == other.digits
            and (self._val == other._val or not self.digits)
            and self.known_upto == other.known_upto
        )

    def __hash__(self) -> int:
        return hash((id(self.gf), self._val, self.digits, self.known_upto))

    def json_obj(self) -> dict:
        """Exact values only: {"valuation": v, "digits": [[prime digits]..]}."""
        if not self.is_exact:
            raise ValueError("refusing to serialize a truncated scalar")
        return {
            "valuation": self.valuation,
            "digits": [list(FieldElem(self.gf, d).coeffs) for d in self.digits],
        }

    def __repr__(self) -> str:
        if not self.digits:
            tail = "" if self.is_exact else f" + O(t^{self.known_upto})"
            return f"LaurentScalar(0{tail})"
        terms = " + ".join(
            f"{d}*t^{self._val + i}" for i, d in enumerate(self.digits) if d
        )
        tail = "" if self.is_exact else f" + O(t^{self.known_upto})"
        return f"LaurentScalar({terms}{tail})"


class PrecisionError(ArithmeticError):
    """Raised when a computation needs digits beyond the known window."""


def rat_to_str(x: Fraction) -> str:
    """Lowest-terms decimal string, "p/q" or plain "p" for integers."""
    return str(Fraction(x))


def rat_from_str(s: str) -> Fraction:
    return Fraction(s)
