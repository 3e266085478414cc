"""Exact arithmetic in norm-Euclidean imaginary quadratic fields.

Supported discriminants d are -3, -4, -7, -8, -11: exactly the imaginary
quadratic fields whose ring of integers is norm-Euclidean, so gcds come
from honest Euclidean division (nearest lattice point) and every ideal is
principal.  Elements are written a + b*w on the integral basis {1, w}:

    d = -3   w^2 + w + 1 = 0   (w is a primitive cube root of unity)
    d = -4   w^2 + 1 = 0
    d = -7   w^2 - w + 2 = 0
    d = -8   w^2 + 2 = 0
    d = -11  w^2 - w + 3 = 0

For d = -3 the basis element is the cube root of unity zeta_3, not the
sixth root (1+sqrt(-3))/2 some databases print; coefficients in the
zeta_6 basis convert by zeta_6 = 1 + zeta_3.

The module also hosts the p-adic interface: splitting a rational prime
into conjugate degree-one primes, embedding K into Q_p along each, and
residue fields at arbitrary primes for reduction checks.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import isqrt

from .padic import PadicNumber, hensel_univariate, _sqrt_mod_p


class FieldError(ValueError):
    pass


class SplitError(ValueError):
    """Prime does not split into two distinct degree-one primes."""


class DecompositionError(ValueError):
    pass


_MINPOLY = {  # d -> (c1, c0) for w^2 + c1 w + c0 = 0
    -3: (1, 1),
    -4: (0, 1),
    -7: (-1, 2),
    -8: (0, 2),
    -11: (-1, 3),
}


class QuadField:
    __slots__ = ("d", "c1", "c0")

    def __init__(self, d: int):
        if d not in _MINPOLY:
            raise FieldError(f"unsupported field discriminant {d}; need one of {sorted(_MINPOLY)}")
        self.d = d
        self.c1, self.c0 = _MINPOLY[d]

    def __eq__(self, other):
        return isinstance(other, QuadField) and other.d == self.d

    def __hash__(self):
        return hash(("QuadField", self.d))

    def __repr__(self):
        return f"QuadField({self.d})"

    def zero(self) -> "QuadInt":
        return QuadInt(self, 0, 0)

    def one(self) -> "QuadInt":
        return QuadInt(self, 1, 0)

    def w(self) -> "QuadInt":
        return QuadInt(self, 0, 1)

    def units(self) -> list["QuadInt"]:
        if self.d == -3:
            # powers of -zeta_3: 1, z, z^2 = -1-z and negatives
            return [QuadInt(self, a, b) for a, b in
                    [(1, 0), (-1, 0), (0, 1), (0, -1), (-1, -1), (1, 1)]]
        if self.d == -4:
            return [QuadInt(self, a, b) for a, b in [(1, 0), (-1, 0), (0, 1), (0, -1)]]
        return [QuadInt(self, 1, 0), QuadInt(self, -1, 0)]


_FIELD_CACHE: dict[int, QuadField] = {}


def make_field(d: int) -> QuadField:
    if d not in _FIELD_CACHE:
        _FIELD_CACHE[d] = QuadField(d)
    return _FIELD_CACHE[d]


class QuadInt:
    """Element a + b*w of the ring of integers."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: QuadField, a: int, b: int):
        self.field = field
        self.a = a
        self.b = b

    # -- ring structure ---------------------------------------------------

    def _chk(self, other) -> "QuadInt":
        if isinstance(other, int):
            return QuadInt(self.field, other, 0)
        if isinstance(other, QuadInt):
            if other.field.d != self.field.d:
                raise FieldError("mixed fields")
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._chk(other)
        if o is NotImplemented:
            return o
        return QuadInt(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadInt(self.field, -self.a, -self.b)

    def __sub__(self, other):
        o = self._chk(other)
        if o is NotImplemented:
            return o
        return QuadInt(self.field, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._chk(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._chk(other)
        if o is NotImplemented:
            return o
        c1, c0 = self.field.c1, self.field.c0
        a1, b1, a2, b2 = self.a, self.b, o.a, o.b
        return QuadInt(self.field,
                       a1 * a2 - c0 * b1 * b2,
                       a1 * b2 + a2 * b1 - c1 * b1 * b2)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        assert e >= 0
        acc = self.field.one()
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def __eq__(self, other):
        o = self._chk(other)
        if o is NotImplemented:
            return o
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.field.d, self.a, self.b))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    # -- field-theoretic maps ----------------------------------------------

    def conj(self) -> "QuadInt":
        # wbar = -c1 - w
        return QuadInt(self.field, self.a - self.field.c1 * self.b, -self.b)

    def norm(self) -> int:
        c1, c0 = self.field.c1, self.field.c0
        return self.a * self.a - c1 * self.a * self.b + c0 * self.b * self.b

    def trace(self) -> int:
        return 2 * self.a - self.field.c1 * self.b

    def is_unit(self) -> bool:
        return self.norm() == 1

    # -- Euclidean structure -------------------------------------------------

    def exact_quotient(self, other: "QuadInt") -> tuple[Fraction, Fraction]:
        """Coordinates of self/other in the {1, w} basis."""
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero element")
        z = self * other.conj()
        return Fraction(z.a, n), Fraction(z.b, n)

    def __divmod__(self, other: "QuadInt"):
        qa, qb = self.exact_quotient(other)
        fa, fb = qa.numerator // qa.denominator, qb.numerator // qb.denominator
        # the norm form is skew, so coordinate rounding can miss the
        # nearest lattice point; scan the surrounding cell corners
        best = None
        for da in (0, 1, -1):
            for db in (0, 1, -1):
                q = QuadInt(self.field, fa + da, fb + db)
                r = self - q * other
                n = r.norm()
                if best is None or n < best[0]:
                    best = (n, q, r)
        n, q, r = best
        # nearest-point choice realises the norm-Euclidean bound
        assert n < other.norm(), "euclidean bound violated"
        return q, r

    def __floordiv__(self, other: "QuadInt") -> "QuadInt":
        return divmod(self, other)[0]

    def __mod__(self, other: "QuadInt") -> "QuadInt":
        return divmod(self, other)[1]

    def divides(self, other: "QuadInt") -> bool:
        if not self:
            return not other
        qa, qb = other.exact_quotient(self)
        return qa.denominator == 1 and qb.denominator == 1

    def exact_div(self, other: "QuadInt") -> "QuadInt":
        qa, qb = self.exact_quotient(other)
        if qa.denominator != 1 or qb.denominator != 1:
            raise FieldError(f"{other} does not divide {self}")
        return QuadInt(self.field, int(qa), int(qb))

    def val_at(self, pi: "QuadInt") -> int:
        """pi-adic valuation; pi a prime element, self nonzero."""
        if not self:
            raise ValueError("valuation of 0")
        v = 0
        z = self
        while pi.divides(z):
            z = z.exact_div(pi)
            v += 1
        return v

    # -- formatting ------------------------------------------------------------

    def __repr__(self):
        return format_element(self)


def canonical_associate(z: QuadInt) -> QuadInt:
    """The associate with lexicographically smallest (|a|, |b|, signs).

    Deterministic representative of the ideal (z); used wherever a
    generator is reported or compared.
    """
    if not z:
        return z
    best = None
    for u in z.field.units():
        c = z * u
        key = (abs(c.a), abs(c.b), c.a < 0, c.b < 0)
        if best is None or key < best[0]:
            best = (key, c)
    return best[1]


def quad_gcd(x: QuadInt, y: QuadInt) -> QuadInt:
    """Greatest common divisor, canonical associate."""
    if x.field.d != y.field.d:
        raise FieldError("mixed fields")
    while y:
        x, y = y, x % y
    return canonical_associate(x)


def sqrt_exact(z: QuadInt) -> tuple[QuadInt, QuadInt]:
    """Solve y^2 = u * z with u a unit; returns (y, u).

    Used to split point denominators d^2 off x-coordinates.  Raises
    DecompositionError when no unit multiple of z is a square.  The trick:
    if y^2 = z' and n = sqrt(Nm z') then y * Tr(y) = z' + n, so y is an
    exact division away once the integer square roots exist.
    """
    K = z.field
    if not z:
        return K.zero(), K.one()
    nz = z.norm()
    n = isqrt(nz)
    if n * n != nz:
        raise DecompositionError(f"norm {nz} is not a perfect square")
    for u in K.units():
        zz = z * u
        t2 = zz.trace() + 2 * n
        if t2 < 0:
            continue
        t = isqrt(t2)
        if t * t != t2:
            continue
        if t != 0:
            num = zz + n
            if num.a % t == 0 and num.b % t == 0:
                y = QuadInt(K, num.a // t, num.b // t)
                if y * y == zz:
                    return y, u
        else:
            # zz is a negative rational integer; sqrt is t0 * W with
            # W^2 rational (W = 2w + c1 for odd d, else w)
            if zz.b != 0:
                continue
            if K.d in (-4, -8):
                W = K.w()
            else:
                W = QuadInt(K, K.c1, 2)  # c1 + 2w, squares to c1^2 - 4 c0 = disc
            w2 = (W * W).a
            if zz.a % w2 == 0:
                q = zz.a // w2
                t0 = isqrt(q) if q >= 0 else -1
                if t0 >= 0 and t0 * t0 == q:
                    y = QuadInt(K, t0 * W.a, t0 * W.b)
                    if y * y == zz:
                        return y, u
    raise DecompositionError(f"no unit multiple of {z} is a square")


# ----------------------------------------------------------------------
# rational elements

class QuadRat:
    """Element of the field K, stored as (a + b*w) / den with den > 0."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field: QuadField, num: QuadInt, den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        from math import gcd as igcd
        g = igcd(igcd(abs(num.a), abs(num.b)), den)
        if g > 1:
            num = QuadInt(field, num.a // g, num.b // g)
            den //= g
        self.field = field
        self.num = num
        self.den = den

    @staticmethod
    def from_int(field: QuadField, a: int) -> "QuadRat":
        return QuadRat(field, QuadInt(field, a, 0))

    @staticmethod
    def from_quadint(z: QuadInt) -> "QuadRat":
        return QuadRat(z.field, z)

    def _chk(self, other) -> "QuadRat":
        if isinstance(other, int):
            return QuadRat.from_int(self.field, other)
        if isinstance(other, Fraction):
            return QuadRat(self.field, QuadInt(self.field, other.numerator, 0), other.denominator)
        if isinstance(other, QuadInt):
            return QuadRat.from_quadint(other)
        if isinstance(other, QuadRat):
            if other.field.d != self.field.d:
                raise FieldError("mixed fields")
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._chk(other)
        if o is NotImplemented:
            return o
        return QuadRat(self.field, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return QuadRat(self.field, -self.num, self.den)

    def __sub__(self, other):
        o = self._chk(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._chk(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._chk(other)
        if o is NotImplemented:
            return o
        return QuadRat(self.field, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = QuadRat.from_quadint(self.field.one())
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def inverse(self) -> "QuadRat":
        n = self.num.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadRat(self.field, self.num.conj() * self.den, n)

    def __truediv__(self, other):
        o = self._chk(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._chk(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __eq__(self, other):
        o = self._chk(other)
        if o is NotImplemented:
            return o
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash((self.field.d, self.num.a, self.num.b, self.den))

    def __bool__(self):
        return bool(self.num)

    def conj(self) -> "QuadRat":
        return QuadRat(self.field, self.num.conj(), self.den)

    def norm(self) -> Fraction:
        return Fraction(self.num.norm(), self.den * self.den)

    def trace(self) -> Fraction:
        return Fraction(self.num.trace(), self.den)

    def is_integral(self) -> bool:
        return self.num.a % self.den == 0 and self.num.b % self.den == 0

    def to_quadint(self) -> QuadInt:
        if not self.is_integral():
            raise FieldError(f"{self} is not integral")
        return QuadInt(self.field, self.num.a // self.den, self.num.b // self.den)

    def val_at(self, pi: QuadInt) -> int:
        if not self.num:
            raise ValueError("valuation of 0")
        den = QuadInt(self.field, self.den, 0)
        return self.num.val_at(pi) - den.val_at(pi)

    def __repr__(self):
        if self.den == 1:
            return format_element(self.num)
        return f"({format_element(self.num)})/{self.den}"


# ----------------------------------------------------------------------
# parsing and formatting

_RE_INT = re.compile(r"^([+-]?\d+)$")
_RE_WONLY = re.compile(r"^([+-]?)\s*(?:(\d+)\s*\*\s*)?w$")
_RE_BOTH = re.compile(r"^([+-]?\d+)\s*([+-])\s*(?:(\d+)\s*\*\s*)?w$")


def parse_element(field: QuadField, text: str) -> QuadRat:
    """Parse 'a', 'b*w', 'a+b*w', 'a-b*w' (integer a, b) or '(...)/den'."""
    text = text.strip()
    if "/" in text:
        left, right = text.rsplit("/", 1)
        den = int(right.strip())
        inner = left.strip()
        if inner.startswith("(") and inner.endswith(")"):
            inner = inner[1:-1]
        num = parse_element(field, inner)
        return QuadRat(field, num.num, num.den * den)
    m = _RE_INT.match(text)
    if m:
        return QuadRat(field, QuadInt(field, int(m.group(1)), 0))
    m = _RE_WONLY.match(text)
    if m:
        b = int(m.group(2)) if m.group(2) else 1
        if m.group(1) == "-":
            b = -b
        return QuadRat(field, QuadInt(field, 0, b))
    m = _RE_BOTH.match(text)
    if m:
        a = int(m.group(1))
        b = int(m.group(3)) if m.group(3) else 1
        if m.group(2) == "-":
            b = -b
        return QuadRat(field, QuadInt(field, a, b))
    raise FieldError(f"cannot parse field element {text!r}")


def format_element(z: QuadInt | QuadRat) -> str:
    if isinstance(z, QuadRat):
        if z.den == 1:
            return format_element(z.num)
        return f"({format_element(z.num)})/{z.den}"
    if z.b == 0:
        return str(z.a)
    if z.a == 0:
        return f"{z.b}*w" if z.b != 1 else "w"
    return f"{z.a}{'+' if z.b >= 0 else '-'}{abs(z.b)}*w" if abs(z.b) != 1 else \
        f"{z.a}{'+' if z.b >= 0 else '-'}w"


def parse_point(field: QuadField, text: str) -> tuple[QuadRat, QuadRat]:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise FieldError(f"point must be written (x, y): {text!r}")
    # split on the comma not inside a fraction paren
    depth = 0
    for i, ch in enumerate(text[1:-1], start=1):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            x = parse_element(field, text[1:i])
            y = parse_element(field, text[i + 1:-1])
            return x, y
    raise FieldError(f"point must have two coordinates: {text!r}")


def format_point(P) -> str:
    return f"({format_element(P[0])}, {format_element(P[1])})"


# ----------------------------------------------------------------------
# prime splitting and embeddings

class PrimeSplitting:
    """A rational prime p = pi1 * pi2 split in K, with p-adic embeddings.

    Index 1 is the embedding sending w to the root r1 of the minimal
    polynomial whose mod-p representative is smaller; pi1 is normalised so
    that its image under embedding 1 has valuation 1 (so embedding i sees
    the prime pi_i, and the conjugate embedding sees a unit).
    """

    __slots__ = ("field", "p", "prec", "pi1", "pi2", "r1", "r2", "rbar1", "rbar2")

    def __init__(self, field, p, prec, pi1, pi2, r1, r2, rbar1, rbar2):
        self.field = field
        self.p = p
        self.prec = prec
        self.pi1 = pi1
        self.pi2 = pi2
        self.r1 = r1
        self.r2 = r2
        self.rbar1 = rbar1
        self.rbar2 = rbar2

    def root(self, side: int) -> PadicNumber:
        return self.r1 if side == 1 else self.r2

    def uniformizer(self, side: int) -> QuadInt:
        return self.pi1 if side == 1 else self.pi2

    def __repr__(self):
        return (f"PrimeSplitting(d={self.field.d}, p={self.p}, "
                f"pi1={self.pi1}, pi2={self.pi2})")


def split_prime(field: QuadField, p: int, prec: int = 25) -> PrimeSplitting:
    """Split p in K and fix both embeddings to precision prec."""
    c1, c0 = field.c1, field.c0
    disc = c1 * c1 - 4 * c0
    if p <= 2 or disc % p == 0:
        raise SplitError(f"{p} is ramified or too small in d={field.d}")
    s = _sqrt_mod_p(disc % p, p)
    if s is None:
        raise SplitError(f"{p} is inert in d={field.d}")
    inv2 = pow(2, -1, p)
    roots = sorted({(-c1 + s) * inv2 % p, (-c1 - s) * inv2 % p})
    if len(roots) != 2:
        raise SplitError(f"{p} does not split into distinct primes in d={field.d}")
    rbar1, rbar2 = roots
    coeffs = [PadicNumber.from_int(c0, p, prec + 4),
              PadicNumber.from_int(c1, p, prec + 4),
              PadicNumber.from_int(1, p, prec + 4)]
    r1 = hensel_univariate(coeffs, PadicNumber.from_int(rbar1, p, prec + 4))
    r2 = hensel_univariate(coeffs, PadicNumber.from_int(rbar2, p, prec + 4))
    # generator of one prime above p: norm equation a^2 - c1 a b + c0 b^2 = p
    pi = None
    bmax = isqrt(4 * p // abs(disc)) + 2
    for b in range(bmax + 1):
        dd = disc * b * b + 4 * p
        if dd < 0:
            continue
        sq = isqrt(dd)
        if sq * sq != dd:
            continue
        for sgn in (sq, -sq):
            if (c1 * b + sgn) % 2 == 0:
                a = (c1 * b + sgn) // 2
                cand = QuadInt(field, a, b)
                if cand.norm() == p:
                    pi = cand
                    break
        if pi is not None:
            break
    if pi is None:
        raise SplitError(f"no element of norm {p} found (unexpected for class number 1)")
    if (pi.a + pi.b * rbar1) % p != 0:
        pi = pi.conj()
    assert (pi.a + pi.b * rbar1) % p == 0
    pi1 = canonical_associate(pi)
    if (pi1.a + pi1.b * rbar1) % p != 0:
        # canonical associate of the conjugate ideal; swap back
        pi1 = canonical_associate(pi.conj())
        assert (pi1.a + pi1.b * rbar1) % p == 0
    pi2 = pi1.conj()
    return PrimeSplitting(field, p, prec, pi1, pi2, r1, r2, rbar1, rbar2)


def embed(x: QuadInt | QuadRat, spl: PrimeSplitting, side: int) -> PadicNumber:
    """Image of x in Q_p under embedding 1 or 2."""
    r = spl.root(side)
    if isinstance(x, QuadInt):
        return PadicNumber.from_int(x.a, spl.p, spl.prec) + \
            PadicNumber.from_int(x.b, spl.p, spl.prec) * r
    num = PadicNumber.from_int(x.num.a, spl.p, spl.prec) + \
        PadicNumber.from_int(x.num.b, spl.p, spl.prec) * r
    return num / PadicNumber.from_int(x.den, spl.p, spl.prec)


# ----------------------------------------------------------------------
# residue fields at arbitrary primes

class ResidueField:
    """O_K / (pi) for a prime element pi; degree 1 or 2 over F_ell.

    Elements are ints (degree 1) or (a, b) pairs (degree 2, on the image
    of the basis {1, w}).
    """

    __slots__ = ("field", "pi", "ell", "degree", "wimage")

    def __init__(self, field: QuadField, pi: QuadInt):
        self.field = field
        self.pi = pi
        n = pi.norm()
        root = _small_prime_root(n)
        if root is not None:
            self.ell = root
            self.degree = 2
            self.wimage = None
        else:
            self.ell = n
            self.degree = 1
            # image of w: the root r of the minimal polynomial with pi | (w - r)
            r = None
            for cand in range(self.ell):
                if (cand * cand + field.c1 * cand + field.c0) % self.ell == 0:
                    if pi.divides(QuadInt(field, -cand, 1)):
                        r = cand
                        break
            if r is None:
                raise FieldError(f"{pi} does not look prime")
            self.wimage = r

    @property
    def size(self) -> int:
        return self.ell if self.degree == 1 else self.ell * self.ell

    def reduce_int(self, z: QuadInt):
        if self.degree == 1:
            return (z.a + z.b * self.wimage) % self.ell
        return (z.a % self.ell, z.b % self.ell)

    def reduce_rat(self, x: QuadRat):
        if x.den % self.ell == 0:
            # strip the pi-content shared by numerator and denominator
            den = QuadInt(self.field, x.den, 0)
            k = den.val_at(self.pi)
            num = x.num
            for _ in range(k):
                if not self.pi.divides(num):
                    raise ZeroDivisionError("element has a pole at this prime")
                num = num.exact_div(self.pi)
                den = den.exact_div(self.pi)
            return self.mul(self.reduce_int(num), self.inv(self.reduce_int(den)))
        dinv = pow(x.den % self.ell, -1, self.ell)
        if self.degree == 1:
            return self.reduce_int(x.num) * dinv % self.ell
        a, b = self.reduce_int(x.num)
        return (a * dinv % self.ell, b * dinv % self.ell)

    def add(self, x, y):
        if self.degree == 1:
            return (x + y) % self.ell
        return ((x[0] + y[0]) % self.ell, (x[1] + y[1]) % self.ell)

    def mul(self, x, y):
        if self.degree == 1:
            return x * y % self.ell
        c1, c0 = self.field.c1, self.field.c0
        a = (x[0] * y[0] - c0 * x[1] * y[1]) % self.ell
        b = (x[0] * y[1] + x[1] * y[0] - c1 * x[1] * y[1]) % self.ell
        return (a, b)

    def neg(self, x):
        if self.degree == 1:
            return -x % self.ell
        return (-x[0] % self.ell, -x[1] % self.ell)

    def scalar(self, k: int):
        if self.degree == 1:
            return k % self.ell
        return (k % self.ell, 0)

    def inv(self, x):
        if self.degree == 1:
            return pow(x, -1, self.ell)
        a, b = x
        c1, c0 = self.field.c1, self.field.c0
        n = (a * a - c1 * a * b + c0 * b * b) % self.ell
        ninv = pow(n, -1, self.ell)
        return ((a - c1 * b) * ninv % self.ell, -b * ninv % self.ell)

    def is_zero(self, x) -> bool:
        if self.degree == 1:
            return x % self.ell == 0
        return x[0] % self.ell == 0 and x[1] % self.ell == 0


def _small_prime_root(n: int) -> int | None:
    """If n = ell^2 for a prime ell return ell, else None (n prime)."""
    r = isqrt(n)
    if r * r == n:
        return r
    return None


# ----------------------------------------------------------------------
# denominators of points

def denominator_ideal(x: QuadRat) -> QuadInt:
    """Canonical generator of the denominator ideal of x."""
    den = QuadInt(x.field, x.den, 0)
    g = quad_gcd(x.num, den)
    return canonical_associate(den.exact_div(g))


def denominator_decomposition(x: QuadRat, y: QuadRat) -> tuple[QuadInt, QuadInt, QuadInt]:
    """Write a point (x, y) as (a/d^2, b/d^3) in lowest terms.

    Returns (a, b, d) with d the canonical associate.  Valid for points on
    a Weierstrass model with integral coefficients; raises
    DecompositionError otherwise.
    """
    beta = denominator_ideal(x)
    dgen, _unit = sqrt_exact(beta)
    d = canonical_associate(dgen)
    xa = x * d * d
    yb = y * d * d * d
    if not (xa.is_integral() and yb.is_integral()):
        raise DecompositionError(f"denominator of ({x}, {y}) is not a square (d={d})")
    a = xa.to_quadint()
    b = yb.to_quadint()
    if d.norm() != 1:
        if quad_gcd(a, d).norm() != 1:
            raise DecompositionError("x numerator shares a factor with d")
        if b and quad_gcd(b, d).norm() != 1:
            raise DecompositionError("y numerator shares a factor with d")
    return a, b, d
