"""Capped-precision p-adic arithmetic, truncated power series and Hensel lifting.

Numbers are stored in capped-relative form: a nonzero element is
p^v * (u + O(p^n)) with 0 < u < p^n and p not dividing u.  A "zero" is a
value known to vanish modulo p^a for some absolute precision a; exact
zeros use a large sentinel precision.  Every arithmetic operation returns
the precision actually justified by its inputs (min of operand precisions,
minus any digits lost to cancellation or to dividing by non-units), so
downstream code can simply read the precision off a result instead of
re-deriving error bounds.

Series come in one- and two-variable flavours.  The one-variable class
allows a finite Laurent tail (needed for x(t), y(t) expansions at the
origin of an elliptic curve) and supports composition, compositional
reversion, termwise integration and the usual analytic maps.  The
two-variable class truncates in total degree and exists mostly to feed
the bivariate Hensel solver.
"""

from __future__ import annotations

from fractions import Fraction

# Sentinel valuation for an exact zero.  Large enough that min() with any
# honest precision keeps the honest one.
EXACT = 10**9


class PrecisionError(ArithmeticError):
    """A result would carry no correct digits at the available precision."""


class NoConvergence(ArithmeticError):
    """A Newton iteration failed its convergence precondition."""


class SubdivisionNeeded(Exception):
    """Bivariate Newton cannot certify a unique root on this polydisk.

    The caller is expected to split the disk into p^2 subdisks and
    recurse on each.
    """


_PPOW: dict[tuple[int, int], int] = {}


def ppow(p: int, k: int) -> int:
    """p**k with memoisation; k >= 0."""
    key = (p, k)
    w = _PPOW.get(key)
    if w is None:
        w = p**k
        if k <= 4096:
            _PPOW[key] = w
    return w


def int_val(a: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    if a == 0:
        raise ValueError("valuation of 0")
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


class PadicNumber:
    __slots__ = ("p", "v", "u", "n")

    def __init__(self, p: int, v: int, u: int, n: int):
        # Trusted fast path; use the constructors below for raw data.
        self.p = p
        self.v = v
        self.u = u
        self.n = n

    # ------------------------------------------------------------------
    # construction

    @staticmethod
    def make(p: int, v: int, u: int, n: int) -> "PadicNumber":
        """Normalise p^v * u to capped-relative form with <= n digits."""
        if n <= 0:
            return PadicNumber.zero(p, v)
        if u == 0:
            return PadicNumber.zero(p, v + n)
        k = int_val(u, p)
        if k:
            u //= ppow(p, k)
            v += k
            n -= k
            if n <= 0:
                return PadicNumber.zero(p, v)
        u %= ppow(p, n)
        if u == 0:
            return PadicNumber.zero(p, v + n)
        return PadicNumber(p, v, u, n)

    @staticmethod
    def zero(p: int, absprec: int = EXACT) -> "PadicNumber":
        return PadicNumber(p, absprec, 0, 0)

    @staticmethod
    def from_int(a: int, p: int, prec: int) -> "PadicNumber":
        if a == 0:
            return PadicNumber.zero(p)
        return PadicNumber.make(p, 0, a, prec + int_val(a, p))

    @staticmethod
    def from_fraction(a: Fraction | int, p: int, prec: int) -> "PadicNumber":
        if isinstance(a, int):
            return PadicNumber.from_int(a, p, prec)
        num = PadicNumber.from_int(a.numerator, p, prec + 2)
        den = PadicNumber.from_int(a.denominator, p, prec + 2)
        return (num / den).cap_rel(prec)

    # ------------------------------------------------------------------
    # inspection

    @property
    def is_zero(self) -> bool:
        return self.u == 0

    @property
    def absprec(self) -> int:
        """Exponent a such that the value is known modulo p^a."""
        return self.v if self.u == 0 else self.v + self.n

    def valuation(self) -> int:
        if self.u == 0:
            raise PrecisionError(f"valuation of (0 mod p^{self.v}) is not determined")
        return self.v

    def val_at_least(self, k: int) -> bool:
        """True when the value provably lies in p^k Z_p."""
        if self.u == 0:
            return self.v >= k
        return self.v >= k

    def is_unit(self) -> bool:
        return self.u != 0 and self.v == 0

    def residue(self, k: int = 1) -> int:
        """The value modulo p^k as an integer in [0, p^k)."""
        if self.u == 0:
            if self.v < k:
                raise PrecisionError("residue beyond known precision of zero")
            return 0
        if self.v < 0:
            raise PrecisionError("residue of a number of negative valuation")
        if self.v + self.n < k:
            raise PrecisionError(f"residue mod p^{k} from O(p^{self.v + self.n})")
        return (self.u * ppow(self.p, self.v)) % ppow(self.p, k)

    def lift(self) -> Fraction:
        """Exact rational lift p^v * u of the known digits."""
        if self.u == 0:
            return Fraction(0)
        if self.v >= 0:
            return Fraction(self.u * ppow(self.p, self.v))
        return Fraction(self.u, ppow(self.p, -self.v))

    def symmetric_residue(self, k: int) -> int:
        """Residue mod p^k mapped to (-p^k/2, p^k/2]."""
        r = self.residue(k)
        m = ppow(self.p, k)
        return r - m if 2 * r > m else r

    def cap_abs(self, a: int) -> "PadicNumber":
        """Forget digits at and above p^a."""
        if self.u == 0:
            return self if self.v <= a else PadicNumber.zero(self.p, a)
        if self.v >= a:
            return PadicNumber.zero(self.p, a)
        return PadicNumber.make(self.p, self.v, self.u, min(self.n, a - self.v))

    def cap_rel(self, n: int) -> "PadicNumber":
        """Keep at most n significant digits."""
        if self.u == 0 or self.n <= n:
            return self
        return PadicNumber.make(self.p, self.v, self.u, n)

    # ------------------------------------------------------------------
    # arithmetic

    def _coerce(self, other):
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        if isinstance(other, int):
            return PadicNumber.from_int(other, self.p, self.n if self.n else 60)
        if isinstance(other, Fraction):
            return PadicNumber.from_fraction(other, self.p, self.n if self.n else 60)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        if self.u == 0 and o.u == 0:
            return PadicNumber.zero(p, min(self.v, o.v))
        if self.u == 0:
            return o.cap_abs(min(self.v, o.absprec))
        if o.u == 0:
            return self.cap_abs(min(o.v, self.absprec))
        v = min(self.v, o.v)
        a = min(self.absprec, o.absprec)
        if a <= v:
            return PadicNumber.zero(p, a)
        m = ppow(p, a - v)
        s = (self.u * ppow(p, self.v - v) + o.u * ppow(p, o.v - v)) % m
        return PadicNumber.make(p, v, s, a - v)

    __radd__ = __add__

    def __neg__(self):
        if self.u == 0:
            return self
        return PadicNumber(self.p, self.v, ppow(self.p, self.n) - self.u, self.n)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        if self.u == 0 or o.u == 0:
            # O(p^a) * (p^v unit) = O(p^(a+v)); O(p^a) * O(p^b) = O(p^(a+b))
            av = self.v if self.u == 0 else self.v
            bv = o.v if o.u == 0 else o.v
            return PadicNumber.zero(p, min(av + bv, EXACT))
        n = min(self.n, o.n)
        u = (self.u * o.u) % ppow(p, n)
        return PadicNumber(p, self.v + o.v, u, n)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.u == 0:
            raise ZeroDivisionError("inverse of p-adic zero")
        u = pow(self.u, -1, ppow(self.p, self.n))
        return PadicNumber(self.p, -self.v, u, self.n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.u == 0:
            raise ZeroDivisionError("division by p-adic zero")
        if self.u == 0:
            return PadicNumber.zero(self.p, self.v - o.v)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, e: int):
        if e == 0:
            return PadicNumber.from_int(1, self.p, self.n if self.n else 60)
        b = self.inverse() if e < 0 else self
        e = abs(e)
        acc = None
        while e:
            if e & 1:
                acc = b if acc is None else acc * b
            b = b * b
            e >>= 1
        return acc

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = (
                PadicNumber.from_int(other, self.p, max(self.n, 1))
                if isinstance(other, int)
                else PadicNumber.from_fraction(other, self.p, max(self.n, 1))
            )
        if not isinstance(other, PadicNumber):
            return NotImplemented
        d = self - other
        return d.u == 0

    def __hash__(self):
        raise TypeError("PadicNumber is not hashable (precision-sensitive equality)")

    def sqrt(self) -> "PadicNumber":
        """A square root, odd residue characteristic only."""
        p = self.p
        if p == 2:
            raise NotImplementedError("sqrt at p=2 not needed here")
        if self.u == 0:
            return PadicNumber.zero(p, (self.v + 1) // 2)
        if self.v % 2:
            raise ValueError("sqrt of odd-valuation element is not in Q_p")
        u0 = self.u % p
        r = _sqrt_mod_p(u0, p)
        if r is None:
            raise ValueError(f"{u0} is not a square mod {p}")
        # Newton: x <- (x + u/x)/2, doubling correct digits each pass.
        n = self.n
        x = r
        known = 1
        while known < n:
            known = min(2 * known, n)
            m = ppow(p, known)
            x = (x + self.u % m * pow(x, -1, m)) % m * pow(2, -1, m) % m
        return PadicNumber.make(p, self.v // 2, x, n)

    def __repr__(self):
        if self.u == 0:
            if self.v >= EXACT:
                return f"0 (exact, p={self.p})"
            return f"O({self.p}^{self.v})"
        return f"{self.p}^{self.v}*{self.u} + O({self.p}^{self.v + self.n})"


def _sqrt_mod_p(a: int, p: int) -> int | None:
    """Tonelli-Shanks; returns the even... no, the smaller root, or None."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    # general case
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return min(r, p - r)


# ----------------------------------------------------------------------
# logarithm

def teichmuller(x: PadicNumber) -> PadicNumber:
    """The root of unity congruent to the unit part of x mod p."""
    if not x.is_unit():
        raise ValueError("Teichmuller lift needs a unit")
    p, n = x.p, x.n
    m = ppow(p, n)
    w = x.u % p
    # w^(p^k) stabilises once p^k >= p^n
    for _ in range(n + 1):
        w = pow(w, p, m)
    return PadicNumber(p, 0, w, n)


def padic_log(x: PadicNumber) -> PadicNumber:
    """Iwasawa-branch logarithm: log p = 0 and log kills roots of unity.

    Extended to all of Q_p^* by log(p^v u) = log(u^(p-1)) / (p-1).  Killing
    torsion means log(-x) = log(x), which is what lets square roots and
    unit normalisations downstream be taken up to sign.
    """
    if x.u == 0:
        raise PrecisionError("log of p-adic zero")
    p, n = x.p, x.n
    # guard absorbs the v_p(k) losses from dividing by the term index
    guard = 2
    while ppow(p, guard) <= n + guard + 2:
        guard += 1
    guard += 1
    nn = n + guard
    m = ppow(p, nn)
    z = (pow(x.u, p - 1, m) - 1) % m
    if z == 0:
        return PadicNumber.zero(p, n)
    # log(1+z) = sum_{k>=1} (-1)^(k+1) z^k / k with val z >= 1, so terms
    # with k - v_p(k) >= nn contribute nothing mod p^nn.
    acc = 0
    term = 1
    kmax = nn + guard + 2
    for k in range(1, kmax + 1):
        term = term * z % m
        if term == 0:
            break
        e = int_val(k, p)
        piece = term // ppow(p, e) if e else term
        piece = piece * pow(k // ppow(p, e), -1, m) % m
        acc = (acc - piece) % m if k % 2 == 0 else (acc + piece) % m
    acc = acc * pow(p - 1, -1, m) % m
    out = PadicNumber.make(p, 0, acc, nn)
    return out.cap_abs(n) if out.u else PadicNumber.zero(p, n)


# ----------------------------------------------------------------------
# univariate Hensel

def poly_eval(coeffs: list[PadicNumber], x: PadicNumber) -> PadicNumber:
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def poly_derivative(coeffs: list[PadicNumber]) -> list[PadicNumber]:
    return [c * k for k, c in enumerate(coeffs) if k >= 1]


def hensel_univariate(coeffs: list[PadicNumber], x0: PadicNumber,
                      target: int | None = None) -> PadicNumber:
    """Newton-lift a simple root of the polynomial from the seed x0.

    Requires val f(x0) > 2 val f'(x0); raises NoConvergence otherwise.
    The result is correct modulo p^target (default: the precision the
    inputs support).
    """
    dcoeffs = poly_derivative(coeffs)
    f0 = poly_eval(coeffs, x0)
    d0 = poly_eval(dcoeffs, x0)
    if d0.u == 0:
        raise NoConvergence("derivative vanishes at seed to working precision")
    dv = d0.valuation()
    fv = f0.absprec if f0.u == 0 else f0.valuation()
    if fv <= 2 * dv:
        raise NoConvergence(f"val f(x0)={fv} <= 2 val f'(x0)={2*dv}")
    if target is None:
        target = min(c.absprec for c in coeffs if not (c.u == 0 and c.v >= EXACT))
    x = x0
    for _ in range(64):
        fx = poly_eval(coeffs, x)
        if fx.u == 0 and fx.v >= target:
            return x
        dx = poly_eval(dcoeffs, x)
        x = x - fx / dx
    fx = poly_eval(coeffs, x)
    if fx.u == 0 and fx.v >= target:
        return x
    raise NoConvergence("Newton did not reach target precision")


# ----------------------------------------------------------------------
# one-variable series

class PadicSeries1:
    """Truncated series sum_{k=shift}^{cutoff-1} c_k t^k + O(t^cutoff).

    shift may be negative (finite Laurent tail).  Coefficients are stored
    densely from shift; exponents below shift are exact zeros.
    """

    __slots__ = ("p", "shift", "coeffs", "cutoff")

    def __init__(self, p: int, shift: int, coeffs: list[PadicNumber], cutoff: int):
        assert cutoff - shift == len(coeffs)
        self.p = p
        self.shift = shift
        self.coeffs = coeffs
        self.cutoff = cutoff

    # -- construction --------------------------------------------------

    @staticmethod
    def from_coeffs(p: int, pairs, cutoff: int, prec: int) -> "PadicSeries1":
        """pairs: iterable of (exponent, int|Fraction|PadicNumber)."""
        d = {}
        for k, c in pairs:
            if not isinstance(c, PadicNumber):
                c = PadicNumber.from_fraction(Fraction(c), p, prec)
            d[k] = d[k] + c if k in d else c
        if not d:
            return PadicSeries1(p, cutoff, [], cutoff)
        shift = min(min(d), cutoff)
        coeffs = [d.get(k, PadicNumber.zero(p)) for k in range(shift, cutoff)]
        return PadicSeries1(p, shift, coeffs, cutoff)

    @staticmethod
    def zero(p: int, cutoff: int) -> "PadicSeries1":
        return PadicSeries1(p, cutoff, [], cutoff)

    @staticmethod
    def constant(c: PadicNumber, cutoff: int) -> "PadicSeries1":
        return PadicSeries1(c.p, 0, [c] + [PadicNumber.zero(c.p)] * (cutoff - 1), cutoff)

    @staticmethod
    def identity(p: int, cutoff: int, prec: int) -> "PadicSeries1":
        one = PadicNumber.from_int(1, p, prec)
        co = [PadicNumber.zero(p)] * (cutoff - 1)
        if cutoff > 1:
            co[0] = one
        return PadicSeries1(p, 1, co, cutoff)

    def copy(self) -> "PadicSeries1":
        return PadicSeries1(self.p, self.shift, list(self.coeffs), self.cutoff)

    # -- inspection -----------------------------------------------------

    def coeff(self, k: int) -> PadicNumber:
        if k >= self.cutoff:
            raise IndexError(f"coefficient {k} beyond O(t^{self.cutoff})")
        if k < self.shift:
            return PadicNumber.zero(self.p)
        return self.coeffs[k - self.shift]

    def tval(self) -> int:
        """Smallest exponent with a coefficient not known to vanish."""
        for i, c in enumerate(self.coeffs):
            if c.u != 0:
                return self.shift + i
        return self.cutoff

    def normalized(self) -> "PadicSeries1":
        """Drop leading coefficients that are exact zeros."""
        i = 0
        while i < len(self.coeffs) and self.coeffs[i].u == 0 and self.coeffs[i].v >= EXACT:
            i += 1
        return PadicSeries1(self.p, self.shift + i, self.coeffs[i:], self.cutoff)

    def truncate(self, cutoff: int) -> "PadicSeries1":
        if cutoff >= self.cutoff:
            return self
        if cutoff <= self.shift:
            return PadicSeries1(self.p, cutoff, [], cutoff)
        return PadicSeries1(self.p, self.shift, self.coeffs[: cutoff - self.shift], cutoff)

    def min_coeff_val(self) -> int:
        v = EXACT
        for c in self.coeffs:
            if c.u != 0:
                v = min(v, c.v)
        return v

    # -- ring operations -------------------------------------------------

    def __add__(self, other: "PadicSeries1") -> "PadicSeries1":
        cutoff = min(self.cutoff, other.cutoff)
        shift = min(self.shift, other.shift, cutoff)
        coeffs = []
        for k in range(shift, cutoff):
            a = self.coeff(k) if k < self.cutoff else PadicNumber.zero(self.p)
            b = other.coeff(k) if k < other.cutoff else PadicNumber.zero(self.p)
            coeffs.append(a + b)
        return PadicSeries1(self.p, shift, coeffs, cutoff)

    def __neg__(self) -> "PadicSeries1":
        return PadicSeries1(self.p, self.shift, [-c for c in self.coeffs], self.cutoff)

    def __sub__(self, other: "PadicSeries1") -> "PadicSeries1":
        return self + (-other)

    def scale(self, c) -> "PadicSeries1":
        if not isinstance(c, PadicNumber):
            c = PadicNumber.from_fraction(Fraction(c), self.p,
                                          max(60, _max_prec(self) + 4))
        return PadicSeries1(self.p, self.shift, [a * c for a in self.coeffs], self.cutoff)

    def shift_exp(self, k: int) -> "PadicSeries1":
        """Multiply by t^k."""
        return PadicSeries1(self.p, self.shift + k, self.coeffs, self.cutoff + k)

    def __mul__(self, other: "PadicSeries1") -> "PadicSeries1":
        a, b = self.normalized(), other.normalized()
        # product is known below min(cutoff_a + shift_b, cutoff_b + shift_a)
        cutoff = min(a.cutoff + b.shift, b.cutoff + a.shift)
        shift = a.shift + b.shift
        if cutoff <= shift:
            return PadicSeries1(self.p, cutoff, [], cutoff)
        out = [PadicNumber.zero(self.p) for _ in range(cutoff - shift)]
        for i, ca in enumerate(a.coeffs):
            if ca.u == 0 and ca.v >= EXACT:
                continue
            for j, cb in enumerate(b.coeffs):
                k = i + j
                if k >= cutoff - shift:
                    break
                if cb.u == 0 and cb.v >= EXACT:
                    continue
                out[k] = out[k] + ca * cb
        return PadicSeries1(self.p, shift, out, cutoff)

    def invert_multiplicative(self) -> "PadicSeries1":
        """1/self; leading coefficient must be a p-adic unit times p^k."""
        s = self.normalized()
        lead = s.coeffs[0] if s.coeffs else None
        if lead is None or lead.u == 0:
            raise ZeroDivisionError("series inverse needs an invertible leading term")
        m = s.shift
        # write self = c t^m (1 + w), invert the unit part by geometric Newton
        unit = PadicSeries1(self.p, 0, s.coeffs, s.cutoff - m)
        c0inv = lead.inverse()
        n = unit.cutoff
        inv = PadicSeries1.constant(c0inv, 1)
        known = 1
        one = PadicSeries1.constant(PadicNumber.from_int(1, self.p, lead.n), n)
        while known < n:
            known = min(2 * known, n)
            u = unit.truncate(known)
            iv = PadicSeries1(self.p, inv.shift, list(inv.coeffs), inv.cutoff)
            iv = _pad_cutoff(iv, known)
            # Newton: inv <- inv*(2 - unit*inv)
            t = one.truncate(known).scale(2) - (u * iv).truncate(known)
            inv = (iv * t).truncate(known)
        return inv.shift_exp(-m)

    def __truediv__(self, other: "PadicSeries1") -> "PadicSeries1":
        return self * other.invert_multiplicative()

    # -- calculus ---------------------------------------------------------

    def derivative(self) -> "PadicSeries1":
        coeffs = []
        for k in range(self.shift, self.cutoff):
            coeffs.append(self.coeff(k) * k)
        s = PadicSeries1(self.p, self.shift - 1, coeffs, self.cutoff - 1)
        return s.normalized()

    def integrate(self) -> "PadicSeries1":
        """Termwise primitive with zero constant term.

        Division by k+1 costs v_p(k+1) digits on that coefficient, which
        the coefficient's own precision field records.
        """
        coeffs = []
        for k in range(self.shift, self.cutoff):
            if k == -1:
                c = self.coeff(k)
                if c.u != 0:
                    raise ValueError("cannot integrate a t^-1 term")
                coeffs.append(PadicNumber.zero(self.p))
                continue
            c = self.coeff(k)
            if c.u == 0:
                coeffs.append(PadicNumber.zero(self.p, c.v))
            else:
                coeffs.append(c / PadicNumber.from_int(k + 1, self.p, c.n + 4))
        out = PadicSeries1(self.p, self.shift + 1, coeffs, self.cutoff + 1)
        if self.shift + 1 > 0:
            out = _pad_low(out, 0)
        return out

    # -- composition -------------------------------------------------------

    def compose(self, inner: "PadicSeries1") -> "PadicSeries1":
        """self(inner(t)); inner must have strictly positive t-valuation.

        Laurent tails in self are handled through the multiplicative
        inverse of inner, which must then have unit leading coefficient.
        """
        g = inner.normalized()
        if g.tval() < 1:
            raise ValueError("composition needs inner series with t-val >= 1")
        # f tail: O(g^cutoff) = O(t^(cutoff*tval g)). g tail: enters the
        # k-th term at order >= cutoff_g + k - 1, worst at k = shift.
        extra = 0 if self.shift >= 0 else self.shift - 1
        cutoff = min(self.cutoff * max(g.tval(), 1), g.cutoff + extra)
        p = self.p
        out = PadicSeries1.zero(p, cutoff)
        # polynomial (non-negative) part by Horner down to exponent s,
        # then one multiplication by g^s
        s = max(self.shift, 0)
        top = self.cutoff - 1
        acc = PadicSeries1.constant(self.coeff(top), cutoff) if top >= s else PadicSeries1.zero(p, cutoff)
        for k in range(top - 1, s - 1, -1):
            acc = (acc * g).truncate(cutoff) + PadicSeries1.constant(self.coeff(k), cutoff)
        for _ in range(s):
            acc = (acc * g).truncate(cutoff)
        out = out + acc
        if self.shift < 0:
            ginv = g.invert_multiplicative()
            pw = ginv
            for k in range(-1, self.shift - 1, -1):
                c = self.coeff(k)
                if c.u != 0:
                    out = out + pw.scale(c).truncate(cutoff)
                if k > self.shift:
                    pw = (pw * ginv)
            out = out.truncate(cutoff)
        return out

    def compose_padic(self, inner: "PadicSeries1") -> "PadicSeries1":
        """self(inner) where inner may carry a constant term, provided
        every coefficient of inner has valuation >= 1.

        The outer sum then converges p-adically rather than t-adically:
        the omitted tail of self contributes O(p^cutoff) to every
        coefficient, which is recorded as an absolute-precision cap.
        """
        g = inner.normalized()
        if self.shift < 0 or g.shift < 0:
            raise ValueError("compose_padic does not take Laurent tails")
        gv = g.min_coeff_val()
        if gv < 1:
            raise ValueError("compose_padic needs all inner coefficients in pZ_p")
        p = self.p
        cutoff = g.cutoff
        top = self.cutoff - 1
        acc = PadicSeries1.constant(self.coeff(top), cutoff)
        for k in range(top - 1, -1, -1):
            acc = (acc * g).truncate(cutoff) + PadicSeries1.constant(self.coeff(k), cutoff)
        mv = min(0, self.min_coeff_val())
        cap = self.cutoff * gv + mv
        return acc.map(lambda c: c.cap_abs(min(c.absprec, cap)))

    def reversion(self) -> "PadicSeries1":
        """Compositional inverse of a series t*(unit) + O(t^2).

        Newton doubling; composing with the padded approximation is fine
        because the error term has positive t-valuation, which extends the
        product's known order back up to the step target.
        """
        s = self.normalized()
        if s.tval() != 1:
            raise ValueError("reversion needs t-valuation exactly 1")
        c1 = s.coeff(1)
        n = s.cutoff
        p = self.p
        g = PadicSeries1(p, 1, [c1.inverse()], 2)
        ds = s.derivative()
        known = 2
        while known < n:
            nxt = min(2 * known, n)
            gg = _pad_cutoff(g, nxt)
            fg = s.truncate(nxt).compose(gg)
            err = fg - PadicSeries1.identity(p, nxt, c1.n)
            if err.tval() >= nxt:
                g = gg
                known = nxt
                continue
            dfg = ds.truncate(nxt).compose(gg)
            corr = err * dfg.invert_multiplicative()
            g = (gg - corr).truncate(nxt)
            known = nxt
        return _pad_cutoff(g, n)

    # -- evaluation ---------------------------------------------------------

    def eval(self, x: PadicNumber) -> PadicNumber:
        """Evaluate at a point of positive valuation (or any unit if the
        series is a polynomial with nonnegative exponents)."""
        p = self.p
        xv = x.valuation() if x.u != 0 else x.v
        if xv < 1:
            raise ValueError("series evaluation needs val(x) >= 1")
        acc = PadicNumber.zero(p)
        for k in range(self.cutoff - 1, max(self.shift, 0) - 1, -1):
            acc = acc * x + self.coeff(k)
        for _ in range(max(self.shift, 0)):
            acc = acc * x
        if self.shift < 0:
            xi = x.inverse()
            pw = xi
            for k in range(-1, self.shift - 1, -1):
                c = self.coeff(k)
                if c.u != 0:
                    acc = acc + c * pw
                pw = pw * xi
        # truncation error: the dropped tail is O(x^cutoff)
        tail = self.cutoff * xv
        return acc.cap_abs(min(acc.absprec, tail))

    def eval_unit(self, x: PadicNumber, tail: int) -> PadicNumber:
        """Evaluate at any x in Z_p, given a bound on the omitted tail.

        Unlike eval, the truncation error cannot be read off from val(x)
        alone; the caller must supply tail, a lower bound on the
        valuation of the dropped terms sum_{k >= cutoff} c_k x^k.
        """
        if self.shift < 0:
            raise ValueError("eval_unit needs nonnegative exponents")
        if x.u != 0 and x.valuation() < 0:
            raise ValueError("eval_unit needs val(x) >= 0")
        p = self.p
        acc = PadicNumber.zero(p)
        for k in range(self.cutoff - 1, -1, -1):
            acc = acc * x + self.coeff(k)
        return acc.cap_abs(min(acc.absprec, tail))

    # -- analytic maps --------------------------------------------------------

    def exp(self) -> "PadicSeries1":
        """exp(self) for a series with t-valuation >= 1.

        Coefficient recurrence m e_m = sum_k k h_k e_{m-k}; the division
        by m costs v_p(m) digits on that coefficient, which the result's
        precision fields record.
        """
        s = self.normalized()
        if s.tval() < 1:
            raise ValueError("series exp needs t-val >= 1")
        p, n = self.p, self.cutoff
        wp = _max_prec(s)
        h = [s.coeff(k) for k in range(n)]
        e = [PadicNumber.from_int(1, p, wp)]
        for m in range(1, n):
            acc = PadicNumber.zero(p)
            for k in range(1, m + 1):
                if h[k].u != 0:
                    acc = acc + h[k] * e[m - k] * k
            if acc.u == 0:
                e.append(acc)
            else:
                e.append(acc / PadicNumber.from_int(m, p, acc.n + 4))
        return PadicSeries1(p, 0, e, n)

    def log1p(self) -> "PadicSeries1":
        """log(1 + self) for a series with t-valuation >= 1."""
        s = self.normalized()
        if s.tval() < 1:
            raise ValueError("series log1p needs t-val >= 1")
        p, n = self.p, self.cutoff
        out = PadicSeries1.zero(p, n)
        term = PadicSeries1.constant(PadicNumber.from_int(1, p, _max_prec(s)), n)
        kmax = (n // max(s.tval(), 1)) + 1
        for k in range(1, kmax + 1):
            term = (term * s).truncate(n)
            c = Fraction((-1) ** (k + 1), k)
            out = out + term.scale(PadicNumber.from_fraction(c, p, _max_prec(s) + 4))
        return out

    def log_unit(self) -> "PadicSeries1":
        """log of a series with unit constant term, Iwasawa branch on it."""
        s = self.normalized()
        c0 = s.coeff(0)
        if s.shift != 0 and s.tval() != 0:
            raise ValueError("log needs a unit constant term")
        if not c0.is_unit():
            raise ValueError("log needs a unit constant term")
        rest = (s - PadicSeries1.constant(c0, s.cutoff)).scale(c0.inverse())
        return rest.log1p() + PadicSeries1.constant(padic_log(c0), s.cutoff)

    def sqrt_unit(self, branch_hint: PadicNumber) -> "PadicSeries1":
        """Square root with unit constant term congruent to branch_hint."""
        s = self.normalized()
        c0 = s.coeff(0)
        if not c0.is_unit():
            raise ValueError("series sqrt needs a unit constant term")
        r0 = c0.sqrt()
        if (r0 - branch_hint).u != 0 and (r0 - branch_hint).valuation() == 0:
            r0 = -r0
        n = s.cutoff
        g = PadicSeries1.constant(r0, 1)
        known = 1
        half = PadicNumber.from_fraction(Fraction(1, 2), self.p, _max_prec(s))
        while known < n:
            known = min(2 * known, n)
            gg = _pad_cutoff(g, known)
            g = ((gg + (s.truncate(known) * gg.invert_multiplicative()).truncate(known)).scale(half)).truncate(known)
        return g

    def scale_variable(self, c) -> "PadicSeries1":
        """Substitute t -> c*t, multiplying the k-th coefficient by c^k."""
        if isinstance(c, int):
            c = PadicNumber.from_int(c, self.p, _max_prec(self) + 4)
        out = []
        pw = c ** self.shift if self.shift else PadicNumber.from_int(1, self.p, c.n)
        for a in self.coeffs:
            out.append(a * pw)
            pw = pw * c
        return PadicSeries1(self.p, self.shift, out, self.cutoff)

    def map(self, f) -> "PadicSeries1":
        return PadicSeries1(self.p, self.shift, [f(c) for c in self.coeffs], self.cutoff)

    def __repr__(self):
        bits = []
        for k in range(self.shift, min(self.cutoff, self.shift + 6)):
            c = self.coeff(k)
            if c.u != 0:
                bits.append(f"({c})*t^{k}")
        tail = " + ..." if self.cutoff > self.shift + 6 else ""
        return " + ".join(bits or ["0"]) + tail + f" + O(t^{self.cutoff})"


def _pad_cutoff(s: PadicSeries1, cutoff: int) -> PadicSeries1:
    if cutoff <= s.cutoff:
        return s.truncate(cutoff)
    pad = [PadicNumber.zero(s.p) for _ in range(cutoff - s.cutoff)]
    return PadicSeries1(s.p, s.shift, s.coeffs + pad, cutoff)


def _pad_low(s: PadicSeries1, shift: int) -> PadicSeries1:
    if shift >= s.shift:
        return s
    pad = [PadicNumber.zero(s.p) for _ in range(s.shift - shift)]
    return PadicSeries1(s.p, shift, pad + s.coeffs, s.cutoff)


def _max_prec(s: PadicSeries1) -> int:
    m = 1
    for c in s.coeffs:
        if c.u != 0:
            m = max(m, c.n)
    return max(m, 20)


# ----------------------------------------------------------------------
# two-variable series

class PadicSeries2:
    """Truncated bivariate series, total degree < cutoff, sparse storage.

    cutoff = EXACT marks a polynomial: no truncation tail, so evaluation
    is not tail-capped.
    """

    __slots__ = ("p", "coeffs", "cutoff")

    def __init__(self, p: int, coeffs: dict[tuple[int, int], PadicNumber], cutoff: int):
        self.p = p
        self.coeffs = {k: c for k, c in coeffs.items() if c.u != 0 or c.v < EXACT}
        self.cutoff = cutoff

    @staticmethod
    def from_terms(p: int, terms, cutoff: int, prec: int) -> "PadicSeries2":
        d: dict[tuple[int, int], PadicNumber] = {}
        for (i, j), c in terms:
            if i + j >= cutoff:
                continue
            if not isinstance(c, PadicNumber):
                c = PadicNumber.from_fraction(Fraction(c), p, prec)
            key = (i, j)
            d[key] = d[key] + c if key in d else c
        return PadicSeries2(p, d, cutoff)

    @staticmethod
    def zero(p: int, cutoff: int) -> "PadicSeries2":
        return PadicSeries2(p, {}, cutoff)

    def coeff(self, i: int, j: int) -> PadicNumber:
        if i + j >= self.cutoff:
            raise IndexError("coefficient beyond truncation")
        return self.coeffs.get((i, j), PadicNumber.zero(self.p))

    def __add__(self, other: "PadicSeries2") -> "PadicSeries2":
        cutoff = min(self.cutoff, other.cutoff)
        d = {k: c for k, c in self.coeffs.items() if sum(k) < cutoff}
        for k, c in other.coeffs.items():
            if sum(k) >= cutoff:
                continue
            d[k] = d[k] + c if k in d else c
        return PadicSeries2(self.p, d, cutoff)

    def __neg__(self) -> "PadicSeries2":
        return PadicSeries2(self.p, {k: -c for k, c in self.coeffs.items()}, self.cutoff)

    def __sub__(self, other: "PadicSeries2") -> "PadicSeries2":
        return self + (-other)

    def scale(self, c: PadicNumber) -> "PadicSeries2":
        return PadicSeries2(self.p, {k: a * c for k, a in self.coeffs.items()}, self.cutoff)

    def __mul__(self, other: "PadicSeries2") -> "PadicSeries2":
        cutoff = min(self.cutoff, other.cutoff)
        d: dict[tuple[int, int], PadicNumber] = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in other.coeffs.items():
                i, j = i1 + i2, j1 + j2
                if i + j >= cutoff:
                    continue
                key = (i, j)
                t = c1 * c2
                d[key] = d[key] + t if key in d else t
        return PadicSeries2(self.p, d, cutoff)

    def partial(self, which: int) -> "PadicSeries2":
        d: dict[tuple[int, int], PadicNumber] = {}
        for (i, j), c in self.coeffs.items():
            if which == 0 and i >= 1:
                d[(i - 1, j)] = c * i
            elif which == 1 and j >= 1:
                d[(i, j - 1)] = c * j
        # a polynomial stays a polynomial
        cut = self.cutoff if self.cutoff >= EXACT else self.cutoff - 1
        return PadicSeries2(self.p, d, cut)

    def eval(self, x: PadicNumber, y: PadicNumber) -> PadicNumber:
        # polynomials (no tail) converge on all of Z_p x Z_p
        need = 0 if self.cutoff >= EXACT else 1
        for z in (x, y):
            zv = z.valuation() if z.u != 0 else z.v
            if zv < need:
                raise ValueError("bivariate evaluation needs val >= 1 in each slot")
        acc = PadicNumber.zero(self.p)
        wp = 40
        for c in self.coeffs.values():
            if c.u != 0:
                wp = max(wp, c.n + 10)
        xpow: dict[int, PadicNumber] = {0: PadicNumber.from_int(1, self.p, wp)}
        ypow = dict(xpow)
        def pw(cache, base, k):
            if k not in cache:
                cache[k] = pw(cache, base, k - 1) * base
            return cache[k]
        for (i, j), c in sorted(self.coeffs.items()):
            acc = acc + c * pw(xpow, x, i) * pw(ypow, y, j)
        if self.cutoff >= EXACT:
            return acc
        xv = x.valuation() if x.u != 0 else x.v
        yv = y.valuation() if y.u != 0 else y.v
        tail = self.cutoff * min(xv, yv)
        return acc.cap_abs(min(acc.absprec, tail))

    def min_coeff_val(self) -> int:
        v = EXACT
        for c in self.coeffs.values():
            if c.u != 0:
                v = min(v, c.v)
        return v

    def __repr__(self):
        items = sorted(self.coeffs.items())[:6]
        bits = [f"({c})*x^{i}*y^{j}" for (i, j), c in items]
        more = " + ..." if len(self.coeffs) > 6 else ""
        return " + ".join(bits or ["0"]) + more + f" + O(deg {self.cutoff})"


# ----------------------------------------------------------------------
# bivariate Hensel

def hensel_bivariate(system, z0: tuple[PadicNumber, PadicNumber],
                     target: int) -> tuple[PadicNumber, PadicNumber]:
    """Newton for a pair of equations in two unknowns.

    `system` provides .values(x, y) -> (F1, F2) and
    .jacobian(x, y) -> ((a,b),(c,d)).  Convergence needs
    min val F > 2 val det J at the seed; otherwise SubdivisionNeeded is
    raised and the caller splits the polydisk.
    """
    x, y = z0
    f1, f2 = system.values(x, y)
    (a, b), (c, d) = system.jacobian(x, y)
    det = a * d - b * c
    if det.u == 0:
        raise SubdivisionNeeded("jacobian determinant vanishes to working precision")
    dv = det.valuation()
    fv = min(_valfloor(f1), _valfloor(f2))
    if fv <= 2 * dv:
        raise SubdivisionNeeded(f"val F = {fv} <= 2 val det J = {2 * dv}")
    stalled = 0
    best = fv
    for _ in range(80):
        if min(_valfloor(f1), _valfloor(f2)) >= target:
            return x, y
        det = a * d - b * c
        if det.u == 0:
            raise NoConvergence("jacobian degenerated during iteration")
        di = det.inverse()
        dx = (d * f1 - b * f2) * di
        dy = (a * f2 - c * f1) * di
        x, y = x - dx, y - dy
        f1, f2 = system.values(x, y)
        (a, b), (c, d) = system.jacobian(x, y)
        fv = min(_valfloor(f1), _valfloor(f2))
        if fv <= best:
            stalled += 1
            if stalled >= 3:
                break
        else:
            stalled = 0
            best = fv
    if min(_valfloor(f1), _valfloor(f2)) >= target:
        return x, y
    raise NoConvergence(
        f"bivariate Newton stalled at residual valuation {best}, target {target}; "
        "input precision (series tail or coefficient digits) does not support the target"
    )


def _valfloor(x: PadicNumber) -> int:
    return x.v if x.u == 0 else x.v


class Series2System:
    """Adapter: a pair of PadicSeries2 as a system for hensel_bivariate."""

    def __init__(self, f1: PadicSeries2, f2: PadicSeries2):
        self.f1 = f1
        self.f2 = f2
        self._j = (f1.partial(0), f1.partial(1), f2.partial(0), f2.partial(1))

    def values(self, x, y):
        return self.f1.eval(x, y), self.f2.eval(x, y)

    def jacobian(self, x, y):
        j11, j12, j21, j22 = self._j
        return ((j11.eval(x, y), j12.eval(x, y)),
                (j21.eval(x, y), j22.eval(x, y)))
