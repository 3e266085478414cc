"""Weierstrass models over imaginary quadratic fields and their reductions.

A model is y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6 with integral
a-invariants (a1, a3 are allowed to be nonzero and usually are for the
minimal models we take as input).  Affine points are (x, y) pairs of
QuadRat; the point at infinity is None.

The module carries four layers:

  * exact chord-tangent group law over K,
  * reductions mod degree-one primes with naive point counting,
  * division polynomials, both as univariate polynomials in x (for series
    work on residue disks) and as a memoised value recursion (for large
    indices at p-adic points),
  * the formal group at the origin: x(t), y(t), the invariant
    differential, formal logarithm/exponential, and parameter extraction
    for points near the origin.

Everything downstream (sigma functions, heights, disk solving) builds on
these pieces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .padic import (
    PadicNumber,
    PadicSeries1,
    poly_eval,
)
from .quadfield import (
    PrimeSplitting,
    QuadField,
    QuadInt,
    QuadRat,
    ResidueField,
    embed,
    format_element,
)


class CurveError(ValueError):
    pass


KPoint = tuple[QuadRat, QuadRat] | None  # None is the point at infinity


class CurveModel:
    """An integral Weierstrass model over K = Q(sqrt(d))."""

    def __init__(self, K: QuadField, a1: QuadInt, a2: QuadInt, a3: QuadInt,
                 a4: QuadInt, a6: QuadInt):
        self.K = K
        self.a1, self.a2, self.a3, self.a4, self.a6 = a1, a2, a3, a4, a6
        self.b2 = a1 * a1 + 4 * a2
        self.b4 = 2 * a4 + a1 * a3
        self.b6 = a3 * a3 + 4 * a6
        self.b8 = (a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4
                   + a2 * a3 * a3 - a4 * a4)
        self.c4 = self.b2 * self.b2 - 24 * self.b4
        self.disc = (-self.b2 * self.b2 * self.b8 - 8 * self.b4**3
                     - 27 * self.b6 * self.b6 + 9 * self.b2 * self.b4 * self.b6)
        if not self.disc:
            raise CurveError("singular model")

    def a_invariants(self) -> tuple[QuadInt, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    # -- point predicates ---------------------------------------------------

    def on_curve(self, P: KPoint) -> bool:
        if P is None:
            return True
        x, y = P
        lhs = y * y + self.a1 * x * y + self.a3 * y
        rhs = x * x * x + self.a2 * x * x + self.a4 * x + self.a6
        return lhs == rhs

    def require_on_curve(self, P: KPoint):
        if not self.on_curve(P):
            raise CurveError(f"point {P} is not on the curve")

    # -- group law ------------------------------------------------------------

    def neg(self, P: KPoint) -> KPoint:
        if P is None:
            return None
        x, y = P
        return (x, -y - self.a1 * x - self.a3)

    def add(self, P: KPoint, Q: KPoint) -> KPoint:
        if P is None:
            return Q
        if Q is None:
            return P
        x1, y1 = P
        x2, y2 = Q
        a1, a2, a3, a4, a6 = (QuadRat.from_quadint(z) for z in self.a_invariants())
        if x1 == x2:
            if y2 == -y1 - a1 * x1 - a3:
                return None  # covers 2-torsion doubling as well
            if y1 != y2:
                raise CurveError("inputs share x but are neither equal nor inverse")
            lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / \
                (2 * y1 + a1 * x1 + a3)
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = lam * (x1 - x3) - y1 - a1 * x3 - a3
        return (x3, y3)

    def mul(self, n: int, P: KPoint) -> KPoint:
        if n < 0:
            return self.mul(-n, self.neg(P))
        R: KPoint = None
        B = P
        while n:
            if n & 1:
                R = self.add(R, B)
            B = self.add(B, B)
            n >>= 1
        return R

    # -- reductions -------------------------------------------------------------

    def reduce_at_side(self, spl: PrimeSplitting, side: int) -> "FpCurve":
        r = spl.rbar1 if side == 1 else spl.rbar2
        p = spl.p
        red = [(z.a + z.b * r) % p for z in self.a_invariants()]
        return FpCurve(p, *red)

    def residue_field(self, pi: QuadInt) -> ResidueField:
        return ResidueField(self.K, pi)

    def __repr__(self):
        return ("CurveModel(d={}, [{}])".format(
            self.K.d, ", ".join(format_element(z) for z in self.a_invariants())))


# ----------------------------------------------------------------------
# curves over prime fields

class FpCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F_p, p odd."""

    def __init__(self, p: int, a1: int, a2: int, a3: int, a4: int, a6: int):
        self.p = p
        self.a1, self.a2, self.a3, self.a4, self.a6 = (
            a1 % p, a2 % p, a3 % p, a4 % p, a6 % p)
        self._points: list | None = None

    def rhs(self, x: int) -> int:
        return (x * x * x + self.a2 * x * x + self.a4 * x + self.a6) % self.p

    def ys_at(self, x: int) -> list[int]:
        # y^2 + (a1 x + a3) y - rhs = 0
        p = self.p
        A = (self.a1 * x + self.a3) % p
        D = (A * A + 4 * self.rhs(x)) % p
        from .padic import _sqrt_mod_p
        if D == 0:
            return [(-A) * pow(2, -1, p) % p]
        s = _sqrt_mod_p(D, p)
        if s is None:
            return []
        i2 = pow(2, -1, p)
        return sorted({(-A + s) * i2 % p, (-A - s) * i2 % p})

    def points(self) -> list:
        """All points, affine tuples plus None; cached."""
        if self._points is None:
            pts = [None]
            for x in range(self.p):
                for y in self.ys_at(x):
                    pts.append((x, y))
            self._points = pts
        return self._points

    def count(self) -> int:
        n = len(self.points())
        a = self.p + 1 - n
        if a * a > 4 * self.p:
            raise CurveError(f"point count {n} violates the Hasse bound at p={self.p}")
        return n

    def trace(self) -> int:
        return self.p + 1 - self.count()

    def is_ordinary(self) -> bool:
        return self.trace() % self.p != 0

    def is_nonsingular(self) -> bool:
        d = FpCurve._disc(self)
        return d % self.p != 0

    @staticmethod
    def _disc(c: "FpCurve") -> int:
        b2 = c.a1 * c.a1 + 4 * c.a2
        b4 = 2 * c.a4 + c.a1 * c.a3
        b6 = c.a3 * c.a3 + 4 * c.a6
        b8 = (c.a1**2 * c.a6 + 4 * c.a2 * c.a6 - c.a1 * c.a3 * c.a4
              + c.a2 * c.a3**2 - c.a4**2)
        return (-b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6) % c.p

    # -- group law mod p -----------------------------------------------------

    def neg(self, P):
        if P is None:
            return None
        x, y = P
        return (x, (-y - self.a1 * x - self.a3) % self.p)

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        p = self.p
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2 and (y1 + y2 + self.a1 * x1 + self.a3) % p == 0:
            return None
        if P == Q:
            num = (3 * x1 * x1 + 2 * self.a2 * x1 + self.a4 - self.a1 * y1) % p
            den = (2 * y1 + self.a1 * x1 + self.a3) % p
        else:
            num = (y2 - y1) % p
            den = (x2 - x1) % p
        lam = num * pow(den, -1, p) % p
        x3 = (lam * lam + self.a1 * lam - self.a2 - x1 - x2) % p
        y3 = (lam * (x1 - x3) - y1 - self.a1 * x3 - self.a3) % p
        return (x3, y3)

    def mul(self, n: int, P):
        if n < 0:
            return self.mul(-n, self.neg(P))
        R = None
        B = P
        while n:
            if n & 1:
                R = self.add(R, B)
            B = self.add(B, B)
            n >>= 1
        return R

    def order_of(self, P) -> int:
        k = 1
        Q = P
        while Q is not None:
            Q = self.add(Q, P)
            k += 1
            if k > 5 * self.p + 10:
                raise CurveError("order search ran away; point not on curve?")
        return k

    def reduce_point(self, spl: PrimeSplitting, side: int, P: KPoint):
        """Reduce a K-point; None if it hits the origin."""
        if P is None:
            return None
        x, y = P
        ex = embed(x, spl, side)
        if ex.u != 0 and ex.valuation() < 0:
            return None
        ey = embed(y, spl, side)
        xr = 0 if ex.u == 0 else ex.residue()
        yr = 0 if ey.u == 0 else ey.residue()
        return (xr, yr)


# ----------------------------------------------------------------------
# division polynomials

def _poly_add(f, g, zero):
    n = max(len(f), len(g))
    out = []
    for k in range(n):
        a = f[k] if k < len(f) else zero
        b = g[k] if k < len(g) else zero
        out.append(a + b)
    return out


def _poly_sub(f, g, zero):
    return _poly_add(f, [-c for c in g], zero)


def _poly_mul(f, g, zero):
    if not f or not g:
        return []
    out = [zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return out


class DivisionPolynomials:
    """psi_m for a fixed model, in the two standard representations.

    Odd m: psi_m = u_m(x).  Even m: psi_m = psi_2 * u_m(x) with
    psi_2 = 2y + a1 x + a3.  The u_m satisfy a single recursion in both
    parities once B = psi_2^2 = 4x^3 + b2 x^2 + 2 b4 x + b6 is eliminated,
    which is what `univariate` memoises.  `value` runs the elliptic
    divisibility recursion directly on coordinates, which stays cheap for
    the large indices the height algorithm needs.
    """

    def __init__(self, curve: CurveModel):
        self.curve = curve
        K = curve.K
        zero, one = K.zero(), K.one()
        b2, b4, b6, b8 = curve.b2, curve.b4, curve.b6, curve.b8
        self._zero = zero
        self._B = [b6, 2 * b4, b2, QuadInt(K, 4, 0)]
        self._u: dict[int, list[QuadInt]] = {
            0: [],
            1: [one],
            2: [one],
            3: [b8, 3 * b6, 3 * b4, b2, QuadInt(K, 3, 0)],
            4: [b4 * b8 - b6 * b6, b2 * b8 - b4 * b6, 10 * b8, 10 * b6,
                5 * b4, b2, QuadInt(K, 2, 0)],
        }

    def univariate(self, m: int) -> list[QuadInt]:
        """Coefficients (ascending) of u_m."""
        if m < 0:
            raise ValueError("m must be nonnegative")
        u = self._u
        if m in u:
            return u[m]
        z = self._zero
        B2 = _poly_mul(self._B, self._B, z)
        for k in sorted(set(range(5, m + 1))):
            if k in u:
                continue
            if k % 2:
                j = (k - 1) // 2
                t1 = _poly_mul(self.univariate(j + 2),
                               _poly_mul(self.univariate(j),
                                         _poly_mul(self.univariate(j), self.univariate(j), z), z), z)
                c3 = _poly_mul(self.univariate(j + 1),
                               _poly_mul(self.univariate(j + 1), self.univariate(j + 1), z), z)
                t2 = _poly_mul(self.univariate(j - 1), c3, z)
                if j % 2 == 0:
                    u[k] = _poly_sub(_poly_mul(B2, t1, z), t2, z)
                else:
                    u[k] = _poly_sub(t1, _poly_mul(B2, t2, z), z)
            else:
                j = k // 2
                s1 = _poly_mul(self.univariate(j + 2),
                               _poly_mul(self.univariate(j - 1), self.univariate(j - 1), z), z)
                s2 = _poly_mul(self.univariate(j - 2),
                               _poly_mul(self.univariate(j + 1), self.univariate(j + 1), z), z)
                u[k] = _poly_mul(self.univariate(j), _poly_sub(s1, s2, z), z)
        return u[m]

    def is_even_type(self, m: int) -> bool:
        return m % 2 == 0

    # -- value recursion ------------------------------------------------------

    def value(self, m: int, x, y, one):
        """psi_m(x, y) over any coefficient field (duck-typed).

        one: multiplicative identity of the coefficient field.  Divisions
        by psi_2(x, y) appear for even indices; callers on 2-torsion-ish
        points should use the univariate route instead.
        """
        cur = self.curve
        a1 = _lift_coeff(cur.a1, one)
        a3 = _lift_coeff(cur.a3, one)
        w2 = 2 * y + a1 * x + a3
        zero = one - one
        cache = {0: zero, 1: one, 2: w2}
        cache[3] = self._eval_univariate(self.univariate(3), x, one)
        cache[4] = w2 * self._eval_univariate(self.univariate(4), x, one)

        def W(k: int):
            if k < 0:
                # psi_{-k} = -psi_k
                return -W(-k)
            if k in cache:
                return cache[k]
            j = k // 2
            if k % 2:
                out = W(j + 2) * W(j) ** 3 - W(j - 1) * W(j + 1) ** 3
            else:
                out = (W(j) * (W(j + 2) * W(j - 1) ** 2 - W(j - 2) * W(j + 1) ** 2)) / w2
            cache[k] = out
            return out

        return W(m)

    @staticmethod
    def _eval_univariate(coeffs, x, one):
        acc = one - one
        for c in reversed(coeffs):
            acc = acc * x + _lift_coeff(c, one)
        return acc

    def embed_univariate(self, m: int, spl: PrimeSplitting, side: int,
                         prec: int) -> list[PadicNumber]:
        return [embed(c, spl, side).cap_rel(prec) for c in self.univariate(m)]


def _lift_coeff(c, one):
    """Move an exact QuadInt coefficient into the target field of `one`."""
    if isinstance(one, QuadRat):
        return QuadRat.from_quadint(c)
    if isinstance(one, PadicNumber):
        raise TypeError("embed coefficients before evaluating p-adically")
    return c


# ----------------------------------------------------------------------
# embedded (p-adic) curves and the formal group

class EmbeddedCurve:
    """The model pushed through one p-adic embedding."""

    def __init__(self, curve: CurveModel, spl: PrimeSplitting, side: int,
                 prec: int | None = None):
        self.curve = curve
        self.spl = spl
        self.side = side
        self.p = spl.p
        self.prec = prec if prec is not None else spl.prec
        self.a = [embed(z, spl, side).cap_rel(self.prec)
                  for z in curve.a_invariants()]
        self._fp: FpCurve | None = None
        self._formal: dict[int, dict] = {}
        self._divpoly = DivisionPolynomials(curve)
        self._upoly_cache: dict[int, list[PadicNumber]] = {}

    @property
    def a1(self):
        return self.a[0]

    @property
    def a2(self):
        return self.a[1]

    @property
    def a3(self):
        return self.a[2]

    @property
    def a4(self):
        return self.a[3]

    @property
    def a6(self):
        return self.a[4]

    def fp_curve(self) -> FpCurve:
        if self._fp is None:
            self._fp = self.curve.reduce_at_side(self.spl, self.side)
        return self._fp

    def embed_point(self, P: KPoint):
        if P is None:
            return None
        return (embed(P[0], self.spl, self.side).cap_rel(self.prec),
                embed(P[1], self.spl, self.side).cap_rel(self.prec))

    def upoly(self, m: int) -> list[PadicNumber]:
        if m not in self._upoly_cache:
            self._upoly_cache[m] = self._divpoly.embed_univariate(
                m, self.spl, self.side, self.prec)
        return self._upoly_cache[m]

    def divpoly_value(self, m: int, x: PadicNumber, y: PadicNumber) -> PadicNumber:
        """psi_m at a p-adic point; value recursion with p-adic division."""
        one = PadicNumber.from_int(1, self.p, self.prec)
        cur = self.curve
        a1 = embed(cur.a1, self.spl, self.side)
        a3 = embed(cur.a3, self.spl, self.side)
        w2 = y + y + a1 * x + a3
        if w2.u == 0 or (w2.u != 0 and w2.valuation() > 0):
            # near 2-torsion: use the division-free univariate form
            um = poly_eval(self.upoly(m) or [PadicNumber.zero(self.p)], x)
            return um if m % 2 else um * w2
        cache: dict[int, PadicNumber] = {1: one, 2: w2}
        cache[3] = poly_eval(self.upoly(3), x)
        cache[4] = w2 * poly_eval(self.upoly(4), x)
        cache[0] = PadicNumber.zero(self.p)

        def W(k: int) -> PadicNumber:
            if k < 0:
                return -W(-k)
            if k in cache:
                return cache[k]
            j = k // 2
            if k % 2:
                out = W(j + 2) * W(j) ** 3 - W(j - 1) * W(j + 1) ** 3
            else:
                out = (W(j) * (W(j + 2) * W(j - 1) ** 2 - W(j - 2) * W(j + 1) ** 2)) / w2
            cache[k] = out
            return out

        return W(m)

    def divpoly_omega_value(self, m: int, x: PadicNumber,
                            y: PadicNumber) -> PadicNumber:
        """Division polynomial normalised against the invariant differential.

        (-1)^(m+1) psi_m: the sign makes the formal leading term m t^(1-m^2)
        for every m (even psi_m carries a y factor and would lead with -m),
        which is the normalisation the sigma multiple identity
        sigma(mQ) = sigma(Q)^(m^2) f_m(Q) uses.
        """
        v = self.divpoly_value(m, x, y)
        return v if m % 2 else -v

    # -- affine p-adic group law ------------------------------------------------

    def padd(self, P, Q):
        """Chord-tangent addition on p-adic affine points.

        Valuations are tracked by the coefficients, so adding a point to
        something congruent to its inverse simply produces coordinates of
        negative valuation (a point near the origin of the formal group).
        """
        if P is None:
            return Q
        if Q is None:
            return P
        x1, y1 = P
        x2, y2 = Q
        a1, a2, a3, a4, _ = self.a
        dx = x2 - x1
        if dx.u == 0:
            if (y2 - y1).u == 0:
                den = 2 * y1 + a1 * x1 + a3
                if den.u == 0:
                    return None  # 2-torsion doubling
                lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / den
            elif (y2 + y1 + a1 * x1 + a3).u == 0:
                return None  # P + (-P), at least to working precision
            else:
                # distinct points sharing x to precision would divide 0/0
                raise CurveError("cannot add: x-coordinates agree to precision")
        else:
            lam = (y2 - y1) / dx
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = lam * (x1 - x3) - y1 - a1 * x3 - a3
        return (x3, y3)

    def pneg(self, P):
        if P is None:
            return None
        x, y = P
        return (x, -y - self.a1 * x - self.a3)

    def pmul_sequential(self, n: int, P):
        """n*P by repeated addition; all slopes stay unit for n below the
        reduction order of P."""
        assert n >= 1
        R = P
        for _ in range(n - 1):
            R = self.padd(R, P)
        return R

    def on_curve_padic(self, P, tol: int | None = None) -> bool:
        x, y = P
        a1, a2, a3, a4, a6 = self.a
        g = y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6)
        if g.u == 0:
            return True
        return tol is not None and g.valuation() >= tol

    # -- formal group -----------------------------------------------------------

    def formal(self, cutoff: int, need_exp: bool = True) -> dict:
        """Formal expansions at the origin to O(t^cutoff).

        Returns dict with series x, y, omega (the invariant differential
        coefficient w.r.t. t), log, and (on demand) exp; cached per cutoff.
        Reversion dominates the cost at large cutoffs, so exp is skipped
        when need_exp is False.
        """
        if cutoff in self._formal:
            out = self._formal[cutoff]
            if need_exp and "exp" not in out:
                out["exp"] = out["log"].reversion()
            return out
        p, prec = self.p, self.prec
        a1, a2, a3, a4, a6 = self.a
        # w(t) = t^3(1 + ...) solves w = t^3 + a1 t w + a2 t^2 w + a3 w^2
        #        + a4 t w^2 + a6 w^3; every right-hand term only involves
        #        earlier coefficients, so solve degree by degree.
        top = cutoff + 4
        t = PadicSeries1.identity(p, top, prec)
        zero = PadicNumber.zero(p, prec)
        one = PadicNumber.from_int(1, p, prec)
        wc = [zero] * top   # wc[n] = coefficient of t^n
        w2c = [zero] * top
        w3c = [zero] * top
        for n in range(3, top):
            s2 = zero
            for i in range(3, n - 2):
                s2 = s2 + wc[i] * wc[n - i]
            w2c[n] = s2
            s3 = zero
            for i in range(3, n - 5):
                s3 = s3 + wc[i] * w2c[n - i]
            w3c[n] = s3
            acc = a1 * wc[n - 1] + a2 * wc[n - 2] + a3 * w2c[n] \
                + a4 * w2c[n - 1] + a6 * w3c[n]
            wc[n] = acc + one if n == 3 else acc
        w = PadicSeries1(p, 3, wc[3:], top)
        xs = t * w.invert_multiplicative()          # leading t^-2
        ys = -w.invert_multiplicative()             # leading -t^-3
        denom = (ys + ys + xs.scale(a1) + PadicSeries1.constant(a3, xs.cutoff)
                 ).truncate(xs.cutoff)
        omega = (xs.derivative() * denom.invert_multiplicative()).truncate(cutoff)
        assert omega.coeff(0) == 1, "invariant differential not normalised"
        log = omega.integrate().truncate(cutoff + 1)
        out = {"x": xs.truncate(cutoff), "y": ys.truncate(cutoff),
               "omega": omega, "log": log}
        if need_exp:
            out["exp"] = log.reversion()
        self._formal[cutoff] = out
        return out

    def point_to_parameter(self, P) -> PadicNumber:
        """t = -x/y for a point already inside the formal disk."""
        x, y = P
        if x.u == 0 or x.valuation() >= 0:
            raise CurveError("point is not in the formal-group disk")
        return -x / y

    def parameter_to_point(self, tau: PadicNumber, cutoff: int):
        f = self.formal(cutoff)
        return (f["x"].eval(tau), f["y"].eval(tau))

    def add_to_parameter(self, A, B) -> PadicNumber:
        """Parameter of A + B when the sum lies in the formal disk.

        The slope denominator x_A - x_B has positive valuation e here, so
        this is the one step that costs ~e digits; the result parameter
        has valuation e.
        """
        x1, y1 = A
        x2, y2 = B
        a1, a2, a3, _, _ = self.a
        if (x2 - x1).u == 0:
            den = 2 * y1 + a1 * x1 + a3
            num = 3 * x1 * x1 + 2 * self.a2 * x1 + self.a4 - a1 * y1
            lam = num / den
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = lam * (x1 - x3) - y1 - a1 * x3 - a3
        return -x3 / y3

    def multiple_to_parameter(self, P, n: int) -> PadicNumber:
        """Parameter of n*P where n is the order of P mod p.

        Sequential additions keep every slope a unit until the last one.
        """
        if n == 1:
            return self.point_to_parameter(P)
        if n == 2:
            return self.add_to_parameter(P, P)
        A = self.pmul_sequential(n - 1, P)
        return self.add_to_parameter(A, P)

    def formal_multiple(self, tau: PadicNumber, k: int, cutoff: int) -> PadicNumber:
        """[k](tau) through log/exp."""
        f = self.formal(cutoff)
        s = f["log"].eval(tau)
        return f["exp"].eval(s * k)

    def formal_log_value(self, tau: PadicNumber, cutoff: int) -> PadicNumber:
        return self.formal(cutoff)["log"].eval(tau)


# ----------------------------------------------------------------------
# residue disks

@dataclass
class Disk:
    """An affine residue disk on one embedded curve.

    kind 'x': points are (x0 + t, y(t)); kind 'y': (x(t), y0 + t).  The
    y-parameter form is forced at two-torsion centers where x - x0 does
    not separate the two sheets.
    """
    center: tuple[int, int]
    kind: str
    order: int                      # order of the center in E(F_p)
    xs: PadicSeries1
    ys: PadicSeries1
    index: int = 0

    def point_at(self, t: PadicNumber):
        return (self.xs.eval(t), self.ys.eval(t))


def build_disk(E: EmbeddedCurve, center: tuple[int, int], cutoff: int,
               index: int = 0) -> Disk:
    p, prec = E.p, E.prec
    xbar, ybar = center
    a1, a2, a3, a4, a6 = E.a
    fp = E.fp_curve()
    order = fp.order_of(center)
    den_bar = (2 * ybar + fp.a1 * xbar + fp.a3) % p
    one = PadicNumber.from_int(1, p, prec)
    if den_bar != 0:
        # x-parameter disk; solve the sheet through (xbar, ybar)
        x0 = PadicNumber.from_int(xbar, p, prec)
        xs = PadicSeries1.from_coeffs(p, [(0, x0), (1, one)], cutoff, prec)
        A = xs.scale(a1) + PadicSeries1.constant(a3, cutoff)
        rhs = ((xs * xs * xs) + (xs * xs).scale(a2) + xs.scale(a4)
               + PadicSeries1.constant(a6, cutoff)).truncate(cutoff)
        disc = (A * A + rhs.scale(4)).truncate(cutoff)
        hint = PadicNumber.from_int((2 * ybar + fp.a1 * xbar + fp.a3) % p, p, prec)
        S = disc.sqrt_unit(hint)
        ys = (S - A).scale(PadicNumber.from_fraction(Fraction(1, 2), p, prec))
        ys = ys.truncate(cutoff)
        kind = "x"
    else:
        # two-torsion center: parametrise by y
        y0 = PadicNumber.from_int(ybar, p, prec)
        ys = PadicSeries1.from_coeffs(p, [(0, y0), (1, one)], cutoff, prec)
        # Newton for x(t): G(x) = x^3 + a2 x^2 + a4 x + a6 - y^2 - a1 x y - a3 y
        x = PadicSeries1.constant(PadicNumber.from_int(xbar, p, prec), cutoff)
        for _ in range(cutoff.bit_length() + 2):
            g = ((x * x * x) + (x * x).scale(a2) + x.scale(a4)
                 + PadicSeries1.constant(a6, cutoff)
                 - (ys * ys) - (x * ys).scale(a1) - ys.scale(a3)).truncate(cutoff)
            gx = ((x * x).scale(3) + x.scale(2 * a2)
                  + PadicSeries1.constant(a4, cutoff) - ys.scale(a1)).truncate(cutoff)
            x = (x - g * gx.invert_multiplicative()).truncate(cutoff)
        xs = x
        kind = "y"
    d = Disk(center=center, kind=kind, order=order, xs=xs, ys=ys, index=index)
    _check_disk(E, d)
    return d


def _check_disk(E: EmbeddedCurve, d: Disk):
    a1, a2, a3, a4, a6 = E.a
    xs, ys = d.xs, d.ys
    g = ((ys * ys) + (xs * ys).scale(a1) + ys.scale(a3)
         - (xs * xs * xs) - (xs * xs).scale(a2) - xs.scale(a4)
         - PadicSeries1.constant(a6, xs.cutoff))
    for k in range(0, min(g.cutoff, xs.cutoff) - 1):
        c = g.coeff(k)
        if c.u != 0 and c.valuation() < E.prec - 6:
            raise CurveError(f"disk series violate the curve equation at t^{k}: {c}")


def series_add(E: EmbeddedCurve, P1, P2, cutoff: int):
    """Group law on series points (pairs of PadicSeries1)."""
    x1, y1 = P1
    x2, y2 = P2
    a1, a2, a3, a4, _ = E.a
    dx = (x2 - x1).truncate(cutoff)
    if dx.tval() >= dx.cutoff:  # identical x-series: tangent formula
        den = (y1.scale(2) + x1.scale(a1) + PadicSeries1.constant(a3, cutoff))
        num = ((x1 * x1).scale(3) + x1.scale(2 * a2)
               + PadicSeries1.constant(a4, cutoff) - y1.scale(a1))
        lam = num * den.invert_multiplicative()
    else:
        lam = (y2 - y1) * dx.invert_multiplicative()
    lam = lam.truncate(cutoff)
    x3 = (lam * lam + lam.scale(a1) - PadicSeries1.constant(a2, cutoff) - x1 - x2)
    y3 = (lam * (x1 - x3) - y1 - x3.scale(a1) - PadicSeries1.constant(a3, cutoff))
    return (x3.truncate(cutoff), y3.truncate(cutoff))


def multiple_as_series(E: EmbeddedCurve, d: Disk, m: int):
    """Coordinate series of m*(disk point); small m only (repeated addition)."""
    assert m >= 1
    P = (d.xs, d.ys)
    R = P
    for _ in range(m - 1):
        R = series_add(E, R, P, d.xs.cutoff)
    return R


# ----------------------------------------------------------------------
# local data at bad places

@dataclass
class LocalData:
    gen: QuadInt
    kodaira: str
    tamagawa: int
    contributions: list[Fraction]
    table_consistent: bool = True
    note: str = ""


def contribution_table(kodaira: str, tamagawa: int) -> list[Fraction] | None:
    """Candidate away-contribution sets per reduction type (CPS-style).

    Values are the possible local height contributions divided by the
    character value at the place; 0 is always included (the identity
    component).  Returns None when the type is unknown.
    """
    k = kodaira.strip()
    if k in ("I0", "II", "II*"):
        return [Fraction(0)]
    if k == "III":
        return [Fraction(0), Fraction(-1, 2)]
    if k == "IV":
        return [Fraction(0), Fraction(-2, 3)]
    if k == "III*":
        return [Fraction(0), Fraction(-3, 2)]
    if k == "IV*":
        return [Fraction(0), Fraction(-4, 3)]
    if k.startswith("I") and k.endswith("*") and k[1:-1].isdigit():
        n = int(k[1:-1])
        vals = {Fraction(0), Fraction(-1)}
        vals.add(Fraction(-(n + 4), 4))
        return sorted(vals, reverse=True)
    if k.startswith("I") and k[1:].isdigit():
        n = int(k[1:])
        if n == 0:
            return [Fraction(0)]
        return sorted({Fraction(-i * (n - i), n) for i in range(n)}, reverse=True)
    return None


def validate_local_data(curve: CurveModel, places: list[LocalData]) -> list[str]:
    """Check bad places against the model discriminant; returns warnings."""
    warnings = []
    disc = curve.disc
    rem = disc
    for ld in places:
        v = disc.val_at(ld.gen)
        if v == 0:
            raise CurveError(f"place {ld.gen} does not divide the discriminant")
        for _ in range(v):
            rem = rem.exact_div(ld.gen)
        if ld.tamagawa < 1:
            raise CurveError(f"tamagawa number at {ld.gen} must be positive")
        if Fraction(0) not in ld.contributions:
            raise CurveError(f"contribution set at {ld.gen} must contain 0")
        table = contribution_table(ld.kodaira, ld.tamagawa)
        if table is not None and sorted(table) != sorted(ld.contributions):
            ld.table_consistent = False
            ld.note = (f"contributions {[str(c) for c in ld.contributions]} differ from "
                       f"the {ld.kodaira} table {[str(c) for c in table]}")
            warnings.append(f"place {format_element(ld.gen)}: {ld.note}")
        if table is None:
            warnings.append(
                f"place {format_element(ld.gen)}: no table for kodaira symbol "
                f"{ld.kodaira!r}; trusting manifest contributions")
    if not rem.is_unit():
        raise CurveError(
            f"discriminant has prime factors outside the listed places (cofactor {rem})")
    return warnings


def nonsingular_at(curve: CurveModel, P: KPoint, pi: QuadInt) -> bool:
    """Does P reduce to a nonsingular point of the reduction mod pi?"""
    if P is None:
        return True
    x, y = P
    if x.num and x.val_at(pi) < 0:
        return True  # reduces to the origin, which is smooth
    F = curve.residue_field(pi)
    xr, yr = F.reduce_rat(x), F.reduce_rat(y)
    a1, a2, a3, a4 = (F.reduce_int(z) for z in
                      (curve.a1, curve.a2, curve.a3, curve.a4))
    # partial derivatives of the defining polynomial
    dy = F.add(F.add(F.mul(F.scalar(2), yr), F.mul(a1, xr)), a3)
    three_x2 = F.mul(F.scalar(3), F.mul(xr, xr))
    dx = F.add(F.add(three_x2, F.mul(F.mul(F.scalar(2), a2), xr)), a4)
    dx = F.add(dx, F.neg(F.mul(a1, yr)))
    return not (F.is_zero(dy) and F.is_zero(dx))


def everywhere_nonsingular(curve: CurveModel, P: KPoint,
                           places: list[LocalData]) -> bool:
    return all(nonsingular_at(curve, P, ld.gen) for ld in places)


def good_multiple(curve: CurveModel, P: KPoint, places: list[LocalData]) -> int:
    """Smallest verified n with n*P nonsingular at every bad place.

    Candidates run over divisors of the Tamagawa lcm and a few safety
    multiples; failure to verify raises (bad manifest data).
    """
    from math import lcm
    L = lcm(*[ld.tamagawa for ld in places]) if places else 1
    cands = sorted({d for d in range(1, L + 1) if L % d == 0} |
                   {L * k for k in (1, 2, 3, 4)})
    for n in cands:
        Q = curve.mul(n, P)
        if Q is None:
            continue
        if everywhere_nonsingular(curve, Q, places):
            return n
    raise CurveError(
        f"no multiple up to {4 * L} of {P} avoids all singular fibres; "
        "check the manifest's tamagawa numbers")
