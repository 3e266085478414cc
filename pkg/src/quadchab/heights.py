"""p-adic heights from idele class characters and the sigma function.

Two characters matter here, the cyclotomic and the anticyclotomic one.
Both are ramified exactly at the two places above the split prime p,
where they restrict to (+/- log_p) through the local embeddings psi_1,
psi_2 (side 1 always carries +, side 2 carries - in the anti case).
Triviality on the diagonal K^* then forces the value on a uniformiser
pi at any place away from p:

    cyc:  chi(pi) = -log_p Nm(pi)
    anti: chi(pi) = log_p psi_2(pi) - log_p psi_1(pi)

The global height of a non-torsion point P uses a multiple nP lying in
the formal group at both places above p and on the identity component at
every bad place:

    h_cyc(P)  = n^-2 ((log s1 + log s2) - (log d1 + log d2))
    h_anti(P) = n^-2 ((log s1 - log s2) - (log d1 - log d2))

with s_i = sigma_i(t_i(nP)) and d_i the image under embedding i of a
square root of the denominator ideal of nP (class number 1 makes that a
single global element).  Large n never touches exact arithmetic: with
n_i the reduction order at side i and n0 the bad-fibre multiple, only
n_i P and n0 P are computed over K; the rest travels through the formal
group via

    t(nP) = E((n/n_i) L(t(n_i P))),
    d(k n0 P) = d(n0 P)^(k^2) f_k(n0 P)  up to a unit,

and the Iwasawa branch of log kills the unit.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import lcm

from .padic import PadicNumber, PadicSeries1, padic_log
from .quadfield import (PrimeSplitting, QuadInt, denominator_decomposition,
                        embed)
from .curve import (CurveModel, Disk, EmbeddedCurve, KPoint, LocalData,
                    good_multiple)
from .sigma import (SigmaFunction, load_sigma, save_sigma, sigma_cache_key,
                    sigma_function)


class HeightError(ValueError):
    pass


# torsion over a quadratic field has order dividing this
TORSION_BOUND = 18


# ----------------------------------------------------------------------
# idele class characters

@dataclass(frozen=True)
class IdeleCharacter:
    """A p-adic idele class character, cyclotomic or anticyclotomic.

    kind "cyc" is log_p of the norm idele (Iwasawa branch, so the p-part
    contributes nothing); kind "anti" satisfies chi o conj = -chi and is
    the unique such character up to scaling, pinned here by t_1 = +log.
    """
    kind: str
    spl: PrimeSplitting

    def __post_init__(self):
        if self.kind not in ("cyc", "anti"):
            raise HeightError(f"no such character kind: {self.kind!r}")

    def sign(self, side: int) -> int:
        """Sign of the linear map on log of local units at one side."""
        return -1 if (self.kind == "anti" and side == 2) else 1

    def at_p(self, x: PadicNumber, side: int) -> PadicNumber:
        """chi on K_p^* at one place above p (Iwasawa-extended log)."""
        v = padic_log(x)
        return -v if self.sign(side) < 0 else v


def char_value(chi: IdeleCharacter, pi: QuadInt) -> PadicNumber:
    """chi_v(pi_v) for pi supported away from p.

    pi need not be prime; both formulas are multiplicative, so this is
    the sum of the local values over the factorisation of pi.
    """
    spl = chi.spl
    if pi.norm() % spl.p == 0:
        raise HeightError(
            f"{pi} meets a place above {spl.p}; use the at-p linear maps")
    if chi.kind == "cyc":
        return -padic_log(PadicNumber.from_int(pi.norm(), spl.p, spl.prec))
    return padic_log(embed(pi, spl, 2)) - padic_log(embed(pi, spl, 1))


def t_sets(chi: IdeleCharacter, places: list[LocalData]) -> list[PadicNumber]:
    """All sums over bad places of a contribution times chi_v(pi_v).

    These are the possible away-from-p parts of the height of an integral
    point; the all-identity-components choice puts 0 in every T-set.
    """
    p, prec = chi.spl.p, chi.spl.prec
    sums = [PadicNumber.zero(p, prec)]
    for ld in places:
        if not ld.contributions:
            raise HeightError(f"empty contribution set at {ld.gen}")
        base = char_value(chi, ld.gen)
        ext = []
        for s in sums:
            for c in ld.contributions:
                if c == 0:
                    ext.append(s)
                else:
                    ext.append(s + base * PadicNumber.from_fraction(c, p, prec))
        sums = ext
    out: list[PadicNumber] = []
    for v in sums:
        if not any((v - u).u == 0 for u in out):
            out.append(v)
    out.sort(key=lambda z: (0, 0) if z.u == 0 else (z.v, z.u))
    return out


# ----------------------------------------------------------------------
# height values

@dataclass
class HeightValue:
    """A global height with its place-by-place breakdown.

    local maps "p1"/"p2" to the sigma terms and "away" to the denominator
    term; the three entries sum to value exactly.  n is the multiple the
    computation went through (0 for torsion).
    """
    value: PadicNumber
    kind: str
    n: int
    local: dict[str, PadicNumber]


@dataclass
class LocalHeightSeries:
    """The local height at p along one residue disk.

    All series live in the scaled disk parameter s with t = p s, so s
    runs over Z_p; ell is the elliptic logarithm of the disk point, fdiv
    the division polynomial value f_m (normalised against the invariant
    differential), and unit the analytic remainder
    log sigma(tau(s)) - log(m ell(s)).  series is the assembled height
    m^-2 (log sigma(t(mR)) - log f_m(R)) without the character sign.

    The log expansions of ell and fdiv separately have coefficients of
    negative valuation when the disk contains an m-torsion point (both
    functions vanish there), but the torsion zeros cancel in the
    quotient, so the assembled series converges on all of Z_p.  value_at
    instead takes scalar logs of the evaluated pieces; the two routes
    agree and value_at has slightly better tail control.
    """
    side: int
    sign: int
    m: int
    p: int
    ell: PadicSeries1
    fdiv: PadicSeries1
    unit: PadicSeries1
    series: PadicSeries1
    tail: int

    def value_at(self, s0: PadicNumber) -> PadicNumber:
        """h_p(R(p s0)) for s0 in Z_p."""
        p = self.p
        ellv = self.ell.eval_unit(s0, self.tail)
        uv = self.unit.eval_unit(s0, self.tail)
        tot = padic_log(ellv) + uv
        if self.m > 1:
            fv = self.fdiv.eval_unit(s0, self.tail)
            lm = padic_log(PadicNumber.from_int(self.m, p, self.tail + 4))
            tot = tot + lm - padic_log(fv)
        tot = tot / PadicNumber.from_int(self.m * self.m, p, tot.n + 4)
        return -tot if self.sign < 0 else tot

    def signed_series(self) -> PadicSeries1:
        """The height expansion with the character's side sign applied."""
        return -self.series if self.sign < 0 else self.series

    def series_value_at(self, s0: PadicNumber) -> PadicNumber:
        return self.signed_series().eval_unit(s0, self.tail)

    def correction_series(self) -> PadicSeries1:
        """log f_m(R(p s)), the chi_p(f_m) correction, as a series in s.

        Coefficient valuations dip to -v_p(k) near indices divisible by
        p when the disk contains the m-torsion point at depth exactly
        one, and stay nonnegative otherwise; the dips cancel against the
        matching ones in log sigma inside `series`.
        """
        return _formal_log(self.fdiv)


def _formal_log(S: PadicSeries1) -> PadicSeries1:
    """log of a series with any nonzero constant term, Iwasawa branch."""
    c = S.coeff(0)
    if c.u == 0:
        raise HeightError("series log needs a nonzero constant term")
    rest = (S - PadicSeries1.constant(c, S.cutoff)).scale(c.inverse())
    return rest.log1p() + PadicSeries1.constant(padic_log(c), S.cutoff)


def _deep_root(S: PadicSeries1, prec: int) -> PadicNumber:
    """The unique zero of S with positive valuation.

    Newton from the polygon seed -c0/c1; valid when the constant term
    has valuation >= 2 and the deep zero is simple, which is the torsion
    disk situation below.
    """
    c0, c1 = S.coeff(0), S.coeff(1)
    if c0.u == 0 or c1.u == 0:
        raise HeightError("deflation needs exact leading coefficients")
    dS = S.derivative()
    a = -(c0 / c1)
    best = None
    for _ in range(prec.bit_length() + 8):
        f = S.eval(a)
        if f.u == 0:
            break
        fv = f.valuation()
        if best is not None and fv <= best:
            break
        best = fv
        a = a - f / dS.eval(a)
    f = S.eval(a)
    if f.u != 0 and f.valuation() < prec - 15:
        raise HeightError("deep-zero deflation did not converge")
    return a


def _deflate_linear(S: PadicSeries1, a: PadicNumber):
    """Write S = (t - a) U + S(a); returns (U, remainder).

    Top-down synthetic division, multiplications by a only, so no
    precision is spent.
    """
    p, T = S.p, S.cutoff
    nxt = PadicNumber.zero(p, 10 ** 6)
    out = [None] * (T - 1)
    for k in range(T - 1, 0, -1):
        cur = S.coeff(k) + a * nxt
        out[k - 1] = cur
        nxt = cur
    rem = S.coeff(0) + a * nxt
    return PadicSeries1(p, 0, out, T - 1), rem


def _exact_p_shift(S: PadicSeries1, k: int) -> PadicSeries1:
    """Multiply every coefficient by p^k through the valuation slot."""
    out = []
    for i in range(S.cutoff):
        c = S.coeff(i)
        if c.u == 0:
            out.append(PadicNumber.zero(S.p, max(c.absprec + k, 0)))
        else:
            if c.v + k < 0:
                raise HeightError("series is not divisible by p")
            out.append(PadicNumber(S.p, c.v + k, c.u, c.n))
    return PadicSeries1(S.p, 0, out, S.cutoff)


# ----------------------------------------------------------------------
# the machine

class HeightMachine:
    """Global heights, the pairing, and local heights at p for one curve.

    Construction is dominated by solving for the two sigma functions;
    reuse the machine across points, or pass cache_dir to persist the
    sigma data between runs.
    """

    def __init__(self, curve: CurveModel, spl: PrimeSplitting,
                 places: list[LocalData], sigma_M: int | None = None,
                 cache_dir: str | None = None):
        self.curve = curve
        self.spl = spl
        self.places = places
        self.p = spl.p
        self.prec = spl.prec
        self.E = {s: EmbeddedCurve(curve, spl, s, self.prec) for s in (1, 2)}
        for s in (1, 2):
            if not self.E[s].fp_curve().is_ordinary():
                raise HeightError(
                    f"supersingular reduction above p = {self.p} (side {s})")
        M = sigma_M if sigma_M is not None else max(2 * self.p + 15, 34)
        self.S: dict[int, SigmaFunction] = {}
        for s in (1, 2):
            S = None
            if cache_dir is not None:
                S = load_sigma(cache_dir, sigma_cache_key(self.E[s], M))
            if S is None:
                S = sigma_function(self.E[s], M=M)
                if cache_dir is not None:
                    save_sigma(S, cache_dir, sigma_cache_key(self.E[s], M))
            self.S[s] = S
        self.chars = {k: IdeleCharacter(k, spl) for k in ("cyc", "anti")}
        self._fcut = self.prec + 4
        self._local_cache: dict = {}

    def t_values(self, kind: str) -> list[PadicNumber]:
        return t_sets(self.chars[kind], self.places)

    # -- multiples ----------------------------------------------------------

    def is_torsion(self, P: KPoint) -> bool:
        if P is None:
            return True
        R = P
        for _ in range(TORSION_BOUND):
            R = self.curve.add(R, P)
            if R is None:
                return True
        return False

    def reduction_order(self, P: KPoint, side: int) -> int:
        fp = self.E[side].fp_curve()
        return fp.order_of(fp.reduce_point(self.spl, side, P))

    def ht_multiple(self, P: KPoint) -> tuple[int, int]:
        """(n, n0): n kills both reductions at p and the component groups
        at the bad places; n0 is the verified bad-fibre part."""
        n0 = good_multiple(self.curve, P, self.places)
        n1 = self.reduction_order(P, 1)
        n2 = self.reduction_order(P, 2)
        return lcm(n0, n1, n2), n0

    # -- pointwise formal-group travel ---------------------------------------

    def formal_parameter(self, P: KPoint, side: int, n: int) -> PadicNumber:
        """t(nP) at one side.

        Sequential exact additions only up to the reduction order; the
        remaining factor is a scalar multiplication on formal logarithms.
        """
        E = self.E[side]
        ni = self.reduction_order(P, side)
        if n % ni:
            raise HeightError(f"{n} does not kill the reduction (order {ni})")
        tau = E.multiple_to_parameter(E.embed_point(P), ni)
        k = n // ni
        if k == 1:
            return tau
        f = E.formal(self._fcut)
        return f["exp"].eval(f["log"].eval(tau) * k)

    def elliptic_log(self, P: KPoint, side: int) -> PadicNumber:
        """The p-adic elliptic logarithm L(t(mP))/m, m the reduction order."""
        E = self.E[side]
        ni = self.reduction_order(P, side)
        tau = E.multiple_to_parameter(E.embed_point(P), ni)
        v = E.formal_log_value(tau, self._fcut)
        return v / PadicNumber.from_int(ni, self.p, v.n + 4)

    # -- global heights -------------------------------------------------------

    def height(self, P: KPoint, kind: str, mult: int = 1) -> HeightValue:
        """Global height of P for one character kind.

        mult scales the multiple n; the result must not depend on it
        (consistency checks only).
        """
        if kind not in ("cyc", "anti"):
            raise HeightError(f"no such character kind: {kind!r}")
        p, prec = self.p, self.prec
        if P is None or self.is_torsion(P):
            return HeightValue(PadicNumber.zero(p, prec), kind, 0, {})
        n, n0 = self.ht_multiple(P)
        n *= mult
        ls = {s: self.S[s].log_eval(self.formal_parameter(P, s, n))
              for s in (1, 2)}
        # denominator side: d(nP) out of d(n0 P) and f_(n/n0)
        P0 = self.curve.mul(n0, P)
        _, _, d0 = denominator_decomposition(P0[0], P0[1])
        k = n // n0
        ld = {}
        for s in (1, 2):
            E = self.E[s]
            v = padic_log(embed(d0, self.spl, s)) * (k * k)
            if k > 1:
                x0, y0 = E.embed_point(P0)
                v = v + padic_log(E.divpoly_omega_value(k, x0, y0))
            ld[s] = v
        inv = PadicNumber.from_fraction(Fraction(1, n * n), p, prec + 6)
        sgn = -1 if kind == "anti" else 1
        local = {
            "p1": ls[1] * inv,
            "p2": ls[2] * inv * sgn,
            "away": -(ld[1] + ld[2] * sgn) * inv,
        }
        value = local["p1"] + local["p2"] + local["away"]
        return HeightValue(value, kind, n, local)

    def pairing(self, P: KPoint, Q: KPoint, kind: str) -> PadicNumber:
        """<P, Q> = (h(P+Q) - h(P) - h(Q)) / 2."""
        hpq = self.height(self.curve.add(P, Q), kind).value
        hp = self.height(P, kind).value
        hq = self.height(Q, kind).value
        half = PadicNumber.from_fraction(Fraction(1, 2), self.p, self.prec + 4)
        return (hpq - hp - hq) * half

    # -- local heights at p ----------------------------------------------------

    def _padic_reduction_order(self, R, side: int) -> int:
        x, y = R
        if x.u != 0 and x.valuation() < 0:
            return 1
        bar = (x.residue(), y.residue())
        return self.E[side].fp_curve().order_of(bar)

    def local_height_at_p(self, R, side: int, kind: str = "cyc") -> PadicNumber:
        """h_p at one side of a p-adic affine point, the pointwise route:
        m^-2 (log sigma(t(mR)) - log f_m(R)), m the reduction order."""
        E, S = self.E[side], self.S[side]
        m = self._padic_reduction_order(R, side)
        tau = E.multiple_to_parameter(R, m)
        v = S.log_eval(tau)
        if m > 1:
            v = v - padic_log(E.divpoly_omega_value(m, R[0], R[1]))
        v = v / PadicNumber.from_int(m * m, self.p, v.n + 4)
        return -v if self.chars[kind].sign(side) < 0 else v

    def local_height_series(self, d: Disk, side: int,
                            kind: str = "cyc") -> LocalHeightSeries:
        key = (side, d.center, d.kind, d.xs.cutoff)
        base = self._local_cache.get(key)
        if base is None:
            base = self._build_local_series(d, side)
            self._local_cache[key] = base
        sgn = self.chars[kind].sign(side)
        return base if sgn == base.sign else replace(base, sign=sgn)

    def _build_local_series(self, d: Disk, side: int) -> LocalHeightSeries:
        E, S = self.E[side], self.S[side]
        p, prec = self.p, self.prec
        T = d.xs.cutoff
        m = d.order
        a1, a2, a3, a4, _ = E.a
        w2 = (d.ys.scale(2) + d.xs.scale(a1)
              + PadicSeries1.constant(a3, T)).truncate(T)
        if d.kind == "x":
            wden = w2
        else:
            # omega = dy / (3x^2 + 2 a2 x + a4 - a1 y) on the y-sheet
            wden = ((d.xs * d.xs).scale(3) + d.xs.scale(2 * a2)
                    + PadicSeries1.constant(a4, T)
                    - d.ys.scale(a1)).truncate(T)
        omega = wden.invert_multiplicative().truncate(T)
        # elliptic log of the disk point: center value plus the integral
        R0 = (d.xs.coeff(0), d.ys.coeff(0))
        tau0 = E.multiple_to_parameter(R0, m)
        ell0 = E.formal_log_value(tau0, self._fcut) \
            / PadicNumber.from_int(m, p, prec)
        ell = (omega.integrate().truncate(T)
               + PadicSeries1.constant(ell0, T)).scale_variable(p)
        # f_m along the disk, division-free univariate form
        if m == 1:
            fdiv = PadicSeries1.constant(PadicNumber.from_int(1, p, prec), T)
        else:
            F = _poly_at_series(E.upoly(m), d.xs, linear=(d.kind == "x"))
            if m % 2 == 0:
                F = -(F * w2).truncate(T)  # omega sign: even psi_m leads with -m
            fdiv = F.scale_variable(p)
        # tau(s) = exp(m ell(s)) = m ell(s) V(m ell(s)), V = exp(t)/t
        mell = ell.scale(PadicNumber.from_int(m, p, prec))
        ex = E.formal(self._fcut)["exp"].normalized()
        V = PadicSeries1(p, 0, list(ex.coeffs), ex.cutoff - 1)
        Vc = V.compose_padic(mell).truncate(T)
        tau_s = (mell * Vc).truncate(T)
        unit = (Vc.log_unit() + S.log_ratio.compose_padic(tau_s)).truncate(T)
        # full expansion: the torsion zeros of sigma(tau) and f_m cancel
        cf0 = fdiv.coeff(0)
        if m > 1 and cf0.u != 0 and cf0.valuation() >= 2:
            # [m] of the center lift sits two or more levels inside the
            # formal group, so ell and f_m share a simple zero at |s| < 1
            # (the one torsion point of the disk) and their separate logs
            # have radius |s_T|: assembling them head-on loses digits
            # linearly in the coefficient index.  Divide the common
            # linear factor out first; log(p) and log(s - s_T) cancel
            # between the two terms on the Iwasawa branch.
            a = _deep_root(fdiv, prec)
            u2, r2 = _deflate_linear(fdiv, a)
            u1, r1 = _deflate_linear(ell, a)
            for r in (r1, r2):
                if r.u != 0 and r.valuation() < prec - 20:
                    raise HeightError("deflation left a visible remainder")
            w1 = _exact_p_shift(u1, -1)
            w2 = _exact_p_shift(u2, -1)
            total = (w1.log_unit() - w2.log_unit() + unit).truncate(T)
        else:
            total = (_formal_log(ell) + unit - _formal_log(fdiv)).truncate(T)
        Tc = total.cutoff     # deflation shortens the expansion by one
        if m > 1:
            lm = padic_log(PadicNumber.from_int(m, p, prec))
            total = total + PadicSeries1.constant(lm, Tc)
        series = total.scale(PadicNumber.from_fraction(
            Fraction(1, m * m), p, prec + 6))
        # omitted tails sit above Tc - 2 floor(log_p Tc) - 2 at any s in Z_p
        lg = 0
        while p ** (lg + 1) <= Tc:
            lg += 1
        tail = Tc - 2 * lg - 2
        return LocalHeightSeries(side=side, sign=1, m=m, p=p, ell=ell,
                                 fdiv=fdiv, unit=unit, series=series,
                                 tail=tail)


def _poly_at_series(coeffs: list[PadicNumber], xs: PadicSeries1,
                    linear: bool = False) -> PadicSeries1:
    """Horner evaluation of a scalar-coefficient polynomial at a series.

    linear asserts xs = x0 + t exactly (the x-sheet disk coordinate),
    for which each Horner step costs O(cutoff) instead of a full series
    product.
    """
    T = xs.cutoff
    p = xs.p
    acc = PadicSeries1.constant(coeffs[-1], T)
    if linear:
        x0 = xs.coeff(0)
        for c in reversed(coeffs[:-1]):
            cur = [acc.coeff(k) for k in range(T)]
            merged = [cur[0] * x0 + c]
            for k in range(1, T):
                merged.append(cur[k] * x0 + cur[k - 1])
            acc = PadicSeries1(p, 0, merged, T)
        return acc
    for c in reversed(coeffs[:-1]):
        acc = (acc * xs).truncate(T) + PadicSeries1.constant(c, T)
    return acc
