"""Quadratic Chabauty sets for rank-two curves over imaginary quadratic fields.

The global height h^chi is a quadratic form in the two elliptic
logarithms f_1, f_2 (one per prime above p), so on each pair of good
affine residue disks the difference rho^chi = h^chi - sum_{P | p}
h_P^chi extends to a bivariate analytic function whose value at the
image of an integral point lands in the finite set T^chi of possible
away-from-p contribution sums.  Imposing both character equations at
once cuts out a finite set B_p of p-adic point pairs; lattice
recognition splits off the members coming from actual O_K-points, and
the remainder A_p (mock integral points) feeds the cross-prime sieve.

The f_i and the local height expansions come straight from the heights
machinery, already written in the scaled disk parameter t = p s, so all
root finding happens on the unit polydisk Z_p x Z_p: normalise away the
common p-power of the nonconstant coefficients, seed mod p, lift by
bivariate Hensel, and fall back to subdividing into the p^2 sub-disks
whenever the Jacobian degenerates at a seed.  Planted polynomial
systems run through the same solver core, which is what the mod-p^3
enumeration oracle in the tests exercises.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, isqrt

from .curve import Disk, build_disk
from .padic import (
    EXACT,
    NoConvergence,
    PadicNumber,
    PadicSeries1,
    PadicSeries2,
    PrecisionError,
    SubdivisionNeeded,
    hensel_bivariate,
    ppow,
)
from .quadfield import QuadInt, QuadRat, embed


class QCError(ValueError):
    pass


DISK_CUTOFF = 36
_KINDS = ("cyc", "anti")


def _pshift(z: PadicNumber, k: int) -> PadicNumber:
    """z * p^k without touching the digit count."""
    if z.u == 0:
        return PadicNumber.zero(z.p, min(z.v + k, EXACT))
    return PadicNumber(z.p, z.v + k, z.u, z.n)


def _vfloor(z: PadicNumber) -> int:
    """Provable lower bound on the valuation (absprec for a zero)."""
    return z.absprec if z.u == 0 else z.v


# ----------------------------------------------------------------------
# Coleman integrals of the invariant differential

def elliptic_log(machine, R, side: int, multiple: int | None = None) -> PadicNumber:
    """f_i(R) for an affine Z_p-point R of good reduction.

    Computed as m^-1 L(t(mR)) with m a multiple of the reduction order;
    additivity of the integral makes the value independent of m.
    """
    E = machine.E[side]
    m = machine._padic_reduction_order(R, side)
    if multiple is not None:
        if multiple % m:
            raise QCError(f"multiple {multiple} does not kill the reduction (order {m})")
        m = multiple
    tau = E.multiple_to_parameter(R, m)
    v = E.formal_log_value(tau, machine._fcut)
    return v / PadicNumber.from_int(m, machine.p, v.n + 4)


def g_forms(fR, fS) -> tuple[PadicNumber, PadicNumber, PadicNumber]:
    """The three symmetric bilinear forms spanned by products of f_1, f_2.

    fR and fS are the f-value pairs of two point pairs; returns
    (g11, g12, g22) with g12 symmetrised across the two arguments.
    """
    f1R, f2R = fR
    f1S, f2S = fS
    half = PadicNumber.from_fraction(Fraction(1, 2), f1R.p, max(f1R.n, 20))
    return (f1R * f1S, (f1R * f2S + f2R * f1S) * half, f2R * f2S)


# ----------------------------------------------------------------------
# the height-form coefficients

@dataclass
class AlphaCoefficients:
    """h^chi = a11 g11 + a12 g12 + a22 g22 on E(K) x E(K)."""
    kind: str
    a11: PadicNumber
    a12: PadicNumber
    a22: PadicNumber
    det_val: int            # valuation of the 3x3 solve determinant


def _solve3(rows, rhs):
    """Cramer solve of a 3x3 p-adic system; returns (x1, x2, x3, det)."""
    (a, b, c), (d, e, f), (g, h, i) = rows
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if det.u == 0:
        return None, None, None, det
    r1, r2, r3 = rhs
    x1 = (r1 * (e * i - f * h) - b * (r2 * i - f * r3) + c * (r2 * h - e * r3)) / det
    x2 = (a * (r2 * i - f * r3) - r1 * (d * i - f * g) + c * (d * r3 - r2 * g)) / det
    x3 = (a * (e * r3 - r2 * h) - b * (d * r3 - r2 * g) + r1 * (d * h - e * g)) / det
    return x1, x2, x3, det


def solve_alpha(machine, P, Q) -> dict[str, AlphaCoefficients]:
    """Coefficients of the height form for both characters.

    Uses the Gram rows at (P,P), (P,Q), (Q,Q); a singular matrix means
    f_1, f_2 fail to separate the generators at this p, which is the
    linear-independence condition the method needs.
    """
    PQ = machine.curve.add(P, Q)
    fP = (machine.elliptic_log(P, 1), machine.elliptic_log(P, 2))
    fQ = (machine.elliptic_log(Q, 1), machine.elliptic_log(Q, 2))
    rows = [g_forms(fP, fP), g_forms(fP, fQ), g_forms(fQ, fQ)]
    half = PadicNumber.from_fraction(Fraction(1, 2), machine.p, machine.prec + 4)
    out = {}
    for kind in _KINDS:
        hP = machine.height(P, kind).value
        hQ = machine.height(Q, kind).value
        hS = machine.height(PQ, kind).value
        rhs = [hP, (hS - hP - hQ) * half, hQ]
        a11, a12, a22, det = _solve3(rows, rhs)
        if a11 is None:
            raise QCError(
                f"Condition lin-independence fails at p = {machine.p}: "
                "the g-form Gram matrix of the generators is singular at "
                "working precision; rerun with a different prime")
        out[kind] = AlphaCoefficients(kind, a11, a12, a22, det.valuation())
    return out


# ----------------------------------------------------------------------
# residue disks and their solver series

def affine_disks(machine, side: int, cutoff: int = DISK_CUTOFF) -> list[Disk]:
    """All affine residue disks on one side, indexed deterministically."""
    E = machine.E[side]
    fp = E.fp_curve()
    return [build_disk(E, c, cutoff, index=i)
            for i, c in enumerate(pt for pt in fp.points() if pt is not None)]


@dataclass
class DiskSeries:
    """Per-disk ingredients of the rho expansions, in the scaled variable.

    ell is the elliptic log along the disk (shared by both characters),
    u[chi] = alpha_ii ell^2 - h_P^chi collects everything univariate.
    """
    disk: Disk
    side: int
    ell: PadicSeries1
    dell: PadicSeries1
    u: dict
    du: dict
    tail: int


def _disk_series(machine, d: Disk, side: int, alphas) -> DiskSeries:
    ls = {k: machine.local_height_series(d, side, k) for k in _KINDS}
    A = ls["cyc"].ell
    T = A.cutoff
    A2 = (A * A).truncate(T)
    u, du = {}, {}
    tail = ls["cyc"].tail
    for k in _KINDS:
        al = alphas[k]
        aii = al.a11 if side == 1 else al.a22
        uk = (A2.scale(aii) - ls[k].signed_series()).truncate(T)
        u[k] = uk
        du[k] = uk.derivative()
        if aii.u != 0:
            tail = min(tail, ls[k].tail + min(0, aii.valuation()))
    return DiskSeries(disk=d, side=side, ell=A, dell=A.derivative(),
                      u=u, du=du, tail=tail)


@dataclass
class DiskPair:
    """A pair of affine disks, one per prime above p."""
    d1: Disk
    d2: Disk
    index: tuple[int, int]
    rho: dict = field(default_factory=dict)   # kind -> dense expansion


def disk_pairs(machine, cutoff: int = DISK_CUTOFF) -> list[DiskPair]:
    ds1 = affine_disks(machine, 1, cutoff)
    ds2 = affine_disks(machine, 2, cutoff)
    return [DiskPair(d1, d2, (d1.index, d2.index))
            for d1 in ds1 for d2 in ds2]


def rho_expand(machine, alphas, pair: DiskPair, kind: str,
               cutoff: int | None = None) -> PadicSeries2:
    """rho^chi on a disk pair as a series in the unscaled parameters.

    The height form contributes alpha_11 f_1^2 + alpha_12 f_1 f_2 +
    alpha_22 f_2^2 with f_i the constant-plus-tiny-integral log series
    of each disk; the two local height series are subtracted.  The
    constant term is the pointwise rho of the pair of center lifts.
    Cached on the pair under its kind.
    """
    if kind in pair.rho:
        return pair.rho[kind]
    p, prec = machine.p, machine.prec
    ls1 = machine.local_height_series(pair.d1, 1, kind)
    ls2 = machine.local_height_series(pair.d2, 2, kind)
    A, B = ls1.ell, ls2.ell
    T = cutoff if cutoff is not None else A.cutoff
    al = alphas[kind]
    u1 = ((A * A).truncate(T).scale(al.a11) - ls1.signed_series()).truncate(T)
    u2 = ((B * B).truncate(T).scale(al.a22) - ls2.signed_series()).truncate(T)
    terms = []
    for i in range(T):
        terms.append(((i, 0), _pshift(u1.coeff(i), -i)))
        terms.append(((0, i), _pshift(u2.coeff(i), -i)))
    for i in range(T):
        ai = A.coeff(i)
        if ai.u == 0 and ai.v >= EXACT:
            continue
        for j in range(T - i):
            c = al.a12 * ai * B.coeff(j)
            terms.append(((i, j), _pshift(c, -(i + j))))
    S = PadicSeries2.from_terms(p, terms, T, prec)
    pair.rho[kind] = S
    return S


# ----------------------------------------------------------------------
# solver windows: normalised bivariate systems on the unit polydisk
#
# A window exposes values/jacobian (so hensel_bivariate can drive it),
# mod-p seed enumeration, a viability test from the constant terms, and
# recentering s -> a + p s for subdivision.  Two implementations: the
# structured rho systems and dense polynomial systems for planted tests.

def _recenter1(S: PadicSeries1, a: int, prec: int) -> PadicSeries1:
    """S(a + p s) as a series in s; exact binomial recombination."""
    p = S.p
    n = S.cutoff
    if n <= 0:
        return S
    av = PadicNumber.from_int(a, p, prec + 20)
    acc: list[PadicNumber] = []
    for k in range(n - 1, -1, -1):
        c = S.coeff(k)
        m = min(len(acc) + 1, n)
        nxt = []
        for j in range(m):
            t = PadicNumber.zero(p)
            if j < len(acc):
                t = acc[j] * av
            if 1 <= j <= len(acc):
                t = t + _pshift(acc[j - 1], 1)
            if j == 0:
                t = t + c
            nxt.append(t)
        acc = nxt
    return PadicSeries1(p, 0, acc, n)


def _red_mod_p(z: PadicNumber, nu: int, label: str) -> int:
    w = _pshift(z, -nu)
    try:
        return w.residue(1)
    except PrecisionError as e:
        raise QCError(f"{label}: coefficient known only to O(p^{z.absprec}), "
                      f"cannot reduce past p^{nu}") from e


class _RhoWindow:
    """(rho^cyc - t1, rho^anti - t2) on the current polydisk window.

    Equation k reads  U1[k](x) + U2[k](y) + cross[k] A(x) B(y) - t_k,
    normalised by p^-nu[k] with nu[k] the least valuation among the
    folded nonconstant coefficients, so at least one of them is a unit
    and mod-p seeding sees the equation.
    """

    def __init__(self, p, prec, U1, U2, cross, A, B, targets, tail, label):
        self.p = p
        self.prec = prec
        self.U1 = U1          # kind -> PadicSeries1 in x
        self.U2 = U2          # kind -> PadicSeries1 in y
        self.cross = cross    # kind -> PadicNumber
        self.A = A
        self.B = B
        self.targets = targets
        self.tail = tail
        self.label = label
        self.dU1 = {k: U1[k].derivative() for k in _KINDS}
        self.dU2 = {k: U2[k].derivative() for k in _KINDS}
        self.dA = A.derivative()
        self.dB = B.derivative()
        self._last = None
        self._tables = None
        self.nu = {}
        self._folded = {}
        for k in _KINDS:
            self._fold(k)

    @staticmethod
    def from_disks(ds1: DiskSeries, ds2: DiskSeries, alphas, targets,
                   prec: int, label: str) -> "_RhoWindow":
        p = ds1.ell.p
        cross = {k: alphas[k].a12 for k in _KINDS}
        tail = min(ds1.tail, ds2.tail)
        for k in _KINDS:
            c = cross[k]
            if c.u != 0:
                tail = min(tail, ds1.tail + min(0, c.valuation()))
        return _RhoWindow(p, prec,
                          {k: ds1.u[k] for k in _KINDS},
                          {k: ds2.u[k] for k in _KINDS},
                          cross, ds1.ell, ds2.ell, targets, tail, label)

    # -- normalisation ------------------------------------------------------

    def _fold(self, k):
        """Fold the cross term's boundary rows into per-variable
        coefficient lists and record the normalising valuation."""
        T = min(self.A.cutoff, self.B.cutoff,
                self.U1[k].cutoff, self.U2[k].cutoff)
        c = self.cross[k]
        A0 = self.A.coeff(0)
        B0 = self.B.coeff(0)
        cB0 = c * B0
        cA0 = c * A0
        fx = [self.U1[k].coeff(i) + cB0 * self.A.coeff(i) for i in range(T)]
        fy = [self.U2[k].coeff(j) + cA0 * self.B.coeff(j) for j in range(T)]
        nu = None
        for z in fx[1:] + fy[1:]:
            v = _vfloor(z)
            nu = v if nu is None else min(nu, v)
        va = [_vfloor(self.A.coeff(i)) for i in range(T)]
        vb = [_vfloor(self.B.coeff(j)) for j in range(T)]
        if c.u != 0 and T > 1:
            vc = c.valuation() + min(va[1:]) + min(vb[1:])
            nu = vc if nu is None else min(nu, vc)
        self.nu[k] = 0 if nu is None else min(nu, self.tail - 2)
        self._folded[k] = (T, fx, fy, va, vb)

    def _const(self, k) -> PadicNumber:
        return (self.U1[k].coeff(0) + self.U2[k].coeff(0)
                + self.cross[k] * self.A.coeff(0) * self.B.coeff(0)
                - self.targets[k])

    def viable(self) -> bool:
        """False when the constant term provably beats every nonconstant
        coefficient, so the equation has no zero on the window."""
        for k in _KINDS:
            c = self._const(k)
            if c.u != 0 and c.v < self.nu[k]:
                return False
        return True

    # -- mod-p seeding -------------------------------------------------------

    def _seed_tables(self):
        if self._tables is not None:
            return self._tables
        p = self.p
        tabs = []
        for k in _KINDS:
            T, fx, fy, va, vb = self._folded[k]
            nu = self.nu[k]
            c = self.cross[k]
            rx = [0] + [_red_mod_p(z, nu, self.label) for z in fx[1:]]
            ry = [0] + [_red_mod_p(z, nu, self.label) for z in fy[1:]]
            cl = []
            if c.u != 0:
                vc = c.valuation()
                for i in range(1, T):
                    if vc + va[i] + min(vb[1:], default=nu + 1) > nu:
                        continue
                    ai = self.A.coeff(i)
                    for j in range(1, T - i):
                        if vc + va[i] + vb[j] != nu:
                            continue
                        r = _red_mod_p(c * ai * self.B.coeff(j), nu, self.label)
                        if r:
                            cl.append((i, j, r))
            c0 = _red_mod_p(self._const(k), nu, self.label)
            xt = [_horner_mod(rx, a, p) for a in range(p)]
            yt = [_horner_mod(ry, b, p) for b in range(p)]
            tabs.append((c0, xt, yt, cl))
        self._tables = tabs
        return tabs

    def seeds(self):
        p = self.p
        tabs = self._seed_tables()
        deg = max([i for t in tabs for (i, j, _) in t[3]] +
                  [j for t in tabs for (i, j, _) in t[3]], default=0)
        pw = [[pow(a, e, p) for e in range(deg + 1)] for a in range(p)]
        out = []
        for a in range(p):
            for b in range(p):
                ok = True
                for (c0, xt, yt, cl) in tabs:
                    v = c0 + xt[a] + yt[b]
                    for (i, j, cc) in cl:
                        v += cc * pw[a][i] * pw[b][j]
                    if v % p:
                        ok = False
                        break
                if ok:
                    out.append((a, b))
        return out

    # -- evaluation ----------------------------------------------------------

    def _ab(self, x, y):
        key = (x.v, x.u, x.n, y.v, y.u, y.n)
        if self._last is not None and self._last[0] == key:
            return self._last[1:]
        ax = self.A.eval_unit(x, self.tail)
        by = self.B.eval_unit(y, self.tail)
        dax = self.dA.eval_unit(x, self.tail)
        dby = self.dB.eval_unit(y, self.tail)
        self._last = (key, ax, by, dax, dby)
        return ax, by, dax, dby

    def values(self, x, y):
        ax, by, _, _ = self._ab(x, y)
        out = []
        for k in _KINDS:
            v = (self.U1[k].eval_unit(x, self.tail)
                 + self.U2[k].eval_unit(y, self.tail)
                 + self.cross[k] * ax * by - self.targets[k])
            out.append(_pshift(v, -self.nu[k]))
        return tuple(out)

    def jacobian(self, x, y):
        ax, by, dax, dby = self._ab(x, y)
        rows = []
        for k in _KINDS:
            gx = self.dU1[k].eval_unit(x, self.tail) + self.cross[k] * dax * by
            gy = self.dU2[k].eval_unit(y, self.tail) + self.cross[k] * ax * dby
            rows.append((_pshift(gx, -self.nu[k]), _pshift(gy, -self.nu[k])))
        return tuple(rows)

    def recenter(self, a: int, b: int) -> "_RhoWindow":
        prec = self.prec
        return _RhoWindow(
            self.p, prec,
            {k: _recenter1(self.U1[k], a, prec) for k in _KINDS},
            {k: _recenter1(self.U2[k], b, prec) for k in _KINDS},
            self.cross,
            _recenter1(self.A, a, prec),
            _recenter1(self.B, b, prec),
            self.targets, self.tail,
            f"{self.label} sub({a},{b})")


def _horner_mod(coeffs: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


class _PolyWindow:
    """A pair of bivariate polynomial equations on Z_p x Z_p.

    Backs the planted solver systems; exact polynomials, so evaluation
    needs no tail bound.
    """

    def __init__(self, F1: PadicSeries2, F2: PadicSeries2, label="planted"):
        self.p = F1.p
        self.F = (F1, F2)
        self.label = label
        self.prec = max(c.n for S in self.F for c in S.coeffs.values()
                        if c.u != 0) if any(S.coeffs for S in self.F) else 20
        self._J = tuple((S.partial(0), S.partial(1)) for S in self.F)
        self.nu = {}
        for k, S in enumerate(self.F):
            nu = None
            for (i, j), c in S.coeffs.items():
                if i + j == 0:
                    continue
                v = _vfloor(c)
                nu = v if nu is None else min(nu, v)
            self.nu[k] = 0 if nu is None else nu

    def _const(self, k) -> PadicNumber:
        return self.F[k].coeffs.get((0, 0), PadicNumber.zero(self.p))

    def viable(self) -> bool:
        for k in (0, 1):
            c = self._const(k)
            if c.u != 0 and c.v < self.nu[k]:
                return False
        return True

    def seeds(self):
        p = self.p
        red = []
        for k, S in enumerate(self.F):
            rr = {}
            for (i, j), c in S.coeffs.items():
                r = _red_mod_p(c, self.nu[k], self.label)
                if r:
                    rr[(i, j)] = r
            red.append(rr)
        deg = max((e for rr in red for ij in rr for e in ij), default=0)
        pw = [[pow(a, e, p) for e in range(deg + 1)] for a in range(p)]
        out = []
        for a in range(p):
            for b in range(p):
                if all(sum(c * pw[a][i] * pw[b][j] for (i, j), c in rr.items())
                       % p == 0 for rr in red):
                    out.append((a, b))
        return out

    def values(self, x, y):
        return tuple(_pshift(self.F[k].eval(x, y), -self.nu[k]) for k in (0, 1))

    def jacobian(self, x, y):
        return tuple(
            (_pshift(self._J[k][0].eval(x, y), -self.nu[k]),
             _pshift(self._J[k][1].eval(x, y), -self.nu[k]))
            for k in (0, 1))

    def recenter(self, a: int, b: int) -> "_PolyWindow":
        p = self.p
        out = []
        for S in self.F:
            d = {}
            for (i, j), c in S.coeffs.items():
                for i2 in range(i + 1):
                    for j2 in range(j + 1):
                        w = (comb(i, i2) * comb(j, j2)
                             * a ** (i - i2) * b ** (j - j2))
                        t = _pshift(c * w, i2 + j2) if w else None
                        if t is None:
                            continue
                        key = (i2, j2)
                        d[key] = d[key] + t if key in d else t
            out.append(PadicSeries2(p, d, S.cutoff))
        w = _PolyWindow(out[0], out[1], f"{self.label} sub({a},{b})")
        return w


# ----------------------------------------------------------------------
# the solver core

def _solve_window(win, res_goal: int, res_floor: int, max_depth: int,
                  depth: int, unresolved: list, stats: dict):
    """All roots of the window system, in window coordinates.

    Returns (x, y, depth, jac_val, residual) tuples; residual is the
    valuation achieved by the unnormalised equations.  Failures land in
    `unresolved`, never dropped.
    """
    roots = []
    try:
        if not win.viable():
            return roots
        seeds = win.seeds()
    except QCError as e:
        unresolved.append({"label": win.label, "depth": depth,
                           "reason": str(e)})
        return roots
    stats["seeds"] = stats.get("seeds", 0) + len(seeds)
    p = win.p
    numin = min(win.nu.values())
    base = res_goal - numin
    for (a, b) in seeds:
        x0 = PadicNumber.from_int(a, p, win.prec)
        y0 = PadicNumber.from_int(b, p, win.prec)
        got = None
        subdivide = False
        for tgt in (base, base - 4, base - 8):
            tgt = max(tgt, res_floor - numin, 3)
            try:
                stats["lifts"] = stats.get("lifts", 0) + 1
                got = hensel_bivariate(win, (x0, y0), tgt)
                break
            except SubdivisionNeeded:
                subdivide = True
                break
            except NoConvergence:
                continue
        if subdivide:
            if depth >= max_depth:
                unresolved.append({
                    "label": win.label, "seed": (a, b), "depth": depth,
                    "reason": "jacobian degenerate at max subdivision depth"})
                continue
            stats["subdivisions"] = stats.get("subdivisions", 0) + 1
            sub = win.recenter(a, b)
            for (x, y, d2, jv, res) in _solve_window(
                    sub, res_goal, res_floor, max_depth, depth + 1,
                    unresolved, stats):
                xa = PadicNumber.from_int(a, p, win.prec) + _pshift(x, 1)
                yb = PadicNumber.from_int(b, p, win.prec) + _pshift(y, 1)
                roots.append((xa, yb, d2, jv, res))
            continue
        if got is None:
            unresolved.append({
                "label": win.label, "seed": (a, b), "depth": depth,
                "reason": "newton stalled below the residual floor"})
            continue
        x, y = got
        vals = win.values(x, y)
        res = min(_vfloor(v) + win.nu[k]
                  for v, k in zip(vals, win.nu))
        (ja, jb_), (jc, jd) = win.jacobian(x, y)
        det = ja * jd - jb_ * jc
        jv = det.valuation() if det.u != 0 else det.absprec
        roots.append((x, y, depth, jv, res))
    return roots


def _dedupe(roots, digits: int):
    """Drop repeats agreeing to `digits` digits in both coordinates,
    keeping the shallowest subdivision occurrence."""
    roots = sorted(roots, key=lambda r: r[2])
    kept = []
    for r in roots:
        dup = False
        for s in kept:
            d1, d2 = r[0] - s[0], r[1] - s[1]
            if (d1.u == 0 or d1.v >= digits) and (d2.u == 0 or d2.v >= digits):
                dup = True
                break
        if not dup:
            kept.append(r)
    return kept


def solve_unit_square(F1: PadicSeries2, F2: PadicSeries2, N: int = 12,
                      max_depth: int = 3):
    """Roots of a planted polynomial pair on Z_p x Z_p.

    Same seeding, lifting, subdivision and deduplication path as the
    rho systems; returns (roots, unresolved) with roots as
    (x, y, depth, jac_val, residual) tuples sorted by residue.
    """
    win = _PolyWindow(F1, F2)
    unresolved: list = []
    stats: dict = {}
    roots = _solve_window(win, N, max(4, N - 8), max_depth, 0,
                          unresolved, stats)
    roots = _dedupe(roots, max(2, N - 2))
    roots.sort(key=lambda r: (r[0].residue(1), r[1].residue(1)))
    return roots, unresolved


# ----------------------------------------------------------------------
# algebraic recognition

def _lagrange_shortest(M: int, r: int, S: int) -> tuple[int, int]:
    """Shortest vector of the lattice spanned by (M, 0) and (r, S)."""
    v1 = (M, 0)
    v2 = (r % M, S)
    if v1[0] * v1[0] + v1[1] * v1[1] < v2[0] * v2[0] + v2[1] * v2[1]:
        v1, v2 = v2, v1
    while True:
        d = v2[0] * v2[0] + v2[1] * v2[1]
        if d == 0:
            return v1
        dot = v1[0] * v2[0] + v1[1] * v2[1]
        mu = (2 * dot + d) // (2 * d)
        w = (v1[0] - mu * v2[0], v1[1] - mu * v2[1])
        if w[0] * w[0] + w[1] * w[1] >= d:
            return v2
        v1, v2 = v2, w


def _lattice_int(r: int, M: int, cap: int) -> int | None:
    """The integer c with c = r mod M and |c| <= cap, if one exists.

    Reduction of the plane lattice [(M, 0), (r, S)] with the second
    column scaled to the target size; the scaling keeps the wanted
    vector shortest even when cap is far from sqrt(M).
    """
    if cap <= 0:
        return None
    S = cap + 1
    u, w = _lagrange_shortest(M, r, S)
    if abs(w) != S:
        return None
    c = u if w == S else -u
    if abs(c) > cap or (c - r) % M:
        return None
    return c


@dataclass
class KCandidate:
    """A recognised O_K-point behind a solver root."""
    x: QuadInt
    y: QuadInt
    point: tuple


def _recognize_element(machine, z1: PadicNumber, z2: PadicNumber,
                       N: int) -> QuadInt | None:
    """O_K-element with embeddings z1, z2, coefficients capped at
    p^(N/2 - 2); trace and norm are reconstructed from z1 + z2 and
    z1 z2 by planar lattice reduction."""
    p = machine.p
    K = machine.curve.K
    s = z1 + z2
    pr = z1 * z2
    if _vfloor(s) < 0 or _vfloor(pr) < 0:
        return None
    Neff = min(N, s.absprec, pr.absprec)
    if Neff < 8:
        return None
    Nb = min(N, Neff + 3)
    bound = isqrt(ppow(p, Nb - 4))
    M = ppow(p, Neff)
    c1, c0 = K.c1, K.c0          # w^2 + c1 w + c0 = 0
    tr = _lattice_int(s.residue(Neff), M, (2 + abs(c1)) * bound)
    if tr is None:
        return None
    nm = _lattice_int(pr.residue(Neff), M, (1 + abs(c1) + c0) * bound * bound)
    if nm is None:
        return None
    den = 4 * c0 - c1 * c1       # positive for an imaginary field
    num = 4 * nm - tr * tr
    if num < 0 or num % den:
        return None
    bsq = num // den
    b = isqrt(bsq)
    if b * b != bsq:
        return None
    for bb in sorted({b, -b}):
        if (tr + c1 * bb) % 2:
            continue
        aa = (tr + c1 * bb) // 2
        if abs(aa) > bound or abs(bb) > bound:
            continue
        cand = QuadInt(K, aa, bb)
        e1 = embed(cand, machine.spl, 1) - z1
        e2 = embed(cand, machine.spl, 2) - z2
        if e1.val_at_least(Neff - 2) and e2.val_at_least(Neff - 2):
            return cand
    return None


def recognize_algebraic(machine, coords, N: int) -> KCandidate | None:
    """Match a solution pair ((x1,y1),(x2,y2)) to an O_K-point.

    Both coordinates must reconstruct to integral elements within the
    coefficient bound, the candidate must satisfy the curve equation
    exactly, and its embeddings must agree with the input; anything
    else is a mock point, not an error.
    """
    (x1, y1), (x2, y2) = coords
    xc = _recognize_element(machine, x1, x2, N)
    if xc is None:
        return None
    yc = _recognize_element(machine, y1, y2, N)
    if yc is None:
        return None
    P = (QuadRat.from_quadint(xc), QuadRat.from_quadint(yc))
    if not machine.curve.on_curve(P):
        return None
    return KCandidate(x=xc, y=yc, point=P)


# ----------------------------------------------------------------------
# results

def _num_record(z: PadicNumber, digits: int) -> dict:
    k = max(0, min(digits, z.absprec))
    return {"value": str(z.residue(k)) if k else "0",
            "precision": k}


@dataclass
class QCPoint:
    """One member of B_p with its provenance and diagnostics."""
    pair: tuple[int, int]
    centers: tuple
    target_index: tuple[int, int]
    target: tuple
    s: tuple
    t: tuple
    coords: tuple
    f: tuple
    residual: int
    jac_val: int
    depth: int
    recognized: KCandidate | None = None

    def record(self, N: int) -> dict:
        (x1, y1), (x2, y2) = self.coords
        rec = None
        if self.recognized is not None:
            rec = {"x": [self.recognized.x.a, self.recognized.x.b],
                   "y": [self.recognized.y.a, self.recognized.y.b]}
        return {
            "pair": list(self.pair),
            "centers": [list(self.centers[0]), list(self.centers[1])],
            "target_index": list(self.target_index),
            "target": [_num_record(t, N) for t in self.target],
            "t": [_num_record(z, N) for z in self.t],
            "x": [_num_record(x1, N), _num_record(x2, N)],
            "y": [_num_record(y1, N), _num_record(y2, N)],
            "f": [_num_record(z, N) for z in self.f],
            "residual": self.residual,
            "jac_val": self.jac_val,
            "depth": self.depth,
            "recognized": rec,
        }


@dataclass
class QCResult:
    """The solver output: B_p split into recognised and mock points."""
    p: int
    N: int
    targets: dict
    points: list
    unresolved: list
    alphas: dict | None = None
    stats: dict = field(default_factory=dict)

    @property
    def recognized(self) -> list:
        return [pt for pt in self.points if pt.recognized is not None]

    @property
    def mock(self) -> list:
        """A_p, the solutions not matched to O_K-points."""
        return [pt for pt in self.points if pt.recognized is None]

    def records(self) -> list[dict]:
        return [pt.record(self.N) for pt in self.points]

    def write_jsonl(self, path: str):
        with open(path, "w") as fh:
            head = {"p": self.p, "N": self.N,
                    "targets": {k: [_num_record(t, self.N) for t in v]
                                for k, v in self.targets.items()},
                    "counts": {"B": len(self.points),
                               "recognized": len(self.recognized),
                               "A": len(self.mock)},
                    "unresolved": self.unresolved,
                    "stats": self.stats}
            fh.write(json.dumps(head) + "\n")
            for r in self.records():
                fh.write(json.dumps(r) + "\n")


# ----------------------------------------------------------------------
# the driver

def solve_disks(machine, alphas, N: int = 25, cutoff: int = DISK_CUTOFF,
                max_depth: int = 3, progress=None) -> QCResult:
    """Root-find (rho^cyc, rho^anti) = (t1, t2) over all affine disk
    pairs and all targets in T^cyc x T^anti, then recognise.

    Deterministic: disk pairs, targets and roots are reported in sorted
    order whatever the completion order was.
    """
    p, prec = machine.p, machine.prec
    t0 = time.monotonic()
    Ts = {k: machine.t_values(k) for k in _KINDS}
    targets = [((i, j), (tc, ta))
               for i, tc in enumerate(Ts["cyc"])
               for j, ta in enumerate(Ts["anti"])]
    ds1 = [_disk_series(machine, d, 1, alphas)
           for d in affine_disks(machine, 1, cutoff)]
    ds2 = [_disk_series(machine, d, 2, alphas)
           for d in affine_disks(machine, 2, cutoff)]
    points: list[QCPoint] = []
    unresolved: list = []
    stats: dict = {"pairs": len(ds1) * len(ds2),
                   "targets": len(targets)}
    done = 0
    for s1 in ds1:
        for s2 in ds2:
            pair_idx = (s1.disk.index, s2.disk.index)
            for (tidx, tval) in targets:
                label = f"pair {pair_idx} target {tidx}"
                win = _RhoWindow.from_disks(
                    s1, s2, alphas, {"cyc": tval[0], "anti": tval[1]},
                    prec, label)
                raw = _solve_window(win, N + 2, N - 8, max_depth, 0,
                                    unresolved, stats)
                for (x, y, depth, jv, res) in _dedupe(raw, N - 2):
                    t1 = _pshift(x, 1)
                    t2 = _pshift(y, 1)
                    R1 = s1.disk.point_at(t1)
                    R2 = s2.disk.point_at(t2)
                    f1 = s1.ell.eval_unit(x, s1.tail)
                    f2 = s2.ell.eval_unit(y, s2.tail)
                    pt = QCPoint(
                        pair=pair_idx,
                        centers=(s1.disk.center, s2.disk.center),
                        target_index=tidx, target=tval,
                        s=(x, y), t=(t1, t2),
                        coords=(R1, R2), f=(f1, f2),
                        residual=res, jac_val=jv, depth=depth,
                        recognized=recognize_algebraic(
                            machine, (R1, R2), N))
                    points.append(pt)
            done += 1
            if progress is not None:
                progress(done, stats["pairs"])
    def _key(pt: QCPoint):
        k = max(1, min(N - 2, pt.s[0].absprec, pt.s[1].absprec))
        return (pt.pair, pt.target_index,
                pt.s[0].residue(k), pt.s[1].residue(k))
    points.sort(key=_key)
    stats["time"] = round(time.monotonic() - t0, 3)
    return QCResult(p=p, N=N, targets=Ts, points=points,
                    unresolved=unresolved, alphas=alphas, stats=stats)


def quadratic_chabauty_set(machine, P, Q, N: int = 25,
                           cutoff: int = DISK_CUTOFF, max_depth: int = 3,
                           progress=None) -> QCResult:
    """End-to-end: height form coefficients from the generators, then
    the disk solve and recognition."""
    alphas = solve_alpha(machine, P, Q)
    return solve_disks(machine, alphas, N=N, cutoff=cutoff,
                       max_depth=max_depth, progress=progress)
