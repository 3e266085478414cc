"""p-adic sigma function of a good ordinary curve, and its constant c.

sigma is the unique odd function sigma(t) = t + ... in t*Zp[[t]] that,
together with a constant c, satisfies

    x(t) + c = -(d/omega)((1/sigma)(d sigma/omega)).

Writing A = sigma'/(sigma*w) with omega = w(t) dt, the equation becomes
A' = -w(x + c), a single integration; the constant of integration is fixed
by oddness (A - 1/L(t) vanishes at t = 0 for the formal logarithm L), and
the c-dependence factors out exactly:

    sigma_c(t) = sigma_0(t) * exp(-c L(t)^2 / 2),

since d sigma/dc = -(L^2/2) sigma.  c itself is pinned by the integrality
of sigma's coefficients, a Newton loop on the first coefficient with
negative valuation.  The truncation M bounds how many digits of c
integrality can see: a perturbation delta of c is invisible below order M
unless some coefficient of (L^2/2) sigma under M has valuation < -val(delta).
The reported c_digits is exactly that detection bound, computed from the
series itself.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

from .padic import PadicNumber, PadicSeries1, PrecisionError
from .curve import EmbeddedCurve


class SigmaError(ValueError):
    pass


@dataclass
class FormalCurveData:
    """x(t), y(t), omega coefficient w(t) and formal log at infinity."""
    x_series: PadicSeries1
    y_series: PadicSeries1
    omega_series: PadicSeries1
    formal_log: PadicSeries1


def formal_expansions(E: EmbeddedCurve, M: int) -> FormalCurveData:
    f = E.formal(M, need_exp=False)
    return FormalCurveData(f["x"], f["y"], f["omega"], f["log"])


@dataclass
class SigmaFunction:
    series: PadicSeries1     # sigma(t) = t + ..., integral coefficients
    c: PadicNumber           # the sigma constant, capped at c_digits
    c_digits: int            # digits of c this truncation can pin down
    log_ratio: PadicSeries1  # log(sigma(t)/t), zero constant term
    M: int
    p: int

    def eval(self, t0: PadicNumber) -> PadicNumber:
        """sigma at a formal-group parameter; val(result) = val(t0)."""
        tv = t0.valuation() if t0.u != 0 else t0.v
        if tv < 1:
            raise SigmaError("sigma needs val(t) >= 1")
        return self.series.eval(t0)

    def log_eval(self, t0: PadicNumber) -> PadicNumber:
        """log_p(sigma(t0)) through the unit-ratio split."""
        from .padic import padic_log
        tv = t0.valuation() if t0.u != 0 else t0.v
        if tv < 1:
            raise SigmaError("sigma needs val(t) >= 1")
        return padic_log(t0) + self.log_ratio.eval(t0)


def _solve_at(E: EmbeddedCurve, M: int) -> SigmaFunction:
    p = E.p
    f = E.formal(M + 2, need_exp=False)
    xs, W, L = f["x"], f["omega"], f["log"]

    # A' = -w(x + c); solve at c = 0, restore c through the exact factor.
    Ader = -(W * xs)
    A = Ader.integrate()                     # t^-1 + (power series), const 0
    A0 = L.invert_multiplicative().coeff(0)  # oddness: A - 1/L -> 0 at t = 0
    A = A + PadicSeries1.constant(A0, A.cutoff)

    B = (A * W).normalized()                 # sigma'/sigma = 1/t + ...
    if B.shift != -1:
        raise SigmaError("sigma ODE lost its simple pole")
    lead = B.coeff(-1) - PadicNumber.from_int(1, p, E.prec)
    if lead.u != 0:
        raise SigmaError("sigma ODE pole coefficient is not 1")
    B = PadicSeries1(p, 0, B.coeffs[1:], B.cutoff)
    h0 = B.integrate()                       # log(sigma_0(t)/t)

    half = PadicNumber.from_int(1, p, E.prec) / PadicNumber.from_int(2, p, E.prec)
    L2half = ((L * L).truncate(M + 2)).scale(half)

    t_ser = PadicSeries1.identity(p, M + 3, E.prec)
    c = PadicNumber.zero(p)
    sig = hc = None
    for _ in range(80):
        hc = h0 - L2half.scale(c) if c.u != 0 else h0
        sig = (t_ser * hc.exp()).truncate(M + 3)
        bad_k = None
        for k in range(2, sig.cutoff):
            ck = sig.coeff(k)
            if ck.u != 0 and ck.valuation() < 0:
                bad_k = k
                break
        if bad_k is None:
            break
        dser = (L2half * sig).truncate(sig.cutoff)
        Dk = dser.coeff(bad_k)
        if Dk.u == 0 or Dk.valuation() >= 0:
            raise PrecisionError(
                f"non-integral sigma coefficient at t^{bad_k} not attributable to c")
        w_k = -Dk.valuation()
        delta = sig.coeff(bad_k) / Dk
        # digits of delta at p^w_k and above are contaminated by the unknown
        # integral part of the true coefficient; keep only the ones below
        dv = delta.valuation()
        if dv < 0:
            raise PrecisionError("sigma integrality step left Z_p")
        rep = (delta.u * pow(p, dv, p ** w_k)) % (p ** w_k)
        if rep == 0:
            raise PrecisionError("sigma integrality step stalled")
        c = c + PadicNumber.from_int(rep, p, E.prec)
    else:
        raise PrecisionError("sigma integrality loop did not converge")

    # detection bound of this truncation = worst denominator in (L^2/2) sigma
    dser = (L2half * sig).truncate(sig.cutoff)
    digits = 0
    for k in range(dser.shift, dser.cutoff):
        ck = dser.coeff(k)
        if ck.u != 0 and ck.valuation() < 0:
            digits = max(digits, -ck.valuation())
    for k in range(1, sig.cutoff):
        if sig.coeff(k).absprec < digits:
            raise PrecisionError("working precision below c detection bound")
    c_capped = c.cap_abs(digits) if digits > 0 else PadicNumber.zero(p, 0)
    return SigmaFunction(series=sig, c=c_capped, c_digits=digits,
                         log_ratio=hc, M=M, p=p)


def sigma_function(E: EmbeddedCurve, M: int | None = None,
                   c_digits: int | None = None) -> SigmaFunction:
    """Solve for (sigma, c) at truncation M.

    With no explicit M, starts at 2p+15 and grows by factors of p (capped
    at 2p^2+15) while the requested c_digits is out of reach; raises a
    precision error carrying the achieved digits if still short.
    """
    p = E.p
    if p == 2:
        raise SigmaError("p = 2 sigma (sigma squared theory) not supported")
    if not E.fp_curve().is_ordinary():
        raise SigmaError(f"supersingular reduction at {p}, sigma undefined")
    cap = 2 * p * p + 15
    cur = M if M is not None else max(2 * p + 15, (c_digits or 0) + 10)
    while True:
        S = _solve_at(E, cur)
        if c_digits is None or S.c_digits >= c_digits:
            return S
        if M is not None or cur >= cap:
            raise PrecisionError(
                f"truncation {cur} pins c to {S.c_digits} digits; "
                f"{c_digits} requested")
        cur = min(cur * p, cap)


# ----------------------------------------------------------------------
# disk cache: decimal coefficient lists keyed by curve/prime/M/precision

def sigma_cache_key(E: EmbeddedCurve, M: int) -> str:
    ident = [E.curve.K.d, E.p, E.side, M, E.prec]
    ident += [(a.a, a.b) for a in E.curve.a_invariants()]
    blob = json.dumps(ident, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:24]


def _num_to_triple(z: PadicNumber) -> list[int]:
    return [z.v, z.u, z.n]


def _num_from_triple(t, p: int) -> PadicNumber:
    return PadicNumber(p, t[0], t[1], t[2])


def save_sigma(S: SigmaFunction, cache_dir: str, key: str) -> str:
    payload = {
        "p": S.p, "M": S.M, "c_digits": S.c_digits,
        "c": _num_to_triple(S.c),
        "sigma": [_num_to_triple(S.series.coeff(k))
                  for k in range(S.series.shift, S.series.cutoff)],
        "sigma_shift": S.series.shift, "sigma_cutoff": S.series.cutoff,
        "log_ratio": [_num_to_triple(S.log_ratio.coeff(k))
                      for k in range(S.log_ratio.shift, S.log_ratio.cutoff)],
        "log_ratio_shift": S.log_ratio.shift,
        "log_ratio_cutoff": S.log_ratio.cutoff,
    }
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, f"sigma-{key}.json")
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)
    return path


def load_sigma(cache_dir: str, key: str) -> SigmaFunction | None:
    path = os.path.join(cache_dir, f"sigma-{key}.json")
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        d = json.load(fh)
    p = d["p"]
    series = PadicSeries1(p, d["sigma_shift"],
                          [_num_from_triple(t, p) for t in d["sigma"]],
                          d["sigma_cutoff"])
    log_ratio = PadicSeries1(p, d["log_ratio_shift"],
                             [_num_from_triple(t, p) for t in d["log_ratio"]],
                             d["log_ratio_cutoff"])
    return SigmaFunction(series=series, c=_num_from_triple(d["c"], p),
                         c_digits=d["c_digits"], log_ratio=log_ratio,
                         M=d["M"], p=p)
