import pytest

from quadchab.padic import PadicNumber, PadicSeries1, PrecisionError, padic_log
from quadchab.quadfield import QuadField, QuadInt, split_prime
from quadchab.curve import CurveModel, EmbeddedCurve
from quadchab.sigma import (SigmaError, SigmaFunction, formal_expansions,
                            load_sigma, save_sigma, sigma_cache_key,
                            sigma_function)

K3 = QuadField(-3)
K7 = QuadField(-7)


def qi(a, b=0, K=K3):
    return QuadInt(K, a, b)


def u1_curve():
    return CurveModel(K3, qi(0), qi(-2, -1), qi(2, 1), qi(1, 1), qi(0))


def u1_gen():
    return (qi(1, 0), qi(0, 0))


def embedded(side=1, p=7, prec=40):
    spl = split_prime(K3, p, prec=prec)
    return EmbeddedCurve(u1_curve(), spl, side, prec=prec)


def agree_digits(a: PadicNumber, b: PadicNumber) -> int:
    d = a - b
    if d.u == 0:
        return d.v
    return d.valuation()


class TestFormalExpansions:
    def test_parameter_identity(self):
        # t = -x(t)/y(t) to truncation order
        E = embedded()
        F = formal_expansions(E, 20)
        ratio = -(F.x_series * F.y_series.invert_multiplicative())
        for k in range(-1, 16):
            c = ratio.coeff(k)
            want = 1 if k == 1 else 0
            d = c - PadicNumber.from_int(want, 7, 40)
            assert d.u == 0 or d.valuation() >= 30, k

    def test_omega_normalised_and_log_derivative(self):
        E = embedded()
        F = formal_expansions(E, 20)
        assert F.omega_series.coeff(0) == 1
        dL = F.formal_log.derivative()
        for k in range(0, 18):
            d = dL.coeff(k) - F.omega_series.coeff(k)
            assert d.u == 0 or d.valuation() >= 30, k
        c0 = F.formal_log.coeff(0)
        assert c0.u == 0

    def test_leading_terms(self):
        E = embedded()
        F = formal_expansions(E, 12)
        a1, a2, a3 = E.a1, E.a2, E.a3
        assert (F.x_series.coeff(-2) - PadicNumber.from_int(1, 7, 40)).u == 0
        assert (F.x_series.coeff(-1) + a1).u == 0
        assert (F.x_series.coeff(0) + a2).u == 0
        assert (F.x_series.coeff(1) + a3).u == 0


class TestSigmaCompute:
    def test_leading_term(self):
        S = sigma_function(embedded())
        assert (S.series.coeff(1) - PadicNumber.from_int(1, 7, 40)).u == 0
        c0 = S.series.coeff(0)
        assert c0.u == 0

    def test_integral_coefficients(self):
        S = sigma_function(embedded())
        for k in range(1, S.series.cutoff):
            ck = S.series.coeff(k)
            assert ck.u == 0 or ck.valuation() >= 0, k

    def test_t2_coefficient_is_half_a1(self):
        # sigma = t + (a1/2) t^2 + ...; U1 has a1 = 0, so use a twisted model
        C = CurveModel(K3, qi(1, 1), qi(2), qi(0, 1), qi(1), qi(3))
        spl = split_prime(K3, 7, prec=30)
        E = EmbeddedCurve(C, spl, 1, prec=30)
        S = sigma_function(E)
        half = PadicNumber.from_int(1, 7, 30) / PadicNumber.from_int(2, 7, 30)
        d = S.series.coeff(2) - E.a1 * half
        assert d.u == 0 or d.valuation() >= 20

    def test_odd_under_formal_inverse(self):
        # sigma(i(t)) = -sigma(t) where i is the group inverse parameter
        E = embedded()
        S = sigma_function(E)
        M = 24
        f = E.formal(M, need_exp=False)
        xs, ys = f["x"], f["y"]
        neg_y = -ys - xs.scale(E.a1) - PadicSeries1.constant(E.a3, ys.cutoff)
        inv = -(xs * neg_y.invert_multiplicative())
        assert inv.tval() == 1
        lhs = S.series.truncate(M).compose(inv)
        rhs = -S.series
        for k in range(1, M - 2):
            d = lhs.coeff(k) - rhs.coeff(k)
            assert d.u == 0 or d.valuation() >= 15, k

    def test_inverse_parameter_is_not_minus_t(self):
        # with a3 != 0 the formal inverse differs from -t at order 4, so the
        # oddness statement really is about the group inverse
        E = embedded()
        f = E.formal(10, need_exp=False)
        xs, ys = f["x"], f["y"]
        neg_y = -ys - xs.scale(E.a1) - PadicSeries1.constant(E.a3, ys.cutoff)
        inv = -(xs * neg_y.invert_multiplicative())
        assert (inv.coeff(1) + PadicNumber.from_int(1, 7, 40)).u == 0
        c4 = inv.coeff(4)
        assert c4.u != 0 and c4.valuation() == 0

    def test_ode_residual(self):
        # x + c = -(d/omega)((1/sigma)(d sigma/omega)) through order M-4
        E = embedded()
        S = sigma_function(E)
        f = E.formal(S.M + 2, need_exp=False)
        xs, W = f["x"], f["omega"]
        A = S.series.derivative() * (S.series * W).invert_multiplicative()
        resid = xs + PadicSeries1.constant(S.c, xs.cutoff) \
            + A.derivative() * W.invert_multiplicative()
        checked = 0
        for k in range(-2, S.M - 4):
            ck = resid.coeff(k)
            assert ck.u == 0 or ck.valuation() >= S.c_digits, k
            checked += 1
        assert checked >= S.M - 3

    def test_uniqueness_under_truncation_growth(self):
        E1, E2 = embedded(), embedded()
        S1 = sigma_function(E1)
        S2 = sigma_function(E2, M=S1.M + 6)
        for k in range(1, S1.series.cutoff):
            assert agree_digits(S1.series.coeff(k), S2.series.coeff(k)) >= 25, k
        assert agree_digits(S1.c, S2.c) >= S1.c_digits

    def test_c_detection_bound_default_truncation(self):
        S = sigma_function(embedded())
        assert S.M == 29
        assert S.c_digits == 2
        assert S.c.absprec == S.c_digits

    def test_adaptive_truncation_growth(self):
        S = sigma_function(embedded(), c_digits=3)
        assert S.c_digits >= 3
        assert S.M > 29
        S0 = sigma_function(embedded())
        assert agree_digits(S.c, S0.c) >= S0.c_digits

    def test_requested_digits_beyond_fixed_truncation(self):
        with pytest.raises(PrecisionError) as err:
            sigma_function(embedded(), M=29, c_digits=6)
        assert "pins c to" in str(err.value)

    def test_supersingular_rejected(self):
        C = CurveModel(K3, qi(0), qi(0), qi(0), qi(1), qi(0))
        spl = split_prime(K3, 19, prec=25)
        E = EmbeddedCurve(C, spl, 1, prec=25)
        assert not E.fp_curve().is_ordinary()
        with pytest.raises(SigmaError, match="supersingular"):
            sigma_function(E)

    def test_p2_unreachable(self):
        # p = 2 cannot even be split (sigma-squared theory is a non-goal);
        # the embedding layer refuses before sigma's own guard is reached
        from quadchab.quadfield import SplitError
        with pytest.raises(SplitError):
            split_prime(K7, 2, prec=20)


class TestQuadraticity:
    @pytest.mark.parametrize("side", [1, 2])
    def test_multiple_identity(self, side):
        # sigma(mQ) = sigma(Q)^(m^2) f_m(Q), the primary correctness oracle
        C = u1_curve()
        P = u1_gen()
        spl = split_prime(K3, 7, prec=40)
        E = EmbeddedCurve(C, spl, side, prec=40)
        S = sigma_function(E)
        Q0 = C.mul(13, P)
        x0, y0 = E.embed_point(Q0)
        s0 = S.eval(-x0 / y0)
        for m in (2, 3, 5):
            xm, ym = E.embed_point(C.mul(m, Q0))
            left = S.eval(-xm / ym)
            right = (s0 ** (m * m)) * E.divpoly_omega_value(m, x0, y0)
            assert agree_digits(left, right) - left.valuation() >= 15, m

    def test_log_form(self):
        # log sigma(mQ) = m^2 log sigma(Q) + log f_m(Q)
        C = u1_curve()
        P = u1_gen()
        spl = split_prime(K3, 7, prec=40)
        E = EmbeddedCurve(C, spl, 1, prec=40)
        S = sigma_function(E)
        Q0 = C.mul(13, P)
        x0, y0 = E.embed_point(Q0)
        t0 = -x0 / y0
        for m in (2, 3):
            xm, ym = E.embed_point(C.mul(m, Q0))
            lhs = S.log_eval(-xm / ym)
            rhs = S.log_eval(t0) * (m * m) \
                + padic_log(E.divpoly_omega_value(m, x0, y0))
            assert agree_digits(lhs, rhs) >= 15, m


class TestSigmaEval:
    def test_valuation_preserved_random(self):
        import random
        rng = random.Random(11)
        S = sigma_function(embedded())
        for _ in range(50):
            e = rng.randrange(1, 6)
            u = rng.randrange(1, 7 ** 8)
            while u % 7 == 0:
                u = rng.randrange(1, 7 ** 8)
            t0 = PadicNumber(7, e, u, 30)
            assert S.eval(t0).valuation() == e

    def test_zero_maps_to_zero(self):
        S = sigma_function(embedded())
        z = S.eval(PadicNumber.zero(7, 30))
        assert z.u == 0

    def test_unit_argument_rejected(self):
        S = sigma_function(embedded())
        with pytest.raises(SigmaError):
            S.eval(PadicNumber.from_int(3, 7, 30))

    def test_truncation_error_bound(self):
        # dropping tail terms moves the value by at most p^(cutoff*val(t));
        # same c on both sides, so this isolates pure truncation error
        S = sigma_function(embedded(), M=29)
        t0 = PadicNumber(7, 1, 5, 40)
        full = S.series.eval(t0)
        short = S.series.truncate(24).eval(t0)
        assert agree_digits(full, short) >= 24
        assert short.absprec == 24

    def test_refined_c_shifts_value_quadratically(self):
        # a deeper truncation pins one more digit of c; the value moves by
        # exactly c-shift times L(t0)^2/2, i.e. at digit c_digits + 2 val(t0)
        E1, E2 = embedded(), embedded()
        S1 = sigma_function(E1, M=29)
        S2 = sigma_function(E2, M=58)
        assert S2.c_digits > S1.c_digits
        assert agree_digits(S1.c, S2.c) >= S1.c_digits
        t0 = PadicNumber(7, 1, 5, 40)
        assert agree_digits(S1.eval(t0), S2.eval(t0)) >= S1.c_digits + 2

    def test_log_eval_matches_direct_log(self):
        S = sigma_function(embedded())
        t0 = PadicNumber(7, 2, 13, 40)
        direct = padic_log(S.eval(t0))
        assert agree_digits(S.log_eval(t0), direct) >= 25


class TestSigmaCache:
    def test_roundtrip(self, tmp_path):
        E = embedded()
        S = sigma_function(E)
        key = sigma_cache_key(E, S.M)
        save_sigma(S, str(tmp_path), key)
        S2 = load_sigma(str(tmp_path), key)
        assert S2 is not None
        assert S2.c_digits == S.c_digits
        assert (S2.c - S.c).u == 0
        t0 = PadicNumber(7, 1, 4, 40)
        assert (S2.eval(t0) - S.eval(t0)).u == 0

    def test_missing_key(self, tmp_path):
        assert load_sigma(str(tmp_path), "no-such-key") is None

    def test_key_separates_sides(self):
        E1, E2 = embedded(1), embedded(2)
        assert sigma_cache_key(E1, 29) != sigma_cache_key(E2, 29)
