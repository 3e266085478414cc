"""Curve-layer tests: group law, reductions, division polynomials,
formal group, residue disks, local data validation.

Fixture curves here are the ones exercised end to end by the pipeline;
coordinates are (a, b) pairs meaning a + b*w with w a primitive cube
root of unity for d = -3.
"""

import random
from fractions import Fraction

import pytest

from quadchab.curve import (
    CurveModel,
    CurveError,
    DivisionPolynomials,
    EmbeddedCurve,
    FpCurve,
    LocalData,
    build_disk,
    contribution_table,
    everywhere_nonsingular,
    good_multiple,
    multiple_as_series,
    nonsingular_at,
    validate_local_data,
)
from quadchab.padic import PadicNumber
from quadchab.quadfield import (
    QuadInt,
    QuadRat,
    canonical_associate,
    make_field,
    split_prime,
    embed,
)

K3 = make_field(-3)


def qi(a, b=0):
    return QuadInt(K3, a, b)


def qr(a, b=0):
    return QuadRat.from_quadint(qi(a, b))


def u1_curve() -> CurveModel:
    # y^2 + (w+2) y = x^3 + (-w-2) x^2 + (w+1) x
    return CurveModel(K3, qi(0), qi(-2, -1), qi(2, 1), qi(1, 1), qi(0))


def u2_curve() -> CurveModel:
    # Galois conjugate of u1
    return CurveModel(K3, qi(0), qi(-1, 1), qi(1, -1), qi(0, -1), qi(0))


def u3_curve() -> CurveModel:
    # y^2 + (w+1) y = x^3 + (-w-2) x^2 + (w+1) x + (w+2)
    return CurveModel(K3, qi(0), qi(-2, -1), qi(1, 1), qi(1, 1), qi(2, 1))


def mordell_curve() -> CurveModel:
    # y^2 = x^3 - 4, base changed
    return CurveModel(K3, qi(0), qi(0), qi(0), qi(0), qi(-4))


U1_POINTS = [
    ((-3, 0), (-4, -8)),
    ((-3, 0), (2, 7)),
    ((4, 4), (-4, -8)),
    ((0, 0), (0, 0)),
    ((0, 0), (-2, -1)),
    ((1, 1), (0, 0)),
    ((1, 1), (-2, -1)),
    ((4, 4), (2, 7)),
    ((1, 0), (0, 0)),
    ((1, 0), (-2, -1)),
    ((1, -3), (-4, -8)),
    ((1, -3), (2, 7)),
]


def u1_points():
    return [(qr(*x), qr(*y)) for x, y in U1_POINTS]


def u1_generators():
    return (qr(1), qr(0)), (qr(1, 1), qr(0))


class TestModel:
    def test_u1_discriminant_is_square_of_bad_prime(self):
        C = u1_curve()
        pi = canonical_associate(qi(-9, -22))
        assert pi.norm() == 367
        assert C.disc.val_at(pi) == 2
        cof = C.disc.exact_div(pi).exact_div(pi)
        assert cof.is_unit()

    def test_u3_discriminant_valuations(self):
        C = u3_curve()
        v1 = qi(1, 3)
        v2 = qi(1, 6)
        assert (v1.norm(), v2.norm()) == (7, 31)
        assert C.disc.val_at(v1) == 4
        assert C.disc.val_at(v2) == 2

    def test_singular_model_rejected(self):
        with pytest.raises(CurveError):
            CurveModel(K3, qi(0), qi(0), qi(0), qi(0), qi(0))

    def test_all_listed_points_on_u1(self):
        C = u1_curve()
        for P in u1_points():
            assert C.on_curve(P)

    def test_u3_generators_on_curve(self):
        C = u3_curve()
        P = (qr(-1), qr(-1, -2))
        Q = (qr(2, 2), qr(0, 1))
        assert C.on_curve(P) and C.on_curve(Q)

    def test_off_curve_detected(self):
        C = u1_curve()
        assert not C.on_curve((qr(2), qr(0)))


class TestGroupLaw:
    def test_identity_and_inverse(self):
        C = u1_curve()
        P, Q = u1_generators()
        assert C.add(P, None) == P
        assert C.add(None, Q) == Q
        assert C.add(P, C.neg(P)) is None

    def test_associativity_on_fixture_points(self):
        C = u1_curve()
        pts = u1_points()
        rng = random.Random(5)
        for _ in range(25):
            A, B, D = (rng.choice(pts) for _ in range(3))
            assert C.add(C.add(A, B), D) == C.add(A, C.add(B, D))

    def test_commutativity(self):
        C = u1_curve()
        P, Q = u1_generators()
        assert C.add(P, Q) == C.add(Q, P)

    def test_mul_matches_repeated_add(self):
        C = u1_curve()
        P, _ = u1_generators()
        R = None
        for k in range(1, 8):
            R = C.add(R, P)
            assert C.mul(k, P) == R
        assert C.mul(-3, P) == C.neg(C.mul(3, P))
        assert C.mul(0, P) is None

    def test_sum_of_generators_is_a_listed_point(self):
        C = u1_curve()
        P, Q = u1_generators()
        assert C.add(P, Q) in u1_points()

    def test_listed_points_are_small_combinations(self):
        C = u1_curve()
        P, Q = u1_generators()
        combos = {}
        for m in range(-4, 5):
            for n in range(-4, 5):
                R = C.add(C.mul(m, P), C.mul(n, Q))
                if R is not None:
                    combos[(R[0], R[1])] = (m, n)
        for pt in u1_points():
            assert pt in combos

    def test_generators_nontorsion(self):
        C = u1_curve()
        P, Q = u1_generators()
        for G in (P, Q):
            R = G
            for _ in range(30):
                R = C.add(R, G)
                assert R is not None


class TestReduction:
    def test_u1_counts_at_7(self):
        C = u1_curve()
        spl = split_prime(K3, 7)
        assert C.reduce_at_side(spl, 1).count() == 13
        assert C.reduce_at_side(spl, 2).count() == 13

    def test_u1_counts_at_13(self):
        C = u1_curve()
        spl = split_prime(K3, 13)
        counts = sorted(C.reduce_at_side(spl, s).count() for s in (1, 2))
        assert counts == [7, 19]

    def test_u3_counts(self):
        C = u3_curve()
        spl13 = split_prime(K3, 13)
        assert sorted(C.reduce_at_side(spl13, s).count() for s in (1, 2)) == [19, 21]
        spl19 = split_prime(K3, 19)
        assert [C.reduce_at_side(spl19, s).count() for s in (1, 2)] == [13, 13]

    def test_mordell_counts_at_7(self):
        C = mordell_curve()
        spl = split_prime(K3, 7)
        assert [C.reduce_at_side(spl, s).count() for s in (1, 2)] == [13, 13]

    def test_ordinarity(self):
        C = u1_curve()
        spl = split_prime(K3, 7)
        fp = C.reduce_at_side(spl, 1)
        assert fp.trace() == -5
        assert fp.is_ordinary()

    def test_reduction_is_homomorphism(self):
        C = u1_curve()
        spl = split_prime(K3, 7)
        pts = u1_points()
        rng = random.Random(9)
        for side in (1, 2):
            fp = C.reduce_at_side(spl, side)
            for _ in range(40):
                A, B = rng.choice(pts), rng.choice(pts)
                S = C.add(A, B)
                lhs = fp.reduce_point(spl, side, S)
                rhs = fp.add(fp.reduce_point(spl, side, A),
                             fp.reduce_point(spl, side, B))
                assert lhs == rhs

    def test_generator_order_13(self):
        C = u1_curve()
        spl = split_prime(K3, 7)
        P, _ = u1_generators()
        for side in (1, 2):
            fp = C.reduce_at_side(spl, side)
            Pbar = fp.reduce_point(spl, side, P)
            assert fp.order_of(Pbar) == 13
            assert fp.mul(13, Pbar) is None

    def test_fp_group_law_brute_force(self):
        fp = FpCurve(7, 1, 2, 3, 4, 5)
        if not fp.is_nonsingular():
            pytest.skip("singular test model")
        pts = fp.points()
        rng = random.Random(3)
        for _ in range(60):
            A, B, D = (rng.choice(pts) for _ in range(3))
            assert fp.add(fp.add(A, B), D) == fp.add(A, fp.add(B, D))
            assert fp.add(A, B) in pts

    def test_hasse_bound_all_small_primes(self):
        C = u1_curve()
        for p in (7, 13, 19, 31, 37):
            try:
                spl = split_prime(K3, p)
            except Exception:
                continue
            for side in (1, 2):
                C.reduce_at_side(spl, side).count()  # raises if violated


class TestDivisionPolynomials:
    def test_base_cases(self):
        C = u1_curve()
        dp = DivisionPolynomials(C)
        assert dp.univariate(1) == [K3.one()]
        assert dp.univariate(2) == [K3.one()]
        # psi_3 = 3x^4 + b2 x^3 + 3 b4 x^2 + 3 b6 x + b8
        u3 = dp.univariate(3)
        assert u3[4] == qi(3) and u3[3] == C.b2 and u3[0] == C.b8

    def test_psi2_value(self):
        C = u1_curve()
        dp = DivisionPolynomials(C)
        P, _ = u1_generators()
        one = QuadRat.from_quadint(K3.one())
        v = dp.value(2, P[0], P[1], one)
        # 2y + a1 x + a3 at (1, 0) is w + 2
        assert v == qr(2, 1)

    def test_multiplication_identity_exact(self):
        # x(mP) = x - psi_{m-1} psi_{m+1} / psi_m^2 over K
        C = u1_curve()
        dp = DivisionPolynomials(C)
        one = QuadRat.from_quadint(K3.one())
        P = C.add(*u1_generators())  # a generic-looking point
        x, y = P
        for m in range(2, 7):
            mP = C.mul(m, P)
            assert mP is not None
            num = dp.value(m - 1, x, y, one) * dp.value(m + 1, x, y, one)
            den = dp.value(m, x, y, one)
            assert mP[0] == x - num / (den * den)

    def test_value_matches_univariate(self):
        C = u1_curve()
        dp = DivisionPolynomials(C)
        one = QuadRat.from_quadint(K3.one())
        P, Q = u1_generators()
        R = C.add(C.mul(2, P), Q)
        x, y = R
        w2 = 2 * y + QuadRat.from_quadint(C.a1) * x + QuadRat.from_quadint(C.a3)
        for m in range(1, 16):
            direct = dp.value(m, x, y, one)
            via_poly = dp._eval_univariate(dp.univariate(m), x, one)
            if m % 2 == 0:
                via_poly = via_poly * w2
            assert direct == via_poly

    def test_padic_value_matches_exact(self):
        C = u1_curve()
        spl = split_prime(K3, 7, prec=30)
        E = EmbeddedCurve(C, spl, 1, prec=30)
        dp = DivisionPolynomials(C)
        one = QuadRat.from_quadint(K3.one())
        P, _ = u1_generators()
        x, y = P
        for m in (5, 9, 14, 26):
            exact = dp.value(m, x, y, one)
            ex1 = embed(exact, spl, 1)
            pad = E.divpoly_value(m, embed(x, spl, 1), embed(y, spl, 1))
            assert (ex1 - pad).u == 0

    def test_divpoly_detects_reduction_order(self):
        # psi_m(P) = 0 mod p1 exactly when m is a multiple of ord(P mod p1) = 13
        C = u1_curve()
        spl = split_prime(K3, 7, prec=25)
        E = EmbeddedCurve(C, spl, 1, prec=25)
        P, _ = u1_generators()
        x1, y1 = E.embed_point(P)
        for m in range(2, 13):
            v = E.divpoly_value(m, x1, y1)
            assert v.valuation() == 0, m
        v13 = E.divpoly_value(13, x1, y1)
        assert v13.valuation() >= 1


class TestPadicPoints:
    def test_embed_point_on_curve(self):
        C = u1_curve()
        spl = split_prime(K3, 7, prec=30)
        for side in (1, 2):
            E = EmbeddedCurve(C, spl, side, prec=30)
            for P in u1_points():
                assert E.on_curve_padic(E.embed_point(P))

    def test_pmul_sequential_matches_exact(self):
        C = u1_curve()
        spl = split_prime(K3, 7, prec=30)
        E = EmbeddedCurve(C, spl, 1, prec=30)
        P, _ = u1_generators()
        eP = E.embed_point(P)
        for n in (2, 5, 9):
            exact = E.embed_point(C.mul(n, P))
            got = E.pmul_sequential(n, eP)
            assert (exact[0] - got[0]).u == 0
            assert (exact[1] - got[1]).u == 0

    def test_multiple_to_parameter_valuation(self):
        # 13P lies in the formal disk on both sides at p=7
        C = u1_curve()
        spl = split_prime(K3, 7, prec=30)
        P, _ = u1_generators()
        for side in (1, 2):
            E = EmbeddedCurve(C, spl, side, prec=30)
            tau = E.multiple_to_parameter(E.embed_point(P), 13)
            assert tau.valuation() >= 1

    def test_parameter_roundtrip(self):
        C = u1_curve()
        spl = split_prime(K3, 7, prec=30)
        E = EmbeddedCurve(C, spl, 1, prec=30)
        P, _ = u1_generators()
        tau = E.multiple_to_parameter(E.embed_point(P), 13)
        S = E.parameter_to_point(tau, 24)
        assert E.on_curve_padic(S, tol=18)
        t2 = E.point_to_parameter(S)
        assert (t2 - tau).u == 0 or (t2 - tau).valuation() >= 18


class TestFormalGroup:
    def test_x_series_leading_terms(self):
        # x(t) = t^-2 - a1 t^-1 - a2 - a3 t - ...
        C = CurveModel(K3, qi(1, 1), qi(2), qi(0, 1), qi(1), qi(3))
        spl = split_prime(K3, 7, prec=25)
        E = EmbeddedCurve(C, spl, 1, prec=25)
        f = E.formal(12)
        xs = f["x"]
        a1, a2, a3 = E.a1, E.a2, E.a3
        assert (xs.coeff(-2) - 1).u == 0
        assert (xs.coeff(-1) + a1).u == 0
        assert (xs.coeff(0) + a2).u == 0
        assert (xs.coeff(1) + a3).u == 0

    def test_formal_point_on_curve(self):
        C = u1_curve()
        spl = split_prime(K3, 7, prec=25)
        E = EmbeddedCurve(C, spl, 1, prec=25)
        f = E.formal(16)
        xs, ys = f["x"], f["y"]
        a1, a2, a3, a4, a6 = E.a
        from quadchab.padic import PadicSeries1
        g = (ys * ys + (xs * ys).scale(a1) + ys.scale(a3)
             - xs * xs * xs - (xs * xs).scale(a2) - xs.scale(a4)
             - PadicSeries1.constant(a6, xs.cutoff))
        for k in range(g.shift, 9):
            c = g.coeff(k)
            assert c.u == 0 or c.valuation() >= 20, (k, c)

    def test_parameter_identity(self):
        # t = -x(t)/y(t)
        C = u1_curve()
        spl = split_prime(K3, 7, prec=25)
        E = EmbeddedCurve(C, spl, 1, prec=25)
        f = E.formal(14)
        ratio = -f["x"] * f["y"].invert_multiplicative()
        assert ratio.tval() == 1
        assert (ratio.coeff(1) - 1).u == 0
        for k in range(2, 10):
            c = ratio.coeff(k)
            assert c.u == 0 or c.valuation() >= 18

    def test_log_leading_terms(self):
        C = CurveModel(K3, qi(1, 1), qi(2), qi(0, 1), qi(1), qi(3))
        spl = split_prime(K3, 7, prec=25)
        E = EmbeddedCurve(C, spl, 1, prec=25)
        f = E.formal(12)
        L = f["log"]
        assert (L.coeff(1) - 1).u == 0
        half_a1 = E.a1 / PadicNumber.from_int(2, 7, 25)
        assert (L.coeff(2) - half_a1).u == 0

    def test_exp_log_roundtrip(self):
        C = u1_curve()
        spl = split_prime(K3, 7, prec=25)
        E = EmbeddedCurve(C, spl, 1, prec=25)
        f = E.formal(14)
        comp = f["exp"].compose(f["log"])
        assert (comp.coeff(1) - 1).u == 0
        for k in range(2, 12):
            c = comp.coeff(k)
            assert c.u == 0 or c.valuation() >= 15

    def test_formal_multiple_matches_group_law(self):
        # doubling 13P near the origin: formal log/exp against chord-tangent
        C = u1_curve()
        spl = split_prime(K3, 7, prec=30)
        E = EmbeddedCurve(C, spl, 1, prec=30)
        P, _ = u1_generators()
        tau = E.multiple_to_parameter(E.embed_point(P), 13)
        S = E.parameter_to_point(tau, 26)
        tau2_direct = E.add_to_parameter(S, S)
        tau2_formal = E.formal_multiple(tau, 2, 26)
        diff = tau2_direct - tau2_formal
        assert diff.u == 0 or diff.valuation() >= 20

    def test_multiple_to_parameter_two_routes(self):
        # 26P via sequential additions vs doubling in the formal group
        C = u1_curve()
        spl = split_prime(K3, 7, prec=30)
        E = EmbeddedCurve(C, spl, 1, prec=30)
        P, _ = u1_generators()
        eP = E.embed_point(P)
        tau13 = E.multiple_to_parameter(eP, 13)
        tau26_formal = E.formal_multiple(tau13, 2, 26)
        A = E.pmul_sequential(25, eP)
        tau26_direct = E.add_to_parameter(A, eP)
        diff = tau26_formal - tau26_direct
        assert diff.u == 0 or diff.valuation() >= 20


class TestDisks:
    def test_disk_centers_and_kinds_u1(self):
        C = u1_curve()
        spl = split_prime(K3, 7, prec=25)
        E = EmbeddedCurve(C, spl, 1, prec=25)
        fp = E.fp_curve()
        for center in fp.points():
            if center is None:
                continue
            d = build_disk(E, center, 12)
            assert d.kind == "x"  # group order 13, no 2-torsion
            x0, y0 = d.point_at(PadicNumber.zero(7, 25))
            assert x0.residue() == center[0]
            assert y0.residue() == center[1]

    def test_two_torsion_disk(self):
        # y^2 = x^3 + 1 has three 2-torsion points mod 7
        C = CurveModel(K3, qi(0), qi(0), qi(0), qi(0), qi(1))
        spl = split_prime(K3, 7, prec=25)
        E = EmbeddedCurve(C, spl, 1, prec=25)
        fp = E.fp_curve()
        torsion_centers = [pt for pt in fp.points()
                           if pt is not None and pt[1] == 0]
        assert len(torsion_centers) == 3
        for center in torsion_centers:
            d = build_disk(E, center, 10)
            assert d.kind == "y"
            t0 = PadicNumber.from_int(7, 7, 25)
            x0, y0 = d.point_at(t0)
            assert E.on_curve_padic((x0, y0), tol=15)

    def test_disk_point_on_curve_at_sample(self):
        C = u1_curve()
        spl = split_prime(K3, 7, prec=25)
        E = EmbeddedCurve(C, spl, 1, prec=25)
        d = build_disk(E, (1, 0), 14)
        t0 = PadicNumber.from_int(21, 7, 25)
        S = d.point_at(t0)
        assert E.on_curve_padic(S, tol=12)

    def test_multiple_as_series_matches_point_doubling(self):
        C = u1_curve()
        spl = split_prime(K3, 7, prec=25)
        E = EmbeddedCurve(C, spl, 1, prec=25)
        d = build_disk(E, (1, 0), 12)
        xs2, ys2 = multiple_as_series(E, d, 2)
        z = PadicNumber.zero(7, 25)
        center_lift = d.point_at(z)
        doubled = E.padd(center_lift, center_lift)
        dx = xs2.coeff(0) - doubled[0]
        dy = ys2.coeff(0) - doubled[1]
        assert dx.u == 0 or dx.valuation() >= 20
        assert dy.u == 0 or dy.valuation() >= 20

    def test_order_multiple_series_lands_in_formal_group(self):
        C = u1_curve()
        spl = split_prime(K3, 7, prec=25)
        E = EmbeddedCurve(C, spl, 1, prec=25)
        d = build_disk(E, (1, 0), 8)
        assert d.order == 13
        xs, ys = multiple_as_series(E, d, 13)
        tau = -xs * ys.invert_multiplicative()
        for k in range(0, tau.cutoff):
            c = tau.coeff(k)
            if c.u != 0:
                assert c.valuation() + k >= 1, (k, c)


class TestLocalData:
    def test_contribution_tables(self):
        assert contribution_table("II", 1) == [Fraction(0)]
        assert contribution_table("IV", 3) == [Fraction(0), Fraction(-2, 3)]
        assert contribution_table("III", 2) == [Fraction(0), Fraction(-1, 2)]
        assert contribution_table("I0", 1) == [Fraction(0)]
        i5 = contribution_table("I5", 5)
        assert Fraction(0) in i5 and Fraction(-6, 5) in i5 and len(i5) == 3
        assert contribution_table("I2*", 4) == [Fraction(0), Fraction(-1),
                                                Fraction(-3, 2)]
        assert contribution_table("?", 1) is None

    def test_u1_validation(self):
        C = u1_curve()
        pi = canonical_associate(qi(-9, -22))
        ld = LocalData(gen=pi, kodaira="II", tamagawa=1,
                       contributions=[Fraction(0)])
        assert validate_local_data(C, [ld]) == []
        assert ld.table_consistent

    def test_u3_validation_flags_override(self):
        C = u3_curve()
        v1 = LocalData(gen=qi(1, 3), kodaira="IV", tamagawa=3,
                       contributions=[Fraction(0)])
        v2 = LocalData(gen=qi(1, 6), kodaira="II", tamagawa=2,
                       contributions=[Fraction(0), Fraction(-2, 3)])
        warnings = validate_local_data(C, [v1, v2])
        assert len(warnings) == 2
        assert not v1.table_consistent and not v2.table_consistent

    def test_missing_place_rejected(self):
        C = u3_curve()
        v1 = LocalData(gen=qi(1, 3), kodaira="IV", tamagawa=3,
                       contributions=[Fraction(0), Fraction(-2, 3)])
        with pytest.raises(CurveError):
            validate_local_data(C, [v1])

    def test_u1_points_nonsingular_everywhere(self):
        C = u1_curve()
        pi = canonical_associate(qi(-9, -22))
        ld = LocalData(gen=pi, kodaira="II", tamagawa=1,
                       contributions=[Fraction(0)])
        for P in u1_points():
            assert nonsingular_at(C, P, pi)
            assert everywhere_nonsingular(C, P, [ld])

    def test_good_multiple_u1(self):
        C = u1_curve()
        pi = canonical_associate(qi(-9, -22))
        ld = LocalData(gen=pi, kodaira="II", tamagawa=1,
                       contributions=[Fraction(0)])
        P, _ = u1_generators()
        assert good_multiple(C, P, [ld]) == 1

    def test_good_multiple_u3(self):
        C = u3_curve()
        v1 = LocalData(gen=qi(1, 3), kodaira="IV", tamagawa=3,
                       contributions=[Fraction(0)])
        v2 = LocalData(gen=qi(1, 6), kodaira="II", tamagawa=2,
                       contributions=[Fraction(0), Fraction(-2, 3)])
        P = (qr(-1), qr(-1, -2))
        n = good_multiple(C, P, [v1, v2])
        nP = C.mul(n, P)
        assert everywhere_nonsingular(C, nP, [v1, v2])
