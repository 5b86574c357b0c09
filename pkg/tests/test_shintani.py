"""Cone sums at s=0, binomial-exponent filters, and F-series laws."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from twistedzeta.exact import CycNum
from twistedzeta.field import BaseField, Cycle, FracIdeal, WClass
from twistedzeta.shintani import (
    BinomComb,
    FSeriesQ,
    TruncSeries,
    box_points,
    partial_zeta_zero,
    twisted_zeta_zero,
)
from twistedzeta.zeta import get_ray


class TestBoxPoints:
    def test_unit_square(self):
        k = BaseField.real_quadratic(2)
        O = FracIdeal.ring(k)
        pts = box_points(k, O, k.elem(0), k.elem(1), k.elem(0, 1))
        # y1*1 + y2*sqrt2 in Z[sqrt2] with y1 in (0,1], y2 in [0,1]
        assert sorted((str(x), y1, y2) for x, y1, y2 in pts) == [
            (str(k.elem(1)), Fraction(1), Fraction(0)),
            (str(k.elem(1, 1)), Fraction(1), Fraction(1)),
        ]

    def test_scaled_lattice(self):
        k = BaseField.real_quadratic(2)
        L = FracIdeal.principal(k, k.elem(2))
        pts = box_points(k, L, k.elem(1), k.elem(2), k.elem(0, 2))
        # 1 + 2Z[sqrt2] meeting (0,1]*2 + [0,1]*2sqrt2: y1 = 1/2, y2 in {0, 1}
        xs = sorted(str(x) for x, _, _ in pts)
        assert xs == [str(k.elem(1)), str(k.elem(1, 2))]


class TestZetaValuesAtZero:
    def test_twisted_closed_form(self):
        Q = BaseField.rationals()
        for f in (3, 4, 5):
            cyc = Cycle.parse(Q, f"{f}*inf")
            ray = get_ray(cyc)
            w0 = WClass.base_class(cyc)
            xi = CycNum.zeta(f)
            for a in range(1, f):
                if math.gcd(a, f) != 1:
                    continue
                z = twisted_zeta_zero(ray, w0.act_by_element(Fraction(a)))
                assert z == xi**a / (CycNum.one() - xi**a)

    def test_partial_zeta_values(self):
        Q = BaseField.rationals()
        for f in (5, 7):
            ray = get_ray(Cycle.parse(Q, f"{f}*inf"))
            got = sorted(partial_zeta_zero(ray, c) for c in ray.group.elements())
            want = sorted(
                Fraction(1, 2) - Fraction(a, f)
                for a in range(1, f)
                if math.gcd(a, f) == 1
            )
            assert got == want


def pint_fracs():
    """p-integral exponents for p in {3, 5} (denominators prime to 15)."""
    return st.builds(
        Fraction,
        st.integers(min_value=-30, max_value=30),
        st.sampled_from([1, 2, 4, 7, 8]),
    )


@st.composite
def binomcombs(draw):
    n = draw(st.integers(min_value=1, max_value=5))
    out = BinomComb()
    for _ in range(n):
        z = draw(pint_fracs())
        c = draw(st.integers(min_value=-5, max_value=5))
        out = out + BinomComb.monomial(z, c)
    return out


class TestExponentFilter:
    @given(binomcombs(), st.sampled_from([3, 5]), st.integers(min_value=0, max_value=2))
    @settings(max_examples=100, deadline=None)
    def test_idempotent_projector(self, b, p, r):
        f = b.v_filter(p, r)
        assert f.v_filter(p, r) == f
        assert b.v_filter(p, 0) == b  # exponents are p-integral

    @given(binomcombs(), st.sampled_from([3, 5]), st.integers(min_value=1, max_value=2))
    @settings(max_examples=50, deadline=None)
    def test_filter_is_root_of_unity_average(self, b, p, r):
        """p^-r sum_zeta b(zeta(1+X)-1) keeps exactly the v_p(z) >= r terms."""
        mod = p**r
        avg = BinomComb()
        for j in range(mod):
            twisted = BinomComb()
            for z, c in b.terms.items():
                e = (z.numerator * pow(z.denominator, -1, mod)) % mod
                twisted = twisted + BinomComb.monomial(
                    z, c * CycNum.zeta(mod) ** int(e * j % mod)
                )
            avg = avg + twisted
        assert avg.scale(Fraction(1, mod)) == b.v_filter(p, r)

    def test_single_monomials(self):
        assert BinomComb.monomial(2).v_filter(3, 1) == BinomComb()
        m6 = BinomComb.monomial(6)
        assert m6.v_filter(3, 1) == m6


class TestTruncSeries:
    def test_mul_div_roundtrip(self):
        a = TruncSeries([CycNum.rational(x) for x in (1, 2, 3, 4)], 3)
        b = TruncSeries([CycNum.rational(x) for x in (1, -1, 5, 0)], 3)
        assert (a * b) / b == a

    def test_compose_power_tower(self):
        s = BinomComb.monomial(Fraction(1, 7), 2).expand(10)
        assert s.compose_power(2).compose_power(3) == s.compose_power(6)


class TestFSeries:
    def test_value_at_zero_closed_form(self):
        F = FSeriesQ(3, 7, 1, 0, 1)
        beta = CycNum.zeta(7)
        assert F.value_at_zero() == beta / (CycNum.one() - beta)

    def test_averaging_matches_series_projection(self):
        for (p, fp, c, m, w) in [(3, 7, 1, 0, 1), (3, 5, 2, 1, 3), (5, 7, 3, 0, 2)]:
            F = FSeriesQ(p, fp, c, m, w)
            for r in (1, 2):
                assert F.v_value_at_zero(r) == F.apply_V(r, 0).value_at_zero()

    def test_distribution_relation(self):
        """V_r F at level m equals level m+r composed with (1+X)^(p^r)-1."""
        for (p, r) in [(3, 1), (5, 1)]:
            cap = 32 // p
            for (fp, c, m, w) in [(7, 1, 0, 1), (7, 3, 1, p), (4, 1, 0, 1)]:
                F = FSeriesQ(p, fp, c, m, w * p**m if w % p**m else w)
                lhs = F.apply_V(r, cap)
                rhs = (
                    FSeriesQ(p, fp, c, m + r, F.w * p**r)
                    .series(cap)
                    .compose_power(p**r)
                    .truncate(cap)
                )
                assert lhs == rhs

    def test_rejects_trivial_multiplier(self):
        with pytest.raises(ValueError):
            FSeriesQ(3, 5, 1, 0, 5)  # rho(w) = 1
