"""Interpolating series, their logarithmic quotients, and trace pairings."""

import math
from fractions import Fraction

import pytest

from twistedzeta.coleman import (
    GSeries,
    PairingArg,
    PSeries,
    a_h_path,
    conj44_check,
    g_series,
    group_pair,
    gseries_integral,
    gseries_reconstructs_log,
    gseries_values_principal,
    gseries_vanishes_at_zero,
    hilbert_pair,
    interpolating_poly,
    pairing_determinant,
)
from twistedzeta.padic import LocalField, _red_frac, galois
from twistedzeta.regulator import SemilocalUnit, cyclotomic_context, s_value

F30 = LocalField.cyclotomic(3, 0)


def _rat_series(coeffs, cap):
    return PSeries(None, [Fraction(c) for c in coeffs], cap)


class TestPSeries:
    def test_log_of_product(self):
        a = _rat_series([1, 3, 6, 9, 0, 0], 6)
        b = _rat_series([1, 6, 3, 0, 0, 0], 6)
        assert (a * b).log() == a.log() + b.log()

    def test_inverse(self):
        a = _rat_series([1, 2, -1, 5], 4)
        assert a * a.inverse() == PSeries.one(None, 4)

    def test_compose_one_plus_pow(self):
        # X |-> (1+X)^3 - 1 applied to X itself
        x = _rat_series([0, 1, 0, 0, 0], 5)
        assert x.compose_one_plus_pow(3) == _rat_series([0, 3, 3, 1, 0], 5)


class TestInterpolation:
    def test_digit_oracle(self):
        h = interpolating_poly(F30, F30.rational(4), 6)
        assert [int(c) for c in h.coeffs[:4]] == [1, 0, 2, 1]

    def test_evaluates_back(self):
        for u in (4, 7, 13):
            h = interpolating_poly(F30, F30.rational(u), 12)
            got = h.evaluate(F30.pi())
            assert (got - F30.rational(u)).with_prec(6).is_zero()

    def test_balanced_style_differs_but_interpolates(self):
        h = interpolating_poly(F30, F30.rational(7), 12, style="balanced")
        got = h.evaluate(F30.pi())
        assert (got - F30.rational(7)).with_prec(6).is_zero()

    def test_rejects_non_principal(self):
        with pytest.raises(ValueError):
            interpolating_poly(F30, F30.rational(2), 6)


class TestGSeries:
    INSTANCES = [(3, 0, 4), (3, 0, 22), (3, 1, 4), (5, 0, 6), (5, 0, 11)]

    def test_four_properties(self):
        for (p, n, u) in self.INSTANCES:
            F = LocalField.cyclotomic(p, n)
            gs = g_series(F, u, M=18)
            assert gseries_vanishes_at_zero(gs)
            assert gseries_integral(gs)
            assert gseries_values_principal(gs)
            diff, prec = gseries_reconstructs_log(gs, M=18)
            assert prec >= 3 and diff.with_prec(min(prec, 7)).is_zero()

    def test_linear_coefficient_vanishes(self):
        gs = g_series(F30, 4, M=18)
        c1 = gs.series.coeffs[1]
        assert c1 == 0 or (hasattr(c1, "is_zero") and c1.is_zero())

    def test_trivial_unit_gives_zero_series(self):
        gs = g_series(F30, 1, M=18)
        assert all(
            (c.is_zero() if hasattr(c, "is_zero") else c == 0)
            for c in gs.series.coeffs
        )


class TestSeriesPath:
    def test_hand_oracle(self):
        a, prec = a_h_path(3, 0, 1, 4, M=18)
        assert prec >= 5
        assert _red_frac(a, 3, 5) == 65
        assert _red_frac(a, 3, 2) == 2

    def test_style_invariance(self):
        a1, p1 = a_h_path(3, 0, 2, 7, M=18)
        a2, p2 = a_h_path(3, 0, 2, 7, style="balanced", M=18)
        m = 3 ** int(min(p1, p2))
        assert _red_frac(a1 - a2, 3, int(min(p1, p2))) == 0

    def test_trivial_unit(self):
        a, _ = a_h_path(3, 0, 1, 1, M=18)
        assert a == 0

    def test_matches_regulator_path(self):
        for (p, n, u, agree) in [(3, 0, 4, 5), (3, 1, 4, 3)]:
            ctx = cyclotomic_context(p, n, M=18)
            s = s_value(ctx, [SemilocalUnit.diagonal_rational(ctx, Fraction(u))])
            labels = {g: ba[1] for g, ba in ctx.wirings[0].action.items()}
            for g, c in labels.items():
                a, prec = a_h_path(p, n, c, u, M=18)
                want = s.coeffs[g].rational_value()
                m = int(min(agree, prec))
                assert _red_frac(a - want, p, m) == 0


class TestHilbertPairing:
    def test_oracles(self):
        assert hilbert_pair(3, 0, PairingArg.eta(), 4) % 3 == 2
        assert hilbert_pair(3, 0, PairingArg.eta(), 1) == 0
        assert hilbert_pair(3, 0, PairingArg(1), 1) == 0

    def test_bilinear_in_second_argument(self):
        a = PairingArg.eta()
        for (u, v) in [(4, 7), (4, 13), (7, 16)]:
            lhs = hilbert_pair(3, 1, a, u * v)
            rhs = (hilbert_pair(3, 1, a, u) + hilbert_pair(3, 1, a, v)) % 9
            assert lhs == rhs

    def test_galois_equivariance(self):
        # [sigma_2 a, sigma_2 v] = 2 [a, v] for the cyclic label action
        F = LocalField.cyclotomic(3, 1)
        v = F.rational(4)
        a = PairingArg.eta()
        a2 = PairingArg(0, ((2, 1),))
        lhs = hilbert_pair(3, 1, a2, galois(v, 0, 2))
        rhs = (2 * hilbert_pair(3, 1, a, v)) % 9
        assert lhs == rhs

    def test_rejects_unsupported(self):
        with pytest.raises(ValueError):
            hilbert_pair(3, 0, "not-a-supported-generator", 4)
        with pytest.raises(ValueError):
            hilbert_pair(3, 0, PairingArg(0, ((3, 1),)), 4)  # label not prime to p

    def test_group_pair_indexing(self):
        out = group_pair(3, 0, PairingArg.eta(), 4)
        assert sorted(out) == [1, 2]


class TestCongruence:
    def test_cyclotomic_instances(self):
        for (p, n) in [(3, 0), (3, 1), (5, 0)]:
            rep = conj44_check(p, n, [Fraction(1 + p), Fraction(1 + 2 * p)], M=18)
            assert not rep.skipped and rep.passed, rep.to_json()

    def test_hand_unit(self):
        rep = conj44_check(3, 0, [Fraction(4)], M=18)
        assert rep.passed
        for row in rep.details:
            assert row["lhs"] % 9 == 2 and row["rhs"] % 9 == 2
