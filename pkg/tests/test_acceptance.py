"""Acceptance suite: one pass/fail line per criterion, with pinned
tolerances and runtime budgets."""

import math
import random
import time
from fractions import Fraction

from twistedzeta.coleman import a_h_path, conj44_check
from twistedzeta.exact import CycNum
from twistedzeta.field import BaseField, Cycle, WClass
from twistedzeta.padic import _red_frac
from twistedzeta.regulator import (
    SemilocalUnit,
    abelian_field_context,
    build_theta,
    cyclotomic_context,
    integrality_check,
    quadratic_context,
    s_value,
)
from twistedzeta.shintani import BinomComb, FSeriesQ, twisted_zeta_zero
from twistedzeta.zeta import (
    Extension,
    all_characters,
    build_A_n,
    gauss_sum,
    get_ray,
    phi_field,
    prop21_check,
    verify_thm22,
)

Q = BaseField.rationals()


class Budget:
    def __init__(self, name, seconds):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        ok = exc_type is None and elapsed < self.seconds
        print(f"{'PASS' if ok else 'FAIL'} {self.name} ({elapsed:.2f}s)")
        if exc_type is None:
            assert elapsed < self.seconds, f"{self.name}: over budget ({elapsed:.1f}s)"
        return False


def test_01_twisted_values_closed_form():
    with Budget("criterion 1: twisted values at zero, closed form, exact", 5):
        for f in (3, 4, 5, 7, 9, 12):
            cyc = Cycle.parse(Q, f"{f}*inf")
            ray = get_ray(cyc)
            w0 = WClass.base_class(cyc)
            xi = CycNum.zeta(f)
            for a in range(1, f):
                if math.gcd(a, f) != 1:
                    continue
                z = twisted_zeta_zero(ray, w0.act_by_element(Fraction(a)))
                assert z == xi**a / (CycNum.one() - xi**a)


def test_02_group_ring_identity():
    with Budget("criterion 2: group-ring identity, rational and quadratic", 60):
        for f in range(3, 13):
            ok, lhs, rhs = verify_thm22(get_ray(Cycle.parse(Q, f"{f}*inf")))
            assert ok, f"f={f}"
        k = BaseField.real_quadratic(2)
        ok, lhs, rhs = verify_thm22(
            get_ray(Cycle.parse(k, "(sqrt2)*(3+sqrt2)*inf1*inf2"))
        )
        assert ok


def test_03_vanishing_pattern():
    with Budget("criterion 3: character vanishing pattern and field value", 5):
        for f in (3, 4, 5, 12):
            ok, _ = prop21_check(Extension(get_ray(Cycle.parse(Q, f"{f}*inf"))))
            assert ok
        k = BaseField.real_quadratic(2)
        ok, _ = prop21_check(
            Extension(get_ray(Cycle.parse(k, "(sqrt2)*(3+sqrt2)*inf1*inf2")))
        )
        assert ok
        ext = Extension(get_ray(Cycle.parse(Q, "4*inf")))
        chi0 = next(all_characters(ext.galois))
        assert phi_field(ext).char_apply(chi0) == CycNum.rational(Fraction(-1, 4))


def test_04_cyclotomic_integrality():
    with Budget("criterion 4: s-values integral, four cyclotomic instances", 60):
        for (p, n) in ((3, 0), (3, 1), (5, 0), (7, 0)):
            ctx = cyclotomic_context(p, n, M=18)
            thetas = [build_theta(ctx, seed=s) for s in range(5)]
            rep = integrality_check(ctx, thetas)
            assert rep.min_valuation >= 0, (p, n, rep.min_valuation)
            assert rep.prec is None or rep.prec >= 10, (p, n, rep.prec)


def test_05_congruence():
    with Budget("criterion 5: trace congruence mod p^(n+1), incl. hand unit", 30):
        for (p, n) in ((3, 0), (3, 1), (5, 0), (7, 0)):
            rep = conj44_check(p, n, [Fraction(1 + p), Fraction(1 + 2 * p)], M=18)
            assert not rep.skipped and rep.passed, (p, n, rep.to_json())
        rep = conj44_check(3, 0, [Fraction(4)], M=18)
        assert rep.passed
        for row in rep.details:
            assert row["lhs"] % 9 == 2 and row["rhs"] % 9 == 2


def test_06_quadratic_instance():
    with Budget("criterion 6: quadratic desk instance, integral s-value", 120):
        ctx = quadratic_context(7, M=16)
        theta = build_theta(ctx, seed=0)
        rep = integrality_check(ctx, [theta])
        assert rep.min_valuation >= 0
        assert rep.prec is None or rep.prec >= 10


def test_07_two_path_agreement():
    with Budget("criterion 7: series path equals regulator path mod 3^3", 60):
        for n in (0, 1):
            ctx = cyclotomic_context(3, n, M=18)
            u = Fraction(4)
            s = s_value(ctx, [SemilocalUnit.diagonal_rational(ctx, u)])
            labels = {g: ba[1] for g, ba in ctx.wirings[0].action.items()}
            for g, c in labels.items():
                a, prec = a_h_path(3, n, c, u, M=18)
                want = s.coeffs[g].rational_value()
                m = int(min(3, prec))
                assert _red_frac(a - want, 3, m) == 0, (n, c)


def test_08_exponent_filters():
    with Budget("criterion 8: exponent filters and level-shift relation", 30):
        rng = random.Random(8)
        dens = [1, 2, 4, 7, 8]
        for _ in range(100):
            b = BinomComb()
            for _ in range(rng.randrange(1, 6)):
                z = Fraction(rng.randrange(-30, 31), rng.choice(dens))
                b = b + BinomComb.monomial(z, rng.randrange(-5, 6))
            for (p, r) in ((3, 1), (5, 2)):
                f = b.v_filter(p, r)
                assert f.v_filter(p, r) == f
                kept = {z for z in f.terms if f.terms[z] != 0}
                for z in kept:
                    assert z.numerator % p**r == 0 and z.denominator % p != 0
        for (p, r) in ((3, 1), (5, 1)):
            cap = 32 // p
            for (fp, c, m, w) in ((7, 1, 0, 1), (7, 3, 1, p), (4, 1, 0, 1)):
                F = FSeriesQ(p, fp, c, m, w * p**m if w % p**m else w)
                lhs = F.apply_V(r, cap)
                rhs = (
                    FSeriesQ(p, fp, c, m + r, F.w * p**r)
                    .series(cap)
                    .compose_power(p**r)
                    .truncate(cap)
                )
                assert lhs == rhs, (p, r, fp, c, m)


def test_09_unramified_bound():
    with Budget("criterion 9: valuation bound at the unramified prime", 30):
        ctx = abelian_field_context(5, 3, M=18)
        rep = integrality_check(ctx, [build_theta(ctx, seed=s) for s in range(3)])
        assert rep.delta == 1
        assert rep.min_valuation >= 1, rep.min_valuation


def test_10_gauss_sums():
    with Budget("criterion 10: Gauss sum absolute values and trivial cycle", 5):
        for f in (3, 4, 5, 7):
            ray = get_ray(Cycle.parse(Q, f"{f}*inf"))
            for chi in all_characters(ray.group):
                if all(e == 0 for e in chi.exps):
                    continue
                g = gauss_sum(ray, chi)
                assert g * g.conj() == CycNum.rational(f)
        ray = get_ray(Cycle.parse(Q, "inf"))
        A = build_A_n(ray)
        assert A.coeffs == {ray.group.identity: CycNum.one()}
