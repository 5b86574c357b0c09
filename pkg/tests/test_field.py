"""Base fields, fractional ideals, cycles, and ray class groups."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from twistedzeta.field import (
    BaseField,
    Cycle,
    FracIdeal,
    QuadElem,
    UnsupportedFieldError,
    WClass,
    factor_ideal,
    ideal_divisors,
    primes_above,
    prime_residue_degree,
    principal_generator,
    w_class_orbit,
)


def small_fracs():
    return st.builds(
        Fraction,
        st.integers(min_value=-12, max_value=12),
        st.integers(min_value=1, max_value=6),
    )


@st.composite
def quad_elems(draw, D=2):
    return QuadElem(D, draw(small_fracs()), draw(small_fracs()))


class TestBaseField:
    def test_parse(self):
        assert BaseField.parse("Q").kind == "Q"
        k = BaseField.parse("Q(sqrt2)")
        assert k.kind == "quad" and k.D == 2

    def test_narrow_class_number_guard(self):
        assert BaseField.real_quadratic(2).is_narrow_h1()
        assert BaseField.real_quadratic(5).is_narrow_h1()
        # norm(fundamental unit of Q(sqrt3)) = +1: narrow class number 2
        assert not BaseField.real_quadratic(3).is_narrow_h1()
        with pytest.raises(UnsupportedFieldError):
            BaseField.real_quadratic(3).check_supported()

    def test_fundamental_unit(self):
        k = BaseField.real_quadratic(2)
        eps = k.fundamental_unit()
        assert eps == QuadElem(2, 1, 1)
        assert abs(eps.norm()) == 1

    def test_sqrt_disc_square(self):
        k = BaseField.real_quadratic(2)
        s = k.sqrt_disc()
        assert s * s == QuadElem(2, 8)  # disc(Q(sqrt2)) = 8
        k5 = BaseField.real_quadratic(5)
        assert k5.sqrt_disc() * k5.sqrt_disc() == QuadElem(5, 5)


class TestQuadElem:
    @given(quad_elems(), quad_elems(), quad_elems())
    @settings(max_examples=60, deadline=None)
    def test_ring_laws(self, a, b, c):
        assert a + b == b + a
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)

    @given(quad_elems(), quad_elems())
    @settings(max_examples=60, deadline=None)
    def test_norm_multiplicative(self, a, b):
        assert (a * b).norm() == a.norm() * b.norm()
        assert (a + b).trace() == a.trace() + b.trace()

    @given(quad_elems())
    @settings(max_examples=40, deadline=None)
    def test_conj_and_inverse(self, a):
        assert a.conj().conj() == a
        if not a.is_zero():
            assert a * a.inverse() == QuadElem(2, 1)

    def test_signs(self):
        x = QuadElem(2, 1, -1)  # 1 - sqrt2 < 0 < 1 + sqrt2
        assert x.emb_sign(0) == -1 and x.emb_sign(1) == 1
        assert not x.is_totally_positive()
        assert (x * x).is_totally_positive()


class TestIdeals:
    def setup_method(self):
        self.k = BaseField.real_quadratic(2)

    def test_norm_multiplicative(self):
        A = FracIdeal.principal(self.k, self.k.elem(3, 1))
        B = FracIdeal.principal(self.k, self.k.elem(1, 2))
        assert (A * B).norm() == A.norm() * B.norm()

    def test_splitting_behaviour(self):
        # 7 = (3+sqrt2)(3-sqrt2) splits; 3 is inert; 2 = (sqrt2)^2 ramifies
        assert len(primes_above(self.k, 7)) == 2
        assert len(primes_above(self.k, 3)) == 1
        assert prime_residue_degree(primes_above(self.k, 3)[0]) == 2
        P2 = primes_above(self.k, 2)
        assert len(P2) == 1 and P2[0].norm() == 2

    def test_factor_ideal_reconstructs(self):
        I = FracIdeal.principal(self.k, self.k.elem(14))
        out = FracIdeal.ring(self.k)
        for P, e in factor_ideal(I):
            for _ in range(e):
                out = out * P
        assert out == I

    def test_ideal_divisors_count(self):
        I = FracIdeal.principal(self.k, self.k.elem(0, 1))  # (sqrt2), norm 2
        J = FracIdeal.principal(self.k, self.k.elem(3, 1))  # norm 7
        assert len(ideal_divisors(I * J)) == 4

    def test_principal_generator_recovers(self):
        x = self.k.elem(3, 1)
        I = FracIdeal.principal(self.k, x)
        g = principal_generator(I, totally_positive=True)
        assert FracIdeal.principal(self.k, g) == I
        assert g.is_totally_positive()

    def test_divides_contains(self):
        P = primes_above(self.k, 7)[0]
        I = P * P
        assert P.divides(I)
        assert not I.divides(P)
        assert I.is_coprime(FracIdeal.principal(self.k, self.k.elem(3)))


class TestCycles:
    def test_parse_rational(self):
        Q = BaseField.rationals()
        c = Cycle.parse(Q, "12*inf")
        assert int(c.f.norm()) == 12 and c.inf == frozenset({0})

    def test_parse_quadratic(self):
        k = BaseField.real_quadratic(2)
        c = Cycle.parse(k, "(sqrt2)*(3+sqrt2)*inf1*inf2")
        assert int(c.f.norm()) == 14 and c.inf == frozenset({0, 1})

    def test_divisor_cycles(self):
        Q = BaseField.rationals()
        c = Cycle.parse(Q, "12*inf")
        assert len(c.divisor_cycles()) == 6  # 1,2,3,4,6,12


class TestRayClassGroups:
    def test_rational_ray_group_is_unit_group(self):
        from twistedzeta.zeta import get_ray

        Q = BaseField.rationals()
        for f in (3, 4, 5, 7, 9, 12):
            ray = get_ray(Cycle.parse(Q, f"{f}*inf"))
            phi = sum(1 for a in range(1, f) if math.gcd(a, f) == 1)
            assert ray.group.order == phi

    def test_class_of_residue_multiplicative(self):
        from twistedzeta.zeta import get_ray

        Q = BaseField.rationals()
        ray = get_ray(Cycle.parse(Q, "7*inf"))
        g2 = ray.class_of_residue(Fraction(2))
        g3 = ray.class_of_residue(Fraction(3))
        assert ray.group.op(g2, g3) == ray.class_of_residue(Fraction(6))

    def test_quadratic_instance_group(self):
        from twistedzeta.zeta import get_ray

        k = BaseField.real_quadratic(2)
        ray = get_ray(Cycle.parse(k, "(sqrt2)*(3+sqrt2)*inf1*inf2"))
        assert ray.group.orders == (2,)

    def test_w_orbit_free_transitive(self):
        from twistedzeta.zeta import get_ray

        Q = BaseField.rationals()
        ray = get_ray(Cycle.parse(Q, "5*inf"))
        orbit = w_class_orbit(ray)
        assert len(orbit) == ray.group.order
        # distinct classes for distinct group elements
        assert len({id(w) for w in orbit.values()}) == len(orbit)

    def test_base_class_annihilator(self):
        Q = BaseField.rationals()
        cyc = Cycle.parse(Q, "5*inf")
        w0 = WClass.base_class(cyc)
        assert w0.xi.annihilator() == cyc.f
