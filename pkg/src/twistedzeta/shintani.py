"""Cone decompositions and zero-values of (twisted) lattice zeta functions,
plus truncated binomial/power series and the V_r exponent-filter projector.

The zero value of a cone zeta sum over x0 + N v1 + N v2 (twists T_i of
finite order, x0 = y1 v1 + y2 v2) is computed from the constant terms of
the products of the one-variable generating functions

    phi(z; y, T) = sum_m T^m e^{-(y+m)z} = e^{-yz} / (1 - T e^{-z}),

averaged over the two real embeddings.  For T = 1 this reproduces the
classical Bernoulli-polynomial formula; its correctness gate is the
vanishing of zeta_k(0) and the group-ring identities checked in tests.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .exact import CycNum, _solve_exact
from .field import (BaseField, FracIdeal, RayClassData, WClass,
                    elem_conj, elem_trace, positive_reps, smallest_positive_rep)


# ---------------------------------------------------------------------------
# cone geometry


def _field_trace_of_ratio(x, y):
    """Tr_{k/Q}(x/y) as a Fraction (x, y quadratic elements)."""
    return elem_trace(x / y)


def _ceil_frac(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def _floor_frac(q: Fraction) -> int:
    return q.numerator // q.denominator


def _a2_range(coef: Fraction, const: Fraction, lo, hi, lo_open: bool):
    """Integer solutions n of  lo (<|<=) coef*n + const <= hi  as a closed
    integer interval (lo_int, hi_int) or None; coef may be 0."""
    if coef == 0:
        ok = (lo < const if lo_open else lo <= const) and const <= hi
        return (None, None) if ok else None  # unbounded (caller intersects)
    a = (lo - const) / coef
    b = (hi - const) / coef
    if coef < 0:
        a, b = b, a
        lower_is_open = False
        upper_is_open = lo_open
    else:
        lower_is_open = lo_open
        upper_is_open = False
    lo_int = (_floor_frac(a) + 1) if lower_is_open else _ceil_frac(a)
    hi_int = (_ceil_frac(b) - 1) if upper_is_open else _floor_frac(b)
    if lo_int > hi_int:
        return None
    return (lo_int, hi_int)


def box_points(field: BaseField, L: FracIdeal, shift, v1, v2):
    """Points x of shift + L with x = y1 v1 + y2 v2, y1 in (0,1], y2 in [0,1].

    Returns a list of (x, y1, y2); the y2 = 0 points lie on the boundary
    ray through v1 and get the one-dimensional treatment.  Enumeration is
    exact: per lattice column the valid range is solved as an interval.
    """
    l1, l2 = L.basis()
    cols = [list(field.coords(l1)), list(field.coords(l2))]
    # y-coordinates as affine functions of the lattice coefficients (a, b)
    p0 = _solve_exact(
        [list(field.coords(v1)), list(field.coords(v2))],
        list(field.coords(shift)))
    p1 = _solve_exact(
        [list(field.coords(v1)), list(field.coords(v2))],
        list(field.coords(l1)))
    p2 = _solve_exact(
        [list(field.coords(v1)), list(field.coords(v2))],
        list(field.coords(l2)))
    # a-range from the parallelogram corners in the lattice basis
    corners = []
    for y1c, y2c in ((0, 0), (1, 0), (0, 1), (1, 1)):
        x = y1c * v1 + y2c * v2
        corners.append(_solve_exact(cols, list(field.coords(x - shift))))
    a_lo = math.floor(min(c[0] for c in corners))
    a_hi = math.ceil(max(c[0] for c in corners))
    out = []
    for a in range(a_lo - 1, a_hi + 2):
        c1 = p0[0] + a * p1[0]
        c2 = p0[1] + a * p1[1]
        r1 = _a2_range(p2[0], c1, Fraction(0), Fraction(1), lo_open=True)
        r2 = _a2_range(p2[1], c2, Fraction(0), Fraction(1), lo_open=False)
        if r1 is None or r2 is None:
            continue
        lo = max(x for x in (r1[0], r2[0]) if x is not None) \
            if (r1[0] is not None or r2[0] is not None) else None
        hi = min(x for x in (r1[1], r2[1]) if x is not None) \
            if (r1[1] is not None or r2[1] is not None) else None
        if lo is None or hi is None:
            raise RuntimeError("unbounded parallelogram slice")
        for b in range(lo, hi + 1):
            y1 = c1 + b * p2[0]
            y2 = c2 + b * p2[1]
            out.append((shift + a * l1 + b * l2, y1, y2))
    return out


def _B1(y: Fraction) -> Fraction:
    return y - Fraction(1, 2)


def _B2(y: Fraction) -> Fraction:
    return y * y - y + Fraction(1, 6)


def _phi0(T: CycNum) -> CycNum:
    """phi(0; y, T) = 1/(1-T) for T != 1."""
    return (CycNum.one() - T).inverse()


def _phi1(y: Fraction, T: CycNum) -> CycNum:
    """phi'(0; y, T) = -y/(1-T) - T/(1-T)^2 for T != 1."""
    inv = (CycNum.one() - T).inverse()
    return inv * CycNum.rational(-y) - T * inv * inv


def cone2_zero(y1: Fraction, y2: Fraction, T1: CycNum, T2: CycNum,
               r1: Fraction, r2: Fraction) -> CycNum:
    """Zero value of the 2-dim cone sum for a single box point.

    r1 = Tr(v1/v2), r2 = Tr(v2/v1); T_i = twist values on the generators
    (roots of unity; CycNum.one() for untwisted)."""
    one = CycNum.one()
    t1_trivial = T1 == one
    t2_trivial = T2 == one
    if t1_trivial and t2_trivial:
        val = _B1(1 - y1) * _B1(1 - y2) + \
            Fraction(1, 4) * (_B2(y1) * r1 + _B2(y2) * r2)
        return CycNum.rational(val)
    if not t1_trivial and t2_trivial:
        return _phi1(y1, T1) * CycNum.rational(Fraction(r1, 2)) + \
            _phi0(T1) * CycNum.rational(_B1(1 - y2))
    if t1_trivial and not t2_trivial:
        return _phi1(y2, T2) * CycNum.rational(Fraction(r2, 2)) + \
            _phi0(T2) * CycNum.rational(_B1(1 - y1))
    return _phi0(T1) * _phi0(T2)


def cone1_zero(y: Fraction, T: CycNum) -> CycNum:
    """Zero value of the 1-dim cone sum x0 + N v (x0 = y v)."""
    if T == CycNum.one():
        return CycNum.rational(_B1(1 - y))
    return _phi0(T)


def shintani_sum_zero(field: BaseField, L: FracIdeal, shift, eps,
                      char=None) -> CycNum:
    """Zero value of sum over x in (shift + L), totally positive mod <eps>,
    of char(x) N(x)^{-s} -- char an IdealCharacter on a lattice containing
    all the points (or None for the untwisted partial zeta).

    Uses the fundamental domain [ray through b) union (open sector b..b eps)
    for b the smallest totally positive element of L.
    """
    b = smallest_positive_rep(field, field.elem(0), L)
    v1 = b
    v2 = b * eps
    r1 = _field_trace_of_ratio(v1, v2)
    r2 = _field_trace_of_ratio(v2, v1)
    one = CycNum.one()
    T1 = char.value(v1) if char is not None else one
    T2 = char.value(v2) if char is not None else one
    total = CycNum.zero()
    for x, y1, y2 in box_points(field, L, shift, v1, v2):
        cval = char.value(x) if char is not None else one
        if y2 == 0:
            total = total + cval * cone1_zero(y1, T1)
        else:
            total = total + cval * cone2_zero(y1, y2, T1, T2, r1, r2)
    return total


# ---------------------------------------------------------------------------
# twisted zeta values Z(0; w) and partial zetas


def twisted_zeta_zero(ray: RayClassData, w: WClass) -> CycNum:
    """Z(0; w) = zero value of sum over x in I, z-positive mod E_m, of
    xi(x) N(x)^{-s}."""
    field = ray.field
    I = w.I
    if field.kind == "Q":
        q = I.data
        T = w.xi.value(q)
        if T == CycNum.one():
            return CycNum.rational(Fraction(-1, 2))
        return T * (CycNum.one() - T).inverse()
    return shintani_sum_zero(field, I, field.elem(0), ray.eps_m, char=w.xi)


def partial_zeta_zero(ray: RayClassData, c) -> Fraction:
    """zeta_m(0; c): zero value of the partial zeta of the ray class c."""
    field = ray.field
    f = ray.cycle.f
    if field.kind == "Q":
        fint = int(f.data)
        if fint == 1:
            # all ideals: the Riemann zeta value
            return Fraction(-1, 2)
        total = Fraction(0)
        for r in range(1, fint):
            if math.gcd(r, fint) != 1:
                continue
            if ray.class_of_residue(Fraction(r)) == c:
                total += Fraction(1, 2) - Fraction(r, fint)
        return total
    # quadratic: ideals A in class c are gamma * B, gamma in 1 + f B^-1
    # totally positive (z-positive) modulo E_m
    alpha = ray.rep_element[c]
    B = FracIdeal.principal(field, alpha)
    L = f * B.inverse()
    val = shintani_sum_zero(field, L, field.one, ray.eps_m, char=None)
    rat = val.as_rational()
    if rat is None:  # pragma: no cover
        raise RuntimeError("partial zeta value was not rational")
    return rat


# ---------------------------------------------------------------------------
# truncated series: binomial combinations and power series


class BinomComb:
    """Finite formal sum  sum_z  c_z (1+X)^z  with rational exponents z
    (p-integral where it matters) and CycNum coefficients."""

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for z, c in (terms.items() if isinstance(terms, dict) else terms):
                self._add_term(Fraction(z), c)

    def _add_term(self, z, c):
        if not isinstance(c, CycNum):
            c = CycNum.rational(c)
        cur = self.terms.get(z)
        new = c if cur is None else cur + c
        if new.is_zero():
            self.terms.pop(z, None)
        else:
            self.terms[z] = new

    @classmethod
    def monomial(cls, z, c=1) -> "BinomComb":
        out = cls()
        out._add_term(Fraction(z), c if isinstance(c, CycNum) else CycNum.rational(c))
        return out

    def __add__(self, other: "BinomComb") -> "BinomComb":
        out = BinomComb(dict(self.terms))
        for z, c in other.terms.items():
            out._add_term(z, c)
        return out

    def __sub__(self, other: "BinomComb") -> "BinomComb":
        return self + other.scale(CycNum.rational(-1))

    def scale(self, c) -> "BinomComb":
        if not isinstance(c, CycNum):
            c = CycNum.rational(c)
        out = BinomComb()
        for z, v in self.terms.items():
            out._add_term(z, v * c)
        return out

    def __mul__(self, other: "BinomComb") -> "BinomComb":
        out = BinomComb()
        for z1, c1 in self.terms.items():
            for z2, c2 in other.terms.items():
                out._add_term(z1 + z2, c1 * c2)
        return out

    def v_filter(self, p: int, r: int) -> "BinomComb":
        """V_r: keep exactly the terms whose exponent has v_p(z) >= r."""
        out = BinomComb()
        for z, c in self.terms.items():
            if z == 0 or _vp_frac(z, p) >= r:
                out._add_term(z, c)
        return out

    def expand(self, cap: int) -> "TruncSeries":
        """Expand into powers of X up to degree cap (binomial series)."""
        coeffs = [CycNum.zero() for _ in range(cap + 1)]
        for z, c in self.terms.items():
            binom = Fraction(1)
            for k in range(cap + 1):
                coeffs[k] = coeffs[k] + c * CycNum.rational(binom)
                binom = binom * (z - k) / (k + 1)
        return TruncSeries(coeffs, cap)

    def eval_at_root(self, p: int, r: int, j: int) -> CycNum:
        """Value at X = zeta_{p^r}^j - 1 (exponents must be p-integral)."""
        total = CycNum.zero()
        mod = p ** r
        for z, c in self.terms.items():
            if math.gcd(z.denominator, p) != 1:
                raise ValueError("exponent not p-integral")
            e = (z.numerator * pow(z.denominator, -1, mod)) % mod
            total = total + c * CycNum.zeta(mod) ** int(e * j % mod) \
                if mod > 1 else total + c
        return total

    def __eq__(self, other):
        return isinstance(other, BinomComb) and self.terms == other.terms

    def __repr__(self):
        return "BinomComb(" + " + ".join(
            f"{c!r}*(1+X)^{z}" for z, c in sorted(self.terms.items())) + ")"


def _vp_frac(z: Fraction, p: int) -> int:
    v = 0
    n, d = z.numerator, z.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


class TruncSeries:
    """One-variable power series truncated at X^cap, CycNum coefficients."""

    def __init__(self, coeffs, cap: int):
        coeffs = list(coeffs)[:cap + 1]
        coeffs += [CycNum.zero()] * (cap + 1 - len(coeffs))
        self.coeffs = [c if isinstance(c, CycNum) else CycNum.rational(c)
                       for c in coeffs]
        self.cap = cap

    @classmethod
    def one(cls, cap) -> "TruncSeries":
        return cls([CycNum.one()], cap)

    def truncate(self, cap: int) -> "TruncSeries":
        return TruncSeries(self.coeffs[:cap + 1], cap)

    def __add__(self, other):
        cap = min(self.cap, other.cap)
        return TruncSeries([a + b for a, b in
                            zip(self.coeffs, other.coeffs)], cap)

    def __sub__(self, other):
        cap = min(self.cap, other.cap)
        return TruncSeries([a - b for a, b in
                            zip(self.coeffs, other.coeffs)], cap)

    def __mul__(self, other):
        cap = min(self.cap, other.cap)
        out = [CycNum.zero() for _ in range(cap + 1)]
        for i, a in enumerate(self.coeffs[:cap + 1]):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs[:cap + 1 - i]):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return TruncSeries(out, cap)

    def __truediv__(self, other: "TruncSeries") -> "TruncSeries":
        cap = min(self.cap, other.cap)
        inv0 = other.coeffs[0].inverse()
        out = []
        for n in range(cap + 1):
            acc = self.coeffs[n]
            for j in range(1, n + 1):
                acc = acc - other.coeffs[j] * out[n - j]
            out.append(acc * inv0)
        return TruncSeries(out, cap)

    def compose_power(self, e: int) -> "TruncSeries":
        """Substitute X -> (1+X)^e - 1 (integer e >= 1)."""
        sub = BinomComb.monomial(e) - BinomComb.monomial(0)
        subs = sub.expand(self.cap)
        out = TruncSeries([], self.cap)
        power = TruncSeries.one(self.cap)
        for c in self.coeffs:
            out = out + power.scale(c)
            power = power * subs
        return out

    def scale(self, c) -> "TruncSeries":
        if not isinstance(c, CycNum):
            c = CycNum.rational(c)
        return TruncSeries([a * c for a in self.coeffs], self.cap)

    def value_at_zero(self) -> CycNum:
        return self.coeffs[0]

    def __eq__(self, other):
        cap = min(self.cap, other.cap)
        return all((a - b).is_zero() for a, b in
                   zip(self.coeffs[:cap + 1], other.coeffs[:cap + 1]))

    def to_json(self):
        return {"cap": self.cap,
                "coeffs": [c.to_json() for c in self.coeffs]}

    def __repr__(self):
        return f"TruncSeries(cap={self.cap}, coeffs={self.coeffs[:4]}...)"


# ---------------------------------------------------------------------------
# the series F = G/H for rational twisted zetas (base field Q)


class FSeriesQ:
    """The pair (G, H) with F = G/H for a rank-1 twisted zeta over Q.

    rho(a) = zeta_{f'}^{c a} on Z; level m >= 0; cone multiplier w a
    positive integer in p^m Z with rho(w) != 1.  The level-m sum runs over
    the scaled lattice p^m Z:

        G = sum_{a in p^m Z, 0 < a <= w} rho(a) (1+X)^{a/p^m},
        H = 1 - rho(w) (1+X)^{w/p^m},

    and F(0) reproduces the twisted zero value rho(w0)/(1 - rho(w0)).
    """

    def __init__(self, p: int, fprime: int, c: int, m: int, w: int):
        if w <= 0 or w % (p ** m) != 0:
            raise ValueError("w must be a positive multiple of p^m")
        beta = CycNum.zeta(fprime) ** (c * w % fprime)
        if beta == CycNum.one():
            raise ValueError("rho(w) = 1: hypothesis H(rho, v) violated")
        self.p, self.fprime, self.c, self.m, self.w = p, fprime, c, m, w
        pm = p ** m
        self.G = BinomComb(
            {Fraction(a, pm): CycNum.zeta(fprime) ** (c * a % fprime)
             for a in range(pm, w + 1, pm)})
        self.hfactors = [(beta, Fraction(w, pm))]
        self.H = BinomComb({0: CycNum.one()}) - BinomComb.monomial(
            self.hfactors[0][1], self.hfactors[0][0])

    def series(self, cap: int) -> TruncSeries:
        return self.G.expand(cap) / self.H.expand(cap)

    def value_at_zero(self) -> CycNum:
        return (self.G.expand(0) / self.H.expand(0)).value_at_zero()

    def apply_V(self, r: int, cap: int) -> TruncSeries:
        """V_r F as a truncated series: the denominator is made V_r-stable
        by multiplying through, then the numerator is exponent-filtered."""
        p = self.p
        num = self.G
        den_terms = []
        for beta, z in self.hfactors:
            mult = BinomComb({t * z: beta ** t for t in range(p ** r)})
            num = num * mult
            den_terms.append((beta ** (p ** r), z * p ** r))
        num = num.v_filter(p, r)
        den = BinomComb({0: CycNum.one()})
        for beta, z in den_terms:
            den = den * (BinomComb({0: CycNum.one()}) - BinomComb.monomial(z, beta))
        return num.expand(cap) / den.expand(cap)

    def eval_quotient_at_root(self, r: int, j: int) -> CycNum:
        """F(zeta_{p^r}^j - 1) exactly in Q(mu)."""
        g = self.G.eval_at_root(self.p, r, j)
        h = self.H.eval_at_root(self.p, r, j)
        return g * h.inverse()

    def v_value_at_zero(self, r: int) -> CycNum:
        """(V_r F)(0) by exact root-of-unity averaging:
        p^{-r} sum_{zeta in mu_{p^r}} F(zeta - 1)."""
        p = self.p
        total = CycNum.zero()
        for j in range(p ** r):
            total = total + self.eval_quotient_at_root(r, j)
        return total * CycNum.rational(Fraction(1, p ** r))
