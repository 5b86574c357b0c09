"""Interpolating power series for local units, and Hilbert-pairing
congruences.

For a principal unit u-hat of a cyclotomic-over-unramified local tower
this module constructs an integral power series h with h(zeta - 1) =
u-hat by pi-adic digit interpolation, and from it the series

    g = (1/p) log( h(X)^p / phi-hat(h)((1+X)^p - 1) )

whose values at roots of unity reconstruct log_p(u-hat).  On top of g it
evaluates the averaged series path for the coefficients a_h of the
zeta-regulator product, the explicit trace-formula Hilbert pairings
[a, u]_{i,n} on the supported generator set, and the mod-p^(n+1)
congruence between kappa*(x).s-bar and the pairing determinant H_n at
k = Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .padic import (
    LocalField,
    PadicElem,
    PGroupRing,
    PrecisionError,
    UnsupportedLocalError,
    _red_frac,
    _vp,
    galois,
    lift_to,
    local_trace,
    plog,
    teichmuller,
    M_DEFAULT,
)
from .regulator import (
    RegulatorContext,
    SemilocalUnit,
    cyclotomic_context,
    integrality_check,
    s_value,
)


# -- truncated power series -------------------------------------------


class PSeries:
    """Truncated power series; coefficients are exact rationals (field
    None) or :class:`PadicElem` of an unramified coefficient field."""

    def __init__(self, field: LocalField | None, coeffs, cap: int):
        self.field = field
        self.cap = cap
        cs = list(coeffs)[:cap]
        cs += [self._zero()] * (cap - len(cs))
        self.coeffs = cs

    def _zero(self):
        return Fraction(0) if self.field is None else self.field.zero()

    def _coerce(self, c):
        if self.field is None:
            return Fraction(c)
        if isinstance(c, PadicElem):
            return c
        return self.field.rational(c)

    @classmethod
    def zero(cls, field, cap):
        return cls(field, [], cap)

    @classmethod
    def one(cls, field, cap):
        return cls(field, [Fraction(1) if field is None else field.one()], cap)

    def _is_zero_coeff(self, c) -> bool:
        return c == 0 if self.field is None else c.is_zero()

    def __eq__(self, other):
        if not isinstance(other, PSeries):
            return NotImplemented
        cap = min(self.cap, other.cap)
        return self.field == other.field and all(
            a == b for a, b in zip(self.coeffs[:cap], other.coeffs[:cap])
        )

    def __add__(self, other):
        return PSeries(
            self.field,
            [a + b for a, b in zip(self.coeffs, other.coeffs)],
            min(self.cap, other.cap),
        )

    def __neg__(self):
        return PSeries(self.field, [-a for a in self.coeffs], self.cap)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self._coerce(c)
        return PSeries(self.field, [a * c for a in self.coeffs], self.cap)

    def __mul__(self, other):
        cap = min(self.cap, other.cap)
        out = [self._zero()] * cap
        for i, a in enumerate(self.coeffs[:cap]):
            if self._is_zero_coeff(a):
                continue
            for j, b in enumerate(other.coeffs[: cap - i]):
                if self._is_zero_coeff(b):
                    continue
                out[i + j] = out[i + j] + a * b
        return PSeries(self.field, out, cap)

    def derivative(self):
        return PSeries(
            self.field,
            [c * k for k, c in enumerate(self.coeffs) if k >= 1],
            self.cap,
        )

    def integrate(self):
        out = [self._zero()]
        for k, c in enumerate(self.coeffs[: self.cap - 1], start=1):
            out.append(c * Fraction(1, k))
        return PSeries(self.field, out, self.cap)

    def inverse(self):
        a0 = self.coeffs[0]
        if self._is_zero_coeff(a0):
            raise ZeroDivisionError("inverse of a non-unit series")
        inv0 = Fraction(1) / a0 if self.field is None else a0.inverse()
        out = [inv0]
        for k in range(1, self.cap):
            acc = self._zero()
            for j in range(1, k + 1):
                acc = acc + self.coeffs[j] * out[k - j]
            out.append(-inv0 * acc)
        return PSeries(self.field, out, self.cap)

    def log(self):
        """log of a series with constant term 1, via integrating f'/f."""
        one = Fraction(1) if self.field is None else self.field.one()
        if not self._is_zero_coeff(self.coeffs[0] - one):
            raise ValueError("series log requires constant term 1")
        return (self.derivative() * self.inverse()).integrate()

    def frobenius_coeffs(self):
        if self.field is None:
            return self
        return PSeries(self.field, [galois(c, 1, 1) for c in self.coeffs], self.cap)

    def compose_one_plus_pow(self, p: int):
        """Substitute X -> (1+X)^p - 1."""
        q = [self._zero()] * self.cap
        for j in range(1, min(p, self.cap - 1) + 1):
            q[j] = self._coerce(math.comb(p, j))
        qs = PSeries(self.field, q, self.cap)
        acc = PSeries.one(self.field, self.cap)
        total = PSeries.zero(self.field, self.cap)
        for c in self.coeffs:
            if not self._is_zero_coeff(c):
                total = total + acc.scale(c)
            acc = acc * qs
        return total

    def evaluate(self, x: PadicElem) -> PadicElem:
        """Horner evaluation at a point of positive valuation; the
        returned precision accounts for the truncated tail."""
        F = x.field
        vx = x.valuation()
        if vx <= 0:
            raise ValueError("series evaluation requires positive valuation")
        total = F.zero()
        for c in reversed(self.coeffs):
            cc = F.rational(c) if self.field is None else lift_to(F, c)
            total = total * x + cc
        tail = Fraction(self.cap) * vx
        if total.prec is None or total.prec > tail:
            total = total.with_prec(tail)
        return total


# -- digit interpolation ----------------------------------------------


def _residue_digit(F: LocalField, y: PadicElem, style: str):
    """The digit of a unit y: its residue-field class, lifted either as
    a least/balanced integer (f = 1) or a Teichmuller element (f > 1)."""
    p = F.p
    row = y._reduced().blocks[0]
    if F.f == 1:
        d = int(row[0].numerator * pow(row[0].denominator, -1, p)) % p
        if style == "balanced" and d > p // 2:
            d -= p
        return Fraction(d), None
    Hc = LocalField(p, f=F.f, gen_order=F.gen_order)
    res = [Fraction(int(c.numerator * pow(c.denominator, -1, p)) % p) for c in row]
    lift = Hc.from_blocks([res])
    if lift.is_zero():
        return Hc.zero(), Hc
    return teichmuller(lift, M_DEFAULT), Hc


def interpolating_poly(F: LocalField, uhat: PadicElem, J: int, style: str = "standard"):
    """h = 1 + sum digit_j X^j with h(pi) = uhat + O(pi^J), by successive
    residue extraction along powers of the uniformiser."""
    p, e = F.p, F.e
    x = uhat - F.one()
    if not x.is_zero() and x.valuation() <= 0:
        raise ValueError("interpolation requires a principal unit")
    pi = F.pi()
    digits = []
    coeff_field = None
    pij = F.one()
    for j in range(1, J + 1):
        pij = pij * pi
        if x.is_zero() or x.valuation() * e > j:
            digits.append(None)
            continue
        d, coeff_field = _residue_digit(F, x / pij, style)
        digits.append(d)
        if coeff_field is None:
            x = x - pij * d
        else:
            x = x - pij * lift_to(F, d)
    cap = J + 1
    one = Fraction(1) if coeff_field is None else coeff_field.one()
    zero = Fraction(0) if coeff_field is None else coeff_field.zero()
    coeffs = [one] + [zero if d is None else d for d in digits]
    return PSeries(coeff_field, coeffs, cap)


# -- the g-series ------------------------------------------------------


@dataclass
class GSeries:
    series: PSeries
    h: PSeries
    field: LocalField
    uhat: PadicElem
    level: int
    cap: int

    @property
    def p(self) -> int:
        return self.field.p

    def value_at(self, x: PadicElem) -> PadicElem:
        return self.series.evaluate(x)


def g_series(F: LocalField, uhat, cap: int | None = None,
             style: str = "standard", M: int = M_DEFAULT) -> GSeries:
    """The series g = (1/p) log( h(X)^p / phi-hat(h)((1+X)^p - 1) ) for
    an interpolating polynomial h of the principal unit uhat."""
    p = F.p
    if F.cyc_level is None:
        raise UnsupportedLocalError("g-series requires a cyclotomic ramified part")
    n = F.cyc_level
    if not isinstance(uhat, PadicElem):
        uhat = F.rational(uhat)
    if cap is None:
        cap = F.e * (n + 6) + 2
    h = interpolating_poly(F, uhat, cap - 1, style)
    L = h.log()
    g = L - L.frobenius_coeffs().compose_one_plus_pow(p).scale(Fraction(1, p))
    return GSeries(series=g, h=h, field=F, uhat=uhat, level=n, cap=cap)


def gseries_integral(gs: GSeries) -> bool:
    """All coefficients of g are p-integral."""
    p = gs.p
    for c in gs.series.coeffs:
        if isinstance(c, PadicElem):
            if not c.is_zero() and c.valuation() < 0:
                return False
        elif c != 0 and _vp(Fraction(c), p) < 0:
            return False
    return True


def gseries_vanishes_at_zero(gs: GSeries) -> bool:
    c = gs.series.coeffs[0]
    return c.is_zero() if isinstance(c, PadicElem) else c == 0


def gseries_values_principal(gs: GSeries) -> bool:
    """g(zeta - 1) lies in the maximal ideal for every zeta in the
    p-power root tower."""
    F = gs.field
    z = F.one() + F.pi()
    for t in range(1, gs.p ** (gs.level + 1)):
        val = gs.value_at(z**t - F.one())
        if not val.is_zero() and val.valuation() <= 0:
            return False
    return True


def gseries_reconstructs_log(gs: GSeries, M: int = M_DEFAULT):
    """log_p(uhat) = sum_t phi-hat^t( g(zeta_(n-t) - 1) ) / p^t; returns
    (difference, guaranteed precision) for the caller to assert on."""
    F = gs.field
    p, n = gs.p, gs.level
    z = F.one() + F.pi()
    total = F.zero()
    for t in range(n + 1):
        # zeta_(n-t) is a primitive p^(n-t+1)-th root
        point = z ** (p**t) - F.one()
        total = total + galois(gs.value_at(point), t, 1) * Fraction(1, p**t)
    diff = total - plog(gs.uhat, M)
    prec = diff.prec
    return diff, prec


# -- the averaged series path for a_h ---------------------------------


def a_h_path(p: int, n: int, c: int, uhat, cap: int | None = None,
             style: str = "standard", M: int = M_DEFAULT) -> Fraction:
    """Coefficient a_h for h = sigma_c in the cyclotomic instance at
    level n: the p^-(n+1)-average of (1+X)^c g(X) / (1 - (1+X)^c) over
    X = zeta - 1, zeta in the p^(n+1)-th roots of unity.

    The zeta = 1 term is -g_1/c, which vanishes because the defining
    quotient of g removes the linear coefficient; it is still computed
    from the series so the cancellation is checked rather than assumed.
    """
    N = n + 1
    if math.gcd(c, p) != 1:
        raise ValueError("the group label must be prime to p")
    F = LocalField.cyclotomic(p, n)
    gs = g_series(F, uhat, cap=cap, style=style, M=M)
    g1 = gs.series.coeffs[1]
    total = F.rational(-Fraction(g1, 1) / c)
    z = F.one() + F.pi()
    for t in range(1, p**N):
        zeta = z**t
        zc = zeta**c
        total = total + zc * gs.value_at(zeta - F.one()) / (F.one() - zc)
    a = total * Fraction(1, p**N)
    if not a.is_rational():
        raise PrecisionError("series-path coefficient not certified rational")
    return a.rational_value(), a.prec


# -- Hilbert pairings on the supported generator set -------------------


@dataclass(frozen=True)
class PairingArg:
    """A supported first argument zeta_n^j * prod_b sigma_b((1-zeta_n)^-1)^e_b
    of the level-n pairing, stored as the exponent data (j, {b: e_b})."""

    zeta_exp: int
    gen_exps: tuple = ()

    @classmethod
    def eta(cls) -> "PairingArg":
        """(1 - zeta_n)^-1."""
        return cls(0, ((1, 1),))


def _log_of(F: LocalField, v, M: int) -> PadicElem:
    if not isinstance(v, PadicElem):
        v = F.rational(v)
    else:
        v = lift_to(F, v)
    return plog(v, M)


def _trace_quotient(F: LocalField, x: PadicElem, N: int) -> Fraction:
    t = local_trace(x)
    if not t.is_rational():
        raise PrecisionError("trace not certified rational")
    val = t.rational_value() / Fraction(F.p**N)
    if val.denominator % F.p == 0:
        raise PrecisionError("pairing value not integral at this precision")
    return val


def hilbert_pair(p: int, n: int, a: PairingArg, v, M: int = M_DEFAULT) -> int:
    """[a, v]_{1,n} in Z/p^(n+1), via the explicit trace formulas
    [zeta, v] = Tr(log v)/p^(n+1) and
    [sigma_b((1-zeta)^-1), v] = b Tr(zeta^b/(1-zeta^b) log v)/p^(n+1)."""
    if not isinstance(a, PairingArg):
        raise ValueError("first pairing argument outside the supported set")
    N = n + 1
    F = LocalField.cyclotomic(p, n)
    lv = _log_of(F, v, M)
    total = Fraction(0)
    if a.zeta_exp % p**N:
        total += a.zeta_exp * _trace_quotient(F, lv, N)
    z = F.one() + F.pi()
    for b, e in a.gen_exps:
        if e == 0:
            continue
        if math.gcd(b, p) != 1:
            raise ValueError("generator labels must be prime to p")
        zb = z**b
        w = zb * (F.one() - zb).inverse() * lv
        total += e * b * _trace_quotient(F, w, N)
    num = _red_frac(total, p, N)
    return int(num) % p**N


def group_pair(p: int, n: int, a: PairingArg, v, M: int = M_DEFAULT) -> dict:
    """[a, v]^G_{1,n} = sum_sigma [a, sigma v] sigma^-1 as a coefficient
    dict {c: value} over the labels sigma_c, c in (Z/p^(n+1))^x."""
    N = n + 1
    F = LocalField.cyclotomic(p, n)
    if not isinstance(v, PadicElem):
        v = F.rational(v)
    out = {}
    for c in range(1, p**N):
        if c % p == 0:
            continue
        cinv = pow(c, -1, p**N)
        out[c] = hilbert_pair(p, n, a, galois(v, 0, cinv), M)
    return out


def pairing_determinant(p: int, n: int, v, M: int = M_DEFAULT) -> dict:
    """H_n(eta, v) for the rank-one case: the group pairing of
    (1 - zeta_n)^-1 with v."""
    return group_pair(p, n, PairingArg.eta(), v, M)


# -- the congruence check ----------------------------------------------


@dataclass
class Conj44Report:
    p: int
    n: int
    passed: bool
    skipped: bool
    reason: str
    details: list

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "passed": self.passed,
            "skipped": self.skipped,
            "reason": self.reason,
            "details": self.details,
        }


def _residue_labels(ctx: RegulatorContext) -> dict:
    """group element -> residue label c of sigma_c, from the wiring."""
    return {g: ba[1] for g, ba in ctx.wirings[0].action.items()}


def conj44_check(p: int, n: int, units, M: int = 18,
                 ctx: RegulatorContext | None = None) -> Conj44Report:
    """Check kappa*(1) . s-bar(u) = H_n((1-zeta_n)^-1, u) coefficientwise
    mod p^(n+1) for the cyclotomic instance at level n.

    The left side comes from the zeta-times-regulator product, the right
    side from the trace-formula pairings; the check is skipped unless the
    integrality verdict for the instance holds.
    """
    N = n + 1
    if ctx is None:
        ctx = cyclotomic_context(p, n, M=M)
    sem = []
    for u in units:
        if isinstance(u, SemilocalUnit):
            sem.append(u)
        elif isinstance(u, PadicElem):
            sem.append(SemilocalUnit(ctx, [u]))
        else:
            sem.append(SemilocalUnit.diagonal_rational(ctx, u))
    rep = integrality_check(ctx, [[u] for u in sem])
    if not rep.integral:
        return Conj44Report(p, n, False, True,
                            "integrality verdict failed for the instance", [])
    labels = _residue_labels(ctx)
    details = []
    ok = True
    for u in sem:
        s = s_value(ctx, [u])
        if (s.min_prec() or math.inf) < N:
            raise PrecisionError("s-value precision below the modulus")
        H = pairing_determinant(p, n, u.comps[0], M)
        for g, c in labels.items():
            sv = s.coeffs.get(g, ctx.big.zero())
            lhs = int(_red_frac(sv.rational_value(), p, N)) % p**N
            rhs = H[c] % p**N
            details.append({"sigma": c, "lhs": lhs, "rhs": rhs})
            if lhs != rhs:
                ok = False
    return Conj44Report(p, n, ok, False, "" if ok else "coefficient mismatch",
                        details)
