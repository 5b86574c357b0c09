"""Global layer for k = Q and real quadratic k: ring of integers, units,
fractional ideals (HNF lattices), cycles, ray class groups, precise
torsion classes and additive-character classes on fractional ideals.

Supported quadratic fields have narrow class number 1; anything else is
rejected with :class:`UnsupportedFieldError` rather than silently
producing wrong class groups.
"""

from __future__ import annotations

import functools
import itertools
import math
import re
from fractions import Fraction
from math import isqrt

from .exact import (CycNum, FinAbGroup, GroupHom, GroupRingElem,
                    _solve_exact, finite_quotient, smith_normal_form)


class UnsupportedFieldError(ValueError):
    """Raised when field data is outside the supported regime."""


# ---------------------------------------------------------------------------
# elements


class QuadElem:
    """a + b*sqrt(D) with rational a, b; D squarefree > 1."""

    __slots__ = ("D", "a", "b")

    def __init__(self, D: int, a, b=0):
        self.D = D
        self.a = Fraction(a)
        self.b = Fraction(b)

    def _coerce(self, other):
        if isinstance(other, QuadElem):
            if other.D != self.D:
                raise ValueError("mixed quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(self.D, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QuadElem(self.D, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(self.D, -self.a, -self.b)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QuadElem(self.D,
                        self.a * other.a + self.D * self.b * other.b,
                        self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def conj(self) -> "QuadElem":
        return QuadElem(self.D, self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.D * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero quadratic element")
        return QuadElem(self.D, self.a / n, -self.b / n)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadElem(self.D, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def emb_sign(self, i: int) -> int:
        """Sign of tau_i(x); tau_1 sends sqrt(D) to the positive root."""
        b = self.b if i == 0 else -self.b
        a = self.a
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        big_a = a * a > self.D * b * b
        return ((a > 0) - (a < 0)) if big_a else ((b > 0) - (b < 0))

    def is_totally_positive(self) -> bool:
        return self.emb_sign(0) > 0 and self.emb_sign(1) > 0

    def emb_cmp(self, other, i: int) -> int:
        """Exact comparison of tau_i(self) and tau_i(other)."""
        other = self._coerce(other)
        return (self - other).emb_sign(i)

    def abs_emb_cmp(self, other, i: int) -> int:
        """Compare |tau_i(self)| with |tau_i(other)| exactly."""
        other = self._coerce(other)
        return (self * self - other * other).emb_sign(i)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.D, self.a, self.b))

    def __repr__(self):
        return f"({self.a}+{self.b}*sqrt{self.D})"


def elem_sign(x, i: int = 0) -> int:
    if isinstance(x, QuadElem):
        return x.emb_sign(i)
    x = Fraction(x)
    return (x > 0) - (x < 0)


def elem_norm(x) -> Fraction:
    return x.norm() if isinstance(x, QuadElem) else Fraction(x)


def elem_trace(x) -> Fraction:
    return x.trace() if isinstance(x, QuadElem) else Fraction(x)


def elem_conj(x):
    return x.conj() if isinstance(x, QuadElem) else Fraction(x)


def _is_zero_elem(r) -> bool:
    if isinstance(r, QuadElem):
        return r.is_zero()
    return Fraction(r) == 0


# ---------------------------------------------------------------------------
# base fields


class BaseField:
    """k = Q or a real quadratic field Q(sqrt(D)) with ring basis {1, omega}."""

    _cache: dict = {}

    def __init__(self, D: int | None):
        if D is None:
            self.kind = "Q"
            self.D = None
            self.degree = 1
            self.disc = 1
        else:
            if D <= 1 or any(D % (p * p) == 0 for p in range(2, isqrt(D) + 1)):
                raise ValueError("D must be squarefree and > 1")
            self.kind = "quad"
            self.D = D
            self.degree = 2
            self.disc = D if D % 4 == 1 else 4 * D
        self._unit_cache = None

    @classmethod
    def rationals(cls) -> "BaseField":
        return cls._cache.setdefault("Q", cls(None))

    @classmethod
    def real_quadratic(cls, D: int) -> "BaseField":
        return cls._cache.setdefault(D, cls(D))

    @classmethod
    def parse(cls, text: str) -> "BaseField":
        text = text.replace(" ", "")
        if text in ("Q", "q"):
            return cls.rationals()
        m = re.fullmatch(r"Q\(sqrt(\d+)\)", text)
        if not m:
            raise ValueError(f"cannot parse field {text!r}")
        return cls.real_quadratic(int(m.group(1)))

    # -- elements -----------------------------------------------------

    def elem(self, a, b=0):
        if self.kind == "Q":
            if b:
                raise ValueError("rational field has no sqrt part")
            return Fraction(a)
        return QuadElem(self.D, a, b)

    @property
    def one(self):
        return self.elem(1)

    @property
    def omega(self):
        """Second ring generator: sqrt(D), or (1+sqrt(D))/2 when D = 1 mod 4."""
        if self.kind == "Q":
            raise ValueError("no omega for Q")
        if self.D % 4 == 1:
            return QuadElem(self.D, Fraction(1, 2), Fraction(1, 2))
        return QuadElem(self.D, 0, 1)

    def coords(self, x):
        """Coordinates of x on the ring basis {1, omega} (rational)."""
        if self.kind == "Q":
            return (Fraction(x),)
        x = x if isinstance(x, QuadElem) else QuadElem(self.D, x)
        if self.D % 4 == 1:
            return (x.a - x.b, 2 * x.b)
        return (x.a, x.b)

    def from_coords(self, co):
        if self.kind == "Q":
            return Fraction(co[0])
        return co[0] * self.one + co[1] * self.omega

    def is_integral(self, x) -> bool:
        return all(c.denominator == 1 for c in self.coords(x))

    def sqrt_disc(self):
        """sqrt(d_k) as a field element (positive at tau_1)."""
        if self.kind == "Q":
            return Fraction(1)
        if self.D % 4 == 1:
            return QuadElem(self.D, 0, 1)
        return QuadElem(self.D, 0, 2)

    # -- units --------------------------------------------------------

    def fundamental_unit(self):
        """Fundamental unit > 1 of the ring of integers (quad only)."""
        if self.kind == "Q":
            return Fraction(1)
        if self._unit_cache is None:
            self._unit_cache = _fundamental_unit(self.D)
        return self._unit_cache

    def totally_positive_unit(self):
        """Generator of the totally positive units modulo torsion."""
        if self.kind == "Q":
            return Fraction(1)
        eps = self.fundamental_unit()
        if eps.is_totally_positive():
            return eps
        return eps * eps

    def is_narrow_h1(self) -> bool:
        """Narrow class number 1 test (Minkowski bound + norm of unit)."""
        if self.kind == "Q":
            return True
        if self.fundamental_unit().norm() != -1:
            return False
        bound = isqrt(self.disc) // 2 + 1
        for p in range(2, bound + 1):
            if not _is_prime(p):
                continue
            for P in primes_above(self, p):
                if _find_generator(P, cap=4000) is None:
                    return False
        return True

    def check_supported(self):
        if self.kind == "quad" and not self.is_narrow_h1():
            raise UnsupportedFieldError(
                f"Q(sqrt{self.D}) does not have narrow class number 1; "
                "only narrow-h1 real quadratic fields are supported")

    def different(self) -> "FracIdeal":
        """The different ideal (sqrt(d_k)) -- trivial for Q."""
        return FracIdeal.principal(self, self.sqrt_disc())

    def __repr__(self):
        return "Q" if self.kind == "Q" else f"Q(sqrt{self.D})"

    def __eq__(self, other):
        return (isinstance(other, BaseField)
                and self.kind == other.kind and self.D == other.D)

    def __hash__(self):
        return hash((self.kind, self.D))


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, isqrt(n) + 1))


def _fundamental_unit(D: int) -> QuadElem:
    """Continued-fraction Pell solver; returns the unit > 1 generating
    O^x modulo torsion (half-integer units included when D = 1 mod 4)."""
    a0 = isqrt(D)
    m, d, a = 0, 1, a0
    h_prev, h = 1, a0
    k_prev, k = 0, 1
    sol = None
    for _ in range(10 ** 6):
        if h * h - D * k * k in (1, -1):
            sol = (h, k)
            break
        m = d * a - m
        d = (D - m * m) // d
        a = (a0 + m) // d
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
    if sol is None:  # pragma: no cover
        raise RuntimeError("Pell solver did not terminate")
    candidates = [QuadElem(D, sol[0], sol[1])]
    if D % 4 == 1:
        # minimal half-integer solutions of x^2 - D y^2 = +-4 (x = y mod 2)
        for y in range(1, sol[1] + 1):
            for sgn in (-4, 4):
                x2 = D * y * y + sgn
                if x2 > 0 and isqrt(x2) ** 2 == x2:
                    x = isqrt(x2)
                    if (x - y) % 2 == 0:
                        candidates.append(
                            QuadElem(D, Fraction(x, 2), Fraction(y, 2)))
        best = None
        for u in candidates:
            if (u - 1).emb_sign(0) > 0 and (best is None or u.emb_cmp(best, 0) < 0):
                best = u
        return best
    return candidates[0]


# ---------------------------------------------------------------------------
# integer lattices of rank 2 (internal)


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _hnf2(rows):
    """HNF basis ((a, 0), (b, c)) of the span of integer 2-vectors, with
    a, c > 0 and 0 <= b < a.  First coordinate along 1, second along omega."""
    rows = [(int(x), int(y)) for x, y in rows if (x, y) != (0, 0)]
    if not rows:
        raise ValueError("zero lattice")
    # gcd of second coordinates, with a witness vector achieving it
    c = 0
    wit = (0, 0)
    for x, y in rows:
        if y == 0:
            continue
        if c == 0:
            c, wit = (abs(y), (x, y) if y > 0 else (-x, -y))
        else:
            g, u, v = _xgcd(c, y)
            wit = (u * wit[0] + v * x, g)
            c = g
    a = 0
    for x, y in rows:
        if c:
            x = x - (y // c) * wit[0]
        a = math.gcd(a, abs(x))
    if a == 0 or c == 0:
        raise ValueError("lattice is not full rank")
    b = wit[0] % a
    return a, b, c


def _int_kernel(B):
    """Basis of the integer kernel of x -> x*B for an n x m integer matrix."""
    D, U, _V = smith_normal_form(B)
    n = len(B)
    m = len(B[0]) if B else 0
    out = []
    for i in range(n):
        if i >= m or D[i][i] == 0:
            out.append(U[i])
    return out


def _inv2(M):
    """Inverse of a 2x2 unimodular integer matrix."""
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    assert det in (1, -1)
    return [[M[1][1] // det, -M[0][1] // det],
            [-M[1][0] // det, M[0][0] // det]]


class _Lat2:
    """Full-rank lattice in Q^2: (1/den) * Z-span of HNF rows."""

    __slots__ = ("den", "a", "b", "c")

    def __init__(self, den, a, b, c):
        g = math.gcd(math.gcd(a, b), math.gcd(c, den))
        self.den, self.a, self.b, self.c = den // g, a // g, b // g, c // g

    @classmethod
    def from_vectors(cls, vecs):
        vecs = [(Fraction(x), Fraction(y)) for x, y in vecs]
        den = 1
        for x, y in vecs:
            den = math.lcm(den, x.denominator, y.denominator)
        rows = [(int(x * den), int(y * den)) for x, y in vecs]
        a, b, c = _hnf2(rows)
        return cls(den, a, b, c)

    def vectors(self):
        return [(Fraction(self.a, self.den), Fraction(0)),
                (Fraction(self.b, self.den), Fraction(self.c, self.den))]

    def contains(self, x, y) -> bool:
        x = Fraction(x) * self.den
        y = Fraction(y) * self.den
        if y.denominator != 1 or x.denominator != 1:
            return False
        if y % self.c != 0:
            return False
        k = y // self.c
        return (x - k * self.b) % self.a == 0

    def covolume(self) -> Fraction:
        return Fraction(self.a * self.c, self.den * self.den)

    def intersect(self, other: "_Lat2") -> "_Lat2":
        den = math.lcm(self.den, other.den)
        s = den // self.den
        t = den // other.den
        r1 = [(self.a * s, 0), (self.b * s, self.c * s)]
        r2 = [(other.a * t, 0), (other.b * t, other.c * t)]
        B = [list(r1[0]), list(r1[1]),
             [-r2[0][0], -r2[0][1]], [-r2[1][0], -r2[1][1]]]
        vecs = []
        for ker in _int_kernel(B):
            vx = ker[0] * r1[0][0] + ker[1] * r1[1][0]
            vy = ker[0] * r1[0][1] + ker[1] * r1[1][1]
            vecs.append((vx, vy))
        a, b, c = _hnf2(vecs)
        return _Lat2(den, a, b, c)

    def __eq__(self, other):
        return (self.den, self.a, self.b, self.c) == \
            (other.den, other.a, other.b, other.c)

    def __hash__(self):
        return hash((self.den, self.a, self.b, self.c))


# ---------------------------------------------------------------------------
# fractional ideals


class FracIdeal:
    """Fractional ideal.  For Q this is a positive rational q (the ideal qZ);
    for quadratic fields a full-rank HNF lattice stable under omega."""

    def __init__(self, field: BaseField, data):
        self.field = field
        self.data = data  # Fraction (Q) or _Lat2 (quad)

    # -- constructors -------------------------------------------------

    @classmethod
    def principal(cls, field, x) -> "FracIdeal":
        if field.kind == "Q":
            q = abs(Fraction(x))
            if q == 0:
                raise ValueError("zero ideal")
            return cls(field, q)
        x = x if isinstance(x, QuadElem) else field.elem(x)
        if x.is_zero():
            raise ValueError("zero ideal")
        return cls.from_generators(field, [x])

    @classmethod
    def from_generators(cls, field, gens) -> "FracIdeal":
        if field.kind == "Q":
            gens = [Fraction(g) for g in gens]
            den = math.lcm(*[g.denominator for g in gens])
            num = math.gcd(*[int(g * den) for g in gens])
            return cls(field, Fraction(abs(num), den))
        vecs = []
        om = field.omega
        for g in gens:
            g = g if isinstance(g, QuadElem) else field.elem(g)
            for mult in (field.one, om):
                vecs.append(field.coords(g * mult))
        return cls(field, _Lat2.from_vectors(vecs))

    @classmethod
    def ring(cls, field) -> "FracIdeal":
        return cls.principal(field, 1)

    # -- queries ------------------------------------------------------

    def norm(self) -> Fraction:
        if self.field.kind == "Q":
            return self.data
        return self.data.covolume()

    def basis(self):
        """Z-basis as field elements (deterministic HNF orientation)."""
        if self.field.kind == "Q":
            return [self.data]
        return [self.field.from_coords(v) for v in self.data.vectors()]

    def contains(self, x) -> bool:
        if self.field.kind == "Q":
            return (Fraction(x) / self.data).denominator == 1
        return self.data.contains(*self.field.coords(x))

    def is_integral(self) -> bool:
        return all(self.field.is_integral(b) for b in self.basis())

    def is_ring(self) -> bool:
        return self == FracIdeal.ring(self.field)

    def denominator(self) -> int:
        """Smallest positive integer d with d * self integral."""
        if self.field.kind == "Q":
            return self.data.denominator
        return self.data.den

    # -- arithmetic ---------------------------------------------------

    def __mul__(self, other):
        if not isinstance(other, FracIdeal):
            return self.scale(other)
        if self.field.kind == "Q":
            return FracIdeal(self.field, self.data * other.data)
        vecs = [self.field.coords(x * y)
                for x in self.basis() for y in other.basis()]
        return FracIdeal(self.field, _Lat2.from_vectors(vecs))

    def scale(self, x) -> "FracIdeal":
        if self.field.kind == "Q":
            return FracIdeal(self.field, self.data * abs(Fraction(x)))
        vecs = [self.field.coords(x * b) for b in self.basis()]
        return FracIdeal(self.field, _Lat2.from_vectors(vecs))

    def __add__(self, other: "FracIdeal") -> "FracIdeal":
        if self.field.kind == "Q":
            return FracIdeal.from_generators(self.field, [self.data, other.data])
        vecs = [self.field.coords(b) for b in self.basis() + other.basis()]
        return FracIdeal(self.field, _Lat2.from_vectors(vecs))

    def conj_ideal(self) -> "FracIdeal":
        if self.field.kind == "Q":
            return self
        return FracIdeal.from_generators(self.field,
                                         [b.conj() for b in self.basis()])

    def inverse(self) -> "FracIdeal":
        if self.field.kind == "Q":
            return FracIdeal(self.field, 1 / self.data)
        return self.conj_ideal().scale(1 / self.norm())

    def intersect(self, other: "FracIdeal") -> "FracIdeal":
        if self.field.kind == "Q":
            a, b = self.data, other.data
            den = math.lcm(a.denominator, b.denominator)
            return FracIdeal(self.field,
                             Fraction(math.lcm(int(a * den), int(b * den)), den))
        return FracIdeal(self.field, self.data.intersect(other.data))

    def divides(self, other: "FracIdeal") -> bool:
        """self | other, i.e. other is a subset of self (both fractional)."""
        return all(self.contains(b) for b in other.basis())

    def is_coprime(self, other: "FracIdeal") -> bool:
        return (self + other).is_ring()

    # -- residues (integral ideals) -----------------------------------

    def residues(self):
        """Coset representatives of O modulo self (self integral)."""
        if not self.is_integral():
            raise ValueError("residues need an integral ideal")
        if self.field.kind == "Q":
            for r in range(int(self.data)):
                yield Fraction(r)
            return
        lat = self.data
        assert lat.den == 1
        for u in range(lat.a):
            for v in range(lat.c):
                yield self.field.from_coords((u, v))

    def reduce(self, x):
        """Canonical representative of x modulo self (integral x)."""
        if self.field.kind == "Q":
            return Fraction(Fraction(x) % self.data)
        lat = self.data
        u, v = self.field.coords(x)
        k = (v * lat.den) // lat.c
        u2 = u - k * Fraction(lat.b, lat.den)
        v2 = v - k * Fraction(lat.c, lat.den)
        j = (u2 * lat.den) // lat.a
        u2 = u2 - j * Fraction(lat.a, lat.den)
        return self.field.from_coords((u2, v2))

    def __eq__(self, other):
        return (isinstance(other, FracIdeal)
                and self.field == other.field and self.data == other.data)

    def __hash__(self):
        return hash((self.field, self.data))

    def __repr__(self):
        if self.field.kind == "Q":
            return f"({self.data})Z"
        return f"Ideal(basis={self.basis()})"


# ---------------------------------------------------------------------------
# prime ideals and factorization


def _factor_int(n: int) -> dict:
    n = abs(int(n))
    out: dict = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def primes_above(field: BaseField, p: int):
    """Prime ideals of O above the rational prime p (deterministic order)."""
    if field.kind == "Q":
        return [FracIdeal.principal(field, p)]
    if field.D % 4 == 1:
        c1, c0 = -1, -(field.D - 1) // 4  # x^2 - x - (D-1)/4
    else:
        c1, c0 = 0, -field.D              # x^2 - D
    roots = [r for r in range(p) if (r * r + c1 * r + c0) % p == 0]
    om = field.omega
    if not roots:
        return [FracIdeal.principal(field, p)]  # inert
    return [FracIdeal.from_generators(field, [field.elem(p), om - r])
            for r in roots]


def prime_residue_degree(P: FracIdeal) -> int:
    fac = _factor_int(int(P.norm()))
    assert len(fac) == 1
    return next(iter(fac.values()))


def factor_ideal(I: FracIdeal) -> list:
    """Factor an integral ideal into [(P, e), ...], deterministic order."""
    if not I.is_integral():
        raise ValueError("factor_ideal wants an integral ideal")
    field = I.field
    out = []
    for p in sorted(_factor_int(int(I.norm()))):
        for P in primes_above(field, p):
            e = 0
            power = FracIdeal.ring(field)
            while True:
                power = power * P
                if power.divides(I):
                    e += 1
                else:
                    break
            if e:
                out.append((P, e))
    return out


def ideal_valuations(J: FracIdeal) -> dict:
    """Valuations v_P of a fractional ideal at all primes where nonzero."""
    field = J.field
    d = J.denominator()
    num = J.scale(d) if d != 1 else J
    vals: dict = {}
    for P, e in factor_ideal(num):
        vals[P] = vals.get(P, 0) + e
    if d != 1:
        for P, e in factor_ideal(FracIdeal.principal(field, d)):
            vals[P] = vals.get(P, 0) - e
    return {P: v for P, v in vals.items() if v != 0}


def ideal_divisors(f: FracIdeal) -> list:
    """All integral divisors of an integral ideal, sorted by norm."""
    fac = factor_ideal(f)
    out = []
    for exps in itertools.product(*[range(e + 1) for _P, e in fac]):
        I = FracIdeal.ring(f.field)
        for (P, _e), k in zip(fac, exps):
            for _ in range(k):
                I = I * P
        out.append(I)
    out.sort(key=lambda I: I.norm())
    return out


# ---------------------------------------------------------------------------
# element searches


def positive_reps(field: BaseField, x0, lattice: FracIdeal, signs=None,
                  max_box: int = 40):
    """Yield representatives of x0 + lattice positive at the places in
    ``signs``, in a deterministic roughly-height-increasing order (exact
    height comparisons within each search shell)."""
    if signs is None:
        signs = set(range(field.degree))
    if field.kind == "Q":
        f = lattice.data
        x = Fraction(x0) % f
        if x == 0:
            x = f
        while True:
            yield x
            x += f
        return
    basis = lattice.basis()
    seen = set()
    for bnd in range(1, max_box + 1):
        cands = []
        for mcoef in range(-bnd, bnd + 1):
            for ncoef in range(-bnd, bnd + 1):
                if (mcoef, ncoef) in seen:
                    continue
                seen.add((mcoef, ncoef))
                x = x0 + mcoef * basis[0] + ncoef * basis[1]
                if x.is_zero():
                    continue
                if any(x.emb_sign(i) <= 0 for i in signs):
                    continue
                cands.append(x)
        cands.sort(key=functools.cmp_to_key(_height_cmp))
        yield from cands


def smallest_positive_rep(field, x0, lattice, signs=None):
    """Smallest sign-constrained representative under the height order."""
    return next(positive_reps(field, x0, lattice, signs))


def _height_cmp(x: QuadElem, y: QuadElem) -> int:
    """Exact height order: max_i |tau_i|, ties by coordinates."""
    xc, yc = x.conj(), y.conj()
    mx = x if x.abs_emb_cmp(xc, 0) >= 0 else xc
    my = y if y.abs_emb_cmp(yc, 0) >= 0 else yc
    s = mx.abs_emb_cmp(my, 0)
    if s:
        return s
    if (x.a, x.b) < (y.a, y.b):
        return -1
    return 1 if (x.a, x.b) > (y.a, y.b) else 0


def _box_shell(bnd: int):
    """Integer points on the boundary of the square [-bnd, bnd]^2."""
    if bnd == 0:
        yield 0, 0
        return
    for m in range(-bnd, bnd + 1):
        yield m, bnd
        yield m, -bnd
    for n in range(-bnd + 1, bnd):
        yield bnd, n
        yield -bnd, n


def _find_generator(I: FracIdeal, cap: int = 400):
    """A generator of a (principal) integral ideal, or None within cap."""
    field = I.field
    if field.kind == "Q":
        return I.data
    target = I.norm()
    b1, b2 = I.basis()
    for bnd in range(cap + 1):
        for mcoef, ncoef in _box_shell(bnd):
            x = mcoef * b1 + ncoef * b2
            if not x.is_zero() and abs(x.norm()) == target:
                return x
    return None


def principal_generator(I: FracIdeal, totally_positive: bool = False):
    """Generator of a principal fractional ideal; optionally totally
    positive (always possible in the narrow-h1 regime)."""
    field = I.field
    if field.kind == "Q":
        return I.data
    d = I.denominator()
    g = _find_generator(I.scale(d))
    if g is None:
        raise RuntimeError("generator search exhausted (is the ideal principal?)")
    g = g / d
    if totally_positive and not g.is_totally_positive():
        eps = field.fundamental_unit()
        for unit in (-field.one, eps, -eps):
            if (g * unit).is_totally_positive():
                return g * unit
        raise RuntimeError("no totally positive generator found")
    return g


# ---------------------------------------------------------------------------
# cycles


class Cycle:
    """Modulus f*z: integral ideal f and a set of real-place indices z."""

    def __init__(self, field: BaseField, f: FracIdeal, inf):
        if not f.is_integral():
            raise ValueError("cycle requires an integral finite part")
        self.field = field
        self.f = f
        self.inf = frozenset(inf)
        if any(i >= field.degree for i in self.inf):
            raise ValueError("infinite place index out of range")

    @classmethod
    def parse(cls, field: BaseField, text: str) -> "Cycle":
        """Parse cycle syntax like "12*inf" or "(sqrt2)*(3+sqrt2)*inf1*inf2"."""
        f = FracIdeal.ring(field)
        inf = set()
        for token in text.split("*"):
            token = token.strip()
            if not token:
                continue
            if token == "inf":
                inf.update(range(field.degree))
            elif token in ("inf1", "inf2"):
                inf.add(int(token[-1]) - 1)
            else:
                if token.startswith("(") and token.endswith(")"):
                    token = token[1:-1]
                f = f * FracIdeal.principal(field, _parse_elem(field, token))
        return cls(field, f, inf)

    def divisor_cycles(self):
        """Cycles g*z for all integral g | f (same infinite part)."""
        return [Cycle(self.field, g, self.inf) for g in ideal_divisors(self.f)]

    def __eq__(self, other):
        return (isinstance(other, Cycle) and self.field == other.field
                and self.f == other.f and self.inf == other.inf)

    def __hash__(self):
        return hash((self.field, self.f, self.inf))

    def __repr__(self):
        tail = "".join(f"*inf{i + 1}" for i in sorted(self.inf))
        return f"Cycle({self.f!r}{tail})"


def _parse_elem(field: BaseField, text: str):
    text = text.replace(" ", "")
    if field.kind == "Q":
        return Fraction(text)
    m = re.fullmatch(r"(?:(-?\d+)(?=[+-]|$))?([+-]?)(?:(\d*)sqrt(\d+))?", text)
    if not m or (m.group(1) is None and m.group(4) is None):
        raise ValueError(f"cannot parse element {text!r}")
    a = int(m.group(1)) if m.group(1) is not None else 0
    b = 0
    if m.group(4) is not None:
        if int(m.group(4)) != field.D:
            raise ValueError(f"sqrt{m.group(4)} does not live in {field!r}")
        coef = int(m.group(3)) if m.group(3) else 1
        b = -coef if m.group(2) == "-" else coef
    return field.elem(a, b)


# ---------------------------------------------------------------------------
# ray class groups


class _MultComponent:
    """(O/P^e)^x for one prime power, with generators and a dlog table."""

    def __init__(self, field, P, e, Q):
        self.field = field
        self.P = P
        self.e = e
        self.Q = Q
        if field.kind == "Q":
            self._build_rational()
        elif e == 1:
            self._build_prime(int(P.norm()))
        else:
            raise UnsupportedFieldError(
                "higher prime-power conductors over quadratic fields are "
                "not supported")

    def _build_prime(self, q):
        """(O/P)^x is cyclic of order q - 1; brute-force a generator."""
        order = q - 1
        Q = self.Q
        gen = None
        for r in Q.residues():
            if _is_zero_elem(r):
                continue
            if not FracIdeal.principal(self.field, r).is_coprime(self.P):
                continue
            if _mult_order(self.field, r, Q, order) == order:
                gen = r
                break
        if gen is None:  # pragma: no cover
            raise RuntimeError("no generator found for (O/P)^x")
        self.gens = [gen]
        self.orders = [order]
        table = {}
        cur = Q.reduce(self.field.one)
        for k in range(order):
            table[_res_key(self.field, cur)] = (k,)
            cur = Q.reduce(cur * gen)
        self._table = table

    def _build_rational(self):
        """Unit group of Z/p^e with the classical generator choices."""
        fac = _factor_int(int(self.Q.norm()))
        assert len(fac) == 1
        p = next(iter(fac))
        e = fac[p]
        mod = p ** e
        if p == 2 and e == 1:
            self.gens, self.orders = [], []
            self._table = {_res_key(self.field, Fraction(1)): ()}
            return
        if p == 2 and e == 2:
            self.gens, self.orders = [Fraction(3)], [2]
        elif p == 2:
            self.gens = [Fraction(mod - 1), Fraction(5)]
            self.orders = [2, 2 ** (e - 2)]
        else:
            g = _primitive_root_mod_p_power(p, e)
            self.gens = [Fraction(g)]
            self.orders = [(p - 1) * p ** (e - 1)]
        table = {}
        for exps in itertools.product(*[range(o) for o in self.orders]):
            val = 1
            for gen, k in zip(self.gens, exps):
                val = (val * pow(int(gen) % mod, k, mod)) % mod
            table.setdefault(_res_key(self.field, Fraction(val)), tuple(exps))
        self._table = table

    def dlog(self, x):
        key = _res_key(self.field, self.Q.reduce(x))
        if key not in self._table:
            raise ValueError(f"residue is not a unit modulo the component: {x}")
        return list(self._table[key])


def _res_key(field, r):
    return tuple(field.coords(r))


def _mult_order(field, r, Q, bound):
    one = Q.reduce(field.one)
    cur = Q.reduce(r)
    for k in range(1, bound + 1):
        if cur == one:
            return k
        cur = Q.reduce(cur * r)
    return None


def _primitive_root_mod_p_power(p: int, e: int) -> int:
    phi = p - 1
    fac = _factor_int(phi)
    g = next(c for c in range(2, p + 1)
             if all(pow(c, phi // q, p) != 1 for q in fac))
    if e == 1:
        return g
    if pow(g, phi, p * p) == 1:
        g += p
    return g


class RayClassData:
    """Ray class group Cl_m with residue presentation and Artin labels.

    Built from the exact sequence 1 -> E_z/E_m -> (O/f)^x -> Cl_m -> Cl_z -> 1,
    valid here because Cl_z is trivial in the supported regime (k = Q, or
    narrow class number 1 real quadratic).
    """

    def __init__(self, cycle: Cycle):
        cycle.field.check_supported()
        self.field = cycle.field
        self.cycle = cycle
        self._build_mult_group()
        self._build_quotient()
        self._build_reps()
        self._verify_exact_sequence()

    # -- multiplicative group (O/f)^x ---------------------------------

    def _build_mult_group(self):
        field = self.field
        self._components = []
        for P, e in factor_ideal(self.cycle.f):
            Q = FracIdeal.ring(field)
            for _ in range(e):
                Q = Q * P
            self._components.append(_MultComponent(field, P, e, Q))
        self.mult_orders = []
        for comp in self._components:
            self.mult_orders.extend(comp.orders)
        self.mult_order = math.prod(self.mult_orders) if self.mult_orders else 1

    def residue_dlog(self, x):
        """Exponent vector of x in (O/f)^x over the component generators."""
        out = []
        for comp in self._components:
            out.extend(comp.dlog(x))
        return out

    # -- units and quotient -------------------------------------------

    def _unit_gens_z(self):
        """Generators of E_z = units positive at all places of z."""
        field = self.field
        if field.kind == "Q":
            return [] if self.cycle.inf else [Fraction(-1)]
        eps = field.fundamental_unit()
        gens = [field.totally_positive_unit()]
        for u in (eps, -eps, -field.one):
            if all(elem_sign(u, i) > 0 for i in self.cycle.inf):
                gens.append(u)
        return gens

    def _build_quotient(self):
        ngens = len(self.mult_orders)
        self.unit_gens = self._unit_gens_z()
        if ngens == 0:
            self.group, self.gen_images = FinAbGroup(()), []
            self.unit_image_order = 1
        else:
            relations = []
            for i, o in enumerate(self.mult_orders):
                row = [0] * ngens
                row[i] = o
                relations.append(row)
            for u in self.unit_gens:
                relations.append(self.residue_dlog(u))
            self.group, self.gen_images = finite_quotient(ngens, relations)
            # order of the image of E_z in (O/f)^x, BFS over exponent vectors
            zero = tuple([0] * ngens)
            unit_vecs = [tuple(v % o for v, o in
                               zip(self.residue_dlog(u), self.mult_orders))
                         for u in self.unit_gens]
            seen = {zero}
            frontier = [zero]
            while frontier:
                g = frontier.pop()
                for uv in unit_vecs:
                    h = tuple((x + y) % o for x, y, o in
                              zip(g, uv, self.mult_orders))
                    if h not in seen:
                        seen.add(h)
                        frontier.append(h)
            self.unit_image_order = len(seen)
        # [E_z : E_m] equals the order of the image of E_z in (O/f)^x,
        # since E_m is by definition the kernel of E_z -> (O/f)^x
        self.index_z_m = self.unit_image_order
        if self.field.kind == "Q":
            self.eps_m = None
            self.eps_m_power = 1
        else:
            eps0 = self.field.totally_positive_unit()
            t = 1
            cur = eps0
            while any(v % o for v, o in
                      zip(self.residue_dlog(cur), self.mult_orders)):
                cur = cur * eps0
                t += 1
            self.eps_m_power = t   # eps_m = eps0^t generates E_m mod torsion
            self.eps_m = cur

    # -- class maps ---------------------------------------------------

    def class_of_residue(self, x):
        """Projection (O/f)^x -> Cl_m; for z-positive x this is the class
        of the principal ideal (x)."""
        out = self.group.identity
        for v, im in zip(self.residue_dlog(x), self.gen_images):
            if v:
                out = self.group.op(out, self.group.power(im, v))
        return out

    def class_of_ideal(self, A: FracIdeal):
        """Artin class [A]_m of a fractional ideal prime to f."""
        alpha = principal_generator(A, totally_positive=(self.field.kind != "Q"))
        if self.field.kind == "Q":
            alpha = abs(alpha)
        return self.class_of_residue(alpha)

    # -- representatives ----------------------------------------------

    def _build_reps(self):
        """Canonical residue and totally positive element per class."""
        f = self.cycle.f
        self.rep_residue = {}
        if f.is_ring():
            self.rep_residue[self.group.identity] = self.field.one
        else:
            for r in f.residues():
                if _is_zero_elem(r):
                    continue
                if not FracIdeal.principal(self.field, r).is_coprime(f):
                    continue
                c = self.class_of_residue(r)
                if c not in self.rep_residue:
                    self.rep_residue[c] = r
        if len(self.rep_residue) != self.group.order:  # pragma: no cover
            raise RuntimeError("class representatives incomplete")
        self.rep_element = {
            c: smallest_positive_rep(self.field, r, f)
            for c, r in self.rep_residue.items()}
        labels = {}
        for c, r in self.rep_residue.items():
            if self.field.kind == "Q":
                labels[c] = f"s_{int(r)}"
            else:
                u, v = self.field.coords(r)
                labels[c] = f"s_({u}{'+' if v >= 0 else ''}{v}w)"
        self.group.labels.update(labels)

    def _verify_exact_sequence(self):
        # |Cl_m| * |im(E_z -> (O/f)^x)| = |(O/f)^x| * |Cl_z|, with Cl_z = 1
        if self.group.order * self.unit_image_order != self.mult_order:
            raise RuntimeError(
                "ray class construction failed the exact-sequence check")

    # -- derived data -------------------------------------------------

    def unit_index_over(self, other: "RayClassData") -> int:
        """[E_n : E_m] for self built on m and other on n with n | m."""
        return self.index_z_m // other.index_z_m

    def projection_to(self, other: "RayClassData") -> GroupHom:
        """pi_{m,n}: Cl_m -> Cl_n for n | m with z(n) a subset of z(m)."""
        if not other.cycle.f.divides(self.cycle.f):
            raise ValueError("target cycle does not divide source cycle")
        if not other.cycle.inf <= self.cycle.inf:
            raise ValueError("target infinite part not contained in source")
        images = []
        for i in range(len(self.group.orders)):
            gen = tuple(int(j == i) for j in range(len(self.group.orders)))
            images.append(other.class_of_residue(self.rep_element[gen]))
        return GroupHom(self.group, other.group, images)


# ---------------------------------------------------------------------------
# precise torsion classes and the [y; J]_n map


def _coords_in_basis(field, vecs, basis):
    """Matrix M (rational entries) with vecs[i] = sum_j M[i][j] * basis[j]."""
    cols = [list(field.coords(b)) for b in basis]
    out = []
    for v in vecs:
        sol = _solve_exact(cols, list(field.coords(v)))
        if sol is None:
            raise ValueError("vector not in basis span")
        out.append(sol)
    return out


def torsion_classes(g: FracIdeal, I: FracIdeal):
    """Representatives of classes y in g^-1 I / I whose annihilator
    ideal is exactly g."""
    field = g.field
    if not g.is_integral():
        raise ValueError("g must be integral")
    big = g.inverse() * I
    if field.kind == "Q":
        span = big.data
        count = int(I.data / span)
        return [Fraction(k * span) for k in range(count)
                if _annihilator(field, k * span, I) == g]
    b_big = big.basis()
    M = _coords_in_basis(field, I.basis(), b_big)
    M = [[int(x) for x in row] for row in M]
    D, _U, V = smith_normal_form(M)
    Vi = _inv2(V)
    newb = [Vi[i][0] * b_big[0] + Vi[i][1] * b_big[1] for i in range(2)]
    d1, d2 = abs(D[0][0]), abs(D[1][1])
    out = []
    for t1 in range(d1):
        for t2 in range(d2):
            y = t1 * newb[0] + t2 * newb[1]
            if _annihilator(field, y, I) == g:
                out.append(y)
    return out


def _annihilator(field, y, I: FracIdeal) -> FracIdeal:
    """ann_O(y + I) = { x in O : x*y in I } as an integral ideal."""
    if _is_zero_elem(y):
        return FracIdeal.ring(field)
    J = I.scale(1 / Fraction(y)) if field.kind == "Q" else I.scale(field.one / y)
    ann = FracIdeal.ring(field)
    for P, v in ideal_valuations(J).items():
        if v > 0:
            for _ in range(v):
                ann = ann * P
    return ann


def class_of_torsion(ray: RayClassData, y, I: FracIdeal, J: FracIdeal):
    """[y; J]_n: the class of (b) J for b in y + I, z-positive."""
    field = ray.field
    z = ray.cycle.inf
    signs = set(z) if z else set(range(field.degree))
    for b in positive_reps(field, y, I, signs=signs):
        A = FracIdeal.principal(field, b) * J
        if A.is_integral() and A.is_coprime(ray.cycle.f):
            return ray.class_of_ideal(A)
    raise RuntimeError("no coprime representative found")  # pragma: no cover


def build_A_n(ray: RayClassData) -> GroupRingElem:
    """A_n = sum of e(Tr(u)) sigma_[u; gD] over representatives u of the
    precise g-torsion of k/D^-1; an element of the group ring of Cl_n."""
    field = ray.field
    g = ray.cycle.f
    Dk = field.different()
    Dinv = Dk.inverse()
    out = GroupRingElem.zero(ray.group)
    for u in torsion_classes(g, Dinv):
        coeff = CycNum.e(elem_trace(u))
        if _is_zero_elem(u):
            cls = ray.group.identity
        else:
            cls = class_of_torsion(ray, u, Dinv, g * Dk)
        out = out + GroupRingElem(ray.group, {cls: coeff})
    return out


# ---------------------------------------------------------------------------
# additive character classes (the sets W_m)


class IdealCharacter:
    """Finite-order additive character on a fractional ideal I, stored by
    its root-of-unity values on the HNF basis of I."""

    def __init__(self, I: FracIdeal, values):
        self.I = I
        self.field = I.field
        self.basis_elems = I.basis()
        self.values = list(values)
        for v in self.values:
            if not isinstance(v, CycNum):
                raise TypeError("values must be CycNum roots of unity")

    @classmethod
    def from_trace(cls, I: FracIdeal) -> "IdealCharacter":
        """x -> e(Tr(x)) restricted to I."""
        return cls(I, [CycNum.e(elem_trace(b)) for b in I.basis()])

    def value(self, x) -> CycNum:
        co = _coords_in_basis(self.field, [x], self.basis_elems)[0]
        if any(c.denominator != 1 for c in co):
            raise ValueError("element is not in the domain ideal")
        out = CycNum.one()
        for c, v in zip(co, self.values):
            if c:
                out = out * v ** int(c)
        return out

    def restrict(self, J: FracIdeal) -> "IdealCharacter":
        """Restriction to a sub-ideal J of I."""
        return IdealCharacter(J, [self.value(b) for b in J.basis()])

    def annihilator(self) -> FracIdeal:
        """ann_O(xi) = largest ideal a with xi trivial on a*I."""
        field = self.field
        orders = [_root_order(v) for v in self.values]
        if field.kind == "Q":
            return FracIdeal.principal(field, orders[0])
        M = math.lcm(*orders)
        exps = [_root_exponent(v, M) for v in self.values]
        # kernel of xi inside I: combos c with c1*e1 + c2*e2 = 0 mod M
        B = [[exps[0]], [exps[1]], [-M]]
        ker_vecs = []
        for row in _int_kernel(B):
            vec = row[0] * self.basis_elems[0] + row[1] * self.basis_elems[1]
            if not vec.is_zero():
                ker_vecs.append(field.coords(vec))
        ker = _Lat2.from_vectors(ker_vecs)
        lat = None
        for b in self.basis_elems:
            pre = _preimage_lattice(field, b, ker)
            lat = pre if lat is None else lat.intersect(pre)
        lat = lat.intersect(FracIdeal.ring(field).data)
        return FracIdeal(field, lat)


def _root_order(v: CycNum) -> int:
    """Order of a root of unity given as a CycNum."""
    for k in sorted(_divisors(2 * v.cond)):
        if v ** k == CycNum.one():
            return k
    raise ValueError("value is not a root of unity")


def _root_exponent(v: CycNum, M: int) -> int:
    """Exponent t with v = zeta_M^t."""
    z = CycNum.zeta(M)
    cur = CycNum.one()
    for t in range(M):
        if cur == v:
            return t
        cur = cur * z
    raise ValueError("value is not in mu_M")


def _divisors(n: int):
    out = []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            out.append(d)
            if d * d != n:
                out.append(n // d)
    return sorted(out)


def _preimage_lattice(field, mult, L: _Lat2) -> _Lat2:
    """{ x : x * mult in L } as a lattice in {1, omega} coordinates."""
    img1 = field.coords(mult)
    img2 = field.coords(mult * field.omega)
    det = img1[0] * img2[1] - img1[1] * img2[0]
    if det == 0:
        raise ValueError("multiplier not invertible")
    vecs = []
    for lx, ly in L.vectors():
        u = (lx * img2[1] - ly * img2[0]) / det
        v = (-lx * img1[1] + ly * img1[0]) / det
        vecs.append((u, v))
    return _Lat2.from_vectors(vecs)


class WClass:
    """Pair {xi, I}: an additive character on a fractional ideal, with an
    ambient cycle m recording the equivalence being used."""

    def __init__(self, cycle: Cycle, xi: IdealCharacter):
        self.cycle = cycle
        self.xi = xi
        self.I = xi.I

    @classmethod
    def base_class(cls, cycle: Cycle) -> "WClass":
        """w_m^0 = { x -> e(Tr(x)), f^-1 D^-1 }_m."""
        field = cycle.field
        I0 = cycle.f.inverse() * field.different().inverse()
        return cls(cycle, IdealCharacter.from_trace(I0))

    def act_by_element(self, alpha) -> "WClass":
        """Action of the class of (alpha): {xi restricted, alpha I}."""
        J = self.I.scale(alpha)
        return WClass(self.cycle, self.xi.restrict(J))


def w_class_orbit(ray: RayClassData):
    """The set W_m as {c . w_m^0 : c in Cl_m}, keyed by ray class."""
    w0 = WClass.base_class(ray.cycle)
    return {c: w0.act_by_element(ray.rep_element[c])
            for c in ray.group.elements()}
