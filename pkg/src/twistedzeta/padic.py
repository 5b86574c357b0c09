"""Bounded-precision p-adic arithmetic for scoped local fields.

A :class:`LocalField` is a compositum ``H_f(pi)`` of

* an unramified part ``H_f = Q_p(g)`` where ``g`` is a primitive ``m``-th
  root of unity for the smallest ``m`` with ``ord_m(p) = f`` and
  ``phi(m) = f`` (a deterministic, reproducible model), and
* a totally ramified part: either the cyclotomic level ``r`` (uniformiser
  ``pi = zeta - 1`` with ``zeta`` a primitive ``p^(r+1)``-th root of unity,
  Eisenstein minimal polynomial ``Phi_{p^(r+1)}(1+X)``), or a tame
  quadratic with ``pi^2 = c*p``.

Elements carry exact rational coordinates on the basis
``g^a * pi^b`` together with an absolute precision: ``prec = P`` means the
element is known modulo the ideal of valuation ``>= P`` (``None`` = exact).
Valuations are exact whenever they are below the precision: on this basis
the map ``(a, b) -> v_p(c_{a,b}) + b/e`` attains its minimum at a unique
``b``-slope, so no hidden cancellation can occur.

Only odd ``p`` is supported.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .exact import CycNum, FinAbGroup, GroupRingElem, _cyclo_coeffs, _phi, _solve_exact

#: default working precision (number of p-adic digits)
M_DEFAULT = 40


class PrecisionError(ArithmeticError):
    """A result cannot be produced at the requested precision."""


class UnsupportedLocalError(ValueError):
    """Local-field data outside the supported tower shapes."""


def _vp(x: Fraction, p: int) -> Fraction:
    """Exact p-adic valuation of a rational (math.inf for 0)."""
    if x == 0:
        return math.inf
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _red_frac(x: Fraction, p: int, n: int) -> Fraction:
    """A small rational congruent to ``x`` modulo ``p^n`` (p-unit denominator)."""
    if x == 0:
        return Fraction(0)
    w = _vp(x, p)
    if w >= n:
        return Fraction(0)
    # x = p^w * a/b with a, b prime to p
    pw = Fraction(p) ** int(w)
    u = x / pw
    m = p ** int(n - w)
    r = (u.numerator % m) * pow(u.denominator % m, -1, m) % m
    return pw * r


def _min_gen_order(p: int, f: int) -> int:
    """Smallest m with ord_m(p) = f and phi(m) = f (deterministic H_f model)."""
    if f == 1:
        return 1
    m = 2
    while m < 4 * f * f + 100:
        m += 1
        if math.gcd(m, p) != 1 or _phi(m) != f:
            continue
        # multiplicative order of p mod m
        o, t = 1, p % m
        while t != 1:
            t = t * p % m
            o += 1
        if o == f:
            return m
    raise UnsupportedLocalError(
        f"no root-of-unity model for the unramified extension of degree {f} of Q_{p}"
    )


class LocalField:
    """Compositum of an unramified and a totally ramified piece over Q_p."""

    def __init__(self, p: int, f: int = 1, ram=None, gen_order: int | None = None):
        if p == 2 or not _is_prime(p):
            raise UnsupportedLocalError("p must be an odd prime")
        self.p = p
        self.f = f
        self.ram = ram
        self.gen_order = gen_order if gen_order is not None else _min_gen_order(p, f)
        if _phi(self.gen_order) != f:
            raise UnsupportedLocalError("generator order does not match degree")
        if ram is None:
            self.e = 1
            self._ram_tail = None
        elif ram[0] == "cyc":
            r = ram[1]
            self.e = (p - 1) * p**r
            # minimal polynomial of pi = zeta - 1: Phi_{p^(r+1)}(1+X)
            coeffs = [0] * (self.e + 1)
            for i in range(p):
                # add (1+X)^(i*p^r)
                n = i * p**r
                row = 1
                for k in range(n + 1):
                    coeffs[k] += row
                    row = row * (n - k) // (k + 1)
            assert coeffs[-1] == 1
            self._ram_tail = tuple(-c for c in coeffs[: self.e])
        elif ram[0] == "tame":
            c = ram[1]
            if c % p == 0:
                raise UnsupportedLocalError("tame unit part must be prime to p")
            self.e = 2
            self._ram_tail = (c * p, 0)
        else:
            raise UnsupportedLocalError(f"unknown ramified part {ram!r}")
        self.degree = self.e * self.f
        self._unram_poly = _cyclo_coeffs(self.gen_order) if f > 1 else None
        self._inv_cache: dict = {}

    # -- constructors --------------------------------------------------

    @classmethod
    def qp(cls, p: int) -> "LocalField":
        return cls(p)

    @classmethod
    def unramified(cls, p: int, f: int) -> "LocalField":
        return cls(p, f=f)

    @classmethod
    def cyclotomic(cls, p: int, r: int, f: int = 1) -> "LocalField":
        return cls(p, f=f, ram=("cyc", r))

    @classmethod
    def tame_quadratic(cls, p: int, c: int, f: int = 1) -> "LocalField":
        return cls(p, f=f, ram=("tame", c))

    def compositum(self, other: "LocalField") -> "LocalField":
        """Smallest supported field containing both (disjoint parts only)."""
        if self.p != other.p:
            raise UnsupportedLocalError("different primes")
        f = max(self.f, other.f)
        if min(self.f, other.f) > 1 and self.f != other.f:
            raise UnsupportedLocalError("incompatible unramified parts")
        ram = self.ram or other.ram
        if self.ram and other.ram and self.ram != other.ram:
            raise UnsupportedLocalError("incompatible ramified parts")
        return LocalField(self.p, f=f, ram=ram)

    @property
    def cyc_level(self) -> int | None:
        return self.ram[1] if self.ram and self.ram[0] == "cyc" else None

    # -- element constructors -----------------------------------------

    def zero(self) -> "PadicElem":
        return self.from_blocks([[Fraction(0)] * self.f for _ in range(self.e)])

    def one(self) -> "PadicElem":
        return self.rational(1)

    def rational(self, x, prec=None) -> "PadicElem":
        blocks = [[Fraction(0)] * self.f for _ in range(self.e)]
        blocks[0][0] = Fraction(x)
        return self.from_blocks(blocks, prec)

    def from_blocks(self, blocks, prec=None) -> "PadicElem":
        return PadicElem(self, tuple(tuple(Fraction(c) for c in row) for row in blocks), prec)

    def gen(self) -> "PadicElem":
        """The root of unity generating the unramified part."""
        if self.f == 1:
            return self.one()
        blocks = [[Fraction(0)] * self.f for _ in range(self.e)]
        blocks[0][1] = Fraction(1)
        return self.from_blocks(blocks)

    def pi(self) -> "PadicElem":
        """The uniformiser of the ramified part (p itself if unramified)."""
        if self.e == 1:
            return self.rational(self.p)
        blocks = [[Fraction(0)] * self.f for _ in range(self.e)]
        blocks[1][0] = Fraction(1)
        return self.from_blocks(blocks)

    def zeta_p(self) -> "PadicElem":
        """A primitive p^(r+1)-th root of unity (cyclotomic ramified part)."""
        if self.cyc_level is None:
            raise UnsupportedLocalError("no cyclotomic ramified part")
        return self.one() + self.pi()

    # -- Galois data ---------------------------------------------------

    def ram_group(self):
        """Exponents parametrising the Galois group of the ramified part."""
        if self.ram is None:
            return (1,)
        if self.ram[0] == "tame":
            return (1, -1)
        q = self.p ** (self.ram[1] + 1)
        return tuple(a for a in range(1, q) if a % self.p)

    def galois_group_size(self) -> int:
        return self.degree

    def __eq__(self, other):
        return (
            isinstance(other, LocalField)
            and (self.p, self.f, self.ram, self.gen_order)
            == (other.p, other.f, other.ram, other.gen_order)
        )

    def __hash__(self):
        return hash((self.p, self.f, self.ram, self.gen_order))

    def __repr__(self):
        parts = [f"Q_{self.p}"]
        if self.f > 1:
            parts.append(f"H_{self.f}(mu_{self.gen_order})")
        if self.ram:
            parts.append("zeta_%d" % self.p ** (self.ram[1] + 1) if self.ram[0] == "cyc"
                         else "sqrt(%d*%d)" % (self.ram[1], self.p))
        return "LocalField(" + ", ".join(parts) + ")"

    def to_json(self) -> dict:
        data = {"p": self.p, "f": self.f, "gen_order": self.gen_order}
        if self.ram:
            data["ram"] = list(self.ram)
        return data


def _least_primitive_root(p: int) -> int:
    for g in range(2, p):
        o, t = 1, g
        while t != 1:
            t = t * g % p
            o += 1
        if o == p - 1:
            return g
    raise ValueError("no primitive root")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class PadicElem:
    """Element of a :class:`LocalField` with exact coordinates and precision."""

    __slots__ = ("field", "blocks", "prec")

    def __init__(self, field: LocalField, blocks, prec=None):
        self.field = field
        self.blocks = blocks
        self.prec = None if prec is None else Fraction(prec)

    # -- bookkeeping ---------------------------------------------------

    def with_prec(self, prec) -> "PadicElem":
        new = self.prec if prec is None else (
            Fraction(prec) if self.prec is None else min(self.prec, Fraction(prec))
        )
        return PadicElem(self.field, self.blocks, new)._reduced()

    def _reduced(self) -> "PadicElem":
        if self.prec is None:
            return self
        F, p, e = self.field, self.field.p, self.field.e
        blocks = []
        for b, row in enumerate(self.blocks):
            n = math.ceil(self.prec - Fraction(b, e))
            blocks.append(tuple(_red_frac(c, p, n) for c in row))
        return PadicElem(F, tuple(blocks), self.prec)

    def valuation(self) -> Fraction:
        """Exact valuation, normalised so v(p) = 1 (math.inf for 0)."""
        e = self.field.e
        v = math.inf
        for b, row in enumerate(self.blocks):
            for c in row:
                if c:
                    v = min(v, _vp(c, self.field.p) + Fraction(b, e))
        if self.prec is not None and v >= self.prec:
            raise PrecisionError(
                f"valuation >= precision {self.prec}; element indistinguishable from 0"
            )
        return v

    def is_zero(self) -> bool:
        """Zero within precision (exactly zero when prec is None)."""
        if all(c == 0 for row in self.blocks for c in row):
            return True
        if self.prec is None:
            return False
        try:
            self.valuation()
        except PrecisionError:
            return True
        return False

    def rational_value(self) -> Fraction:
        """The value as a rational; requires all non-scalar coordinates to vanish."""
        for b, row in enumerate(self.blocks):
            for a, c in enumerate(row):
                if (a, b) != (0, 0) and c:
                    if self.prec is None or _vp(c, self.field.p) + Fraction(b, self.field.e) < self.prec:
                        raise ValueError("element is not rational within precision")
        return self.blocks[0][0]

    def is_rational(self) -> bool:
        try:
            self.rational_value()
            return True
        except ValueError:
            return False

    def flat(self):
        return [c for row in self.blocks for c in row]

    # -- ring operations ----------------------------------------------

    def _check(self, other):
        if self.field != other.field:
            raise ValueError("elements of different local fields")

    @staticmethod
    def _min_prec(a, b):
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.rational(other)
        self._check(other)
        blocks = tuple(
            tuple(x + y for x, y in zip(r1, r2))
            for r1, r2 in zip(self.blocks, other.blocks)
        )
        return PadicElem(self.field, blocks, self._min_prec(self.prec, other.prec))._reduced()

    __radd__ = __add__

    def __neg__(self):
        return PadicElem(
            self.field, tuple(tuple(-c for c in row) for row in self.blocks), self.prec
        )

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.rational(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            prec = self.prec if q == 0 or self.prec is None else self.prec + _vp(q, self.field.p)
            return PadicElem(
                self.field,
                tuple(tuple(c * q for c in row) for row in self.blocks),
                prec,
            )._reduced()
        self._check(other)
        F = self.field
        e, f = F.e, F.f
        # bivariate product
        wide = f if f == 1 else 2 * f - 1
        tmp = [[Fraction(0)] * wide for _ in range(2 * e - 1)]
        for b1, r1 in enumerate(self.blocks):
            for b2, r2 in enumerate(other.blocks):
                row = tmp[b1 + b2]
                for a1, c1 in enumerate(r1):
                    if not c1:
                        continue
                    for a2, c2 in enumerate(r2):
                        if c2:
                            row[a1 + a2] += c1 * c2
        # reduce generator degree via the cyclotomic minimal polynomial
        if f > 1:
            poly = F._unram_poly
            for row in tmp:
                for k in range(wide - 1, f - 1, -1):
                    c = row[k]
                    if c:
                        row[k] = Fraction(0)
                        for i in range(f):
                            row[k - f + i] -= c * poly[i]
        # reduce pi degree via the Eisenstein tail
        for bb in range(2 * e - 2, e - 1, -1):
            row = tmp[bb]
            if any(row):
                tail = F._ram_tail
                for i in range(e):
                    t = tail[i]
                    if t:
                        dst = tmp[bb - e + i]
                        for a in range(f):
                            dst[a] += t * row[a]
                tmp[bb] = [Fraction(0)] * wide
        blocks = tuple(tuple(row[:f]) for row in tmp[:e])
        prec = None
        if self.prec is not None or other.prec is not None:
            cands = []
            if other.prec is not None:
                cands.append(other.prec + (_safe_val(self) or 0))
            if self.prec is not None:
                cands.append(self.prec + (_safe_val(other) or 0))
            prec = min(cands)
        return PadicElem(self.field, blocks, prec)._reduced()

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def inverse(self) -> "PadicElem":
        F = self.field
        basis = _field_basis(F)
        columns = [(self * b).flat() for b in basis]
        target = F.one().flat()
        sol = _solve_exact(columns, target)
        if sol is None:
            raise ZeroDivisionError("element is not invertible")
        blocks = [[Fraction(0)] * F.f for _ in range(F.e)]
        for i, b in enumerate(basis):
            if sol[i]:
                for bb, row in enumerate(b.blocks):
                    for aa, c in enumerate(row):
                        blocks[bb][aa] += sol[i] * c
        prec = None
        if self.prec is not None:
            prec = self.prec - 2 * self.valuation()
        return PadicElem(F, tuple(tuple(r) for r in blocks), prec)._reduced()

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return self * other.inverse()

    # -- comparisons ---------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.rational(other)
        if not isinstance(other, PadicElem) or self.field != other.field:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("PadicElem compares up to precision and is unhashable")

    def __repr__(self):
        prec = "exact" if self.prec is None else f"prec={self.prec}"
        return f"PadicElem({self.blocks!r}, {prec})"

    def to_json(self) -> dict:
        data = {
            "tower": self.field.to_json(),
            "blocks": [[str(c) for c in row] for row in self.blocks],
        }
        if self.prec is not None:
            data["prec"] = str(self.prec)
        return data


def _safe_val(x: PadicElem):
    """Valuation, or None (treated as 0 contribution) when x is ~0."""
    try:
        v = x.valuation()
        return None if v is math.inf else v
    except PrecisionError:
        return x.prec


def _field_basis(F: LocalField):
    basis = []
    for b in range(F.e):
        for a in range(F.f):
            blocks = [[Fraction(0)] * F.f for _ in range(F.e)]
            blocks[b][a] = Fraction(1)
            basis.append(F.from_blocks(blocks))
    return basis


# -- Galois action -----------------------------------------------------


def galois(x: PadicElem, frob: int = 0, a: int = 1) -> PadicElem:
    """Apply Frobenius^frob on the unramified part and the ramified
    automorphism of exponent ``a`` (``zeta -> zeta^a`` resp. ``pi -> -pi``)."""
    F = x.field
    # Frobenius on generator blocks
    if F.f > 1 and frob % F.f:
        q = pow(F.p, frob % F.f, F.gen_order)
        from .exact import _power_rows

        rows = _power_rows(F.gen_order)
        blocks = []
        for row in x.blocks:
            new = [Fraction(0)] * F.f
            for aa, c in enumerate(row):
                if c:
                    prow = rows[aa * q % F.gen_order]
                    for i, r in enumerate(prow):
                        if r:
                            new[i] += c * r
            blocks.append(tuple(new))
        x = PadicElem(F, tuple(blocks), x.prec)
    if F.ram is None or a == 1:
        return x
    if F.ram[0] == "tame":
        if a % 2 == 0 or a not in (1, -1):
            raise ValueError("tame quadratic automorphism exponent must be +-1")
        blocks = tuple(
            tuple(-c for c in row) if b % 2 else row for b, row in enumerate(x.blocks)
        )
        return PadicElem(F, blocks, x.prec)
    # cyclotomic: pi -> (1+pi)^a - 1, substituted by Horner
    q = F.p ** (F.ram[1] + 1)
    a %= q
    if math.gcd(a, F.p) != 1:
        raise ValueError("cyclotomic automorphism exponent must be prime to p")
    s = (F.one() + F.pi()) ** a - F.one()
    result = F.zero()
    for b in range(F.e - 1, -1, -1):
        row = x.blocks[b]
        const = F.from_blocks([row] + [[Fraction(0)] * F.f] * (F.e - 1), x.prec)
        result = result * s + const
    return result


def lift_to(big: LocalField, x: PadicElem) -> PadicElem:
    """Lift an element of a subfield (compatible unramified and/or
    ramified parts) into a compositum by block padding."""
    if x.field == big:
        return x
    F = x.field
    if F.f > 1 and (big.f != F.f or big.gen_order != F.gen_order):
        raise UnsupportedLocalError("incompatible unramified parts")
    if F.ram is not None and big.ram != F.ram:
        raise UnsupportedLocalError("incompatible ramified parts")
    blocks = [[Fraction(0)] * big.f for _ in range(big.e)]
    for b, row in enumerate(x.blocks):
        for a, c in enumerate(row):
            blocks[b][a] = c
    return big.from_blocks(blocks, x.prec)


def frobenius(x: PadicElem) -> PadicElem:
    return galois(x, frob=1)


def all_galois(F: LocalField):
    """All (frob, a) pairs for Gal(F/Q_p)."""
    return [(t, a) for t in range(F.f) for a in F.ram_group()]


def local_trace(x: PadicElem) -> PadicElem:
    """Trace to Q_p (sum over the abelian Galois group)."""
    total = x.field.zero()
    for t, a in all_galois(x.field):
        total = total + galois(x, t, a)
    return total


def local_norm(x: PadicElem) -> PadicElem:
    total = x.field.one()
    for t, a in all_galois(x.field):
        total = total * galois(x, t, a)
    return total


def matrix_trace(x: PadicElem) -> Fraction:
    """Trace via the multiplication matrix on the power basis (cross-check)."""
    basis = _field_basis(x.field)
    total = Fraction(0)
    for i, b in enumerate(basis):
        total += (x * b).flat()[i]
    return total


# -- analytic functions ------------------------------------------------


def teichmuller(u: PadicElem, M: int = M_DEFAULT) -> PadicElem:
    """The root of unity congruent to the unit ``u`` modulo the maximal ideal."""
    if u.valuation() != 0:
        raise ValueError("Teichmuller lift requires a unit")
    N = M if u.prec is None else min(Fraction(M), u.prec)
    q = u.field.p ** u.field.f
    x = u.with_prec(N)
    for _ in range(math.ceil(N) + 2):
        x = x**q
    return x


def plog(u: PadicElem, M: int = M_DEFAULT) -> PadicElem:
    """Iwasawa logarithm of a unit (roots of unity are killed exactly)."""
    F = u.field
    if u.valuation() != 0:
        raise ValueError("plog requires a unit")
    N = Fraction(M) if u.prec is None else min(Fraction(M), u.prec)
    z = (u - F.one()).with_prec(N)
    if not z.is_zero() and z.valuation() <= 0:
        u = u * teichmuller(u, math.ceil(N) + 1).inverse()
        z = (u - F.one()).with_prec(N)
    if z.is_zero():
        return F.zero().with_prec(N)
    vz = z.valuation()
    if vz <= 0:
        raise PrecisionError("could not reduce to a principal unit")
    p = F.p
    total = F.zero().with_prec(N)
    zk = F.one().with_prec(N)
    k = 0
    loss = 0
    while True:
        k += 1
        # k*vz - log_p(k) lower-bounds every later term once it is increasing
        if k >= 2 / vz and k * vz - math.log(k, p) >= N + 1:
            break
        zk = zk * z
        term = zk * Fraction((-1) ** (k + 1), k)
        # error propagation through d(z^k/k) = z^(k-1) dz
        loss = max(loss, Fraction(int(_vp(Fraction(k), p))) - (k - 1) * vz)
        total = total + term
    return total.with_prec(N - loss)


def pexp(x: PadicElem, M: int = M_DEFAULT) -> PadicElem:
    """p-adic exponential; requires v(x) > 1/(p-1)."""
    F = x.field
    p = F.p
    if x.is_zero():
        return F.one().with_prec(x.prec)
    vx = x.valuation()
    if vx <= Fraction(1, p - 1):
        raise PrecisionError(f"pexp requires valuation > 1/(p-1); got {vx}")
    N = Fraction(M) if x.prec is None else min(Fraction(M), x.prec)
    total = F.one().with_prec(N)
    term = F.one().with_prec(N)
    k = 0
    loss = Fraction(0)
    while True:
        k += 1
        # v(x^k / k!) = k*vx - (k - s_p(k))/(p-1) >= k*(vx - 1/(p-1))
        if k * (vx - Fraction(1, p - 1)) >= N + 1:
            break
        term = term * x / k
        # error propagation through d(x^k/k!) = x^(k-1)/(k-1)! dx, which
        # has non-negative valuation shift since v(x) > 1/(p-1)
        fact_v = Fraction((k - 1) - _digit_sum(k - 1, p), p - 1)
        loss = max(loss, fact_v - (k - 1) * vx)
        total = total + term
    return total.with_prec(N - loss)


def _digit_sum(k: int, p: int) -> int:
    s = 0
    while k:
        s += k % p
        k //= p
    return s


def rational_sqrt(p: int, c, M: int = M_DEFAULT) -> Fraction:
    """The Hensel square root of ``c`` in Z_p whose residue mod p is the
    least positive one; exact rational representative mod p^M."""
    c = Fraction(c)
    if _vp(c, p) != 0:
        raise UnsupportedLocalError("square root of a non-unit")
    c0 = c.numerator * pow(c.denominator, -1, p) % p
    roots = [r for r in range(1, p) if r * r % p == c0]
    if not roots:
        raise UnsupportedLocalError(f"{c} is not a square modulo {p}")
    x = Fraction(min(roots))
    known = 1
    while known < M:
        x = (x + c / x) / 2
        known = min(2 * known, M + 4)
        x = _red_frac(x, p, known)
    return _red_frac(x, p, M)


# -- embeddings --------------------------------------------------------


def embed_k(field, x, i: int, p: int, M: int = M_DEFAULT) -> Fraction:
    """The embedding j.tau_i of the base field into Q_p (split p only).

    For a real quadratic field the two Hensel roots of ``X^2 - D`` are
    labelled so that i=1 receives the root with the least positive residue
    mod p.  The valuation criterion v_p(j.tau_i(x)) = ord_{p_i}(x) then
    fixes which prime above p each embedding induces.
    """
    if p == 2:
        raise UnsupportedLocalError("p must be odd")
    if field.kind == "Q":
        return Fraction(x)
    D = field.D
    if D % p == 0:
        raise UnsupportedLocalError(f"{p} is ramified in the base field")
    if not any(r * r % p == D % p for r in range(1, p)):
        raise UnsupportedLocalError(f"{p} is inert in the base field")
    r = rational_sqrt(p, D, M)
    if i == 2:
        r = -r
    elif i != 1:
        raise ValueError("embedding index must be 1 or 2")
    co = field.coords(x)
    return _red_frac(co[0] + co[1] * r, p, M) if len(co) > 1 else Fraction(co[0])


def _prime_factors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _unit_group_generator(F: LocalField, M: int = M_DEFAULT) -> PadicElem:
    """A Teichmuller generator omega of mu_{p^f - 1}, deterministic and
    normalised so that omega^((p^f - 1) / gen_order) equals F.gen()."""
    cache = getattr(F, "_mu_gen_cache", None)
    if cache is None:
        cache = F._mu_gen_cache = {}
    if M in cache:
        return cache[M]
    p, q, m = F.p, F.p**F.f - 1, F.gen_order
    ells = _prime_factors(q)
    t = None
    if F.f == 1:
        t = teichmuller(F.rational(_least_primitive_root(p)), M)
    else:
        for c in range(4 * q):
            cand = F.gen() + F.rational(c)
            try:
                tc = teichmuller(cand, M)
            except (ValueError, ZeroDivisionError, PrecisionError):
                continue
            if all(not (tc ** (q // ell) - F.one()).is_zero() for ell in ells):
                t = tc
                break
        if t is None:
            raise UnsupportedLocalError("no generator of the Teichmuller group found")
        if m > 1:
            u = t ** (q // m)
            s = next(
                s
                for s in range(1, m)
                if math.gcd(s, m) == 1 and (u**s - F.gen()).is_zero()
            )
            k = s
            while math.gcd(k, q) != 1:
                k += m
            t = t**k
    cache[M] = t
    return t


def j_image(F: LocalField, x: CycNum, M: int = M_DEFAULT) -> PadicElem:
    """Image of an exact cyclotomic number under the embedding j.

    Roots of unity of p-power order land in the cyclotomic ramified part
    (``zeta_{p^(r+1)} -> 1 + pi``); roots of prime-to-p order land on the
    unramified generator.  Mixed orders are out of scope.
    """
    n = x.cond
    p = F.p
    a = 0
    while n % p == 0:
        n //= p
        a += 1
    if a and n > 1:
        raise UnsupportedLocalError(
            f"cyclotomic order {x.cond} mixes p-power and prime-to-p parts"
        )
    if a:
        r = F.cyc_level
        if r is None or p ** (r + 1) % x.cond:
            raise UnsupportedLocalError(f"no {x.cond}-th roots of unity in {F!r}")
        z = (F.one() + F.pi()) ** (p ** (r + 1) // x.cond)
    elif n > 1:
        q = p**F.f - 1
        if F.gen_order % n == 0:
            z = F.gen() ** (F.gen_order // n)
        elif q % n == 0:
            # the cached generator of mu_{p^f - 1} is aligned so that its
            # (q / gen_order)-th power is F.gen(); all prime-to-p roots
            # produced here are therefore mutually compatible
            z = _unit_group_generator(F, M) ** (q // n)
        else:
            raise UnsupportedLocalError(f"no {n}-th roots of unity in {F!r}")
    else:
        return F.rational(x.as_rational())
    result = F.zero()
    for c in reversed(x.coeffs):
        result = result * z + F.rational(c)
    return result


# -- group rings over local fields ------------------------------------


class PGroupRing:
    """Element of the group ring of a finite abelian group with
    :class:`PadicElem` coefficients."""

    def __init__(self, group: FinAbGroup, field: LocalField, coeffs=None):
        self.group = group
        self.field = field
        self.coeffs = dict(coeffs or {})

    @classmethod
    def zero(cls, group, field):
        return cls(group, field)

    @classmethod
    def from_exact(cls, x: GroupRingElem, field: LocalField, M: int = M_DEFAULT):
        """Embed an exact cyclotomic group-ring element via j."""
        return cls(
            x.group, field, {g: j_image(field, c, M) for g, c in x.coeffs.items()}
        )

    def coeff(self, g) -> PadicElem:
        return self.coeffs.get(tuple(g), self.field.zero())

    def support(self):
        return [g for g, c in self.coeffs.items() if not c.is_zero()]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs.values())

    def __add__(self, other):
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out[g] + c if g in out else c
        return PGroupRing(self.group, self.field, out)

    def __neg__(self):
        return PGroupRing(self.group, self.field, {g: -c for g, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PadicElem)):
            return PGroupRing(
                self.group, self.field, {g: c * other for g, c in self.coeffs.items()}
            )
        out: dict = {}
        for g1, c1 in self.coeffs.items():
            for g2, c2 in other.coeffs.items():
                g = self.group.op(g1, g2)
                t = c1 * c2
                out[g] = out[g] + t if g in out else t
        return PGroupRing(self.group, self.field, out)

    __rmul__ = __mul__

    def involution(self) -> "PGroupRing":
        return PGroupRing(
            self.group, self.field, {self.group.inv(g): c for g, c in self.coeffs.items()}
        )

    def galois_coeffs(self, frob: int = 0, a: int = 1) -> "PGroupRing":
        return PGroupRing(
            self.group, self.field, {g: galois(c, frob, a) for g, c in self.coeffs.items()}
        )

    def min_valuation(self):
        vals = []
        for c in self.coeffs.values():
            v = _safe_val(c)
            if v is not None:
                vals.append(v)
        return min(vals) if vals else math.inf

    def min_prec(self):
        precs = [c.prec for c in self.coeffs.values() if c.prec is not None]
        return min(precs) if precs else None

    def rational_coeffs(self) -> dict:
        """Coefficients as rationals; raises unless all are in Q_p."""
        return {g: c.rational_value() for g, c in self.coeffs.items()}

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self.coeffs.values())

    def __eq__(self, other):
        if not isinstance(other, PGroupRing):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self):
        return f"PGroupRing({self.coeffs!r})"

    def to_json(self) -> dict:
        return {
            "tower": self.field.to_json(),
            "coeffs": {self.group.label(g): c.to_json() for g, c in self.coeffs.items()},
        }
