"""Exact arithmetic kernel: cyclotomic numbers, finite abelian groups,
characters and group-ring elements.

Everything here is exact.  Roots of unity are symbolic vectors on the
power basis of Q(mu_N); there is no floating point anywhere.  All values
canonicalize to the smallest cyclotomic field containing them, so
equality is literal coefficient equality.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

from sympy import Poly, Symbol, cyclotomic_poly

_X = Symbol("x")


def _phi(n: int) -> int:
    result = n
    for p in _prime_factors(n):
        result -= result // p
    return result


@lru_cache(maxsize=None)
def _prime_factors(n: int) -> tuple[int, ...]:
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
    return tuple(out)


def _canon_cond(n: int) -> int:
    """Canonical conductor: Q(mu_2m)=Q(mu_m) for odd m, so never 2 mod 4."""
    if n % 4 == 2:
        return n // 2
    return n


@lru_cache(maxsize=None)
def _cyclo_coeffs(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, ascending degree."""
    poly = Poly(cyclotomic_poly(n, _X), _X)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


@lru_cache(maxsize=None)
def _power_rows(n: int) -> tuple[tuple[int, ...], ...]:
    """Row k = coordinates of x^k mod Phi_n, for k up to max(n-1, 2*deg-2).

    Coefficients of Phi_n are integers and the reduction is monic, so the
    rows are integral.
    """
    deg = _phi(n)
    top = max(n - 1, 2 * deg - 2)
    rows = []
    for k in range(deg):
        row = [0] * deg
        row[k] = 1
        rows.append(row)
    coeffs = _cyclo_coeffs(n)
    for k in range(deg, top + 1):
        prev = rows[k - 1]
        # multiply by x, then reduce the overflow x^deg term
        row = [0] + prev[: deg - 1]
        lead = prev[deg - 1]
        if lead:
            for j in range(deg):
                row[j] -= lead * coeffs[j]
        rows.append(row)
    return tuple(tuple(r) for r in rows)


def _solve_exact(columns, target):
    """Solve sum_j x_j * columns[j] = target exactly over Q.

    Returns the coefficient list, or None if the system is inconsistent.
    Columns are vectors of equal length; plain Gaussian elimination.
    """
    ncols = len(columns)
    nrows = len(target)
    aug = [[Fraction(columns[j][i]) for j in range(ncols)] + [Fraction(target[i])]
           for i in range(nrows)]
    pivots = []
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, nrows):
            if aug[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = 1 / aug[row][col]
        aug[row] = [v * inv for v in aug[row]]
        for r in range(nrows):
            if r != row and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    # consistency: rows past the pivot rows must be all-zero
    for r in range(row, nrows):
        if aug[r][ncols] != 0:
            return None
    sol = [Fraction(0)] * ncols
    for r, col in enumerate(pivots):
        sol[col] = aug[r][ncols]
    return sol


class CycNum:
    """Exact element of Q(mu_N) on the power basis 1, z, ..., z^(phi(N)-1).

    Instances are immutable and always stored with the minimal conductor,
    so == is canonical-form equality.
    """

    __slots__ = ("cond", "coeffs")

    def __init__(self, cond: int, coeffs):
        # raw constructor -- assumes already canonical; use the classmethods
        object.__setattr__(self, "cond", cond)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, *args):
        raise AttributeError("CycNum is immutable")

    # -- construction -------------------------------------------------

    @classmethod
    def rational(cls, q) -> "CycNum":
        return cls(1, (Fraction(q),))

    @classmethod
    def zero(cls) -> "CycNum":
        return cls.rational(0)

    @classmethod
    def one(cls) -> "CycNum":
        return cls.rational(1)

    @classmethod
    def zeta(cls, n: int, e: int = 1) -> "CycNum":
        """The root of unity zeta_n^e."""
        if n <= 0:
            raise ValueError("conductor must be positive")
        e %= n
        g = math.gcd(e, n) if e else n
        n, e = n // g, e // g
        if n == 1:
            return cls.rational(1)
        if n == 2:
            return cls.rational(-1)
        if n % 4 == 2:
            # zeta_2m = -zeta_m^((m+1)/2) for odd m
            m = n // 2
            return -cls.zeta(m, (e * ((m + 1) // 2)) % m)
        row = _power_rows(n)[e]
        return cls._make(n, [Fraction(c) for c in row])

    @classmethod
    def e(cls, q) -> "CycNum":
        """e(q) = exp(2*pi*i*q) for rational q, as an exact root of unity."""
        q = Fraction(q)
        return cls.zeta(q.denominator, q.numerator % q.denominator)

    @classmethod
    def _make(cls, cond: int, coeffs) -> "CycNum":
        """Build from raw basis coordinates, then shrink the conductor."""
        cond = _canon_cond(cond)
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) != _phi(cond):
            raise ValueError("coefficient vector has wrong length")
        cond, coeffs = cls._shrink(cond, coeffs)
        return cls(cond, coeffs)

    # -- conductor reduction ------------------------------------------

    @staticmethod
    def _galois_raw(cond, coeffs, t):
        """Apply zeta -> zeta^t on raw coordinates (t coprime to cond)."""
        rows = _power_rows(cond)
        deg = _phi(cond)
        out = [Fraction(0)] * deg
        for k, c in enumerate(coeffs):
            if c == 0:
                continue
            row = rows[(t * k) % cond]
            for j in range(deg):
                if row[j]:
                    out[j] += c * row[j]
        return out

    @staticmethod
    def _lift_row(cond_small, cond_big, k):
        """Coordinates of zeta_{cond_small}^k inside Q(mu_{cond_big})."""
        step = cond_big // cond_small
        return _power_rows(cond_big)[(k * step) % cond_big]

    @classmethod
    def _shrink(cls, cond, coeffs):
        """Reduce to the minimal cyclotomic subfield containing the value."""
        while cond > 1:
            if all(c == 0 for c in coeffs[1:]):
                return 1, [coeffs[0]]
            shrunk = False
            for q in _prime_factors(cond):
                small = _canon_cond(cond // q)
                if small == cond:
                    continue
                # value lies in Q(mu_small) iff fixed by ker((Z/cond)* -> (Z/small)*)
                fixed = True
                for t in range(1 + small, cond, small):
                    if math.gcd(t, cond) != 1:
                        continue
                    if cls._galois_raw(cond, coeffs, t) != coeffs:
                        fixed = False
                        break
                if not fixed:
                    continue
                deg_small = _phi(small)
                basis = [cls._lift_row(small, cond, j) for j in range(deg_small)]
                sol = _solve_exact(basis, coeffs)
                if sol is None:  # pragma: no cover - fixed value always descends
                    continue
                cond, coeffs = small, sol
                shrunk = True
                break
            if not shrunk:
                break
        if cond == 1:
            return 1, [coeffs[0]]
        return cond, coeffs

    # -- basic queries ------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return self.cond == 1 and self.coeffs[0] == 0

    def is_rational(self) -> bool:
        return self.cond == 1

    def as_rational(self) -> Fraction:
        if self.cond != 1:
            raise ValueError(f"not rational (conductor {self.cond})")
        return self.coeffs[0]

    # -- arithmetic ---------------------------------------------------

    @classmethod
    def _coerce(cls, other):
        if isinstance(other, CycNum):
            return other
        if isinstance(other, (int, Fraction)):
            return cls.rational(other)
        return None

    def _common(self, other):
        """Lift both operands into Q(mu_lcm)."""
        n = _canon_cond(self.cond * other.cond // math.gcd(self.cond, other.cond))
        return n, self._lift_to(n), other._lift_to(n)

    def _lift_to(self, n):
        if n == self.cond:
            return list(self.coeffs)
        deg = _phi(n)
        out = [Fraction(0)] * deg
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            row = self._lift_row(self.cond, n, k)
            for j in range(deg):
                if row[j]:
                    out[j] += c * row[j]
        return out

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        n, a, b = self._common(other)
        return CycNum._make(n, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.cond, tuple(-c for c in self.coeffs))

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
        if self.cond == 1:
            q = self.coeffs[0]
            if q == 0:
                return CycNum.zero()
            return CycNum._make(other.cond, [q * c for c in other.coeffs])
        if other.cond == 1:
            return other * self
        n, a, b = self._common(other)
        deg = _phi(n)
        conv = [Fraction(0)] * (2 * deg - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y:
                    conv[i + j] += x * y
        rows = _power_rows(n)
        out = conv[:deg]
        for k in range(deg, 2 * deg - 1):
            c = conv[k]
            if c:
                row = rows[k]
                for j in range(deg):
                    if row[j]:
                        out[j] += c * row[j]
        return CycNum._make(n, out)

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        if self.is_zero():
            raise ZeroDivisionError("division by zero CycNum")
        if self.cond == 1:
            return CycNum.rational(1 / self.coeffs[0])
        n = self.cond
        deg = _phi(n)
        rows = _power_rows(n)
        columns = []
        for j in range(deg):
            # column = self * zeta^j on the power basis
            col = [Fraction(0)] * deg
            for k, c in enumerate(self.coeffs):
                if c == 0:
                    continue
                row = rows[k + j] if k + j < len(rows) else None
                if row is None:  # pragma: no cover
                    raise RuntimeError("power row table too short")
                for i in range(deg):
                    if row[i]:
                        col[i] += c * row[i]
            columns.append(col)
        target = [Fraction(1)] + [Fraction(0)] * (deg - 1)
        sol = _solve_exact(columns, target)
        if sol is None:
            raise ZeroDivisionError("element is a zero divisor?")  # pragma: no cover
        return CycNum._make(n, sol)

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
        result = CycNum.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- Galois -------------------------------------------------------

    def galois(self, t: int) -> "CycNum":
        """The automorphism zeta -> zeta^t (t coprime to the conductor)."""
        if math.gcd(t, self.cond) != 1:
            raise ValueError(f"{t} not coprime to conductor {self.cond}")
        if self.cond == 1:
            return self
        return CycNum._make(self.cond, self._galois_raw(self.cond, self.coeffs, t % self.cond))

    def conj(self) -> "CycNum":
        """Complex conjugation zeta -> zeta^-1."""
        if self.cond == 1:
            return self
        return self.galois(self.cond - 1)

    # -- comparisons / hashing ----------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.cond == other.cond and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.cond, self.coeffs))

    def __repr__(self):
        if self.cond == 1:
            return f"CycNum({self.coeffs[0]})"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                terms.append(f"{c}*z{self.cond}^{k}" if k > 1 else f"{c}*z{self.cond}")
        return "CycNum(" + (" + ".join(terms) or "0") + ")"

    # -- serialization ------------------------------------------------

    def to_json(self) -> dict:
        return {"conductor": self.cond, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "CycNum":
        coeffs = [Fraction(s) for s in data["coeffs"]]
        return cls._make(data["conductor"], coeffs)


# ---------------------------------------------------------------------------
# finite abelian groups


class FinAbGroup:
    """Finite abelian group in invariant-factor form.

    Elements are exponent tuples (one coordinate per generator, taken mod
    the generator order).  ``labels`` optionally maps elements to Artin
    descriptions like "s_2" for display.
    """

    def __init__(self, orders, labels=None):
        orders = tuple(int(o) for o in orders)
        if any(o <= 0 for o in orders):
            raise ValueError("generator orders must be positive")
        self.orders = orders
        self.labels = dict(labels) if labels else {}

    @property
    def order(self) -> int:
        return math.prod(self.orders) if self.orders else 1

    @property
    def exponent(self) -> int:
        return math.lcm(*self.orders) if self.orders else 1

    @property
    def identity(self):
        return (0,) * len(self.orders)

    def elements(self):
        return itertools.product(*(range(o) for o in self.orders))

    def op(self, a, b):
        return tuple((x + y) % o for x, y, o in zip(a, b, self.orders))

    def inv(self, a):
        return tuple((-x) % o for x, o in zip(a, self.orders))

    def power(self, a, n: int):
        return tuple((x * n) % o for x, o in zip(a, self.orders))

    def element_order(self, a) -> int:
        n = 1
        for x, o in zip(a, self.orders):
            if x:
                n = math.lcm(n, o // math.gcd(x, o))
        return n

    def label(self, a) -> str:
        return self.labels.get(a, str(a))

    def __eq__(self, other):
        return isinstance(other, FinAbGroup) and self.orders == other.orders

    def __repr__(self):
        return f"FinAbGroup{self.orders}"


class CharacterValue:
    """Character of a FinAbGroup, given by exponents on each generator.

    chi(g) = prod_i zeta_{o_i}^{k_i * g_i}.
    """

    def __init__(self, group: FinAbGroup, exps):
        self.group = group
        self.exps = tuple(k % o for k, o in zip(exps, group.orders))

    def value(self, g) -> CycNum:
        out = CycNum.one()
        for k, x, o in zip(self.exps, g, self.group.orders):
            if k and x:
                out = out * CycNum.zeta(o, k * x)
        return out

    @property
    def order(self) -> int:
        n = 1
        for k, o in zip(self.exps, self.group.orders):
            if k:
                n = math.lcm(n, o // math.gcd(k, o))
        return n

    def is_trivial(self) -> bool:
        return all(k == 0 for k in self.exps)

    def inverse(self) -> "CharacterValue":
        return CharacterValue(self.group, tuple(-k for k in self.exps))

    def __mul__(self, other):
        return CharacterValue(self.group, tuple(a + b for a, b in zip(self.exps, other.exps)))

    def __eq__(self, other):
        return (isinstance(other, CharacterValue)
                and self.group == other.group and self.exps == other.exps)

    def __hash__(self):
        return hash((self.group.orders, self.exps))

    @staticmethod
    def all_characters(group: FinAbGroup):
        for exps in itertools.product(*(range(o) for o in group.orders)):
            yield CharacterValue(group, exps)


class GroupRingElem:
    """Finitely supported map FinAbGroup -> CycNum with ring structure."""

    def __init__(self, group: FinAbGroup, coeffs=None):
        self.group = group
        self.coeffs = {}
        if coeffs:
            for g, c in coeffs.items():
                c = c if isinstance(c, CycNum) else CycNum.rational(c)
                if not c.is_zero():
                    self.coeffs[tuple(g)] = c

    @classmethod
    def zero(cls, group):
        return cls(group)

    @classmethod
    def one(cls, group):
        return cls(group, {group.identity: CycNum.one()})

    @classmethod
    def of(cls, group, elem, coeff=1):
        return cls(group, {tuple(elem): coeff})

    def coeff(self, g) -> CycNum:
        return self.coeffs.get(tuple(g), CycNum.zero())

    def support(self):
        return set(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        if not isinstance(other, GroupRingElem):
            return NotImplemented
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out[g] + c if g in out else c
        return GroupRingElem(self.group, out)

    def __neg__(self):
        return GroupRingElem(self.group, {g: -c for g, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            return GroupRingElem(self.group, {g: c * other for g, c in self.coeffs.items()})
        if not isinstance(other, GroupRingElem):
            return NotImplemented
        out: dict = {}
        for g, c in self.coeffs.items():
            for h, d in other.coeffs.items():
                k = self.group.op(g, h)
                prod = c * d
                out[k] = out[k] + prod if k in out else prod
        return GroupRingElem(self.group, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            return self * other
        return NotImplemented

    def involution(self) -> "GroupRingElem":
        """(sum a_h h)* = sum a_h h^-1."""
        return GroupRingElem(self.group, {self.group.inv(g): c for g, c in self.coeffs.items()})

    def galois_coeffs(self, t: int) -> "GroupRingElem":
        """Apply zeta -> zeta^t to every coefficient."""
        return GroupRingElem(self.group, {g: c.galois(t) for g, c in self.coeffs.items()})

    def char_apply(self, chi: CharacterValue) -> CycNum:
        out = CycNum.zero()
        for g, c in self.coeffs.items():
            out = out + chi.value(g) * c
        return out

    def __eq__(self, other):
        return (isinstance(other, GroupRingElem)
                and self.group == other.group and self.coeffs == other.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "GroupRingElem(0)"
        parts = [f"({c!r})*{self.group.label(g)}" for g, c in sorted(self.coeffs.items())]
        return "GroupRingElem(" + " + ".join(parts) + ")"

    def to_json(self) -> dict:
        return {
            "orders": list(self.group.orders),
            "terms": [{"elem": list(g), "coeff": c.to_json()}
                      for g, c in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json(cls, data: dict, group: FinAbGroup | None = None) -> "GroupRingElem":
        if group is None:
            group = FinAbGroup(data["orders"])
        elif tuple(group.orders) != tuple(data["orders"]):
            raise ValueError("group mismatch in JSON payload")
        coeffs = {tuple(t["elem"]): CycNum.from_json(t["coeff"]) for t in data["terms"]}
        return cls(group, coeffs)


def idempotent(chi: CharacterValue) -> GroupRingElem:
    """e_chi = |G|^-1 sum_g chi(g) g^-1."""
    group = chi.group
    inv_n = Fraction(1, group.order)
    coeffs = {group.inv(g): chi.value(g) * inv_n for g in group.elements()}
    return GroupRingElem(group, coeffs)


def minus_idempotent(group: FinAbGroup, cvs) -> GroupRingElem:
    """prod_v (1 - c_v)/2 for elements c_v of order dividing 2."""
    out = GroupRingElem.one(group)
    half = Fraction(1, 2)
    for cv in cvs:
        cv = tuple(cv)
        if group.op(cv, cv) != group.identity:
            raise ValueError("c_v must have order dividing 2")
        factor = (GroupRingElem.one(group) - GroupRingElem.of(group, cv)) * half
        out = out * factor
    return out


class GroupHom:
    """Homomorphism between FinAbGroups, by images of standard generators."""

    def __init__(self, src: FinAbGroup, dst: FinAbGroup, images):
        self.src = src
        self.dst = dst
        self.images = [tuple(im) for im in images]
        if len(self.images) != len(src.orders):
            raise ValueError("need one image per source generator")
        for im, o in zip(self.images, src.orders):
            if dst.power(im, o) != dst.identity:
                raise ValueError("generator image order does not divide source order")

    def apply(self, g):
        out = self.dst.identity
        for x, im in zip(g, self.images):
            if x:
                out = self.dst.op(out, self.dst.power(im, x))
        return out

    def image_subgroup(self):
        seen = {self.dst.identity}
        frontier = [self.dst.identity]
        while frontier:
            g = frontier.pop()
            for im in self.images:
                h = self.dst.op(g, im)
                if h not in seen:
                    seen.add(h)
                    frontier.append(h)
        return seen

    def is_surjective(self) -> bool:
        return len(self.image_subgroup()) == self.dst.order

    def kernel_size(self) -> int:
        if not self.is_surjective():
            raise ValueError("not surjective")
        return self.src.order // self.dst.order

    def fibers(self) -> dict:
        out: dict = {}
        for g in self.src.elements():
            out.setdefault(self.apply(g), []).append(g)
        return out

    def project(self, x: GroupRingElem) -> GroupRingElem:
        """pi: push coefficients forward along the surjection."""
        if x.group != self.src:
            raise ValueError("element not over the source group")
        out: dict = {}
        for g, c in x.coeffs.items():
            k = self.apply(g)
            out[k] = out[k] + c if k in out else c
        return GroupRingElem(self.dst, out)

    def corestrict(self, x: GroupRingElem) -> GroupRingElem:
        """nu-tilde: send each group element to the sum of its preimages."""
        if x.group != self.dst:
            raise ValueError("element not over the target group")
        if not self.is_surjective():
            raise ValueError("corestriction requires a surjection")
        fibers = self.fibers()
        out: dict = {}
        for g, c in x.coeffs.items():
            for pre in fibers[g]:
                out[pre] = out[pre] + c if pre in out else c
        return GroupRingElem(self.src, out)


# ---------------------------------------------------------------------------
# Smith normal form / abelian quotient presentation


def smith_normal_form(mat):
    """Return (D, U, V) with U*mat*V = D diagonal, U and V unimodular."""
    A = [list(row) for row in mat]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, q):  # row_i += q * row_j
        A[i] = [a + q * b for a, b in zip(A[i], A[j])]
        U[i] = [a + q * b for a, b in zip(U[i], U[j])]

    def add_col(i, j, q):  # col_i += q * col_j
        for row in A:
            row[i] += q * row[j]
        for row in V:
            row[i] += q * row[j]

    def neg_row(i):
        A[i] = [-a for a in A[i]]
        U[i] = [-a for a in U[i]]

    def diagonalize():
        t = 0
        while t < min(m, n):
            piv = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] != 0:
                        piv = (i, j)
                        break
                if piv:
                    break
            if piv is None:
                break
            swap_rows(t, piv[0])
            swap_cols(t, piv[1])
            while True:
                done = True
                for i in range(t + 1, m):
                    if A[i][t] != 0:
                        q = A[i][t] // A[t][t]
                        add_row(i, t, -q)
                        if A[i][t] != 0:
                            swap_rows(t, i)
                            done = False
                for j in range(t + 1, n):
                    if A[t][j] != 0:
                        q = A[t][j] // A[t][t]
                        add_col(j, t, -q)
                        if A[t][j] != 0:
                            swap_cols(t, j)
                            done = False
                if done:
                    break
            if A[t][t] < 0:
                neg_row(t)
            t += 1

    diagonalize()
    # enforce the divisibility chain d1 | d2 | ...; after each column add
    # the matrix is re-diagonalized (gcd strictly divides, so this halts)
    while True:
        bad = None
        for i in range(min(m, n) - 1):
            a, b = A[i][i], A[i + 1][i + 1]
            if a and b and b % a != 0:
                bad = i
                break
        if bad is None:
            break
        add_col(bad, bad + 1, 1)
        diagonalize()
    return A, U, V


def finite_quotient(ngens: int, relations):
    """Present Z^ngens / <relations> as a FinAbGroup.

    Returns (group, images) where images[i] is the class of the i-th
    standard generator.  Raises if the quotient is infinite.
    """
    rels = [list(r) for r in relations]
    if not rels:
        if ngens == 0:
            return FinAbGroup(()), []
        raise ValueError("quotient is infinite (no relations)")
    D, _U, V = smith_normal_form(rels)
    m, n = len(D), ngens
    diag = [D[i][i] if i < m else 0 for i in range(n)]
    if any(d == 0 for d in diag):
        raise ValueError("quotient is infinite")
    kept = [i for i, d in enumerate(diag) if d > 1]
    group = FinAbGroup(tuple(diag[i] for i in kept))
    images = []
    for i in range(ngens):
        # class of e_i in the new coordinates y = e_i * V
        y = V[i]
        images.append(tuple(y[j] % diag[j] for j in kept))
    return group, images
