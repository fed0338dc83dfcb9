"""Exact arithmetic in A = F_q[t] and K = F_q(t) with the valuation at infinity.

Conventions fixed once for the whole package:

  * v(f/g) = deg(g) - deg(f), v(0) = +infinity (math.inf sentinel);
  * the valuation ring R = {x in K : v(x) >= 0} is the local ring at the
    degree place, with uniformizer pi = 1/t;
  * "Laurent" data always means the expansion of x in powers of pi.

Poly coefficients are field elements (ints, see gf.py), stored low degree
first with no trailing zeros; the zero polynomial has coeffs () and degree
-infinity.  Both Poly and Rat are immutable and hashable.
"""

from __future__ import annotations

from math import inf

from .gf import GF


class Poly:
    __slots__ = ("K", "coeffs")

    def __init__(self, K: GF, coeffs=()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    # degree of 0 is -inf so that deg(fg) = deg f + deg g holds throughout
    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else -inf

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def lead(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __add__(self, other: "Poly") -> "Poly":
        K = self.K
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = K.add(out[i], c)
        return Poly(K, out)

    def __neg__(self) -> "Poly":
        K = self.K
        return Poly(K, [K.neg(c) for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        K = self.K
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(K)
        out = [0] * (len(a) + len(b) - 1)
        mul = K._mul
        add = K._add
        for i, ai in enumerate(a):
            if ai:
                mrow = mul[ai]
                for j, bj in enumerate(b):
                    if bj:
                        out[i + j] = add[out[i + j]][mrow[bj]]
        return Poly(K, out)

    def scale(self, c: int) -> "Poly":
        K = self.K
        return Poly(K, [K.mul(c, x) for x in self.coeffs])

    def shift(self, k: int) -> "Poly":
        """Multiply by t^k, k >= 0."""
        if self.is_zero():
            return self
        return Poly(self.K, (0,) * k + self.coeffs)

    def __divmod__(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        K = self.K
        rem = list(self.coeffs)
        db = len(other.coeffs) - 1
        lead_inv = K.inv(other.coeffs[-1])
        quo = [0] * max(0, len(rem) - db)
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if c:
                f = K.mul(c, lead_inv)
                quo[k - db] = f
                for i, bc in enumerate(other.coeffs):
                    rem[k - db + i] = K.sub(rem[k - db + i], K.mul(f, bc))
        return Poly(K, quo), Poly(K, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(self.K.inv(self.lead()))

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def divides(self, other: "Poly") -> bool:
        if self.is_zero():
            return other.is_zero()
        return (other % self).is_zero()

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs and self.K == other.K

    def __hash__(self):
        return hash(("Poly", self.coeffs))

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append("t" if c == 1 else f"{c}*t")
            else:
                parts.append(f"t^{i}" if c == 1 else f"{c}*t^{i}")
        return "+".join(reversed(parts))


def poly(K: GF, coeffs) -> Poly:
    return Poly(K, coeffs)


def poly_const(K: GF, c: int) -> Poly:
    return Poly(K, (c,))


def poly_t(K: GF) -> Poly:
    return Poly(K, (0, 1))


def poly_one(K: GF) -> Poly:
    return Poly(K, (1,))


class Rat:
    """Reduced fraction num/den in F_q(t); den monic and coprime to num."""

    __slots__ = ("K", "num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, _reduced: bool = False):
        K = num.K
        if den is None:
            den = poly_one(K)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            if num.is_zero():
                den = poly_one(K)
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num = num // g
                    den = den // g
                lc = den.lead()
                if lc != 1:
                    inv = K.inv(lc)
                    num = num.scale(inv)
                    den = den.scale(inv)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("Rat is immutable")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    @property
    def valuation(self):
        """v at infinity: deg(den) - deg(num); +inf for 0.  Valid for any
        fraction representation, reduced or not."""
        if self.num.is_zero():
            return inf
        return self.den.degree - self.num.degree

    def __add__(self, other: "Rat") -> "Rat":
        return Rat(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "Rat":
        return Rat(-self.num, self.den, _reduced=True)

    def __sub__(self, other: "Rat") -> "Rat":
        return Rat(self.num * other.den - other.num * self.den, self.den * other.den)

    def __mul__(self, other: "Rat") -> "Rat":
        return Rat(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "Rat") -> "Rat":
        if other.is_zero():
            raise ZeroDivisionError("division by zero in K")
        return Rat(self.num * other.den, self.den * other.num)

    def inv(self) -> "Rat":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in K")
        return Rat(self.den, self.num)

    def is_integral(self) -> bool:
        """Membership in R = {v >= 0}."""
        return self.valuation >= 0

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def __eq__(self, other):
        return (
            isinstance(other, Rat)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash(("Rat", self.num.coeffs, self.den.coeffs))

    def __repr__(self):
        if self.den.is_one():
            return repr(self.num)
        return f"({self.num})/({self.den})"


def rat(num: Poly, den: Poly | None = None) -> Rat:
    return Rat(num, den)


def rat_const(K: GF, c: int) -> Rat:
    return Rat(poly_const(K, c))


def rat_zero(K: GF) -> Rat:
    return Rat(Poly(K))


def rat_one(K: GF) -> Rat:
    return Rat(poly_one(K))


def rat_t(K: GF) -> Rat:
    return Rat(poly_t(K))


def rat_pi(K: GF, k: int = 1) -> Rat:
    """pi^k = t^(-k) as an element of K (any k in Z)."""
    if k >= 0:
        return Rat(poly_one(K), poly_t(K).shift(k - 1) if k else None) if k else rat_one(K)
    return Rat(poly_one(K).shift(-k))


def v_inf(x) -> int | float:
    """Valuation at infinity of a Rat or Poly (deg den - deg num; +inf at 0)."""
    if isinstance(x, Poly):
        return -x.degree if not x.is_zero() else inf
    return x.valuation


def laurent_coeffs(x: Rat, hi: int) -> tuple[int, list[int]]:
    """Coefficients of the pi-adic expansion of x for exponents in [v(x), hi).

    Returns (lo, coeffs) with lo = v(x); coeffs[k] is the coefficient of
    pi^(lo+k).  For x = 0 or v(x) >= hi returns (hi, [])."""
    if x.is_zero():
        return hi, []
    v = x.valuation
    if v >= hi:
        return hi, []
    K = x.K
    fc, gc = x.num.coeffs, x.den.coeffs
    fstar = list(reversed(fc))  # power series in pi with fstar[0] != 0
    gstar = list(reversed(gc))
    g0_inv = K.inv(gstar[0])
    count = hi - v
    out = []
    for k in range(count):
        acc = fstar[k] if k < len(fstar) else 0
        for i in range(1, min(k, len(gstar) - 1) + 1):
            acc = K.sub(acc, K.mul(gstar[i], out[k - i]))
        out.append(K.mul(acc, g0_inv))
    return v, out


def laurent_coeff(x: Rat, e: int) -> int:
    """Single coefficient of pi^e in the expansion of x."""
    lo, cs = laurent_coeffs(x, e + 1)
    idx = e - lo
    if idx < 0 or idx >= len(cs):
        return 0
    return cs[idx]


def rat_from_laurent(K: GF, lo: int, coeffs) -> Rat:
    """Finite Laurent polynomial sum coeffs[k] * pi^(lo+k) as an element of K."""
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    while cs and cs[0] == 0:
        cs.pop(0)
        lo += 1
    if not cs:
        return rat_zero(K)
    hi = lo + len(cs) - 1  # largest pi-exponent present
    # sum c_k pi^(lo+k) = (sum c_k t^(hi-lo-k)) / t^hi
    num = Poly(K, list(reversed(cs)))
    if hi >= 0:
        return Rat(num, poly_one(K).shift(hi))
    return Rat(num.shift(-hi))


def rat_truncate(x: Rat, hi: int) -> Rat:
    """Canonical representative of x modulo pi^hi * R: the finite Laurent
    polynomial carrying the exponents of x below hi."""
    lo, cs = laurent_coeffs(x, hi)
    return rat_from_laurent(x.K, lo, cs)
