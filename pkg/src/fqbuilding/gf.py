"""Arithmetic in the finite field GF(p^n), q = p^n <= 64 by default.

Elements are plain ints in [0, q).  An int encodes the coefficient vector of
a residue class in F_p[x]/(m(x)) base p: e = c_0 + c_1*p + ... + c_{n-1}*p^(n-1)
represents c_0 + c_1*x + ... .  For prime q this is ordinary arithmetic mod p.
All binary operations are table lookups, so a GF object is cheap to use and
safe to share between threads (tables are immutable after construction).
"""

from __future__ import annotations

# Irreducible (Conway) polynomials for the non-prime q <= 64, keyed by (p, n).
# Coefficient tuples are low degree first and include the leading 1.
IRREDUCIBLE = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 4, 1),
    (7, 2): (3, 6, 1),
}

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61)


def factor_prime_power(q: int) -> tuple[int, int]:
    """Write q = p^n with p prime, or raise ValueError."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    for p in _SMALL_PRIMES:
        if q % p == 0:
            n = 0
            m = q
            while m % p == 0:
                m //= p
                n += 1
            if m != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, n
    # q prime and larger than the table
    for d in range(2, int(q ** 0.5) + 1):
        if q % d == 0:
            raise ValueError(f"{q} is not a prime power")
    return q, 1


def _fp_poly_mulmod(a, b, mod, p):
    # a, b, mod: coefficient tuples over F_p, mod monic; returns a*b mod (mod, p)
    n = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for i, mi in enumerate(mod[:-1]):
                prod[k - n + i] = (prod[k - n + i] - c * mi) % p
    while len(prod) > n:
        prod.pop()
    while len(prod) < n:
        prod.append(0)
    return tuple(prod)


def _fp_poly_powmod(a, e, mod, p):
    result = (1,) + (0,) * (len(mod) - 2)
    base = a
    while e:
        if e & 1:
            result = _fp_poly_mulmod(result, base, mod, p)
        base = _fp_poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _fp_poly_gcd_is_one(a, b, p):
    # gcd over F_p[x]; a, b as lists low-first
    a = list(a)
    b = list(b)

    def deg(c):
        d = len(c) - 1
        while d >= 0 and c[d] == 0:
            d -= 1
        return d

    while True:
        da, db = deg(a), deg(b)
        if db < 0:
            return da == 0
        if da < db:
            a, b = b, a
            continue
        # kill leading term of a
        inv = pow(b[db], p - 2, p)
        c = a[da] * inv % p
        for i in range(db + 1):
            a[da - db + i] = (a[da - db + i] - c * b[i]) % p


def is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Rabin irreducibility test for a monic polynomial over F_p."""
    n = len(modulus) - 1
    if n < 1 or modulus[-1] != 1:
        return False
    if n == 1:
        return True
    x = (0, 1) + (0,) * (n - 2)
    # x^(p^n) == x mod m
    if _fp_poly_powmod(x, p ** n, modulus, p) != x:
        return False
    primes = {f for f in range(2, n + 1) if n % f == 0 and all(f % g for g in range(2, f))}
    for ell in primes:
        h = _fp_poly_powmod(x, p ** (n // ell), modulus, p)
        diff = list(h)
        diff[1] = (diff[1] - 1) % p
        if not _fp_poly_gcd_is_one(diff, list(modulus), p):
            return False
    return True


class GF:
    """The field GF(p^n) with full add/mul/inv lookup tables."""

    def __init__(self, p: int, n: int = 1, modulus: tuple[int, ...] | None = None):
        if n < 1:
            raise ValueError("n must be >= 1")
        if p < 2 or any(p % d == 0 for d in range(2, p)):
            raise ValueError(f"{p} is not prime")
        q = p ** n
        if modulus is None:
            if n == 1:
                modulus = (0, 1)  # x, unused
            else:
                try:
                    modulus = IRREDUCIBLE[(p, n)]
                except KeyError:
                    raise ValueError(
                        f"no built-in modulus for q = {q}; pass one explicitly"
                    ) from None
        else:
            modulus = tuple(c % p for c in modulus)
        if n > 1 and not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is not irreducible over F_{p}")
        if len(modulus) != n + 1:
            raise ValueError("modulus degree must equal n")
        self.p = p
        self.n = n
        self.q = q
        self.modulus = modulus
        self._build_tables()

    def _build_tables(self):
        p, n, q = self.p, self.n, self.q
        if n == 1:
            self._add = [[(a + b) % p for b in range(p)] for a in range(p)]
            self._mul = [[(a * b) % p for b in range(p)] for a in range(p)]
            self._neg = [(-a) % p for a in range(p)]
            self._inv = [0] + [pow(a, p - 2, p) for a in range(1, p)]
            return
        coeffs = [self.coeffs(e) for e in range(q)]
        self._add = [
            [self.from_coeffs(tuple((x + y) % p for x, y in zip(coeffs[a], coeffs[b])))
             for b in range(q)]
            for a in range(q)
        ]
        self._neg = [self.from_coeffs(tuple((-x) % p for x in coeffs[a])) for a in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            for b in range(a, q):
                c = self.from_coeffs(_fp_poly_mulmod(coeffs[a], coeffs[b], self.modulus, p))
                mul[a][b] = c
                mul[b][a] = c
        self._mul = mul
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    inv[a] = b
                    break
            else:
                raise AssertionError("modulus not irreducible: missing inverse")
        self._inv = inv

    # --- element encoding -------------------------------------------------

    def coeffs(self, a: int) -> tuple[int, ...]:
        """Base-p digits of a, i.e. the F_p coefficient vector, length n."""
        out = []
        for _ in range(self.n):
            out.append(a % self.p)
            a //= self.p
        return tuple(out)

    def from_coeffs(self, cs) -> int:
        a = 0
        for c in reversed(tuple(cs)):
            a = a * self.p + (c % self.p)
        return a

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)

    # --- arithmetic -------------------------------------------------------

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def neg(self, a):
        return self._neg[a]

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF")
        return self._inv[a]

    def div(self, a, b):
        return self._mul[a][self.inv(b)]

    def pow(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        r = 1
        while e:
            if e & 1:
                r = self._mul[r][a]
            a = self._mul[a][a]
            e >>= 1
        return r

    def __eq__(self, other):
        return (
            isinstance(other, GF)
            and self.p == other.p
            and self.n == other.n
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.n, self.modulus))

    def __repr__(self):
        if self.n == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.n})"


_CACHE: dict[tuple, GF] = {}


def gf(q: int, modulus: tuple[int, ...] | None = None) -> GF:
    """Return a cached GF(q) instance; q may be any prime power with q <= 64
    covered by the built-in modulus table (larger prime q also works)."""
    p, n = factor_prime_power(q)
    key = (p, n, tuple(modulus) if modulus is not None else None)
    if key not in _CACHE:
        _CACHE[key] = GF(p, n, modulus)
    return _CACHE[key]
