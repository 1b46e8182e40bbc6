"""Exact sparse multivariate polynomials over rationals, with trust degrees.

Polynomials live in Q[x_0 .. x_{dim-1}] and are stored as sparse maps from
exponent vectors to exact rational coefficients.  No floating point anywhere.

A value may carry a finite *trust degree* t: every stored monomial of total
degree <= t is the true coefficient of the represented object, and degrees
above t are unknown and silently discarded (quotient-ring semantics).  Exact
polynomials carry trust None, meaning every degree is correct.  Rules:

- products and sums take the minimum trust of the operands,
- each partial derivative lowers a finite trust by exactly one,
- series inverse / square root at a basepoint produce trust min(order, trust).

Exponent vectors are packed into a single integer key with the total degree
in the high bits, so that key addition is monomial multiplication and the
degree is one shift away.  This is an internal detail; the public surface
speaks exponent tuples.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterator, Sequence

try:
    from gmpy2 import mpq as _mpq

    _HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _mpq = Fraction
    _HAVE_GMPY2 = False


def rat(num, den=1):
    """Exact rational scalar (lowest terms, positive denominator)."""
    return _mpq(num, den)


RAT_ZERO = rat(0)
RAT_ONE = rat(1)

_SCALAR_TYPES = (int, type(RAT_ZERO), Fraction)


class PolynomialError(ArithmeticError):
    """Base class for failures of the polynomial kernel."""


class DimensionMismatchError(PolynomialError):
    pass


class TrustUnderflowError(PolynomialError):
    pass


class NonUnitError(PolynomialError):
    pass


class IrrationalRootError(PolynomialError):
    pass


class NonPositiveRadicandError(PolynomialError):
    pass


# --- packed exponent keys ---------------------------------------------------
# Per-variable exponents occupy 8 bits each; the total degree sits above them.
# All arithmetic keeps exponents far below 2^8, so key addition never carries
# between fields.

_EXP_BITS = 8
_EXP_MASK = (1 << _EXP_BITS) - 1


def _pack(exponents: Sequence[int]) -> int:
    key = 0
    deg = 0
    for i, e in enumerate(exponents):
        if e < 0:
            raise ValueError("negative exponent")
        key |= e << (_EXP_BITS * i)
        deg += e
    return key | (deg << (_EXP_BITS * len(exponents)))


def _unpack(key: int, dim: int) -> tuple:
    return tuple((key >> (_EXP_BITS * i)) & _EXP_MASK for i in range(dim))


def _min_trust(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class TruncatedPolynomial:
    """Sparse polynomial over Q with a trust degree (None = exact)."""

    __slots__ = ("dim", "trust", "_c")

    def __init__(self, dim: int, coeffs=None, trust=None):
        if dim < 1:
            raise ValueError("dimension must be at least 1")
        if trust is not None and trust < 0:
            raise TrustUnderflowError("trust underflow: negative trust degree")
        self.dim = dim
        self.trust = trust
        shift = _EXP_BITS * dim
        c = {}
        if coeffs:
            for key, val in coeffs.items():
                if not val:
                    continue
                if trust is not None and (key >> shift) > trust:
                    continue
                c[key] = val
        self._c = c

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, dim: int, trust=None) -> "TruncatedPolynomial":
        return cls(dim, None, trust)

    @classmethod
    def const(cls, dim: int, value, trust=None) -> "TruncatedPolynomial":
        v = rat(value) if not isinstance(value, _SCALAR_TYPES) else value
        return cls(dim, {0: rat(v)} if v else None, trust)

    @classmethod
    def variable(cls, dim: int, index: int, trust=None) -> "TruncatedPolynomial":
        if not 0 <= index < dim:
            raise ValueError("variable index out of range")
        key = _pack(tuple(1 if i == index else 0 for i in range(dim)))
        return cls(dim, {key: RAT_ONE}, trust)

    @classmethod
    def from_terms(cls, dim: int, terms, trust=None) -> "TruncatedPolynomial":
        """terms: mapping or iterable of (exponent tuple, coefficient)."""
        items = terms.items() if hasattr(terms, "items") else terms
        c = {}
        for exps, val in items:
            if len(exps) != dim:
                raise DimensionMismatchError(
                    "dimension mismatch: exponent tuple length != dim")
            key = _pack(exps)
            c[key] = c.get(key, RAT_ZERO) + rat(val)
        return cls(dim, c, trust)

    # -- inspection ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._c

    def num_terms(self) -> int:
        return len(self._c)

    def degree(self) -> int:
        """Maximal stored total degree, -1 for the zero polynomial."""
        if not self._c:
            return -1
        shift = _EXP_BITS * self.dim
        return max(k >> shift for k in self._c)

    def constant_term(self):
        return self._c.get(0, RAT_ZERO)

    def terms(self) -> Iterator[tuple]:
        for key in sorted(self._c):
            yield _unpack(key, self.dim), self._c[key]

    def coefficient(self, exponents: Sequence[int]):
        return self._c.get(_pack(exponents), RAT_ZERO)

    def evaluate(self, point: Sequence):
        """Exact evaluation at a rational point (trust is ignored)."""
        if len(point) != self.dim:
            raise DimensionMismatchError("dimension mismatch: point length != dim")
        vals = [rat(p) for p in point]
        total = RAT_ZERO
        for key, coeff in self._c.items():
            term = coeff
            for i in range(self.dim):
                e = (key >> (_EXP_BITS * i)) & _EXP_MASK
                if e:
                    term = term * vals[i] ** e
            total += term
        return total

    # -- ring operations -----------------------------------------------------

    def _check_dim(self, other: "TruncatedPolynomial"):
        if self.dim != other.dim:
            raise DimensionMismatchError(
                "dimension mismatch: %d vs %d" % (self.dim, other.dim))

    def __add__(self, other):
        if isinstance(other, _SCALAR_TYPES):
            other = TruncatedPolynomial.const(self.dim, other)
        if not isinstance(other, TruncatedPolynomial):
            return NotImplemented
        self._check_dim(other)
        trust = _min_trust(self.trust, other.trust)
        c = dict(self._c)
        for key, val in other._c.items():
            s = c.get(key)
            s = val if s is None else s + val
            if s:
                c[key] = s
            elif key in c:
                del c[key]
        return TruncatedPolynomial(self.dim, c, trust)

    __radd__ = __add__

    def __neg__(self):
        out = TruncatedPolynomial(self.dim, None, self.trust)
        out._c = {k: -v for k, v in self._c.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, _SCALAR_TYPES):
            other = TruncatedPolynomial.const(self.dim, other)
        if not isinstance(other, TruncatedPolynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _SCALAR_TYPES):
            if not other:
                return TruncatedPolynomial(self.dim, None, self.trust)
            q = rat(other)
            out = TruncatedPolynomial(self.dim, None, self.trust)
            out._c = {k: v * q for k, v in self._c.items()}
            return out
        if not isinstance(other, TruncatedPolynomial):
            return NotImplemented
        self._check_dim(other)
        trust = _min_trust(self.trust, other.trust)
        shift = _EXP_BITS * self.dim
        acc: dict = {}
        if trust is None:
            for ka, ca in self._c.items():
                for kb, cb in other._c.items():
                    k = ka + kb
                    prev = acc.get(k)
                    acc[k] = ca * cb if prev is None else prev + ca * cb
        else:
            # Bucket the right factor by degree so that pairs beyond the
            # trust horizon are never formed.
            buckets: dict = {}
            for kb, cb in other._c.items():
                buckets.setdefault(kb >> shift, []).append((kb, cb))
            for ka, ca in self._c.items():
                budget = trust - (ka >> shift)
                if budget < 0:
                    continue
                for deg, items in buckets.items():
                    if deg > budget:
                        continue
                    for kb, cb in items:
                        k = ka + kb
                        prev = acc.get(k)
                        acc[k] = ca * cb if prev is None else prev + ca * cb
        out = TruncatedPolynomial(self.dim, None, trust)
        out._c = {k: v for k, v in acc.items() if v}
        return out

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative power; use series_inverse")
        result = TruncatedPolynomial.const(self.dim, 1, self.trust)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncatedPolynomial):
            return NotImplemented
        return (self.dim == other.dim and self.trust == other.trust
                and self._c == other._c)

    __hash__ = None

    def __repr__(self):
        if self.is_zero():
            body = "0"
        else:
            parts = []
            for exps, coeff in self.terms():
                mono = "*".join(
                    "x%d" % i if e == 1 else "x%d^%d" % (i, e)
                    for i, e in enumerate(exps) if e)
                parts.append(str(coeff) if not mono else "%s*%s" % (coeff, mono))
            body = " + ".join(parts)
        tag = "" if self.trust is None else ", trust=%d" % self.trust
        return "Poly(%s%s)" % (body, tag)

    # -- calculus and series -------------------------------------------------

    def derivative(self, mu: int) -> "TruncatedPolynomial":
        if not 0 <= mu < self.dim:
            raise DimensionMismatchError("dimension mismatch: no coordinate %d" % mu)
        if self.trust is not None:
            if self.trust == 0:
                raise TrustUnderflowError(
                    "trust underflow: derivative of a trust-0 element")
            trust = self.trust - 1
        else:
            trust = None
        step = 1 << (_EXP_BITS * mu)
        drop = 1 << (_EXP_BITS * self.dim)
        c = {}
        for key, coeff in self._c.items():
            e = (key >> (_EXP_BITS * mu)) & _EXP_MASK
            if e:
                c[key - step - drop] = coeff * e
        out = TruncatedPolynomial(self.dim, None, trust)
        out._c = c
        return out

    def truncate(self, new_trust: int) -> "TruncatedPolynomial":
        trust = _min_trust(self.trust, new_trust)
        return TruncatedPolynomial(self.dim, self._c, trust)

    def _reduced_tail(self, inv_c0, trust):
        """self/c0 - 1, truncated; used by the series expansions."""
        tail = self * inv_c0 - 1
        return tail.truncate(trust) if trust is not None else tail

    def series_inverse(self, order: int) -> "TruncatedPolynomial":
        """Multiplicative inverse as a series at the basepoint, to `order`."""
        if order < 0:
            raise ValueError("negative series order")
        c0 = self.constant_term()
        if not c0:
            raise NonUnitError("non-unit: zero constant term has no series inverse")
        trust = _min_trust(self.trust, order)
        inv_c0 = RAT_ONE / c0
        v = self._reduced_tail(inv_c0, trust)
        result = TruncatedPolynomial.const(self.dim, 1, trust)
        term = result
        for _ in range(trust):
            term = term * (-v)
            if term.is_zero():
                break
            result = result + term
        return result * inv_c0

    def series_sqrt(self, order: int) -> "TruncatedPolynomial":
        """Square root with positive constant term, as a series to `order`."""
        if order < 0:
            raise ValueError("negative series order")
        c0 = self.constant_term()
        if c0 <= 0:
            raise NonPositiveRadicandError(
                "non-positive radicand: constant term %s" % c0)
        s0 = _exact_sqrt(c0)
        trust = _min_trust(self.trust, order)
        v = self._reduced_tail(RAT_ONE / c0, trust)
        result = TruncatedPolynomial.const(self.dim, 1, trust)
        term = result
        binom = RAT_ONE
        for k in range(1, trust + 1):
            binom = binom * rat(3 - 2 * k, 2 * k)  # (1/2 - (k-1)) / k
            term = term * v
            if term.is_zero():
                break
            result = result + term * binom
        return result * s0


def _exact_sqrt(q):
    """Exact rational square root, or raise IrrationalRootError."""
    num = int(q.numerator)
    den = int(q.denominator)
    rn = math.isqrt(num)
    rd = math.isqrt(den)
    if rn * rn != num or rd * rd != den:
        raise IrrationalRootError(
            "irrational root: %s is not the square of a rational" % q)
    return rat(rn, rd)


# --- module-level operation aliases ----------------------------------------

def poly_mul(a: TruncatedPolynomial, b: TruncatedPolynomial) -> TruncatedPolynomial:
    return a * b


def poly_derivative(a: TruncatedPolynomial, mu: int) -> TruncatedPolynomial:
    return a.derivative(mu)


def poly_series_inverse(a: TruncatedPolynomial, order: int) -> TruncatedPolynomial:
    return a.series_inverse(order)


def poly_series_sqrt(a: TruncatedPolynomial, order: int) -> TruncatedPolynomial:
    return a.series_sqrt(order)


def _degree_iter(dim: int, degree: int):
    """All exponent tuples with total degree <= degree, in a fixed order."""
    def rec(prefix, remaining, slots):
        if slots == 1:
            for e in range(remaining + 1):
                yield prefix + (e,)
            return
        for e in range(remaining + 1):
            yield from rec(prefix + (e,), remaining - e, slots - 1)

    yield from rec((), degree, dim)


def random_poly(rng: random.Random, dim: int, degree: int, coeff_bound: int = 8,
                min_degree: int = 0, trust=None) -> TruncatedPolynomial:
    """Random polynomial with small rational coefficients, all monomials of
    total degree in [min_degree, degree] eligible.  Deterministic in rng state."""
    terms = {}
    for exps in _degree_iter(dim, degree):
        if sum(exps) < min_degree:
            # keep the rng stream independent of min_degree filtering
            rng.randint(-coeff_bound, coeff_bound)
            rng.randint(1, coeff_bound)
            continue
        num = rng.randint(-coeff_bound, coeff_bound)
        den = rng.randint(1, coeff_bound)
        if num:
            terms[_pack(exps)] = rat(num, den)
    return TruncatedPolynomial(dim, terms, trust)


def poly_random(seed: int, dim: int, degree: int,
                coeff_bound: int = 8) -> TruncatedPolynomial:
    """Deterministic random polynomial: same arguments, same output."""
    return random_poly(random.Random(seed), dim, degree, coeff_bound)
