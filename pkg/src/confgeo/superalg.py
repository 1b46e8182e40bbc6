"""Graded-commutative algebra over odd generators with polynomial coefficients.

Generators are identified by integers.  For an element of spatial dimension
`dim`, ids 0 .. dim-1 are the coordinate differentials dx^mu and ids >= dim
are abstract ghost generators, ordered dx^0 < ... < dx^{dim-1} < theta_0 <
theta_1 < ...  A monomial is a strictly increasing tuple of generator ids;
reordering signs (Koszul signs) are absorbed into the coefficient at
insertion time, so storage is always canonical and equality is map equality.

Each monomial has a bidegree: form degree (number of dx factors) and ghost
degree (number of theta factors).  The parity of a monomial is the total
number of generators mod 2; polynomial coefficients are even.
"""

from __future__ import annotations

from typing import Iterator, Optional, Tuple

from .numpoly import (
    TruncatedPolynomial,
    DimensionMismatchError,
    _SCALAR_TYPES,
    _min_trust,
)

Monomial = Tuple[int, ...]


def _merge_monomials(a: Monomial, b: Monomial):
    """Merge two canonical monomials; returns (sign, merged) or (0, None)."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    merged = []
    sign = 1
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x == y:
            return 0, None
        if x < y:
            merged.append(x)
            i += 1
        else:
            # y crosses the remaining odd factors of a
            if (na - i) & 1:
                sign = -sign
            merged.append(y)
            j += 1
    merged.extend(a[i:])
    merged.extend(b[j:])
    return sign, tuple(merged)


class SuperElement:
    """Element of the exterior algebra with TruncatedPolynomial coefficients."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms=None):
        self.dim = dim
        t = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff.dim != dim:
                    raise DimensionMismatchError(
                        "dimension mismatch: coefficient dim != element dim")
                if not coeff.is_zero():
                    t[mono] = coeff
        self.terms = t

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "SuperElement":
        return cls(dim)

    @classmethod
    def from_poly(cls, poly: TruncatedPolynomial) -> "SuperElement":
        return cls(poly.dim, {(): poly})

    @classmethod
    def scalar(cls, dim: int, value, trust=None) -> "SuperElement":
        return cls.from_poly(TruncatedPolynomial.const(dim, value, trust))

    @classmethod
    def one(cls, dim: int) -> "SuperElement":
        return cls.scalar(dim, 1)

    @classmethod
    def dx(cls, dim: int, mu: int) -> "SuperElement":
        if not 0 <= mu < dim:
            raise ValueError("coordinate index out of range")
        return cls.generator(dim, mu)

    @classmethod
    def generator(cls, dim: int, gen_id: int, coeff=None) -> "SuperElement":
        c = coeff if coeff is not None else TruncatedPolynomial.const(dim, 1)
        return cls(dim, {(gen_id,): c})

    # -- inspection ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def form_ghost_degrees(self, mono: Monomial) -> Tuple[int, int]:
        form = sum(1 for g in mono if g < self.dim)
        return form, len(mono) - form

    def bidegrees(self):
        return sorted({self.form_ghost_degrees(m) for m in self.terms})

    def parity(self) -> Optional[int]:
        """0 or 1 for parity-homogeneous elements, None for mixed or zero."""
        ps = {len(m) & 1 for m in self.terms}
        if len(ps) == 1:
            return ps.pop()
        return None

    def trust(self):
        """Certified trust degree: minimum over coefficients (None = exact)."""
        t = None
        for coeff in self.terms.values():
            t = _min_trust(t, coeff.trust)
        return t

    def residual_terms(self) -> int:
        return sum(c.num_terms() for c in self.terms.values())

    def certified_zero(self) -> bool:
        """True when every coefficient vanishes up to its own trust degree."""
        for coeff in self.terms.values():
            if coeff.trust is None:
                if not coeff.is_zero():
                    return False
            elif not coeff.truncate(coeff.trust).is_zero():
                return False
        return True

    def certified_residual_terms(self) -> int:
        """Number of nonzero terms surviving below the per-coefficient trust."""
        total = 0
        for coeff in self.terms.values():
            if coeff.trust is None:
                total += coeff.num_terms()
            else:
                total += coeff.truncate(coeff.trust).num_terms()
        return total

    def coefficient(self, mono: Monomial) -> TruncatedPolynomial:
        return self.terms.get(tuple(mono), TruncatedPolynomial.zero(self.dim))

    def iter_terms(self) -> Iterator[tuple]:
        for mono in sorted(self.terms, key=lambda m: (len(m), m)):
            yield mono, self.terms[mono]

    # -- algebra -------------------------------------------------------------

    def _check_dim(self, other: "SuperElement"):
        if self.dim != other.dim:
            raise DimensionMismatchError(
                "dimension mismatch: %d vs %d" % (self.dim, other.dim))

    def __add__(self, other):
        if isinstance(other, TruncatedPolynomial):
            other = SuperElement.from_poly(other)
        if isinstance(other, _SCALAR_TYPES):
            other = SuperElement.scalar(self.dim, other)
        if not isinstance(other, SuperElement):
            return NotImplemented
        self._check_dim(other)
        t = dict(self.terms)
        for mono, coeff in other.terms.items():
            prev = t.get(mono)
            s = coeff if prev is None else prev + coeff
            if s.is_zero():
                t.pop(mono, None)
            else:
                t[mono] = s
        out = SuperElement(self.dim)
        out.terms = t
        return out

    __radd__ = __add__

    def __neg__(self):
        out = SuperElement(self.dim)
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, (TruncatedPolynomial,) + _SCALAR_TYPES):
            return self + (-(SuperElement.from_poly(other)
                             if isinstance(other, TruncatedPolynomial)
                             else SuperElement.scalar(self.dim, other)))
        if not isinstance(other, SuperElement):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _SCALAR_TYPES):
            if not other:
                return SuperElement(self.dim)
            out = SuperElement(self.dim)
            out.terms = {m: c * other for m, c in self.terms.items()}
            return out
        if isinstance(other, TruncatedPolynomial):
            other = SuperElement.from_poly(other)
        if not isinstance(other, SuperElement):
            return NotImplemented
        self._check_dim(other)
        acc = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                sign, merged = _merge_monomials(ma, mb)
                if sign == 0:
                    continue
                c = ca * cb
                if c.is_zero():
                    continue
                if sign < 0:
                    c = -c
                prev = acc.get(merged)
                acc[merged] = c if prev is None else prev + c
        out = SuperElement(self.dim)
        out.terms = {m: c for m, c in acc.items() if not c.is_zero()}
        return out

    def __rmul__(self, other):
        # scalars and polynomial coefficients are even: they commute
        if isinstance(other, _SCALAR_TYPES + (TruncatedPolynomial,)):
            return self * other
        return NotImplemented

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative power; use series_inverse")
        result = SuperElement.one(self.dim)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, SuperElement):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        if self.is_zero():
            return "Super(0)"
        parts = []
        for mono, coeff in self.iter_terms():
            gens = "".join(
                "dx%d" % g if g < self.dim else "th%d" % (g - self.dim)
                for g in mono)
            parts.append("(%r)%s" % (coeff, gens))
        return "Super(%s)" % " + ".join(parts)

    # -- graded calculus -----------------------------------------------------

    def partial(self, mu: int) -> "SuperElement":
        """Coefficient-wise partial derivative; generators are constant."""
        out = SuperElement(self.dim)
        t = {}
        for mono, coeff in self.terms.items():
            d = coeff.derivative(mu)
            if not d.is_zero():
                t[mono] = d
        out.terms = t
        return out

    def exterior_d(self) -> "SuperElement":
        """Left multiplication by dx^mu of the mu-th partial, summed."""
        acc = SuperElement(self.dim)
        for mu in range(self.dim):
            d = self.partial(mu)
            if d.is_zero():
                continue
            acc = acc + SuperElement.dx(self.dim, mu) * d
        return acc

    def extract_component(self, form_deg: int, ghost_deg: int) -> "SuperElement":
        out = SuperElement(self.dim)
        out.terms = {
            m: c for m, c in self.terms.items()
            if self.form_ghost_degrees(m) == (form_deg, ghost_deg)}
        return out

    def bidegree_components(self):
        """Map (form degree, ghost degree) -> homogeneous part."""
        comps = {}
        for mono, coeff in self.terms.items():
            key = self.form_ghost_degrees(mono)
            part = comps.get(key)
            if part is None:
                part = SuperElement(self.dim)
                comps[key] = part
            part.terms[mono] = coeff
        return comps

    def truncate(self, new_trust: int) -> "SuperElement":
        out = SuperElement(self.dim)
        t = {}
        for mono, coeff in self.terms.items():
            c = coeff.truncate(new_trust)
            if not c.is_zero():
                t[mono] = c
        out.terms = t
        return out

    def split_generator(self, gen_id: int):
        """Write self = generator * cofactor + rest; returns (cofactor, rest).

        The cofactor sign convention factors the generator to the left.
        """
        cof = SuperElement(self.dim)
        rest = SuperElement(self.dim)
        for mono, coeff in self.terms.items():
            if gen_id in mono:
                pos = mono.index(gen_id)
                stripped = mono[:pos] + mono[pos + 1:]
                c = coeff if pos % 2 == 0 else -coeff
                cof.terms[stripped] = c
            else:
                rest.terms[mono] = coeff
        return cof, rest

    # -- series operations ---------------------------------------------------

    def _split_scalar(self):
        c = self.terms.get((), TruncatedPolynomial.zero(self.dim))
        nil = SuperElement(self.dim)
        nil.terms = {m: v for m, v in self.terms.items() if m != ()}
        return c, nil

    def series_inverse(self, order: int) -> "SuperElement":
        """Inverse of an element whose scalar part is a series unit.

        The non-scalar part is nilpotent, so the expansion terminates.
        """
        c, nil = self._split_scalar()
        c_inv = SuperElement.from_poly(c.series_inverse(order))
        if nil.is_zero():
            return c_inv
        result = c_inv
        term = c_inv
        bound = len({g for m in nil.terms for g in m}) + 1
        for _ in range(bound):
            term = -(nil * term) * c_inv.terms[()]
            if term.is_zero():
                break
            result = result + term
        return result

    def series_sqrt(self, order: int) -> "SuperElement":
        """Square root with positive scalar constant term."""
        from .numpoly import rat

        c, nil = self._split_scalar()
        root_c = c.series_sqrt(order)
        if nil.is_zero():
            return SuperElement.from_poly(root_c)
        c_inv = c.series_inverse(order)
        w = nil * c_inv
        result = SuperElement.one(self.dim)
        term = SuperElement.one(self.dim)
        binom = rat(1)
        bound = len({g for m in nil.terms for g in m}) + 1
        for k in range(1, bound + 1):
            binom = binom * rat(3 - 2 * k, 2 * k)
            term = term * w
            if term.is_zero():
                break
            result = result + term * binom
        return result * root_c


def super_mul(a: SuperElement, b: SuperElement) -> SuperElement:
    return a * b


def super_partial(a: SuperElement, mu: int) -> SuperElement:
    return a.partial(mu)


def extract_component(a: SuperElement, form_deg: int, ghost_deg: int) -> SuperElement:
    return a.extract_component(form_deg, ghost_deg)
