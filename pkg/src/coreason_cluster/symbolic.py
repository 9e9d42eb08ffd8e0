# Copyright (c) 2025 CoReason, Inc.
#
# This software is proprietary and dual-licensed.
# Licensed under the Prosperity Public License 3.0 (the "License").
# A copy of the license is available at https://prosperitylicense.com/versions/3.0.0
# For details, see the LICENSE file.
# Commercial use beyond a 30-day trial requires a separate license.
#
# Source Code: https://github.com/CoReason-AI/coreason_cluster

"""
Exact rational functions in the ambient variables and the tropical semifield.

Elements of the ambient field are reduced fractions of integer polynomials in
``x1..xm`` backed by sympy's sparse fraction fields over ZZ with graded
lexicographic term order. Laurent monomial content is folded into the
printed form so that monomial denominators print as negative exponents.
"""

import re
from functools import lru_cache
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

from sympy import ZZ
from sympy.polys.fields import FracElement, FracField, field
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement

from .exceptions import DimensionMismatch, DivisionByZero, ParseError
from .models import MonomialMap, TropMonomial

Exponents = Tuple[int, ...]
LaurentPoly = Dict[Exponents, int]
ArithOp = Literal["add", "sub", "mul", "div"]


@lru_cache(maxsize=None)
def ambient_field(m: int) -> FracField:
    """The field Q(x1, ..., xm) over ZZ; one shared instance per m."""
    if m < 1:
        raise DimensionMismatch("the ambient field needs at least one variable")
    names = ",".join(f"x{i}" for i in range(1, m + 1))
    result = field(names, ZZ, grlex)
    return result[0]


class RatExpr:
    """A reduced fraction with positive leading denominator coefficient.

    Instances are immutable and hashable; equality is structural equality of
    the canonical form, which coincides with equality in the field.
    """

    __slots__ = ("_value", "m")

    def __init__(self, value: FracElement, m: int):
        denom = value.denom
        if denom.LC < 0:
            value = value.field.raw_new(-value.numer, -denom)
        self._value = value
        self.m = m

    # construction

    @classmethod
    def constant(cls, c: int, m: int) -> "RatExpr":
        return cls(ambient_field(m)(c), m)

    @classmethod
    def variable(cls, i: int, m: int) -> "RatExpr":
        """The variable x_i (1-based)."""
        if not 1 <= i <= m:
            raise DimensionMismatch(f"variable x{i} does not exist among x1..x{m}")
        return cls(ambient_field(m).gens[i - 1], m)

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff: int = 1) -> "RatExpr":
        """coeff * prod x_i^{e_i}; exponents may be negative."""
        m = len(exponents)
        k = ambient_field(m)
        numer = k.ring.from_dict({tuple(e if e > 0 else 0 for e in exponents): coeff})
        denom = k.ring.from_dict({tuple(-e if e < 0 else 0 for e in exponents): 1})
        return cls(k.new(numer, denom), m)

    @classmethod
    def from_terms(cls, terms: LaurentPoly, m: int) -> "RatExpr":
        total = cls.constant(0, m)
        for exponents, coeff in terms.items():
            total = total + cls.monomial(exponents, coeff)
        return total

    # field operations

    def _check(self, other: "RatExpr") -> None:
        if self.m != other.m:
            raise DimensionMismatch(f"operands live in {self.m} and {other.m} variables")

    def __add__(self, other: "RatExpr") -> "RatExpr":
        self._check(other)
        return RatExpr(self._value + other._value, self.m)

    def __sub__(self, other: "RatExpr") -> "RatExpr":
        self._check(other)
        return RatExpr(self._value - other._value, self.m)

    def __mul__(self, other: "RatExpr") -> "RatExpr":
        self._check(other)
        return RatExpr(self._value * other._value, self.m)

    def __truediv__(self, other: "RatExpr") -> "RatExpr":
        self._check(other)
        if other.is_zero:
            raise DivisionByZero("division by the zero expression")
        return RatExpr(self._value / other._value, self.m)

    def __neg__(self) -> "RatExpr":
        return RatExpr(-self._value, self.m)

    def __pow__(self, exponent: int) -> "RatExpr":
        if exponent < 0 and self.is_zero:
            raise DivisionByZero("negative power of the zero expression")
        return RatExpr(self._value**exponent, self.m)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatExpr):
            return NotImplemented
        return self.m == other.m and self._value == other._value

    def __hash__(self) -> int:
        return hash((self.m, self._value.numer, self._value.denom))

    def __repr__(self) -> str:
        return f"RatExpr({self})"

    def __str__(self) -> str:
        return format_expr(self)

    # inspection

    @property
    def value(self) -> FracElement:
        return self._value

    @property
    def numerator(self) -> PolyElement:
        return self._value.numer

    @property
    def denominator(self) -> PolyElement:
        return self._value.denom

    @property
    def is_zero(self) -> bool:
        return not self._value.numer

    def term_count(self) -> int:
        return len(self._value.numer) + len(self._value.denom)

    def laurent_terms(self) -> Optional[LaurentPoly]:
        """The Laurent polynomial this expression equals, or None if the denominator is not a unit monomial."""
        denom = self._value.denom
        if len(denom) != 1:
            return None
        ((shift, coeff),) = denom.items()
        if coeff != 1:
            return None
        return {
            tuple(e - s for e, s in zip(monom, shift, strict=True)): int(c) for monom, c in self._value.numer.items()
        }


def _poly_terms(poly: PolyElement) -> LaurentPoly:
    return {tuple(monom): int(c) for monom, c in poly.items()}


def _grlex_sorted(terms: LaurentPoly) -> List[Tuple[Exponents, int]]:
    return sorted(terms.items(), key=lambda item: (sum(item[0]), item[0]), reverse=True)


def _format_terms(terms: LaurentPoly) -> str:
    if not terms:
        return "0"
    parts = []
    for exponents, coeff in _grlex_sorted(terms):
        factors = [str(coeff)]
        for i, e in enumerate(exponents, start=1):
            if e == 1:
                factors.append(f"x{i}")
            elif e != 0:
                factors.append(f"x{i}^{e}")
        parts.append("*".join(factors))
    return "+".join(parts)


def format_expr(e: RatExpr) -> str:
    """Prints terms as ``c*x1^a1*...`` in decreasing grlex order joined by ``+``.

    Monomial denominators are folded into negative exponents; other
    denominators print as ``(numerator)/(denominator)``.
    """
    laurent = e.laurent_terms()
    if laurent is not None:
        return _format_terms(laurent)
    return f"({_format_terms(_poly_terms(e.numerator))})/({_format_terms(_poly_terms(e.denominator))})"


def rat_arith(a: RatExpr, b: RatExpr, op: ArithOp) -> RatExpr:
    """Exact field arithmetic.

    Raises:
        DivisionByZero: For ``div`` by zero.
        DimensionMismatch: If the operands have different ambient dimensions.
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation '{op}'")


def is_laurent(e: RatExpr, n: Optional[int] = None) -> bool:
    """True when the denominator is a unit monomial, supported on x1..xn if ``n`` is given."""
    denom = e.denominator
    if len(denom) != 1:
        return False
    ((monom, coeff),) = denom.items()
    if coeff != 1:
        return False
    return n is None or all(v == 0 for v in monom[n:])


# --------------------------------------------------------------------------- tropical semifield


def trop_add(u: TropMonomial, v: TropMonomial) -> TropMonomial:
    """Tropical addition: componentwise minimum of exponents."""
    if len(u.exponents) != len(v.exponents):
        raise DimensionMismatch("tropical monomials of different lengths")
    return TropMonomial(exponents=tuple(min(a, b) for a, b in zip(u.exponents, v.exponents, strict=True)))


def trop_mul(u: TropMonomial, v: TropMonomial) -> TropMonomial:
    if len(u.exponents) != len(v.exponents):
        raise DimensionMismatch("tropical monomials of different lengths")
    return TropMonomial(exponents=tuple(a + b for a, b in zip(u.exponents, v.exponents, strict=True)))


def trop_to_expr(u: TropMonomial, n: int) -> RatExpr:
    """The frozen monomial x_{n+1}^{u_1} ... as an ambient expression."""
    return RatExpr.monomial((0,) * n + tuple(u.exponents))


def as_coefficient(e: RatExpr, n: int) -> Optional[TropMonomial]:
    """Membership test for the tropical semifield.

    Returns the frozen exponents when ``e`` is a single Laurent monomial with
    coefficient 1 that does not involve x1..xn, else None.
    """
    terms = e.laurent_terms()
    if terms is None or len(terms) != 1:
        return None
    ((exponents, coeff),) = terms.items()
    if coeff != 1 or any(v != 0 for v in exponents[:n]):
        return None
    return TropMonomial(exponents=exponents[n:])


def proportional(x: RatExpr, y: RatExpr, n: int) -> Optional[TropMonomial]:
    """Witness t with x = t * y and t in the tropical semifield, or None.

    Raises:
        DivisionByZero: If ``y`` is zero.
    """
    return as_coefficient(x / y, n)


# --------------------------------------------------------------------------- substitution


def _evaluate(poly: PolyElement, images: Sequence[FracElement], target: FracField) -> FracElement:
    powers: Dict[Tuple[int, int], FracElement] = {}
    total = target.zero
    for monom, coeff in poly.items():
        term = target(int(coeff))
        for i, e in enumerate(monom):
            if e:
                key = (i, e)
                if key not in powers:
                    powers[key] = images[i] ** e
                term = term * powers[key]
        total = total + term
    return total


def substitute_rational(images: Sequence[RatExpr], e: RatExpr) -> RatExpr:
    """Applies the field homomorphism x_j -> images[j-1] to ``e``.

    Raises:
        DimensionMismatch: If the image count differs from e's variable count
            or the images live in different fields.
        DivisionByZero: If the denominator maps to zero.
    """
    if len(images) != e.m:
        raise DimensionMismatch(f"{len(images)} images for {e.m} variables")
    target_m = images[0].m
    if any(img.m != target_m for img in images):
        raise DimensionMismatch("images must share one ambient field")
    target = ambient_field(target_m)
    values = [img.value for img in images]
    numer = _evaluate(e.numerator, values, target)
    denom = _evaluate(e.denominator, values, target)
    if not denom.numer:
        raise DivisionByZero("the substitution sends the denominator to zero")
    return RatExpr(numer / denom, target_m)


def map_images(matrix: Sequence[Sequence[int]]) -> List[RatExpr]:
    """Images x_j -> prod_i xbar_i^{m_ij} of a monomial map given by its exponent matrix."""
    rows = len(matrix)
    cols = len(matrix[0])
    return [RatExpr.monomial(tuple(matrix[i][j] for i in range(rows))) for j in range(cols)]


def substitute(mapping: Union[MonomialMap, Sequence[Sequence[int]]], e: RatExpr) -> RatExpr:
    """Applies the monomial substitution x_j -> prod_i xbar_i^{m_ij}."""
    matrix = mapping.matrix if isinstance(mapping, MonomialMap) else mapping
    if len(matrix[0]) != e.m:
        raise DimensionMismatch(f"map has {len(matrix[0])} source variables, expression has {e.m}")
    return substitute_rational(map_images(matrix), e)


def specialize(e: RatExpr, keep: int) -> RatExpr:
    """Sets x_{keep+1}, ..., x_m to 1 and returns the result in keep variables."""
    images = [RatExpr.variable(i, keep) for i in range(1, keep + 1)]
    images.extend(RatExpr.constant(1, keep) for _ in range(e.m - keep))
    return substitute_rational(images, e)


def embed(e: RatExpr, m: int) -> RatExpr:
    """Views ``e`` as an expression in m >= e.m variables."""
    images = [RatExpr.variable(i, m) for i in range(1, e.m + 1)]
    return substitute_rational(images, e)


# --------------------------------------------------------------------------- parsing

_FACTOR = re.compile(r"^(?:x(\d+)(?:\^(-?\d+))?|(-?\d+))$")
_FRACTION = re.compile(r"^\((.*)\)/\((.*)\)$")


def _parse_sum(text: str, m: int, line: int, column: int, source: Optional[str]) -> RatExpr:
    text = text.strip()
    total = RatExpr.constant(0, m)
    if text == "0":
        return total
    offset = column
    for term in text.split("+"):
        if not term.strip():
            raise ParseError("empty term", line, offset, source)
        exponents = [0] * m
        coeff = 1
        for factor in term.strip().split("*"):
            match = _FACTOR.match(factor.strip())
            if match is None:
                raise ParseError(f"cannot read factor '{factor.strip()}'", line, offset, source)
            if match.group(3) is not None:
                coeff *= int(match.group(3))
                continue
            index = int(match.group(1))
            if not 1 <= index <= m:
                raise ParseError(f"variable x{index} outside x1..x{m}", line, offset, source)
            exponents[index - 1] += int(match.group(2) or 1)
        total = total + RatExpr.monomial(tuple(exponents), coeff)
        offset += len(term) + 1
    return total


def parse_expr(text: str, m: int, line: int = 1, column: int = 1, source: Optional[str] = None) -> RatExpr:
    """Reads the printed form produced by ``format_expr``.

    Raises:
        ParseError: On unreadable input, positioned at ``line``.
    """
    stripped = text.strip()
    fraction = _FRACTION.match(stripped)
    if fraction is None:
        return _parse_sum(stripped, m, line, column, source)
    numer = _parse_sum(fraction.group(1), m, line, column + 1, source)
    denom = _parse_sum(fraction.group(2), m, line, column, source)
    if denom.is_zero:
        raise ParseError("zero denominator", line, column, source)
    return numer / denom
