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
Integer row lattices.

Row-style Hermite normal form with its unimodular transform, membership and
equality of row lattices, and the integer solver producing the block matrix
of a monomial map between two extended matrices with equal principal parts.
"""

from itertools import product
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from sympy import Matrix

from .exceptions import DimensionMismatch, PrincipalPartsDiffer
from .models import ExtMatrix, IntMatrix, MonomialMap
from .utils.logger import logger

Rows = Union[ExtMatrix, Sequence[Sequence[int]]]

# kernel shifts tried when the first solution has a singular frozen block
_SHIFT_RANGE = range(-2, 3)
_MAX_SHIFT_DIMENSION = 6


class HnfBasis(BaseModel):
    """Canonical basis of a row lattice in Hermite normal form.

    Pivots are positive, strictly move right from row to row, and entries
    above each pivot lie in [0, pivot). Zero rows are dropped.
    """

    model_config = ConfigDict(frozen=True)

    rows: IntMatrix = Field(default=(), description="Nonzero HNF rows")
    width: int = Field(..., ge=0, description="Ambient dimension")

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> List[int]:
        return [next(j for j, v in enumerate(row) if v) for row in self.rows]


def _as_rows(rows: Rows) -> List[List[int]]:
    entries = rows.entries if isinstance(rows, ExtMatrix) else rows
    return [[int(v) for v in row] for row in entries]


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """x, y, g with x*a + y*b = g = gcd(a, b) >= 0."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def hnf_with_transform(rows: Rows, width: Optional[int] = None) -> Tuple[List[List[int]], List[List[int]], int]:
    """Reduces ``rows`` to Hermite normal form.

    Returns:
        (H, U, rank) with U unimodular, U * A = H, the first ``rank`` rows of H
        nonzero and the rest zero.

    Raises:
        DimensionMismatch: If the rows do not share one width.
    """
    a = _as_rows(rows)
    if width is None:
        width = len(a[0]) if a else 0
    if any(len(row) != width for row in a):
        raise DimensionMismatch("rows of a lattice must share one width")
    k = len(a)
    u = [[1 if i == j else 0 for j in range(k)] for i in range(k)]

    r = 0
    for col in range(width):
        if r == k:
            break
        for i in range(r + 1, k):
            b_val = a[i][col]
            if b_val == 0:
                continue
            a_val = a[r][col]
            if a_val == 0:
                a[r], a[i] = a[i], a[r]
                u[r], u[i] = u[i], u[r]
                continue
            x, y, g = xgcd(a_val, b_val)
            ag, mbg = a_val // g, -b_val // g
            a[r], a[i] = _combine(a[r], a[i], x, y, mbg, ag)
            u[r], u[i] = _combine(u[r], u[i], x, y, mbg, ag)
        pivot = a[r][col]
        if pivot == 0:
            continue
        if pivot < 0:
            a[r] = [-v for v in a[r]]
            u[r] = [-v for v in u[r]]
            pivot = -pivot
        for i in range(r):
            q = a[i][col] // pivot
            if q:
                a[i] = [v - q * w for v, w in zip(a[i], a[r], strict=True)]
                u[i] = [v - q * w for v, w in zip(u[i], u[r], strict=True)]
        r += 1
    return a, u, r


def _combine(first: List[int], second: List[int], x: int, y: int, z: int, w: int) -> Tuple[List[int], List[int]]:
    return (
        [x * p + y * q for p, q in zip(first, second, strict=True)],
        [z * p + w * q for p, q in zip(first, second, strict=True)],
    )


def hnf(rows: Rows, width: Optional[int] = None) -> HnfBasis:
    """Canonical HNF basis of the lattice generated by ``rows``."""
    h, _, rank = hnf_with_transform(rows, width)
    if width is None:
        width = len(h[0]) if h else 0
    return HnfBasis(rows=tuple(tuple(row) for row in h[:rank]), width=width)


def _reduce(basis: Sequence[Sequence[int]], v: Sequence[int]) -> Tuple[List[int], List[int]]:
    """Reduces v against HNF rows; returns (remainder, coefficients)."""
    rest = list(v)
    coefficients = []
    for row in basis:
        pivot_col = next(j for j, value in enumerate(row) if value)
        q = rest[pivot_col] // row[pivot_col]
        coefficients.append(q)
        if q:
            rest = [a - q * b for a, b in zip(rest, row, strict=True)]
    return rest, coefficients


def span_contains(rows: Union[Rows, HnfBasis], v: Sequence[int]) -> bool:
    """True iff v lies in the integer row span.

    Raises:
        DimensionMismatch: If v has the wrong width.
    """
    basis = rows if isinstance(rows, HnfBasis) else hnf(rows, len(v))
    if len(v) != basis.width:
        raise DimensionMismatch(f"vector of width {len(v)} against a lattice of width {basis.width}")
    rest, _ = _reduce(basis.rows, v)
    return not any(rest)


def lat_equal(b: Rows, other: Rows) -> bool:
    """True iff both row sets generate the same lattice; different widths never do."""
    rows_b, rows_o = _as_rows(b), _as_rows(other)
    width = len(rows_b[0]) if rows_b else 0
    if rows_o and len(rows_o[0]) != width:
        return False
    return hnf(rows_b, width) == hnf(rows_o, width)


def solve_left(rows: Rows, v: Sequence[int]) -> Optional[List[int]]:
    """Some x with x * A = v, reduced modulo the left kernel HNF; None if v is not in the span."""
    a = _as_rows(rows)
    h, u, rank = hnf_with_transform(a, len(v))
    rest, coefficients = _reduce(h[:rank], v)
    if any(rest):
        return None
    x = [sum(c * u[i][j] for i, c in enumerate(coefficients)) for j in range(len(a))]
    kernel = hnf(u[rank:], len(a))
    reduced, _ = _reduce(kernel.rows, x)
    return reduced


def left_kernel(rows: Rows) -> HnfBasis:
    """HNF basis of {x : x * A = 0}."""
    a = _as_rows(rows)
    _, u, rank = hnf_with_transform(a)
    return hnf(u[rank:], len(a))


def determinant(rows: Sequence[Sequence[int]]) -> int:
    if not rows:
        return 1
    return int(Matrix([list(r) for r in rows]).det())


def is_unimodular(rows: Sequence[Sequence[int]]) -> bool:
    return abs(determinant(rows)) == 1


def solve_block_matrix(
    b: ExtMatrix, target: ExtMatrix, frozen_block: Optional[Sequence[Sequence[int]]] = None
) -> Optional[MonomialMap]:
    """Solves M * B = B' for M of block shape (I 0; M1 M2).

    The frozen rows of ``target`` are solved as integer combinations of the
    rows of ``b``. Solutions differ by left kernel vectors, so M2 is free up
    to that coset. When ``frozen_block`` is given it is used as M2 and only
    M1 is solved, from B'_frozen - M2 * B_frozen over the principal rows.
    Without it the solution is chosen deterministically: the frozen block is
    the identity when every frozen row difference lies in the principal row
    lattice; otherwise each row is the particular solution reduced modulo the
    left kernel HNF, shifted by small kernel combinations if that makes a
    singular square frozen block invertible.

    Returns:
        The map, or None when no solution exists (with the prescribed M2,
        if one was given).

    Raises:
        PrincipalPartsDiffer: If the principal parts differ.
        DimensionMismatch: If ``frozen_block`` is not (m' - n) x (m - n).
    """
    if b.n != target.n or b.principal != target.principal:
        raise PrincipalPartsDiffer("solve_block_matrix needs equal principal parts")
    n, m = b.n, b.m
    identity_top = [tuple(1 if i == j else 0 for j in range(m)) for i in range(n)]

    if frozen_block is not None:
        return _solve_with_frozen_block(b, target, frozen_block, identity_top)

    if target.m == m:
        differences = [
            [t - s for t, s in zip(row_t, row_s, strict=True)]
            for row_t, row_s in zip(target.frozen_rows, b.frozen_rows, strict=True)
        ]
        shifts = [solve_left(b.principal, d) for d in differences]
        bottom = [
            tuple(shift) + tuple(1 if r == c else 0 for c in range(m - n))
            for r, shift in enumerate(shifts)
            if shift is not None
        ]
        if len(bottom) == len(shifts):
            return _build(b, target, identity_top + bottom)

    bottom_rows: List[List[int]] = []
    for row in target.frozen_rows:
        x = solve_left(b.entries, row)
        if x is None:
            logger.debug(f"frozen row {row} is outside the row lattice")
            return None
        bottom_rows.append(x)

    if target.m == m and determinant([r[n:] for r in bottom_rows]) == 0:
        bottom_rows = _shift_to_nonsingular(b, bottom_rows)
    return _build(b, target, identity_top + [tuple(r) for r in bottom_rows])


def _shift_to_nonsingular(b: ExtMatrix, bottom: List[List[int]]) -> List[List[int]]:
    n = b.n
    kernel = left_kernel(b).rows
    slots = len(kernel) * len(bottom)
    if not kernel or slots > _MAX_SHIFT_DIMENSION:
        logger.warning(f"frozen block is singular; kernel search over {slots} coefficients skipped")
        return bottom
    choices = sorted(product(_SHIFT_RANGE, repeat=slots), key=lambda c: (sum(abs(v) for v in c), c))
    for choice in choices:
        shifted = []
        for r, row in enumerate(bottom):
            coeffs = choice[r * len(kernel) : (r + 1) * len(kernel)]
            shifted.append([v + sum(c * k[j] for c, k in zip(coeffs, kernel, strict=True)) for j, v in enumerate(row)])
        if determinant([r[n:] for r in shifted]) != 0:
            return shifted
    logger.warning("no small kernel shift makes the frozen block nonsingular")
    return bottom


def _solve_with_frozen_block(
    b: ExtMatrix,
    target: ExtMatrix,
    frozen_block: Sequence[Sequence[int]],
    identity_top: List[Tuple[int, ...]],
) -> Optional[MonomialMap]:
    block = [[int(v) for v in row] for row in frozen_block]
    if len(block) != target.m - target.n or any(len(row) != b.m - b.n for row in block):
        raise DimensionMismatch(
            f"frozen block must be {target.m - target.n}x{b.m - b.n}, got {len(block)} rows"
        )
    rows: List[Tuple[int, ...]] = list(identity_top)
    for row_t, weights in zip(target.frozen_rows, block, strict=True):
        residual = [
            t - sum(w * frozen[j] for w, frozen in zip(weights, b.frozen_rows, strict=True))
            for j, t in enumerate(row_t)
        ]
        top = solve_left(b.principal, residual)
        if top is None:
            logger.debug(f"frozen row {row_t} has no solution with frozen block row {weights}")
            return None
        rows.append(tuple(top) + tuple(weights))
    return _build(b, target, rows)


def _build(b: ExtMatrix, target: ExtMatrix, rows: Sequence[Sequence[int]]) -> MonomialMap:
    return MonomialMap(matrix=tuple(tuple(r) for r in rows), source=b, target=target)


def multiply(left: Sequence[Sequence[int]], right: Sequence[Sequence[int]]) -> IntMatrix:
    """Exact integer matrix product on object-dtype arrays."""
    if len(left[0]) != len(right):
        raise DimensionMismatch(f"cannot multiply {len(left)}x{len(left[0])} by {len(right)}x{len(right[0])}")
    result = np.array(left, dtype=object) @ np.array(right, dtype=object)
    return tuple(tuple(int(v) for v in r) for r in result)

