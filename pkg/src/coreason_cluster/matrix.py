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
Exact integer exchange matrices.

This module implements the matrix side of a seed: skew-symmetrizers, matrix
mutation, relabeling, the iced valued quiver round-trip, isomorphism search
under simultaneous relabeling, canonical forms and the text formats.
"""

import re
from collections import deque
from itertools import permutations, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Rational, igcd, ilcm

from .exceptions import (
    DimensionMismatch,
    DirectionOutOfRange,
    MalformedQuiver,
    NotSkewSymmetrizable,
    ParseError,
)
from .models import Arrow, ExtMatrix, IntMatrix, IsoWitness, SkewSymmetrizer, ValuedQuiver

_TOKEN = re.compile(r"\S+")
_positive = np.frompyfunc(lambda v: v if v > 0 else 0, 1, 1)


def positive_part(value: int) -> int:
    """[x]_+ = max(x, 0)."""
    return value if value > 0 else 0


def _to_tuple(array: np.ndarray) -> IntMatrix:
    return tuple(tuple(int(v) for v in row) for row in array)


def components(principal: Sequence[Sequence[int]]) -> List[List[int]]:
    """Connected components (0-based) of the graph with an edge wherever b_ij != 0."""
    n = len(principal)
    seen = [False] * n
    result: List[List[int]] = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        component = []
        while queue:
            i = queue.popleft()
            component.append(i)
            for j in range(n):
                if not seen[j] and (principal[i][j] != 0 or principal[j][i] != 0):
                    seen[j] = True
                    queue.append(j)
        result.append(sorted(component))
    return result


def find_skew_symmetrizer(principal: Sequence[Sequence[int]]) -> SkewSymmetrizer:
    """Finds the minimal positive diagonal D with D times the principal part skew-symmetric.

    Ratios d_j / d_i = -b_ij / b_ji are propagated along the nonzero entries
    of each connected component and checked for consistency; each component
    is then scaled to coprime integers.

    Args:
        principal: Square integer matrix.

    Returns:
        The normalized SkewSymmetrizer.

    Raises:
        DimensionMismatch: If the matrix is not square.
        NotSkewSymmetrizable: If the sign pattern or the ratios are inconsistent.
    """
    n = len(principal)
    if any(len(row) != n for row in principal):
        raise DimensionMismatch("the principal part must be square")

    for i in range(n):
        if principal[i][i] != 0:
            raise NotSkewSymmetrizable(f"diagonal entry b_{i + 1}{i + 1} is nonzero")
        for j in range(i + 1, n):
            a, b = principal[i][j], principal[j][i]
            if a * b > 0 or (a == 0) != (b == 0):
                raise NotSkewSymmetrizable(
                    f"entries b_{i + 1}{j + 1}={a} and b_{j + 1}{i + 1}={b} violate sign coherence"
                )

    d: Dict[int, Rational] = {}
    for component in components(principal):
        root = component[0]
        ratio: Dict[int, Rational] = {root: Rational(1)}
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j in range(n):
                if principal[i][j] == 0:
                    continue
                expected = -ratio[i] * Rational(principal[i][j], principal[j][i])
                if j not in ratio:
                    ratio[j] = expected
                    queue.append(j)
                elif ratio[j] != expected:
                    raise NotSkewSymmetrizable(f"inconsistent ratios on a cycle through vertex {j + 1}")
        scale = 1
        for value in ratio.values():
            scale = ilcm(scale, value.q)
        common = 0
        for value in ratio.values():
            common = igcd(common, int(value * scale))
        for i, value in ratio.items():
            d[i] = Rational(int(value * scale) // common)

    return SkewSymmetrizer(d=tuple(int(d[i]) for i in range(n)))


def is_skew_symmetric(principal: Sequence[Sequence[int]]) -> bool:
    n = len(principal)
    return all(principal[i][j] == -principal[j][i] for i in range(n) for j in range(n))


def mutate_matrix(b: ExtMatrix, k: int) -> ExtMatrix:
    """Mutates an extended matrix in direction k (1-based).

    b'_jk = -b_jk and b'_kj = -b_kj; every other entry becomes
    b_ji + [-b_jk]_+ b_ki + b_jk [b_ki]_+.

    Raises:
        DirectionOutOfRange: If k is not a mutable direction.
    """
    if not 1 <= k <= b.n:
        raise DirectionOutOfRange(f"direction {k} is outside 1..{b.n}")
    a = b.as_array()
    c = k - 1
    col = a[:, c]
    row = a[c, :]
    result = a + np.outer(_positive(-col), row) + np.outer(col, _positive(row))
    result[:, c] = -col
    result[c, :] = -row
    return ExtMatrix.trusted(_to_tuple(result))


def mutate_matrix_path(b: ExtMatrix, path: Iterable[int]) -> ExtMatrix:
    """Applies mutations in the order they are listed."""
    for k in path:
        b = mutate_matrix(b, k)
    return b


def relabel_matrix(b: ExtMatrix, sigma: Sequence[int]) -> ExtMatrix:
    """Simultaneous relabeling: result[i][j] = B[sigma(i)][sigma(j)], frozen rows keep their place.

    Raises:
        DimensionMismatch: If sigma is not a permutation of 1..n.
    """
    n = b.n
    if sorted(sigma) != list(range(1, n + 1)):
        raise DimensionMismatch(f"{tuple(sigma)} is not a permutation of 1..{n}")
    principal = tuple(tuple(b.entries[sigma[i] - 1][sigma[j] - 1] for j in range(n)) for i in range(n))
    frozen = tuple(tuple(row[sigma[j] - 1] for j in range(n)) for row in b.frozen_rows)
    return ExtMatrix.trusted(principal + frozen)


def negate(b: ExtMatrix) -> ExtMatrix:
    return ExtMatrix.trusted(tuple(tuple(-v for v in row) for row in b.entries))


def is_gluing_free(b: ExtMatrix) -> bool:
    """True when no two frozen rows coincide."""
    return len(set(b.frozen_rows)) == len(b.frozen_rows)


def principal_extension(b: ExtMatrix) -> ExtMatrix:
    """Replaces the frozen rows by an identity block (principal coefficients)."""
    n = b.n
    identity = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    return ExtMatrix.trusted(b.principal + identity)


def trivial_part(b: ExtMatrix) -> ExtMatrix:
    return ExtMatrix.trusted(b.principal)


# --------------------------------------------------------------------------- quivers


def matrix_to_quiver(b: ExtMatrix) -> ValuedQuiver:
    """Builds the iced valued quiver of an extended matrix.

    Mutable pairs i < j with b_ij > 0 give an arrow i -> j valued (b_ij, -b_ji);
    a frozen row f gives f -> j when b_fj > 0 and j -> f when b_fj < 0, valued
    (|b_fj|, |b_fj|).
    """
    n, m = b.n, b.m
    arrows: List[Arrow] = []
    for i in range(n):
        for j in range(i + 1, n):
            bij, bji = b.entries[i][j], b.entries[j][i]
            if bij > 0:
                arrows.append(Arrow(source=i + 1, target=j + 1, value=(bij, -bji)))
            elif bij < 0:
                arrows.append(Arrow(source=j + 1, target=i + 1, value=(bji, -bij)))
    for f in range(n, m):
        for j in range(n):
            v = b.entries[f][j]
            if v > 0:
                arrows.append(Arrow(source=f + 1, target=j + 1, value=(v, v)))
            elif v < 0:
                arrows.append(Arrow(source=j + 1, target=f + 1, value=(-v, -v)))
    return ValuedQuiver(
        mutable=tuple(range(1, n + 1)),
        frozen=tuple(range(n + 1, m + 1)),
        arrows=tuple(arrows),
    )


def quiver_to_matrix(quiver: ValuedQuiver) -> ExtMatrix:
    """Inverse of matrix_to_quiver.

    Raises:
        MalformedQuiver: On frozen-frozen arrows, loops, repeated pairs,
            non-positive values, unknown vertices or unequal frozen values.
        NotSkewSymmetrizable: If the mutable part has no skew-symmetrizer.
    """
    n = len(quiver.mutable)
    m = n + len(quiver.frozen)
    if quiver.mutable != tuple(range(1, n + 1)) or quiver.frozen != tuple(range(n + 1, m + 1)):
        raise MalformedQuiver("mutable vertices must be 1..n and frozen vertices n+1..m")
    if n == 0:
        raise MalformedQuiver("a quiver needs at least one mutable vertex")
    entries = [[0] * n for _ in range(m)]
    seen = set()
    for arrow in quiver.arrows:
        i, j = arrow.source, arrow.target
        p, q = arrow.value
        if i > m or j > m:
            raise MalformedQuiver(f"arrow {i}->{j} uses an unknown vertex")
        if i == j:
            raise MalformedQuiver(f"loop at vertex {i}")
        if i > n and j > n:
            raise MalformedQuiver(f"arrow {i}->{j} joins two frozen vertices")
        if p <= 0 or q <= 0:
            raise MalformedQuiver(f"arrow {i}->{j} has a non-positive value")
        pair = (min(i, j), max(i, j))
        if pair in seen:
            raise MalformedQuiver(f"vertices {pair[0]} and {pair[1]} are joined twice")
        seen.add(pair)
        if i > n or j > n:
            if p != q:
                raise MalformedQuiver(f"frozen arrow {i}->{j} needs equal values, got ({p},{q})")
            if i > n:
                entries[i - 1][j - 1] = p
            else:
                entries[j - 1][i - 1] = -p
            continue
        entries[i - 1][j - 1] = p
        entries[j - 1][i - 1] = -q
    return ExtMatrix.from_rows(entries)


# --------------------------------------------------------------------------- isomorphism and canonical forms


def _vertex_colors(principal: IntMatrix, frozen: IntMatrix, sorted_frozen: bool) -> List[int]:
    """Partition refinement of the mutable vertices into relabeling-invariant color classes."""
    n = len(principal)

    def frozen_column(i: int) -> Tuple[int, ...]:
        column = tuple(row[i] for row in frozen)
        return tuple(sorted(column)) if sorted_frozen else column

    base = [
        (
            tuple(sorted(principal[i])),
            tuple(sorted(principal[j][i] for j in range(n))),
            frozen_column(i),
        )
        for i in range(n)
    ]
    colors = _rank(base)
    while True:
        signatures = [
            (colors[i], tuple(sorted((principal[i][j], principal[j][i], colors[j]) for j in range(n) if j != i)))
            for i in range(n)
        ]
        refined = _rank(signatures)
        if len(set(refined)) == len(set(colors)):
            return refined
        colors = refined


def _rank(values: Sequence[object]) -> List[int]:
    ordering = {v: idx for idx, v in enumerate(sorted(set(values)))}  # type: ignore[type-var]
    return [ordering[v] for v in values]


def canonical_matrix(b: ExtMatrix) -> Tuple[IntMatrix, Tuple[int, ...]]:
    """Lexicographically least relabeling of the principal part, frozen rows in place.

    Only permutations that list vertices by increasing refined color are
    tried, so the result does not depend on the input labeling.

    Returns:
        The canonical entries and the 1-based relabeling producing them.
    """
    n = b.n
    colors = _vertex_colors(b.principal, b.frozen_rows, sorted_frozen=False)
    classes: Dict[int, List[int]] = {}
    for i, c in enumerate(colors):
        classes.setdefault(c, []).append(i)
    ordered = [classes[c] for c in sorted(classes)]

    best: Optional[Tuple[int, ...]] = None
    best_order: Tuple[int, ...] = tuple(range(n))
    for choice in product(*(permutations(group) for group in ordered)):
        order = tuple(v for group in choice for v in group)
        flat = tuple(b.entries[order[i]][order[j]] for i in range(n) for j in range(n)) + tuple(
            row[order[j]] for row in b.frozen_rows for j in range(n)
        )
        if best is None or flat < best:
            best, best_order = flat, order
    sigma = tuple(v + 1 for v in best_order)
    return relabel_matrix(b, sigma).entries, sigma


def _match_frozen(target: IntMatrix, candidate: IntMatrix) -> Optional[Tuple[int, ...]]:
    """Multiset matching of frozen rows; lowest unused index first."""
    used = [False] * len(candidate)
    bijection = []
    for row in target:
        for idx, other in enumerate(candidate):
            if not used[idx] and other == row:
                used[idx] = True
                bijection.append(idx)
                break
        else:
            return None
    return tuple(bijection)


def matrices_isomorphic(b: ExtMatrix, other: ExtMatrix, direct: bool = True) -> Optional[IsoWitness]:
    """Searches for a relabeling carrying ``other`` onto ``b``.

    The principal relabeling sigma satisfies ``other[sigma(i)][sigma(j)] = sign * b[i][j]``
    and the frozen rows of ``sign * relabel(other, sigma)`` match those of ``b``
    as multisets. Candidates are pruned by refined vertex colors and tried in
    lexicographic order, so the witness is the least one. When ``direct`` is
    False the sign -1 is tried after +1.

    Returns:
        The witness, or None if the matrices are not isomorphic.
    """
    if b.n != other.n or b.m != other.m:
        return None
    n = b.n
    for sign in (1, -1) if not direct else (1,):
        signed = other if sign == 1 else negate(other)
        if sorted(map(sorted, b.principal)) != sorted(map(sorted, signed.principal)):
            continue
        colors_b = _vertex_colors(b.principal, b.frozen_rows, sorted_frozen=True)
        colors_o = _vertex_colors(signed.principal, signed.frozen_rows, sorted_frozen=True)
        # isomorphic matrices produce the same color ranks, so only equal colors can correspond
        candidates = [[j for j in range(n) if colors_o[j] == colors_b[i]] for i in range(n)]
        witness = _search(b, signed, candidates, [], [False] * n)
        if witness is not None:
            return IsoWitness(sigma=witness[0], frozen=witness[1], sign=sign)
    return None


def _search(
    b: ExtMatrix,
    other: ExtMatrix,
    candidates: List[List[int]],
    assigned: List[int],
    used: List[bool],
) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    i = len(assigned)
    n = b.n
    if i == n:
        sigma = tuple(v + 1 for v in assigned)
        frozen = _match_frozen(b.frozen_rows, relabel_matrix(other, sigma).frozen_rows)
        if frozen is None:
            return None
        return sigma, frozen
    for j in candidates[i]:
        if used[j]:
            continue
        if any(
            b.entries[i][prev] != other.entries[j][assigned[prev]]
            or b.entries[prev][i] != other.entries[assigned[prev]][j]
            for prev in range(i)
        ):
            continue
        used[j] = True
        assigned.append(j)
        found = _search(b, other, candidates, assigned, used)
        assigned.pop()
        used[j] = False
        if found is not None:
            return found
    return None


def apply_witness(other: ExtMatrix, witness: IsoWitness) -> ExtMatrix:
    """Applies an isomorphism witness to ``other``; yields the first matrix of the search."""
    relabeled = relabel_matrix(other, witness.sigma)
    frozen = tuple(relabeled.frozen_rows[r] for r in witness.frozen)
    entries = relabeled.principal + frozen
    return ExtMatrix.trusted(tuple(tuple(witness.sign * v for v in row) for row in entries))


# --------------------------------------------------------------------------- text formats


def _content_lines(text: str) -> List[Tuple[int, str]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped and not stripped.startswith("#"):
            lines.append((number, raw))
    return lines


def _parse_ints(raw: str, number: int, source: Optional[str]) -> List[int]:
    values = []
    for match in _TOKEN.finditer(raw):
        try:
            values.append(int(match.group(), 10))
        except ValueError:
            raise ParseError(f"expected an integer, got '{match.group()}'", number, match.start() + 1, source) from None
    return values


def parse_matrix(text: str, source: Optional[str] = None) -> ExtMatrix:
    """Parses the matrix text format: a line ``n m`` followed by m rows of n integers.

    Raises:
        ParseError: On malformed text, with the offending line and column.
        NotSkewSymmetrizable: If the principal part has no skew-symmetrizer.
    """
    lines = _content_lines(text)
    if not lines:
        raise ParseError("empty matrix file", 1, 1, source)
    number, header = lines[0]
    dims = _parse_ints(header, number, source)
    if len(dims) != 2:
        raise ParseError("header must be 'n m'", number, 1, source)
    n, m = dims
    if not 1 <= n <= m:
        raise ParseError(f"need 1 <= n <= m, got n={n} m={m}", number, 1, source)
    rows = lines[1:]
    if len(rows) != m:
        last = rows[-1][0] if rows else number
        raise ParseError(f"expected {m} matrix rows, found {len(rows)}", last, 1, source)
    entries = []
    for row_number, raw in rows:
        values = _parse_ints(raw, row_number, source)
        if len(values) != n:
            raise ParseError(f"expected {n} entries, found {len(values)}", row_number, 1, source)
        entries.append(values)
    return ExtMatrix.from_rows(entries)


def format_matrix(b: ExtMatrix) -> str:
    lines = [f"{b.n} {b.m}"]
    lines.extend(" ".join(str(v) for v in row) for row in b.entries)
    return "\n".join(lines) + "\n"


def parse_quiver(text: str, source: Optional[str] = None) -> ExtMatrix:
    """Parses the quiver text format (``v`` header, ``a i j p q`` arrows) into a matrix."""
    lines = _content_lines(text)
    if not lines:
        raise ParseError("empty quiver file", 1, 1, source)
    number, header = lines[0]
    parts = header.split()
    if not parts or parts[0] != "v":
        raise ParseError("quiver files start with 'v <mutable> <frozen>'", number, 1, source)
    counts = _parse_ints(" ".join(parts[1:]), number, source)
    if len(counts) != 2 or counts[0] < 1 or counts[1] < 0:
        raise ParseError("expected two vertex counts", number, 1, source)
    n, f = counts
    arrows = []
    for row_number, raw in lines[1:]:
        fields = raw.split()
        if fields[0] != "a":
            raise ParseError(f"unknown record '{fields[0]}'", row_number, 1, source)
        values = _parse_ints(" ".join(fields[1:]), row_number, source)
        if len(values) != 4:
            raise ParseError("arrow records are 'a <i> <j> <p> <q>'", row_number, 1, source)
        i, j, p, q = values
        if min(i, j) < 1:
            raise ParseError("vertex labels start at 1", row_number, 1, source)
        arrows.append(Arrow(source=i, target=j, value=(p, q)))
    quiver = ValuedQuiver(
        mutable=tuple(range(1, n + 1)),
        frozen=tuple(range(n + 1, n + f + 1)),
        arrows=tuple(arrows),
    )
    return quiver_to_matrix(quiver)


def format_quiver(quiver: ValuedQuiver) -> str:
    lines = [f"v {len(quiver.mutable)} {len(quiver.frozen)}"]
    lines.extend(f"a {a.source} {a.target} {a.value[0]} {a.value[1]}" for a in quiver.arrows)
    return "\n".join(lines) + "\n"
