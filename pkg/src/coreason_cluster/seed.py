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
Labeled seeds and their mutation.

A seed stores its cluster variables fully expanded in the variables of the
root seed it was reached from, together with the values of its frozen
variables and the mutation path from the root.
"""

from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .exceptions import DimensionMismatch, DirectionOutOfRange, TermLimitExceeded
from .matrix import mutate_matrix, principal_extension, relabel_matrix, trivial_part
from .models import ExtMatrix, SeedProportionality, TropMonomial
from .symbolic import RatExpr, proportional, specialize, substitute_rational


class LabeledSeed(BaseModel):
    """A labeled seed (cluster, frozen variables, extended matrix)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: ExtMatrix = Field(..., description="Extended exchange matrix of this seed")
    cluster: Tuple[RatExpr, ...] = Field(..., description="x_1..x_n in the root variables")
    frozen_values: Tuple[RatExpr, ...] = Field(..., description="Values of the frozen variables x_{n+1}..x_m")
    path: Tuple[int, ...] = Field(default=(), description="Mutation directions from the root, reduced")

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def m(self) -> int:
        return self.matrix.m

    @property
    def variables(self) -> Tuple[RatExpr, ...]:
        return self.cluster + self.frozen_values


class YVariables(BaseModel):
    """Coefficient monomials y_i and their cluster-augmented versions."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    y: Tuple[TropMonomial, ...]
    yhat: Tuple[RatExpr, ...]


def initial_seed(b: ExtMatrix) -> LabeledSeed:
    """The root seed: cluster x1..xn and frozen variables x_{n+1}..x_m."""
    m = b.m
    variables = tuple(RatExpr.variable(i, m) for i in range(1, m + 1))
    return LabeledSeed(matrix=b, cluster=variables[: b.n], frozen_values=variables[b.n :])


def principal_seed(b: ExtMatrix) -> LabeledSeed:
    """Root seed of the algebra with principal coefficients over the principal part of ``b``."""
    return initial_seed(principal_extension(b))


def _exchange_monomial(variables: Sequence[RatExpr], column: Sequence[int], sign: int) -> RatExpr:
    result = RatExpr.constant(1, variables[0].m)
    for value, exponent in zip(variables, column, strict=True):
        e = sign * exponent
        if e > 0:
            result = result * value**e
    return result


def mutate_seed(s: LabeledSeed, k: int, max_terms: Optional[int] = None) -> LabeledSeed:
    """Mutates a seed in direction k.

    The new variable satisfies x_k x_k' = prod v_i^[b_ik]_+ + prod v_i^[-b_ik]_+
    over all rows, frozen ones included; the matrix is mutated alongside and
    k is appended to the path (an immediate repeat cancels instead).

    Raises:
        DirectionOutOfRange: If k is outside 1..n.
        TermLimitExceeded: If the new variable has more than ``max_terms`` terms.
    """
    if not 1 <= k <= s.n:
        raise DirectionOutOfRange(f"direction {k} is outside 1..{s.n}")
    column = [row[k - 1] for row in s.matrix.entries]
    variables = s.variables
    binomial = _exchange_monomial(variables, column, 1) + _exchange_monomial(variables, column, -1)
    exchanged = binomial / s.cluster[k - 1]
    if max_terms is not None and exchanged.term_count() > max_terms:
        raise TermLimitExceeded(f"x{k} after path {s.path + (k,)} has {exchanged.term_count()} terms (cap {max_terms})")
    cluster = s.cluster[: k - 1] + (exchanged,) + s.cluster[k:]
    path = s.path[:-1] if s.path and s.path[-1] == k else s.path + (k,)
    return LabeledSeed.model_construct(
        matrix=mutate_matrix(s.matrix, k),
        cluster=cluster,
        frozen_values=s.frozen_values,
        path=path,
    )


def mutate_seed_path(s: LabeledSeed, path: Iterable[int], max_terms: Optional[int] = None) -> LabeledSeed:
    for k in path:
        s = mutate_seed(s, k, max_terms)
    return s


def relabel_seed(s: LabeledSeed, sigma: Sequence[int]) -> LabeledSeed:
    """Simultaneous relabeling: variable i of the result is variable sigma(i) of ``s``.

    ``path`` keeps the directions as taken from the root, in the root's
    labels. It is not rewritten through sigma: replaying it from the root
    and relabeling afterwards gives the result back.
    """
    matrix = relabel_matrix(s.matrix, sigma)
    cluster = tuple(s.cluster[v - 1] for v in sigma)
    return LabeledSeed.model_construct(matrix=matrix, cluster=cluster, frozen_values=s.frozen_values, path=s.path)


def y_variables(s: LabeledSeed) -> YVariables:
    """y_i from the frozen rows and yhat_i = prod_j v_j^{b_ji} over every row."""
    n = s.n
    y = tuple(TropMonomial(exponents=tuple(row[i] for row in s.matrix.frozen_rows)) for i in range(n))
    variables = s.variables
    yhat = []
    for i in range(n):
        value = RatExpr.constant(1, variables[0].m)
        for v, row in zip(variables, s.matrix.entries, strict=True):
            if row[i]:
                value = value * v ** row[i]
        yhat.append(value)
    return YVariables(y=y, yhat=tuple(yhat))


def seed_proportional(s: LabeledSeed, t: LabeledSeed) -> SeedProportionality:
    """Checks s and t for proportionality.

    Cluster variables must agree up to a factor in the tropical semifield,
    yhat-variables must be equal and the principal parts must coincide.
    The witnesses are the factors x_i(s) / x_i(t).
    """
    if s.n != t.n:
        return SeedProportionality(proportional=False)
    n = s.n
    witnesses: List[Optional[Tuple[int, ...]]] = []
    for x, y in zip(s.cluster, t.cluster, strict=True):
        if x.m != y.m:
            raise DimensionMismatch("seeds are expressed in different ambient fields")
        witness = proportional(x, y, n)
        witnesses.append(None if witness is None else witness.exponents)
    ok = all(w is not None for w in witnesses)
    ok = ok and s.matrix.principal == t.matrix.principal
    ok = ok and y_variables(s).yhat == y_variables(t).yhat
    return SeedProportionality(proportional=ok, witnesses=witnesses)


def specialize_trivial(s: LabeledSeed) -> LabeledSeed:
    """Sets every frozen variable to 1 and drops the frozen rows."""
    n = s.n
    cluster = tuple(specialize(e, n) for e in s.cluster)
    return LabeledSeed.model_construct(matrix=trivial_part(s.matrix), cluster=cluster, frozen_values=(), path=s.path)


def apply_images(images: Sequence[RatExpr], s: LabeledSeed) -> LabeledSeed:
    """Image of a seed under the field homomorphism x_j -> images[j-1]; the matrix is unchanged."""
    cluster = tuple(substitute_rational(images, e) for e in s.cluster)
    frozen = tuple(substitute_rational(images, e) for e in s.frozen_values)
    return LabeledSeed.model_construct(matrix=s.matrix, cluster=cluster, frozen_values=frozen, path=s.path)


def seed_to_json(s: LabeledSeed) -> Dict[str, Any]:
    return {
        "n": s.n,
        "m": s.m,
        "matrix": [list(row) for row in s.matrix.entries],
        "path": list(s.path),
        "cluster": [str(e) for e in s.cluster],
    }
