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
Data models for the cluster engine.

This module defines the Pydantic models shared across the package: exchange
matrices, quivers, tropical monomials, monomial maps, type specifications
and the report models returned by verification routines.
"""

import re
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing_extensions import Self

from .exceptions import DimensionMismatch, UnsupportedType

IntRow = Tuple[int, ...]
IntMatrix = Tuple[IntRow, ...]


class ExtMatrix(BaseModel):
    """An extended skew-symmetrizable exchange matrix.

    The first ``n`` rows form the square principal part; the remaining
    ``m - n`` rows are frozen rows. Entries are Python integers, so they
    never overflow under repeated mutation.
    """

    model_config = ConfigDict(frozen=True)

    entries: IntMatrix = Field(..., description="m x n integer matrix, principal rows first")

    @field_validator("entries")
    @classmethod
    def _check_shape(cls, entries: IntMatrix) -> IntMatrix:
        if not entries or not entries[0]:
            raise ValueError("an exchange matrix needs at least one row and one column")
        n = len(entries[0])
        if any(len(row) != n for row in entries):
            raise ValueError("rows of an exchange matrix must have equal length")
        if len(entries) < n:
            raise ValueError(f"an exchange matrix needs at least n={n} rows, got {len(entries)}")
        return entries

    @model_validator(mode="after")
    def _check_skew_symmetrizable(self) -> Self:
        from .matrix import find_skew_symmetrizer

        find_skew_symmetrizer(self.principal)
        return self

    @classmethod
    def trusted(cls, entries: IntMatrix) -> "ExtMatrix":
        """Builds a matrix already known to be valid (e.g. the mutation of a valid one)."""
        return cls.model_construct(entries=entries)

    @classmethod
    def from_rows(cls, rows: Any) -> "ExtMatrix":
        """Builds a matrix from nested integer rows, raising the engine's own errors.

        Raises:
            DimensionMismatch: If the rows are ragged or fewer than the columns.
            NotSkewSymmetrizable: If the principal part has no skew-symmetrizer.
        """
        from .matrix import find_skew_symmetrizer

        entries = tuple(tuple(int(v) for v in row) for row in rows)
        if not entries or not entries[0]:
            raise DimensionMismatch("an exchange matrix needs at least one row and one column")
        n = len(entries[0])
        if any(len(row) != n for row in entries) or len(entries) < n:
            raise DimensionMismatch(f"expected at least {n} rows of width {n}")
        find_skew_symmetrizer(entries[:n])
        return cls.trusted(entries)

    @property
    def n(self) -> int:
        return len(self.entries[0])

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def principal(self) -> IntMatrix:
        return self.entries[: self.n]

    @property
    def frozen_rows(self) -> IntMatrix:
        return self.entries[self.n :]

    def as_array(self) -> np.ndarray:
        """Returns an object-dtype array holding the exact integer entries."""
        return np.array(self.entries, dtype=object).reshape(self.m, self.n)

    def with_frozen(self, rows: IntMatrix) -> "ExtMatrix":
        return ExtMatrix.trusted(self.principal + tuple(tuple(r) for r in rows))


class IsoWitness(BaseModel):
    """Relabeling that carries one extended matrix onto another.

    ``sigma`` relabels the principal part (``B'[sigma(i)][sigma(j)] = sign * B[i][j]``)
    and ``frozen[r]`` is the frozen row of ``B'`` matched with frozen row ``r`` of ``B``.
    """

    model_config = ConfigDict(frozen=True)

    sigma: Tuple[int, ...] = Field(..., description="1-based principal relabeling")
    frozen: Tuple[int, ...] = Field(default=(), description="0-based frozen row bijection")
    sign: int = Field(default=1, description="+1 for a direct, -1 for an inverse isomorphism")


class SkewSymmetrizer(BaseModel):
    """Positive diagonal D with D times the principal part skew-symmetric."""

    model_config = ConfigDict(frozen=True)

    d: IntRow = Field(..., description="Diagonal entries, gcd 1 on every connected component")


class Arrow(BaseModel):
    """Valued arrow i -> j with value (p, q): b_ij = p and b_ji = -q."""

    model_config = ConfigDict(frozen=True)

    source: int = Field(..., ge=1)
    target: int = Field(..., ge=1)
    value: Tuple[int, int] = Field(..., description="(b_ij, -b_ji), both positive")


class ValuedQuiver(BaseModel):
    """Iced valued quiver: mutable vertices 1..n, frozen vertices n+1..m."""

    model_config = ConfigDict(frozen=True)

    mutable: Tuple[int, ...] = Field(..., description="Mutable vertex labels")
    frozen: Tuple[int, ...] = Field(default=(), description="Frozen vertex labels")
    arrows: Tuple[Arrow, ...] = Field(default=(), description="Arrows in canonical order")


class TropMonomial(BaseModel):
    """Element of the tropical semifield: exponents of the frozen variables."""

    model_config = ConfigDict(frozen=True)

    exponents: IntRow = Field(..., description="Exponent of x_{n+1}, ..., x_m")

    def __str__(self) -> str:
        return "(" + ",".join(str(e) for e in self.exponents) + ")"


class MapClassKind(str, Enum):
    """Strength classes of an endomorphism candidate, strongest first."""

    CLUSTER_AUTOMORPHISM = "ClusterAutomorphism"
    WEAK_CLUSTER_AUTOMORPHISM = "WeakClusterAutomorphism"
    QUASI_AUTOMORPHISM_ONLY = "QuasiAutomorphismOnly"
    NOT_QUASI = "NotQuasi"


class MapClass(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: MapClassKind
    direct: Optional[bool] = Field(default=None, description="Direct (True) or inverse (False) for the first two kinds")


class MonomialMap(BaseModel):
    """A variable-to-monomial substitution between two seeds.

    Column ``j`` of ``matrix`` holds the exponents of the image of the source
    variable ``x_j`` in the target variables, so ``matrix @ source = target``
    for a quasi-homomorphism. ``target`` is already relabeled so that target
    variable ``i`` is the image of source variable ``i``.
    """

    model_config = ConfigDict(frozen=True)

    matrix: IntMatrix = Field(..., description="Exponent matrix m_ij (rows: target, columns: source)")
    source: ExtMatrix = Field(..., description="Matrix of the source seed")
    target: ExtMatrix = Field(..., description="Matrix of the (relabeled) target seed")
    source_path: Tuple[int, ...] = Field(default=(), description="Mutation path of the source seed from its root")
    target_path: Tuple[int, ...] = Field(default=(), description="Mutation path of the target seed from its root")
    relabel: Optional[Tuple[int, ...]] = Field(default=None, description="Target relabeling, 1-based")

    @model_validator(mode="after")
    def _check_dimensions(self) -> Self:
        if len(self.matrix) != self.target.m or any(len(row) != self.source.m for row in self.matrix):
            raise ValueError(f"map matrix must be {self.target.m}x{self.source.m}")
        return self

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def m1(self) -> IntMatrix:
        n = self.n
        return tuple(row[:n] for row in self.matrix[n:])

    @property
    def m2(self) -> IntMatrix:
        n = self.n
        return tuple(row[n:] for row in self.matrix[n:])

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=object).reshape(len(self.matrix), len(self.matrix[0]))


class CheckEntry(BaseModel):
    """One verified condition of a report."""

    name: str
    passed: bool
    detail: str = ""
    witness: Optional[IntRow] = None


class QuasiHomReport(BaseModel):
    checks: List[CheckEntry] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def witnesses(self) -> List[Optional[IntRow]]:
        return [c.witness for c in self.checks if c.name.startswith("x")]


class ExampleReport(BaseModel):
    """Outcome of re-running one built-in fixture end to end."""

    name: str
    description: str = ""
    checks: List[CheckEntry] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckEntry(name=name, passed=passed, detail=detail))


class UnimodularityReport(BaseModel):
    determinant: int
    unimodular: bool


class ClassificationReport(BaseModel):
    map_class: MapClass
    cluster_criteria: bool
    weak_criteria: bool
    quasi_criteria: bool
    sampled_seeds: int
    exhaustive: bool = Field(..., description="True when every seed pair of a finite exchange graph was checked")
    note: str = ""


class SeedProportionality(BaseModel):
    proportional: bool
    witnesses: List[Optional[IntRow]] = Field(default_factory=list)


class Census(BaseModel):
    nodes: int
    finite: bool
    cap_hit: bool


class TauInvarianceReport(BaseModel):
    powers: List[int]
    failures: List[int] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


class GroupReport(BaseModel):
    order: int
    abelian: bool
    cyclic: bool
    element_orders: Dict[int, int] = Field(..., description="Element order -> multiplicity")
    generators: List[List[int]] = Field(default_factory=list, description="Array forms on the cluster variables")
    closed: bool = Field(default=True, description="Composition table closes on the enumerated elements")
    subgroup_index_in_aut_triv: Optional[int] = None

    def summary(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "abelian": self.abelian,
            "cyclic": self.cyclic,
            "element_orders": {str(k): v for k, v in sorted(self.element_orders.items())},
            "subgroup_index_in_aut_triv": self.subgroup_index_in_aut_triv,
        }


class QautReport(BaseModel):
    qaut0: GroupReport
    aut_triv: GroupReport
    aut0_order: int = Field(..., description="Direct cluster automorphisms of the algebra with coefficients")
    star_reason: str
    unimodular_everywhere: Optional[bool] = None


class RelationOutcome(BaseModel):
    lhs: List[str]
    rhs: List[str]
    holds: bool


class RelationReport(BaseModel):
    relations: List[RelationOutcome] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.relations)


class FormulaFailure(BaseModel):
    beta: IntRow
    predicted: Optional[IntRow]
    oracle: IntRow


class FormulaReport(BaseModel):
    type: str
    move: str
    trials: int
    passed: bool
    status: str = Field(default="verified", description="'verified' or 'oracle_only'")
    lattice_preserved: bool = True
    first_failure: Optional[FormulaFailure] = None
    combination_mismatches: Optional[int] = Field(
        default=None, description="Trials where the printed linear coefficients disagree (Aff_A only)"
    )

    def summary(self) -> Dict[str, Any]:
        return {
            "type": self.type,
            "move": self.move,
            "trials": self.trials,
            "pass": self.passed,
            "first_failure": None if self.first_failure is None else self.first_failure.model_dump(),
        }


class KeyMode(str, Enum):
    SYMBOLIC = "symbolic"
    MATRIX_ONLY = "matrix_only"


class Move(str, Enum):
    TAU = "tau"
    TAU_INV = "tau_inv"
    R1 = "r1"
    R2 = "r2"


class Family(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E6 = "E6"
    E7 = "E7"
    E8 = "E8"
    F4 = "F4"
    G2 = "G2"
    AFF_A = "Aff_A"
    AFF_D = "Aff_D"
    AFF_E6 = "Aff_E6"
    AFF_E7 = "Aff_E7"
    AFF_E8 = "Aff_E8"
    RANK2 = "Rank2"


_FIXED_RANK = {
    Family.E6: 6,
    Family.E7: 7,
    Family.E8: 8,
    Family.F4: 4,
    Family.G2: 2,
    Family.AFF_E6: 7,
    Family.AFF_E7: 8,
    Family.AFF_E8: 9,
}
_MIN_RANK = {Family.A: 1, Family.B: 2, Family.C: 2, Family.D: 4, Family.AFF_D: 5}
_TYPE_PATTERN = re.compile(r"^(Aff_A|Aff_D|Aff_E6|Aff_E7|Aff_E8|Rank2|E6|E7|E8|F4|G2|A|B|C|D)[_(]?([0-9, ]*)\)?$")


class TypeSpec(BaseModel):
    """A Dynkin-style type with the parameters that fix its standard matrix."""

    model_config = ConfigDict(frozen=True)

    family: Family
    rank: Optional[int] = Field(default=None, description="Rank n for A-D and Aff_D (vertex count)")
    p: Optional[int] = Field(default=None, ge=1)
    q: Optional[int] = Field(default=None, ge=1)
    s: Optional[int] = Field(default=None, ge=1)
    t: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check_params(self) -> Self:
        if self.family in _MIN_RANK:
            if self.rank is None or self.rank < _MIN_RANK[self.family]:
                raise ValueError(f"type {self.family.value} needs rank >= {_MIN_RANK[self.family]}")
        elif self.family is Family.AFF_A:
            if self.p is None or self.q is None:
                raise ValueError("type Aff_A needs p and q")
        elif self.family is Family.RANK2:
            if self.s is None or self.t is None:
                raise ValueError("type Rank2 needs s and t")
        return self

    @property
    def n(self) -> int:
        if self.family in _FIXED_RANK:
            return _FIXED_RANK[self.family]
        if self.family is Family.AFF_A:
            return (self.p or 0) + (self.q or 0)
        if self.family is Family.RANK2:
            return 2
        return self.rank or 0

    @property
    def affine(self) -> bool:
        return self.family.value.startswith("Aff_")

    def __str__(self) -> str:
        if self.family is Family.AFF_A:
            return f"Aff_A{self.p},{self.q}"
        if self.family is Family.RANK2:
            return f"Rank2({self.s},{self.t})"
        if self.family in _FIXED_RANK:
            return self.family.value
        return f"{self.family.value}{self.rank}"

    @classmethod
    def parse(cls, text: str) -> "TypeSpec":
        """Parses names such as ``A3``, ``E7``, ``Aff_D5``, ``Aff_A2,1`` or ``Rank2(1,3)``."""
        match = _TYPE_PATTERN.match(text.strip())
        if match is None:
            raise UnsupportedType(f"unknown type '{text}'")
        family = Family(match.group(1))
        params = [int(v) for v in match.group(2).replace(" ", "").split(",") if v]
        if family in _FIXED_RANK:
            if params:
                raise UnsupportedType(f"type {family.value} takes no parameters")
            return cls(family=family)
        if family is Family.AFF_A:
            if len(params) != 2:
                raise UnsupportedType("Aff_A needs two parameters p,q")
            return cls(family=family, p=params[0], q=params[1])
        if family is Family.RANK2:
            if len(params) != 2:
                raise UnsupportedType("Rank2 needs two parameters s,t")
            return cls(family=family, s=params[0], t=params[1])
        if len(params) != 1:
            raise UnsupportedType(f"type {family.value} needs exactly one rank parameter")
        return cls(family=family, rank=params[0])
