# Copyright (c) 2025 CoReason, Inc.
#
# This software is proprietary and dual-licensed.
# Licensed under the Prosperity Public License 3.0 (the "License").
# A copy of the license is available at https://prosperitylicense.com/versions/3.0.0
# For details, see the LICENSE file.
# Commercial use beyond a 30-day trial requires a separate license.
#
# Source Code: https://github.com/CoReason-AI/coreason_cluster


import pytest
from pydantic import ValidationError

from coreason_cluster.exceptions import UnsupportedType
from coreason_cluster.models import (
    CheckEntry,
    ExampleReport,
    ExtMatrix,
    Family,
    FormulaFailure,
    FormulaReport,
    GroupReport,
    MonomialMap,
    QuasiHomReport,
    TauInvarianceReport,
    TypeSpec,
)


def test_ext_matrix_rejects_non_symmetrizable_principal_part() -> None:
    with pytest.raises(ValidationError):
        ExtMatrix(entries=((0, 1), (1, 0), (1, 1)))
    b = ExtMatrix(entries=((0, 1), (-1, 0), (3, 0)))
    assert b.as_array().shape == (3, 2)
    assert b.with_frozen(((1, 1),)).frozen_rows == ((1, 1),)


@pytest.mark.parametrize(
    "text, family, n, printed",
    [
        ("A3", Family.A, 3, "A3"),
        ("D5", Family.D, 5, "D5"),
        ("E7", Family.E7, 7, "E7"),
        ("G2", Family.G2, 2, "G2"),
        ("Aff_D5", Family.AFF_D, 5, "Aff_D5"),
        ("Aff_A2,1", Family.AFF_A, 3, "Aff_A2,1"),
        ("Aff_E6", Family.AFF_E6, 7, "Aff_E6"),
        ("Rank2(1,3)", Family.RANK2, 2, "Rank2(1,3)"),
    ],
)
def test_type_names(text: str, family: Family, n: int, printed: str) -> None:
    spec = TypeSpec.parse(text)
    assert spec.family is family
    assert spec.n == n
    assert str(spec) == printed
    assert TypeSpec.parse(str(spec)) == spec


def test_affine_flag() -> None:
    assert TypeSpec.parse("Aff_D6").affine
    assert not TypeSpec.parse("D6").affine


@pytest.mark.parametrize("text", ["X3", "A", "E6(2)", "Aff_A2", "Rank2(1)", "B2,3"])
def test_unknown_type_names(text: str) -> None:
    with pytest.raises(UnsupportedType):
        TypeSpec.parse(text)


def test_type_parameters_are_validated() -> None:
    with pytest.raises(ValidationError):
        TypeSpec.parse("D3")
    with pytest.raises(ValidationError):
        TypeSpec(family=Family.AFF_A, p=1)
    with pytest.raises(ValidationError):
        TypeSpec(family=Family.RANK2, s=1)


def test_monomial_map_dimensions() -> None:
    b = ExtMatrix(entries=((0, 1), (-1, 0), (3, 0)))
    identity = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    f = MonomialMap(matrix=identity, source=b, target=b)
    assert f.n == 2
    assert f.m1 == ((0, 0),)
    assert f.m2 == ((1,),)
    assert f.as_array().shape == (3, 3)
    with pytest.raises(ValidationError):
        MonomialMap(matrix=((1, 0), (0, 1)), source=b, target=b)


def test_report_pass_flags() -> None:
    report = ExampleReport(name="demo")
    assert report.passed
    report.add("first", True)
    report.add("second", False, "mismatch")
    assert not report.passed
    assert report.checks[1].detail == "mismatch"

    quasi = QuasiHomReport(
        checks=[
            CheckEntry(name="x1", passed=True, witness=(0,)),
            CheckEntry(name="yhat1", passed=True),
        ]
    )
    assert quasi.passed
    assert quasi.witnesses() == [(0,)]

    assert TauInvarianceReport(powers=[1, 2]).passed
    assert not TauInvarianceReport(powers=[1, 2], failures=[2]).passed


def test_summaries_are_json_ready() -> None:
    group = GroupReport(order=6, abelian=True, cyclic=True, element_orders={1: 1, 2: 1, 3: 2, 6: 2})
    summary = group.summary()
    assert summary["element_orders"] == {"1": 1, "2": 1, "3": 2, "6": 2}
    assert summary["subgroup_index_in_aut_triv"] is None

    failure = FormulaFailure(beta=(1, 2), predicted=None, oracle=(2, 1))
    formula = FormulaReport(type="A2", move="tau", trials=3, passed=False, first_failure=failure)
    assert formula.summary()["pass"] is False
    assert formula.summary()["first_failure"] == {"beta": (1, 2), "predicted": None, "oracle": (2, 1)}
