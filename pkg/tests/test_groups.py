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
from sympy.combinatorics import Permutation

from coreason_cluster.exceptions import NotFinite
from coreason_cluster.fixtures import load_matrix
from coreason_cluster.groups import (
    SeedGenerator,
    aut0_order,
    direct_automorphisms_triv,
    element_order_profile,
    qaut0_group,
    relation_check,
)
from coreason_cluster.matrix import principal_extension
from coreason_cluster.seed import initial_seed

FINITE_ORDERS = [
    ("A2", 5),
    ("A3", 6),
    ("A4", 7),
    ("B2", 3),
    ("B3", 4),
    ("C3", 4),
    ("G2", 4),
    ("D4", 24),
    ("D5", 10),
]


@pytest.mark.parametrize("name, order", FINITE_ORDERS)
def test_principal_coefficients_keep_every_automorphism(name: str, order: int) -> None:
    report = qaut0_group(initial_seed(principal_extension(load_matrix(name))))
    assert report.aut_triv.order == order
    assert report.qaut0.order == order
    assert report.qaut0.subgroup_index_in_aut_triv == 1
    assert report.unimodular_everywhere is True
    assert report.aut_triv.closed


@pytest.mark.parametrize("name, order", [("A2", 5), ("A3", 6), ("B2", 3), ("G2", 4)])
def test_small_groups_are_cyclic(name: str, order: int) -> None:
    _, report = direct_automorphisms_triv(initial_seed(load_matrix(name)))
    assert report.order == order
    assert report.cyclic
    assert report.abelian
    assert report.element_orders[order] >= 1


def test_inverse_automorphisms_double_the_group() -> None:
    elements, report = direct_automorphisms_triv(initial_seed(load_matrix("A2")), include_inverse=True)
    assert report.order == 10
    assert sum(1 for e in elements if e.sign == -1) == 5
    assert not report.cyclic


def test_non_lifting_automorphism() -> None:
    report = qaut0_group(initial_seed(load_matrix("cex2")))
    assert report.aut_triv.order == 24
    assert report.aut_triv.element_orders == {1: 1, 2: 7, 3: 2, 4: 8, 6: 2, 12: 4}
    assert not report.aut_triv.abelian
    assert report.qaut0.order == 8
    assert report.qaut0.element_orders == {1: 1, 2: 3, 4: 4}
    assert report.qaut0.abelian
    assert not report.qaut0.cyclic
    assert report.qaut0.subgroup_index_in_aut_triv == 3
    assert report.star_reason == "skew-symmetric"
    assert report.unimodular_everywhere is None


def test_direct_automorphisms_with_coefficients() -> None:
    root = initial_seed(principal_extension(load_matrix("A2")))
    elements, _ = direct_automorphisms_triv(root)
    assert aut0_order(root.matrix, elements) == 1


def test_infinite_type_is_rejected() -> None:
    with pytest.raises(NotFinite):
        direct_automorphisms_triv(initial_seed(load_matrix("Rank2(2,2)")), cap=20)


def test_element_order_profile() -> None:
    perms = [Permutation([0, 1, 2]), Permutation([1, 0, 2]), Permutation([1, 2, 0])]
    assert element_order_profile(perms) == {1: 1, 2: 1, 3: 1}


def test_relation_check_on_the_pentagon() -> None:
    root = initial_seed(load_matrix("A2"))
    generators = {"t": SeedGenerator(path=(1,), relabel=(2, 1))}
    report = relation_check(root, generators, [(["t"] * 5, []), (["t", "t"], []), (["t", "t", "t"], ["t", "t", "t"])])
    assert [r.holds for r in report.relations] == [True, False, True]
    assert not report.passed


def test_empty_lifted_subgroup_has_no_index(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr("coreason_cluster.groups.lat_equal", lambda *_: False)
    report = qaut0_group(initial_seed(principal_extension(load_matrix("A2"))))
    assert report.aut_triv.order == 5
    assert report.qaut0.order == 0
    assert report.qaut0.subgroup_index_in_aut_triv is None
    assert not report.qaut0.closed
