# Copyright (c) 2025 CoReason, Inc.
#
# This software is proprietary and dual-licensed.
# Licensed under the Prosperity Public License 3.0 (the "License").
# A copy of the license is available at https://prosperitylicense.com/versions/3.0.0
# For details, see the LICENSE file.
# Commercial use beyond a 30-day trial requires a separate license.
#
# Source Code: https://github.com/CoReason-AI/coreason_cluster

from typing import List

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coreason_cluster.exceptions import DimensionMismatch, PrincipalPartsDiffer
from coreason_cluster.lattice import (
    determinant,
    hnf,
    hnf_with_transform,
    is_unimodular,
    lat_equal,
    left_kernel,
    multiply,
    solve_block_matrix,
    solve_left,
    span_contains,
    xgcd,
)
from coreason_cluster.fixtures import load_map
from coreason_cluster.matrix import mutate_matrix, mutate_matrix_path, principal_extension, relabel_matrix
from coreason_cluster.models import ExtMatrix


@pytest.fixture
def nongroup() -> ExtMatrix:
    return ExtMatrix.from_rows([[0, 1], [-1, 0], [3, 0]])


@pytest.fixture
def cex2() -> ExtMatrix:
    return ExtMatrix.from_rows([[0, 1, 1, -1], [-1, 0, 0, 0], [-1, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0]])


@pytest.mark.parametrize("a, b", [(12, 18), (-4, 6), (7, 0), (0, -5), (35, 64)])
def test_xgcd(a: int, b: int) -> None:
    x, y, g = xgcd(a, b)
    assert g >= 0
    assert x * a + y * b == g
    assert (a % g == 0 and b % g == 0) if g else a == b == 0


def test_hermite_normal_form() -> None:
    basis = hnf([[2, 4], [1, 3]])
    assert basis.rows == ((1, 1), (0, 2))
    assert basis.rank == 2
    assert basis.pivots() == [0, 1]


def test_transform_is_unimodular() -> None:
    rows = [[0, 1, 1, -1], [-1, 0, 0, 0], [-1, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0]]
    h, u, rank = hnf_with_transform(rows)
    assert rank == 3
    assert [list(r) for r in multiply(u, rows)] == h
    assert is_unimodular(u)
    with pytest.raises(DimensionMismatch):
        hnf_with_transform([[1, 2], [3]])


def test_span_membership(cex2: ExtMatrix) -> None:
    lattice = [[2, 4], [1, 3]]
    assert span_contains(lattice, (2, 0))
    assert not span_contains(lattice, (0, 1))
    assert not span_contains(cex2, (0, 0, 1, 0))
    assert span_contains(cex2, (0, 1, 0, 0))
    with pytest.raises(DimensionMismatch):
        span_contains(hnf(lattice), (1, 2, 3))


def test_lattice_equality(nongroup: ExtMatrix) -> None:
    assert lat_equal([[2, 4], [1, 3]], [[1, 1], [0, 2]])
    assert not lat_equal([[2, 4], [1, 3]], [[1, 0], [0, 1]])
    assert not lat_equal([[1, 0]], [[1, 0, 0]])
    for k in (1, 2):
        assert lat_equal(nongroup, mutate_matrix(nongroup, k))


def test_solve_left_and_kernel() -> None:
    assert solve_left([[0, 1], [-1, 0]], (-3, -3)) == [-3, 3]
    assert solve_left([[2, 0]], (1, 0)) is None
    assert left_kernel([[1, 2], [2, 4]]).rows == ((2, -1),)
    assert left_kernel([[1, 0], [0, 1]]).rank == 0


def test_determinant() -> None:
    assert determinant([[2, 4], [1, 3]]) == 2
    assert determinant([]) == 1
    assert is_unimodular([[1, 1], [0, 1]])
    assert not is_unimodular([[2]])


def test_block_matrix_for_weighted_frozen_arrow(nongroup: ExtMatrix) -> None:
    target = mutate_matrix_path(nongroup, [1, 2])
    solution = solve_block_matrix(nongroup, target)
    assert solution is not None
    assert solution.matrix == ((1, 0, 0), (0, 1, 0), (-3, 3, 1))
    assert multiply(solution.matrix, nongroup.entries) == target.entries


def test_block_matrix_with_prescribed_frozen_block(nongroup: ExtMatrix) -> None:
    target = mutate_matrix_path(nongroup, [1, 2])
    solution = solve_block_matrix(nongroup, target, frozen_block=[[2]])
    assert solution is not None
    assert solution.matrix[2] == (-3, 6, 2)
    assert solution.matrix == load_map("nongroup", "psi")
    assert multiply(solution.matrix, nongroup.entries) == target.entries


@pytest.mark.parametrize("weight", [-1, 0, 1, 2, 5])
def test_block_matrix_frozen_block_spans_the_solution_coset(nongroup: ExtMatrix, weight: int) -> None:
    target = mutate_matrix_path(nongroup, [1, 2])
    solution = solve_block_matrix(nongroup, target, frozen_block=[[weight]])
    assert solution is not None
    assert solution.matrix[2] == (-3, 3 * weight, weight)


def test_block_matrix_prescribed_block_without_solution(cex2: ExtMatrix) -> None:
    assert solve_block_matrix(cex2, cex2, frozen_block=[[2]]) is None
    with pytest.raises(DimensionMismatch):
        solve_block_matrix(cex2, cex2, frozen_block=[[1, 0]])


def test_block_matrix_into_more_frozen_rows(nongroup: ExtMatrix) -> None:
    target = principal_extension(nongroup)
    solution = solve_block_matrix(nongroup, target)
    assert solution is not None
    assert len(solution.matrix) == 4
    assert multiply(solution.matrix, nongroup.entries) == target.entries


def test_block_matrix_outside_lattice(cex2: ExtMatrix) -> None:
    assert solve_block_matrix(cex2, relabel_matrix(cex2, (1, 3, 2, 4))) is None


def test_block_matrix_needs_equal_principal_parts(nongroup: ExtMatrix) -> None:
    with pytest.raises(PrincipalPartsDiffer):
        solve_block_matrix(nongroup, mutate_matrix(nongroup, 1))


def test_multiply_shapes() -> None:
    assert multiply([[1, 2]], [[3], [4]]) == ((11,),)
    with pytest.raises(DimensionMismatch):
        multiply([[1, 2]], [[3]])


small = st.integers(min_value=-3, max_value=3)
row_lists = st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4)


@settings(max_examples=50)
@given(row_lists, st.data())
def test_hnf_is_invariant_under_row_operations(rows: List[List[int]], data: st.DataObject) -> None:
    shuffled = data.draw(st.permutations(rows))
    weights = data.draw(st.lists(small, min_size=len(rows), max_size=len(rows)))
    combination = list(multiply([weights], rows)[0])
    assert hnf(shuffled + [combination], 3) == hnf(rows, 3)
    i = data.draw(st.integers(min_value=0, max_value=len(rows) - 1))
    j = data.draw(st.integers(min_value=0, max_value=len(rows) - 1))
    c = data.draw(small)
    if i != j:
        sheared = [list(r) for r in rows]
        sheared[i] = [a + c * b for a, b in zip(sheared[i], rows[j], strict=True)]
        assert hnf(sheared, 3) == hnf(rows, 3)


def _unimodular_mix(rows: List[List[int]], data: st.DataObject) -> List[List[int]]:
    mixed = [list(r) for r in data.draw(st.permutations(rows))]
    for _ in range(data.draw(st.integers(min_value=0, max_value=3))):
        i = data.draw(st.integers(min_value=0, max_value=len(mixed) - 1))
        j = data.draw(st.integers(min_value=0, max_value=len(mixed) - 1))
        if i != j:
            c = data.draw(small)
            mixed[i] = [a + c * b for a, b in zip(mixed[i], mixed[j], strict=True)]
    return mixed


@settings(max_examples=50)
@given(row_lists, row_lists, st.data())
def test_lattice_equality_is_an_equivalence(a: List[List[int]], other: List[List[int]], data: st.DataObject) -> None:
    assert lat_equal(a, a)
    assert lat_equal(a, other) == lat_equal(other, a)
    b = _unimodular_mix(a, data)
    c = _unimodular_mix(b, data)
    assert lat_equal(a, b) and lat_equal(b, c)
    assert lat_equal(a, c)
    if lat_equal(a, other):
        assert lat_equal(b, other)
    else:
        assert not lat_equal(c, other)


@st.composite
def principal_parts(draw: st.DrawFn) -> List[List[int]]:
    n = draw(st.integers(min_value=2, max_value=3))
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = draw(st.integers(min_value=-2, max_value=2))
            rows[i][j], rows[j][i] = v, -v
    return rows


@settings(max_examples=50)
@given(principal_parts(), st.data())
def test_single_frozen_row_checks_decide_the_stacked_block(principal: List[List[int]], data: st.DataObject) -> None:
    n = len(principal)
    path = data.draw(st.lists(st.integers(min_value=1, max_value=n), max_size=4))
    frozen = data.draw(st.lists(st.lists(small, min_size=n, max_size=n), min_size=2, max_size=3))
    singles = [ExtMatrix.from_rows(principal + [row]) for row in frozen]
    stacked = ExtMatrix.from_rows(principal + frozen)
    reached = mutate_matrix_path(stacked, path)
    assert reached.frozen_rows == tuple(mutate_matrix_path(s, path).frozen_rows[0] for s in singles)
    if all(lat_equal(mutate_matrix_path(s, path), s) for s in singles):
        assert lat_equal(reached, stacked)


def test_stacked_block_over_a_degenerate_principal_part() -> None:
    # principal lattice 2Z x 2Z; each row alone keeps its lattice along 1, 2, 1
    principal = [[0, 2], [-2, 0]]
    frozen = [[1, 0], [0, 1], [1, 1]]
    stacked = ExtMatrix.from_rows(principal + frozen)
    for row in frozen:
        single = ExtMatrix.from_rows(principal + [row])
        assert lat_equal(mutate_matrix_path(single, [1, 2, 1]), single)
    assert lat_equal(mutate_matrix_path(stacked, [1, 2, 1]), stacked)
