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

from coreason_cluster.exceptions import (
    DimensionMismatch,
    DirectionOutOfRange,
    MalformedQuiver,
    NotSkewSymmetrizable,
    ParseError,
)
from coreason_cluster.matrix import (
    apply_witness,
    canonical_matrix,
    components,
    find_skew_symmetrizer,
    format_matrix,
    format_quiver,
    is_gluing_free,
    is_skew_symmetric,
    matrices_isomorphic,
    matrix_to_quiver,
    mutate_matrix,
    mutate_matrix_path,
    negate,
    parse_matrix,
    parse_quiver,
    positive_part,
    principal_extension,
    quiver_to_matrix,
    relabel_matrix,
    trivial_part,
)
from coreason_cluster.models import Arrow, ExtMatrix, ValuedQuiver


@pytest.fixture
def nongroup() -> ExtMatrix:
    return ExtMatrix.from_rows([[0, 1], [-1, 0], [3, 0]])


@pytest.fixture
def cex1() -> ExtMatrix:
    return ExtMatrix.from_rows([[0, 1, 0], [-1, 0, -1], [0, 1, 0], [0, 0, 1]])


@pytest.fixture
def cex2() -> ExtMatrix:
    return ExtMatrix.from_rows([[0, 1, 1, -1], [-1, 0, 0, 0], [-1, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0]])


@pytest.fixture
def symmetrizable() -> ExtMatrix:
    return ExtMatrix.from_rows([[0, 1, 0, 0], [-1, 0, -1, 0], [0, 2, 0, 2], [0, 0, -2, 0], [0, 0, 0, -1]])


def test_positive_part() -> None:
    assert positive_part(3) == 3
    assert positive_part(-2) == 0
    assert positive_part(0) == 0


def test_mutation_reaches_printed_matrix(nongroup: ExtMatrix) -> None:
    assert mutate_matrix(nongroup, 1).entries == ((0, -1), (1, 0), (-3, 3))
    assert mutate_matrix_path(nongroup, [1, 2]).entries == ((0, 1), (-1, 0), (0, -3))


def test_mutation_sequence_flips_frozen_row(cex1: ExtMatrix) -> None:
    reached = mutate_matrix_path(cex1, [2, 1, 3])
    assert reached.entries == ((0, 1, 0), (-1, 0, -1), (0, 1, 0), (0, 0, -1))


def test_mutation_is_involution(symmetrizable: ExtMatrix) -> None:
    for k in range(1, 5):
        assert mutate_matrix_path(symmetrizable, [k, k]) == symmetrizable


def test_mutation_keeps_skew_symmetrizer(symmetrizable: ExtMatrix) -> None:
    d = find_skew_symmetrizer(symmetrizable.principal).d
    for k in range(1, 5):
        assert find_skew_symmetrizer(mutate_matrix(symmetrizable, k).principal).d == d


def test_mutation_direction_out_of_range(nongroup: ExtMatrix) -> None:
    with pytest.raises(DirectionOutOfRange):
        mutate_matrix(nongroup, 3)
    with pytest.raises(DirectionOutOfRange):
        mutate_matrix(nongroup, 0)


def test_skew_symmetrizer(symmetrizable: ExtMatrix) -> None:
    assert find_skew_symmetrizer(symmetrizable.principal).d == (2, 2, 1, 1)
    assert find_skew_symmetrizer(((0, 1), (-3, 0))).d == (3, 1)
    assert find_skew_symmetrizer(((0, 0), (0, 0))).d == (1, 1)


def test_skew_symmetrizer_rejects_bad_matrices() -> None:
    with pytest.raises(NotSkewSymmetrizable):
        find_skew_symmetrizer(((0, 1), (1, 0)))
    with pytest.raises(NotSkewSymmetrizable):
        find_skew_symmetrizer(((1, 0), (0, 0)))
    with pytest.raises(NotSkewSymmetrizable):
        find_skew_symmetrizer(((0, 1), (0, 0)))
    # ratios 1, 1 around the triangle but 2 on the closing edge
    with pytest.raises(NotSkewSymmetrizable):
        find_skew_symmetrizer(((0, 1, -1), (-1, 0, 1), (2, -1, 0)))
    with pytest.raises(DimensionMismatch):
        find_skew_symmetrizer(((0, 1),))


def test_ext_matrix_validation() -> None:
    with pytest.raises(ValidationError):
        ExtMatrix(entries=((0, 1), (1, 0)))
    with pytest.raises(ValidationError):
        ExtMatrix(entries=((0, 1),))
    with pytest.raises(DimensionMismatch):
        ExtMatrix.from_rows([[0, 1], [-1]])
    with pytest.raises(DimensionMismatch):
        ExtMatrix.from_rows([])
    b = ExtMatrix.from_rows([[0, 2], [-1, 0], [1, 1]])
    assert (b.n, b.m) == (2, 3)
    assert b.frozen_rows == ((1, 1),)


def test_components() -> None:
    assert components(((0, 1, 0), (-1, 0, 0), (0, 0, 0))) == [[0, 1], [2]]


def test_relabel_keeps_frozen_rows_in_place(cex2: ExtMatrix) -> None:
    swapped = relabel_matrix(cex2, (1, 3, 2, 4))
    assert swapped.principal == cex2.principal
    assert swapped.frozen_rows == ((0, 0, 1, 0),)
    with pytest.raises(DimensionMismatch):
        relabel_matrix(cex2, (1, 1, 2, 3))


def test_negate_extension_and_trivial_part(nongroup: ExtMatrix) -> None:
    assert negate(nongroup).entries == ((0, -1), (1, 0), (-3, 0))
    assert principal_extension(nongroup).entries == ((0, 1), (-1, 0), (1, 0), (0, 1))
    assert trivial_part(nongroup).entries == ((0, 1), (-1, 0))
    assert is_skew_symmetric(nongroup.principal)
    assert not is_skew_symmetric(((0, 2), (-1, 0)))


def test_gluing_free() -> None:
    assert is_gluing_free(ExtMatrix.from_rows([[0, 1], [-1, 0], [1, 0], [0, 1]]))
    assert not is_gluing_free(ExtMatrix.from_rows([[0, 1], [-1, 0], [1, 0], [1, 0]]))


def test_quiver_of_symmetrizable_matrix(symmetrizable: ExtMatrix) -> None:
    quiver = matrix_to_quiver(symmetrizable)
    assert quiver.frozen == (5,)
    assert Arrow(source=3, target=4, value=(2, 2)) in quiver.arrows
    assert Arrow(source=4, target=5, value=(1, 1)) in quiver.arrows
    assert quiver_to_matrix(quiver).entries == symmetrizable.entries


def test_malformed_quivers() -> None:
    def build(*arrows: Arrow, frozen: tuple[int, ...] = ()) -> ValuedQuiver:
        return ValuedQuiver(mutable=(1, 2), frozen=frozen, arrows=arrows)

    with pytest.raises(MalformedQuiver):
        quiver_to_matrix(build(Arrow(source=1, target=1, value=(1, 1))))
    with pytest.raises(MalformedQuiver):
        quiver_to_matrix(build(Arrow(source=1, target=2, value=(1, 1)), Arrow(source=2, target=1, value=(1, 1))))
    with pytest.raises(MalformedQuiver):
        quiver_to_matrix(build(Arrow(source=3, target=4, value=(1, 1)), frozen=(3, 4)))
    with pytest.raises(MalformedQuiver):
        quiver_to_matrix(build(Arrow(source=3, target=1, value=(1, 2)), frozen=(3,)))
    with pytest.raises(MalformedQuiver):
        quiver_to_matrix(build(Arrow(source=1, target=7, value=(1, 1))))
    with pytest.raises(MalformedQuiver):
        quiver_to_matrix(ValuedQuiver(mutable=(2, 3)))


def test_parse_and_format_matrix(cex1: ExtMatrix) -> None:
    text = "# A3 with one frozen row\n3 4\n0 1 0\n-1 0 -1\n\n0 1 0\n0 0 1\n"
    assert parse_matrix(text) == cex1
    assert parse_matrix(format_matrix(cex1)) == cex1


def test_parse_matrix_reports_position() -> None:
    with pytest.raises(ParseError) as excinfo:
        parse_matrix("2 2\n0 1\n-1 x\n", source="bad.mat")
    assert excinfo.value.line == 3
    assert excinfo.value.column == 4
    assert "bad.mat" in str(excinfo.value)
    with pytest.raises(ParseError):
        parse_matrix("")
    with pytest.raises(ParseError):
        parse_matrix("2\n0 1\n")
    with pytest.raises(ParseError):
        parse_matrix("2 3\n0 1\n-1 0\n")
    with pytest.raises(ParseError):
        parse_matrix("2 2\n0 1\n-1 0 4\n")
    with pytest.raises(ParseError):
        parse_matrix("3 2\n0 1\n-1 0\n")


def test_parse_quiver(symmetrizable: ExtMatrix) -> None:
    text = format_quiver(matrix_to_quiver(symmetrizable))
    assert text.startswith("v 4 1\n")
    assert parse_quiver(text) == symmetrizable
    with pytest.raises(ParseError):
        parse_quiver("")
    with pytest.raises(ParseError):
        parse_quiver("q 2 0\n")
    with pytest.raises(ParseError):
        parse_quiver("v 2 0\nb 1 2 1 1\n")
    with pytest.raises(ParseError):
        parse_quiver("v 2 0\na 1 2 1\n")
    with pytest.raises(ParseError):
        parse_quiver("v 2 0\na 0 2 1 1\n")


def test_canonical_form_ignores_labeling(cex2: ExtMatrix) -> None:
    entries, sigma = canonical_matrix(cex2)
    assert relabel_matrix(cex2, sigma).entries == entries
    for perm in [(2, 1, 3, 4), (4, 3, 2, 1), (3, 4, 1, 2)]:
        assert canonical_matrix(relabel_matrix(cex2, perm))[0] == entries


def test_canonical_form_separates_frozen_rows(cex2: ExtMatrix) -> None:
    other = ExtMatrix.from_rows([[0, 1, 1, -1], [-1, 0, 0, 0], [-1, 0, 0, 0], [1, 0, 0, 0], [1, 0, 0, 0]])
    assert canonical_matrix(cex2)[0] != canonical_matrix(other)[0]


def test_no_direct_isomorphism_after_mutation(cex1: ExtMatrix) -> None:
    reached = mutate_matrix_path(cex1, [2, 1, 3])
    assert matrices_isomorphic(cex1, reached, direct=True) is None
    assert matrices_isomorphic(cex1, reached, direct=False) is None


def test_isomorphism_witness(cex2: ExtMatrix) -> None:
    swapped = relabel_matrix(cex2, (1, 3, 2, 4))
    witness = matrices_isomorphic(cex2, swapped)
    assert witness is not None
    assert witness.sign == 1
    assert apply_witness(swapped, witness) == cex2
    assert matrices_isomorphic(trivial_part(cex2), trivial_part(swapped)) is not None


def test_inverse_isomorphism(nongroup: ExtMatrix) -> None:
    # swapping 1 and 2 fixes the principal part but moves the frozen entry
    assert matrices_isomorphic(nongroup, negate(nongroup), direct=False) is None
    a3 = ExtMatrix.from_rows([[0, 1, 0], [-1, 0, -1], [0, 1, 0]])
    witness = matrices_isomorphic(a3, negate(a3), direct=False)
    assert witness is not None
    assert witness.sign == -1
    assert matrices_isomorphic(a3, negate(a3), direct=True) is None
    assert matrices_isomorphic(a3, nongroup) is None
