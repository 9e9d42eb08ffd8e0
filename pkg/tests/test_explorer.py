# Copyright (c) 2025 CoReason, Inc.
#
# This software is proprietary and dual-licensed.
# Licensed under the Prosperity Public License 3.0 (the "License").
# A copy of the license is available at https://prosperitylicense.com/versions/3.0.0
# For details, see the LICENSE file.
# Commercial use beyond a 30-day trial requires a separate license.
#
# Source Code: https://github.com/CoReason-AI/coreason_cluster


from math import comb
from typing import Callable, FrozenSet, Optional, Set

import pytest

from coreason_cluster.exceptions import NotBipartite, StarConditionUnknown
from coreason_cluster.explorer import (
    ExchangeGraph,
    bipartite_check,
    explore,
    seed_key,
    star_condition,
    tau_apply,
    tau_lat_invariance,
    tau_matrix,
    tau_orbit_length,
    tau_path,
)
from coreason_cluster.fixtures import load_matrix
from coreason_cluster.lattice import lat_equal
from coreason_cluster.matrix import principal_extension, relabel_matrix, trivial_part
from coreason_cluster.models import ExtMatrix, KeyMode
from coreason_cluster.seed import initial_seed, mutate_seed_path, relabel_seed


def cluster_count(name: str) -> int:
    family, n = name[0], int(name[1:])
    if family == "A":
        return comb(2 * n + 2, n + 1) // (n + 2)
    if family in "BC":
        return comb(2 * n, n)
    return (3 * n - 2) * comb(2 * n - 2, n - 1) // n


@pytest.mark.parametrize("name, nodes", [("A2", 5), ("A3", 14), ("B2", 6), ("B3", 20), ("D4", 50)])
def test_census_of_finite_types(name: str, nodes: int) -> None:
    graph = explore(initial_seed(load_matrix(name)))
    census = graph.census()
    assert census.nodes == nodes == cluster_count(name)
    assert census.finite
    assert not census.cap_hit
    assert graph.is_regular()


@pytest.mark.parametrize("name", ["A2", "A3", "B3"])
def test_coefficients_do_not_change_the_graph(name: str) -> None:
    b = load_matrix(name)
    trivial = explore(initial_seed(b)).census().nodes
    assert explore(initial_seed(principal_extension(b))).census().nodes == trivial
    assert explore(initial_seed(principal_extension(b)), mode=KeyMode.MATRIX_ONLY).census().nodes == trivial


def test_discovery_order_is_reproducible() -> None:
    root = initial_seed(load_matrix("A3"))
    first, second = explore(root), explore(root)
    assert first.order == second.order
    assert first.root is root
    assert first.neighbors == second.neighbors


def test_cap_leaves_the_graph_open() -> None:
    graph = explore(initial_seed(load_matrix("A3")), cap=5)
    assert graph.census().nodes == 5
    assert graph.cap_hit
    assert not graph.finite
    assert not graph.is_regular()
    with pytest.raises(ValueError):
        explore(initial_seed(load_matrix("A3")), cap=0)


def test_term_limit_leaves_the_graph_open() -> None:
    graph = explore(initial_seed(load_matrix("A3")), max_terms=2)
    assert graph.cap_hit
    assert not graph.finite


def test_dot_output() -> None:
    graph = explore(initial_seed(load_matrix("A2")))
    dot = graph.to_dot()
    assert dot.startswith("graph {\n")
    assert dot.endswith("}\n")
    assert dot.count(" -- ") == 5


def test_seed_keys_ignore_labels() -> None:
    root = initial_seed(load_matrix("cex2"))
    swapped = relabel_seed(root, (2, 1, 3, 4))
    for mode in KeyMode:
        assert seed_key(root, mode) == seed_key(swapped, mode)
    assert seed_key(root) != seed_key(mutate_seed_path(root, [1]))


def test_bipartite_split() -> None:
    assert bipartite_check(load_matrix("A3")) == ([1, 3], [2])
    assert bipartite_check(((0, 1, 0), (-1, 0, 1), (0, -1, 0))) is None
    assert bipartite_check(((0,),)) == ([1], [])


def test_tau_path() -> None:
    a3 = load_matrix("A3")
    assert tau_path(a3, 1) == [2, 1, 3]
    assert tau_path(a3, -2) == [1, 3, 2, 1, 3, 2]
    assert tau_path(a3, 0) == []
    with pytest.raises(NotBipartite):
        tau_path(((0, 1, 0), (-1, 0, 1), (0, -1, 0)), 1)


def test_tau_keeps_the_orientation() -> None:
    b = load_matrix("D4").with_frozen(((1, -2, 3, 0),))
    moved = tau_matrix(b, 1)
    assert moved.principal == b.principal
    assert tau_matrix(moved, -1).entries == b.entries
    root = initial_seed(b)
    assert tau_apply(tau_apply(root, 2), -2).cluster == root.cluster


def test_tau_lattice_invariance() -> None:
    b = load_matrix("A3").with_frozen(((2, -1, 3),))
    report = tau_lat_invariance(b, [1, -1, 2, -2])
    assert report.passed
    assert report.powers == [1, -1, 2, -2]
    assert tau_lat_invariance(initial_seed(b), [3]).passed


@pytest.mark.parametrize(
    "s, t, length",
    [(1, 1, 5), (1, 2, 3), (2, 1, 3), (1, 3, 4), (3, 1, 4), (2, 2, None), (1, 4, None)],
)
def test_rank_two_tau_orbits(s: int, t: int, length: Optional[int]) -> None:
    assert tau_orbit_length(((0, s), (-t, 0)), limit=200) == length


def test_tau_orbit_ignores_labels() -> None:
    a2 = load_matrix("A2")
    assert tau_orbit_length(a2) == tau_orbit_length(relabel_matrix(a2, (2, 1)).principal)


def test_star_condition() -> None:
    assert star_condition(load_matrix("A3")) == "skew-symmetric"
    assert star_condition(load_matrix("B2")) == "nondegenerate"
    assert star_condition(load_matrix("B3")) == "finite type"
    with pytest.raises(StarConditionUnknown):
        star_condition(ExtMatrix.from_rows([[0, 4, 0], [-1, 0, 1], [0, -1, 0]]), cap=12)


@pytest.mark.parametrize("power", [1, -1, 2, -2])
def test_d4_frozen_row_keeps_its_lattice_only_without_the_leaf_swap(power: int) -> None:
    b = load_matrix("D4").with_frozen(((0, 1, 0, 0),))
    assert tau_lat_invariance(b, [power]).passed
    swapped = relabel_matrix(tau_matrix(b, power), (1, 3, 2, 4))
    assert swapped.principal == b.principal
    assert not lat_equal(b, swapped)


def _edges(graph: ExchangeGraph, rename: Callable[[str], str]) -> Set[FrozenSet[str]]:
    return {frozenset((rename(d), rename(e))) for d, links in graph.neighbors.items() for e in links.values()}


@pytest.mark.parametrize("name", ["A2", "A3", "B3", "cex1"])
def test_coefficient_graph_is_isomorphic_to_the_trivial_graph(name: str) -> None:
    b = load_matrix(name)
    trivial_root = initial_seed(trivial_part(b))
    trivial = explore(trivial_root)
    principal = explore(initial_seed(principal_extension(b)))

    def along_path(digest: str) -> str:
        return seed_key(mutate_seed_path(trivial_root, principal.nodes[digest].path)).digest

    image = {d: along_path(d) for d in principal.order}
    assert sorted(image.values()) == sorted(trivial.order)
    assert _edges(principal, image.__getitem__) == _edges(trivial, lambda d: d)
    assert principal.is_regular() and trivial.is_regular()


def test_d4_census_with_coefficients() -> None:
    b = load_matrix("cex2")
    with_coefficients = explore(initial_seed(b)).census()
    assert with_coefficients.nodes == 50 == cluster_count("D4")
    assert with_coefficients.finite
    assert explore(initial_seed(trivial_part(b))).census().nodes == 50
