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
Automorphism groups of finite-type cluster algebras.

Elements of Aut+(A_triv) are pairs (seed in the exchange graph, relabeling)
whose relabeled matrix is the root matrix. Each pair acts on the finite set
of cluster variables; the action is read off the exchange graph by walking
the root and the target seed in parallel, so no symbolic substitution is
needed. Group invariants come from sympy permutation groups.
"""

from collections import Counter, deque
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field
from sympy.combinatorics import Permutation, PermutationGroup

from .exceptions import NotFinite
from .explorer import ExchangeGraph, explore, star_condition
from .lattice import determinant, lat_equal
from .matrix import mutate_matrix_path, relabel_matrix, trivial_part
from .models import ExtMatrix, GroupReport, IntMatrix, QautReport, RelationOutcome, RelationReport
from .morphism import SeedMap, seed_map, seed_maps_equal
from .seed import LabeledSeed, initial_seed
from .utils.logger import logger

Word = Sequence[str]


class SeedSymmetry(BaseModel):
    """One automorphism: the target node, the relabeling and the induced permutation."""

    model_config = ConfigDict(frozen=True)

    target: str = Field(..., description="Digest of the target node")
    path: Tuple[int, ...] = Field(..., description="Mutation path of the target representative")
    sigma: Tuple[int, ...] = Field(..., description="1-based relabeling of the target representative")
    sign: int = Field(default=1, description="+1 direct, -1 inverse")
    induced: Tuple[int, ...] = Field(..., description="Image of each cluster variable id")


class SeedGenerator(BaseModel):
    """A seed map given by a mutation path, a relabeling and optional monomial exponents."""

    model_config = ConfigDict(frozen=True)

    path: Tuple[int, ...] = ()
    relabel: Optional[Tuple[int, ...]] = None
    matrix: Optional[IntMatrix] = Field(default=None, description="Exponents in the target seed's variables")


class _VariableIndex:
    """Cluster variables of a finite exchange graph as integer ids."""

    def __init__(self, graph: ExchangeGraph):
        self.ids: Dict[str, int] = {}
        self.clusters: Dict[str, Tuple[int, ...]] = {}
        self.by_set: Dict[FrozenSet[int], str] = {}
        for digest in graph.order:
            labels = []
            for x in graph.nodes[digest].cluster:
                text = str(x)
                labels.append(self.ids.setdefault(text, len(self.ids)))
            self.clusters[digest] = tuple(labels)
            self.by_set[frozenset(labels)] = digest
        self.neighbors = graph.neighbors

    def __len__(self) -> int:
        return len(self.ids)

    def exchange(self, cluster: Tuple[int, ...], k: int) -> Tuple[int, ...]:
        """The labeled cluster after mutating ``cluster`` at k."""
        digest = self.by_set[frozenset(cluster)]
        representative = self.clusters[digest]
        leaving = cluster[k - 1]
        neighbor = self.neighbors[digest][representative.index(leaving) + 1]
        (entering,) = set(self.clusters[neighbor]) - set(cluster)
        return cluster[: k - 1] + (entering,) + cluster[k:]


def _relabelings(b: IntMatrix, other: IntMatrix, sign: int) -> List[Tuple[int, ...]]:
    """All sigma with other[sigma(i)][sigma(j)] = sign * b[i][j]."""
    n = len(b)
    found: List[Tuple[int, ...]] = []

    def extend(assigned: List[int], used: List[bool]) -> None:
        i = len(assigned)
        if i == n:
            found.append(tuple(v + 1 for v in assigned))
            return
        for j in range(n):
            if used[j] or other[j][j] != sign * b[i][i]:
                continue
            if any(
                other[j][assigned[p]] != sign * b[i][p] or other[assigned[p]][j] != sign * b[p][i] for p in range(i)
            ):
                continue
            used[j] = True
            assigned.append(j)
            extend(assigned, used)
            assigned.pop()
            used[j] = False

    extend([], [False] * n)
    return found


def _induced(index: _VariableIndex, root: Tuple[int, ...], image: Tuple[int, ...]) -> Tuple[int, ...]:
    mapping: Dict[int, int] = {}
    seen = {frozenset(root)}
    queue = deque([(root, image)])
    while queue:
        source, target = queue.popleft()
        mapping.update(zip(source, target, strict=True))
        for k in range(1, len(source) + 1):
            next_source = index.exchange(source, k)
            if frozenset(next_source) in seen:
                continue
            seen.add(frozenset(next_source))
            queue.append((next_source, index.exchange(target, k)))
    return tuple(mapping[v] for v in range(len(index)))


def element_order_profile(perms: Sequence[Permutation]) -> Dict[int, int]:
    return dict(Counter(p.order() for p in perms))


def _report(elements: Sequence[SeedSymmetry]) -> GroupReport:
    perms = [Permutation(list(e.induced)) for e in elements]
    group = PermutationGroup(perms)
    generators: List[Permutation] = []
    for p in perms:
        if not generators or not PermutationGroup(generators).contains(p):
            generators.append(p)
    closed = group.order() == len(perms)
    if not closed:
        logger.warning(f"enumerated {len(perms)} elements but they generate a group of order {group.order()}")
    return GroupReport(
        order=len(perms),
        abelian=group.is_abelian,
        cyclic=group.is_cyclic,
        element_orders=element_order_profile(perms),
        generators=[list(g.array_form) for g in generators if not g.is_Identity] or [list(perms[0].array_form)],
        closed=closed,
    )


def _trivial_graph(root: LabeledSeed, cap: int, max_terms: Optional[int]) -> ExchangeGraph:
    trivial = initial_seed(trivial_part(root.matrix))
    graph = explore(trivial, cap=cap, max_terms=max_terms)
    if not graph.finite:
        raise NotFinite(f"exchange graph exceeds {cap} nodes")
    return graph


def direct_automorphisms_triv(
    root: LabeledSeed,
    include_inverse: bool = False,
    cap: int = 100_000,
    max_terms: Optional[int] = None,
) -> Tuple[List[SeedSymmetry], GroupReport]:
    """Enumerates Aut+(A_triv), optionally with the inverse automorphisms.

    Frozen rows of ``root`` are ignored.

    Raises:
        NotFinite: If the exchange graph does not close within ``cap`` nodes.
    """
    return _automorphisms(_trivial_graph(root, cap, max_terms), include_inverse)


def _automorphisms(graph: ExchangeGraph, include_inverse: bool) -> Tuple[List[SeedSymmetry], GroupReport]:
    index = _VariableIndex(graph)
    b = graph.root.matrix.principal
    root_cluster = index.clusters[graph.order[0]]
    signs = (1, -1) if include_inverse else (1,)
    elements: List[SeedSymmetry] = []
    for digest in graph.order:
        representative = graph.nodes[digest]
        for sign in signs:
            for sigma in _relabelings(b, representative.matrix.principal, sign):
                image = tuple(index.clusters[digest][v - 1] for v in sigma)
                elements.append(
                    SeedSymmetry(
                        target=digest,
                        path=representative.path,
                        sigma=sigma,
                        sign=sign,
                        induced=_induced(index, root_cluster, image),
                    )
                )
    logger.info(f"found {len(elements)} automorphisms over {len(graph.nodes)} seeds")
    return elements, _report(elements)


def _lifted(root: ExtMatrix, element: SeedSymmetry) -> ExtMatrix:
    return relabel_matrix(mutate_matrix_path(root, element.path), element.sigma)


def aut0_order(root: ExtMatrix, elements: Sequence[SeedSymmetry]) -> int:
    """Direct cluster automorphisms of the algebra with coefficients, up to coefficient permutations."""
    frozen = sorted(root.frozen_rows)
    return sum(1 for e in elements if e.sign == 1 and sorted(_lifted(root, e).frozen_rows) == frozen)


def qaut0_group(root: LabeledSeed, cap: int = 100_000, max_terms: Optional[int] = None) -> QautReport:
    """QAut_0 as the subgroup of Aut+(A_triv) whose elements lift with an equal row lattice.

    Raises:
        StarConditionUnknown: If the principal part fails every sufficient check.
        NotFinite: If the exchange graph does not close within ``cap`` nodes.
    """
    reason = star_condition(root.matrix, max_terms=max_terms)
    graph = _trivial_graph(root, cap, max_terms)
    elements, aut_triv = _automorphisms(graph, include_inverse=False)
    kept = [e for e in elements if lat_equal(_lifted(root.matrix, e), root.matrix)]
    qaut = _subgroup_report(kept, aut_triv)
    logger.info(f"QAut_0 has order {qaut.order}, index {qaut.subgroup_index_in_aut_triv} in Aut+")
    return QautReport(
        qaut0=qaut,
        aut_triv=aut_triv,
        aut0_order=aut0_order(root.matrix, elements),
        star_reason=reason,
        unimodular_everywhere=_unimodular_everywhere(root.matrix, graph),
    )


def _subgroup_report(kept: Sequence[SeedSymmetry], aut_triv: GroupReport) -> GroupReport:
    if not kept:
        logger.warning("no automorphism of the trivial algebra lifts with an equal row lattice")
        return GroupReport(order=0, abelian=True, cyclic=False, element_orders={}, closed=False)
    return _report(kept).model_copy(update={"subgroup_index_in_aut_triv": aut_triv.order // len(kept)})


def _unimodular_everywhere(root: ExtMatrix, graph: ExchangeGraph) -> Optional[bool]:
    """Frozen block determinant at every seed; only defined when the block is square."""
    if root.m != 2 * root.n:
        return None
    n = root.n
    for digest in graph.order:
        reached = mutate_matrix_path(root, graph.nodes[digest].path)
        if abs(determinant([row[:n] for row in reached.frozen_rows])) != 1:
            logger.debug(f"frozen block is not unimodular after path {graph.nodes[digest].path}")
            return False
    return True


def _evaluate(word: Word, maps: Dict[str, SeedMap], m: int) -> SeedMap:
    result = SeedMap.identity(m)
    for name in reversed(word):
        result = maps[name].compose(result)
    return result


def relation_check(
    root: LabeledSeed,
    generators: Dict[str, SeedGenerator],
    relations: Sequence[Tuple[Word, Word]],
) -> RelationReport:
    """Evaluates each relation lhs = rhs as composite seed maps on ``root``.

    A word ``a b`` is the map a o b. Both sides are compared up to
    proportionality of the cluster images, with equal yhat images.
    """
    maps = {name: seed_map(root, g.path, g.relabel, g.matrix) for name, g in generators.items()}
    report = RelationReport()
    for lhs, rhs in relations:
        holds = seed_maps_equal(_evaluate(lhs, maps, root.m), _evaluate(rhs, maps, root.m), root)
        logger.debug(f"relation {' '.join(lhs)} = {' '.join(rhs) or 'id'}: {holds}")
        report.relations.append(RelationOutcome(lhs=list(lhs), rhs=list(rhs), holds=holds))
    return report
