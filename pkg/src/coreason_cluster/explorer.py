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
Exchange graphs and the bipartite tau move.

Unlabeled seeds are identified by keys. In symbolic mode the key is the
sorted multiset of printed cluster variables, since the cluster determines the
seed. In matrix_only mode it is the canonical form of the extended matrix,
which is cheaper but may identify seeds carrying equal matrices.
"""

import hashlib
from collections import deque
from typing import Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from .exceptions import NotBipartite, StarConditionUnknown, TermLimitExceeded
from .lattice import determinant, lat_equal
from .matrix import canonical_matrix, is_skew_symmetric, mutate_matrix_path, principal_extension
from .models import Census, ExtMatrix, IntMatrix, KeyMode, TauInvarianceReport
from .seed import LabeledSeed, initial_seed, mutate_seed, mutate_seed_path
from .utils.logger import logger

Principal = Union[ExtMatrix, Sequence[Sequence[int]]]

_STAR_CAP = 5000


class SeedKey(BaseModel):
    """Identity of an unlabeled seed."""

    model_config = ConfigDict(frozen=True)

    mode: KeyMode
    digest: str = Field(..., description="sha256 of the canonical encoding")


class ExchangeGraph(BaseModel):
    """Nodes keyed by SeedKey digest with one representative labeled seed each.

    ``neighbors[d][k]`` is the node reached from ``d`` by mutating its
    representative in direction k.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    mode: KeyMode
    nodes: Dict[str, LabeledSeed] = Field(default_factory=dict)
    order: List[str] = Field(default_factory=list, description="Digests in discovery order")
    neighbors: Dict[str, Dict[int, str]] = Field(default_factory=dict)
    finite: bool = False
    cap_hit: bool = False

    @property
    def root(self) -> LabeledSeed:
        return self.nodes[self.order[0]]

    def census(self) -> Census:
        return Census(nodes=len(self.nodes), finite=self.finite, cap_hit=self.cap_hit)

    def is_regular(self) -> bool:
        n = self.root.n
        return all(sorted(self.neighbors.get(d, {})) == list(range(1, n + 1)) for d in self.order)

    def to_dot(self) -> str:
        position = {d: idx for idx, d in enumerate(self.order)}
        lines = ["graph {"]
        for d in self.order:
            for k, other in sorted(self.neighbors.get(d, {}).items()):
                if position[d] < position[other]:
                    lines.append(f'  "{d}" -- "{other}" [label="{k}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def seed_key(s: LabeledSeed, mode: KeyMode = KeyMode.SYMBOLIC) -> SeedKey:
    if mode is KeyMode.SYMBOLIC:
        text = "|".join(sorted(str(x) for x in s.cluster))
    else:
        entries, _ = canonical_matrix(s.matrix)
        text = ";".join(",".join(str(v) for v in row) for row in entries)
    return SeedKey(mode=mode, digest=_digest(text))


def explore(
    root: LabeledSeed,
    cap: int = 1_000_000,
    mode: KeyMode = KeyMode.SYMBOLIC,
    max_terms: Optional[int] = None,
) -> ExchangeGraph:
    """Breadth-first closure of ``root`` under all n mutations.

    Directions are tried 1..n and the frontier is FIFO, so discovery order
    is reproducible. Once ``cap`` nodes are known no new node is added; the
    graph is then reported as not finite within the cap.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    graph = ExchangeGraph(mode=mode)
    start = seed_key(root, mode).digest
    graph.nodes[start] = root
    graph.order.append(start)
    queue = deque([start])
    logger.info(f"exploring exchange graph of rank {root.n} ({mode.value} keys, cap {cap})")
    while queue:
        digest = queue.popleft()
        current = graph.nodes[digest]
        links = graph.neighbors.setdefault(digest, {})
        for k in range(1, root.n + 1):
            try:
                mutated = mutate_seed(current, k, max_terms)
            except TermLimitExceeded:
                logger.warning(f"term limit reached while mutating at {k}; graph left open")
                graph.cap_hit = True
                continue
            key = seed_key(mutated, mode).digest
            if key not in graph.nodes:
                if len(graph.nodes) >= cap:
                    graph.cap_hit = True
                    continue
                graph.nodes[key] = mutated
                graph.order.append(key)
                queue.append(key)
            links[k] = key
    graph.finite = not graph.cap_hit
    if graph.cap_hit:
        logger.warning(f"exploration stopped at {len(graph.nodes)} nodes")
    logger.info(f"exchange graph has {len(graph.nodes)} nodes, finite={graph.finite}")
    return graph


# --------------------------------------------------------------------------- tau


def _principal_rows(b: Principal) -> IntMatrix:
    if isinstance(b, ExtMatrix):
        return b.principal
    return tuple(tuple(row) for row in b)


def bipartite_check(b: Principal) -> Optional[Tuple[List[int], List[int]]]:
    """Splits the mutable vertices into sources and sinks, 1-based.

    Isolated vertices count as sources. Returns None when some vertex has
    both an outgoing and an incoming arrow.
    """
    sources, sinks = [], []
    for i, row in enumerate(_principal_rows(b), start=1):
        if all(v >= 0 for v in row):
            sources.append(i)
        elif all(v <= 0 for v in row):
            sinks.append(i)
        else:
            return None
    return sources, sinks


def tau_path(b: Principal, power: int) -> List[int]:
    """Mutation directions of tau^power.

    tau mutates every sink, then every source; the orientation is restored
    afterwards, so the partition stays valid for every power.

    Raises:
        NotBipartite: If the principal part is not bipartite.
    """
    split = bipartite_check(b)
    if split is None:
        raise NotBipartite("tau needs every mutable vertex to be a source or a sink")
    sources, sinks = split
    step = sinks + sources if power >= 0 else sources + sinks
    return step * abs(power)


def tau_apply(s: LabeledSeed, power: int, max_terms: Optional[int] = None) -> LabeledSeed:
    return mutate_seed_path(s, tau_path(s.matrix, power), max_terms)


def tau_matrix(b: ExtMatrix, power: int) -> ExtMatrix:
    return mutate_matrix_path(b, tau_path(b, power))


def tau_lat_invariance(root: Union[LabeledSeed, ExtMatrix], powers: Sequence[int]) -> TauInvarianceReport:
    """Compares Lat(B) with Lat(tau^k B) for each power k."""
    b = root.matrix if isinstance(root, LabeledSeed) else root
    report = TauInvarianceReport(powers=list(powers))
    for power in powers:
        if not lat_equal(b, tau_matrix(b, power)):
            logger.debug(f"row lattice changes under tau^{power}")
            report.failures.append(power)
    return report


def tau_orbit_length(b: Principal, limit: int = 200) -> Optional[int]:
    """Order of tau on unlabeled seeds, read from principal-coefficient matrices.

    Returns:
        The least k > 0 returning to the start, or None within ``limit`` steps.
    """
    principal = _principal_rows(b)
    start = principal_extension(ExtMatrix.trusted(principal))
    target, _ = canonical_matrix(start)
    step = tau_path(principal, 1)
    current = start
    for k in range(1, limit + 1):
        current = mutate_matrix_path(current, step)
        if canonical_matrix(current)[0] == target:
            return k
    logger.warning(f"tau orbit did not close within {limit} steps")
    return None


def star_condition(b: Principal, cap: int = _STAR_CAP, max_terms: Optional[int] = None) -> str:
    """Names a sufficient reason for every seed's matrix to have a principal-determined lattice.

    Tried in order: skew-symmetric principal part, nonzero determinant,
    finite type found by enumerating the trivial-coefficient exchange graph.

    Raises:
        StarConditionUnknown: If none of the checks applies.
    """
    principal = _principal_rows(b)
    if is_skew_symmetric(principal):
        return "skew-symmetric"
    if determinant(principal) != 0:
        return "nondegenerate"
    graph = explore(initial_seed(ExtMatrix.trusted(principal)), cap=cap, max_terms=max_terms)
    if graph.finite:
        return "finite type"
    raise StarConditionUnknown("principal part is neither skew-symmetric, nondegenerate nor of finite type within cap")
