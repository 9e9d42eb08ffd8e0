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
Engine orchestration module.

This module contains `ClusterEngineAsync`, which connects the explorer, the
group analyzer and the formula verifier behind one entry point, and its
blocking facade `ClusterEngine`.
"""

from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple, cast

import anyio
from typing_extensions import Self

from .config import EngineConfig
from .explorer import ExchangeGraph
from .fixtures import run_example
from .groups import SeedGenerator
from .interfaces import FormulaVerifier, GroupAnalyzer, SeedExplorer
from .matrix import mutate_matrix_path
from .models import (
    ClassificationReport,
    ExampleReport,
    ExtMatrix,
    FormulaReport,
    GroupReport,
    KeyMode,
    MonomialMap,
    Move,
    QautReport,
    RelationReport,
    TauInvarianceReport,
    TypeSpec,
)
from .morphism import classify
from .seed import LabeledSeed, initial_seed
from .services import AutomorphismGroupAnalyzer, ExchangeGraphExplorer, FormulaVerifierImpl
from .utils.logger import logger

Relation = Tuple[Sequence[str], Sequence[str]]


class ClusterEngineAsync:
    """Entry point for mutation, exploration, group and formula jobs.

    Components default to the concrete implementations configured with
    ``config``; tests and embedding applications may inject their own.
    """

    def __init__(
        self,
        config: Optional[EngineConfig] = None,
        explorer: Optional[SeedExplorer] = None,
        analyzer: Optional[GroupAnalyzer] = None,
        verifier: Optional[FormulaVerifier] = None,
    ):
        """Initializes the engine.

        Args:
            config: Limits shared by every component.
            explorer: Component exploring exchange graphs and tau.
            analyzer: Component computing automorphism groups.
            verifier: Component checking closed forms for transformed frozen rows.
        """
        self.config = config or EngineConfig()
        self.explorer = explorer or ExchangeGraphExplorer(self.config)
        self.analyzer = analyzer or AutomorphismGroupAnalyzer(self.config)
        self.verifier = verifier or FormulaVerifierImpl(self.config)

    async def __aenter__(self) -> Self:
        return self

    async def __aexit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        if exc_type is not None:
            logger.debug(f"engine scope closed by {exc_type.__name__}")

    async def mutate(self, b: ExtMatrix, path: Sequence[int]) -> ExtMatrix:
        return mutate_matrix_path(b, path)

    async def graph(self, b: ExtMatrix, mode: Optional[KeyMode] = None) -> ExchangeGraph:
        return await self.explorer.explore(initial_seed(b), mode)

    async def classify(
        self, mapping: MonomialMap, sample_paths: Optional[Sequence[Sequence[int]]] = None
    ) -> ClassificationReport:
        return await anyio.to_thread.run_sync(partial(classify, mapping, sample_paths))

    async def groups(self, b: ExtMatrix, include_inverse: bool = False) -> GroupReport:
        _, report = await self.analyzer.automorphisms(initial_seed(b), include_inverse)
        return report

    async def qaut(self, b: ExtMatrix) -> QautReport:
        return await self.analyzer.qaut0(initial_seed(b))

    async def relations(
        self, root: LabeledSeed, generators: Dict[str, SeedGenerator], relations: Sequence[Relation]
    ) -> RelationReport:
        return await self.analyzer.relations(root, generators, relations)

    async def tau_invariance(self, b: ExtMatrix, powers: Sequence[int]) -> TauInvarianceReport:
        return await self.explorer.tau_lat_invariance(b, powers)

    async def tau_orbit(self, b: ExtMatrix) -> Optional[int]:
        return await self.explorer.tau_orbit_length(b)

    async def verify_formulas(
        self,
        types: Sequence[TypeSpec],
        trials: Optional[int] = None,
        rng_seed: Optional[int] = None,
        move: Optional[Move] = None,
    ) -> List[FormulaReport]:
        """Verifies each type in turn; trials within one type run concurrently.

        Args:
            types: The types to check, reported in the same order.
            trials: Trials per type; the configured default if None.
            rng_seed: Trial generator seed; the configured default if None.
            move: Move to check for every type; each family's default if None.

        Returns:
            One report per type.
        """
        reports = []
        for t in types:
            reports.append(await self.verifier.verify(t, trials=trials, rng_seed=rng_seed, move=move))
        return reports

    async def run_example(self, name: str) -> ExampleReport:
        return await anyio.to_thread.run_sync(run_example, name)


class ClusterEngine:
    """Synchronous Facade for ClusterEngineAsync.

    Wraps the async engine to provide a blocking interface.
    """

    def __init__(
        self,
        config: Optional[EngineConfig] = None,
        explorer: Optional[SeedExplorer] = None,
        analyzer: Optional[GroupAnalyzer] = None,
        verifier: Optional[FormulaVerifier] = None,
    ):
        self._async = ClusterEngineAsync(config=config, explorer=explorer, analyzer=analyzer, verifier=verifier)

    @property
    def config(self) -> EngineConfig:
        return self._async.config

    def __enter__(self) -> Self:
        return self

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        anyio.run(self._async.__aexit__, exc_type, exc_val, exc_tb)

    def mutate(self, b: ExtMatrix, path: Sequence[int]) -> ExtMatrix:
        return cast(ExtMatrix, anyio.run(self._async.mutate, b, path))

    def graph(self, b: ExtMatrix, mode: Optional[KeyMode] = None) -> ExchangeGraph:
        return cast(ExchangeGraph, anyio.run(self._async.graph, b, mode))

    def classify(
        self, mapping: MonomialMap, sample_paths: Optional[Sequence[Sequence[int]]] = None
    ) -> ClassificationReport:
        return cast(ClassificationReport, anyio.run(self._async.classify, mapping, sample_paths))

    def groups(self, b: ExtMatrix, include_inverse: bool = False) -> GroupReport:
        return cast(GroupReport, anyio.run(self._async.groups, b, include_inverse))

    def qaut(self, b: ExtMatrix) -> QautReport:
        return cast(QautReport, anyio.run(self._async.qaut, b))

    def relations(
        self, root: LabeledSeed, generators: Dict[str, SeedGenerator], relations: Sequence[Relation]
    ) -> RelationReport:
        return cast(RelationReport, anyio.run(self._async.relations, root, generators, relations))

    def tau_invariance(self, b: ExtMatrix, powers: Sequence[int]) -> TauInvarianceReport:
        return cast(TauInvarianceReport, anyio.run(self._async.tau_invariance, b, powers))

    def tau_orbit(self, b: ExtMatrix) -> Optional[int]:
        return cast(Optional[int], anyio.run(self._async.tau_orbit, b))

    def verify_formulas(
        self,
        types: Sequence[TypeSpec],
        trials: Optional[int] = None,
        rng_seed: Optional[int] = None,
        move: Optional[Move] = None,
    ) -> List[FormulaReport]:
        """Runs ClusterEngineAsync.verify_formulas via anyio.run."""
        return cast(
            List[FormulaReport],
            anyio.run(partial(self._async.verify_formulas, types, trials=trials, rng_seed=rng_seed, move=move)),
        )

    def run_example(self, name: str) -> ExampleReport:
        return cast(ExampleReport, anyio.run(self._async.run_example, name))
