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
Concrete engine components.

Each component wraps the synchronous algorithms of the explorer, groups and
formulas modules and runs them on worker threads, so the event loop stays
free while exact arithmetic is in progress.
"""

from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import anyio

from .config import EngineConfig
from .explorer import ExchangeGraph, explore, tau_lat_invariance, tau_orbit_length
from .formulas import TrialResult, check_move, default_move, draw_beta, run_trial, summarize
from .groups import SeedGenerator, SeedSymmetry, direct_automorphisms_triv, qaut0_group, relation_check
from .interfaces import FormulaVerifier, GroupAnalyzer, SeedExplorer
from .models import (
    ExtMatrix,
    FormulaReport,
    GroupReport,
    KeyMode,
    Move,
    QautReport,
    RelationReport,
    TauInvarianceReport,
    TypeSpec,
)
from .seed import LabeledSeed
from .utils.logger import logger


class ExchangeGraphExplorer(SeedExplorer):
    """Explores exchange graphs with the configured caps."""

    def __init__(self, config: Optional[EngineConfig] = None):
        self.config = config or EngineConfig()

    def default_mode(self, root: LabeledSeed) -> KeyMode:
        if root.n > self.config.symbolic_max_rank:
            return KeyMode.MATRIX_ONLY
        return KeyMode.SYMBOLIC

    async def explore(self, root: LabeledSeed, mode: Optional[KeyMode] = None) -> ExchangeGraph:
        mode = mode or self.default_mode(root)
        return await anyio.to_thread.run_sync(
            partial(explore, root, cap=self.config.cap, mode=mode, max_terms=self.config.max_terms)
        )

    async def tau_lat_invariance(self, b: ExtMatrix, powers: Sequence[int]) -> TauInvarianceReport:
        return await anyio.to_thread.run_sync(tau_lat_invariance, b, list(powers))

    async def tau_orbit_length(self, b: ExtMatrix) -> Optional[int]:
        return await anyio.to_thread.run_sync(partial(tau_orbit_length, b, limit=self.config.orbit_limit))


class AutomorphismGroupAnalyzer(GroupAnalyzer):
    """Computes automorphism groups on finite exchange graphs."""

    def __init__(self, config: Optional[EngineConfig] = None):
        self.config = config or EngineConfig()

    async def automorphisms(
        self, root: LabeledSeed, include_inverse: bool = False
    ) -> Tuple[List[SeedSymmetry], GroupReport]:
        return await anyio.to_thread.run_sync(
            partial(
                direct_automorphisms_triv,
                root,
                include_inverse=include_inverse,
                cap=self.config.cap,
                max_terms=self.config.max_terms,
            )
        )

    async def qaut0(self, root: LabeledSeed) -> QautReport:
        return await anyio.to_thread.run_sync(
            partial(qaut0_group, root, cap=self.config.cap, max_terms=self.config.max_terms)
        )

    async def relations(
        self,
        root: LabeledSeed,
        generators: Dict[str, SeedGenerator],
        relations: Sequence[Tuple[Sequence[str], Sequence[str]]],
    ) -> RelationReport:
        return await anyio.to_thread.run_sync(relation_check, root, generators, list(relations))


class FormulaVerifierImpl(FormulaVerifier):
    """Runs formula trials concurrently and joins them by trial index.

    Every trial draws its frozen row from its own generator stream, so the
    report does not depend on the order in which worker threads finish.
    """

    def __init__(self, config: Optional[EngineConfig] = None, limiter: Optional[anyio.CapacityLimiter] = None):
        """Initializes the verifier.

        Args:
            config: Trial count, seed and entry range defaults.
            limiter: Optional cap on concurrently running trial threads.
        """
        self.config = config or EngineConfig()
        self.limiter = limiter

    async def verify(
        self,
        t: TypeSpec,
        trials: Optional[int] = None,
        rng_seed: Optional[int] = None,
        move: Optional[Move] = None,
    ) -> FormulaReport:
        move = move or default_move(t)
        check_move(t, move)
        count = self.config.trials if trials is None else trials
        seed = self.config.rng_seed if rng_seed is None else rng_seed
        results: Dict[int, TrialResult] = {}

        async def _trial(index: int) -> None:
            beta = draw_beta(t, seed, index, self.config)
            results[index] = await anyio.to_thread.run_sync(run_trial, t, move, beta, index, limiter=self.limiter)

        logger.info(f"verifying {t} under {move.value} with {count} trials (seed {seed})")
        async with anyio.create_task_group() as tg:
            for index in range(count):
                tg.start_soon(_trial, index)

        return summarize(t, move, [results[i] for i in range(count)])
