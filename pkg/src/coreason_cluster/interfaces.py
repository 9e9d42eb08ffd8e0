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
Interfaces for the core components of the cluster engine.

The engine talks to three components: one explores exchange graphs and the
tau move, one computes automorphism groups, one checks closed forms for the
transformed frozen rows. All methods are async; implementations run the
exact algorithms on worker threads.
"""

from abc import ABC, abstractmethod
from typing import Dict, List, Optional, Sequence, Tuple

from .explorer import ExchangeGraph
from .groups import SeedGenerator, SeedSymmetry
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


class SeedExplorer(ABC):
    """Abstract interface for exchange graph exploration.

    Explores the seeds reachable from a root by mutation and applies the
    bipartite tau move.
    """

    @abstractmethod
    async def explore(self, root: LabeledSeed, mode: Optional[KeyMode] = None) -> ExchangeGraph:
        """Enumerates the exchange graph of ``root``.

        Args:
            root: The labeled seed to start from.
            mode: Seed identity keys. None picks symbolic keys up to the
                configured rank and matrix keys above it.

        Returns:
            The explored graph, marked finite when it closed within the cap.
        """
        pass

    @abstractmethod
    async def tau_lat_invariance(self, b: ExtMatrix, powers: Sequence[int]) -> TauInvarianceReport:
        """Compares the row lattice of ``b`` with that of tau^k(b) for each power."""
        pass

    @abstractmethod
    async def tau_orbit_length(self, b: ExtMatrix) -> Optional[int]:
        """Order of tau on the unlabeled seeds of ``b``, or None if the orbit stays open."""
        pass


class GroupAnalyzer(ABC):
    """Abstract interface for automorphism group computation."""

    @abstractmethod
    async def automorphisms(
        self, root: LabeledSeed, include_inverse: bool = False
    ) -> Tuple[List[SeedSymmetry], GroupReport]:
        """Enumerates Aut+(A_triv) of the principal part of ``root``."""
        pass

    @abstractmethod
    async def qaut0(self, root: LabeledSeed) -> QautReport:
        """Computes QAut_0 of the algebra with the coefficients of ``root``."""
        pass

    @abstractmethod
    async def relations(
        self,
        root: LabeledSeed,
        generators: Dict[str, SeedGenerator],
        relations: Sequence[Tuple[Sequence[str], Sequence[str]]],
    ) -> RelationReport:
        """Checks relations between seed maps built from ``generators``."""
        pass


class FormulaVerifier(ABC):
    """Abstract interface for closed-form checks of transformed frozen rows."""

    @abstractmethod
    async def verify(
        self,
        t: TypeSpec,
        trials: Optional[int] = None,
        rng_seed: Optional[int] = None,
        move: Optional[Move] = None,
    ) -> FormulaReport:
        """Runs random trials comparing the closed form with literal mutation.

        Args:
            t: The Dynkin or affine type.
            trials: Number of random frozen rows; the configured default if None.
            rng_seed: Seed of the trial generator; the configured default if None.
            move: The move to check; the family's default if None.

        Returns:
            A report with the first disagreeing trial, if any.
        """
        pass
