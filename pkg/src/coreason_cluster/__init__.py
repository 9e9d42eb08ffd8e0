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
Coreason Cluster Package.
"""

__version__ = "0.1.0"
__author__ = "Gowtham A Rao"
__email__ = "gowtham.rao@coreason.ai"

from .config import EngineConfig
from .engine import ClusterEngine, ClusterEngineAsync
from .models import (
    ExtMatrix,
    FormulaReport,
    GroupReport,
    KeyMode,
    MonomialMap,
    Move,
    QautReport,
    TypeSpec,
)
from .seed import LabeledSeed, initial_seed

__all__ = [
    "ClusterEngine",
    "ClusterEngineAsync",
    "EngineConfig",
    "ExtMatrix",
    "FormulaReport",
    "GroupReport",
    "KeyMode",
    "LabeledSeed",
    "MonomialMap",
    "Move",
    "QautReport",
    "TypeSpec",
    "initial_seed",
]
