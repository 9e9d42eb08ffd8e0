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
Logging setup for the cluster engine.

Reports go to stdout; everything the engine says about its own progress
(exploration sizes, cap hits, solver fallbacks) goes through this logger.
"""

import sys
from pathlib import Path

from loguru import logger

__all__ = ["logger", "LOG_FILE"]

LOG_FILE = Path("logs") / "cluster.log"

logger.remove()

# Console sink stays on stderr so JSON reports on stdout remain parseable.
logger.add(
    sys.stderr,
    level="INFO",
    format=(
        "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
        "<level>{level: <8}</level> | "
        "<cyan>{name}</cyan>:<cyan>{function}</cyan> - "
        "<level>{message}</level>"
    ),
)

if not LOG_FILE.parent.exists():  # pragma: no cover
    LOG_FILE.parent.mkdir(parents=True, exist_ok=True)

logger.add(
    str(LOG_FILE),
    rotation="500 MB",
    retention="10 days",
    serialize=True,
    enqueue=True,
    level="DEBUG",
)
