# Copyright (c) 2025 CoReason, Inc.
#
# This software is proprietary and dual-licensed.
# Licensed under the Prosperity Public License 3.0 (the "License").
# A copy of the license is available at https://prosperitylicense.com/versions/3.0.0
# For details, see the LICENSE file.
# Commercial use beyond a 30-day trial requires a separate license.
#
# Source Code: https://github.com/CoReason-AI/coreason_cluster

from coreason_cluster.utils.logger import LOG_FILE, logger


def test_logger_exists() -> None:
    assert logger is not None
    logger.info("Test log message")


def test_log_file_location() -> None:
    assert LOG_FILE.name == "cluster.log"
    assert LOG_FILE.parent.exists()
