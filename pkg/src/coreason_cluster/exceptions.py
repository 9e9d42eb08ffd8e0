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
Exception hierarchy for the cluster engine.

Input problems subclass ``ValueError`` so they surface naturally through
pydantic validation; verification outcomes are never raised, they are
returned as report fields.
"""

from typing import Optional


class ClusterError(Exception):
    """Base class for every error raised by the engine."""


class NotSkewSymmetrizable(ClusterError, ValueError):
    """The principal part admits no positive skew-symmetrizing diagonal."""


class DirectionOutOfRange(ClusterError, ValueError):
    """A mutation direction outside 1..n was requested."""


class MalformedQuiver(ClusterError, ValueError):
    """A valued quiver is inconsistent or joins two frozen vertices."""


class DimensionMismatch(ClusterError, ValueError):
    """Operands have incompatible shapes."""


class PrincipalPartsDiffer(ClusterError, ValueError):
    """Two extended matrices were expected to share their principal part."""


class NotBipartite(ClusterError, ValueError):
    """Some mutable vertex is neither a source nor a sink."""


class UnsupportedType(ClusterError, ValueError):
    """No standard matrix exists for the requested type."""


class UnsupportedMove(ClusterError, ValueError):
    """The requested move is not defined for the type."""


class UnsupportedParity(ClusterError, ValueError):
    """The closed form is only printed for another parity of parameters."""


class DivisionByZero(ClusterError, ZeroDivisionError):
    """Division by the zero rational expression."""


class NotFinite(ClusterError):
    """The exchange graph did not close within the node cap."""


class StarConditionUnknown(ClusterError):
    """None of the tests guaranteeing a coefficient-free exchange graph passed."""


class TermLimitExceeded(ClusterError):
    """A cluster variable grew beyond the configured term-count cap."""


class ParseError(ClusterError, ValueError):
    """Malformed text input, with the 1-based position of the problem."""

    def __init__(self, message: str, line: int, column: int = 1, source: Optional[str] = None):
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")
