"""Temporal tag search over social bookmarking data."""

from ._core import (
    Engine,
    IndexError,
    InvalidArgument,
    __version__,
    build_index,
    month_of,
    months_in,
    parse_line,
    wayback_url,
)

__all__ = [
    "Engine",
    "IndexError",
    "InvalidArgument",
    "build_index",
    "month_of",
    "months_in",
    "parse_line",
    "wayback_url",
    "__version__",
]
