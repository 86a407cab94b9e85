"""
Tools Package

File input and output for the command-line runs.
"""

from app.tools.io import (
    read_observations,
    write_observations,
    write_json,
    write_frame,
    write_curve_tsv,
    safe_name,
)

__all__ = [
    "read_observations",
    "write_observations",
    "write_json",
    "write_frame",
    "write_curve_tsv",
    "safe_name",
]
