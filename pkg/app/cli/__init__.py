"""
CLI Package

Subcommand handlers behind `python -m app.main`.
"""

from app.cli.commands import (
    cmd_compare,
    cmd_fit,
    cmd_recommend,
    cmd_simulate,
    run,
    run_campaigns,
)

__all__ = [
    "cmd_fit",
    "cmd_recommend",
    "cmd_compare",
    "cmd_simulate",
    "run",
    "run_campaigns",
]
