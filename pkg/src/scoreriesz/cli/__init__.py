"""
CLI module with the command-line front end.

This module contains the argument parser and the gen, estimate and benchmark
subcommands.
"""

from .main import (
    ValidationError,
    build_parser,
    cmd_gen,
    cmd_estimate,
    cmd_benchmark,
    summarize_replications,
    main
)

__all__ = [
    "ValidationError",
    "build_parser",
    "cmd_gen",
    "cmd_estimate",
    "cmd_benchmark",
    "summarize_replications",
    "main"
]
