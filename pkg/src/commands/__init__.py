"""
commands/__init__.py
CLI サブコマンドのハンドラ群。
Re-exports the command handlers so main.py can import them from `commands` directly.
"""

from commands.bench_commands import cmd_bench, cmd_gen, cmd_history
from commands.common import EXIT_OK, EXIT_PARSE, EXIT_SYNTHESIS, EXIT_USAGE, UsageError
from commands.route_commands import cmd_route, cmd_synth

__all__ = [
    "cmd_bench",
    "cmd_gen",
    "cmd_history",
    "cmd_route",
    "cmd_synth",
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_PARSE",
    "EXIT_SYNTHESIS",
    "UsageError",
]
