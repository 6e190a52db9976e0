"""
commands/common.py
サブコマンド共通の処理（アーキテクチャ解決・GA パラメータ・出力）。
Must not import from any other commands/* module.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from arch import Architecture, builtin, load_architecture
from placement import GAParams, default_ga_params

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_SYNTHESIS = 3


class UsageError(Exception):
    """引数・設定の誤り（終了コード 1）。"""


def resolve_arch(args: argparse.Namespace) -> Architecture:
    """--arch-json があればそれを、なければ --arch の組み込み名を使う。"""
    if getattr(args, "arch_json", None):
        return load_architecture(args.arch_json)
    if getattr(args, "arch", None):
        return builtin(args.arch)
    raise UsageError("--arch または --arch-json を指定してください / specify --arch or --arch-json")


def ga_size_table(config: dict) -> dict[int, tuple[int, int]]:
    table = config.get("ga", {}).get("by_size") or {}
    return {int(size): (int(pop), int(it)) for size, (pop, it) in table.items()}


def build_ga_params(args: argparse.Namespace, config: dict, n: int, seed: int) -> GAParams | None:
    """--no-placement なら None。フラグ > 設定 > 既定値の順で上書きする。"""
    if getattr(args, "no_placement", False):
        return None
    ga = config.get("ga", {})
    return default_ga_params(
        n,
        seed=seed,
        table=ga_size_table(config) or None,
        population=args.population,
        iterations=args.iterations,
        crossover_prob=args.crossover if args.crossover is not None else ga.get("crossover_prob"),
        mutation_prob=args.mutation if args.mutation is not None else ga.get("mutation_prob"),
    )


def write_text(text: str, path: str | None) -> None:
    """path があればファイルへ、なければ stdout へ書く。"""
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        logger.info(f"出力しました: {path}")
    else:
        sys.stdout.write(text)


def print_json(obj: dict, to_stderr: bool = False) -> None:
    stream = sys.stderr if to_stderr else sys.stdout
    stream.write(json.dumps(obj, ensure_ascii=False) + "\n")
