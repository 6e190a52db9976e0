"""
main.py
steiner-route のエントリーポイント。
設定を読み込み、引数を解析してサブコマンド（route / synth / bench / gen / history）を実行する。

終了コード: 0 成功 / 1 引数・設定エラー / 2 QASM・行列の解析エラー / 3 合成・検証エラー
"""

import argparse
import copy
import logging
import sys
from pathlib import Path

import yaml

from arch import ArchitectureError, SteinerError, builtin_names
from circuit_io import GateKindError, QasmParseError
from commands import (
    EXIT_PARSE,
    EXIT_SYNTHESIS,
    EXIT_USAGE,
    UsageError,
    cmd_bench,
    cmd_gen,
    cmd_history,
    cmd_route,
    cmd_synth,
)
from gf2 import MatrixParseError, SingularMatrixError
from router import RoutingError

logger = logging.getLogger(__name__)

# プロジェクトルートからのパス定義
CONFIG_PATH = Path(__file__).parent.parent / "config.yaml"

DEFAULT_CONFIG: dict = {
    "logging": {"level": "INFO"},
    "ga": {
        "crossover_prob": 0.8,
        "mutation_prob": 0.2,
        "by_size": {9: [30, 15], 16: [50, 100], 20: [100, 100]},
    },
    "bench": {
        "samples": 20,
        "workers": 1,
        "counts_by_size": {
            9: [3, 5, 10, 20, 30],
            16: [4, 8, 16, 32, 64, 128, 256],
            20: [4, 8, 16, 32, 64, 128, 256],
        },
    },
    "history": {"db_path": None},
}


class _Parser(argparse.ArgumentParser):
    """使い方の誤りは終了コード 1。"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_config(path: Path, required: bool = False) -> dict:
    """
    config.yaml を読み込み、既定値にマージして返す。
    既定パスにファイルが無ければ既定値のみ、明示指定で無ければ FileNotFoundError。
    """
    config = copy.deepcopy(DEFAULT_CONFIG)
    if not path.exists():
        if required:
            raise FileNotFoundError(f"config.yaml が見つかりません: {path}")
        return config

    with open(path, encoding="utf-8") as f:
        loaded = yaml.safe_load(f) or {}
    if not isinstance(loaded, dict):
        raise ValueError(f"設定ファイルの形式が不正です / config must be a mapping: {path}")

    for section, values in loaded.items():
        if isinstance(values, dict) and isinstance(config.get(section), dict):
            config[section].update(values)
        else:
            config[section] = values
    logger.info(f"設定読み込み完了: {path}")
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="steiner-route", description="接続制約付き CNOT / CNOT+Rz 回路の再合成")
    parser.add_argument("--config", help="設定ファイル (既定: プロジェクト直下の config.yaml)")
    parser.add_argument("-v", "--verbose", action="store_true", help="DEBUG ログを出す")

    device = _Parser(add_help=False)
    device.add_argument("--arch", choices=builtin_names(), help="組み込みアーキテクチャ名")
    device.add_argument("--arch-json", help="アーキテクチャ JSON ファイル")
    device.add_argument("--seed", type=int, default=0, help="乱数シード (既定 0)")

    ga = _Parser(add_help=False)
    ga.add_argument("--no-placement", action="store_true", help="GA 配置探索を行わない")
    ga.add_argument("--unconstrained", action="store_true", help="接続制約なしの合成（比較用）")
    ga.add_argument("--population", type=int, help="GA 集団サイズ")
    ga.add_argument("--iterations", type=int, help="GA 世代数")
    ga.add_argument("--crossover", type=float, help="交叉確率")
    ga.add_argument("--mutation", type=float, help="突然変異確率")

    sub = parser.add_subparsers(dest="command", required=True)

    route = sub.add_parser("route", parents=[device, ga], help="QASM 回路をデバイスに合わせて再合成")
    route.add_argument("input", help="入力 QASM ファイル")
    route.add_argument("-o", "--output", help="出力 QASM ファイル (省略時 stdout)")
    route.add_argument("--phasepoly", action="store_true", help="CNOT+Rz 回路として位相多項式経由で合成")
    route.set_defaults(func=cmd_route)

    synth = sub.add_parser("synth", parents=[device, ga], help="パリティ行列から CNOT 回路を合成")
    synth.add_argument("matrix", help="0/1 テキストの行列ファイル")
    synth.add_argument("-o", "--output", help="出力 QASM ファイル (省略時 stdout)")
    synth.set_defaults(func=cmd_synth)

    bench = sub.add_parser("bench", parents=[device, ga], help="ランダム回路ベンチマーク (CSV)")
    bench.add_argument("--counts", help="入力 CNOT 数のカンマ区切り (既定はデバイスサイズ別)")
    bench.add_argument("--samples", type=int, help="各 CNOT 数あたりの回路数 (既定 20)")
    bench.add_argument("--workers", type=int, help="並列プロセス数")
    bench.add_argument("--csv-out", help="CSV 出力先 (省略時 stdout)")
    bench.add_argument("--db", help="結果を保存する SQLite ファイル")
    bench.add_argument("--explain", action="store_true", help="参考値（漸近値・素朴な推定値）を stderr に出す")
    bench.set_defaults(func=cmd_bench)

    gen = sub.add_parser("gen", help="ランダム回路 (QASM) または可逆行列 (テキスト) を生成")
    gen.add_argument("--kind", choices=["cnot", "phase", "matrix"], default="cnot",
                     help="cnot: CNOT 回路, phase: CNOT+Rz 回路, matrix: synth 用の行列 (既定 cnot)")
    gen.add_argument("--qubits", type=int, required=True, help="量子ビット数")
    gen.add_argument("--count", type=int, help="回路あたりのゲート数 (回路のとき必須)")
    gen.add_argument("--samples", type=int, default=20, help="生成する回路数 (既定 20)")
    gen.add_argument("--seed", type=int, default=0, help="乱数シード (既定 0)")
    gen.add_argument("--outdir", required=True, help="出力ディレクトリ")
    gen.set_defaults(func=cmd_gen)

    history = sub.add_parser("history", help="保存済みベンチ結果を CSV で表示")
    history.add_argument("--db", help="SQLite ファイル")
    history.add_argument("--arch", help="アーキテクチャ名で絞り込み")
    history.add_argument("--limit", type=int, default=100, help="最大件数 (既定 100)")
    history.set_defaults(func=cmd_history)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        config = load_config(Path(args.config) if args.config else CONFIG_PATH, required=bool(args.config))
    except (OSError, ValueError, yaml.YAMLError) as e:
        print(f"設定エラー / config error: {e}", file=sys.stderr)
        return EXIT_USAGE

    level = "DEBUG" if args.verbose else str(config.get("logging", {}).get("level", "INFO")).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
    )

    try:
        return args.func(args, config)
    except (QasmParseError, MatrixParseError) as e:
        logger.error(f"解析エラー / parse error: {e}")
        return EXIT_PARSE
    except (RoutingError, SteinerError, SingularMatrixError, GateKindError) as e:
        logger.error(f"合成・検証エラー / synthesis error: {e}")
        return EXIT_SYNTHESIS
    except (UsageError, ArchitectureError, FileNotFoundError, ValueError) as e:
        logger.error(f"引数エラー / usage error: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
