#!/usr/bin/env python3
"""
reproduce_curves.py
5 種類の組み込みアーキテクチャで、制約付き（GA 配置あり）と制約なしの
ランダム回路ベンチマークをまとめて実行し、CSV を results/ に書き出す。

使い方:
  python scripts/reproduce_curves.py                      # 全アーキテクチャ
  python scripts/reproduce_curves.py square-9 ibm-qx5     # 個別指定
  python scripts/reproduce_curves.py --samples 5 --workers 4
"""
import argparse
import io
import logging
import os
import sys
from pathlib import Path

BASE = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(BASE, "src"))

from arch import builtin, builtin_names  # noqa: E402
from bench import format_csv, run_bench  # noqa: E402
from commands.common import ga_size_table  # noqa: E402
from main import CONFIG_PATH, load_config  # noqa: E402
from placement import default_ga_params  # noqa: E402

# Windows CP932 端末でも Unicode 記号を出力できるよう stdout を UTF-8 に統一
if sys.stdout.encoding and sys.stdout.encoding.lower() not in ("utf-8", "utf_8"):
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding="utf-8", errors="replace")


def _counts_for(n: int, config: dict) -> list[int]:
    table = {int(k): v for k, v in config["bench"]["counts_by_size"].items()}
    return [int(c) for c in table[min(table, key=lambda s: (abs(s - n), s))]]


def main() -> int:
    parser = argparse.ArgumentParser(description="全アーキテクチャのベンチマーク曲線を再現する")
    parser.add_argument("names", nargs="*", help=f"アーキテクチャ名（既定: {', '.join(builtin_names())}）")
    parser.add_argument("--samples", type=int, help="各 CNOT 数あたりの回路数（既定は設定値）")
    parser.add_argument("--workers", type=int, help="並列プロセス数（既定は設定値）")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--outdir", default=os.path.join(BASE, "results"))
    args = parser.parse_args()

    config = load_config(CONFIG_PATH)
    logging.basicConfig(
        level=logging.WARNING,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    names = args.names or builtin_names()
    unknown = [n for n in names if n not in builtin_names()]
    if unknown:
        print(f"⚠️  未知のアーキテクチャ: {', '.join(unknown)}")
        return 1

    samples = args.samples or int(config["bench"]["samples"])
    workers = args.workers or int(config["bench"]["workers"])
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    for name in names:
        a = builtin(name)
        counts = _counts_for(a.n, config)
        params = default_ga_params(
            a.n,
            seed=args.seed,
            table=ga_size_table(config) or None,
            crossover_prob=config["ga"].get("crossover_prob"),
            mutation_prob=config["ga"].get("mutation_prob"),
        )
        print(f"▶  {name} (n={a.n}, counts={counts}, samples={samples})")

        constrained = run_bench(a, counts, samples, args.seed, params, workers=workers)
        unconstrained = run_bench(a, counts, samples, args.seed, None, unconstrained=True, workers=workers)
        (outdir / f"{name}_constrained.csv").write_text(format_csv(constrained), encoding="utf-8")
        (outdir / f"{name}_unconstrained.csv").write_text(format_csv(unconstrained), encoding="utf-8")

        print(f"   {'入力':>6}  {'制約付き':>10}  {'制約なし':>10}")
        for c_row, u_row in zip(constrained, unconstrained):
            print(f"   {c_row.input_cnots:>6}  {c_row.mean_output_cnots:>10.2f}  {u_row.mean_output_cnots:>10.2f}")

    print()
    print(f"✅  CSV を書き出しました: {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
