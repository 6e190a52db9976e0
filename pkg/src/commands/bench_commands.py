"""
commands/bench_commands.py
bench / gen / history サブコマンド。ランダム回路ベンチマークと履歴 DB。
"""

import argparse
import asyncio
import csv
import io
import logging
import sys

from arch import average_distance
from bench import (
    asymptotic_bound,
    format_csv,
    generate_circuits,
    generate_matrices,
    naive_baseline,
    run_bench,
)
from commands.common import EXIT_OK, UsageError, build_ga_params, resolve_arch, write_text
from database import BenchHistory
from utils import parse_counts

logger = logging.getLogger(__name__)


def cmd_bench(args: argparse.Namespace, config: dict) -> int:
    a = resolve_arch(args)
    bench_cfg = config.get("bench", {})
    counts = parse_counts(args.counts) if args.counts else _default_counts(a.n, bench_cfg)
    samples = args.samples if args.samples is not None else int(bench_cfg.get("samples", 20))
    workers = args.workers if args.workers is not None else int(bench_cfg.get("workers", 1))
    if samples < 1 or workers < 1:
        raise UsageError("--samples と --workers は 1 以上 / --samples and --workers must be >= 1")

    params = None if args.unconstrained else build_ga_params(args, config, a.n, args.seed)
    if args.explain:
        _explain(a, params, args.unconstrained)

    rows = run_bench(a, counts, samples, args.seed, params, args.unconstrained, workers)
    write_text(format_csv(rows), args.csv_out)

    db_path = args.db or config.get("history", {}).get("db_path")
    if db_path:
        mode = "unconstrained" if args.unconstrained else ("unplaced" if params is None else "constrained")
        try:
            asyncio.run(_save_history(db_path, rows, mode))
        except Exception as e:
            logger.warning(f"履歴の保存に失敗（スキップ）/ History save failed (skip): {e}")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace, config: dict) -> int:
    if args.qubits < 2 or args.samples < 1:
        raise UsageError("--qubits >= 2, --samples >= 1 が必要です")
    if args.kind == "matrix":
        paths = generate_matrices(args.qubits, args.samples, args.seed, args.outdir)
    else:
        if args.count is None or args.count < 0:
            raise UsageError("回路の生成には --count >= 0 が必要です / --count >= 0 is required for circuits")
        paths = generate_circuits(
            args.qubits, args.count, args.samples, args.seed, args.outdir, phasepoly=args.kind == "phase"
        )
    for path in paths:
        print(path)
    return EXIT_OK


def cmd_history(args: argparse.Namespace, config: dict) -> int:
    db_path = args.db or config.get("history", {}).get("db_path")
    if not db_path:
        raise UsageError("--db を指定してください / specify --db")
    rows = asyncio.run(_load_history(db_path, args.arch, args.limit))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    columns = ["created_at", "mode", "architecture", "input_cnots", "samples",
               "mean_output_cnots", "overhead_percent", "seed"]
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row[c] for c in columns])
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


# ── 内部ヘルパー / Internal Helpers ─────────────────────────────────────────

def _default_counts(n: int, bench_cfg: dict) -> list[int]:
    table = {int(k): v for k, v in (bench_cfg.get("counts_by_size") or {}).items()}
    if not table:
        raise UsageError("--counts を指定してください / specify --counts")
    size = min(table, key=lambda s: (abs(s - n), s))
    return [int(c) for c in table[size]]


def _explain(a, params, unconstrained: bool) -> None:
    """参考値を stderr に出す（CSV を汚さない）。"""
    lines = [
        f"# architecture: {a.name} (n={a.n}, edges={len(a.edges)}, mean distance={average_distance(a):.3f})",
        f"# asymptotic unconstrained bound n^2/log2(n): {asymptotic_bound(a.n):.1f}",
        f"# naive swap-chain baseline bound*4*(d-1): {naive_baseline(a):.1f}",
    ]
    if unconstrained:
        lines.append("# synthesis: unconstrained, shortest of block elimination and greedy candidates (no connectivity, no placement)")
    elif params is None:
        lines.append("# synthesis: steiner elimination, identity placement")
    else:
        lines.append(
            f"# synthesis: steiner elimination + GA placement "
            f"(population={params.population}, iterations={params.iterations}, "
            f"crossover={params.crossover_prob}, mutation={params.mutation_prob})"
        )
    sys.stderr.write("\n".join(lines) + "\n")


async def _save_history(db_path: str, rows, mode: str) -> None:
    history = BenchHistory(db_path)
    await history.init_db()
    await history.save_rows(rows, mode)


async def _load_history(db_path: str, arch: str | None, limit: int) -> list[dict]:
    history = BenchHistory(db_path)
    await history.init_db()
    return await history.get_rows(arch, limit)
