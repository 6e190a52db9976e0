"""
bench.py
ルーティングの実行パイプラインと、ランダム回路ベンチマーク（CSV 出力）。

Routing pipeline shared by the CLI commands, plus the random-circuit
benchmark harness. Every routed circuit is verified (edge legality and
parity-map equality) before its CNOT count is used.
"""

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from arch import Architecture, average_distance
from circuit_io import (
    Circuit,
    count_cnots,
    from_circuit,
    is_mapped,
    random_cnot_circuit,
    random_cnot_rz_circuit,
    write_qasm,
)
from gf2 import ParityMatrix, compact_synthesize, random_invertible
from phasepoly import extract_phase_poly, synthesize_phase_poly
from placement import (
    GAParams,
    Placement,
    apply_placement,
    optimize_placement,
    relabel_circuit,
)
from router import RoutingError, synthesize_cnot, trace_to_circuit, verify_trace
from utils import derive_seed, overhead_percent, rng_stream

logger = logging.getLogger(__name__)

CSV_HEADER = ("architecture", "input_cnots", "samples", "mean_output_cnots", "overhead_percent", "seed")
NAIVE_COST_PER_GATE = 4


@dataclass(frozen=True)
class BenchRow:
    architecture: str
    input_cnots: int
    samples: int
    mean_output_cnots: float
    overhead_percent: float
    seed: int

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError(f"samples は 1 以上 / samples must be >= 1: {self.samples}")

    def as_csv(self) -> list[str]:
        return [
            self.architecture,
            str(self.input_cnots),
            str(self.samples),
            f"{self.mean_output_cnots:.2f}",
            f"{self.overhead_percent:.2f}",
            str(self.seed),
        ]


@dataclass
class RouteOutcome:
    """物理量子ビット上の出力回路と統計。placement は論理 → 物理。"""

    circuit: Circuit
    input_cnots: int
    output_cnots: int
    placement: Placement
    seed: int

    def stats(self) -> dict:
        return {
            "input_cnots": self.input_cnots,
            "output_cnots": self.output_cnots,
            "overhead_percent": round(overhead_percent(self.output_cnots, self.input_cnots), 2),
            "placement": list(self.placement.perm),
            "seed": self.seed,
        }


# ── ルーティング / Routing ───────────────────────────────────────────────────

def widen(c: Circuit, a: Architecture) -> Circuit:
    """回路をデバイスの量子ビット数に合わせる（不足分はアイドル）。"""
    if c.n > a.n:
        raise RoutingError(f"回路がデバイスより大きい / circuit has {c.n} qubits, {a.name} has {a.n}")
    return c if c.n == a.n else Circuit(a.n, list(c.gates))


def route_matrix(
    p: ParityMatrix,
    a: Architecture,
    params: GAParams | None,
    unconstrained: bool = False,
) -> tuple[Circuit, Placement]:
    """
    パリティ行列を合成する。params が None なら配置探索なし（恒等配置）。
    unconstrained は接続制約を無視し、PMH などの候補から最短の合成を使う（比較用）。
    """
    if unconstrained:
        ops = compact_synthesize(p)
        out = trace_to_circuit(ops, p.n)
        if from_circuit(out) != p:
            raise RoutingError("制約なし出力のパリティ行列が一致しません / unconstrained output mismatch")
        return out, Placement.identity(p.n)

    if params is None:
        placement = Placement.identity(p.n)
        ops = synthesize_cnot(p, a)
    else:
        result = optimize_placement(p, a, params)
        placement, ops = result.placement, result.trace

    verify_trace(apply_placement(p, placement), ops, a)
    out = trace_to_circuit(ops, p.n)
    if not is_mapped(out, a):
        raise RoutingError(f"出力が {a.name} の辺に乗っていません / output is not mapped")
    if from_circuit(relabel_circuit(out, placement.inverse())) != p:
        raise RoutingError("出力のパリティ行列が入力と一致しません / parity map mismatch")
    return out, placement


def route_circuit(
    c: Circuit,
    a: Architecture,
    seed: int,
    params: GAParams | None,
    unconstrained: bool = False,
) -> RouteOutcome:
    """CNOT 回路をデバイスに合わせて再合成する。"""
    c = widen(c, a)
    p = from_circuit(c)
    out, placement = route_matrix(p, a, params, unconstrained)
    logger.info(f"ルーティング完了: {a.name}, CNOT {count_cnots(c)} → {count_cnots(out)}")
    return RouteOutcome(out, count_cnots(c), count_cnots(out), placement, seed)


def route_phase_circuit(c: Circuit, a: Architecture, seed: int) -> RouteOutcome:
    """CNOT+Rz 回路を位相多項式経由で再合成する（配置は恒等）。"""
    c = widen(c, a)
    pp = extract_phase_poly(c)
    out = synthesize_phase_poly(pp, a)
    if not is_mapped(out, a):
        raise RoutingError(f"出力が {a.name} の辺に乗っていません / output is not mapped")
    if not extract_phase_poly(out).equivalent(pp):
        raise RoutingError("位相多項式が一致しません / phase polynomial mismatch")
    logger.info(f"位相多項式ルーティング完了: {a.name}, CNOT {count_cnots(c)} → {count_cnots(out)}")
    return RouteOutcome(out, count_cnots(c), count_cnots(out), Placement.identity(a.n), seed)


# ── ベンチマーク / Benchmark ─────────────────────────────────────────────────

def sample_circuit(n: int, count: int, seed: int, index: int) -> Circuit:
    """(seed, count, index) で決まるランダム CNOT 回路。gen と bench で共通。"""
    return random_cnot_circuit(n, count, rng_stream(seed, "circuit-gen", count, index))


def sample_phase_circuit(n: int, count: int, seed: int, index: int) -> Circuit:
    """(seed, count, index) で決まるランダム CNOT+Rz 回路。"""
    return random_cnot_rz_circuit(n, count, rng_stream(seed, "phasepoly", count, index))


def sample_matrix(n: int, seed: int, index: int) -> ParityMatrix:
    return random_invertible(n, rng_stream(seed, "matrix", n, index))


def _run_sample(args: tuple) -> int:
    a, count, seed, index, params, unconstrained = args
    c = sample_circuit(a.n, count, seed, index)
    sample_params = None
    if params is not None:
        sample_params = GAParams(**{**asdict(params), "seed": derive_seed(seed, "ga", count, index), "workers": 1})
    out, _ = route_matrix(from_circuit(c), a, sample_params, unconstrained)
    return count_cnots(out)


def run_bench(
    a: Architecture,
    counts: list[int],
    samples: int,
    seed: int,
    params: GAParams | None,
    unconstrained: bool = False,
    workers: int = 1,
) -> list[BenchRow]:
    """
    入力 CNOT 数ごとに samples 個のランダム回路をルーティングし、平均を BenchRow にする。
    サンプルごとの乱数は名前付きサブストリームから導くので並列でも結果は同じ。
    """
    if not counts:
        raise ValueError("counts が空です / counts must be non-empty")
    if samples < 1:
        raise ValueError(f"samples は 1 以上 / samples must be >= 1: {samples}")

    rows = []
    for count in counts:
        jobs = [(a, count, seed, i, params, unconstrained) for i in range(samples)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                outputs = list(pool.map(_run_sample, jobs))
        else:
            outputs = [_run_sample(job) for job in jobs]
        mean = sum(outputs) / samples
        rows.append(BenchRow(a.name, count, samples, mean, overhead_percent(mean, count), seed))
        logger.info(f"ベンチ {a.name}: 入力 {count} CNOT → 平均 {mean:.2f}")
    return rows


def format_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv())
    return buf.getvalue()


def generate_circuits(
    n: int, count: int, samples: int, seed: int, outdir: str | Path, phasepoly: bool = False
) -> list[Path]:
    """
    rand_n{n}_g{count}_s{i}.qasm を samples 個書き出す。
    phasepoly なら CNOT+Rz 回路を rand_phase_n{n}_g{count}_s{i}.qasm に書く。
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    prefix = "rand_phase" if phasepoly else "rand"
    make = sample_phase_circuit if phasepoly else sample_circuit
    paths = []
    for i in range(samples):
        path = out / f"{prefix}_n{n}_g{count}_s{i}.qasm"
        write_qasm(path, make(n, count, seed, i))
        paths.append(path)
    logger.info(f"{samples} 個の回路を生成しました: {out}")
    return paths


def generate_matrices(n: int, samples: int, seed: int, outdir: str | Path) -> list[Path]:
    """synth 用の可逆行列テキスト rand_matrix_n{n}_s{i}.txt を samples 個書き出す。"""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(samples):
        path = out / f"rand_matrix_n{n}_s{i}.txt"
        path.write_text(str(sample_matrix(n, seed, i)) + "\n", encoding="utf-8")
        paths.append(path)
    logger.info(f"{samples} 個の行列を生成しました: {out}")
    return paths


# ── 参考値 / Reference figures ───────────────────────────────────────────────

def asymptotic_bound(n: int) -> float:
    """n² / log₂ n（制約なし合成の漸近 CNOT 数）。"""
    return n * n / math.log2(n) if n > 1 else 0.0


def naive_baseline(a: Architecture) -> float:
    """
    各 CNOT を平均距離 d のスワップ連鎖で置き換えた場合の推定値。
    n²/log₂n · 4 · (d − 1)。square-9 ではおよそ 102。
    """
    return asymptotic_bound(a.n) * NAIVE_COST_PER_GATE * (average_distance(a) - 1)
