"""
placement.py
遺伝的アルゴリズムによる量子ビット配置探索。

Genetic-algorithm search over logical→physical qubit permutations.
配置は行列の行と列を同時に置換することと同値で、適応度は合成後の CNOT 数。
"""

import logging
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from arch import Architecture
from circuit_io import Circuit, Gate
from gf2 import ParityMatrix, RowOp
from router import synthesize_cnot

logger = logging.getLogger(__name__)

SynthFn = Callable[[ParityMatrix, Architecture], list[RowOp]]

# (population, iterations) をデバイスサイズごとに
GA_DEFAULTS_BY_SIZE: dict[int, tuple[int, int]] = {9: (30, 15), 16: (50, 100), 20: (100, 100)}
CROSSOVER_PROB = 0.8
MUTATION_PROB = 0.2
TOURNAMENT_SIZE = 3


@dataclass(frozen=True)
class Placement:
    """perm[i] = 論理量子ビット i を置く物理頂点。"""

    perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError(f"置換ではありません / not a permutation: {self.perm}")

    @classmethod
    def identity(cls, n: int) -> "Placement":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.perm)

    def __call__(self, i: int) -> int:
        return self.perm[i]

    def inverse(self) -> "Placement":
        inv = [0] * self.n
        for i, v in enumerate(self.perm):
            inv[v] = i
        return Placement(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self.perm))


@dataclass(frozen=True)
class GAParams:
    population: int = 30
    iterations: int = 15
    crossover_prob: float = CROSSOVER_PROB
    mutation_prob: float = MUTATION_PROB
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.population < 2:
            raise ValueError(f"population は 2 以上 / population must be >= 2: {self.population}")
        if self.iterations < 0:
            raise ValueError(f"iterations は 0 以上 / iterations must be >= 0: {self.iterations}")
        for name in ("crossover_prob", "mutation_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} は [0, 1] の範囲 / {name} must be in [0, 1]: {v}")
        if self.workers < 1:
            raise ValueError(f"workers は 1 以上 / workers must be >= 1: {self.workers}")


class PlacementResult(NamedTuple):
    placement: Placement
    trace: list[RowOp]
    gate_count: int
    history: list[int]


# ── 公開 API / Public API ───────────────────────────────────────────────────

def default_ga_params(
    n: int,
    seed: int = 0,
    table: dict[int, tuple[int, int]] | None = None,
    **overrides,
) -> GAParams:
    """デバイスサイズに最も近い既定値（9→30/15, 16→50/100, 20→100/100）。None の上書きは無視。"""
    sizes = table or GA_DEFAULTS_BY_SIZE
    size = min(sizes, key=lambda s: (abs(s - n), s))
    population, iterations = sizes[size]
    values = {"population": population, "iterations": iterations, "seed": seed}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return GAParams(**values)


def apply_placement(p: ParityMatrix, pl: Placement) -> ParityMatrix:
    """result[pl(i)][pl(j)] = p[i][j]。"""
    if p.n != pl.n:
        raise ValueError(f"サイズ不一致 / size mismatch: matrix {p.n}, placement {pl.n}")
    rows = [0] * p.n
    for i in range(p.n):
        r = p.row(i)
        acc = 0
        for j in range(p.n):
            if (r >> j) & 1:
                acc |= 1 << pl(j)
        rows[pl(i)] = acc
    return ParityMatrix(p.n, rows)


def relabel_circuit(c: Circuit, mapping: Placement) -> Circuit:
    """量子ビット q を mapping(q) に付け替えた回路。"""
    if c.n != mapping.n:
        raise ValueError(f"サイズ不一致 / size mismatch: circuit {c.n}, mapping {mapping.n}")
    return Circuit(c.n, [Gate(g.kind, tuple(mapping(q) for q in g.qubits), g.angle) for g in c.gates])


def optimize_placement(
    p: ParityMatrix,
    a: Architecture,
    params: GAParams,
    synth: SynthFn = synthesize_cnot,
) -> PlacementResult:
    """
    初期集団は恒等置換＋一様ランダム置換。トーナメント選択（3）、順序交叉（OX1）、
    互換 1 回の突然変異、エリート 1 個保存。適応度が同じなら置換の辞書順で比較する。
    """
    n = p.n
    cache: dict[tuple[int, ...], list[RowOp]] = {}

    def evaluate(population: list[tuple[int, ...]]) -> None:
        pending = list(dict.fromkeys(perm for perm in population if perm not in cache))
        if not pending:
            return
        if params.workers > 1 and len(pending) > 1:
            with ProcessPoolExecutor(max_workers=params.workers) as pool:
                results = pool.map(_synth_placed, [(p, a, perm, synth) for perm in pending])
                cache.update(zip(pending, results))
        else:
            for perm in pending:
                cache[perm] = _synth_placed((p, a, perm, synth))

    def key(perm: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
        return (len(cache[perm]), perm)

    identity = tuple(range(n))
    if n == 1:
        ops = synth(p, a)
        return PlacementResult(Placement(identity), ops, len(ops), [len(ops)])

    rng = np.random.default_rng(params.seed)
    population = [identity] + [tuple(int(v) for v in rng.permutation(n)) for _ in range(params.population - 1)]
    evaluate(population)
    best = min(population, key=key)
    history = [len(cache[best])]

    for generation in range(params.iterations):
        offspring = [best]
        while len(offspring) < params.population:
            first = _tournament(population, key, rng)
            second = _tournament(population, key, rng)
            child = _order_crossover(first, second, rng) if rng.random() < params.crossover_prob else first
            if rng.random() < params.mutation_prob:
                child = _transposition(child, rng)
            offspring.append(child)
        population = offspring
        evaluate(population)
        best = min(population, key=key)
        history.append(len(cache[best]))
        logger.debug(f"GA 世代 {generation + 1}/{params.iterations}: best={history[-1]}")

    ops = cache[best]
    logger.debug(f"配置探索完了: best={len(ops)}, identity={len(cache[identity])}, evaluated={len(cache)}")
    return PlacementResult(Placement(best), ops, len(ops), history)


# ── 内部ヘルパー / Internal Helpers ─────────────────────────────────────────

def _synth_placed(args: tuple[ParityMatrix, Architecture, tuple[int, ...], SynthFn]) -> list[RowOp]:
    p, a, perm, synth = args
    return synth(apply_placement(p, Placement(perm)), a)


def _tournament(population, key, rng: np.random.Generator) -> tuple[int, ...]:
    picks = rng.integers(len(population), size=TOURNAMENT_SIZE)
    return min((population[int(i)] for i in picks), key=key)


def _order_crossover(first: tuple[int, ...], second: tuple[int, ...], rng: np.random.Generator) -> tuple[int, ...]:
    """OX1: first の区間 [i, j) を保ち、残りは second の順で j から巡回的に埋める。"""
    n = len(first)
    i, j = sorted(int(v) for v in rng.choice(n + 1, size=2, replace=False))
    child: list[int | None] = [None] * n
    child[i:j] = first[i:j]
    kept = set(first[i:j])
    donors = [second[(j + k) % n] for k in range(n)]
    fill = iter(g for g in donors if g not in kept)
    for k in range(n):
        pos = (j + k) % n
        if child[pos] is None:
            child[pos] = next(fill)
    return tuple(child)


def _transposition(perm: tuple[int, ...], rng: np.random.Generator) -> tuple[int, ...]:
    i, j = (int(v) for v in rng.choice(len(perm), size=2, replace=False))
    out = list(perm)
    out[i], out[j] = out[j], out[i]
    return tuple(out)
