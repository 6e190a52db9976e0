"""
router.py
接続制約付き Gauss 消去（steiner-down / steiner-up）による CNOT 回路の再合成。

Constrained Gaussian elimination over GF(2): every row operation is taken
along an edge of a Steiner tree, so the extracted CNOT circuit only acts on
coupled qubit pairs. steiner_gauss handles devices with a Hamiltonian path,
steiner_gauss_rec handles arbitrary connected graphs.
"""

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import networkx as nx

from arch import (
    Architecture,
    SteinerTree,
    bfs_spanning_tree,
    decreasing_steiner_tree,
    dft_postorder,
    steiner_tree,
)
from circuit_io import Circuit, Gate
from gf2 import ParityMatrix, RowOp, SingularMatrixError, is_identity, replay

logger = logging.getLogger(__name__)

Ordering = Sequence[int] | Mapping[int, int]


class RoutingError(RuntimeError):
    """制約付き消去の失敗・不正なトレース / Constrained elimination failed."""


@dataclass
class EliminationState:
    """
    消去中の行列と記録済み行操作。matrix は所有者専用のコピー。
    active は未完了の頂点集合。
    """

    matrix: ParityMatrix
    arch: Architecture
    ops: list[RowOp] = field(default_factory=list)
    active: set[int] = field(default_factory=set)

    @classmethod
    def start(cls, p: ParityMatrix, a: Architecture) -> "EliminationState":
        if p.n != a.n:
            raise RoutingError(f"行列サイズとアーキテクチャが不一致 / matrix n={p.n}, arch n={a.n}")
        return cls(matrix=p.copy(), arch=a, active=set(range(a.n)))

    def apply(self, src: int, tgt: int) -> None:
        if not self.arch.has_edge(src, tgt):
            raise RoutingError(f"辺でない行操作 / row op ({src}->{tgt}) is not an edge of {self.arch.name}")
        op = RowOp(src, tgt)
        self.matrix.apply(op)
        self.ops.append(op)

    def bit(self, row: int, col: int) -> int:
        return self.matrix[row, col]


# ── 公開 API / Public API ───────────────────────────────────────────────────

def steiner_down(
    state: EliminationState,
    k: int,
    allowed: Iterable[int],
    order: Ordering | None = None,
) -> EliminationState:
    """列 k の対角より下（allowed の行）を Steiner 木上の行操作で 0 にする。"""
    rank = order if order is not None else range(state.arch.n)
    allowed_set = set(allowed)
    terminals = {k} | {j for j in allowed_set if rank[j] > rank[k] and state.bit(j, k)}
    if not any(state.bit(j, k) for j in terminals):
        raise SingularMatrixError(f"列 {k} にピボットがありません / singular at column {k}")
    if terminals == {k}:
        return state

    tree = steiner_tree(state.arch, terminals, k, allowed_set)
    _fill(state, tree, k, both_directions=True)
    _empty(state, tree)
    return state


def steiner_up(
    state: EliminationState,
    k: int,
    allowed: Iterable[int],
    nondesc: Iterable[int] = (),
    order: Ordering | None = None,
) -> EliminationState:
    """
    列 k の対角より上（allowed の行）を 0 にする。
    行操作は親 → 子のみで、nondesc 内の頂点同士を除き降順に限る。
    """
    rank = order if order is not None else range(state.arch.n)
    allowed_set = set(allowed)
    if not state.bit(k, k):
        raise RoutingError(f"対角要素 [{k}][{k}] が 0 です / diagonal is zero at {k}")
    terminals = {k} | {j for j in allowed_set if rank[j] < rank[k] and state.bit(j, k)}
    if terminals == {k}:
        return state

    tree = decreasing_steiner_tree(state.arch, terminals, k, rank, nondesc, allowed_set)
    _fill(state, tree, k, both_directions=False)
    _empty(state, tree)
    return state


def steiner_gauss(p: ParityMatrix, a: Architecture) -> list[RowOp]:
    """
    ハミルトン路の順序で下三角消去 → 上三角消去を行う。
    返す ops を p に順に適用すると恒等行列になる。
    """
    if a.hamiltonian_path is None:
        raise RoutingError(f"{a.name}: ハミルトン路がありません / no Hamiltonian path, use steiner_gauss_rec")
    rank = a.path_rank
    state = EliminationState.start(p, a)

    for k in a.hamiltonian_path:
        steiner_down(state, k, state.active, rank)
        state.active.discard(k)

    state.active = set(range(a.n))
    for k in reversed(a.hamiltonian_path):
        steiner_up(state, k, state.active, (), rank)
        state.active.discard(k)

    if not is_identity(state.matrix):
        raise RoutingError("消去後の行列が恒等行列ではありません / elimination did not reach identity")
    logger.debug(f"steiner-gauss: arch={a.name}, ops={len(state.ops)}")
    return state.ops


def steiner_gauss_rec(p: ParityMatrix, a: Architecture, root: int | None = None) -> list[RowOp]:
    """
    全域木の後行順番号付けを使う再帰版。ハミルトン路を持たないグラフでも動く。
    root は BFS 全域木の起点（既定は最小番号の頂点）。
    """
    state = EliminationState.start(p, a)
    _gauss_rec(state, set(range(a.n)), root)
    if not is_identity(state.matrix):
        raise RoutingError("消去後の行列が恒等行列ではありません / elimination did not reach identity")
    logger.debug(f"steiner-gauss-rec: arch={a.name}, ops={len(state.ops)}")
    return state.ops


def synthesize_cnot(p: ParityMatrix, a: Architecture) -> list[RowOp]:
    """ハミルトン路があれば steiner_gauss、なければ steiner_gauss_rec。"""
    if a.hamiltonian_path is not None:
        return steiner_gauss(p, a)
    return steiner_gauss_rec(p, a)


def trace_to_circuit(ops: list[RowOp], n: int) -> Circuit:
    """行操作列を逆順にして CNOT 回路にする。"""
    for op in ops:
        op.validate(n)
    return Circuit(n, [Gate.cnot(op.src, op.tgt) for op in reversed(ops)])


def verify_trace(p: ParityMatrix, ops: list[RowOp], a: Architecture) -> None:
    """全ての操作が辺上にあり、p を恒等行列へ戻すことを確認する。"""
    for op in ops:
        if not a.has_edge(op.src, op.tgt):
            raise RoutingError(f"辺でない行操作 / op {op} is not an edge of {a.name}")
    if not is_identity(replay(p, ops)):
        raise RoutingError("トレースを再生しても恒等行列になりません / trace does not reduce matrix to identity")


# ── 内部ヘルパー / Internal Helpers ─────────────────────────────────────────

def _fill(state: EliminationState, tree: SteinerTree, k: int, both_directions: bool) -> None:
    """
    木の全頂点の列 k を 1 にする。各ラウンドは頂点が重ならない操作の組（並列層）。
    both_directions=False のときは親 → 子のみ。
    """
    edges = tree.bfs_edges()
    while not all(state.bit(v, k) for v in tree.vertices):
        used: set[int] = set()
        for parent, child in edges:
            if parent in used or child in used:
                continue
            bp, bc = state.bit(parent, k), state.bit(child, k)
            if bp and not bc:
                state.apply(parent, child)
            elif both_directions and bc and not bp:
                state.apply(child, parent)
            else:
                continue
            used.update((parent, child))
        if not used:
            raise RoutingError(f"列 {k} の fill が進みません / fill phase stalled at column {k}")


def _empty(state: EliminationState, tree: SteinerTree) -> None:
    """深いレベルから順に葉へ親の行を足し、根以外を 0 にする。"""
    parent = tree.parent
    for level in reversed(tree.levels()[1:]):
        for v in level:
            state.apply(parent[v], v)


def _gauss_rec(state: EliminationState, vertices: set[int], root: int | None = None) -> None:
    a = state.arch
    if len(vertices) == 1:
        (v,) = vertices
        if not state.bit(v, v):
            raise SingularMatrixError(f"列 {v} にピボットがありません / singular at column {v}")
        return

    spanning = bfs_spanning_tree(a, vertices, root)
    tree = nx.Graph()
    tree.add_nodes_from(vertices)
    tree.add_edges_from(spanning)
    start = max(v for v in vertices if tree.degree(v) <= 1)
    labels = dft_postorder(a, start, spanning, vertices).labels

    ascending = sorted(vertices, key=labels.__getitem__)
    for i, k in enumerate(ascending):
        steiner_down(state, k, ascending[i:], labels)

    while tree.number_of_nodes():
        k = max(tree.nodes, key=labels.__getitem__)
        leaf = max((v for v in tree.nodes if tree.degree(v) <= 1), key=labels.__getitem__)
        block = nx.shortest_path(tree, leaf, k)
        steiner_up(state, leaf, set(tree.nodes), block, labels)
        if len(block) > 1:
            _gauss_rec(state, set(block))
        tree.remove_node(leaf)
