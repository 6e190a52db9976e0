"""
arch.py
デバイス結合グラフ（アーキテクチャ）と最短経路・Steiner 木ヒューリスティクス。

Device connectivity graphs, all-pairs shortest paths, Steiner and
decreasing-Steiner tree heuristics, and the post-order DFT numbering
used by the recursive eliminator.
"""

import json
import logging
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data" / "architectures"

# JSON で配布するデバイス / devices shipped as JSON
_JSON_BUILTINS = ("ibm-qx5", "rigetti-16q-aspen", "ibm-q20-tokyo")
_GRID_BUILTINS = {"square-9": (3, 3), "square-16": (4, 4)}
_JSON_FIELDS = {"name", "n", "edges", "hamiltonian_path"}


class ArchitectureError(ValueError):
    """グラフの不変条件違反 / Architecture invariant violated."""


class SteinerError(ValueError):
    """端点を制約内で連結できない / Terminals cannot be connected under the constraints."""


# ── 型 / Types ───────────────────────────────────────────────────────────────

class Architecture:
    """
    無向・単純・連結なデバイスグラフ。構築後は不変。
    dist / next_hop は Floyd-Warshall で前計算する。
    """

    def __init__(
        self,
        name: str,
        n: int,
        edges: Iterable[Sequence[int]],
        hamiltonian_path: Sequence[int] | None = None,
    ):
        if n < 1:
            raise ArchitectureError(f"頂点数が不正です / n must be >= 1: {n}")
        edge_set: set[tuple[int, int]] = set()
        for e in edges:
            if len(e) != 2:
                raise ArchitectureError(f"辺の形式が不正です / bad edge: {e!r}")
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ArchitectureError(f"自己ループは不可 / self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ArchitectureError(f"辺 ({u},{v}) が範囲外 / edge out of range (n={n})")
            pair = (min(u, v), max(u, v))
            if pair in edge_set:
                raise ArchitectureError(f"重複辺 / duplicate edge {pair}")
            edge_set.add(pair)

        self.name = name
        self.n = n
        self.edges: frozenset[tuple[int, int]] = frozenset(edge_set)
        self.graph = nx.Graph()
        self.graph.add_nodes_from(range(n))
        self.graph.add_edges_from(sorted(edge_set))
        if not nx.is_connected(self.graph):
            raise ArchitectureError(f"{name}: グラフが連結ではありません / graph is disconnected")

        self._adj: tuple[tuple[int, ...], ...] = tuple(
            tuple(sorted(self.graph.neighbors(v))) for v in range(n)
        )

        self.hamiltonian_path: tuple[int, ...] | None = None
        if hamiltonian_path is not None:
            path = tuple(int(v) for v in hamiltonian_path)
            if sorted(path) != list(range(n)):
                raise ArchitectureError(f"{name}: ハミルトン路が頂点の置換ではありません / path is not a permutation")
            for u, v in zip(path, path[1:]):
                if (min(u, v), max(u, v)) not in self.edges:
                    raise ArchitectureError(f"{name}: ハミルトン路の ({u},{v}) が辺ではありません / path step is not an edge")
            self.hamiltonian_path = path

        self.dist, self.next_hop = floyd_warshall(self)

    @property
    def path_rank(self) -> list[int] | None:
        """ハミルトン路上の位置（vertex → rank）。"""
        if self.hamiltonian_path is None:
            return None
        rank = [0] * self.n
        for i, v in enumerate(self.hamiltonian_path):
            rank[v] = i
        return rank

    def neighbors(self, v: int) -> tuple[int, ...]:
        """昇順に並んだ隣接頂点。"""
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def subgraph(self, vertices: Iterable[int]) -> nx.Graph:
        return self.graph.subgraph(vertices)

    def is_connected_on(self, vertices: Iterable[int]) -> bool:
        vs = set(vertices)
        return bool(vs) and nx.is_connected(self.graph.subgraph(vs))

    def shortest_path(self, u: int, v: int, allowed: Iterable[int] | None = None) -> list[int]:
        """
        u から v への最短経路（両端含む）。同距離なら小さい番号の隣接頂点を選ぶ。
        allowed を与えると誘導部分グラフ内に限定する。
        """
        if allowed is None:
            path = [u]
            while path[-1] != v:
                path.append(int(self.next_hop[path[-1], v]))
            return path
        allowed_set = set(allowed)
        to_v = self._distances_to(v, allowed_set)
        if u not in to_v:
            raise SteinerError(f"{u} から {v} へ到達できません / {u} cannot reach {v} within allowed set")
        path = [u]
        while path[-1] != v:
            cur = path[-1]
            path.append(min(w for w in self._adj[cur] if to_v.get(w) == to_v[cur] - 1))
        return path

    def _distances_to(self, v: int, allowed: set[int]) -> dict[int, int]:
        if v not in allowed:
            raise SteinerError(f"頂点 {v} が許可集合外です / vertex {v} not allowed")
        return nx.single_source_shortest_path_length(self.graph.subgraph(allowed), v)

    def __repr__(self) -> str:
        return f"Architecture(name={self.name!r}, n={self.n}, edges={len(self.edges)})"


@dataclass(frozen=True)
class SteinerTree:
    """根付き Steiner 木。edges は (parent, child)。"""

    root: int
    vertices: frozenset[int]
    edges: frozenset[tuple[int, int]]
    terminals: frozenset[int]

    @property
    def steiner_points(self) -> frozenset[int]:
        return self.vertices - self.terminals

    @property
    def parent(self) -> dict[int, int]:
        return {c: p for p, c in self.edges}

    def children(self, v: int) -> list[int]:
        return sorted(c for p, c in self.edges if p == v)

    def levels(self) -> list[list[int]]:
        """根からの BFS レベル（各レベル内は昇順）。"""
        out = [[self.root]]
        while True:
            nxt = sorted(c for v in out[-1] for c in self.children(v))
            if not nxt:
                return out
            out.append(nxt)

    def bfs_edges(self) -> list[tuple[int, int]]:
        """レベル順に並んだ (parent, child) 辺。"""
        return [(p, c) for level in self.levels() for p in level for c in self.children(p)]

    def leaves(self) -> set[int]:
        """子を持たない非根頂点。"""
        parents = {p for p, _ in self.edges}
        return {v for v in self.vertices if v not in parents and v != self.root}


@dataclass(frozen=True)
class RootedSpanningTree:
    """
    後行順 DFT で番号付けした全域木。
    root は番号 0 の頂点、start は DFT 開始葉（最大番号）。
    parent は DFT の向き（start 側が親）。
    """

    root: int
    start: int
    parent: dict[int, int]
    labels: dict[int, int]
    order: list[int] = field(default_factory=list)

    def children(self, v: int) -> list[int]:
        return sorted(c for c, p in self.parent.items() if p == v)


# ── 公開 API / Public API ───────────────────────────────────────────────────

def floyd_warshall(a: Architecture) -> tuple[np.ndarray, np.ndarray]:
    """
    全点対最短ホップ数と経路復元用 next_hop を返す。
    next_hop[u][v] は dist を 1 減らす隣接頂点のうち最小番号。
    """
    n = a.n
    big = n + 1
    dist = np.full((n, n), big, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    for u, v in a.graph.edges():
        dist[u, v] = dist[v, u] = 1
    for k in range(n):
        dist = np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :])
    if (dist >= big).any():
        raise ArchitectureError(f"{a.name}: グラフが連結ではありません / graph is disconnected")

    next_hop = np.zeros((n, n), dtype=np.int64)
    for u in range(n):
        nbrs = sorted(a.graph.neighbors(u))
        for v in range(n):
            if u == v:
                next_hop[u, v] = u
                continue
            next_hop[u, v] = next(w for w in nbrs if dist[w, v] == dist[u, v] - 1)
    return dist, next_hop


def average_distance(a: Architecture) -> float:
    if a.n < 2:
        return 0.0
    return float(a.dist.sum()) / (a.n * (a.n - 1))


def steiner_tree(
    a: Architecture,
    terminals: Iterable[int],
    root: int,
    allowed: Iterable[int] | None = None,
) -> SteinerTree:
    """
    メトリック閉包の最小全域木を最短経路に展開して Steiner 木を近似する。
    展開後の閉路は root からの BFS で除去し、端点でない葉を刈り込む。
    """
    terms = frozenset(terminals)
    allowed_set = set(range(a.n)) if allowed is None else set(allowed)
    if root not in terms:
        raise SteinerError(f"root {root} が端点集合に含まれていません / root not a terminal")
    if not terms <= allowed_set:
        raise SteinerError(f"端点が許可集合外です / terminals outside allowed: {sorted(terms - allowed_set)}")
    if len(terms) == 1:
        return SteinerTree(root, frozenset({root}), frozenset(), terms)

    ordered = sorted(terms)
    closure = nx.Graph()
    closure.add_nodes_from(ordered)
    for t in ordered:
        to_t = a._distances_to(t, allowed_set)
        for s in ordered:
            if s < t:
                if s not in to_t:
                    raise SteinerError(f"端点 {s} と {t} を連結できません / terminals not connectable")
                closure.add_edge(s, t, weight=to_t[s])
    mst = nx.minimum_spanning_tree(closure, algorithm="kruskal")

    union = nx.Graph()
    union.add_nodes_from(ordered)
    for u, v in sorted(tuple(sorted(e)) for e in mst.edges()):
        path = a.shortest_path(u, v, allowed_set)
        union.add_edges_from(zip(path, path[1:]))

    bfs = list(nx.bfs_edges(union, root, sort_neighbors=sorted))
    tree = _prune(root, bfs, terms)
    logger.debug(f"Steiner 木: terminals={ordered}, root={root}, vertices={sorted(tree.vertices)}")
    return tree


def decreasing_steiner_tree(
    a: Architecture,
    terminals: Iterable[int],
    root: int,
    ordering: Sequence[int] | Mapping[int, int],
    nondesc: Iterable[int] = (),
    allowed: Iterable[int] | None = None,
) -> SteinerTree:
    """
    全ての辺が親 > 子（ordering 上）となる Steiner 木を貪欲に構築する。
    親子が両方 nondesc に含まれる辺だけは例外として許す。
    ハミルトン路の順序なら路そのものが降順の経路なので、必ず見つかる。
    """
    terms = frozenset(terminals)
    nd = frozenset(nondesc)
    allowed_set = set(range(a.n)) if allowed is None else set(allowed)
    if root not in terms:
        raise SteinerError(f"root {root} が端点集合に含まれていません / root not a terminal")
    if not terms <= allowed_set:
        raise SteinerError(f"端点が許可集合外です / terminals outside allowed: {sorted(terms - allowed_set)}")
    if any(ordering[t] > ordering[root] for t in terms if not (t in nd and root in nd)):
        raise SteinerError(f"root {root} が端点の最大ではありません / root is not the maximal terminal")

    def can_move(v: int, w: int) -> bool:
        return ordering[w] < ordering[v] or (v in nd and w in nd)

    in_tree = {root}
    edges: list[tuple[int, int]] = []
    pending = set(terms) - in_tree

    while pending:
        pred: dict[int, int] = {}
        dist = {v: 0 for v in sorted(in_tree)}
        queue = deque(sorted(in_tree))
        while queue:
            v = queue.popleft()
            for w in a.neighbors(v):
                if w in dist or w not in allowed_set or not can_move(v, w):
                    continue
                dist[w] = dist[v] + 1
                pred[w] = v
                queue.append(w)

        reachable = [t for t in pending if t in dist]
        if not reachable:
            raise SteinerError(f"端点 {min(pending)} へ降順の経路がありません / no decreasing route to {min(pending)}")
        target = min(reachable, key=lambda t: (dist[t], t))
        path = [target]
        while path[-1] not in in_tree:
            path.append(pred[path[-1]])
        path.reverse()

        for p, c in zip(path, path[1:]):
            edges.append((p, c))
            in_tree.add(c)
        pending -= in_tree

    return _prune(root, edges, terms)


def dft_postorder(
    a: Architecture,
    start_leaf: int,
    spanning: Iterable[Sequence[int]],
    vertices: Iterable[int] | None = None,
) -> RootedSpanningTree:
    """
    全域木を start_leaf から深さ優先で辿り、子の後に親を番号付けする（後行順）。
    vertices を与えた場合はその部分集合上の全域木として扱う。
    """
    vs = sorted(range(a.n) if vertices is None else set(vertices))
    tree = nx.Graph()
    tree.add_nodes_from(vs)
    for e in sorted(tuple(sorted(e)) for e in spanning):
        if not a.has_edge(*e):
            raise ArchitectureError(f"全域木の辺 {e} がグラフにありません / spanning edge not in graph")
        tree.add_edge(*e)
    if set(tree.nodes) != set(vs) or not nx.is_tree(tree):
        raise ArchitectureError("全域木ではありません / spanning edges do not form a spanning tree")
    if start_leaf not in tree:
        raise ArchitectureError(f"開始頂点 {start_leaf} が木にありません / start not in tree")
    if len(vs) > 1 and tree.degree(start_leaf) != 1:
        raise ArchitectureError(f"開始頂点 {start_leaf} は葉ではありません / start is not a leaf")

    order = list(nx.dfs_postorder_nodes(tree, start_leaf))
    labels = {v: i for i, v in enumerate(order)}
    parent = nx.dfs_predecessors(tree, start_leaf)
    return RootedSpanningTree(root=order[0], start=start_leaf, parent=parent, labels=labels, order=order)


def bfs_spanning_tree(a: Architecture, vertices: Iterable[int], root: int | None = None) -> list[tuple[int, int]]:
    """vertices 上の BFS 全域木（隣接は昇順に展開）。"""
    vs = set(vertices)
    src = min(vs) if root is None else root
    return list(nx.bfs_edges(a.graph.subgraph(vs), src, sort_neighbors=sorted))


def square_grid(rows: int, cols: int, name: str | None = None) -> Architecture:
    """
    蛇行（boustrophedon）番号付けの格子。[0..n-1] がハミルトン路になる。
    3×3 は [0 1 2] / [5 4 3] / [6 7 8]。
    """
    def label(r: int, c: int) -> int:
        return r * cols + (c if r % 2 == 0 else cols - 1 - c)

    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((label(r, c), label(r, c + 1)))
            if r + 1 < rows:
                edges.append((label(r, c), label(r + 1, c)))
    n = rows * cols
    return Architecture(name or f"grid-{rows}x{cols}", n, edges, list(range(n)))


def path_graph(n: int, name: str | None = None) -> Architecture:
    return Architecture(name or f"path-{n}", n, [(i, i + 1) for i in range(n - 1)], list(range(n)))


def load_architecture(path: str | Path) -> Architecture:
    """アーキテクチャ JSON を読み込んで検証する。"""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"アーキテクチャ JSON が見つかりません: {p}")
    with open(p, encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ArchitectureError(f"JSON の解析に失敗しました / invalid JSON in {p}: {e}") from e
    if not isinstance(raw, dict):
        raise ArchitectureError(f"JSON のトップレベルはオブジェクトが必要です / {p}")
    unknown = set(raw) - _JSON_FIELDS
    missing = _JSON_FIELDS - set(raw)
    if unknown:
        raise ArchitectureError(f"未知のフィールド / unknown fields: {sorted(unknown)}")
    if missing:
        raise ArchitectureError(f"必須フィールドがありません / missing fields: {sorted(missing)}")
    if not isinstance(raw["n"], int) or not isinstance(raw["edges"], list):
        raise ArchitectureError("n は整数、edges は配列が必要です / bad field types")
    arch = Architecture(str(raw["name"]), raw["n"], raw["edges"], raw["hamiltonian_path"])
    logger.info(f"アーキテクチャ読み込み完了: {arch.name} (n={arch.n}, edges={len(arch.edges)})")
    return arch


def builtin_names() -> list[str]:
    return list(_GRID_BUILTINS) + list(_JSON_BUILTINS)


@lru_cache(maxsize=None)
def builtin(name: str) -> Architecture:
    if name in _GRID_BUILTINS:
        rows, cols = _GRID_BUILTINS[name]
        return square_grid(rows, cols, name)
    if name in _JSON_BUILTINS:
        return load_architecture(DATA_DIR / f"{name}.json")
    raise ArchitectureError(f"未知のアーキテクチャ / unknown architecture: {name} (choose from {builtin_names()})")


# ── 内部ヘルパー / Internal Helpers ─────────────────────────────────────────

def _prune(root: int, edges: Iterable[tuple[int, int]], terminals: frozenset[int]) -> SteinerTree:
    """(parent, child) 辺集合から端点でない葉を繰り返し除去する。"""
    children: dict[int, set[int]] = {root: set()}
    parent: dict[int, int] = {}
    for p, c in edges:
        children.setdefault(p, set()).add(c)
        children.setdefault(c, set())
        parent[c] = p

    stack = [v for v, ch in children.items() if not ch and v != root and v not in terminals]
    while stack:
        v = stack.pop()
        p = parent.pop(v)
        del children[v]
        children[p].discard(v)
        if not children[p] and p != root and p not in terminals:
            stack.append(p)

    return SteinerTree(
        root=root,
        vertices=frozenset(children),
        edges=frozenset((p, c) for c, p in parent.items()),
        terminals=terminals,
    )
