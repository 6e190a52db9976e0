import itertools
import json

import networkx as nx
import pytest

from arch import (
    Architecture,
    ArchitectureError,
    SteinerError,
    average_distance,
    bfs_spanning_tree,
    builtin,
    builtin_names,
    decreasing_steiner_tree,
    dft_postorder,
    load_architecture,
    path_graph,
    square_grid,
    steiner_tree,
)

SQUARE9_EDGES = {
    (0, 1), (1, 2), (4, 5), (3, 4), (6, 7), (7, 8),
    (0, 5), (5, 6), (1, 4), (4, 7), (2, 3), (3, 8),
}


def _check_tree(a, tree):
    """木としての不変条件（辺が実在、|E| = |V| - 1、根から到達可能、葉は端点）。"""
    assert tree.root in tree.vertices
    assert tree.terminals <= tree.vertices
    assert len(tree.edges) == len(tree.vertices) - 1
    for p, c in tree.edges:
        assert a.has_edge(p, c)
    g = nx.DiGraph(list(tree.edges))
    g.add_node(tree.root)
    assert set(nx.descendants(g, tree.root)) | {tree.root} == set(tree.vertices)
    assert tree.leaves() <= tree.terminals


# ── Architecture ─────────────────────────────────────────────────────────────

def test_square9_layout(square9):
    assert square9.n == 9
    assert set(square9.edges) == SQUARE9_EDGES
    assert square9.hamiltonian_path == tuple(range(9))
    assert square9.path_rank == list(range(9))


def test_square16_edge_count():
    a = builtin("square-16")
    assert a.n == 16
    assert len(a.edges) == 24


@pytest.mark.parametrize("name", builtin_names())
def test_builtins_are_valid(name):
    a = builtin(name)
    assert a.name == name
    assert nx.is_connected(a.graph)
    path = a.hamiltonian_path
    assert sorted(path) == list(range(a.n))
    assert all(a.has_edge(u, v) for u, v in zip(path, path[1:]))


def test_builtin_sizes():
    assert builtin("ibm-qx5").n == 16
    assert builtin("rigetti-16q-aspen").n == 16
    assert builtin("ibm-q20-tokyo").n == 20


def test_unknown_builtin():
    with pytest.raises(ArchitectureError):
        builtin("square-25")


@pytest.mark.parametrize(
    "n, edges, path",
    [
        (3, [(0, 0), (0, 1), (1, 2)], None),
        (3, [(0, 1), (1, 0), (1, 2)], None),
        (3, [(0, 1), (1, 3)], None),
        (4, [(0, 1), (2, 3)], None),
        (3, [(0, 1), (1, 2)], [0, 2, 1]),
        (3, [(0, 1), (1, 2)], [0, 1]),
    ],
)
def test_architecture_invariants(n, edges, path):
    with pytest.raises(ArchitectureError):
        Architecture("bad", n, edges, path)


# ── 最短経路 / Shortest paths ────────────────────────────────────────────────

def test_floyd_warshall_distances(square9):
    assert square9.dist[0, 8] == 4
    assert square9.dist[0, 1] == 1
    assert (square9.dist == square9.dist.T).all()
    for u in range(9):
        for v in range(9):
            assert (square9.dist[u, v] == 1) == square9.has_edge(u, v)


def test_shortest_path_tie_break_and_restriction(square9):
    # 0 → 7 は 0-1-4-7 と 0-5-4-7 / 0-5-6-7 が同距離。小さい番号を優先する
    assert square9.shortest_path(0, 7) == [0, 1, 4, 7]
    assert square9.shortest_path(0, 7, allowed=range(9)) == [0, 1, 4, 7]
    assert square9.shortest_path(0, 2, allowed={0, 5, 4, 3, 2}) == [0, 5, 4, 3, 2]
    with pytest.raises(SteinerError):
        square9.shortest_path(0, 2, allowed={0, 2})


def test_average_distance(square9):
    assert average_distance(square9) == pytest.approx(2.0)
    assert average_distance(path_graph(1)) == 0.0


# ── Steiner 木 ───────────────────────────────────────────────────────────────

def test_steiner_tree_example(square9):
    tree = steiner_tree(square9, {0, 2, 7}, 0)
    assert tree.vertices == {0, 1, 2, 4, 7}
    assert tree.steiner_points == {1, 4}
    assert tree.levels() == [[0], [1], [2, 4], [7]]
    _check_tree(square9, tree)


def test_steiner_tree_trivial_cases(square9):
    single = steiner_tree(square9, {4}, 4)
    assert single.vertices == {4} and not single.edges
    pair = steiner_tree(square9, {0, 1}, 0)
    assert pair.edges == {(0, 1)}


def test_steiner_tree_respects_allowed(square9):
    tree = steiner_tree(square9, {0, 2}, 0, allowed={0, 2, 3, 4, 5, 6, 7, 8})
    assert 1 not in tree.vertices
    assert tree.vertices == {0, 5, 4, 3, 2}
    _check_tree(square9, tree)


def test_steiner_tree_errors(square9):
    with pytest.raises(SteinerError):
        steiner_tree(square9, {0, 2}, 4)
    with pytest.raises(SteinerError):
        steiner_tree(square9, {0, 2}, 0, allowed={0, 2})
    with pytest.raises(SteinerError):
        steiner_tree(square9, {0, 8}, 0, allowed={0, 1, 2})


def test_steiner_tree_size_bound(square9):
    for terms in [{0, 8, 6}, {2, 6, 4}, {0, 2, 6, 8}, {1, 3, 5, 7}]:
        root = min(terms)
        tree = steiner_tree(square9, terms, root)
        _check_tree(square9, tree)
        pairwise = sum(int(square9.dist[u, v]) for u, v in itertools.combinations(sorted(terms), 2))
        assert len(tree.vertices) <= pairwise + 1


def _exact_steiner_size(a, terminals):
    """全探索による最小 Steiner 木の頂点数。"""
    terms = set(terminals)
    others = [v for v in range(a.n) if v not in terms]
    for extra in range(len(others) + 1):
        for combo in itertools.combinations(others, extra):
            if a.is_connected_on(terms | set(combo)):
                return len(terms) + extra
    raise AssertionError(f"connectable terminals expected: {sorted(terms)}")


def _connected_four_vertex_graphs():
    all_edges = list(itertools.combinations(range(4), 2))
    for k in range(3, len(all_edges) + 1):
        for edges in itertools.combinations(all_edges, k):
            g = nx.Graph(edges)
            if g.number_of_nodes() == 4 and nx.is_connected(g):
                yield edges


def test_steiner_tree_matches_exact_on_four_vertices():
    checked = 0
    for edges in _connected_four_vertex_graphs():
        a = Architecture("k4-sub", 4, edges)
        for size in range(2, 5):
            for terms in itertools.combinations(range(4), size):
                tree = steiner_tree(a, terms, terms[0])
                _check_tree(a, tree)
                assert len(tree.vertices) == _exact_steiner_size(a, terms)
                checked += 1
    assert checked > 0


def test_decreasing_steiner_tree_example(square9):
    tree = decreasing_steiner_tree(square9, {2, 4, 8}, 8, list(range(9)))
    assert tree.vertices == {2, 3, 4, 7, 8}
    assert tree.edges == {(8, 3), (3, 2), (8, 7), (7, 4)}
    # 4 を 3 の子にする木（3-4 辺）は降順ではないので使われない
    assert (3, 4) not in tree.edges
    assert all(p > c for p, c in tree.edges)
    _check_tree(square9, tree)


def test_decreasing_steiner_tree_single_and_errors(square9):
    single = decreasing_steiner_tree(square9, {5}, 5, list(range(9)))
    assert single.vertices == {5}
    with pytest.raises(SteinerError):
        decreasing_steiner_tree(square9, {2, 8}, 2, list(range(9)))


def test_decreasing_steiner_tree_nondescending_block():
    star = Architecture("star", 5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    labels = {1: 0, 2: 1, 3: 2, 0: 3, 4: 4}
    # 3 → 0 は昇順だが、両端が nondesc なので許される
    tree = decreasing_steiner_tree(star, {3, 1, 2}, 3, labels, nondesc={3, 0})
    assert tree.edges == {(3, 0), (0, 1), (0, 2)}
    with pytest.raises(SteinerError):
        decreasing_steiner_tree(star, {3, 1, 2}, 3, labels)


def test_decreasing_tree_takes_long_monotone_route():
    # 5-0-1 は短いが 0 → 1 が昇順なので、ハミルトン路 5-4-3-2-1 を辿る
    a = Architecture("ring", 6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], [0, 1, 2, 3, 4, 5])
    tree = decreasing_steiner_tree(a, {5, 1}, 5, list(range(6)))
    assert tree.edges == {(5, 4), (4, 3), (3, 2), (2, 1)}


# ── DFT 番号付け ──────────────────────────────────────────────────────────────

def test_dft_postorder_on_path():
    a = path_graph(3)
    r = dft_postorder(a, 2, [(0, 1), (1, 2)])
    assert r.labels == {0: 0, 1: 1, 2: 2}
    assert r.root == 0 and r.start == 2
    assert a.is_connected_on({1, 2}) and a.is_connected_on({2})


@pytest.mark.parametrize("name", ["square-9", "square-16", "ibm-qx5", "rigetti-16q-aspen", "ibm-q20-tokyo"])
def test_dft_postorder_invariants(name):
    a = builtin(name)
    spanning = bfs_spanning_tree(a, range(a.n))
    tree = nx.Graph(spanning)
    start = max(v for v in tree.nodes if tree.degree(v) == 1)
    r = dft_postorder(a, start, spanning)

    assert r.labels[start] == a.n - 1
    assert r.labels[r.root] == 0
    assert sorted(r.labels.values()) == list(range(a.n))
    for child, parent in r.parent.items():
        assert r.labels[parent] > r.labels[child]
    for k in range(a.n):
        assert a.is_connected_on(v for v in range(a.n) if r.labels[v] >= k)


SPIDER_EDGES = [
    (0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6), (6, 7),
    (2, 8), (8, 9), (9, 10), (4, 5),
]


def test_dft_postorder_on_eleven_vertex_graph():
    # 次数 1 の頂点が 3 つあるのでハミルトン路はない
    a = Architecture("spider-11", 11, SPIDER_EDGES)
    spanning = bfs_spanning_tree(a, range(11))
    tree = nx.Graph(spanning)
    leaves = sorted(v for v in tree.nodes if tree.degree(v) == 1)
    assert len(leaves) >= 3
    for start in leaves:
        r = dft_postorder(a, start, spanning)
        assert r.labels[start] == 10
        assert r.labels[r.root] == 0 and r.root != start
        for k in range(11):
            assert a.is_connected_on(v for v in range(11) if r.labels[v] >= k)


def test_dft_postorder_errors(square9):
    spanning = bfs_spanning_tree(square9, range(9))
    with pytest.raises(ArchitectureError):
        dft_postorder(square9, 0, spanning)  # 0 は BFS 木の根で葉ではない
    with pytest.raises(ArchitectureError):
        dft_postorder(square9, 8, spanning[:-1])
    with pytest.raises(ArchitectureError):
        dft_postorder(square9, 8, list(spanning) + [(4, 5)])  # 閉路ができる


# ── JSON / 構築ヘルパー ─────────────────────────────────────────────────────────

def test_square_grid_is_boustrophedon():
    a = square_grid(2, 3)
    assert set(a.edges) == {(0, 1), (1, 2), (3, 4), (4, 5), (0, 5), (1, 4), (2, 3)}
    assert a.hamiltonian_path == tuple(range(6))


def test_load_architecture_roundtrip(tmp_path):
    path = tmp_path / "line.json"
    path.write_text(json.dumps({"name": "line", "n": 3, "edges": [[0, 1], [1, 2]], "hamiltonian_path": None}))
    a = load_architecture(path)
    assert a.name == "line" and a.n == 3 and a.hamiltonian_path is None


@pytest.mark.parametrize(
    "content",
    [
        "{not json",
        json.dumps([1, 2, 3]),
        json.dumps({"name": "x", "n": 2, "edges": [[0, 1]]}),
        json.dumps({"name": "x", "n": 2, "edges": [[0, 1]], "hamiltonian_path": None, "extra": 1}),
        json.dumps({"name": "x", "n": "2", "edges": [[0, 1]], "hamiltonian_path": None}),
        json.dumps({"name": "x", "n": 3, "edges": [[0, 1]], "hamiltonian_path": None}),
    ],
)
def test_load_architecture_rejects(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    with pytest.raises(ArchitectureError):
        load_architecture(path)


def test_load_architecture_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_architecture(tmp_path / "nope.json")
