from collections import Counter

import pytest

from arch import Architecture, builtin, builtin_names, path_graph
from circuit_io import Gate, from_circuit, is_mapped
from gf2 import (
    ParityMatrix,
    RowOp,
    SingularMatrixError,
    is_identity,
    is_upper_triangular,
    random_invertible,
    replay,
)
from router import (
    EliminationState,
    RoutingError,
    steiner_down,
    steiner_gauss,
    steiner_gauss_rec,
    steiner_up,
    synthesize_cnot,
    trace_to_circuit,
    verify_trace,
)
from utils import rng_stream

DOWN_EXAMPLE = [RowOp(0, 1), RowOp(7, 4), RowOp(4, 7), RowOp(1, 2), RowOp(1, 4), RowOp(0, 1)]
UP_EXAMPLE = [RowOp(8, 3), RowOp(8, 7), RowOp(3, 2), RowOp(7, 4), RowOp(8, 7), RowOp(8, 3)]

STAR = Architecture("star-5", 5, [(0, 1), (0, 2), (0, 3), (0, 4)])
BINARY_TREE = Architecture("tree-7", 7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
SPIDER = Architecture("spider-11", 11, [
    (0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6), (6, 7), (2, 8), (8, 9), (9, 10), (4, 5),
])


def _matrices(n: int, count: int, salt: int = 0):
    return [random_invertible(n, rng_stream(salt, "matrix", n, i)) for i in range(count)]


def _assert_sound(p, ops, a):
    assert all(a.has_edge(op.src, op.tgt) for op in ops)
    assert is_identity(replay(p, ops))
    assert from_circuit(trace_to_circuit(ops, p.n)) == p


# ── steiner-down / steiner-up ────────────────────────────────────────────────

def test_steiner_down_example(example_p, square9):
    state = EliminationState.start(example_p, square9)
    steiner_down(state, 0, range(9))
    assert state.ops == DOWN_EXAMPLE
    assert state.matrix.column(0) == [1, 0, 0, 0, 0, 0, 0, 0, 0]
    # 列 0 以外の行 3, 5, 6, 8 は触らない
    for r in (3, 5, 6, 8):
        assert state.matrix.row(r) == example_p.row(r)


def test_steiner_gauss_starts_with_down_example(example_p, square9):
    ops = steiner_gauss(example_p, square9)
    assert ops[:6] == DOWN_EXAMPLE
    _assert_sound(example_p, ops, square9)


def test_steiner_up_example(example_upper, square9):
    state = EliminationState.start(example_upper, square9)
    steiner_up(state, 8, range(9))
    # fill と前半の empty は同じ順序、最後の 2 つは可換な操作
    assert state.ops[:4] == UP_EXAMPLE[:4]
    assert Counter(state.ops) == Counter(UP_EXAMPLE)
    m = state.matrix.to_lists()
    assert state.matrix.column(8) == [0] * 8 + [1]
    assert m[2] == [0, 0, 1, 0, 1, 1, 1, 1, 0]
    assert m[4] == [0, 0, 0, 0, 1, 0, 0, 0, 0]


def test_no_ops_when_column_is_already_clear(square9):
    state = EliminationState.start(ParityMatrix.identity(9), square9)
    for k in range(9):
        steiner_down(state, k, range(k, 9))
        steiner_up(state, k, range(k + 1))
    assert state.ops == []


def test_single_adjacent_entry_is_one_op():
    a = path_graph(2)
    state = EliminationState.start(ParityMatrix.from_rows([[1, 0], [1, 1]]), a)
    steiner_down(state, 0, {0, 1})
    assert state.ops == [RowOp(0, 1)]


def test_steiner_down_singular_column():
    state = EliminationState.start(ParityMatrix.from_rows([[0, 1], [0, 1]]), path_graph(2))
    with pytest.raises(SingularMatrixError):
        steiner_down(state, 0, {0, 1})


def test_steiner_up_needs_diagonal():
    state = EliminationState.start(ParityMatrix.from_rows([[1, 1], [0, 0]]), path_graph(2))
    with pytest.raises(RoutingError):
        steiner_up(state, 1, {0, 1})


def test_state_rejects_non_edge(square9):
    state = EliminationState.start(ParityMatrix.identity(9), square9)
    with pytest.raises(RoutingError):
        state.apply(0, 8)
    with pytest.raises(RoutingError):
        EliminationState.start(ParityMatrix.identity(4), square9)


# ── steiner-gauss ────────────────────────────────────────────────────────────

def test_identity_gives_empty_trace(square9):
    assert steiner_gauss(ParityMatrix.identity(9), square9) == []
    assert steiner_gauss_rec(ParityMatrix.identity(9), square9) == []
    assert steiner_gauss_rec(ParityMatrix.identity(5), STAR) == []


def test_steiner_gauss_square9_many_matrices(square9):
    for p in _matrices(9, 500):
        _assert_sound(p, steiner_gauss(p, square9), square9)


@pytest.mark.parametrize("name", builtin_names())
def test_synthesize_cnot_on_builtins(name):
    a = builtin(name)
    for p in _matrices(a.n, 8, salt=3):
        _assert_sound(p, synthesize_cnot(p, a), a)


@pytest.mark.slow
@pytest.mark.parametrize("name", builtin_names())
def test_synthesize_cnot_on_builtins_hundred_matrices(name):
    a = builtin(name)
    for p in _matrices(a.n, 100, salt=13):
        _assert_sound(p, synthesize_cnot(p, a), a)


@pytest.mark.parametrize("name", builtin_names())
def test_down_pass_leaves_upper_triangular(name):
    a = builtin(name)
    rank = a.path_rank
    for p in _matrices(a.n, 10, salt=11):
        state = EliminationState.start(p, a)
        for k in a.hamiltonian_path:
            steiner_down(state, k, state.active, rank)
            state.active.discard(k)
            # 処理済みの列は対角より下が 0
            assert all(
                not state.bit(r, j)
                for j in a.hamiltonian_path[: rank[k] + 1]
                for r in range(a.n)
                if rank[r] > rank[j]
            )
        assert is_upper_triangular(state.matrix, rank)


@pytest.mark.parametrize("name", builtin_names())
def test_up_pass_never_fills_below_diagonal(name):
    a = builtin(name)
    rank = a.path_rank
    for p in _matrices(a.n, 10, salt=17):
        state = EliminationState.start(p, a)
        for k in a.hamiltonian_path:
            steiner_down(state, k, state.active, rank)
            state.active.discard(k)
        state.active = set(range(a.n))
        for k in reversed(a.hamiltonian_path):
            steiner_up(state, k, state.active, (), rank)
            state.active.discard(k)
            assert is_upper_triangular(state.matrix, rank)
        assert is_identity(state.matrix)


def test_steiner_gauss_requires_hamiltonian_path():
    with pytest.raises(RoutingError):
        steiner_gauss(ParityMatrix.identity(5), STAR)


def test_singular_matrix_is_reported(path4):
    singular = ParityMatrix.from_rows([[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(SingularMatrixError):
        steiner_gauss(singular, path4)
    with pytest.raises(SingularMatrixError):
        steiner_gauss_rec(singular, path4)


# ── steiner-gauss-rec ────────────────────────────────────────────────────────

@pytest.mark.parametrize("a", [STAR, BINARY_TREE, SPIDER], ids=lambda a: a.name)
def test_rec_on_graphs_without_hamiltonian_path(a):
    for p in _matrices(a.n, 100, salt=5):
        ops = steiner_gauss_rec(p, a)
        _assert_sound(p, ops, a)
        assert synthesize_cnot(p, a) == ops


def test_rec_on_grid_without_declared_path(square9):
    grid = Architecture("grid-no-path", 9, sorted(square9.edges))
    for p in _matrices(9, 20, salt=7):
        _assert_sound(p, steiner_gauss_rec(p, grid), grid)


def test_rec_coincides_with_path_algorithm_on_path_graph():
    a = path_graph(6)
    for p in _matrices(6, 20, salt=9):
        assert steiner_gauss_rec(p, a) == steiner_gauss(p, a)


# ── トレース / Traces ────────────────────────────────────────────────────────

def test_trace_to_circuit(square9):
    assert len(trace_to_circuit([], 9)) == 0
    c = trace_to_circuit(DOWN_EXAMPLE, 9)
    assert c.gates == [
        Gate.cnot(0, 1), Gate.cnot(1, 4), Gate.cnot(1, 2),
        Gate.cnot(4, 7), Gate.cnot(7, 4), Gate.cnot(0, 1),
    ]
    assert is_mapped(c, square9)


def test_verify_trace(example_p, square9):
    ops = steiner_gauss(example_p, square9)
    verify_trace(example_p, ops, square9)
    with pytest.raises(RoutingError):
        verify_trace(example_p, ops[:-1], square9)
    with pytest.raises(RoutingError):
        verify_trace(ParityMatrix.identity(9), [RowOp(0, 8), RowOp(0, 8)], square9)
