"""
conftest.py
テスト共通のフィクスチャ。src/ を import パスに追加する（本体と同じく素の名前で import）。
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from arch import builtin, path_graph  # noqa: E402
from gf2 import ParityMatrix  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"

# square-9 上の消去の例題行列
EXAMPLE_ROWS = [
    [1, 0, 1, 1, 1, 1, 0, 0, 1],
    [0, 1, 1, 0, 1, 1, 1, 1, 0],
    [1, 0, 0, 0, 1, 1, 1, 0, 1],
    [0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 1, 1, 1, 0, 1, 1, 1],
    [0, 0, 0, 0, 1, 0, 1, 0, 0],
    [0, 0, 1, 0, 0, 1, 0, 0, 1],
    [1, 1, 1, 1, 0, 0, 1, 1, 0],
    [0, 0, 1, 0, 0, 1, 0, 1, 1],
]

# 下三角消去済み（上三角）の例題行列。列 8 は行 2, 4, 8 に 1
UPPER_ROWS = [
    [1, 0, 1, 1, 1, 1, 0, 0, 0],
    [0, 1, 1, 0, 1, 1, 1, 1, 0],
    [0, 0, 1, 1, 0, 0, 1, 0, 1],
    [0, 0, 0, 1, 1, 1, 0, 1, 0],
    [0, 0, 0, 0, 1, 0, 0, 1, 1],
    [0, 0, 0, 0, 0, 1, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1],
]


@pytest.fixture
def square9():
    return builtin("square-9")


@pytest.fixture
def path4():
    return path_graph(4)


@pytest.fixture
def example_p() -> ParityMatrix:
    return ParityMatrix.from_rows(EXAMPLE_ROWS)


@pytest.fixture
def example_upper() -> ParityMatrix:
    return ParityMatrix.from_rows(UPPER_ROWS)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
