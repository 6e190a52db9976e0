"""
gf2.py
GF(2) 上の線形代数モジュール。パリティ行列・行基本操作・制約なし合成を提供する。

GF(2) linear algebra: parity matrices, primitive row operations
(one CNOT each) and the unconstrained synthesis baselines.
行は Python の int にビットパックして保持する（bit j = 列 j）。
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


class SingularMatrixError(ValueError):
    """可逆でない行列に対して合成を要求した / Matrix is not invertible."""


class RowOpError(ValueError):
    """行操作のインデックスが不正 / Invalid row operation."""


@dataclass(frozen=True)
class RowOp:
    """R_tgt := R_tgt + R_src。CNOT(control=src, target=tgt) に対応する。"""

    src: int
    tgt: int

    def validate(self, n: int) -> None:
        if self.src == self.tgt:
            raise RowOpError(f"src と tgt が同一です / src == tgt: {self.src}")
        if not (0 <= self.src < n and 0 <= self.tgt < n):
            raise RowOpError(f"行インデックスが範囲外です / index out of range: {self} (n={n})")

    def swapped(self) -> "RowOp":
        return RowOp(self.tgt, self.src)

    def __str__(self) -> str:
        return f"({self.src}->{self.tgt})"


class ParityMatrix:
    """
    n×n の GF(2) 行列。行 i は int で、ビット j が要素 [i][j]。
    apply() は所有者だけが呼ぶ破壊的操作、それ以外は新しい行列を返す。
    """

    __slots__ = ("n", "_rows")

    def __init__(self, n: int, rows: list[int]):
        if n < 1:
            raise ValueError(f"次元は 1 以上が必要です / n must be >= 1: {n}")
        if len(rows) != n:
            raise ValueError(f"行数が n と一致しません / expected {n} rows, got {len(rows)}")
        limit = 1 << n
        for i, r in enumerate(rows):
            if r < 0 or r >= limit:
                raise ValueError(f"行 {i} のビット幅が不正です / row {i} out of range")
        self.n = n
        self._rows = list(rows)

    # ── 生成 / Constructors ─────────────────────────────────────────────────

    @classmethod
    def identity(cls, n: int) -> "ParityMatrix":
        return cls(n, [1 << i for i in range(n)])

    @classmethod
    def from_rows(cls, rows: list[list[int]]) -> "ParityMatrix":
        """0/1 のリストのリストから生成する。"""
        n = len(rows)
        packed = []
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError(f"正方行列ではありません / row {i} has {len(row)} entries, expected {n}")
            value = 0
            for j, bit in enumerate(row):
                if bit not in (0, 1):
                    raise ValueError(f"要素は 0/1 のみ / entry [{i}][{j}] = {bit!r}")
                value |= int(bit) << j
            packed.append(value)
        return cls(n, packed)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "ParityMatrix":
        arr = np.asarray(arr)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"正方行列ではありません / not square: shape {arr.shape}")
        return cls.from_rows((arr.astype(np.int64) & 1).tolist())

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.uint8)
        for i, r in enumerate(self._rows):
            for j in range(self.n):
                out[i, j] = (r >> j) & 1
        return out

    def to_lists(self) -> list[list[int]]:
        return self.to_array().tolist()

    def copy(self) -> "ParityMatrix":
        return ParityMatrix(self.n, self._rows)

    # ── 参照 / Accessors ────────────────────────────────────────────────────

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self._rows[i] >> j) & 1

    def row(self, i: int) -> int:
        return self._rows[i]

    @property
    def rows(self) -> tuple[int, ...]:
        return tuple(self._rows)

    def column(self, j: int) -> list[int]:
        return [(r >> j) & 1 for r in self._rows]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ParityMatrix):
            return NotImplemented
        return self.n == other.n and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.n, tuple(self._rows)))

    def __repr__(self) -> str:
        return f"ParityMatrix(n={self.n}, rows={self.to_lists()})"

    def __str__(self) -> str:
        return "\n".join(
            " ".join(str((r >> j) & 1) for j in range(self.n)) for r in self._rows
        )

    # ── 演算 / Arithmetic ───────────────────────────────────────────────────

    def apply(self, op: RowOp) -> None:
        """所有者専用の破壊的行操作。"""
        op.validate(self.n)
        self._rows[op.tgt] ^= self._rows[op.src]

    def transpose(self) -> "ParityMatrix":
        rows = [0] * self.n
        for i, r in enumerate(self._rows):
            for j in range(self.n):
                if (r >> j) & 1:
                    rows[j] |= 1 << i
        return ParityMatrix(self.n, rows)

    def __matmul__(self, other: "ParityMatrix") -> "ParityMatrix":
        if other.n != self.n:
            raise ValueError(f"次元不一致 / size mismatch: {self.n} vs {other.n}")
        rows = []
        for r in self._rows:
            acc = 0
            for j in range(self.n):
                if (r >> j) & 1:
                    acc ^= other._rows[j]
            rows.append(acc)
        return ParityMatrix(self.n, rows)

    def mul_vector(self, x: int) -> int:
        """列ベクトル x（int）との積 M·x。"""
        out = 0
        for i, r in enumerate(self._rows):
            if (r & x).bit_count() & 1:
                out |= 1 << i
        return out

    def row_vector_product(self, v: int) -> int:
        """行ベクトル v との積 v·M（v のビットが立つ行の XOR）。"""
        acc = 0
        for i in range(self.n):
            if (v >> i) & 1:
                acc ^= self._rows[i]
        return acc

    def inverse(self) -> "ParityMatrix":
        """Gauss-Jordan で逆行列を求める。特異なら SingularMatrixError。"""
        inv = ParityMatrix.identity(self.n)
        for op in gauss_synthesize(self):
            inv.apply(op)
        return inv


# ── 公開 API / Public API ───────────────────────────────────────────────────

def row_add(m: ParityMatrix, op: RowOp) -> ParityMatrix:
    """行 tgt に行 src を加えた新しい行列を返す（m は変更しない）。"""
    out = m.copy()
    out.apply(op)
    return out


def is_identity(m: ParityMatrix) -> bool:
    return all(r == 1 << i for i, r in enumerate(m.rows))


def is_upper_triangular(m: ParityMatrix, order: list[int] | None = None) -> bool:
    """
    対角より下が全て 0 か判定する。
    order（vertex → rank）を与えた場合はその順序で行・列を並べた行列として判定する。
    """
    rank_of = order if order is not None else list(range(m.n))
    for i in range(m.n):
        r = m.row(i)
        for j in range(m.n):
            if (r >> j) & 1 and rank_of[i] > rank_of[j]:
                return False
    return True


def rank(m: ParityMatrix) -> int:
    rows = list(m.rows)
    result = 0
    for col in range(m.n):
        bit = 1 << col
        pivot = next((i for i in range(result, m.n) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[result], rows[pivot] = rows[pivot], rows[result]
        for i in range(m.n):
            if i != result and rows[i] & bit:
                rows[i] ^= rows[result]
        result += 1
    return result


def random_invertible(n: int, seed: int | np.random.Generator) -> ParityMatrix:
    """恒等行列に 2n² 回のランダム行操作を施して可逆行列を作る。"""
    if n < 1:
        raise ValueError(f"n は 1 以上 / n must be >= 1: {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    m = ParityMatrix.identity(n)
    if n == 1:
        return m
    for _ in range(2 * n * n):
        src = int(rng.integers(n))
        tgt = int(rng.integers(n - 1))
        if tgt >= src:
            tgt += 1
        m.apply(RowOp(src, tgt))
    return m


def replay(p: ParityMatrix, ops: list[RowOp]) -> ParityMatrix:
    """ops を順に適用した結果を返す。"""
    out = p.copy()
    for op in ops:
        out.apply(op)
    return out


def gauss_synthesize(p: ParityMatrix) -> list[RowOp]:
    """
    制約なしの Gauss-Jordan 消去。返す ops を順に適用すると p は恒等行列になる。
    ピボットは対角以下で最も小さい行番号を選ぶ。
    """
    work = p.copy()
    ops: list[RowOp] = []

    def emit(op: RowOp) -> None:
        work.apply(op)
        ops.append(op)

    for k in range(p.n):
        bit = 1 << k
        pivot = next((r for r in range(k, p.n) if work.row(r) & bit), None)
        if pivot is None:
            raise SingularMatrixError(f"列 {k} にピボットがありません / singular at column {k}")
        if pivot != k:
            emit(RowOp(pivot, k))
        for r in range(p.n):
            if r != k and work.row(r) & bit:
                emit(RowOp(k, r))
    return ops


def default_block_size(n: int) -> int:
    if n < 2:
        return 1
    return max(1, math.ceil(math.log2(n) / 2))


def pmh_synthesize(p: ParityMatrix, block_size: int | None = None) -> list[RowOp]:
    """
    漸近最適な分割ブロック消去（Patel–Markov–Hayes）。
    下三角化 → 転置して再度下三角化 → 後半を反転・制御/標的を入れ替えて連結。
    """
    m = block_size if block_size is not None else default_block_size(p.n)
    if m < 1:
        raise ValueError(f"block_size は 1 以上 / block_size must be >= 1: {m}")
    if rank(p) != p.n:
        raise SingularMatrixError("可逆でない行列です / matrix is singular")

    work = p.copy()
    lower_ops = _pmh_lower(work, m)
    upper = work.transpose()
    upper_ops = _pmh_lower(upper, m)
    ops = lower_ops + [op.swapped() for op in reversed(upper_ops)]
    logger.debug(f"PMH 合成: n={p.n}, block={m}, ops={len(ops)}")
    return ops


def greedy_synthesize(p: ParityMatrix) -> list[RowOp]:
    """
    コスト貪欲な消去。コスト = p の 1 の数 + p⁻¹ の 1 の数。
    コストを最も下げる行操作を繰り返し、下げられなくなったら残りを PMH で仕上げる。
    """
    if rank(p) != p.n:
        raise SingularMatrixError("可逆でない行列です / matrix is singular")
    n = p.n
    rows = list(p.rows)
    # 行操作 (s→t) は逆行列では列操作 col_s ^= col_t になるので、逆行列は列で持つ
    inv_cols = list(p.inverse().transpose().rows)
    ops: list[RowOp] = []

    while True:
        best: tuple[int, int, int] | None = None
        for t in range(n):
            wt = rows[t].bit_count()
            for s in range(n):
                if s == t:
                    continue
                delta = (rows[t] ^ rows[s]).bit_count() - wt
                delta += (inv_cols[t] & ~inv_cols[s]).bit_count() - (inv_cols[t] & inv_cols[s]).bit_count()
                if best is None or delta < best[0]:
                    best = (delta, s, t)
        if best is None or best[0] >= 0:
            break
        _, s, t = best
        rows[t] ^= rows[s]
        inv_cols[s] ^= inv_cols[t]
        ops.append(RowOp(s, t))

    rest = ParityMatrix(n, rows)
    if not is_identity(rest):
        ops += pmh_synthesize(rest)
    logger.debug(f"貪欲合成: n={n}, ops={len(ops)}")
    return ops


def compact_synthesize(p: ParityMatrix, block_sizes: list[int] | None = None) -> list[RowOp]:
    """
    制約なし合成の候補から最短の ops を返す。
    候補は p, pᵀ, p⁻¹, p⁻ᵀ のそれぞれに対する PMH（各ブロック幅）と貪欲消去。
    既定のブロック幅は 1..⌈log₂n⌉ と n。
    """
    if rank(p) != p.n:
        raise SingularMatrixError("可逆でない行列です / matrix is singular")
    n = p.n
    if block_sizes is None:
        block_sizes = sorted(set(range(1, max(1, math.ceil(math.log2(n))) + 1)) | {n})
    if any(m < 1 for m in block_sizes):
        raise ValueError(f"block_size は 1 以上 / block sizes must be >= 1: {block_sizes}")

    inv = p.inverse()
    variants = {
        "p": p,
        "transpose": p.transpose(),
        "inverse": inv,
        "inverse_transpose": inv.transpose(),
    }
    best: list[RowOp] | None = None
    for kind, target in variants.items():
        candidates = [pmh_synthesize(target, m) for m in block_sizes]
        candidates.append(greedy_synthesize(target))
        for ops in candidates:
            if best is None or len(ops) < len(best):
                best = _pull_back(kind, ops)
    logger.debug(f"最短候補合成: n={n}, ops={len(best)}")
    return best


# ── 内部ヘルパー / Internal Helpers ─────────────────────────────────────────

def _pull_back(kind: str, ops: list[RowOp]) -> list[RowOp]:
    """変換した行列を恒等にする ops を、元の行列を恒等にする ops に直す。"""
    if kind == "p":
        return list(ops)
    if kind == "transpose":
        return [op.swapped() for op in reversed(ops)]
    if kind == "inverse":
        return list(reversed(ops))
    return [op.swapped() for op in ops]


def _pmh_lower(work: ParityMatrix, m: int) -> list[RowOp]:
    """work を上三角化する（破壊的）。使った行操作を返す。"""
    n = work.n
    ops: list[RowOp] = []

    def emit(src: int, tgt: int) -> None:
        op = RowOp(src, tgt)
        work.apply(op)
        ops.append(op)

    for start in range(0, n, m):
        end = min(n, start + m)
        mask = ((1 << (end - start)) - 1) << start
        seen: dict[int, int] = {}
        for r in range(start, n):
            pattern = work.row(r) & mask
            if not pattern:
                continue
            if pattern in seen:
                emit(seen[pattern], r)
            else:
                seen[pattern] = r

        for col in range(start, end):
            bit = 1 << col
            diag_one = bool(work.row(col) & bit)
            for r in range(col + 1, n):
                if work.row(r) & bit:
                    if not diag_one:
                        emit(r, col)
                        diag_one = True
                    emit(col, r)
    return ops


class MatrixParseError(ValueError):
    """行列テキストの形式エラー / Malformed matrix text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"{line}: {message}" if line is not None else message)


def parse_matrix_text(text: str) -> ParityMatrix:
    """
    1 行 1 行ベクトルの 0/1 テキストを読む。ビット間の空白は任意、
    '#' 以降はコメント、空行は無視する。
    """
    rows: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        bits = "".join(line.split())
        if not bits:
            continue
        bad = set(bits) - {"0", "1"}
        if bad:
            raise MatrixParseError(f"0/1 以外の文字 / unexpected characters {sorted(bad)}", lineno)
        if rows and len(bits) != len(rows[0]):
            raise MatrixParseError(f"行の長さが揃っていません / ragged row: {len(bits)} vs {len(rows[0])}", lineno)
        rows.append([int(b) for b in bits])
    if not rows:
        raise MatrixParseError("行列が空です / empty matrix")
    if len(rows) != len(rows[0]):
        raise MatrixParseError(f"正方行列ではありません / not square: {len(rows)}x{len(rows[0])}")
    return ParityMatrix.from_rows(rows)
