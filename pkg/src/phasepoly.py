"""
phasepoly.py
CNOT+Rz 回路の位相多項式表現と、接続制約付きの再合成。

A CNOT+Rz circuit maps |x⟩ to e^{iφ(x)}|Lx⟩ where φ is a sum of
angle-weighted parities of the input bits. Re-synthesis builds each parity
on some wire with Steiner-tree row operations, applies Rz there, and finally
routes the remaining linear part with the constrained eliminator.
"""

import logging
import math
from dataclasses import dataclass

from arch import Architecture, steiner_tree
from circuit_io import Circuit, Gate, GateKindError
from gf2 import ParityMatrix, rank
from router import RoutingError, synthesize_cnot, trace_to_circuit

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class PhasePolynomial:
    """
    linear: 基底状態への作用（行 i = 出力ワイヤ i のパリティ）。
    terms: (angle, parity) の列。parity は int で bit i = x_i。
    """

    linear: ParityMatrix
    terms: tuple[tuple[float, int], ...] = ()

    def __post_init__(self):
        n = self.linear.n
        if rank(self.linear) != n:
            raise ValueError("linear が可逆ではありません / linear part is not invertible")
        for angle, parity in self.terms:
            if not math.isfinite(angle):
                raise ValueError(f"角度が有限ではありません / non-finite angle: {angle}")
            if parity <= 0 or parity >= 1 << n:
                raise ValueError(f"パリティベクトルが不正 / parity must be nonzero n-bit vector: {parity}")

    @property
    def n(self) -> int:
        return self.linear.n

    def normalized(self) -> "PhasePolynomial":
        """同じパリティの項を統合し、角度を [0, 2π) に丸め、0 の項を落とす。"""
        merged: dict[int, float] = {}
        for angle, parity in self.terms:
            merged[parity] = merged.get(parity, 0.0) + angle
        terms = []
        for parity, angle in merged.items():
            a = angle % TWO_PI
            if a < MERGE_TOL or TWO_PI - a < MERGE_TOL:
                continue
            terms.append((a, parity))
        return PhasePolynomial(self.linear, tuple(terms))

    def phase_of(self, x: int) -> float:
        return sum(angle for angle, parity in self.terms if (parity & x).bit_count() & 1) % TWO_PI

    def apply(self, x: int) -> tuple[int, float]:
        return self.linear.mul_vector(x), self.phase_of(x)

    def equivalent(self, other: "PhasePolynomial", tol: float = 1e-9) -> bool:
        """項の順序によらず、角度を 2π を法として比較する。"""
        if self.linear != other.linear:
            return False
        mine = dict((p, a) for a, p in self.normalized().terms)
        theirs = dict((p, a) for a, p in other.normalized().terms)
        if mine.keys() != theirs.keys():
            return False
        for parity, angle in mine.items():
            diff = abs(angle - theirs[parity]) % TWO_PI
            if min(diff, TWO_PI - diff) > tol:
                return False
        return True


# ── 公開 API / Public API ───────────────────────────────────────────────────

def extract_phase_poly(c: Circuit) -> PhasePolynomial:
    """入力ワイヤに x_i のラベルを付け、左から右へ伝搬させる。"""
    labels = [1 << i for i in range(c.n)]
    terms: list[tuple[float, int]] = []
    for g in c.gates:
        if g.kind == "cx":
            labels[g.target] ^= labels[g.control]
        elif g.kind == "rz":
            terms.append((g.angle, labels[g.qubits[0]]))
        else:
            raise GateKindError(f"CNOT/RZ 以外のゲート / unsupported gate in phase polynomial: {g.kind}")
    return PhasePolynomial(ParityMatrix(c.n, labels), tuple(terms)).normalized()


def synthesize_phase_poly(pp: PhasePolynomial, a: Architecture) -> Circuit:
    """
    作業行列 W（= 各ワイヤの現在のパリティ）を恒等から始め、
    ハミング距離が最小の項から順に、その項のパリティを持つワイヤを作って RZ を置く。
    最後に linear · W⁻¹ を制約付き消去で合成して連結する。
    """
    if pp.n != a.n:
        raise RoutingError(f"サイズ不一致 / phase polynomial n={pp.n}, arch n={a.n}")
    pp = pp.normalized()
    n = pp.n
    work = [1 << i for i in range(n)]
    circuit = Circuit(n)
    remaining = list(pp.terms)

    while remaining:
        idx = min(
            range(len(remaining)),
            key=lambda t: (min((remaining[t][1] ^ row).bit_count() for row in work), t),
        )
        angle, parity = remaining.pop(idx)
        wire = _build_parity(work, parity, a, circuit)
        circuit.append(Gate.rz(angle, wire))

    rest = pp.linear @ ParityMatrix(n, work).inverse()
    circuit.extend(trace_to_circuit(synthesize_cnot(rest, a), n).gates)
    logger.debug(f"位相多項式合成: terms={len(pp.terms)}, cnots={circuit.count('cx')}, arch={a.name}")
    return circuit


# ── 内部ヘルパー / Internal Helpers ─────────────────────────────────────────

def _build_parity(work: list[int], parity: int, a: Architecture, circuit: Circuit) -> int:
    """
    Steiner 木上の CNOT で、あるワイヤの値を parity にする。そのワイヤ番号を返す。
    parity = Σ_{i∈S} work[i] となる S を求め、S を端点とする木で集約する。
    """
    n = len(work)
    coeff = ParityMatrix(n, work).inverse().row_vector_product(parity)
    members = {i for i in range(n) if (coeff >> i) & 1}
    root = min(members, key=lambda i: ((work[i] ^ parity).bit_count(), i))
    if len(members) == 1:
        return root

    def cnot(src: int, tgt: int) -> None:
        work[tgt] ^= work[src]
        circuit.append(Gate.cnot(src, tgt))

    tree = steiner_tree(a, members, root)
    parent = tree.parent
    levels = tree.levels()
    # Steiner 点の寄与を先に親へ打ち消し分として入れておく
    for level in levels[1:]:
        for v in level:
            if v not in members:
                cnot(v, parent[v])
    for level in reversed(levels[1:]):
        for v in level:
            cnot(v, parent[v])

    if work[root] != parity:
        raise RoutingError(f"パリティ構築に失敗 / failed to build parity {parity:b} on wire {root}")
    return root
