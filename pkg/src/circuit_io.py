"""
circuit_io.py
回路 IR（CNOT / RZ / H）、OPENQASM 2.0 サブセットの読み書き、
パリティ行列の抽出と基底状態シミュレーション。

Circuit IR, OPENQASM 2.0 subset parser/emitter, parity-map extraction and
the classical basis-state + phase simulator used as a correctness oracle.
"""

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pyparsing as pp

from arch import Architecture
from gf2 import ParityMatrix, RowOp

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
GATE_KINDS = ("cx", "rz", "h")
_ARITY = {"cx": 2, "rz": 1, "h": 1}


class QasmParseError(ValueError):
    """QASM の構文・意味エラー。line / col は 1 始まり。"""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class GateKindError(ValueError):
    """この操作が扱えないゲート種別 / Gate kind not supported by this operation."""


# ── 型 / Types ───────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise GateKindError(f"未対応のゲート / unsupported gate kind: {self.kind}")
        if len(self.qubits) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} の量子ビット数が不正 / wrong arity: {self.qubits}")
        if self.kind == "cx" and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"CNOT の control と target が同一 / control == target: {self.qubits[0]}")
        if self.kind == "rz":
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"RZ の角度が不正 / angle must be finite: {self.angle}")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} は角度を取りません / {self.kind} takes no angle")

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls("cx", (control, target))

    @classmethod
    def rz(cls, angle: float, qubit: int) -> "Gate":
        return cls("rz", (qubit,), float(angle))

    @classmethod
    def h(cls, qubit: int) -> "Gate":
        return cls("h", (qubit,))

    @property
    def control(self) -> int:
        return self.qubits[0]

    @property
    def target(self) -> int:
        return self.qubits[-1]


@dataclass
class Circuit:
    n: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"量子ビット数は 1 以上 / n must be >= 1: {self.n}")
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        if any(q < 0 or q >= self.n for q in g.qubits):
            raise ValueError(f"量子ビット番号が範囲外 / qubit out of range in {g} (n={self.n})")

    def append(self, g: Gate) -> None:
        self._check(g)
        self.gates.append(g)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def cnot_pairs(self) -> list[tuple[int, int]]:
        return [g.qubits for g in self.gates if g.kind == "cx"]

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def __len__(self) -> int:
        return len(self.gates)


# ── 公開 API / Public API ───────────────────────────────────────────────────

def from_circuit(c: Circuit) -> ParityMatrix:
    """CNOT 回路のパリティ行列。恒等行列から row_add(control → target) を畳み込む。"""
    m = ParityMatrix.identity(c.n)
    for g in c.gates:
        if g.kind != "cx":
            raise GateKindError(f"CNOT 以外のゲートを含みます / non-CNOT gate: {g.kind}")
        m.apply(RowOp(g.control, g.target))
    return m


def simulate(c: Circuit, x: int | Sequence[int]) -> tuple[int, float]:
    """
    基底状態 x を古典的に伝搬し、(出力ビット列, 位相 mod 2π) を返す。
    x は int（bit i = 量子ビット i）または 0/1 の列。
    """
    bits = x if isinstance(x, int) else sum(int(b) << i for i, b in enumerate(x))
    phase = 0.0
    for g in c.gates:
        if g.kind == "cx":
            if (bits >> g.control) & 1:
                bits ^= 1 << g.target
        elif g.kind == "rz":
            if (bits >> g.qubits[0]) & 1:
                phase += g.angle
        else:
            raise GateKindError("H を含む回路は古典シミュレートできません / H is not classically simulable")
    return bits, phase % TWO_PI


def count_cnots(c: Circuit) -> int:
    return c.count("cx")


def is_mapped(c: Circuit, a: Architecture) -> bool:
    """全ての CNOT が結合グラフの辺上にあるか。"""
    return all(a.has_edge(u, v) for u, v in c.cnot_pairs())


def random_cnot_circuit(n: int, count: int, seed: int | np.random.Generator) -> Circuit:
    """順序付き異なる対 (control, target) を一様に選んだ CNOT を count 個並べる。"""
    if count < 0:
        raise ValueError(f"ゲート数は 0 以上 / count must be >= 0: {count}")
    if n < 2 and count > 0:
        raise ValueError(f"CNOT には 2 量子ビット以上が必要 / n must be >= 2: {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    gates = []
    for _ in range(count):
        control = int(rng.integers(n))
        target = int(rng.integers(n - 1))
        if target >= control:
            target += 1
        gates.append(Gate.cnot(control, target))
    return Circuit(max(n, 1), gates)


def random_cnot_rz_circuit(n: int, count: int, seed: int | np.random.Generator, rz_prob: float = 0.5) -> Circuit:
    """CNOT と RZ(一様な角度) を混ぜたランダム回路。各ゲートは確率 rz_prob で RZ。"""
    if n < 2:
        raise ValueError(f"2 量子ビット以上が必要 / n must be >= 2: {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    gates = []
    for _ in range(count):
        if rng.random() < rz_prob:
            gates.append(Gate.rz(float(rng.uniform(0.0, TWO_PI)), int(rng.integers(n))))
        else:
            control = int(rng.integers(n))
            target = int(rng.integers(n - 1))
            gates.append(Gate.cnot(control, target + (target >= control)))
    return Circuit(n, gates)


def emit_qasm(c: Circuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.n}];"]
    for g in c.gates:
        if g.kind == "cx":
            lines.append(f"cx q[{g.control}],q[{g.target}];")
        elif g.kind == "rz":
            lines.append(f"rz({g.angle:.17g}) q[{g.qubits[0]}];")
        else:
            lines.append(f"h q[{g.qubits[0]}];")
    return "\n".join(lines) + "\n"


def parse_qasm(text: str) -> Circuit:
    """OPENQASM 2.0 サブセット（qreg 1 本、cx / rz / h）を読み込む。"""
    try:
        tokens = _PROGRAM.parse_string(text, parse_all=True)
    except pp.ParseBaseException as e:
        raise QasmParseError(f"構文エラー / syntax error: {e.msg}", e.lineno, e.col) from e

    version, statements = tokens[0], tokens[1:]
    if version != "2.0":
        raise QasmParseError(f"OPENQASM {version} は未対応です / only OPENQASM 2.0 is supported", 1, 1)

    reg: str | None = None
    n = 0
    gates: list[Gate] = []
    for stmt in statements:
        line, col = pp.lineno(stmt["loc"], text), pp.col(stmt["loc"], text)
        head = stmt.get("stmt")
        if head == "qreg":
            if reg is not None:
                raise QasmParseError("qreg は 1 本のみ対応 / only one qreg is supported", line, col)
            reg, n = stmt["reg"], stmt["size"]
            if n < 1:
                raise QasmParseError("qreg のサイズは 1 以上 / qreg size must be >= 1", line, col)
            continue
        if head in ("creg", "measure"):
            raise QasmParseError(f"{head} は未対応です / classical registers and measurement are not supported", line, col)

        name = stmt["name"]
        if name not in GATE_KINDS:
            raise QasmParseError(f"未対応のゲート / unsupported gate: {name}", line, col)
        if reg is None:
            raise QasmParseError("qreg 宣言より前にゲートがあります / gate before qreg declaration", line, col)
        qubits = []
        for q in stmt["args"]:
            if q["reg"] != reg:
                raise QasmParseError(f"未宣言のレジスタ / unknown register: {q['reg']}", line, col)
            if q["index"] >= n:
                raise QasmParseError(f"量子ビット番号が範囲外 / qubit index {q['index']} >= {n}", line, col)
            qubits.append(q["index"])
        if len(qubits) != _ARITY[name]:
            raise QasmParseError(f"{name} の引数の数が不正 / {name} expects {_ARITY[name]} qubit(s)", line, col)

        angle = stmt.get("angle")
        if name == "rz":
            if angle is None:
                raise QasmParseError("rz には角度が必要 / rz requires an angle", line, col)
            try:
                value = _eval_angle(angle)
            except ZeroDivisionError:
                raise QasmParseError("角度の式でゼロ除算 / division by zero in angle", line, col) from None
            if not math.isfinite(value):
                raise QasmParseError(f"角度が有限ではありません / angle is not finite: {value}", line, col)
            gates.append(Gate.rz(value, qubits[0]))
        elif angle is not None:
            raise QasmParseError(f"{name} は角度を取りません / {name} takes no angle", line, col)
        elif name == "cx":
            if qubits[0] == qubits[1]:
                raise QasmParseError("cx の control と target が同一 / cx control equals target", line, col)
            gates.append(Gate.cnot(qubits[0], qubits[1]))
        else:
            gates.append(Gate.h(qubits[0]))

    if reg is None:
        raise QasmParseError("qreg 宣言がありません / missing qreg declaration")
    return Circuit(n, gates)


def read_qasm(path: str | Path) -> Circuit:
    with open(path, encoding="utf-8") as f:
        return parse_qasm(f.read())


def write_qasm(path: str | Path, c: Circuit) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(emit_qasm(c))


# ── 内部ヘルパー / Internal Helpers ─────────────────────────────────────────

def _eval_angle(tokens) -> float:
    """[-] atom (op atom)* を左から順に評価する。"""
    items = list(tokens)
    sign = 1.0
    if items and items[0] == "-":
        sign = -1.0
        items = items[1:]
    value = items[0]
    for op, atom in zip(items[1::2], items[2::2]):
        value = value * atom if op == "*" else value / atom
    return sign * value


def _build_grammar() -> pp.ParserElement:
    lpar, rpar, lbra, rbra, semi = map(pp.Suppress, "()[];")
    ident = pp.Word(pp.alphas + "_", pp.alphanums + "_")
    integer = pp.Word(pp.nums).set_parse_action(lambda t: int(t[0]))
    number = pp.Regex(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?").set_parse_action(lambda t: float(t[0]))
    pi = pp.CaselessKeyword("pi").set_parse_action(lambda: math.pi)
    atom = number | pi
    angle = pp.Group(pp.Optional(pp.Literal("-")) + atom + pp.ZeroOrMore(pp.one_of("* /") + atom))
    loc = pp.Empty().set_parse_action(lambda s, l, t: l)

    qubit = pp.Group(ident("reg") + lbra + integer("index") + rbra)
    header = pp.Suppress(pp.Keyword("OPENQASM")) + pp.Regex(r"\d+(\.\d+)?") + semi
    include = pp.Suppress(pp.Keyword("include") + pp.QuotedString('"') + semi)
    qreg = pp.Group(loc("loc") + pp.Keyword("qreg")("stmt") + ident("reg") + lbra + integer("size") + rbra + semi)
    creg = pp.Group(loc("loc") + pp.Keyword("creg")("stmt") + pp.SkipTo(";") + semi)
    measure = pp.Group(loc("loc") + pp.Keyword("measure")("stmt") + pp.SkipTo(";") + semi)
    gate = pp.Group(
        loc("loc")
        + ident("name")
        + pp.Optional(lpar + angle("angle") + rpar)
        + pp.Group(qubit + pp.ZeroOrMore(pp.Suppress(",") + qubit))("args")
        + semi
    )
    program = header + pp.Optional(include) + pp.ZeroOrMore(qreg | creg | measure | gate)
    program.ignore(pp.dbl_slash_comment)
    program.parse_with_tabs()
    return program


_PROGRAM = _build_grammar()
