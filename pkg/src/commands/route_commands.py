"""
commands/route_commands.py
route / synth サブコマンド。回路または行列を読み込み、デバイスに合わせて再合成する。
"""

import argparse
import logging
from pathlib import Path

from bench import RouteOutcome, route_circuit, route_matrix, route_phase_circuit
from circuit_io import count_cnots, emit_qasm, read_qasm
from commands.common import (
    EXIT_OK,
    UsageError,
    build_ga_params,
    print_json,
    resolve_arch,
    write_text,
)
from gf2 import parse_matrix_text

logger = logging.getLogger(__name__)


def cmd_route(args: argparse.Namespace, config: dict) -> int:
    """
    QASM を読み込んで再合成する。出力 QASM は --output（省略時 stdout）、
    統計 JSON は --output 指定時は stdout、省略時は stderr に出す。
    """
    if args.phasepoly and args.unconstrained:
        raise UsageError("--phasepoly と --unconstrained は同時に指定できません")
    a = resolve_arch(args)
    circuit = read_qasm(args.input)
    logger.info(f"入力読み込み: {args.input} ({circuit.n} qubits, {count_cnots(circuit)} CNOT)")

    if args.phasepoly:
        outcome = route_phase_circuit(circuit, a, args.seed)
    else:
        params = None if args.unconstrained else build_ga_params(args, config, a.n, args.seed)
        outcome = route_circuit(circuit, a, args.seed, params, args.unconstrained)
    _emit(outcome, args.output)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace, config: dict) -> int:
    """0/1 テキストのパリティ行列を読み込み、CNOT 回路を合成する。"""
    a = resolve_arch(args)
    path = Path(args.matrix)
    if not path.exists():
        raise FileNotFoundError(f"行列ファイルが見つかりません: {path}")
    p = parse_matrix_text(path.read_text(encoding="utf-8"))
    if p.n != a.n:
        raise UsageError(f"行列サイズ {p.n} がデバイス {a.name} ({a.n} qubits) と一致しません")

    params = None if args.unconstrained else build_ga_params(args, config, a.n, args.seed)
    circuit, placement = route_matrix(p, a, params, args.unconstrained)
    _emit(RouteOutcome(circuit, 0, count_cnots(circuit), placement, args.seed), args.output)
    return EXIT_OK


def _emit(outcome: RouteOutcome, output: str | None) -> None:
    write_text(emit_qasm(outcome.circuit), output)
    print_json(outcome.stats(), to_stderr=output is None)
