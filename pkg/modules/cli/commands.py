"""
Interface de linha de comando: check, approx, fixpoint, run, oracle e simulate.

Códigos de saída: 0 sucesso, 1 entrada inválida (sintaxe, validação, opções),
2 falha de comparação, 3 erro interno.
"""

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from config.settings import SETTINGS
from modules.fock.space import FockSpace
from modules.lang.ast import SpaceSpec
from modules.lang.validator import validate
from modules.oracles.closed_forms import (FAMILIES, bidirectional_closed_form, loop_closed_form,
                                          symmetrised_closed_forms, symmetrised_loop_closed_form,
                                          unidirectional_closed_form, walk_gates)
from modules.oracles.compare import ComparisonReport, compare
from modules.oracles.simulator import STEP_MODES, ConfigurationSimulator
from modules.parser.parser import ParsedProgram, SourceFile, parse, with_ring
from modules.parser.printer import print_program
from modules.semantics.config import SKIP_CONVENTIONS, SemanticsConfig
from modules.semantics.engine import SemanticsEngine, check_equivalence
from modules.semantics.substitution import main_approximation, syntactic_approx
from modules.states.principal import distribution_frame, distribution_json, run_principal
from modules.symmetry.symmetrise import STATISTICS, symmetrise_operator
from modules.utils.errors import FockrecError, ValidationError
from modules.utils.logger import setup_logger

logger = setup_logger("cli")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MISMATCH = 2
EXIT_INTERNAL = 3


@dataclass
class ProgramContext:
    program: ParsedProgram
    space: FockSpace
    cfg: SemanticsConfig

    @property
    def spaces(self) -> List[SpaceSpec]:
        return list(self.space.coins) + list(self.space.principals)


# ----------------------------------------------------------------- opções
def parse_trunc(text: str):
    """'5' (todas as moedas) ou 'd=5,e=3' (por moeda)."""
    text = text.strip()
    if "=" not in text:
        return int(text)
    caps = {}
    for item in text.split(","):
        coin, _, value = item.partition("=")
        if not coin.strip() or not value.strip():
            raise argparse.ArgumentTypeError(f"truncamento inválido: '{text}'")
        caps[coin.strip()] = int(value)
    return caps


def _trunc_arg(text: str):
    try:
        return parse_trunc(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"truncamento inválido: '{text}'") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockrec", description="Semântica de programas quânticos recursivos")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, semantics: bool = True) -> None:
        p.add_argument("file")
        if semantics:
            p.add_argument("--trunc", type=_trunc_arg, default=SETTINGS["coin_trunc"])
            p.add_argument("--max-total", type=int, default=None)
            p.add_argument("--ring", type=int, default=None)
            p.add_argument("--skip-convention", choices=SKIP_CONVENTIONS, default=SETTINGS["skip_convention"])
            p.add_argument("--tol", type=float, default=SETTINGS["tolerance"])
        p.add_argument("--out", default=None)

    common(sub.add_parser("check", help="analisa e valida o programa"), semantics=False)

    approx = sub.add_parser("approx", help="semântica da n-ésima aproximação sintática")
    common(approx)
    approx.add_argument("--proc", default=None, help="identificador (ou 'main')")
    approx.add_argument("--depth", type=int, required=True)

    fixpoint = sub.add_parser("fixpoint", help="semântica de ponto fixo")
    common(fixpoint)
    fixpoint.add_argument("--report-iterations", action="store_true")
    fixpoint.add_argument("--check-equivalence", action="store_true")

    run = sub.add_parser("run", help="semântica do sistema principal")
    common(run)
    run.add_argument("--coin-init", required=True)
    run.add_argument("--coin", default=None)
    run.add_argument("--input", default="0")
    run.add_argument("--statistics", choices=STATISTICS, default="boson")
    run.add_argument("--format", choices=("json", "csv"), default="json")

    oracle = sub.add_parser("oracle", help="compara o motor com as formas fechadas")
    common(oracle)
    oracle.add_argument("--family", choices=FAMILIES, required=True)
    oracle.add_argument("--depth", type=int, default=5)
    oracle.add_argument("--proc", default=None)
    oracle.add_argument("--coin", default=None)
    oracle.add_argument("--system", default=None)
    oracle.add_argument("--coin-gate", default="H")
    oracle.add_argument("--left", default="TL")
    oracle.add_argument("--right", default="TR")
    oracle.add_argument("--w", default="W")
    oracle.add_argument("--u", default="U")

    simulate = sub.add_parser("simulate", help="simulação por configurações")
    common(simulate)
    simulate.add_argument("--depth", type=int, required=True)
    simulate.add_argument("--steps", choices=STEP_MODES, default="call")
    simulate.add_argument("--input", default="0")
    simulate.add_argument("--fresh", default=None)
    simulate.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


# ----------------------------------------------------------------- carregamento
def load_program(path: str, ring: Optional[int] = None) -> ParsedProgram:
    program = parse(SourceFile.read(path))
    if ring is not None:
        program = with_ring(program, ring)
    report = validate(program.declaration, program.gates, program.spaces)
    if not report.ok:
        for v in report.violations:
            logger.error(f"{v.kind}: {v.message}")
        raise ValidationError(f"{len(report.violations)} violação(ões) em {path}", report)
    return program


def load_context(args: argparse.Namespace) -> ProgramContext:
    program = load_program(args.file, args.ring)
    space = FockSpace.build(program.spaces, args.trunc, args.max_total)
    cfg = SemanticsConfig(skip_convention=args.skip_convention, tolerance=args.tol)
    logger.info(f"Espaço de Fock: moedas {list(space.coin_names)}, limites {list(space.caps)}, "
                f"total ≤ {space.max_total}, {len(space.occupations)} ocupação(ões)")
    return ProgramContext(program, space, cfg)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
        logger.info(f"📦 Resultado gravado em {out}")
    else:
        sys.stdout.write(text)


def _dump(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


# ----------------------------------------------------------------- subcomandos
def cmd_check(args) -> int:
    program = parse(SourceFile.read(args.file))
    report = validate(program.declaration, program.gates, program.spaces)
    payload = {
        "ok": report.ok,
        "procedures": program.declaration.names,
        "violations": report.to_frame().to_dict(orient="records"),
    }
    _emit(_dump(payload), args.out)
    if not report.ok:
        logger.error(f"Programa inválido: {', '.join(report.kinds())}")
        return EXIT_INVALID
    logger.info(f"✓ {args.file} válido")
    return EXIT_OK


def cmd_approx(args) -> int:
    ctx = load_context(args)
    d = ctx.program.declaration
    proc = args.proc or d.names[0]
    q = main_approximation(d, args.depth) if proc == "main" else syntactic_approx(d, proc, args.depth)
    op = SemanticsEngine(ctx.space, ctx.program.gates, ctx.cfg).interpret_generalised(q)
    payload = {
        "proc": proc,
        "depth": args.depth,
        "program": print_program(q),
        "blocks": op.to_json(),
        "possibly_truncated": [o.as_dict() for o in ctx.space.occupations
                               if ctx.space.on_top_shell(o) and o in op.blocks],
    }
    _emit(_dump(payload), args.out)
    return EXIT_OK


def cmd_fixpoint(args) -> int:
    ctx = load_context(args)
    d = ctx.program.declaration
    result = SemanticsEngine(ctx.space, ctx.program.gates, ctx.cfg).kleene_fixpoint(d)
    payload: Dict = {
        "procedures": {name: op.to_json() for name, op in result.procedures.items()},
        "main": result.main.to_json(),
        "possibly_truncated": {name: [o.as_dict() for o in occs]
                               for name, occs in result.possibly_truncated().items()},
    }
    if args.report_iterations:
        payload["iterations"] = result.iterations
        logger.info(f"📊 Iterações de Kleene: {result.iterations}")
    status = EXIT_OK
    if args.check_equivalence:
        report = check_equivalence(d, ctx.space, ctx.program.gates, ctx.cfg)
        payload["equivalence"] = report.summary()
        status = EXIT_OK if report.passed else EXIT_MISMATCH
    _emit(_dump(payload), args.out)
    return status


def cmd_run(args) -> int:
    ctx = load_context(args)
    rho = run_principal(ctx.program.declaration, ctx.space, ctx.program.gates, args.coin_init, args.input,
                        args.statistics, ctx.cfg, args.coin)
    if args.format == "csv":
        text = distribution_frame(rho, args.tol).to_csv(index=False)
    else:
        text = _dump(distribution_json(rho, args.tol))
    _emit(text, args.out)
    return EXIT_OK


def _oracle_reports(args, ctx: ProgramContext) -> List[ComparisonReport]:
    d = ctx.program.declaration
    gates = ctx.program.gates
    space = ctx.space
    coin = args.coin or space.coin_names[0]
    system = args.system or space.principals[0].name
    proc = args.proc or d.names[0]
    tol = args.tol
    shallow = [o for o in space.occupations if o.total <= args.depth]

    if args.family == "loop":
        cfg = ctx.cfg.with_(skip_convention="full-identity")
        if ctx.cfg.skip_convention != "full-identity":
            logger.info("Formas fechadas do laço usam a convenção 'full-identity' para skip")
        fix = SemanticsEngine(space, gates, cfg).kleene_fixpoint(d)
        u = gates.matrix(args.u)
        coin_dim = space.coin(coin).dimension
        system_dim = space.principal_space(system).dimension
        reports = []
        if args.w in gates and len(gates[args.w].spaces) == 2:
            w = gates.matrix(args.w)
        else:
            v = gates.matrix(args.w) if args.w in gates else np.eye(coin_dim)
            w = np.kron(v, np.eye(system_dim))
            reports.append(compare(symmetrise_operator(fix.procedures[proc]),
                                   symmetrised_loop_closed_form(space, v, u, coin, system), tol, shallow,
                                   label=f"sym({proc})"))
        reports.insert(0, compare(fix.procedures[proc], loop_closed_form(space, w, u, coin, system), tol, shallow,
                                  label=proc))
        return reports

    h, t_left, t_right = walk_gates(gates, args.coin_gate, args.left, args.right)
    engine = SemanticsEngine(space, gates, ctx.cfg)
    if args.family == "unidirectional":
        reports = []
        for n in range(1, args.depth + 1):
            got = engine.interpret_generalised(syntactic_approx(d, proc, n))
            expected = unidirectional_closed_form(space, n, h, t_left, t_right, coin, system)
            reports.append(compare(got, expected, tol, label=f"{proc}^({n})"))
        fix = engine.kleene_fixpoint(d)
        reports.append(compare(fix.procedures[proc],
                               unidirectional_closed_form(space, None, h, t_left, t_right, coin, system), tol,
                               label=proc))
        return reports
    fix = engine.kleene_fixpoint(d)
    if args.family == "bidirectional":
        if len(d.names) != 2:
            raise ValidationError("a família bidirecional exige duas equações (X, Y)")
        x, y = bidirectional_closed_form(space, h, t_left, t_right, coin, system)
        return [compare(fix.procedures[d.names[0]], x, tol, label=d.names[0]),
                compare(fix.procedures[d.names[1]], y, tol, label=d.names[1])]
    forms = symmetrised_closed_forms(space, h, t_left, t_right, coin, system)
    if len(d.names) == 1:
        return [compare(symmetrise_operator(fix.procedures[proc]), forms["unidirectional"], tol, shallow,
                        label=f"sym({proc})")]
    return [compare(symmetrise_operator(fix.procedures[d.names[0]]), forms["bidirectional_x"], tol, shallow,
                    label=f"sym({d.names[0]})"),
            compare(symmetrise_operator(fix.procedures[d.names[1]]), forms["bidirectional_y"], tol, shallow,
                    label=f"sym({d.names[1]})")]


def cmd_oracle(args) -> int:
    ctx = load_context(args)
    reports = _oracle_reports(args, ctx)
    passed = all(r.passed for r in reports)
    payload = {
        "family": args.family,
        "passed": passed,
        "max_diff": max((r.max_diff for r in reports), default=0.0),
        "comparisons": [r.summary() for r in reports],
    }
    _emit(_dump(payload), args.out)
    if passed:
        logger.info(f"✓ Oráculo '{args.family}' confere (diferença máxima {payload['max_diff']:.3e})")
        return EXIT_OK
    logger.error(f"Oráculo '{args.family}' diverge (diferença máxima {payload['max_diff']:.3e})")
    return EXIT_MISMATCH


def cmd_simulate(args) -> int:
    ctx = load_context(args)
    simulator = ConfigurationSimulator(ctx.program.declaration, ctx.spaces, ctx.program.gates, args.steps,
                                       args.fresh)
    principal = ctx.space.principals[0].name if ctx.space.principals else None
    initial = simulator.initial({principal: args.input} if principal else None)
    history = simulator.run(args.depth, initial)
    if args.format == "csv":
        text = simulator.trace_frame(history).to_csv(index=False)
    else:
        text = simulator.trace_json(history) + "\n"
    _emit(text, args.out)
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "approx": cmd_approx,
    "fixpoint": cmd_fixpoint,
    "run": cmd_run,
    "oracle": cmd_oracle,
    "simulate": cmd_simulate,
}


def dispatch(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID

    logger.info(f"🚀 fockrec {args.command} {args.file}")
    try:
        return COMMANDS[args.command](args)
    except (FockrecError, ValueError, FileNotFoundError) as e:
        logger.error(f"Erro em '{args.command}': {e}")
        return EXIT_INVALID
    except Exception as e:
        logger.exception(f"Erro interno em '{args.command}': {e}")
        return EXIT_INTERNAL
