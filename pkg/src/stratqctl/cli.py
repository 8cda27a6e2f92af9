"""Command-line front end.

Exit codes: 0 TRUE / model found, 1 FALSE / no model up to the bound,
2 UNKNOWN, 64 usage error, 65 malformed input, 66 unreadable file,
70 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .direct import DirectError, check_atl_fixpoint, check_atlsc_direct, check_memoryless, check_sl_direct
from .formulas import FormulaError, parse_document, to_text
from .games import GameError, cgs_from_dict, dump_cgs, underlying_kripke
from .mc_translate import translate_mc
from .qctl import QctlError, check_qctl
from .sat_translate import padded_agents, translate_sat_ba, translate_sat_tb, translate_sl_ba, translate_sl_tb
from .search import MODEL, NO_MODEL, sat_bounded_alphabet, sat_turn_based
from .tiling import TilingInstance, generate_tiling_formula
from .verdict import Value, Verdict

EX_USAGE, EX_DATAERR, EX_NOINPUT, EX_SOFTWARE = 64, 65, 66, 70
EXIT_OF = {Value.TRUE: 0, Value.FALSE: 1, Value.UNKNOWN: 2}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FileNotFoundError(f"{path}: {exc.strerror or exc}") from exc


def _logic(path: str, explicit: Optional[str]) -> str:
    if explicit:
        return explicit
    for ext in ("atlsc", "sl", "qctl"):
        if path.endswith("." + ext):
            return ext
    return "atlsc"


def _load_game(path: str):
    try:
        doc = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise GameError(f"{path}: invalid JSON ({exc.msg})") from exc
    return cgs_from_dict(doc)


def _agents(arg: Optional[str]) -> Optional[tuple]:
    if arg is None:
        return None
    return tuple(a.strip() for a in arg.split(",") if a.strip())


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stratqctl", description="ATLsc / SL to QCTL* workbench")
    p.add_argument("--output", choices=("text", "json"), default="text", help="result format (default: text)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pr = sub.add_parser("parse", help="parse a formula file and print it back")
    pr.add_argument("--logic", choices=("atlsc", "sl", "qctl"), help="formula logic (default: from the file extension)")
    pr.add_argument("formula")

    tr = sub.add_parser("translate", help="translate to QCTL*")
    tr.add_argument("--mode", required=True, choices=("mc", "sat-tb", "sat-ba", "sat-sl-tb", "sat-sl-ba"),
                    help="model checking or one of the satisfiability reductions")
    tr.add_argument("--game", help="game JSON file (mode mc)")
    tr.add_argument("--context", default="", help="comma-separated agents bound by the strategy context (mode mc)")
    tr.add_argument("--alphabet", type=_positive, default=2, help="number of moves (bounded-alphabet modes)")
    tr.add_argument("--agents", help="comma-separated agent list (default: header or formula)")
    tr.add_argument("formula")

    ck = sub.add_parser("check", help="model check a formula at a state")
    ck.add_argument("--engine", required=True, choices=("qctl", "direct", "exact", "atl", "memoryless"),
                    help="checking engine")
    ck.add_argument("--game", required=True, help="game JSON file")
    ck.add_argument("--state", required=True, help="state to check at")
    ck.add_argument("--logic", choices=("atlsc", "sl", "qctl"), help="formula logic (default: from the file extension)")
    ck.add_argument("--budget", type=_positive, default=1, help="labeling machine size for the qctl engine")
    ck.add_argument("--memory", type=_positive, default=1, help="strategy memory bound for the direct engine")
    ck.add_argument("--cap", type=_positive, default=100_000, help="product size cap for the qctl engine")
    ck.add_argument("formula")

    st = sub.add_parser("sat", help="bounded satisfiability search")
    kind = st.add_mutually_exclusive_group(required=True)
    kind.add_argument("--turn-based", action="store_true", help="search turn-based games")
    kind.add_argument("--alphabet", type=_positive, help="search concurrent games over this many moves")
    st.add_argument("--max-states", type=_positive, default=4, help="largest structure tried (default: 4)")
    st.add_argument("--budget", type=_positive, default=1, help="memory bound or labeling budget per candidate")
    st.add_argument("--engine", choices=("direct", "qctl", "both"), default="direct", help="candidate checker")
    st.add_argument("--agents", help="comma-separated agent list (default: header or padded formula agents)")
    st.add_argument("--max-candidates", type=_positive, help="give up (outcome aborted) after this many candidates")
    st.add_argument("--model-out", help="write the model found as game JSON")
    st.add_argument("--logic", choices=("atlsc", "sl"), help="formula logic (default: from the file extension)")
    st.add_argument("formula")

    tg = sub.add_parser("tiling-gen", help="emit the tiling formula for an instance")
    tg.add_argument("instance", help="tiling instance JSON: tiles, h and v pairs")
    tg.add_argument("-o", "--out", help="write the formula here instead of stdout")
    return p


def _emit(args, text: str, doc: dict) -> None:
    if args.output == "json":
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text + "\n")


def _verdict_text(v: Verdict) -> str:
    lines = [f"verdict: {v.value.value}"]
    if v.note:
        lines.append(f"note: {v.note}")
    if isinstance(v.witness, list):
        lines += [w.dump() if hasattr(w, "dump") else repr(w) for w in v.witness]
    elif isinstance(v.witness, dict):
        lines.append("witness: " + json.dumps(v.witness, sort_keys=True))
    return "\n".join(lines)


def cmd_parse(args) -> int:
    logic = _logic(args.formula, args.logic)
    doc = parse_document(logic, _read(args.formula))
    text = to_text(doc.formula)
    _emit(args, text, {"logic": logic, "formula": text, "agents": list(doc.agents or [])})
    return 0


def cmd_translate(args) -> int:
    sl = args.mode.startswith("sat-sl")
    logic = "sl" if sl else "atlsc"
    doc = parse_document(logic, _read(args.formula))
    f = doc.formula
    agents = _agents(args.agents) or doc.agents
    if args.mode == "mc":
        if not args.game:
            raise UsageError("--game is required for --mode mc")
        out = translate_mc(f, _agents(args.context) or (), _load_game(args.game))
    elif args.mode == "sat-tb":
        out = translate_sat_tb(f)
    elif args.mode == "sat-ba":
        out = translate_sat_ba(f, agents or padded_agents(f), args.alphabet)
    elif args.mode == "sat-sl-tb":
        out = translate_sl_tb(f, agents)
    else:
        out = translate_sl_ba(f, agents, args.alphabet)
    text = to_text(out)
    _emit(args, text, {"mode": args.mode, "formula": text})
    return 0


def cmd_check(args) -> int:
    cgs = _load_game(args.game)
    if args.state not in cgs.states:
        raise GameError(f"unknown state {args.state!r}", "states")
    logic = _logic(args.formula, args.logic or ("qctl" if args.engine == "qctl" else None))
    doc = parse_document(logic, _read(args.formula), allow_reserved=logic == "qctl")
    f = doc.formula
    if args.engine == "qctl":
        if logic != "qctl":
            raise UsageError("the qctl engine checks QCTL* formulas")
        verdict = check_qctl(underlying_kripke(cgs), args.state, f, budget=args.budget, cap=args.cap)
    elif args.engine == "atl":
        verdict = Verdict(Value.of(check_atl_fixpoint(cgs, args.state, f)), None, "ATL fixpoints")
    elif args.engine == "memoryless":
        verdict = Verdict(Value.of(check_memoryless(cgs, args.state, f)), None, "memoryless strategies")
    elif logic == "sl":
        verdict = check_sl_direct(cgs, args.state, f, memory_bound=args.memory)
    elif args.engine == "exact":
        verdict = check_atlsc_direct(cgs, args.state, f, mode="exact-horizon")
    else:
        verdict = check_atlsc_direct(cgs, args.state, f, memory_bound=args.memory)
    _emit(args, _verdict_text(verdict), verdict.to_json())
    return EXIT_OF[verdict.value]


def cmd_sat(args) -> int:
    logic = _logic(args.formula, args.logic)
    doc = parse_document(logic, _read(args.formula))
    agents = _agents(args.agents) or doc.agents
    if args.turn_based:
        report = sat_turn_based(doc.formula, args.max_states, args.budget, args.engine, agents=agents,
                                max_candidates=args.max_candidates)
    else:
        report = sat_bounded_alphabet(doc.formula, agents, args.alphabet, args.max_states, args.budget,
                                      args.engine, max_candidates=args.max_candidates)
    if report.cgs is not None and args.model_out:
        with open(args.model_out, "w", encoding="utf-8") as fh:
            fh.write(dump_cgs(report.cgs) + "\n")
    lines = [f"outcome: {report.outcome}", f"candidates: {report.candidates}", f"checked: {report.checked}"]
    if report.unknown:
        lines.append(f"unknown: {report.unknown}")
    if report.cgs is not None and not args.model_out:
        lines.append(dump_cgs(report.cgs))
    doc_out = report.to_json()
    doc_out.pop("elapsed")
    _emit(args, "\n".join(lines), doc_out)
    if report.outcome == MODEL:
        return 0
    return 1 if report.outcome == NO_MODEL else 2


def cmd_tiling(args) -> int:
    try:
        inst = TilingInstance.from_dict(json.loads(_read(args.instance)))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise FormulaError(f"{args.instance}: malformed tiling instance ({exc})") from exc
    text = to_text(generate_tiling_formula(inst))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        text = f"wrote {args.out}"
    _emit(args, text, {"formula": to_text(generate_tiling_formula(inst))})
    return 0


COMMANDS = {"parse": cmd_parse, "translate": cmd_translate, "check": cmd_check, "sat": cmd_sat,
            "tiling-gen": cmd_tiling}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EX_USAGE
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EX_NOINPUT
    except FormulaError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EX_DATAERR
    except (GameError, DirectError, QctlError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EX_DATAERR
    except Exception as exc:  # noqa: BLE001
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EX_SOFTWARE


if __name__ == "__main__":
    sys.exit(main())
