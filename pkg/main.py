#!/usr/bin/env python3
"""
Main entry point for the Game Logic Workbench
Command-line interface: parsing, model checking, translations, proof
checking, the poison game and property campaigns
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from glwb.campaigns import PROPERTIES, run_campaign
from glwb.config import WorkbenchConfig, create_workbench_config, load_config
from glwb.contexts import ctx_formula, ctx_formula_with_report
from glwb.equivalence import GAME_LOGICS, LOGICS, equiv_check, truth_set
from glwb.exceptions import WorkbenchError
from glwb.fragments import Fragment, fragments_of, rank
from glwb.generators import random_digraph, random_formula, random_structure, task_rng
from glwb.grammar import parse_any
from glwb.kernel import ProofChecker, regression_scripts
from glwb.poison import dump_graph, load_graph, poison_build, poison_oracle
from glwb.printer import to_text
from glwb.prooffile import dump_proof, load_proof
from glwb.rewrite import normal_form
from glwb.sabotage import Ownership, gls_truth
from glwb.structures import dump_structure, load_structure
from glwb.translate import translation_for, with_report


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

logger = logging.getLogger("glwb")


def setup_logging(log_level: str = "INFO", log_format: Optional[str] = None):
    """Setup logging configuration; stdout stays reserved for results"""
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format=log_format or "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
    )


def format_states(states: int, n: int) -> str:
    return "{" + ", ".join(str(s) for s in range(n) if states >> s & 1) + "}"


def parse_context(text: Optional[str]) -> Dict[str, Ownership]:
    """Read `a=angel,b=demon` into an initial sabotage context"""
    ctx: Dict[str, Ownership] = {}
    if not text:
        return ctx
    for item in text.split(","):
        atom, _, owner = item.partition("=")
        try:
            ctx[atom.strip()] = Ownership[owner.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown owner {owner.strip()!r} for {atom.strip()}")
    return ctx


def emit(text: str, out: Optional[str] = None):
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
        logger.info(f"Wrote {out}")
    else:
        print(text)


def seed_of(args, config: WorkbenchConfig) -> int:
    return config.campaign.seed if args.seed is None else args.seed


def read_expression(args):
    variables = args.variables.split(",") if getattr(args, "variables", None) else ()
    return parse_any(args.expression, args.logic, variables)


def cmd_parse(args, config: WorkbenchConfig) -> int:
    emit(repr(read_expression(args)), args.out)
    return EXIT_OK


def cmd_print(args, config: WorkbenchConfig) -> int:
    emit(to_text(read_expression(args)), args.out)
    return EXIT_OK


def cmd_normalize(args, config: WorkbenchConfig) -> int:
    if args.logic not in GAME_LOGICS + ("gls",):
        raise ValueError(f"normal form is defined for game logics, not {args.logic}")
    emit(to_text(normal_form(read_expression(args))), args.out)
    return EXIT_OK


def cmd_fragment(args, config: WorkbenchConfig) -> int:
    expr = read_expression(args)
    if args.check:
        member = Fragment.parse(args.check) in fragments_of(expr)
        emit("yes" if member else "no", args.out)
        return EXIT_OK if member else EXIT_FAILURE
    emit("\n".join(tag.value for tag in fragments_of(expr)), args.out)
    return EXIT_OK


def cmd_rank(args, config: WorkbenchConfig) -> int:
    emit(str(rank(read_expression(args))), args.out)
    return EXIT_OK


def cmd_eval(args, config: WorkbenchConfig) -> int:
    expr = read_expression(args)
    structure = load_structure(args.structure)
    options = config.semantics.evaluator_options()
    if args.logic == "gls":
        states = gls_truth(expr, structure, ctx=parse_context(args.context),
                           cap=options["cap"], budget=options["budget"])
    else:
        if args.context:
            raise ValueError("--context only applies to --logic gls")
        states = truth_set(expr, args.logic, structure, **options)
    emit(format_states(states, structure.n), args.out)
    return EXIT_OK


def cmd_translate(args, config: WorkbenchConfig) -> int:
    source = args.source or args.logic
    expr = parse_any(args.expression, "flc" if source == "lsep" else source)
    translate = translation_for(source, args.target)
    if translate is ctx_formula:
        output, report = ctx_formula_with_report(
            expr, budget=config.translate.context_budget,
            eliminate_bekic=args.eliminate_bekic or config.translate.eliminate_bekic,
            blowup_constant=config.translate.blowup_constant)
    else:
        output, report = with_report(f"{source}->{args.target}", translate, expr)
    lines = [to_text(output)]
    if args.report:
        lines.extend(report.as_lines())
    emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_equiv(args, config: WorkbenchConfig) -> int:
    right_logic = args.right_logic or args.logic
    left = parse_any(args.left, args.logic)
    right = parse_any(args.right, right_logic)
    if args.structure:
        structures = [load_structure(path) for path in args.structure]
    else:
        kinds = ("kripke", "nbhd")
        structures = [random_structure(1 + i % config.campaign.states, kinds[i % 2],
                                       rng=task_rng(seed_of(args, config), i))
                      for i in range(args.random)]
    report = equiv_check(left, right, (args.logic, right_logic), structures,
                         **config.semantics.evaluator_options())
    if report.equivalent:
        emit(f"equivalent on {report.structures_checked} structures", args.out)
        return EXIT_OK
    emit(f"counterexample: {report.counterexample.describe()}\n"
         f"{dump_structure(structures[report.counterexample.structure_index])}", args.out)
    return EXIT_FAILURE


def cmd_proof_check(args, config: WorkbenchConfig) -> int:
    if args.export:
        target = Path(args.export)
        target.mkdir(parents=True, exist_ok=True)
        for name, script in regression_scripts().items():
            (target / f"{name}.proof").write_text(dump_proof(script), encoding="utf-8")
        logger.info(f"Exported {len(regression_scripts())} regression scripts to {target}")
    checker = ProofChecker(config.proof.max_taut_atoms, config.proof.gls_alpha,
                           config.proof.afrak_schema_ids())
    scripts = [(path, load_proof(path)) for path in args.files]
    if args.regressions:
        scripts.extend(regression_scripts().items())
    if not scripts and not args.export:
        raise ValueError("no proof files given")
    status = EXIT_OK
    lines: List[str] = []
    for name, script in scripts:
        verdict = checker.check(script)
        lines.append(f"{name}: {verdict.describe()}")
        if not verdict:
            status = EXIT_FAILURE
    if lines:
        emit("\n".join(lines), args.out)
    return status


def cmd_poison(args, config: WorkbenchConfig) -> int:
    if args.graph:
        graph = load_graph(args.graph)
    elif args.random:
        graph = random_digraph(args.random, seed=seed_of(args, config))
    else:
        raise ValueError("give a graph file or --random N")
    formula, structure = poison_build(graph, config.semantics.state_cap)
    options = config.semantics.evaluator_options()
    states = gls_truth(formula, structure, cap=options["cap"], budget=options["budget"])
    oracle = poison_oracle(graph, rule_change=not args.literal)
    lines = [
        f"formula={to_text(formula)}",
        f"gls={format_states(states, graph.n)}",
        f"oracle={format_states(oracle, graph.n)}",
        f"agree={'yes' if states == oracle else 'no'}",
    ]
    if args.random:
        lines.insert(0, dump_graph(graph).rstrip("\n"))
    emit("\n".join(lines), args.out)
    return EXIT_OK if states == oracle else EXIT_FAILURE


def cmd_campaign(args, config: WorkbenchConfig) -> int:
    if args.list:
        emit("\n".join(f"{name}\t{prop.description}" for name, prop in sorted(PROPERTIES.items())),
             args.out)
        return EXIT_OK
    if not args.property:
        raise ValueError("give a property name or --list")
    if args.out:
        config = config.model_copy(update={
            "campaign": config.campaign.model_copy(update={"report_path": args.out})})
    report = run_campaign(args.property, config, args.count, args.seed)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK if report.ok else EXIT_FAILURE


def cmd_gen(args, config: WorkbenchConfig) -> int:
    seed = seed_of(args, config)
    if args.what == "structure":
        structure = random_structure(args.states, args.kind, seed=seed,
                                     cap=config.semantics.state_cap)
        emit(dump_structure(structure), args.out)
    elif args.what == "graph":
        emit(dump_graph(random_digraph(args.states, seed=seed)), args.out)
    else:
        fragment = "flc" if args.fragment.lower() == "flc" else Fragment.parse(args.fragment)
        emit(to_text(random_formula(fragment, args.size, seed=seed)), args.out)
    return EXIT_OK


COMMANDS = {
    "parse": cmd_parse,
    "print": cmd_print,
    "normalize": cmd_normalize,
    "fragment": cmd_fragment,
    "rank": cmd_rank,
    "eval": cmd_eval,
    "translate": cmd_translate,
    "equiv": cmd_equiv,
    "proof-check": cmd_proof_check,
    "poison": cmd_poison,
    "campaign": cmd_campaign,
    "gen": cmd_gen,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", default=None,
                        help="Configuration file path (default: config/default.yaml)")
    common.add_argument("--log-level", "-l", default=None,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Logging level")
    common.add_argument("--out", "-o", default=None, help="Write the result to this file")
    common.add_argument("--seed", type=int, default=None,
                        help="Random seed (default: campaign.seed from the configuration)")

    logic = argparse.ArgumentParser(add_help=False)
    logic.add_argument("--logic", default="rgl", choices=LOGICS, help="Logic of the input")

    expression = argparse.ArgumentParser(add_help=False, parents=[logic])
    expression.add_argument("expression", help="Formula in concrete syntax")
    expression.add_argument("--variables", default=None,
                            help="Comma-separated free variables to accept")

    parser = argparse.ArgumentParser(prog="glwb", description="Game Logic Workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("parse", parents=[common, expression], help="Show the parsed syntax tree")
    sub.add_parser("print", parents=[common, expression], help="Pretty-print a formula")
    sub.add_parser("normalize", parents=[common, expression], help="Negation/dual normal form")
    fragment = sub.add_parser("fragment", parents=[common, expression],
                              help="List the fragments a formula belongs to")
    fragment.add_argument("--check", default=None, help="Test membership in one fragment")
    sub.add_parser("rank", parents=[common, expression], help="Well-founded rank")

    evaluate = sub.add_parser("eval", parents=[common, expression], help="Truth set on a structure")
    evaluate.add_argument("--structure", "-s", required=True, help="Structure file")
    evaluate.add_argument("--context", default=None,
                          help="Initial sabotage context, e.g. a=angel,b=demon")

    translate = sub.add_parser("translate", parents=[common, logic], help="Translate a formula")
    translate.add_argument("expression", help="Formula in concrete syntax")
    translate.add_argument("--from", dest="source", default=None, choices=LOGICS + ("lsep",),
                           help="Source logic (defaults to --logic)")
    translate.add_argument("--to", dest="target", required=True, help="Target logic")
    translate.add_argument("--eliminate-bekic", action="store_true",
                           help="Remove vectorial recursion from the output")
    translate.add_argument("--report", action="store_true", help="Append key=value size report")

    equiv = sub.add_parser("equiv", parents=[common, logic], help="Look for a distinguishing state")
    equiv.add_argument("left")
    equiv.add_argument("right")
    equiv.add_argument("--right-logic", default=None, choices=LOGICS)
    equiv.add_argument("--structure", "-s", action="append", default=[], help="Structure file")
    equiv.add_argument("--random", type=int, default=20,
                       help="Random structures to try when no file is given")

    proof = sub.add_parser("proof-check", parents=[common], help="Check proof scripts")
    proof.add_argument("files", nargs="*")
    proof.add_argument("--regressions", action="store_true",
                       help="Also check the built-in derived-axiom scripts")
    proof.add_argument("--export", default=None, help="Write the built-in scripts to a directory")

    poison = sub.add_parser("poison", parents=[common], help="Poison game: formula vs. oracle")
    poison.add_argument("graph", nargs="?", help="Graph file (vertices N / edge i j)")
    poison.add_argument("--random", type=int, default=0, help="Random graph with N vertices")
    poison.add_argument("--literal", action="store_true",
                        help="Oracle without the stay-on-poisoned-vertex rule")

    campaign = sub.add_parser("campaign", parents=[common], help="Run a property campaign")
    campaign.add_argument("property", nargs="?")
    campaign.add_argument("--count", type=int, default=None, help="Number of tasks")
    campaign.add_argument("--list", action="store_true", help="List registered properties")

    gen = sub.add_parser("gen", parents=[common], help="Generate random inputs")
    gen.add_argument("what", choices=["structure", "graph", "formula"])
    gen.add_argument("--states", type=int, default=3)
    gen.add_argument("--kind", default="kripke", choices=["kripke", "nbhd"])
    gen.add_argument("--fragment", default="RGL")
    gen.add_argument("--size", type=int, default=8)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = create_workbench_config(load_config(args.config))
    except WorkbenchError as e:
        setup_logging(args.log_level or "INFO")
        logging.getLogger(__name__).error(f"Configuration error: {e}")
        return EXIT_USAGE
    setup_logging(args.log_level or config.logging.level, config.logging.format)

    try:
        return COMMANDS[args.command](args, config)
    except FileNotFoundError as e:
        logger.error(f"File not found: {e}")
    except WorkbenchError as e:
        logger.error(f"{type(e).__name__}: {e}")
    except ValueError as e:
        logger.error(f"Invalid arguments: {e}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
