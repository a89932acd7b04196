"""
Property campaigns

Each registered property checks one randomly generated subject per task
against a handful of random structures. Tasks run on a thread pool behind
an asyncio semaphore; each task draws from its own generator seeded by
(seed, index) and outcomes are reduced in index order, so a report depends
only on the seed and the counts.
"""

import asyncio
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

from .config import CampaignConfig, WorkbenchConfig
from .contexts import ctx_formula
from .equivalence import truth_set
from .evaluate import FlcEvaluator, RglEvaluator, eval_rgl_game, eval_vectorial
from .exceptions import (
    AlphabetTooSmall, BudgetExceeded, CampaignError, CapExceeded, WorkbenchError,
)
from .fragments import Fragment
from .generators import (
    GameLogicGenerator, InstantiationSampler, random_digraph, random_formula, random_game,
    random_structure, task_rng,
)
from .lattice import StateSet
from .monitor import CampaignMonitor
from .poison import Digraph, poison_build, poison_oracle
from .printer import to_text
from .rewrite import flc_negate, is_normal, normal_form, unfold_fixpoint
from .sabotage import context_dual_complement, eval_gls_formula, gls_truth
from .schemas import SchemaId, check_side_condition, instantiate_schema, schema
from .structures import FiniteStructure, dump_structure
from .grammar import parse_flc, parse_game_formula
from .terms import CoRec, Diamond, FixKind, FlcExpr, Neg, Rec, RecSystem
from .translate import bekic_eliminate, flat, natural, qflat, sep_to_star, sharp_formula


logger = logging.getLogger(__name__)

STRUCTURE_GAMES = ("a", "b")
SCHEMA_GAMES = ("a", "b", "c", "d")
SKIPPED_ERRORS = (CapExceeded, BudgetExceeded, AlphabetTooSmall)


@dataclass
class TaskOutcome:
    """Result of one campaign task"""
    index: int
    status: str
    subject: str = ""
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


class Mismatch(Exception):
    """A checked property failed on a concrete structure"""

    def __init__(self, message: str, structure: Optional[FiniteStructure] = None):
        super().__init__(message)
        self.structure = structure


class Skip(Exception):
    """A task whose subject could not be generated or evaluated within bounds"""


class TaskContext:
    """Per-task generator, settings and subject label"""

    def __init__(self, index: int, config: CampaignConfig, options: Dict[str, Any]):
        self.index = index
        self.config = config
        self.options = options
        self.rng = task_rng(config.seed, index)
        self.subject = ""

    @property
    def sabotage(self) -> Sequence[str]:
        return STRUCTURE_GAMES[:self.config.sabotage_atoms]

    def formula(self, fragment, **pools):
        f = random_formula(fragment, self.config.formula_size, rng=self.rng,
                           sabotage=self.sabotage, **pools)
        self.subject = to_text(f)
        return f

    def structures(self, kripke_only: bool = False, games: Sequence[str] = STRUCTURE_GAMES,
                   count: Optional[int] = None) -> List[FiniteStructure]:
        result = []
        for i in range(self.config.structures if count is None else count):
            kind = "kripke" if kripke_only or i % 2 == 0 else "nbhd"
            n = self.rng.randint(1, self.config.states)
            result.append(random_structure(n, kind, games=games, rng=self.rng,
                                           cap=self.options.get("cap", 10)))
        return result

    def truth(self, expr, logic: str, structure: FiniteStructure) -> StateSet:
        return truth_set(expr, logic, structure, **self.options)

    def agree(self, left, left_logic: str, right, right_logic: str,
              structures: Sequence[FiniteStructure]):
        for structure in structures:
            a = self.truth(left, left_logic, structure)
            b = self.truth(right, right_logic, structure)
            if a != b:
                raise Mismatch(f"truth sets differ: {a:#b} vs {b:#b}", structure)


@dataclass(frozen=True)
class CampaignProperty:
    name: str
    description: str
    check: Callable[[TaskContext], None]


PROPERTIES: Dict[str, CampaignProperty] = {}


def register(name: str, description: str):
    def decorator(check: Callable[[TaskContext], None]):
        PROPERTIES[name] = CampaignProperty(name, description, check)
        return check
    return decorator


def get_property(name: str) -> CampaignProperty:
    try:
        return PROPERTIES[name]
    except KeyError:
        raise CampaignError(f"unknown property {name!r}; known: {', '.join(sorted(PROPERTIES))}")


# Semantics

@register("empty-context-agreement", "game logic truth equals sabotage truth in the empty context")
def _empty_context_agreement(ctx: TaskContext):
    f = ctx.formula(Fragment.GL)
    ctx.agree(f, "gls", f, "gl", ctx.structures())


@register("duality", "negation is the context-dual complement")
def _duality(ctx: TaskContext):
    f = ctx.formula(Fragment.GLS)
    alphabet = list(ctx.sabotage)
    budget = {k: v for k, v in ctx.options.items() if k in ("cap", "budget")}
    for structure in ctx.structures():
        direct = eval_gls_formula(normal_form(Neg(f)), structure, alphabet, **budget)
        expected = context_dual_complement(eval_gls_formula(f, structure, alphabet, **budget),
                                           structure.n)
        if direct.values != expected.values:
            raise Mismatch("negation differs from the context-dual complement", structure)


@register("flc-negation", "flc_negate complements truth sets")
def _flc_negation(ctx: TaskContext):
    f = ctx.formula(Fragment.LMU)
    for structure in ctx.structures():
        negated = ctx.truth(flc_negate(f), "flc", structure)
        if negated != structure.full ^ ctx.truth(f, "flc", structure):
            raise Mismatch("negation is not the complement", structure)


@register("alphabet-irrelevance", "extra context letters do not change truth in the empty context")
def _alphabet_irrelevance(ctx: TaskContext):
    f = ctx.formula(Fragment.GLS)
    budget = {k: v for k, v in ctx.options.items() if k in ("cap", "budget")}
    for structure in ctx.structures():
        plain = gls_truth(f, structure, **budget)
        wider = gls_truth(f, structure, alphabet=sorted(set(ctx.sabotage) | {"z"}), **budget)
        if plain != wider:
            raise Mismatch(f"{plain:#b} vs {wider:#b} with an extra letter", structure)


@register("fixpoint-unrolling", "a fixpoint game equals its one-step unrolling")
def _fixpoint_unrolling(ctx: TaskContext):
    generator = GameLogicGenerator(ctx.rng, recursion=True)
    body = generator.game(ctx.config.formula_size, ("x",))
    fixpoint = ctx.rng.choice((Rec, CoRec))("x", body)
    goal = generator.formula(2)
    f = Diamond(fixpoint, goal)
    ctx.subject = to_text(f)
    ctx.agree(f, "rgl", Diamond(unfold_fixpoint(fixpoint), goal), "rgl", ctx.structures())


@register("bekic", "simultaneous fixpoints equal their nested elimination")
def _bekic(ctx: TaskContext):
    rng = ctx.rng
    variables = ("x", "y", "z")[:rng.randint(2, 3)]
    kind = rng.choice(list(FixKind))
    generator = GameLogicGenerator(rng)
    bodies = tuple(generator.game(rng.randint(1, 5), variables) for _ in variables)
    index = rng.randrange(len(variables))
    system = RecSystem(kind, variables, bodies, index)
    ctx.subject = to_text(system)
    for structure in ctx.structures(kripke_only=True):
        reference = eval_vectorial(list(zip(variables, bodies)), kind, structure, index=index,
                                   cap=ctx.options.get("cap", 10))
        nested = eval_rgl_game(bekic_eliminate(system), structure, fast_path=False,
                               cap=ctx.options.get("cap", 10))
        if reference != nested:
            raise Mismatch(f"component {index} differs after elimination", structure)


@register("pointwise-rgl", "pointwise and function-lattice engines agree on right-linear games")
def _pointwise_rgl(ctx: TaskContext):
    game = normal_form(random_game(Fragment.RLGL, ctx.config.formula_size, rng=ctx.rng))
    ctx.subject = to_text(game)
    cap = ctx.options.get("cap", 10)
    for structure in ctx.structures():
        lattice = RglEvaluator(structure, cap, fast_path=False).game_table(game)
        pointwise = RglEvaluator(structure, cap).pointwise_table(game)
        if lattice != pointwise:
            raise Mismatch("engines disagree", structure)


@register("pointwise-flc", "pointwise and function-lattice engines agree on composition-free fixpoints")
def _pointwise_flc(ctx: TaskContext):
    f = ctx.formula(Fragment.LMU)
    cap = ctx.options.get("cap", 10)
    for structure in ctx.structures():
        lattice = FlcEvaluator(structure, cap, fast_path=False).table(f)
        pointwise = FlcEvaluator(structure, cap).pointwise_table(f)
        if lattice != pointwise:
            raise Mismatch("engines disagree", structure)


# Syntax

@register("parse-print", "printing and parsing stabilizes after one cycle")
def _parse_print(ctx: TaskContext):
    tags = (Fragment.GL, Fragment.GLS, Fragment.RGL, Fragment.LMU, Fragment.LSTAR, "flc")
    tag = tags[ctx.index % len(tags)]
    f = ctx.formula(tag)
    text = to_text(f)
    reparsed = parse_flc(text) if isinstance(f, FlcExpr) else parse_game_formula(text)
    if to_text(reparsed) != text:
        raise Mismatch(f"reprinted as {to_text(reparsed)}")


@register("normal-form", "normal forms are normal, idempotent and truth preserving")
def _normal_form(ctx: TaskContext):
    f = ctx.formula(Fragment.RGL if ctx.index % 2 else Fragment.GL)
    once = normal_form(f)
    if not is_normal(once) or normal_form(once) != once:
        raise Mismatch(f"normal form {to_text(once)} is not stable")
    ctx.agree(f, "rgl", once, "rgl", ctx.structures())


# Translations

@register("correct-sharp", "FLC formulas and their game translations agree")
def _correct_sharp(ctx: TaskContext):
    f = ctx.formula("flc")
    ctx.agree(f, "flc", sharp_formula(f), "rgl", ctx.structures())


@register("correct-flat", "recursive game logic formulas and their FLC translations agree")
def _correct_flat(ctx: TaskContext):
    f = ctx.formula(Fragment.RGL)
    ctx.agree(f, "rgl", flat(f), "flc", ctx.structures())


@register("correct-qflat", "right-linear formulas and their mu-calculus translations agree")
def _correct_qflat(ctx: TaskContext):
    f = ctx.formula(Fragment.RLGL)
    ctx.agree(f, "rlgl", qflat(f), "lmu", ctx.structures())


@register("correct-ctx", "sabotage formulas and their context translations agree")
def _correct_ctx(ctx: TaskContext):
    f = ctx.formula(Fragment.GLS)
    ctx.agree(f, "gls", ctx_formula(f), "rlgl", ctx.structures())


@register("correct-natural", "right-linear formulas and their sabotage counterparts agree")
def _correct_natural(ctx: TaskContext):
    f = ctx.formula(Fragment.RLGL)
    ctx.agree(f, "rlgl", natural(f), "gls", ctx.structures())


@register("correct-sep", "separable fixpoints and their iterations agree")
def _correct_sep(ctx: TaskContext):
    f = ctx.formula(Fragment.LSEP)
    ctx.agree(f, "lmu", sep_to_star(f), "lstar", ctx.structures())


@register("roundtrip-sharp-flat", "FLC formulas survive a game logic round trip")
def _roundtrip_sharp_flat(ctx: TaskContext):
    f = ctx.formula("flc")
    ctx.agree(f, "flc", flat(sharp_formula(f)), "flc", ctx.structures())


@register("roundtrip-flat-sharp", "recursive game logic formulas survive an FLC round trip")
def _roundtrip_flat_sharp(ctx: TaskContext):
    f = ctx.formula(Fragment.RGL)
    ctx.agree(f, "rgl", sharp_formula(flat(f)), "rgl", ctx.structures())


# Proof calculi

_FLC_SCHEMAS = {SchemaId.FP, SchemaId.ALPHA, SchemaId.MU_RULE, SchemaId.MON_A}
_KOZEN_SCHEMAS = {SchemaId.BOX_AND, SchemaId.K, SchemaId.BOX_TOP}
_RGL_SCHEMAS = {SchemaId.G_FP, SchemaId.G_ALPHA, SchemaId.G_MU_RULE, SchemaId.G_NU_RULE}
SIDE_CONDITION_ATTEMPTS = 20


def _soundness_logic(schema_id: SchemaId, flc: bool, traps: bool) -> str:
    if schema_id in _FLC_SCHEMAS or flc:
        return "flc"
    if schema_id in _RGL_SCHEMAS or schema_id in _KOZEN_SCHEMAS or not traps:
        return "rgl"
    return "gls"


def _sample(ctx: TaskContext, sampler: InstantiationSampler, schema_id: SchemaId, flc: bool):
    for _ in range(SIDE_CONDITION_ATTEMPTS):
        inst = sampler.sample(schema_id, flc)
        if check_side_condition(schema_id, inst) is None:
            return inst
    raise Skip(f"no instantiation of {schema_id.value} met its side condition")


AXIOM_SCHEMAS = tuple(s for s in InstantiationSampler(None).schemas if not schema(s).is_rule)
RULE_SCHEMAS = tuple(s for s in InstantiationSampler(None).schemas if schema(s).is_rule)


@register("axiom-soundness", "every sampled axiom instance is valid")
def _axiom_soundness(ctx: TaskContext):
    schema_id = AXIOM_SCHEMAS[ctx.index % len(AXIOM_SCHEMAS)]
    flc = (schema_id in _KOZEN_SCHEMAS or schema_id is SchemaId.TAUT) and ctx.index % 2 == 0
    sampler = InstantiationSampler(ctx.rng)
    inst = _sample(ctx, sampler, schema_id, flc)
    formula = instantiate_schema(schema_id, inst, flc=flc)
    ctx.subject = f"{schema_id.value}: {to_text(formula)}"
    logic = _soundness_logic(schema_id, flc, traps=True)
    kripke_only = schema_id in _KOZEN_SCHEMAS
    for structure in ctx.structures(kripke_only=kripke_only, games=SCHEMA_GAMES):
        if ctx.truth(formula, logic, structure) != structure.full:
            raise Mismatch(f"{schema_id.value} instance is not valid", structure)


@register("rule-soundness", "rules preserve validity on every sampled structure")
def _rule_soundness(ctx: TaskContext):
    schema_id = RULE_SCHEMAS[ctx.index % len(RULE_SCHEMAS)]
    flc = schema_id is SchemaId.MP and ctx.index % 2 == 0
    sampler = InstantiationSampler(ctx.rng, traps=())
    inst = _sample(ctx, sampler, schema_id, flc)
    rule = instantiate_schema(schema_id, inst, flc=flc)
    ctx.subject = f"{schema_id.value}: {to_text(rule.conclusion)}"
    logic = _soundness_logic(schema_id, flc, traps=False)
    for structure in ctx.structures(games=SCHEMA_GAMES):
        full = structure.full
        if all(ctx.truth(p, logic, structure) == full for p in rule.premises):
            if ctx.truth(rule.conclusion, logic, structure) != full:
                raise Mismatch(f"{schema_id.value} conclusion fails under valid premises",
                               structure)


# Poison game

def _small_graphs() -> List[Digraph]:
    graphs = []
    for n in (1, 2, 3):
        pairs = [(s, t) for s in range(n) for t in range(n)]
        for mask in range(1 << len(pairs)):
            graphs.append(Digraph(n, frozenset(p for i, p in enumerate(pairs) if mask >> i & 1)))
    return graphs


SMALL_GRAPHS = _small_graphs()


@register("poison-agreement", "the poison formula's truth set is Angel's winning region")
def _poison_agreement(ctx: TaskContext):
    if ctx.index < len(SMALL_GRAPHS):
        graph = SMALL_GRAPHS[ctx.index]
    else:
        graph = random_digraph(4, rng=ctx.rng)
    ctx.subject = f"{graph.n} vertices, edges {sorted(graph.edges)}"
    formula, structure = poison_build(graph)
    budget = {k: v for k, v in ctx.options.items() if k in ("cap", "budget")}
    truth = gls_truth(formula, structure, **budget)
    winners = poison_oracle(graph)
    if truth != winners:
        raise Mismatch(f"formula {truth:#b}, oracle {winners:#b}", structure)


# Runner

@dataclass
class CampaignReport:
    """Outcome counts of one property run, plus metrics and a resource snapshot"""
    prop: str
    seed: int
    tasks: int
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    first_failure: Optional[Dict[str, Any]] = None
    metrics: Dict[str, Any] = field(default_factory=dict)
    resources: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def results(self) -> Dict[str, Any]:
        """The seed-determined part of the report"""
        return {
            "property": self.prop,
            "seed": self.seed,
            "tasks": self.tasks,
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped,
            "first_failure": self.first_failure,
        }

    def to_dict(self) -> Dict[str, Any]:
        report = self.results()
        report["ok"] = self.ok
        report["metrics"] = self.metrics
        report["resources"] = self.resources
        return report


class CampaignRunner:
    """
    Runs registered properties with:
    - a thread pool of `workers` evaluators
    - a semaphore bounding tasks in flight
    - index-ordered reduction of task outcomes
    """

    def __init__(self, config: Optional[WorkbenchConfig] = None,
                 monitor: Optional[CampaignMonitor] = None):
        self.config = config or WorkbenchConfig()
        self.monitor = monitor or CampaignMonitor()
        self.logger = logging.getLogger(__name__)
        self.options = self.config.semantics.evaluator_options()

    def run_task(self, prop: CampaignProperty, index: int, settings: CampaignConfig) -> TaskOutcome:
        ctx = TaskContext(index, settings, self.options)
        try:
            prop.check(ctx)
        except Mismatch as e:
            detail = str(e)
            if e.structure is not None:
                detail += "\n" + dump_structure(e.structure)
            return TaskOutcome(index, "fail", ctx.subject, detail)
        except (Skip,) + SKIPPED_ERRORS as e:
            return TaskOutcome(index, "skip", ctx.subject, str(e))
        except WorkbenchError as e:
            return TaskOutcome(index, "fail", ctx.subject, f"{type(e).__name__}: {e}")
        return TaskOutcome(index, "pass", ctx.subject)

    async def run(self, name: str, count: Optional[int] = None,
                  seed: Optional[int] = None) -> CampaignReport:
        """Run `count` tasks of property `name`

        Raises:
            CampaignError: unknown property
        """
        prop = get_property(name)
        settings = self.config.campaign
        if seed is not None:
            settings = settings.model_copy(update={"seed": seed})
        total = settings.formulas if count is None else count
        if total < 1:
            raise CampaignError("a campaign needs at least one task")
        self.monitor.start(name, settings.workers, settings.max_in_flight)
        self.logger.info(f"Running {name} with seed {settings.seed}: {total} tasks")
        semaphore = asyncio.Semaphore(settings.max_in_flight)
        loop = asyncio.get_running_loop()

        with ThreadPoolExecutor(max_workers=settings.workers) as executor:
            async def one(index: int) -> TaskOutcome:
                async with semaphore:
                    started = time.perf_counter()
                    outcome = await loop.run_in_executor(
                        executor, self.run_task, prop, index, settings)
                    self.monitor.record_task(name, outcome.passed, time.perf_counter() - started)
                    if outcome.status == "skip":
                        self.monitor.record_error(name, "skipped")
                    return outcome

            outcomes = await asyncio.gather(*(one(i) for i in range(total)))

        report = self._reduce(name, settings.seed, outcomes)
        report.metrics = self.monitor.get_metrics()
        report.resources = self.monitor.resource_snapshot()
        level = logging.INFO if report.ok else logging.WARNING
        self.logger.log(level, f"{name}: {report.passed} passed, {report.failed} failed, "
                               f"{report.skipped} skipped")
        if settings.report_path:
            await self.monitor.export_report(report.to_dict(), settings.report_path)
        return report

    def _reduce(self, name: str, seed: int, outcomes: Sequence[TaskOutcome]) -> CampaignReport:
        report = CampaignReport(name, seed, len(outcomes))
        for outcome in sorted(outcomes, key=lambda o: o.index):
            if outcome.status == "pass":
                report.passed += 1
            elif outcome.status == "skip":
                report.skipped += 1
            else:
                report.failed += 1
                if report.first_failure is None:
                    report.first_failure = {
                        "task": outcome.index,
                        "subject": outcome.subject,
                        "detail": outcome.detail,
                    }
        return report


def run_campaign(name: str, config: Optional[WorkbenchConfig] = None,
                 count: Optional[int] = None, seed: Optional[int] = None) -> CampaignReport:
    """Synchronous entry point around CampaignRunner.run"""
    return asyncio.run(CampaignRunner(config).run(name, count, seed))
