"""
Translations between fixpoint logic with chop, recursive game logic and
sabotage game logic, plus elimination of simultaneous fixpoints
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

from .exceptions import NotRightLinear, NotSeparable, ReservedNameClash, UnsupportedConstruct
from .fragments import Fragment, check_fragment, is_right_linear, separable_split
from .rewrite import complement, desugar_star, normal_form, rename_bound, substitute
from .terms import (
    MARKER_U, MARKER_V, And, Atom, Bot, Box, Chop, Choice, CoRec, DChoice, Dia, DStar,
    DStarFix, DTest, Diamond, DualAtom, FAnd, FBot, FixKind, FNegProp, FOr, FProp, FTop,
    FVar, FlcExpr, FormExpr, GameExpr, Id, Mu, NegProp, Nu, Or, Prop, Rec, RecSystem,
    Seq, Star, StarFix, Test, Top, TrapA, TrapD, Var, map_children, names_in, size,
)


logger = logging.getLogger(__name__)


@dataclass
class TranslationReport:
    """Size and timing record of one translation run"""
    translation: str
    input_size: int
    output_size: int
    elapsed: float
    expansion: Dict[str, float] = field(default_factory=dict)
    # log10 of the admissible output size, when the translation has one
    ceiling: Optional[float] = None

    @property
    def ratio(self) -> float:
        return self.output_size / self.input_size

    @property
    def within_ceiling(self) -> Optional[bool]:
        if self.ceiling is None:
            return None
        return math.log10(self.output_size) <= self.ceiling

    def as_lines(self) -> List[str]:
        lines = [
            f"translation={self.translation}",
            f"input_size={self.input_size}",
            f"output_size={self.output_size}",
            f"ratio={self.ratio:.3f}",
            f"elapsed={self.elapsed:.6f}",
        ]
        for label, factor in sorted(self.expansion.items()):
            lines.append(f"expansion.{label}={factor:.3f}")
        if self.ceiling is not None:
            lines.append(f"ceiling_log10={self.ceiling:.3f}")
            lines.append(f"within_ceiling={'yes' if self.within_ceiling else 'no'}")
        return lines

    def to_dict(self) -> Dict:
        return {
            "translation": self.translation,
            "input_size": self.input_size,
            "output_size": self.output_size,
            "ratio": self.ratio,
            "elapsed": self.elapsed,
            "expansion": dict(self.expansion),
            "ceiling": self.ceiling,
            "within_ceiling": self.within_ceiling,
        }


def with_report(name: str, translate: Callable, expr, *args,
                ceiling: Optional[float] = None, **kwargs):
    """Run a translation and return (output, TranslationReport)

    Expansion factors are read from the translator object when `translate`
    is a bound method of one (see contexts.ContextTranslator).
    """
    started = time.perf_counter()
    output = translate(expr, *args, **kwargs)
    elapsed = time.perf_counter() - started
    owner = getattr(translate, "__self__", None)
    expansion = dict(getattr(owner, "expansion", {}) or {})
    report = TranslationReport(name, size(expr), size(output), elapsed, expansion, ceiling)
    logger.info(f"{name}: {report.input_size} -> {report.output_size} nodes in {elapsed:.4f}s")
    if report.within_ceiling is False:
        logger.warning(f"{name}: output size {report.output_size} exceeds 10^{ceiling:.3f}")
    return output, report


# FLC to recursive game logic

def sharp(f: FlcExpr) -> GameExpr:
    """Game whose effectivity function is the denotation of `f`"""
    if isinstance(f, Id):
        return Test(Top())
    if isinstance(f, FTop):
        return Seq(Test(Top()), DTest(Bot()))
    if isinstance(f, FBot):
        return Test(Bot())
    if isinstance(f, FProp):
        return Seq(Test(Prop(f.name)), DTest(Bot()))
    if isinstance(f, FNegProp):
        return Seq(Test(NegProp(f.name)), DTest(Bot()))
    if isinstance(f, FOr):
        return Choice(sharp(f.left), sharp(f.right))
    if isinstance(f, FAnd):
        return DChoice(sharp(f.left), sharp(f.right))
    if isinstance(f, Dia):
        return Seq(Atom(f.atom), sharp(f.body))
    if isinstance(f, Box):
        return Seq(DualAtom(f.atom), sharp(f.body))
    if isinstance(f, Mu):
        return Rec(f.var, sharp(f.body))
    if isinstance(f, Nu):
        return CoRec(f.var, sharp(f.body))
    if isinstance(f, FVar):
        return Var(f.name)
    if isinstance(f, Chop):
        return Seq(sharp(f.left), sharp(f.right))
    if isinstance(f, StarFix):
        return Star(sharp(f.body))
    if isinstance(f, DStarFix):
        return DStar(sharp(f.body))
    raise UnsupportedConstruct(f"{type(f).__name__} is not an FLC formula")


def sharp_formula(f: FlcExpr) -> FormExpr:
    """Formula true exactly where `f` holds at the empty set"""
    return Diamond(sharp(f), Bot())


# Recursive game logic to FLC

def _check_markers(expr):
    clash = {MARKER_U, MARKER_V} & set(names_in(expr))
    if clash:
        raise ReservedNameClash(f"input uses reserved marker names {sorted(clash)}")


def _prepare(expr):
    return rename_bound(bekic_eliminate_all(desugar_star(normal_form(expr))))


def flat(expr):
    """FLC formula for a recursive game logic formula or game

    Games translate to formulas with the free markers u and v standing for
    the continuation.
    """
    _check_markers(expr)
    prepared = _prepare(expr)
    if isinstance(prepared, FormExpr):
        return _flat_form(prepared)
    return _flat_game(prepared)


_U = FVar(MARKER_U)
_V = FVar(MARKER_V)


def _continue(f, replacement):
    return substitute(f, {MARKER_U: replacement, MARKER_V: replacement})


def _flat_form(f):
    if isinstance(f, Top):
        return FTop()
    if isinstance(f, Bot):
        return FBot()
    if isinstance(f, Prop):
        return FProp(f.name)
    if isinstance(f, NegProp):
        return FNegProp(f.name)
    if isinstance(f, Or):
        return FOr(_flat_form(f.left), _flat_form(f.right))
    if isinstance(f, And):
        return FAnd(_flat_form(f.left), _flat_form(f.right))
    if isinstance(f, Diamond):
        return _continue(_flat_game(f.game), _flat_form(f.body))
    raise UnsupportedConstruct(f"{type(f).__name__} is not a normal-form formula")


def _flat_game(g):
    if isinstance(g, Atom):
        return Dia(g.name, _U)
    if isinstance(g, DualAtom):
        return Box(g.name, _U)
    if isinstance(g, Test):
        return FAnd(_flat_form(g.body), _U)
    if isinstance(g, DTest):
        return FOr(_flat_form(complement(g.body)), _U)
    if isinstance(g, Choice):
        return FOr(_flat_game(g.left), _flat_game(g.right))
    if isinstance(g, DChoice):
        return FAnd(_flat_game(g.left), _flat_game(g.right))
    if isinstance(g, Var):
        return Chop(FVar(g.name), _V)
    if isinstance(g, Seq):
        return _continue(_flat_game(g.left), _flat_game(g.right))
    if isinstance(g, (Rec, CoRec)):
        binder = Mu if isinstance(g, Rec) else Nu
        return Chop(binder(g.var, _continue(_flat_game(g.body), Id())), _U)
    raise UnsupportedConstruct(f"{type(g).__name__} cannot be flattened")


def qflat(expr):
    """Modal mu-calculus formula for a closed right-linear game logic formula or game

    Raises:
        NotRightLinear: a fixpoint variable occurs left of a composition
    """
    _check_markers(expr)
    prepared = _prepare(expr)
    if not is_right_linear(prepared):
        raise NotRightLinear("qflat needs a right-linear input")
    if isinstance(prepared, FormExpr):
        return _qflat_form(prepared)
    return _qflat_game(prepared)


def _qflat_form(f):
    if isinstance(f, Diamond):
        return substitute(_qflat_game(f.game), {MARKER_U: _qflat_form(f.body)})
    if isinstance(f, Or):
        return FOr(_qflat_form(f.left), _qflat_form(f.right))
    if isinstance(f, And):
        return FAnd(_qflat_form(f.left), _qflat_form(f.right))
    return _flat_form(f)


def _qflat_game(g):
    if isinstance(g, Atom):
        return Dia(g.name, _U)
    if isinstance(g, DualAtom):
        return Box(g.name, _U)
    if isinstance(g, Test):
        return FAnd(_qflat_form(g.body), _U)
    if isinstance(g, DTest):
        return FOr(_qflat_form(complement(g.body)), _U)
    if isinstance(g, Choice):
        return FOr(_qflat_game(g.left), _qflat_game(g.right))
    if isinstance(g, DChoice):
        return FAnd(_qflat_game(g.left), _qflat_game(g.right))
    if isinstance(g, Var):
        return FVar(g.name)
    if isinstance(g, Seq):
        return substitute(_qflat_game(g.left), {MARKER_U: _qflat_game(g.right)})
    if isinstance(g, Rec):
        return Mu(g.var, _qflat_game(g.body))
    if isinstance(g, CoRec):
        return Nu(g.var, _qflat_game(g.body))
    raise UnsupportedConstruct(f"{type(g).__name__} cannot be flattened")


# Separable mu-calculus to L*

def sep_to_star(f: FlcExpr) -> FlcExpr:
    """Rewrite separable fixpoints as iterations

    Raises:
        NotSeparable: a fixpoint is not of the separable shape
    """
    if isinstance(f, (Chop, Id, StarFix, DStarFix)):
        raise NotSeparable(f"{type(f).__name__} is outside the modal mu-calculus")
    if isinstance(f, (Mu, Nu)):
        split = separable_split(f)
        if split is None:
            raise NotSeparable(f"fixpoint on {f.var} is not separable")
        psi, rho = split
        iterated = substitute(sep_to_star(psi), {f.var: Id()})
        iteration = StarFix if isinstance(f, Mu) else DStarFix
        return Chop(iteration(iterated), sep_to_star(rho))
    return map_children(f, sep_to_star)


# Simultaneous fixpoints

def _fix(kind: FixKind, var: str, body):
    return Rec(var, body) if kind is FixKind.MU else CoRec(var, body)


def _solve(kind: FixKind, variables: Sequence[str], bodies: Sequence) -> List:
    """Closed-form solutions for every component, last variable eliminated first"""
    if len(variables) == 1:
        return [_fix(kind, variables[0], bodies[0])]
    last_var, last_body = variables[-1], bodies[-1]
    last = _fix(kind, last_var, last_body)
    reduced = [substitute(b, {last_var: last}) for b in bodies[:-1]]
    solutions = _solve(kind, variables[:-1], reduced)
    final = substitute(last, dict(zip(variables[:-1], solutions)))
    return solutions + [final]


def bekic_eliminate(system: RecSystem, index: int = None):
    """Nested single-variable fixpoint equal to one component of a system"""
    chosen = system.index if index is None else index
    return _solve(system.kind, system.variables, system.bodies)[chosen]


def bekic_eliminate_all(expr):
    """Remove every simultaneous fixpoint, innermost first"""
    def go(node):
        node = map_children(node, go)
        if isinstance(node, RecSystem):
            return bekic_eliminate(node)
        return node
    return go(expr)


# Right-linear game logic to sabotage game logic

_NATURAL_PREFIXES = ("b_", "c_")


def natural(expr):
    """Sabotage game logic counterpart of a right-linear game logic formula or game

    Every fixpoint variable x gets fresh atomic games b_x and c_x whose
    ownership forces the repetition to follow the recursion.

    Raises:
        NotRightLinear: the input is not right-linear
        ReservedNameClash: the input already uses a b_ or c_ name
    """
    clash = sorted(n for n in names_in(expr) if n.startswith(_NATURAL_PREFIXES))
    if clash:
        raise ReservedNameClash(f"input uses reserved names {clash}")
    prepared = rename_bound(bekic_eliminate_all(normal_form(expr)))
    if not check_fragment(prepared, Fragment.RLGL):
        raise NotRightLinear("natural needs a right-linear game logic input")
    return _natural(prepared)


def _natural(expr):
    if isinstance(expr, (Rec, CoRec)):
        b, c = f"b_{expr.var}", f"c_{expr.var}"
        delta = Seq(TrapD(b), TrapA(c))
        delta_dual = Seq(TrapA(b), TrapD(c))
        body = _natural(expr.body)
        if isinstance(expr, Rec):
            loop = Seq(Atom(c), Seq(delta_dual, substitute(body, {expr.var: delta})))
            return Seq(delta, Seq(Star(loop), Atom(b)))
        loop = Seq(DualAtom(c), Seq(delta, substitute(body, {expr.var: delta_dual})))
        return Seq(delta_dual, Seq(DStar(loop), DualAtom(b)))
    return map_children(expr, _natural)


def translation_for(source: str, target: str):
    """Resolve a (source, target) logic pair to a translation callable"""
    from .contexts import ctx_formula

    table = {
        ("flc", "rgl"): sharp_formula,
        ("lmu", "rlgl"): sharp_formula,
        ("lstar", "gl"): sharp_formula,
        ("rgl", "flc"): flat,
        ("rlgl", "lmu"): qflat,
        ("gl", "lmu"): qflat,
        ("gls", "rlgl"): ctx_formula,
        ("rlgl", "gls"): natural,
        ("lsep", "lstar"): sep_to_star,
        ("lmu", "lstar"): sep_to_star,
    }
    try:
        return table[(source.lower(), target.lower())]
    except KeyError:
        raise UnsupportedConstruct(f"no translation from {source} to {target}")
