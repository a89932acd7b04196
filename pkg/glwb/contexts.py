"""
Context-indexed translation from sabotage game logic into right-linear
recursive game logic

Each context e gets a free game variable y_ctx_<index of e> that marks the
end of a translated game reached in context e. Stars become simultaneous
fixpoints over every context their body can reach.
"""

import logging
import math
from itertools import product
from typing import Dict, Iterable, List, Optional

from .exceptions import BudgetExceeded, UnboundVariable, UnsupportedConstruct
from .fragments import star_depth
from .rewrite import atoms, complement, normal_form, sabotage_atoms, substitute
from .sabotage import ContextSpace, Ctx, Ownership
from .translate import bekic_eliminate_all, with_report
from .terms import (
    And, Atom, Bot, Choice, CoRec, DChoice, DStar, DTest, Diamond, DualAtom, FixKind,
    FormExpr, FreshNames, NegProp, Or, Prop, Rec, RecSystem, Seq, Star, Test, Top,
    TrapA, TrapD, Var, names_in, size,
)


logger = logging.getLogger(__name__)

DEFAULT_CONTEXT_BUDGET = 729
DEFAULT_BLOWUP_CONSTANT = 8
CONTEXT_PREFIX = "y_ctx_"


def context_variable(index: int) -> str:
    return f"{CONTEXT_PREFIX}{index}"


class ContextTranslator:
    """
    Translator over a fixed context alphabet with:
    - one marker variable per context
    - a budget on the contexts enumerated for a single star
    - per-star expansion factors for reporting
    """

    def __init__(self, alphabet: Iterable[str], budget: int = DEFAULT_CONTEXT_BUDGET,
                 fresh: Optional[FreshNames] = None, avoid: Iterable[str] = ()):
        self.space = ContextSpace(alphabet)
        self.budget = budget
        self.fresh = fresh or FreshNames()
        self.avoid = set(avoid)
        self.expansion: Dict[str, float] = {}
        self.logger = logging.getLogger(__name__)

    def marker(self, index: int) -> Var:
        return Var(context_variable(index))

    def formula(self, f, ctx: int = 0):
        """Closed game whose value at the empty goal is the truth set of `f` in context `ctx`"""
        if isinstance(f, Top):
            return Seq(Test(Top()), DTest(Bot()))
        if isinstance(f, Bot):
            return Test(Bot())
        if isinstance(f, (Prop, NegProp)):
            return Seq(Test(f), DTest(Bot()))
        if isinstance(f, Or):
            return Choice(self.formula(f.left, ctx), self.formula(f.right, ctx))
        if isinstance(f, And):
            return DChoice(self.formula(f.left, ctx), self.formula(f.right, ctx))
        if isinstance(f, Diamond):
            game = self.game(f.game, ctx)
            return self._continue(game, lambda e: Seq(self.formula(f.body, e), Test(Bot())))
        raise UnsupportedConstruct(f"{type(f).__name__} is not a normal-form formula")

    def game(self, g, ctx: int = 0):
        """Game with free context markers, equal to `g` played from context `ctx`"""
        space = self.space
        if isinstance(g, Atom):
            owner = space.owner(ctx, g.name)
            if owner is Ownership.NEITHER:
                return Seq(g, self.marker(ctx))
            if owner is Ownership.ANGEL:
                return self.marker(ctx)
            return Test(Bot())
        if isinstance(g, DualAtom):
            owner = space.owner(ctx, g.name)
            if owner is Ownership.NEITHER:
                return Seq(g, self.marker(ctx))
            if owner is Ownership.ANGEL:
                return DTest(Bot())
            return self.marker(ctx)
        if isinstance(g, TrapA):
            return self.marker(space.assign(ctx, g.name, Ownership.ANGEL))
        if isinstance(g, TrapD):
            return self.marker(space.assign(ctx, g.name, Ownership.DEMON))
        if isinstance(g, Test):
            return DChoice(self.formula(g.body, ctx), self.marker(ctx))
        if isinstance(g, DTest):
            return Choice(self.formula(complement(g.body), ctx), self.marker(ctx))
        if isinstance(g, Choice):
            return Choice(self.game(g.left, ctx), self.game(g.right, ctx))
        if isinstance(g, DChoice):
            return DChoice(self.game(g.left, ctx), self.game(g.right, ctx))
        if isinstance(g, Seq):
            return self._continue(self.game(g.left, ctx), lambda e: self.game(g.right, e))
        if isinstance(g, (Star, DStar)):
            return self._iteration(g, ctx)
        if isinstance(g, Var):
            raise UnboundVariable(f"variable {g.name} in a sabotage game")
        if isinstance(g, (Rec, CoRec, RecSystem)):
            raise UnsupportedConstruct("recursion is not part of sabotage game logic")
        raise UnsupportedConstruct(f"{type(g).__name__} is not a normal-form game")

    def _continue(self, game, follow):
        """Replace every marker y_e of `game` by follow(e)"""
        assignment = {}
        for name in names_in(game):
            if name.startswith(CONTEXT_PREFIX):
                index = int(name[len(CONTEXT_PREFIX):])
                assignment[name] = follow(index)
        return substitute(game, assignment)

    def relevant_contexts(self, g, ctx: int) -> List[int]:
        """Contexts that may only own atoms owned in `ctx` or trapped inside `g`"""
        space = self.space
        relevant = set(space.context(ctx)) | (set(sabotage_atoms(g)) & set(space.alphabet))
        ordered = [a for a in space.alphabet if a in relevant]
        count = 3 ** len(ordered)
        if count > self.budget:
            raise BudgetExceeded(
                f"star over {len(ordered)} relevant atoms needs {count} contexts, budget {self.budget}"
            )
        if count * 2 > self.budget:
            self.logger.warning(f"star needs {count} of {self.budget} budgeted contexts")
        contexts = []
        for owners in product(Ownership, repeat=len(ordered)):
            contexts.append(space.index(dict(zip(ordered, owners))))
        return contexts

    def _iteration(self, g, ctx: int):
        contexts = self.relevant_contexts(g, ctx)
        fix = {e: self.fresh.fresh("z_fix", avoid=self.avoid) for e in contexts}
        self.avoid.update(fix.values())
        joins = Choice if isinstance(g, Star) else DChoice
        bodies = []
        for e in contexts:
            loop = self._continue(self.game(g.body, e), lambda target: Var(fix[target]))
            bodies.append(joins(self.marker(e), loop))
        kind = FixKind.MU if isinstance(g, Star) else FixKind.NU
        system = RecSystem(kind, tuple(fix[e] for e in contexts), tuple(bodies),
                           contexts.index(ctx))
        label = f"star_{len(self.expansion)}"
        self.expansion[label] = size(system) / size(g)
        self.logger.debug(f"{label}: {len(contexts)} contexts, expansion {self.expansion[label]:.2f}")
        return system

    def translate(self, expr, ctx: Optional[Ctx] = None, eliminate_bekic: bool = False):
        """Normalize and translate a formula or game from an initial context"""
        prepared = normal_form(expr)
        start = self.space.index(ctx or {})
        if isinstance(prepared, FormExpr):
            result = self.formula(prepared, start)
        else:
            result = self.game(prepared, start)
        if eliminate_bekic:
            result = bekic_eliminate_all(result)
        return result

    def translate_formula(self, f, eliminate_bekic: bool = False) -> FormExpr:
        return Diamond(self.translate(f, None, eliminate_bekic), Bot())


def translator_for(expr, ctx: Optional[Ctx] = None, alphabet: Optional[Iterable[str]] = None,
                   budget: int = DEFAULT_CONTEXT_BUDGET) -> ContextTranslator:
    """Translator whose alphabet covers the trapped atoms of `expr` and the keys of `ctx`"""
    if alphabet is None:
        alphabet = set(sabotage_atoms(expr)) | set((ctx or {}).keys())
    return ContextTranslator(alphabet, budget, avoid=names_in(expr))


def ctx_translate(expr, ctx: Optional[Ctx] = None, alphabet: Optional[Iterable[str]] = None,
                  budget: int = DEFAULT_CONTEXT_BUDGET, eliminate_bekic: bool = False):
    """Right-linear game for a sabotage formula or game played from context `ctx`

    Formulas translate to closed games; games keep free y_ctx_ markers.

    Raises:
        BudgetExceeded: a star needs more contexts than `budget`
    """
    return translator_for(expr, ctx, alphabet, budget).translate(expr, ctx, eliminate_bekic)


def ctx_formula(f, budget: int = DEFAULT_CONTEXT_BUDGET, eliminate_bekic: bool = False) -> FormExpr:
    """Recursive game logic formula with the truth set of `f` in the empty context"""
    return translator_for(f, budget=budget).translate_formula(f, eliminate_bekic)


def ctx_formula_with_report(f, budget: int = DEFAULT_CONTEXT_BUDGET, eliminate_bekic: bool = False,
                            blowup_constant: int = DEFAULT_BLOWUP_CONSTANT):
    """ctx_formula plus a TranslationReport carrying per-star expansion and the size ceiling"""
    translator = translator_for(f, budget=budget)
    return with_report("gls->rlgl", translator.translate_formula, f,
                       ceiling=blowup_ceiling(f, blowup_constant), eliminate_bekic=eliminate_bekic)


def marker_valuation(space: ContextSpace, values) -> Dict[str, object]:
    """Valuation of the y_ctx_ markers from a state set per context"""
    return {context_variable(c): values[c] for c in space.indices()}


def blowup_ceiling(game, constant: int = DEFAULT_BLOWUP_CONSTANT) -> float:
    """log10 of (C * |game|) ** (3**l tetrated k times)

    l counts the atomic games of `game` and k is its star nesting depth;
    returns infinity once the tower exceeds float range.
    """
    base = 3 ** len(atoms(game))
    tower = 1
    for _ in range(star_depth(game)):
        if tower > 1024:
            return math.inf
        tower = base ** tower
    exponent = float(tower) if tower < 10 ** 300 else math.inf
    return exponent * math.log10(constant * size(game))
