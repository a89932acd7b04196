"""
Model checking for recursive game logic and fixpoint logic with chop

Both evaluators have two engines:
- the function-lattice engine computes effectivity tables and takes
  fixpoints in the pointwise order of effectivity functions;
- the pointwise engine evaluates a game at one goal set and takes
  fixpoints of state sets, which is exact for right-linear fixpoints
  (FLC: no free variable left of a chop or inside an iteration).
"""

import logging
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple, Union

from .exceptions import CapExceeded, NonMonotoneDetected, UnboundVariable, UnsupportedConstruct
from .fragments import is_right_linear
from .lattice import (
    Constant, Effectivity, StateSet, all_sets, gfp_eff, gfp_set, kleene, lfp_eff, lfp_set,
    mask_tuple_leq, tuple_leq,
)
from .rewrite import desugar_star, free_vars, normal_form
from .structures import DEFAULT_STATE_CAP, FiniteStructure, lift_game
from .terms import (
    And, Atom, Bot, Box, Chop, Choice, CoRec, DChoice, Dia, DStar, DStarFix, DTest,
    Diamond, DualAtom, FAnd, FBot, FixKind, FlcExpr, FNegProp, FOr, FProp, FTop, FVar,
    Id, Mu, NegProp, Nu, Or, Prop, Rec, RecSystem, Seq, Star, StarFix, Test, Top,
    TrapA, TrapD, Var, walk,
)


logger = logging.getLogger(__name__)

Pointwise = Union[Effectivity, Constant, Callable[[StateSet], StateSet]]


class RglEvaluator:
    """
    Evaluator for recursive game logic with:
    - extensional effectivity tables (reference semantics)
    - pointwise evaluation of right-linear fixpoints
    - lazy relational steps that never build tables
    """

    def __init__(self, structure: FiniteStructure, cap: int = DEFAULT_STATE_CAP,
                 fast_path: bool = True, check_monotone: bool = False):
        self.structure = structure
        self.cap = cap
        self.fast_path = fast_path
        self.check_monotone = check_monotone
        self.n = structure.n
        self.full = structure.full
        self.logger = logging.getLogger(__name__)
        self._closed_tables: Dict = {}
        self._closed_truth: Dict = {}
        self._linear: Dict = {}

    # Formulas

    def formula(self, f, valuation: Optional[Mapping[str, Pointwise]] = None) -> StateSet:
        return self._formula(f, dict(valuation or {}))

    def _formula(self, f, valuation) -> StateSet:
        closed = not valuation or not free_vars(f)
        if closed and f in self._closed_truth:
            return self._closed_truth[f]
        result = self._formula_uncached(f, valuation)
        if closed:
            self._closed_truth[f] = result
        return result

    def _formula_uncached(self, f, valuation) -> StateSet:
        if isinstance(f, Top):
            return self.full
        if isinstance(f, Bot):
            return 0
        if isinstance(f, Prop):
            return self.structure.prop(f.name)
        if isinstance(f, NegProp):
            return self.full ^ self.structure.prop(f.name)
        if isinstance(f, Or):
            return self._formula(f.left, valuation) | self._formula(f.right, valuation)
        if isinstance(f, And):
            return self._formula(f.left, valuation) & self._formula(f.right, valuation)
        if isinstance(f, Diamond):
            goal = self._formula(f.body, valuation)
            if self.fast_path:
                return self.game_at(f.game, valuation, goal)
            return self.game_table(f.game, self._tables(valuation, f.game))(goal)
        raise UnsupportedConstruct(f"{type(f).__name__} is not a normal-form formula")

    # Function-lattice engine

    def _require_cap(self):
        if self.n > self.cap:
            raise CapExceeded(f"{self.n} states exceed the state cap {self.cap}")

    def _tables(self, valuation, expr) -> Dict[str, Effectivity]:
        tables = {}
        for var in free_vars(expr):
            value = valuation.get(var)
            if value is None:
                raise UnboundVariable(f"variable {var} has no interpretation")
            if not isinstance(value, Effectivity):
                value = Effectivity.from_function(self.n, value)
            tables[var] = value
        return tables

    def game_table(self, g, valuation: Optional[Mapping[str, Effectivity]] = None) -> Effectivity:
        """Effectivity table of a normal-form game"""
        self._require_cap()
        valuation = dict(valuation or {})
        if not free_vars(g):
            cached = self._closed_tables.get(g)
            if cached is None:
                cached = self._table(g, {})
                self._closed_tables[g] = cached
            return cached
        return self._table(g, valuation)

    def _table(self, g, valuation: Dict[str, Effectivity]) -> Effectivity:
        n = self.n
        if isinstance(g, Atom):
            return lift_game(self.structure, g.name, self.cap)
        if isinstance(g, DualAtom):
            return lift_game(self.structure, g.name, self.cap).dual()
        if isinstance(g, Var):
            if g.name not in valuation:
                raise UnboundVariable(f"variable {g.name} has no interpretation")
            return valuation[g.name]
        if isinstance(g, Test):
            return Effectivity.test(n, self._formula(g.body, valuation))
        if isinstance(g, DTest):
            outside = self.full ^ self._formula(g.body, valuation)
            return Effectivity.trusted(n, tuple(outside | a for a in all_sets(n)))
        if isinstance(g, Choice):
            return self.game_table(g.left, valuation).union(self.game_table(g.right, valuation))
        if isinstance(g, DChoice):
            return self.game_table(g.left, valuation).intersection(self.game_table(g.right, valuation))
        if isinstance(g, Seq):
            return self.game_table(g.left, valuation).compose(self.game_table(g.right, valuation))
        if isinstance(g, Star):
            body = self.game_table(g.body, valuation)
            ident = Effectivity.identity(n)
            return self._checked(lfp_eff(lambda u: body.compose(u).union(ident), n))
        if isinstance(g, DStar):
            body = self.game_table(g.body, valuation)
            ident = Effectivity.identity(n)
            return self._checked(gfp_eff(lambda u: body.compose(u).intersection(ident), n))
        if isinstance(g, (Rec, CoRec)):
            def operator(u, var=g.var, body=g.body):
                return self._table(body, {**valuation, var: u})
            engine = lfp_eff if isinstance(g, Rec) else gfp_eff
            return self._checked(engine(operator, n))
        if isinstance(g, RecSystem):
            return self._checked(self._system_table(g, valuation)[g.index])
        if isinstance(g, (TrapA, TrapD)):
            raise UnsupportedConstruct("trap games need the sabotage evaluator")
        raise UnsupportedConstruct(f"{type(g).__name__} is not a normal-form game")

    def _system_table(self, g: RecSystem, valuation) -> Tuple[Effectivity, ...]:
        n = self.n
        k = len(g.variables)

        def step(current):
            inner = {**valuation, **dict(zip(g.variables, current))}
            return tuple(self._table(body, inner) for body in g.bodies)

        if g.kind is FixKind.MU:
            start = tuple(Effectivity.bottom(n) for _ in range(k))
        else:
            start = tuple(Effectivity.top(n) for _ in range(k))
        return kleene(step, start, tuple_leq(Effectivity.leq), g.kind is FixKind.MU, k * (n << n))

    def _checked(self, table: Effectivity) -> Effectivity:
        if self.check_monotone and not table.is_monotone():
            raise NonMonotoneDetected("fixpoint result is not monotone")
        return table

    # Pointwise engine

    def _is_linear(self, g) -> bool:
        known = self._linear.get(g)
        if known is None:
            known = is_right_linear(desugar_star(g))
            self._linear[g] = known
        return known

    def game_at(self, g, valuation: Mapping[str, Pointwise], goal: StateSet) -> StateSet:
        """Value of a normal-form game at one goal set"""
        structure = self.structure
        if isinstance(g, Atom):
            return structure.step(g.name, goal)
        if isinstance(g, DualAtom):
            return structure.dual_step(g.name, goal)
        if isinstance(g, Var):
            if g.name not in valuation:
                raise UnboundVariable(f"variable {g.name} has no interpretation")
            return valuation[g.name](goal)
        if isinstance(g, Test):
            return self._formula(g.body, valuation) & goal
        if isinstance(g, DTest):
            return (self.full ^ self._formula(g.body, valuation)) | goal
        if isinstance(g, Choice):
            return self.game_at(g.left, valuation, goal) | self.game_at(g.right, valuation, goal)
        if isinstance(g, DChoice):
            return self.game_at(g.left, valuation, goal) & self.game_at(g.right, valuation, goal)
        if isinstance(g, Seq):
            return self.game_at(g.left, valuation, self.game_at(g.right, valuation, goal))
        if isinstance(g, Star):
            return lfp_set(lambda b: goal | self.game_at(g.body, valuation, b), self.n)
        if isinstance(g, DStar):
            return gfp_set(lambda b: goal & self.game_at(g.body, valuation, b), self.n)
        if isinstance(g, (Rec, CoRec, RecSystem)):
            if self.fast_path and self._is_linear(g):
                return self._fixpoint_at(g, valuation, goal)
            return self._table(g, self._tables(valuation, g))(goal)
        if isinstance(g, (TrapA, TrapD)):
            raise UnsupportedConstruct("trap games need the sabotage evaluator")
        raise UnsupportedConstruct(f"{type(g).__name__} is not a normal-form game")

    def _fixpoint_at(self, g, valuation, goal: StateSet) -> StateSet:
        if isinstance(g, (Rec, CoRec)):
            def operator(b, var=g.var, body=g.body):
                return self.game_at(body, {**valuation, var: Constant(b)}, goal)
            engine = lfp_set if isinstance(g, Rec) else gfp_set
            return engine(operator, self.n)
        k = len(g.variables)

        def step(current):
            inner = {**valuation, **{x: Constant(b) for x, b in zip(g.variables, current)}}
            return tuple(self.game_at(body, inner, goal) for body in g.bodies)

        start = (0,) * k if g.kind is FixKind.MU else (self.full,) * k
        return kleene(step, start, mask_tuple_leq, g.kind is FixKind.MU, k * self.n)[g.index]

    def pointwise_table(self, g, valuation: Optional[Mapping[str, Pointwise]] = None) -> Effectivity:
        """Effectivity table assembled from pointwise evaluation at every goal set"""
        self._require_cap()
        valuation = dict(valuation or {})
        return Effectivity.trusted(self.n, tuple(self.game_at(g, valuation, a)
                                                 for a in all_sets(self.n)))


class FlcEvaluator:
    """
    Evaluator for fixpoint logic with chop; formulas denote effectivity
    functions and the truth set is the denotation applied to the empty set
    """

    def __init__(self, structure: FiniteStructure, cap: int = DEFAULT_STATE_CAP,
                 fast_path: bool = True, check_monotone: bool = False):
        self.structure = structure
        self.cap = cap
        self.fast_path = fast_path
        self.check_monotone = check_monotone
        self.n = structure.n
        self.full = structure.full
        self.logger = logging.getLogger(__name__)
        self._closed_tables: Dict = {}
        self._pointwise_ok: Dict = {}

    def table(self, f: FlcExpr, valuation: Optional[Mapping[str, Effectivity]] = None) -> Effectivity:
        if self.n > self.cap:
            raise CapExceeded(f"{self.n} states exceed the state cap {self.cap}")
        valuation = dict(valuation or {})
        if not free_vars(f):
            cached = self._closed_tables.get(f)
            if cached is None:
                cached = self._table(f, {})
                self._closed_tables[f] = cached
            return cached
        return self._table(f, valuation)

    def _table(self, f, valuation: Dict[str, Effectivity]) -> Effectivity:
        n = self.n
        if isinstance(f, Id):
            return Effectivity.identity(n)
        if isinstance(f, FTop):
            return Effectivity.top(n)
        if isinstance(f, FBot):
            return Effectivity.bottom(n)
        if isinstance(f, FProp):
            return Effectivity.const(n, self.structure.prop(f.name))
        if isinstance(f, FNegProp):
            return Effectivity.const(n, self.full ^ self.structure.prop(f.name))
        if isinstance(f, FVar):
            if f.name not in valuation:
                raise UnboundVariable(f"variable {f.name} has no interpretation")
            return valuation[f.name]
        if isinstance(f, FOr):
            return self.table(f.left, valuation).union(self.table(f.right, valuation))
        if isinstance(f, FAnd):
            return self.table(f.left, valuation).intersection(self.table(f.right, valuation))
        if isinstance(f, Dia):
            return lift_game(self.structure, f.atom, self.cap).compose(self.table(f.body, valuation))
        if isinstance(f, Box):
            step = lift_game(self.structure, f.atom, self.cap).dual()
            return step.compose(self.table(f.body, valuation))
        if isinstance(f, Chop):
            return self.table(f.left, valuation).compose(self.table(f.right, valuation))
        if isinstance(f, (Mu, Nu)):
            def operator(u, var=f.var, body=f.body):
                return self._table(body, {**valuation, var: u})
            engine = lfp_eff if isinstance(f, Mu) else gfp_eff
            return self._checked(engine(operator, n))
        if isinstance(f, StarFix):
            body = self.table(f.body, valuation)
            ident = Effectivity.identity(n)
            return self._checked(lfp_eff(lambda u: ident.union(body.compose(u)), n))
        if isinstance(f, DStarFix):
            body = self.table(f.body, valuation)
            ident = Effectivity.identity(n)
            return self._checked(gfp_eff(lambda u: ident.intersection(body.compose(u)), n))
        raise UnsupportedConstruct(f"{type(f).__name__} is not an FLC formula")

    def _checked(self, table: Effectivity) -> Effectivity:
        if self.check_monotone and not table.is_monotone():
            raise NonMonotoneDetected("fixpoint result is not monotone")
        return table

    def _composition_free(self, f) -> bool:
        known = self._pointwise_ok.get(f)
        if known is None:
            known = all(not free_vars(node.left) for node in walk(f) if isinstance(node, Chop)) \
                and all(not free_vars(node.body) for node in walk(f)
                        if isinstance(node, (StarFix, DStarFix)))
            self._pointwise_ok[f] = known
        return known

    def at(self, f, valuation: Mapping[str, Pointwise], goal: StateSet) -> StateSet:
        """Value of the denotation of `f` at one argument set"""
        structure = self.structure
        if isinstance(f, Id):
            return goal
        if isinstance(f, FTop):
            return self.full
        if isinstance(f, FBot):
            return 0
        if isinstance(f, FProp):
            return structure.prop(f.name)
        if isinstance(f, FNegProp):
            return self.full ^ structure.prop(f.name)
        if isinstance(f, FVar):
            if f.name not in valuation:
                raise UnboundVariable(f"variable {f.name} has no interpretation")
            return valuation[f.name](goal)
        if isinstance(f, FOr):
            return self.at(f.left, valuation, goal) | self.at(f.right, valuation, goal)
        if isinstance(f, FAnd):
            return self.at(f.left, valuation, goal) & self.at(f.right, valuation, goal)
        if isinstance(f, Dia):
            return structure.step(f.atom, self.at(f.body, valuation, goal))
        if isinstance(f, Box):
            return structure.dual_step(f.atom, self.at(f.body, valuation, goal))
        if isinstance(f, Chop):
            return self.at(f.left, valuation, self.at(f.right, valuation, goal))
        if isinstance(f, StarFix):
            return lfp_set(lambda b: goal | self.at(f.body, valuation, b), self.n)
        if isinstance(f, DStarFix):
            return gfp_set(lambda b: goal & self.at(f.body, valuation, b), self.n)
        if isinstance(f, (Mu, Nu)):
            if self.fast_path and self._composition_free(f):
                def operator(b, var=f.var, body=f.body):
                    return self.at(body, {**valuation, var: Constant(b)}, goal)
                engine = lfp_set if isinstance(f, Mu) else gfp_set
                return engine(operator, self.n)
            tables = {}
            for var in free_vars(f):
                if var not in valuation:
                    raise UnboundVariable(f"variable {var} has no interpretation")
                value = valuation[var]
                tables[var] = value if isinstance(value, Effectivity) \
                    else Effectivity.from_function(self.n, value)
            return self.table(f, tables)(goal)
        raise UnsupportedConstruct(f"{type(f).__name__} is not an FLC formula")

    def pointwise_table(self, f, valuation: Optional[Mapping[str, Pointwise]] = None) -> Effectivity:
        valuation = dict(valuation or {})
        return Effectivity.trusted(self.n, tuple(self.at(f, valuation, a) for a in all_sets(self.n)))

    def truth(self, f, valuation: Optional[Mapping[str, Pointwise]] = None) -> StateSet:
        if self.fast_path:
            return self.at(f, dict(valuation or {}), 0)
        return self.table(f, valuation)(0)


# Module-level entry points

def eval_rgl_game(g, structure: FiniteStructure,
                  valuation: Optional[Mapping[str, Effectivity]] = None, **options) -> Effectivity:
    """Effectivity function of a recursive game logic game (normalized first)"""
    evaluator = RglEvaluator(structure, **options)
    game = normal_form(g)
    if evaluator.fast_path:
        return evaluator.pointwise_table(game, valuation)
    return evaluator.game_table(game, valuation)


def eval_rgl_formula(f, structure: FiniteStructure,
                     valuation: Optional[Mapping[str, Effectivity]] = None, **options) -> StateSet:
    """Truth set of a recursive game logic formula (normalized first)"""
    return RglEvaluator(structure, **options).formula(normal_form(f), valuation)


def eval_flc(f: FlcExpr, structure: FiniteStructure,
             valuation: Optional[Mapping[str, Effectivity]] = None, **options) -> Effectivity:
    """Effectivity function denoted by an FLC formula"""
    evaluator = FlcEvaluator(structure, **options)
    if evaluator.fast_path:
        return evaluator.pointwise_table(f, valuation)
    return evaluator.table(f, valuation)


def flc_truth(f: FlcExpr, structure: FiniteStructure,
              valuation: Optional[Mapping[str, Effectivity]] = None, **options) -> StateSet:
    return FlcEvaluator(structure, **options).truth(f, valuation)


def eval_vectorial(system: Sequence[Tuple[str, object]], kind: FixKind,
                   structure: FiniteStructure, valuation: Optional[Mapping[str, Effectivity]] = None,
                   index: int = 0, **options) -> Effectivity:
    """Component `index` of the simultaneous extremal fixpoint of a game system"""
    variables = tuple(x for x, _ in system)
    bodies = tuple(normal_form(g) for _, g in system)
    evaluator = RglEvaluator(structure, **options)
    return evaluator.game_table(RecSystem(kind, variables, bodies, index), valuation)


def rgl_valid(f, structure: FiniteStructure, **options) -> bool:
    return eval_rgl_formula(f, structure, **options) == structure.full


def flc_valid(f: FlcExpr, structure: FiniteStructure, **options) -> bool:
    return flc_truth(f, structure, **options) == structure.full
