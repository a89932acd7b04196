"""
Semantics of sabotage game logic over contexts

A context records, for each atomic game of a finite alphabet, who owns it:
nobody, Angel (after Angel's trap) or Demon (after Demon's trap). Formulas
denote a state set per context; contexts are indexed in base 3 with the
first alphabet letter as the lowest digit, so index 0 is the empty context.
"""

import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exceptions import AlphabetTooSmall, CapExceeded, UnboundVariable, UnsupportedConstruct
from .lattice import StateSet, kleene, mask_tuple_leq
from .rewrite import normal_form, sabotage_atoms
from .structures import DEFAULT_STATE_CAP, FiniteStructure, lift_game
from .terms import (
    And, Atom, Bot, Choice, CoRec, DChoice, DStar, DTest, Diamond, DualAtom, NegProp,
    Or, Prop, Rec, RecSystem, Seq, Star, Test, Top, TrapA, TrapD, Var,
)


logger = logging.getLogger(__name__)

DEFAULT_GLS_BUDGET = 65536


class Ownership(IntEnum):
    NEITHER = 0
    ANGEL = 1
    DEMON = 2

    @property
    def dual(self) -> "Ownership":
        if self is Ownership.NEITHER:
            return self
        return Ownership.DEMON if self is Ownership.ANGEL else Ownership.ANGEL


Ctx = Mapping[str, Ownership]


class ContextSpace:
    """All contexts over a finite alphabet, with precomputed update tables"""

    def __init__(self, alphabet: Iterable[str]):
        self.alphabet: Tuple[str, ...] = tuple(sorted(set(alphabet)))
        self.size = 3 ** len(self.alphabet)
        self._weight = {a: 3 ** i for i, a in enumerate(self.alphabet)}
        self._dual = tuple(self._dual_index(c) for c in range(self.size))

    def __eq__(self, other) -> bool:
        return isinstance(other, ContextSpace) and self.alphabet == other.alphabet

    def __hash__(self) -> int:
        return hash(self.alphabet)

    def __repr__(self) -> str:
        return f"ContextSpace({list(self.alphabet)})"

    def owner(self, index: int, atom: str) -> Ownership:
        weight = self._weight.get(atom)
        if weight is None:
            return Ownership.NEITHER
        return Ownership((index // weight) % 3)

    def assign(self, index: int, atom: str, owner: Ownership) -> int:
        weight = self._weight.get(atom)
        if weight is None:
            raise AlphabetTooSmall(f"atomic game {atom} is not in the context alphabet")
        current = (index // weight) % 3
        return index + (int(owner) - current) * weight

    def _dual_index(self, index: int) -> int:
        result = 0
        for a in self.alphabet:
            result += int(self.owner(index, a).dual) * self._weight[a]
        return result

    def dual(self, index: int) -> int:
        return self._dual[index]

    def index(self, ctx: Ctx) -> int:
        result = 0
        for atom, owner in ctx.items():
            owner = Ownership(owner)
            if owner is Ownership.NEITHER:
                continue
            if atom not in self._weight:
                raise AlphabetTooSmall(f"context mentions {atom} outside the alphabet")
            result += int(owner) * self._weight[atom]
        return result

    def context(self, index: int) -> Dict[str, Ownership]:
        """Owned atoms of a context (unowned atoms omitted)"""
        return {a: self.owner(index, a) for a in self.alphabet
                if self.owner(index, a) is not Ownership.NEITHER}

    def indices(self) -> range:
        return range(self.size)


@dataclass(frozen=True)
class CSet:
    """A state set per context of a context space"""
    space: ContextSpace
    values: Tuple[StateSet, ...]

    def at(self, ctx: Optional[Ctx] = None) -> StateSet:
        return self.values[self.space.index(ctx or {})]

    @property
    def empty_context(self) -> StateSet:
        return self.values[0]


def context_dual_complement(cset: CSet, n: int) -> CSet:
    """{(w, c) : (w, dual c) not in cset}"""
    full = (1 << n) - 1
    space = cset.space
    return CSet(space, tuple(full ^ cset.values[space.dual(c)] for c in space.indices()))


def truth_at(cset: CSet, ctx: Optional[Ctx] = None) -> StateSet:
    """Project a context family onto one initial context (the empty one by default)"""
    return cset.at(ctx)


class GlsEvaluator:
    """
    Evaluator for sabotage game logic with:
    - lifted atomic games following the ownership recorded in the context
    - trap games that update the context
    - fixpoints of stars over context families
    """

    def __init__(self, structure: FiniteStructure, alphabet: Iterable[str],
                 budget: int = DEFAULT_GLS_BUDGET, cap: int = DEFAULT_STATE_CAP):
        self.structure = structure
        self.space = ContextSpace(alphabet)
        self.n = structure.n
        self.full = structure.full
        self.cap = cap
        self.logger = logging.getLogger(__name__)
        extended = (1 << self.n) * self.space.size
        if extended > budget:
            raise CapExceeded(
                f"{1 << self.n} state sets times {self.space.size} contexts exceed budget {budget}"
            )
        self._truth: Dict = {}

    def _check_alphabet(self, expr):
        missing = sabotage_atoms(expr) - set(self.space.alphabet)
        if missing:
            raise AlphabetTooSmall(f"context alphabet misses {sorted(missing)}")

    def _step_table(self, atom: str) -> Tuple[StateSet, ...]:
        return lift_game(self.structure, atom, self.cap).table

    def _constant(self, mask: StateSet) -> Tuple[StateSet, ...]:
        return (mask,) * self.space.size

    def formula(self, f) -> CSet:
        """Context family of a formula (normalized first)"""
        self._check_alphabet(f)
        return CSet(self.space, self._formula(normal_form(f)))

    def game(self, g) -> Callable[[CSet], CSet]:
        """Monotone map on context families denoted by a game (normalized first)"""
        self._check_alphabet(g)
        game = normal_form(g)

        def apply(goal: CSet) -> CSet:
            return CSet(self.space, self._game(game, goal.values))
        return apply

    def truth(self, f, ctx: Optional[Ctx] = None) -> StateSet:
        return truth_at(self.formula(f), ctx)

    def _formula(self, f) -> Tuple[StateSet, ...]:
        cached = self._truth.get(f)
        if cached is not None:
            return cached
        result = self._formula_uncached(f)
        self._truth[f] = result
        return result

    def _formula_uncached(self, f) -> Tuple[StateSet, ...]:
        if isinstance(f, Top):
            return self._constant(self.full)
        if isinstance(f, Bot):
            return self._constant(0)
        if isinstance(f, Prop):
            return self._constant(self.structure.prop(f.name))
        if isinstance(f, NegProp):
            return self._constant(self.full ^ self.structure.prop(f.name))
        if isinstance(f, Or):
            return tuple(a | b for a, b in zip(self._formula(f.left), self._formula(f.right)))
        if isinstance(f, And):
            return tuple(a & b for a, b in zip(self._formula(f.left), self._formula(f.right)))
        if isinstance(f, Diamond):
            return self._game(f.game, self._formula(f.body))
        raise UnsupportedConstruct(f"{type(f).__name__} is not a normal-form formula")

    def _complement(self, values: Tuple[StateSet, ...]) -> Tuple[StateSet, ...]:
        full = self.full
        space = self.space
        return tuple(full ^ values[space.dual(c)] for c in space.indices())

    def _game(self, g, goal: Tuple[StateSet, ...]) -> Tuple[StateSet, ...]:
        space = self.space
        if isinstance(g, Atom):
            table = self._step_table(g.name)
            result = []
            for c, target in enumerate(goal):
                owner = space.owner(c, g.name)
                if owner is Ownership.NEITHER:
                    result.append(table[target])
                elif owner is Ownership.ANGEL:
                    result.append(target)
                else:
                    result.append(0)
            return tuple(result)
        if isinstance(g, DualAtom):
            table = self._step_table(g.name)
            full = self.full
            result = []
            for c, target in enumerate(goal):
                owner = space.owner(c, g.name)
                if owner is Ownership.NEITHER:
                    result.append(full ^ table[full ^ target])
                elif owner is Ownership.ANGEL:
                    result.append(full)
                else:
                    result.append(target)
            return tuple(result)
        if isinstance(g, TrapA):
            return tuple(goal[space.assign(c, g.name, Ownership.ANGEL)] for c in space.indices())
        if isinstance(g, TrapD):
            return tuple(goal[space.assign(c, g.name, Ownership.DEMON)] for c in space.indices())
        if isinstance(g, Test):
            truth = self._formula(g.body)
            return tuple(a & b for a, b in zip(truth, goal))
        if isinstance(g, DTest):
            outside = self._complement(self._formula(g.body))
            return tuple(a | b for a, b in zip(outside, goal))
        if isinstance(g, Choice):
            return tuple(a | b for a, b in zip(self._game(g.left, goal), self._game(g.right, goal)))
        if isinstance(g, DChoice):
            return tuple(a & b for a, b in zip(self._game(g.left, goal), self._game(g.right, goal)))
        if isinstance(g, Seq):
            return self._game(g.left, self._game(g.right, goal))
        limit = self.n * space.size
        if isinstance(g, Star):
            def grow(current):
                return tuple(a | b for a, b in zip(goal, self._game(g.body, current)))
            return kleene(grow, self._constant(0), mask_tuple_leq, True, limit)
        if isinstance(g, DStar):
            def shrink(current):
                return tuple(a & b for a, b in zip(goal, self._game(g.body, current)))
            return kleene(shrink, self._constant(self.full), mask_tuple_leq, False, limit)
        if isinstance(g, Var):
            raise UnboundVariable(f"variable {g.name} in a sabotage game")
        if isinstance(g, (Rec, CoRec, RecSystem)):
            raise UnsupportedConstruct("recursion is not part of sabotage game logic")
        raise UnsupportedConstruct(f"{type(g).__name__} is not a normal-form game")


def default_alphabet(expr, extra: Iterable[str] = ()) -> List[str]:
    return sorted(set(sabotage_atoms(expr)) | set(extra))


def eval_gls_formula(f, structure: FiniteStructure, alphabet: Optional[Sequence[str]] = None,
                     **options) -> CSet:
    """Context family of a sabotage game logic formula"""
    alphabet = default_alphabet(f) if alphabet is None else alphabet
    return GlsEvaluator(structure, alphabet, **options).formula(f)


def eval_gls_game(g, structure: FiniteStructure, alphabet: Optional[Sequence[str]] = None,
                  **options) -> Callable[[CSet], CSet]:
    """Monotone map on context families of a sabotage game"""
    alphabet = default_alphabet(g) if alphabet is None else alphabet
    return GlsEvaluator(structure, alphabet, **options).game(g)


def gls_truth(f, structure: FiniteStructure, alphabet: Optional[Sequence[str]] = None,
              ctx: Optional[Ctx] = None, **options) -> StateSet:
    """Truth set in an initial context (the empty context unless given)"""
    if alphabet is None:
        alphabet = default_alphabet(f, (ctx or {}).keys())
    return truth_at(eval_gls_formula(f, structure, alphabet, **options), ctx)


def gls_valid(f, structure: FiniteStructure, **options) -> bool:
    return gls_truth(f, structure, **options) == structure.full
