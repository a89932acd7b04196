"""
Abstract syntax for the game logic family and fixpoint logic with chop

Formulas and games of GL, GLs, RGL and rlGL share one pair of mutually
recursive ASTs (FormExpr / GameExpr); FLC, Lmu and L* share FlcExpr.
All nodes are frozen dataclasses and safe to share between threads.
"""

import re
import threading
from collections import defaultdict
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Callable, Collection, Dict, Iterator, Tuple, Union

from .exceptions import GrammarError


IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9_]*")

MARKER_U = "u"
MARKER_V = "v"
RESERVED_PREFIXES = ("u_", "v_", "y_ctx_", "z_fix_", "b_", "c_")


class NameKind(Enum):
    PROPOSITION = "proposition"
    ATOMIC_GAME = "atomic_game"
    VARIABLE = "variable"


class FixKind(Enum):
    MU = "mu"
    NU = "nu"

    @property
    def dual(self) -> "FixKind":
        return FixKind.NU if self is FixKind.MU else FixKind.MU


@dataclass(frozen=True)
class Name:
    """An identifier together with the namespace it lives in"""
    kind: NameKind
    text: str

    def __post_init__(self):
        if not IDENTIFIER.fullmatch(self.text or ""):
            raise GrammarError(f"invalid identifier {self.text!r}")


class FormExpr:
    """Base class of game logic formulas"""
    __slots__ = ()


class GameExpr:
    """Base class of game logic games"""
    __slots__ = ()


class FlcExpr:
    """Base class of fixpoint logic with chop formulas"""
    __slots__ = ()


Expr = Union[FormExpr, GameExpr, FlcExpr]
EXPR_TYPES = (FormExpr, GameExpr, FlcExpr)


# Formulas

@dataclass(frozen=True)
class Top(FormExpr):
    pass


@dataclass(frozen=True)
class Bot(FormExpr):
    pass


@dataclass(frozen=True)
class Prop(FormExpr):
    name: str


@dataclass(frozen=True)
class NegProp(FormExpr):
    name: str


@dataclass(frozen=True)
class Neg(FormExpr):
    body: FormExpr


@dataclass(frozen=True)
class Or(FormExpr):
    left: FormExpr
    right: FormExpr


@dataclass(frozen=True)
class And(FormExpr):
    left: FormExpr
    right: FormExpr


@dataclass(frozen=True)
class Diamond(FormExpr):
    game: GameExpr
    body: FormExpr


# Games

@dataclass(frozen=True)
class Atom(GameExpr):
    name: str


@dataclass(frozen=True)
class DualAtom(GameExpr):
    name: str


@dataclass(frozen=True)
class Var(GameExpr):
    name: str


@dataclass(frozen=True)
class DualVar(GameExpr):
    name: str


@dataclass(frozen=True)
class Test(GameExpr):
    body: FormExpr


@dataclass(frozen=True)
class DTest(GameExpr):
    body: FormExpr


@dataclass(frozen=True)
class Choice(GameExpr):
    left: GameExpr
    right: GameExpr


@dataclass(frozen=True)
class DChoice(GameExpr):
    left: GameExpr
    right: GameExpr


@dataclass(frozen=True)
class Seq(GameExpr):
    left: GameExpr
    right: GameExpr


@dataclass(frozen=True)
class Star(GameExpr):
    body: GameExpr


@dataclass(frozen=True)
class DStar(GameExpr):
    body: GameExpr


@dataclass(frozen=True)
class Dual(GameExpr):
    body: GameExpr


@dataclass(frozen=True)
class Rec(GameExpr):
    var: str
    body: GameExpr


@dataclass(frozen=True)
class CoRec(GameExpr):
    var: str
    body: GameExpr


@dataclass(frozen=True)
class TrapA(GameExpr):
    name: str


@dataclass(frozen=True)
class TrapD(GameExpr):
    name: str


@dataclass(frozen=True)
class RecSystem(GameExpr):
    """Component `index` of a simultaneous fixpoint over `variables`"""
    kind: FixKind
    variables: Tuple[str, ...]
    bodies: Tuple[GameExpr, ...]
    index: int

    def __post_init__(self):
        if len(self.variables) != len(self.bodies) or not self.variables:
            raise ValueError("RecSystem needs one body per variable")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("RecSystem variables must be pairwise distinct")
        if not 0 <= self.index < len(self.variables):
            raise ValueError(f"RecSystem index {self.index} out of range")


# Fixpoint logic with chop

@dataclass(frozen=True)
class Id(FlcExpr):
    pass


@dataclass(frozen=True)
class FTop(FlcExpr):
    pass


@dataclass(frozen=True)
class FBot(FlcExpr):
    pass


@dataclass(frozen=True)
class FVar(FlcExpr):
    name: str


@dataclass(frozen=True)
class FProp(FlcExpr):
    name: str


@dataclass(frozen=True)
class FNegProp(FlcExpr):
    name: str


@dataclass(frozen=True)
class FOr(FlcExpr):
    left: FlcExpr
    right: FlcExpr


@dataclass(frozen=True)
class FAnd(FlcExpr):
    left: FlcExpr
    right: FlcExpr


@dataclass(frozen=True)
class Dia(FlcExpr):
    atom: str
    body: FlcExpr


@dataclass(frozen=True)
class Box(FlcExpr):
    atom: str
    body: FlcExpr


@dataclass(frozen=True)
class Mu(FlcExpr):
    var: str
    body: FlcExpr


@dataclass(frozen=True)
class Nu(FlcExpr):
    var: str
    body: FlcExpr


@dataclass(frozen=True)
class Chop(FlcExpr):
    left: FlcExpr
    right: FlcExpr


@dataclass(frozen=True)
class StarFix(FlcExpr):
    """Least iteration: mu x. (id \\/ body ; x)"""
    body: FlcExpr


@dataclass(frozen=True)
class DStarFix(FlcExpr):
    """Greatest iteration: nu x. (id /\\ body ; x)"""
    body: FlcExpr


GAME_BINDERS = (Rec, CoRec)
FLC_BINDERS = (Mu, Nu)


def children(expr: Expr) -> Tuple[Expr, ...]:
    """Direct sub-expressions in field order"""
    result = []
    for f in fields(expr):
        value = getattr(expr, f.name)
        if isinstance(value, EXPR_TYPES):
            result.append(value)
        elif isinstance(value, tuple) and value and isinstance(value[0], EXPR_TYPES):
            result.extend(value)
    return tuple(result)


def map_children(expr: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    """Rebuild `expr` with `fn` applied to every direct sub-expression"""
    changes = {}
    for f in fields(expr):
        value = getattr(expr, f.name)
        if isinstance(value, EXPR_TYPES):
            changes[f.name] = fn(value)
        elif isinstance(value, tuple) and value and isinstance(value[0], EXPR_TYPES):
            changes[f.name] = tuple(fn(v) for v in value)
    if not changes:
        return expr
    return replace(expr, **changes)


def walk(expr: Expr) -> Iterator[Expr]:
    """Pre-order traversal"""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def size(expr: Expr) -> int:
    """Node count"""
    return sum(1 for _ in walk(expr))


def binder_of(expr: Expr) -> Tuple[str, ...]:
    """Variables bound directly at this node"""
    if isinstance(expr, (Rec, CoRec, Mu, Nu)):
        return (expr.var,)
    if isinstance(expr, RecSystem):
        return expr.variables
    return ()


def names_in(expr: Expr) -> Dict[str, NameKind]:
    """Every identifier of `expr` with its kind"""
    found: Dict[str, NameKind] = {}
    for node in walk(expr):
        if isinstance(node, (Prop, NegProp, FProp, FNegProp)):
            found[node.name] = NameKind.PROPOSITION
        elif isinstance(node, (Atom, DualAtom, TrapA, TrapD)):
            found[node.name] = NameKind.ATOMIC_GAME
        elif isinstance(node, (Dia, Box)):
            found[node.atom] = NameKind.ATOMIC_GAME
        elif isinstance(node, (Var, DualVar, FVar)):
            found[node.name] = NameKind.VARIABLE
        for var in binder_of(node):
            found[var] = NameKind.VARIABLE
    return found


def is_reserved(name: str) -> bool:
    return name in (MARKER_U, MARKER_V) or name.startswith(RESERVED_PREFIXES)


class FreshNames:
    """Deterministic fresh identifiers: `base_k` with one counter per kind"""

    def __init__(self):
        self._counters: Dict[NameKind, int] = defaultdict(int)
        self._lock = threading.Lock()

    def fresh(self, base: str, kind: NameKind = NameKind.VARIABLE,
              avoid: Collection[str] = ()) -> str:
        with self._lock:
            while True:
                k = self._counters[kind]
                self._counters[kind] += 1
                candidate = f"{base}_{k}"
                if candidate not in avoid:
                    return candidate


FRESH = FreshNames()


# Builders

def implies(left: FormExpr, right: FormExpr) -> FormExpr:
    return Or(Neg(left), right)


def iff(left: FormExpr, right: FormExpr) -> FormExpr:
    return And(implies(left, right), implies(right, left))


def seq(*games: GameExpr) -> GameExpr:
    """Right-nested sequential composition"""
    if not games:
        return Test(Top())
    result = games[-1]
    for game in reversed(games[:-1]):
        result = Seq(game, result)
    return result


def choice(*games: GameExpr) -> GameExpr:
    if not games:
        return Test(Bot())
    result = games[-1]
    for game in reversed(games[:-1]):
        result = Choice(game, result)
    return result


def dchoice(*games: GameExpr) -> GameExpr:
    if not games:
        return DTest(Bot())
    result = games[-1]
    for game in reversed(games[:-1]):
        result = DChoice(game, result)
    return result


def disjunction(*formulas: FormExpr) -> FormExpr:
    if not formulas:
        return Bot()
    result = formulas[-1]
    for formula in reversed(formulas[:-1]):
        result = Or(formula, result)
    return result


def conjunction(*formulas: FormExpr) -> FormExpr:
    if not formulas:
        return Top()
    result = formulas[-1]
    for formula in reversed(formulas[:-1]):
        result = And(formula, result)
    return result
