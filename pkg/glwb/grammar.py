"""
Concrete syntax for game logic formulas, games and FLC formulas

Parsing is done with a lark LALR grammar; a second pass resolves names
(atomic game vs. variable, proposition vs. variable) against the binders in
scope and the explicitly declared variables, and enforces that the three
namespaces are disjoint.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Collection, Dict, FrozenSet, Set

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from .exceptions import GrammarError, KindClash, WorkbenchError
from .terms import (
    And, Atom, Bot, Box, Chop, CoRec, DChoice, Dia, DStar, DStarFix, DTest,
    Diamond, Dual, DualAtom, DualVar, FAnd, FBot, FixKind, FlcExpr, FNegProp,
    FOr, FormExpr, FProp, FTop, FVar, GameExpr, Id, Mu, NameKind, Neg, NegProp,
    Nu, Or, Prop, Rec, RecSystem, Seq, Star, StarFix, Test, Top, TrapA, TrapD,
    Var, Choice, map_children,
)


logger = logging.getLogger(__name__)


GAME_GRAMMAR = r'''
?formula: implication
    | implication IFF implication -> iff

?implication: disjunction
    | disjunction "->" implication -> implies

?disjunction: conjunction
    | conjunction OR disjunction -> or_

?conjunction: unary
    | unary AND conjunction -> and_

?unary: NEG unary -> neg
    | "<" game ">" unary -> diamond
    | "true" -> top
    | "false" -> bot
    | TOP -> top
    | BOT -> bot
    | NAME -> prop
    | "(" formula ")" -> fparen

?game: choice

?choice: sequence
    | sequence CUP choice -> choice
    | sequence CAP choice -> dchoice
    | binder

?sequence: postfix
    | postfix ";" sequence -> seq
    | postfix ";" binder -> seq

?postfix: primary
    | postfix "^*" -> star
    | postfix "^x" -> dstar
    | postfix "^d" -> dual

?primary: NAME -> game_name
    | "~'" NAME -> trap_d
    | "~" NAME -> trap_a
    | "?" unary -> test
    | "!" unary -> dtest
    | "rec" "[" INT "]" "(" name_list ")" "." "(" game_list ")" -> rec_system
    | "corec" "[" INT "]" "(" name_list ")" "." "(" game_list ")" -> corec_system
    | "(" game ")" -> paren

binder: "rec" NAME "." game -> rec
    | "corec" NAME "." game -> corec

name_list: NAME ("," NAME)*
game_list: game ("," game)*

IFF: "<->" | "↔"
OR: "\\/" | "∨"
AND: "/\\" | "∧"
NEG: "-" | "¬"
TOP: "⊤"
BOT: "⊥"
CUP: "∪" | "|u|"
CAP: "∩" | "|n|"
NAME: /[A-Za-z][A-Za-z0-9_]*/

%import common.INT
%import common.WS
%ignore WS
%ignore /#[^\n]*/
'''


FLC_GRAMMAR = r'''
?flc: implication
    | binder

?implication: disjunction
    | disjunction "->" implication -> implies
    | disjunction "->" binder -> implies

?disjunction: conjunction
    | conjunction OR disjunction -> or_
    | conjunction OR binder -> or_

?conjunction: chop
    | chop AND conjunction -> and_
    | chop AND binder -> and_

?chop: postfix
    | postfix ";" chop -> chop
    | postfix ";" binder -> chop

?postfix: primary
    | postfix "^*" -> star
    | postfix "^x" -> dstar

?primary: "id" -> ident
    | "true" -> top
    | "false" -> bot
    | TOP -> top
    | BOT -> bot
    | NAME -> name
    | NEG primary -> neg
    | "<" NAME ">" primary -> dia
    | "[" NAME "]" primary -> box
    | "(" flc ")"

binder: "mu" NAME "." flc -> mu
    | "nu" NAME "." flc -> nu

OR: "\\/" | "∨"
AND: "/\\" | "∧"
NEG: "-" | "¬"
TOP: "⊤"
BOT: "⊥"
NAME: /[A-Za-z][A-Za-z0-9_]*/

%import common.WS
%ignore WS
%ignore /#[^\n]*/
'''


@dataclass(frozen=True)
class _Paren(GameExpr):
    """Marks a parenthesized game until the postfix dual has been decided"""
    inner: GameExpr


@dataclass(frozen=True)
class _FNeg(FlcExpr):
    body: FlcExpr


@dataclass(frozen=True)
class _FImplies(FlcExpr):
    left: FlcExpr
    right: FlcExpr


@dataclass(frozen=True)
class _FormParen(FormExpr):
    inner: FormExpr


def _bare(expr):
    return expr.inner if isinstance(expr, (_Paren, _FormParen)) else expr


@v_args(inline=True)
class _GameBuilder(Transformer):
    """Turns the lark tree into provisional ASTs (every game name an Atom)"""

    def iff(self, left, _op, right):
        left, right = _bare(left), _bare(right)
        return And(Or(Neg(left), right), Or(Neg(right), left))

    def implies(self, left, right):
        return Or(Neg(_bare(left)), _bare(right))

    def or_(self, left, _op, right):
        return Or(_bare(left), _bare(right))

    def and_(self, left, _op, right):
        return And(_bare(left), _bare(right))

    def neg(self, _op, body):
        if isinstance(body, Prop):
            return NegProp(body.name)
        return Neg(_bare(body))

    def fparen(self, body):
        return _FormParen(_bare(body))

    def diamond(self, game, body):
        return Diamond(_bare(game), _bare(body))

    def top(self, *_):
        return Top()

    def bot(self, *_):
        return Bot()

    def prop(self, name):
        return Prop(str(name))

    def choice(self, left, _op, right):
        return Choice(_bare(left), _bare(right))

    def dchoice(self, left, _op, right):
        return DChoice(_bare(left), _bare(right))

    def seq(self, left, right):
        return Seq(_bare(left), _bare(right))

    def star(self, body):
        return Star(_bare(body))

    def dstar(self, body):
        return DStar(_bare(body))

    def dual(self, body):
        if isinstance(body, Atom):
            return DualAtom(body.name)
        return Dual(_bare(body))

    def game_name(self, name):
        return Atom(str(name))

    def trap_a(self, name):
        return TrapA(str(name))

    def trap_d(self, name):
        return TrapD(str(name))

    def test(self, body):
        return Test(_bare(body))

    def dtest(self, body):
        return DTest(_bare(body))

    def paren(self, game):
        return _Paren(_bare(game))

    def rec(self, var, body):
        return Rec(str(var), _bare(body))

    def corec(self, var, body):
        return CoRec(str(var), _bare(body))

    def rec_system(self, index, names, bodies):
        return RecSystem(FixKind.MU, names, bodies, int(index))

    def corec_system(self, index, names, bodies):
        return RecSystem(FixKind.NU, names, bodies, int(index))

    def name_list(self, *names):
        return tuple(str(n) for n in names)

    def game_list(self, *games):
        return tuple(_bare(g) for g in games)


@v_args(inline=True)
class _FlcBuilder(Transformer):
    """Turns the lark tree into provisional FLC ASTs (every name a proposition)"""

    def implies(self, left, right):
        return _FImplies(left, right)

    def or_(self, left, _op, right):
        return FOr(left, right)

    def and_(self, left, _op, right):
        return FAnd(left, right)

    def chop(self, left, right):
        return Chop(left, right)

    def star(self, body):
        return StarFix(body)

    def dstar(self, body):
        return DStarFix(body)

    def ident(self):
        return Id()

    def top(self, *_):
        return FTop()

    def bot(self, *_):
        return FBot()

    def name(self, name):
        return FProp(str(name))

    def neg(self, _op, body):
        if isinstance(body, FProp):
            return FNegProp(body.name)
        return _FNeg(body)

    def dia(self, atom, body):
        return Dia(str(atom), body)

    def box(self, atom, body):
        return Box(str(atom), body)

    def mu(self, var, body):
        return Mu(str(var), body)

    def nu(self, var, body):
        return Nu(str(var), body)


@lru_cache(maxsize=None)
def _game_parser() -> Lark:
    return Lark(GAME_GRAMMAR, start=["formula", "game"], parser="lalr")


@lru_cache(maxsize=None)
def _flc_parser() -> Lark:
    return Lark(FLC_GRAMMAR, start="flc", parser="lalr")


class _KindTable:
    """Collects the kind of every identifier and reports the first clash"""

    def __init__(self, declared: Collection[str]):
        self.kinds: Dict[str, NameKind] = {name: NameKind.VARIABLE for name in declared}

    def note(self, name: str, kind: NameKind):
        known = self.kinds.setdefault(name, kind)
        if known is not kind:
            raise KindClash(
                f"identifier {name!r} used as {kind.value} and as {known.value}"
            )


def _resolve_game_logic(expr, bound: FrozenSet[str], table: _KindTable):
    if isinstance(expr, (_Paren, _FormParen)):
        return _resolve_game_logic(expr.inner, bound, table)
    if isinstance(expr, (Prop, NegProp)):
        table.note(expr.name, NameKind.PROPOSITION)
        return expr
    if isinstance(expr, Atom):
        if expr.name in bound:
            return Var(expr.name)
        table.note(expr.name, NameKind.ATOMIC_GAME)
        return expr
    if isinstance(expr, DualAtom):
        if expr.name in bound:
            return DualVar(expr.name)
        table.note(expr.name, NameKind.ATOMIC_GAME)
        return expr
    if isinstance(expr, (TrapA, TrapD)):
        if expr.name in bound:
            raise KindClash(f"variable {expr.name!r} used as a trapped atomic game")
        table.note(expr.name, NameKind.ATOMIC_GAME)
        return expr
    if isinstance(expr, (Rec, CoRec)):
        table.note(expr.var, NameKind.VARIABLE)
        return type(expr)(expr.var, _resolve_game_logic(expr.body, bound | {expr.var}, table))
    if isinstance(expr, RecSystem):
        for var in expr.variables:
            table.note(var, NameKind.VARIABLE)
        inner = bound | set(expr.variables)
        bodies = tuple(_resolve_game_logic(b, inner, table) for b in expr.bodies)
        return RecSystem(expr.kind, expr.variables, bodies, expr.index)
    return map_children(expr, lambda child: _resolve_game_logic(child, bound, table))


def _resolve_flc(expr, bound: FrozenSet[str], table: _KindTable):
    from .rewrite import flc_negate

    if isinstance(expr, (FProp, FNegProp)):
        if expr.name in bound:
            if isinstance(expr, FNegProp):
                raise GrammarError(f"negated variable {expr.name!r}")
            return FVar(expr.name)
        table.note(expr.name, NameKind.PROPOSITION)
        return expr
    if isinstance(expr, (Dia, Box)):
        if expr.atom in bound:
            raise KindClash(f"variable {expr.atom!r} used as an atomic game")
        table.note(expr.atom, NameKind.ATOMIC_GAME)
        return type(expr)(expr.atom, _resolve_flc(expr.body, bound, table))
    if isinstance(expr, (Mu, Nu)):
        table.note(expr.var, NameKind.VARIABLE)
        return type(expr)(expr.var, _resolve_flc(expr.body, bound | {expr.var}, table))
    if isinstance(expr, _FNeg):
        body = _resolve_flc(expr.body, bound, table)
        if isinstance(body, FVar):
            raise GrammarError(f"negated variable {body.name!r}")
        return flc_negate(body)
    if isinstance(expr, _FImplies):
        left = _resolve_flc(expr.left, bound, table)
        right = _resolve_flc(expr.right, bound, table)
        return FOr(flc_negate(left), right)
    return map_children(expr, lambda child: _resolve_flc(child, bound, table))


def _run(parser: Lark, builder: Transformer, text: str, start=None):
    try:
        tree = parser.parse(text, start=start) if start else parser.parse(text)
        return builder.transform(tree)
    except UnexpectedInput as e:
        context = e.get_context(text) if hasattr(e, "get_context") else ""
        raise GrammarError(f"unexpected input {context.strip()!r}",
                           getattr(e, "line", None), getattr(e, "column", None),
                           context) from e
    except VisitError as e:
        if isinstance(e.orig_exc, (WorkbenchError, ValueError)):
            raise GrammarError(str(e.orig_exc)) from e
        raise


def parse_game_formula(text: str, variables: Collection[str] = ()) -> FormExpr:
    """Parse a formula of the game logic family

    Args:
        text: concrete syntax
        variables: names to treat as free game variables

    Returns:
        the formula AST
    """
    raw = _run(_game_parser(), _GameBuilder(), text, start="formula")
    return _resolve_game_logic(_bare(raw), frozenset(variables), _KindTable(variables))


def parse_game(text: str, variables: Collection[str] = ()) -> GameExpr:
    """Parse a game; names in `variables` become Var nodes"""
    raw = _run(_game_parser(), _GameBuilder(), text, start="game")
    return _resolve_game_logic(_bare(raw), frozenset(variables), _KindTable(variables))


def parse_flc(text: str, variables: Collection[str] = ()) -> FlcExpr:
    """Parse an FLC formula; `-` and `->` on composite Lmu operands use flc_negate"""
    raw = _run(_flc_parser(), _FlcBuilder(), text)
    return _resolve_flc(raw, frozenset(variables), _KindTable(variables))


def parse_any(text: str, logic: str, variables: Collection[str] = ()):
    """Dispatch on a logic tag as used by the CLI"""
    if logic in ("flc", "lmu", "lstar"):
        return parse_flc(text, variables)
    return parse_game_formula(text, variables)


def declared_variables(expr) -> Set[str]:
    """Free variables that must be declared for `expr` to re-parse"""
    from .rewrite import free_vars
    return set(free_vars(expr))
