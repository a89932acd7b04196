"""
Canonical concrete syntax for every AST

Compound binary operands are parenthesized unless they continue the same
operator on the right; binders appear unparenthesized only in final position.
The output re-parses to the identical AST (given the free variables).
"""

from functools import singledispatch

from .terms import (
    And, Atom, Bot, Box, Chop, Choice, CoRec, DChoice, Dia, DStar, DStarFix,
    DTest, Diamond, Dual, DualAtom, DualVar, FAnd, FBot, FixKind, FNegProp, FOr,
    FProp, FTop, FVar, Id, Mu, Neg, NegProp, Nu, Or, Prop, Rec, RecSystem, Seq,
    Star, StarFix, Test, Top, TrapA, TrapD, Var,
)


CUP = "∪"
CAP = "∩"


def _implication(expr):
    if isinstance(expr, Or) and isinstance(expr.left, Neg):
        return expr.left.body, expr.right
    return None


def _biimplication(expr):
    if not isinstance(expr, And):
        return None
    first, second = _implication(expr.left), _implication(expr.right)
    if first and second and first == (second[1], second[0]):
        return first
    return None


def _binary_formula(expr) -> bool:
    return isinstance(expr, (Or, And))


def _formula_operand(expr) -> str:
    text = to_text(expr)
    return f"({text})" if _binary_formula(expr) else text


def _print_formula(expr) -> str:
    both = _biimplication(expr)
    if both:
        return f"{_formula_operand(both[0])} <-> {_formula_operand(both[1])}"
    single = _implication(expr)
    if single:
        left, right = single
        tail = to_text(right) if _implication(right) and not _biimplication(right) \
            else _formula_operand(right)
        return f"{_formula_operand(left)} -> {tail}"
    if isinstance(expr, (Or, And)):
        symbol = "\\/" if isinstance(expr, Or) else "/\\"
        right = expr.right
        same = type(right) is type(expr) and not _implication(right) and not _biimplication(right)
        tail = to_text(right) if same else _formula_operand(right)
        return f"{_formula_operand(expr.left)} {symbol} {tail}"
    raise TypeError(expr)


_POSTFIX_GAMES = (Atom, DualAtom, Var, DualVar, TrapA, TrapD, Star, DStar, Dual, RecSystem)
_BINDERS = (Rec, CoRec)


def _game_operand(expr, postfix: bool = False) -> str:
    text = to_text(expr)
    allowed = _POSTFIX_GAMES if postfix else _POSTFIX_GAMES + (Test, DTest)
    return text if isinstance(expr, allowed) else f"({text})"


def _game_tail(expr, same) -> str:
    if isinstance(expr, same + _BINDERS + _POSTFIX_GAMES + (Test, DTest)):
        return to_text(expr)
    return f"({to_text(expr)})"


def _body(expr) -> str:
    text = to_text(expr)
    if isinstance(expr, (Choice, DChoice, Seq, Or, And, FOr, FAnd, Chop)):
        return f"({text})"
    return text


@singledispatch
def to_text(expr) -> str:
    """Print any formula, game or FLC formula"""
    raise TypeError(f"cannot print {type(expr).__name__}")


@to_text.register(Top)
@to_text.register(FTop)
def _(expr):
    return "true"


@to_text.register(Bot)
@to_text.register(FBot)
def _(expr):
    return "false"


@to_text.register(Prop)
@to_text.register(FProp)
@to_text.register(Atom)
@to_text.register(Var)
@to_text.register(FVar)
def _(expr):
    return expr.name


@to_text.register(NegProp)
@to_text.register(FNegProp)
def _(expr):
    return f"-{expr.name}"


@to_text.register(Neg)
def _(expr):
    body = expr.body
    if isinstance(body, Prop) or _binary_formula(body):
        return f"-({to_text(body)})"
    return f"-{to_text(body)}"


@to_text.register(Or)
@to_text.register(And)
def _(expr):
    return _print_formula(expr)


@to_text.register(Diamond)
def _(expr):
    return f"<{to_text(expr.game)}> {_formula_operand(expr.body)}"


@to_text.register(DualAtom)
@to_text.register(DualVar)
def _(expr):
    return f"{expr.name}^d"


@to_text.register(TrapA)
def _(expr):
    return f"~{expr.name}"


@to_text.register(TrapD)
def _(expr):
    return f"~'{expr.name}"


@to_text.register(Test)
def _(expr):
    return f"?{_formula_operand(expr.body)}"


@to_text.register(DTest)
def _(expr):
    return f"!{_formula_operand(expr.body)}"


@to_text.register(Choice)
def _(expr):
    return f"{_game_operand(expr.left)} {CUP} {_game_tail(expr.right, (Choice,))}"


@to_text.register(DChoice)
def _(expr):
    return f"{_game_operand(expr.left)} {CAP} {_game_tail(expr.right, (DChoice,))}"


@to_text.register(Seq)
def _(expr):
    return f"{_game_operand(expr.left)}; {_game_tail(expr.right, (Seq,))}"


@to_text.register(Star)
def _(expr):
    return f"{_game_operand(expr.body, postfix=True)}^*"


@to_text.register(DStar)
def _(expr):
    return f"{_game_operand(expr.body, postfix=True)}^x"


@to_text.register(Dual)
def _(expr):
    if isinstance(expr.body, (Atom, Var)):
        return f"({to_text(expr.body)})^d"
    return f"{_game_operand(expr.body, postfix=True)}^d"


@to_text.register(Rec)
def _(expr):
    return f"rec {expr.var}. {_body(expr.body)}"


@to_text.register(CoRec)
def _(expr):
    return f"corec {expr.var}. {_body(expr.body)}"


@to_text.register(RecSystem)
def _(expr):
    keyword = "rec" if expr.kind is FixKind.MU else "corec"
    names = ", ".join(expr.variables)
    bodies = ", ".join(to_text(b) for b in expr.bodies)
    return f"{keyword}[{expr.index}] ({names}). ({bodies})"


# Fixpoint logic with chop

_FLC_PRIMARY = (Id, FTop, FBot, FVar, FProp, FNegProp, Dia, Box)


def _flc_primary(expr) -> str:
    text = to_text(expr)
    return text if isinstance(expr, _FLC_PRIMARY) else f"({text})"


def _flc_postfix(expr) -> str:
    text = to_text(expr)
    return text if isinstance(expr, _FLC_PRIMARY + (StarFix, DStarFix)) else f"({text})"


def _flc_tail(expr, same) -> str:
    if isinstance(expr, same + (Mu, Nu, StarFix, DStarFix) + _FLC_PRIMARY):
        return to_text(expr)
    return f"({to_text(expr)})"


@to_text.register(Id)
def _(expr):
    return "id"


@to_text.register(FOr)
def _(expr):
    return f"{_flc_postfix(expr.left)} \\/ {_flc_tail(expr.right, (FOr,))}"


@to_text.register(FAnd)
def _(expr):
    return f"{_flc_postfix(expr.left)} /\\ {_flc_tail(expr.right, (FAnd,))}"


@to_text.register(Chop)
def _(expr):
    return f"{_flc_postfix(expr.left)}; {_flc_tail(expr.right, (Chop,))}"


@to_text.register(Dia)
def _(expr):
    return f"<{expr.atom}> {_flc_primary(expr.body)}"


@to_text.register(Box)
def _(expr):
    return f"[{expr.atom}] {_flc_primary(expr.body)}"


@to_text.register(Mu)
def _(expr):
    return f"mu {expr.var}. {_body(expr.body)}"


@to_text.register(Nu)
def _(expr):
    return f"nu {expr.var}. {_body(expr.body)}"


@to_text.register(StarFix)
def _(expr):
    return f"{_flc_postfix(expr.body)}^*"


@to_text.register(DStarFix)
def _(expr):
    return f"{_flc_postfix(expr.body)}^x"
