"""
Fragment classification and the rank measure
"""

from enum import Enum
from functools import lru_cache

from .exceptions import NormalFormViolation
from .rewrite import desugar_star, free_vars, normal_form
from .terms import (
    And, Atom, Bot, Box, Chop, Choice, CoRec, DChoice, Dia, DStar, DStarFix,
    DTest, Diamond, Dual, DualAtom, DualVar, FAnd, FBot, FlcExpr, FNegProp, FOr,
    FProp, FTop, FVar, Id, Mu, Neg, NegProp, Nu, Or, Prop, Rec, RecSystem, Seq,
    Star, StarFix, Test, Top, TrapA, TrapD, Var, children, walk,
)


class Fragment(Enum):
    GL = "GL"
    GLS = "GLs"
    RGL = "RGL"
    RLGL = "rlGL"
    LMU = "Lmu"
    LSTAR = "Lstar"
    LSEP = "Lsep"
    POOR_TEST = "PoorTest"

    @classmethod
    def parse(cls, tag: str) -> "Fragment":
        for member in cls:
            if member.value.lower() == tag.lower() or member.name.lower() == tag.lower():
                return member
        raise ValueError(f"unknown fragment {tag!r}")


_TRAPS = (TrapA, TrapD)
_RECURSION = (Rec, CoRec, RecSystem, Var, DualVar)
_LITERAL_TESTS = (Prop, NegProp, Top, Bot)


def _is_game_logic(expr) -> bool:
    return not isinstance(expr, FlcExpr)


def _tests_closed(expr) -> bool:
    return all(not free_vars(node.body) for node in walk(expr)
               if isinstance(node, (Test, DTest)))


def _normalizable(expr) -> bool:
    try:
        normal_form(expr)
    except NormalFormViolation:
        return False
    return True


def is_right_linear(expr) -> bool:
    """No subgame a; b has a free fixpoint variable in a"""
    return all(not free_vars(node.left) for node in walk(expr) if isinstance(node, Seq))


def is_chop_linear(expr) -> bool:
    """No subformula f; g has a free fixpoint variable in f"""
    return all(not free_vars(node.left) for node in walk(expr) if isinstance(node, Chop))


def _is_gl(expr) -> bool:
    return not any(isinstance(n, _TRAPS + _RECURSION) for n in walk(expr))


def _is_gls(expr) -> bool:
    return not any(isinstance(n, _RECURSION) for n in walk(expr))


def _is_rgl(expr) -> bool:
    if any(isinstance(n, _TRAPS) for n in walk(expr)):
        return False
    return _tests_closed(expr) and _normalizable(expr)


def _is_rlgl(expr) -> bool:
    if not _is_rgl(expr):
        return False
    return is_right_linear(desugar_star(normal_form(expr)))


def _is_lmu(expr) -> bool:
    return not any(isinstance(n, (Chop, Id, StarFix, DStarFix)) for n in walk(expr))


def _is_lstar(expr) -> bool:
    return not any(isinstance(n, (Mu, Nu, FVar)) for n in walk(expr))


def _separable(f) -> bool:
    if isinstance(f, (Mu, Nu)):
        return separable_split(f) is not None
    if isinstance(f, (FOr, FAnd)):
        return _separable(f.left) and _separable(f.right)
    if isinstance(f, (Dia, Box)):
        return _separable(f.body)
    return isinstance(f, (FProp, FNegProp, FTop, FBot, FVar))


def separable_split(f):
    """For mu x. (psi \\/ rho) or nu x. (psi /\\ rho), return (psi, rho) or None

    rho must not mention x, psi may mention no free variable besides x, and
    both parts must be separable in turn.
    """
    join = FOr if isinstance(f, Mu) else FAnd
    if not isinstance(f.body, join):
        return None
    for psi, rho in ((f.body.left, f.body.right), (f.body.right, f.body.left)):
        if f.var in free_vars(rho):
            continue
        if not free_vars(psi) <= {f.var}:
            continue
        if _separable(psi) and _separable(rho):
            return psi, rho
    return None


def _is_poor_test(expr) -> bool:
    return all(isinstance(n.body, _LITERAL_TESTS) for n in walk(expr)
               if isinstance(n, (Test, DTest)))


def check_fragment(expr, tag: Fragment) -> bool:
    """Decide membership of `expr` in a syntactic fragment"""
    if tag in (Fragment.LMU, Fragment.LSTAR, Fragment.LSEP):
        if _is_game_logic(expr):
            return False
        if tag is Fragment.LMU:
            return _is_lmu(expr)
        if tag is Fragment.LSTAR:
            return _is_lstar(expr)
        return _is_lmu(expr) and _separable(expr)
    if not _is_game_logic(expr):
        return False
    if tag is Fragment.GL:
        return _is_gl(expr)
    if tag is Fragment.GLS:
        return _is_gls(expr)
    if tag is Fragment.RGL:
        return _is_rgl(expr)
    if tag is Fragment.RLGL:
        return _is_rlgl(expr)
    return _is_poor_test(expr)


def fragments_of(expr):
    """Every fragment `expr` belongs to, in declaration order"""
    return [tag for tag in Fragment if check_fragment(expr, tag)]


def star_depth(expr) -> int:
    """Nesting depth of iterations (game stars and FLC iterations)"""
    inner = max((star_depth(c) for c in children(expr)), default=0)
    if isinstance(expr, (Star, DStar, StarFix, DStarFix)):
        return inner + 1
    return inner


def rank(expr) -> int:
    """Well-founded measure on formulas and games of recursive game logic

    Stars count through their desugaring; negation and duals are normalized
    first.
    """
    return _rank(desugar_star(normal_form(expr)))


@lru_cache(maxsize=4096)
def _rank(expr) -> int:
    if isinstance(expr, (Prop, NegProp, Top, Bot, Atom, DualAtom, Var, TrapA, TrapD)):
        return 0
    if isinstance(expr, (Or, And)):
        return max(_rank(expr.left), _rank(expr.right)) + 1
    if isinstance(expr, Diamond):
        return _rank(expr.game) + _rank(expr.body) + 1
    if isinstance(expr, Test):
        return _rank(expr.body) + 2
    if isinstance(expr, DTest):
        return _rank(expr.body) + 3
    if isinstance(expr, (Choice, DChoice)):
        return max(_rank(expr.left), _rank(expr.right)) + 2
    if isinstance(expr, Seq):
        return _rank(expr.left) + _rank(expr.right) + 2
    if isinstance(expr, (Rec, CoRec)):
        return _rank(expr.body) + 1
    if isinstance(expr, RecSystem):
        return max(_rank(b) for b in expr.bodies) + 1
    if isinstance(expr, (Neg, Dual, DualVar, Star, DStar)):
        raise TypeError(f"{type(expr).__name__} must be normalized before ranking")
    raise TypeError(f"rank is undefined on {type(expr).__name__}")
