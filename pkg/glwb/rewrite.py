"""
Syntactic transformations: normal form, FLC negation, substitution,
bound renaming and star desugaring
"""

import logging
from typing import Dict, FrozenSet, Mapping, Optional, Set

from .exceptions import CaptureError, NormalFormViolation, UnsupportedNegation
from .terms import (
    And, Atom, Bot, Box, Chop, Choice, CoRec, DChoice, Dia, DStar, DStarFix,
    DTest, Diamond, Dual, DualAtom, DualVar, Expr, FAnd, FBot, FixKind, FNegProp,
    FOr, FProp, FTop, FVar, FreshNames, Id, Mu, Neg, NegProp, Nu, Or, Prop, Rec,
    RecSystem, Seq, Star, StarFix, Test, Top, TrapA, TrapD, Var, binder_of,
    children, map_children, names_in, walk,
)


logger = logging.getLogger(__name__)


# Normal form

def normal_form(expr):
    """Push negation to propositions and duality to atoms, variables and traps

    Raises:
        NormalFormViolation: a variable occurs under an odd number of duals
            relative to its binder
    """
    if isinstance(expr, (Top, Bot, Prop, NegProp, Neg, Or, And, Diamond)):
        return _nf_form(expr, False, {})
    return _nf_game(expr, False, {})


def complement(formula):
    """Syntactic complement of a formula, in normal form"""
    return _nf_form(formula, True, {})


def dual_game(game):
    """Syntactic dual of a game, in normal form"""
    return _nf_game(game, True, {})


def _nf_form(f, negated: bool, parity: Dict[str, bool]):
    if isinstance(f, Top):
        return Bot() if negated else f
    if isinstance(f, Bot):
        return Top() if negated else f
    if isinstance(f, Prop):
        return NegProp(f.name) if negated else f
    if isinstance(f, NegProp):
        return Prop(f.name) if negated else f
    if isinstance(f, Neg):
        return _nf_form(f.body, not negated, parity)
    if isinstance(f, (Or, And)):
        flip = isinstance(f, Or) == negated
        kind = And if flip else Or
        return kind(_nf_form(f.left, negated, parity), _nf_form(f.right, negated, parity))
    if isinstance(f, Diamond):
        return Diamond(_nf_game(f.game, negated, parity), _nf_form(f.body, negated, parity))
    raise TypeError(f"not a game logic formula: {f!r}")


def _nf_variable(name: str, dual: bool, parity: Dict[str, bool]):
    if dual != parity.get(name, False):
        raise NormalFormViolation(f"variable {name} occurs under an odd number of duals")
    return Var(name)


def _nf_game(g, dual: bool, parity: Dict[str, bool]):
    if isinstance(g, Atom):
        return DualAtom(g.name) if dual else g
    if isinstance(g, DualAtom):
        return Atom(g.name) if dual else g
    if isinstance(g, Var):
        return _nf_variable(g.name, dual, parity)
    if isinstance(g, DualVar):
        return _nf_variable(g.name, not dual, parity)
    if isinstance(g, TrapA):
        return TrapD(g.name) if dual else g
    if isinstance(g, TrapD):
        return TrapA(g.name) if dual else g
    if isinstance(g, (Test, DTest)):
        kind = (DTest if isinstance(g, Test) else Test) if dual else type(g)
        return kind(_nf_form(g.body, False, parity))
    if isinstance(g, (Choice, DChoice)):
        kind = (DChoice if isinstance(g, Choice) else Choice) if dual else type(g)
        return kind(_nf_game(g.left, dual, parity), _nf_game(g.right, dual, parity))
    if isinstance(g, Seq):
        return Seq(_nf_game(g.left, dual, parity), _nf_game(g.right, dual, parity))
    if isinstance(g, (Star, DStar)):
        kind = (DStar if isinstance(g, Star) else Star) if dual else type(g)
        return kind(_nf_game(g.body, dual, parity))
    if isinstance(g, Dual):
        return _nf_game(g.body, not dual, parity)
    if isinstance(g, (Rec, CoRec)):
        kind = (CoRec if isinstance(g, Rec) else Rec) if dual else type(g)
        inner = {**parity, g.var: dual}
        return kind(g.var, _nf_game(g.body, dual, inner))
    if isinstance(g, RecSystem):
        inner = {**parity, **{x: dual for x in g.variables}}
        kind = g.kind.dual if dual else g.kind
        bodies = tuple(_nf_game(b, dual, inner) for b in g.bodies)
        return RecSystem(kind, g.variables, bodies, g.index)
    raise TypeError(f"not a game: {g!r}")


def is_normal(expr) -> bool:
    return not any(isinstance(node, (Neg, Dual, DualVar)) for node in walk(expr))


# Negation in fixpoint logic with chop

def flc_negate(f):
    """Syntactic complement of an Lmu formula

    Raises:
        UnsupportedNegation: the formula contains chop, id or an iteration
    """
    if isinstance(f, FProp):
        return FNegProp(f.name)
    if isinstance(f, FNegProp):
        return FProp(f.name)
    if isinstance(f, FTop):
        return FBot()
    if isinstance(f, FBot):
        return FTop()
    if isinstance(f, FVar):
        return f
    if isinstance(f, FOr):
        return FAnd(flc_negate(f.left), flc_negate(f.right))
    if isinstance(f, FAnd):
        return FOr(flc_negate(f.left), flc_negate(f.right))
    if isinstance(f, Dia):
        return Box(f.atom, flc_negate(f.body))
    if isinstance(f, Box):
        return Dia(f.atom, flc_negate(f.body))
    if isinstance(f, Mu):
        return Nu(f.var, flc_negate(f.body))
    if isinstance(f, Nu):
        return Mu(f.var, flc_negate(f.body))
    if isinstance(f, (Chop, Id, StarFix, DStarFix)):
        raise UnsupportedNegation(f"cannot negate {type(f).__name__} syntactically")
    raise TypeError(f"not an FLC formula: {f!r}")


# Free names

def free_vars(expr) -> FrozenSet[str]:
    """Free fixpoint variables (game variables or FLC variables)"""
    if isinstance(expr, (Var, DualVar, FVar)):
        return frozenset((expr.name,))
    found: Set[str] = set()
    for child in children(expr):
        found |= free_vars(child)
    return frozenset(found - set(binder_of(expr)))


def bound_vars(expr) -> Set[str]:
    result: Set[str] = set()
    for node in walk(expr):
        result.update(binder_of(node))
    return result


def sabotage_atoms(expr) -> FrozenSet[str]:
    """Atomic games that occur under a trap"""
    return frozenset(n.name for n in walk(expr) if isinstance(n, (TrapA, TrapD)))


def atoms(expr) -> FrozenSet[str]:
    """All atomic games, trapped or played"""
    found = set()
    for node in walk(expr):
        if isinstance(node, (Atom, DualAtom, TrapA, TrapD)):
            found.add(node.name)
        elif isinstance(node, (Dia, Box)):
            found.add(node.atom)
    return frozenset(found)


def props(expr) -> FrozenSet[str]:
    return frozenset(n.name for n in walk(expr)
                     if isinstance(n, (Prop, NegProp, FProp, FNegProp)))


def is_well_named(expr) -> bool:
    seen: Set[str] = set()
    for node in walk(expr):
        for var in binder_of(node):
            if var in seen:
                return False
            seen.add(var)
    return not (seen & free_vars(expr))


# Substitution

def substitute(target, assignment: Mapping[str, Expr]):
    """Simultaneously replace free variable occurrences

    Args:
        target: formula, game or FLC formula
        assignment: variable name to replacement

    Raises:
        CaptureError: a binder of `target` would capture a free variable of a
            replacement
    """
    if not assignment:
        return target
    return _subst(target, dict(assignment))


def _dual_of(replacement):
    if isinstance(replacement, Atom):
        return DualAtom(replacement.name)
    if isinstance(replacement, Var):
        return DualVar(replacement.name)
    return Dual(replacement)


def _subst(expr, assignment: Dict[str, Expr]):
    if isinstance(expr, (Var, FVar)):
        return assignment.get(expr.name, expr)
    if isinstance(expr, DualVar):
        if expr.name in assignment:
            return _dual_of(assignment[expr.name])
        return expr
    bound = binder_of(expr)
    if bound:
        inner = {x: r for x, r in assignment.items() if x not in bound}
        live = free_vars(expr)
        for x, replacement in inner.items():
            if x not in live:
                continue
            captured = set(bound) & free_vars(replacement)
            if captured:
                raise CaptureError(bound[0] if len(bound) == 1 else ",".join(bound),
                                   sorted(captured)[0])
        if not inner:
            return expr
        return map_children(expr, lambda child: _subst(child, inner))
    return map_children(expr, lambda child: _subst(child, assignment))


def substitute_atoms(target, mapping: Mapping[type, Dict[str, Expr]]):
    """Replace nodes of given leaf types by name, e.g. {TrapA: {"b": Atom("s_b")}}"""
    def go(expr):
        table = mapping.get(type(expr))
        if table is not None and getattr(expr, "name", None) in table:
            return table[expr.name]
        return map_children(expr, go)
    return go(target)


# Bound renaming

def rename_bound(expr):
    """Rename binders so that no variable is bound twice or both free and bound"""
    taken = set(names_in(expr)) | set(free_vars(expr))
    used = set(free_vars(expr))
    return _rename(expr, {}, used, taken)


def _pick(var: str, used: Set[str], taken: Set[str]) -> str:
    if var not in used:
        return var
    k = 1
    while f"{var}{k}" in used or f"{var}{k}" in taken:
        k += 1
    return f"{var}{k}"


def _rename(expr, mapping: Dict[str, str], used: Set[str], taken: Set[str]):
    if isinstance(expr, (Var, DualVar, FVar)):
        return type(expr)(mapping.get(expr.name, expr.name))
    if isinstance(expr, (Rec, CoRec, Mu, Nu)):
        new = _pick(expr.var, used, taken)
        used.add(new)
        taken.add(new)
        body = _rename(expr.body, {**mapping, expr.var: new}, used, taken)
        return type(expr)(new, body)
    if isinstance(expr, RecSystem):
        fresh = []
        for var in expr.variables:
            new = _pick(var, used, taken)
            used.add(new)
            taken.add(new)
            fresh.append(new)
        inner = {**mapping, **dict(zip(expr.variables, fresh))}
        bodies = tuple(_rename(b, inner, used, taken) for b in expr.bodies)
        return RecSystem(expr.kind, tuple(fresh), bodies, expr.index)
    return map_children(expr, lambda child: _rename(child, mapping, used, taken))


# Star desugaring

def desugar_star(expr, fresh: Optional[FreshNames] = None):
    """Replace a^* by rec z. (a; z ∪ ?true) and a^x by corec z. (a; z ∩ !true)"""
    fresh = fresh or FreshNames()
    avoid = set(names_in(expr))

    def go(node):
        if isinstance(node, (Star, DStar)):
            body = go(node.body)
            var = fresh.fresh("z_fix", avoid=avoid)
            avoid.add(var)
            if isinstance(node, Star):
                return Rec(var, Choice(Seq(body, Var(var)), Test(Top())))
            return CoRec(var, DChoice(Seq(body, Var(var)), DTest(Top())))
        return map_children(node, go)

    return go(expr)


def unfold_fixpoint(game):
    """One unrolling: rec x. a becomes a[x := rec x. a]"""
    if isinstance(game, (Rec, CoRec)):
        return substitute(game.body, {game.var: game})
    if isinstance(game, RecSystem):
        components = {x: RecSystem(game.kind, game.variables, game.bodies, i)
                      for i, x in enumerate(game.variables)}
        return substitute(game.bodies[game.index], components)
    raise TypeError(f"not a fixpoint: {game!r}")


def fixkind_of(game) -> FixKind:
    if isinstance(game, (Rec, Mu)):
        return FixKind.MU
    if isinstance(game, (CoRec, Nu)):
        return FixKind.NU
    return game.kind
