"""
Axiom and rule schemas of the Hilbert calculi

Schemas are instantiated from explicit metavariable assignments; nothing is
matched. Side conditions are checked separately by check_side_condition.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import (
    Any, Callable, Collection, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence,
    Tuple, Union,
)

from .exceptions import IncompleteInstantiation, PartitionViolation, SideConditionViolation
from .fragments import Fragment, check_fragment
from .printer import to_text
from .rewrite import atoms, flc_negate, free_vars, substitute, substitute_atoms
from .terms import (
    And, Atom, Box, Choice, CoRec, DChoice, DStar, DTest, Dia, Diamond, Dual, DualAtom,
    FAnd, FixKind, FOr, FTop, FVar, Mu, Neg, Nu, Or, Rec, Seq, Star, Test, Top, TrapA,
    TrapD, Var, Bot, children, choice, implies, iff, names_in, seq, walk,
)


logger = logging.getLogger(__name__)


class SchemaId(Enum):
    TAUT = "Taut"
    FP = "fp"
    ALPHA = "alpha"
    MP = "MP"
    MU_RULE = "MuRule"
    MON_A = "Mon_a"
    BOX_AND = "BoxAnd"
    K = "K"
    BOX_TOP = "BoxTop"
    G_NOT = "GNot"
    G_TEST = "GTest"
    G_CHOICE = "GChoice"
    G_COMP = "GComp"
    G_FP = "GFp"
    G_ALPHA = "GAlpha"
    G_MU_RULE = "GMuRule"
    G_MON = "GMon"
    G_STAR_FP = "GStarFp"
    G_STAR_MU = "GStarMu"
    S_ASAB = "SAsab"
    S_DSAB = "SDsab"
    S_BRANCH = "SBranch"
    S_SAB_P = "SSabP"
    S_SAB_REM = "SSabRem"
    S_SAB_NOT_YET = "SSabNotYet"
    AFRAK = "AFrak"
    G_DTEST = "GDTest"
    G_DCHOICE = "GDChoice"
    G_NU_RULE = "GNuRule"

    @classmethod
    def parse(cls, name: str) -> "SchemaId":
        for member in cls:
            if member.value.lower() == name.lower():
                return member
        raise ValueError(f"unknown schema {name!r}")


class MetaKind(Enum):
    FORMULA = "formula"
    GAME = "game"
    ATOM = "atom"
    VARIABLE = "variable"
    FIXKIND = "fixkind"
    INDEX = "index"
    GAMES = "games"
    ATOMS = "atoms"
    VARIABLES = "variables"
    SCHEMA = "schema"
    ATOMSET = "atomset"
    MAPPING = "mapping"


# Vector kinds are written [..]; GAMES entries may be omitted as `_`
VECTOR_KINDS = (MetaKind.GAMES, MetaKind.ATOMS, MetaKind.VARIABLES)
NAME_KINDS = (MetaKind.VARIABLE, MetaKind.VARIABLES)

Instantiation = Dict[str, Any]


@dataclass(frozen=True)
class RuleInstance:
    """Premises and conclusion of an instantiated rule"""
    premises: Tuple[Any, ...]
    conclusion: Any


@dataclass(frozen=True)
class Schema:
    """
    Signature of a schema with:
    - its metavariables and their kinds, in declaration order
    - the metavariables that may be left out
    - the number of premises (0 for axioms)
    - whether its formulas are written in the FLC grammar
    """
    id: SchemaId
    metavariables: Tuple[Tuple[str, MetaKind], ...]
    premises: int = 0
    optional: FrozenSet[str] = frozenset()
    flc: Optional[bool] = None

    @property
    def is_rule(self) -> bool:
        return self.premises > 0

    def kind_of(self, name: str) -> MetaKind:
        return dict(self.metavariables)[name]

    def names(self) -> List[str]:
        return [name for name, _ in self.metavariables]


F, G, A, X = MetaKind.FORMULA, MetaKind.GAME, MetaKind.ATOM, MetaKind.VARIABLE
GS, AS, XS = MetaKind.GAMES, MetaKind.ATOMS, MetaKind.VARIABLES

_SAB_VECTORS = frozenset({"x", "beta", "y", "gamma", "z", "delta"})

SCHEMAS: Dict[SchemaId, Schema] = {s.id: s for s in (
    Schema(SchemaId.TAUT, (("phi", F),)),
    Schema(SchemaId.MP, (("phi", F), ("psi", F)), premises=2),
    Schema(SchemaId.FP, (("x", X), ("phi", F)), flc=True),
    Schema(SchemaId.ALPHA, (("kind", MetaKind.FIXKIND), ("x", X), ("y", X), ("phi", F)), flc=True),
    Schema(SchemaId.MU_RULE, (("x", X), ("phi", F), ("psi", F)), premises=1, flc=True),
    Schema(SchemaId.MON_A, (("a", A), ("phi", F), ("psi", F)), premises=1, flc=True),
    Schema(SchemaId.BOX_AND, (("a", A), ("phi", F), ("psi", F))),
    Schema(SchemaId.K, (("a", A), ("phi", F), ("psi", F))),
    Schema(SchemaId.BOX_TOP, (("a", A),)),
    Schema(SchemaId.G_NOT, (("alpha", G), ("phi", F)), flc=False),
    Schema(SchemaId.G_TEST, (("phi", F), ("psi", F)), flc=False),
    Schema(SchemaId.G_DTEST, (("phi", F), ("psi", F)), flc=False),
    Schema(SchemaId.G_CHOICE, (("alpha", G), ("beta", G), ("phi", F)), flc=False),
    Schema(SchemaId.G_DCHOICE, (("alpha", G), ("beta", G), ("phi", F)), flc=False),
    Schema(SchemaId.G_COMP, (("alpha", G), ("beta", G), ("phi", F)), flc=False),
    Schema(SchemaId.G_FP, (("x", X), ("alpha", G), ("phi", F)), flc=False),
    Schema(SchemaId.G_ALPHA, (("kind", MetaKind.FIXKIND), ("x", X), ("y", X), ("alpha", G),
                              ("phi", F)), flc=False),
    Schema(SchemaId.G_MU_RULE, (("x", X), ("alpha", G), ("beta", G), ("psi", F), ("phi", F)),
           premises=1, flc=False),
    Schema(SchemaId.G_NU_RULE, (("x", X), ("alpha", G), ("beta", G), ("psi", F), ("rho", F)),
           premises=1, flc=False),
    Schema(SchemaId.G_MON, (("alpha", G), ("phi", F), ("psi", F)), premises=1, flc=False),
    Schema(SchemaId.G_STAR_FP, (("alpha", G), ("phi", F)), flc=False),
    Schema(SchemaId.G_STAR_MU, (("alpha", G), ("rho", F), ("psi", F)), premises=1, flc=False),
    Schema(SchemaId.S_ASAB, (("a", A), ("x", XS), ("y", XS), ("z", XS), ("alpha", G),
                             ("beta", GS), ("gamma", GS), ("delta", GS), ("phi", F)),
           optional=_SAB_VECTORS, flc=False),
    Schema(SchemaId.S_DSAB, (("a", A), ("x", XS), ("y", XS), ("z", XS), ("alpha", G),
                             ("beta", GS), ("gamma", GS), ("delta", GS), ("phi", F)),
           optional=_SAB_VECTORS, flc=False),
    Schema(SchemaId.S_BRANCH, (("a", AS), ("i", MetaKind.INDEX), ("w", X), ("beta", GS),
                               ("alpha", G), ("rest", G), ("phi", F)),
           optional=frozenset({"beta", "rest"}), flc=False),
    Schema(SchemaId.S_SAB_P, (("a", A), ("x", X), ("alpha", G), ("phi", F)), flc=False),
    Schema(SchemaId.S_SAB_REM, (("a", A), ("x", XS), ("y", XS), ("alpha", G), ("eta", GS),
                                ("delta", GS), ("beta", GS), ("phi", F)),
           optional=frozenset({"x", "eta", "beta"}), flc=False),
    Schema(SchemaId.S_SAB_NOT_YET, (("a", A), ("x", X), ("y", X), ("alpha", G), ("beta", G),
                                    ("eta", G), ("phi", F)),
           optional=frozenset({"beta"}), flc=False),
    Schema(SchemaId.AFRAK, (("base", MetaKind.SCHEMA), ("g2", MetaKind.ATOMSET),
                            ("sb", MetaKind.MAPPING)), flc=False),
)}

SABOTAGE_SCHEMAS = frozenset({
    SchemaId.S_ASAB, SchemaId.S_DSAB, SchemaId.S_BRANCH, SchemaId.S_SAB_P,
    SchemaId.S_SAB_REM, SchemaId.S_SAB_NOT_YET,
})

DEFAULT_AFRAK_MEMBERS = (SchemaId.S_ASAB, SchemaId.S_DSAB, SchemaId.S_SAB_REM)


def schema(schema_id: SchemaId) -> Schema:
    return SCHEMAS[schema_id]


def signature(schema_id: SchemaId, inst: Mapping[str, Any]) -> Schema:
    """Signature of a schema; AFrak also takes every metavariable of its base"""
    base = SCHEMAS[schema_id]
    if schema_id is not SchemaId.AFRAK or "base" not in inst:
        return base
    member = SCHEMAS[inst["base"]]
    return Schema(base.id, base.metavariables + member.metavariables, member.premises,
                  member.optional, False)


# Connectives of the two formula languages

class _Connectives:
    def __init__(self, flc: bool):
        self.flc = flc

    def neg(self, f):
        return flc_negate(f) if self.flc else Neg(f)

    def implies(self, left, right):
        return FOr(flc_negate(left), right) if self.flc else implies(left, right)

    def iff(self, left, right):
        if self.flc:
            return FAnd(self.implies(left, right), self.implies(right, left))
        return iff(left, right)

    def conj(self, left, right):
        return FAnd(left, right) if self.flc else And(left, right)

    def top(self):
        return FTop() if self.flc else Top()

    def box(self, atom: str, body):
        return Box(atom, body) if self.flc else Diamond(DualAtom(atom), body)


def _opt(entry) -> Tuple:
    return () if entry is None else (entry,)


def _vector(inst: Mapping[str, Any], name: str, length: Optional[int] = None) -> Tuple:
    value = inst.get(name)
    if value is None:
        return (None,) * (length or 0)
    return tuple(value)


def _paired(inst: Mapping[str, Any], names: str, values: str) -> Tuple[Tuple, Tuple]:
    variables = _vector(inst, names)
    entries = _vector(inst, values, len(variables))
    if len(entries) != len(variables):
        raise IncompleteInstantiation(
            f"{values} has {len(entries)} entries for {len(variables)} variables in {names}"
        )
    return variables, entries


def _check_complete(sig: Schema, inst: Mapping[str, Any]):
    missing = [name for name in sig.names() if name not in sig.optional and inst.get(name) is None]
    if missing:
        raise IncompleteInstantiation(f"{sig.id.value} misses {', '.join(missing)}")
    unknown = set(inst) - set(sig.names())
    if unknown:
        raise IncompleteInstantiation(f"{sig.id.value} has no metavariable {', '.join(sorted(unknown))}")


# Instances

def _fp(inst, c):
    x, phi = inst["x"], inst["phi"]
    fix = Mu(x, phi)
    return c.implies(substitute(phi, {x: fix}), fix)


def _alpha(inst, c):
    binder = Mu if inst["kind"] is FixKind.MU else Nu
    x, y, phi = inst["x"], inst["y"], inst["phi"]
    return c.iff(binder(x, phi), binder(y, substitute(phi, {x: FVar(y)})))


def _mu_rule(inst, c):
    x, phi, psi = inst["x"], inst["phi"], inst["psi"]
    premise = c.implies(substitute(phi, {x: psi}), psi)
    return RuleInstance((premise,), c.implies(Mu(x, phi), psi))


def _mon_a(inst, c):
    a, phi, psi = inst["a"], inst["phi"], inst["psi"]
    return RuleInstance((c.implies(phi, psi),), c.implies(Dia(a, phi), Dia(a, psi)))


def _box_and(inst, c):
    a, phi, psi = inst["a"], inst["phi"], inst["psi"]
    return c.implies(c.conj(c.box(a, phi), c.box(a, psi)), c.box(a, c.conj(phi, psi)))


def _k(inst, c):
    a, phi, psi = inst["a"], inst["phi"], inst["psi"]
    return c.implies(c.box(a, c.implies(phi, psi)), c.implies(c.box(a, phi), c.box(a, psi)))


def _box_top(inst, c):
    return c.box(inst["a"], c.top())


def _g_not(inst, c):
    alpha, phi = inst["alpha"], inst["phi"]
    return iff(Diamond(Dual(alpha), phi), Neg(Diamond(alpha, Neg(phi))))


def _g_test(inst, c):
    return iff(Diamond(Test(inst["phi"]), inst["psi"]), And(inst["phi"], inst["psi"]))


def _g_dtest(inst, c):
    return iff(Diamond(DTest(inst["phi"]), inst["psi"]), implies(inst["phi"], inst["psi"]))


def _g_choice(inst, c):
    alpha, beta, phi = inst["alpha"], inst["beta"], inst["phi"]
    return iff(Diamond(Choice(alpha, beta), phi), Or(Diamond(alpha, phi), Diamond(beta, phi)))


def _g_dchoice(inst, c):
    alpha, beta, phi = inst["alpha"], inst["beta"], inst["phi"]
    return iff(Diamond(DChoice(alpha, beta), phi), And(Diamond(alpha, phi), Diamond(beta, phi)))


def _g_comp(inst, c):
    alpha, beta, phi = inst["alpha"], inst["beta"], inst["phi"]
    return iff(Diamond(Seq(alpha, beta), phi), Diamond(alpha, Diamond(beta, phi)))


def _g_fp(inst, c):
    x, alpha, phi = inst["x"], inst["alpha"], inst["phi"]
    fix = Rec(x, alpha)
    return implies(Diamond(substitute(alpha, {x: fix}), phi), Diamond(fix, phi))


def _g_alpha(inst, c):
    binder = Rec if inst["kind"] is FixKind.MU else CoRec
    x, y, alpha, phi = inst["x"], inst["y"], inst["alpha"], inst["phi"]
    renamed = binder(y, substitute(alpha, {x: Var(y)}))
    return iff(Diamond(binder(x, alpha), phi), Diamond(renamed, phi))


def _constant_game(beta, psi):
    """beta;?psi;!false, the constant game with value <beta>psi"""
    return seq(beta, Test(psi), DTest(Bot()))


def _g_mu_rule(inst, c):
    x, alpha, beta, psi, phi = (inst[k] for k in ("x", "alpha", "beta", "psi", "phi"))
    bound = Diamond(beta, psi)
    premise = implies(Diamond(substitute(alpha, {x: _constant_game(beta, psi)}), phi), bound)
    return RuleInstance((premise,), implies(Diamond(Rec(x, alpha), phi), bound))


def _g_nu_rule(inst, c):
    x, alpha, beta, psi, rho = (inst[k] for k in ("x", "alpha", "beta", "psi", "rho"))
    bound = Diamond(beta, psi)
    premise = implies(bound, Diamond(substitute(alpha, {x: _constant_game(beta, psi)}), rho))
    return RuleInstance((premise,), implies(bound, Diamond(CoRec(x, alpha), rho)))


def _g_mon(inst, c):
    alpha, phi, psi = inst["alpha"], inst["phi"], inst["psi"]
    return RuleInstance((implies(phi, psi),), implies(Diamond(alpha, phi), Diamond(alpha, psi)))


def _g_star_fp(inst, c):
    alpha, phi = inst["alpha"], inst["phi"]
    return implies(Or(phi, Diamond(alpha, Diamond(Star(alpha), phi))), Diamond(Star(alpha), phi))


def _g_star_mu(inst, c):
    alpha, rho, psi = inst["alpha"], inst["rho"], inst["psi"]
    premise = implies(Or(rho, Diamond(alpha, psi)), psi)
    return RuleInstance((premise,), implies(Diamond(Star(alpha), rho), psi))


def _sabotage_sides(inst, angel: bool):
    a = inst["a"]
    xs, betas = _paired(inst, "x", "beta")
    ys, gammas = _paired(inst, "y", "gamma")
    zs, deltas = _paired(inst, "z", "delta")
    left: Dict[str, Any] = {}
    right: Dict[str, Any] = {}
    trap = TrapA(a) if angel else TrapD(a)
    for x, beta in zip(xs, betas):
        left[x] = seq(Atom(a), *_opt(beta))
        right[x] = seq(trap, *_opt(beta)) if angel else Test(Bot())
    for y, gamma in zip(ys, gammas):
        left[y] = seq(DualAtom(a), *_opt(gamma))
        right[y] = DTest(Bot()) if angel else seq(trap, *_opt(gamma))
    for z, delta in zip(zs, deltas):
        left[z] = seq(*_opt(delta))
        right[z] = seq(trap, *_opt(delta))
    alpha, phi = inst["alpha"], inst["phi"]
    return (Diamond(trap, Diamond(substitute(alpha, left), phi)),
            Diamond(substitute(alpha, right), phi))


def _s_asab(inst, c):
    return iff(*_sabotage_sides(inst, True))


def _s_dsab(inst, c):
    return iff(*_sabotage_sides(inst, False))


def _branch_windows(inst) -> List[Tuple]:
    """The trap sequences ~'a_1;...;~'a_n;~a_k;beta_k, one per k"""
    names = tuple(inst["a"])
    betas = _vector(inst, "beta", len(names))
    if len(betas) != len(names):
        raise IncompleteInstantiation(f"beta has {len(betas)} entries for {len(names)} atoms")
    reset = tuple(TrapD(a) for a in names)
    return [reset + (TrapA(a),) + (_flatten_seq(beta) if beta is not None else ())
            for a, beta in zip(names, betas)]


def _s_branch(inst, c):
    names = tuple(inst["a"])
    i = inst["i"]
    if not 1 <= i <= len(names):
        raise IncompleteInstantiation(f"branch index {i} outside 1..{len(names)}")
    betas = _vector(inst, "beta", len(names))
    windows = _branch_windows(inst)
    rest = inst.get("rest") or Test(Top())
    alpha, w, phi = inst["alpha"], inst["w"], inst["phi"]
    union = choice(*(seq(Atom(a), *_opt(beta)) for a, beta in zip(names, betas)))
    plain = Diamond(substitute(alpha, {w: rest}), phi)
    branched = Diamond(substitute(alpha, {w: Seq(union, rest)}), phi)
    return Diamond(seq(*windows[i - 1]), iff(plain, branched))


def _s_sab_p(inst, c):
    a, x, alpha, phi = inst["a"], inst["x"], inst["alpha"], inst["phi"]
    left = Seq(TrapA(a), substitute(alpha, {x: Atom(a)}))
    right = Seq(TrapA(a), substitute(alpha, {x: Seq(Atom(a), TrapA(a))}))
    return iff(Diamond(left, phi), Diamond(right, phi))


def _s_sab_rem(inst, c):
    xs, etas = _paired(inst, "x", "eta")
    ys, deltas = _paired(inst, "y", "delta")
    betas = _vector(inst, "beta", len(ys))
    if len(betas) != len(ys):
        raise IncompleteInstantiation(f"beta has {len(betas)} entries for {len(ys)} variables in y")
    if any(eta is None for eta in etas) or any(delta is None for delta in deltas):
        raise IncompleteInstantiation("eta and delta entries cannot be omitted")
    tails = {y: seq(delta, *_opt(beta)) for y, delta, beta in zip(ys, deltas, betas)}
    alpha, phi = inst["alpha"], inst["phi"]
    removed = {x: Test(Top()) for x in xs}
    left = substitute(alpha, {**dict(zip(xs, etas)), **tails})
    right = substitute(alpha, {**removed, **tails})
    return iff(Diamond(left, phi), Diamond(right, phi))


def _s_sab_not_yet(inst, c):
    a, x, y, alpha, eta, phi = (inst[k] for k in ("a", "x", "y", "alpha", "eta", "phi"))
    play = seq(Atom(a), *_opt(inst.get("beta")))
    left = substitute(alpha, {x: play, y: TrapD(a)})
    right = substitute(alpha, {x: play, y: Seq(TrapD(a), eta)})
    return iff(Diamond(left, phi), Diamond(right, phi))


def _afrak(inst, c):
    base = inst["base"]
    member = {k: v for k, v in inst.items() if k not in ("base", "g2", "sb")}
    formula = instantiate_schema(base, member)
    return replace_traps(formula, inst["sb"])


_BUILDERS: Dict[SchemaId, Callable] = {
    SchemaId.FP: _fp,
    SchemaId.ALPHA: _alpha,
    SchemaId.MU_RULE: _mu_rule,
    SchemaId.MON_A: _mon_a,
    SchemaId.BOX_AND: _box_and,
    SchemaId.K: _k,
    SchemaId.BOX_TOP: _box_top,
    SchemaId.G_NOT: _g_not,
    SchemaId.G_TEST: _g_test,
    SchemaId.G_DTEST: _g_dtest,
    SchemaId.G_CHOICE: _g_choice,
    SchemaId.G_DCHOICE: _g_dchoice,
    SchemaId.G_COMP: _g_comp,
    SchemaId.G_FP: _g_fp,
    SchemaId.G_ALPHA: _g_alpha,
    SchemaId.G_MU_RULE: _g_mu_rule,
    SchemaId.G_NU_RULE: _g_nu_rule,
    SchemaId.G_MON: _g_mon,
    SchemaId.G_STAR_FP: _g_star_fp,
    SchemaId.G_STAR_MU: _g_star_mu,
    SchemaId.S_ASAB: _s_asab,
    SchemaId.S_DSAB: _s_dsab,
    SchemaId.S_BRANCH: _s_branch,
    SchemaId.S_SAB_P: _s_sab_p,
    SchemaId.S_SAB_REM: _s_sab_rem,
    SchemaId.S_SAB_NOT_YET: _s_sab_not_yet,
    SchemaId.AFRAK: _afrak,
}


def instantiate_schema(schema_id: SchemaId, inst: Mapping[str, Any],
                       flc: bool = False) -> Union[Any, RuleInstance]:
    """Build the formula of an axiom, or premises and conclusion of a rule

    Args:
        schema_id: the schema
        inst: metavariable assignment covering every required metavariable
        flc: build BoxAnd, K, BoxTop, Taut and MP in the FLC grammar

    Returns:
        a formula for axioms, a RuleInstance for rules

    Raises:
        IncompleteInstantiation: a metavariable is missing or a vector has the
            wrong length
    """
    sig = signature(schema_id, inst)
    _check_complete(sig, inst)
    c = _Connectives(sig.flc if sig.flc is not None else flc)
    if schema_id is SchemaId.TAUT:
        return inst["phi"]
    if schema_id is SchemaId.MP:
        phi, psi = inst["phi"], inst["psi"]
        return RuleInstance((phi, c.implies(phi, psi)), psi)
    return _BUILDERS[schema_id](inst, c)


# Side conditions

def _flatten_seq(g) -> Tuple:
    if isinstance(g, Seq):
        return _flatten_seq(g.left) + _flatten_seq(g.right)
    return (g,)


def occurs_right_linearly(game, var: str) -> bool:
    """`var` is never free left of a composition, under a star or inside a test"""
    for node in walk(game):
        if isinstance(node, Seq) and var in free_vars(node.left):
            return False
        if isinstance(node, (Star, DStar, Test, DTest)) and var in free_vars(node.body):
            return False
    return True


def _mentions(expr, atom: str, kinds: Tuple[type, ...]) -> Optional[Any]:
    for node in walk(expr):
        if isinstance(node, kinds) and node.name == atom:
            return node
    return None


_PLAYS = (Atom, DualAtom)
_TRAPS = (TrapA, TrapD)


def _distinct(names: Sequence[str]) -> Optional[str]:
    seen = set()
    for name in names:
        if name in seen:
            return f"variable {name} is substituted twice"
        seen.add(name)
    return None


def _free_within(alpha, allowed: Iterable[str]) -> Optional[str]:
    extra = free_vars(alpha) - set(allowed)
    if extra:
        return f"{to_text(alpha)} has unexpected free variables {', '.join(sorted(extra))}"
    return None


def _right_linear_all(alpha, names: Iterable[str]) -> Optional[str]:
    for name in names:
        if not occurs_right_linearly(alpha, name):
            return f"variable {name} does not occur right-linearly in {to_text(alpha)}"
    return None


def _fresh_for(y: str, x: str, *exprs) -> Optional[str]:
    if y == x:
        return f"{y} is not fresh: it is the renamed variable"
    for expr in exprs:
        if y in names_in(expr):
            return f"{y} is not fresh in {to_text(expr)}"
    return None


def _check_sabotage(inst) -> Optional[str]:
    a, alpha, phi = inst["a"], inst["alpha"], inst["phi"]
    node = _mentions(alpha, a, _PLAYS + _TRAPS)
    if node is not None:
        return f"{to_text(node)} appears in alpha"
    node = _mentions(phi, a, _PLAYS)
    if node is not None:
        return f"{to_text(node)} appears in phi"
    names = _vector(inst, "x") + _vector(inst, "y") + _vector(inst, "z")
    return (_distinct(names) or _free_within(alpha, names)
            or _right_linear_all(alpha, names))


def _is_trap_sequence(g) -> bool:
    return all(isinstance(step, _TRAPS) for step in _flatten_seq(g))


def _window_at(items: Tuple, position: int, windows: Sequence[Tuple]) -> int:
    for window in windows:
        if items[position:position + len(window)] == window:
            return len(window)
    return 0


def _stray_traps(g, relevant: FrozenSet[str], windows: Sequence[Tuple]) -> List:
    """Traps on `relevant` atoms outside every complete window"""
    if isinstance(g, Seq):
        items = _flatten_seq(g)
        stray: List = []
        position = 0
        while position < len(items):
            width = _window_at(items, position, windows)
            if width:
                position += width
                continue
            stray.extend(_stray_traps(items[position], relevant, windows))
            position += 1
        return stray
    if isinstance(g, _TRAPS):
        return [g] if g.name in relevant else []
    return [node for child in children(g) for node in _stray_traps(child, relevant, windows)]


def _check_branch(inst) -> Optional[str]:
    names = tuple(inst["a"])
    if len(set(names)) != len(names):
        return "branch atoms are not distinct"
    betas = [beta for beta in _vector(inst, "beta", len(names)) if beta is not None]
    relevant = set(names)
    for beta in betas:
        if not _is_trap_sequence(beta):
            return f"{to_text(beta)} is not a sequence of trap games"
        trapped = atoms(beta)
        if trapped & set(names):
            return f"{to_text(beta)} traps a branch atom"
        relevant |= trapped
    alpha, w = inst["alpha"], inst["w"]
    stray = _stray_traps(alpha, frozenset(relevant), sorted(_branch_windows(inst), key=len, reverse=True))
    if stray:
        return f"{to_text(stray[0])} appears in alpha outside a branch window"
    return _free_within(alpha, (w,)) or _right_linear_all(alpha, (w,))


def _check_sab_rem(inst) -> Optional[str]:
    a, alpha, phi = inst["a"], inst["alpha"], inst["phi"]
    for name in ("eta", "delta"):
        for entry in _vector(inst, name):
            if entry not in (TrapA(a), TrapD(a)):
                shown = "_" if entry is None else to_text(entry)
                return f"{name} entry {shown} is not a trap on {a}"
    for where, expr in (("alpha", alpha), ("phi", phi)):
        node = _mentions(expr, a, _PLAYS)
        if node is not None:
            return f"{to_text(node)} appears in {where}"
    names = _vector(inst, "x") + _vector(inst, "y")
    return _distinct(names) or _free_within(alpha, names)


def _check_not_yet(inst) -> Optional[str]:
    a, x, y, alpha, eta, phi = (inst[k] for k in ("a", "x", "y", "alpha", "eta", "phi"))
    if not isinstance(eta, _TRAPS) or eta.name == a:
        return f"{to_text(eta)} is not a trap on an atom other than {a}"
    if x == y:
        return f"variable {x} is substituted twice"
    for where, expr in (("alpha", alpha), ("phi", phi)):
        node = _mentions(expr, a, (TrapA,)) or _mentions(expr, eta.name, _PLAYS)
        if node is not None:
            return f"{to_text(node)} appears in {where}"
    return _free_within(alpha, (x, y))


def _check_fixpoint_rule(inst, body: str) -> Optional[str]:
    x, alpha = inst["x"], inst["alpha"]
    if not occurs_right_linearly(alpha, x):
        return f"variable {x} does not occur right-linearly in {to_text(alpha)}"
    for name in ("beta", "psi", body):
        if x in free_vars(inst[name]):
            return f"variable {x} is free in {name}"
    return None


def _check_mu_rule(inst) -> Optional[str]:
    x, phi, psi = inst["x"], inst["phi"], inst["psi"]
    if free_vars(psi):
        return f"psi has free variables {', '.join(sorted(free_vars(psi)))}"
    return _free_within(phi, (x,))


def replace_traps(formula, sb: Mapping[str, str]):
    """TrapA b becomes s_b and TrapD b becomes s_b^d"""
    return substitute_atoms(formula, {
        TrapA: {b: Atom(s) for b, s in sb.items()},
        TrapD: {b: DualAtom(s) for b, s in sb.items()},
    })


def check_partition(g1: Iterable[str], g2: Iterable[str], g3: Iterable[str],
                    sb: Mapping[str, str]):
    """Raises PartitionViolation unless the parts are disjoint and s_b maps g2 injectively into g3"""
    g1, g2, g3 = set(g1), set(g2), set(g3)
    for left, right, label in ((g1, g2, "G1 and G2"), (g1, g3, "G1 and G3"), (g2, g3, "G2 and G3")):
        if left & right:
            raise PartitionViolation(f"{label} share {', '.join(sorted(left & right))}")
    _check_sb(g2, sb, g3)


def _check_sb(g2, sb: Mapping[str, str], g3=None):
    if len(set(sb.values())) != len(sb):
        raise PartitionViolation("s_b is not injective")
    if set(sb.values()) & set(g2):
        raise PartitionViolation(f"s_b hits G2 at {', '.join(sorted(set(sb.values()) & set(g2)))}")
    if g3 is not None and not set(sb.values()) <= set(g3):
        raise PartitionViolation("s_b leaves G3")
    outside = set(sb) - set(g2)
    if outside:
        raise PartitionViolation(f"s_b is defined outside G2 at {', '.join(sorted(outside))}")


def _check_afrak(inst, members: Collection) -> Optional[str]:
    base = inst["base"]
    if base not in members:
        return f"{base.value} is not an AFrak base axiom"
    member = {k: v for k, v in inst.items() if k not in ("base", "g2", "sb")}
    problem = check_side_condition(base, member)
    if problem:
        return problem
    g2, sb = set(inst["g2"]), inst["sb"]
    try:
        _check_sb(g2, sb)
        _afrak_shape(instantiate_schema(base, member), g2, sb)
    except PartitionViolation as e:
        return str(e)
    return None


def _afrak_shape(formula, g2, sb):
    outside = atoms(formula) - set(g2)
    if outside:
        raise PartitionViolation(f"atoms {', '.join(sorted(outside))} are outside G2")
    unmapped = {node.name for node in walk(formula) if isinstance(node, _TRAPS)} - set(sb)
    if unmapped:
        raise PartitionViolation(f"no s_b for trapped atoms {', '.join(sorted(unmapped))}")
    replaced = replace_traps(formula, sb)
    if not check_fragment(replaced, Fragment.GL):
        raise PartitionViolation("the replaced instance is not a game logic formula")
    return replaced


_SIDE_CONDITIONS: Dict[SchemaId, Callable[[Mapping[str, Any]], Optional[str]]] = {
    SchemaId.ALPHA: lambda inst: _fresh_for(inst["y"], inst["x"], inst["phi"]),
    SchemaId.G_ALPHA: lambda inst: _fresh_for(inst["y"], inst["x"], inst["alpha"]),
    SchemaId.FP: lambda inst: _free_within(inst["phi"], (inst["x"],)),
    SchemaId.G_FP: lambda inst: _free_within(inst["alpha"], (inst["x"],)),
    SchemaId.MU_RULE: _check_mu_rule,
    SchemaId.G_MU_RULE: lambda inst: _check_fixpoint_rule(inst, "phi"),
    SchemaId.G_NU_RULE: lambda inst: _check_fixpoint_rule(inst, "rho"),
    SchemaId.S_ASAB: _check_sabotage,
    SchemaId.S_DSAB: _check_sabotage,
    SchemaId.S_BRANCH: _check_branch,
    SchemaId.S_SAB_P: lambda inst: _free_within(inst["alpha"], (inst["x"],)),
    SchemaId.S_SAB_REM: _check_sab_rem,
    SchemaId.S_SAB_NOT_YET: _check_not_yet,
}


def check_side_condition(schema_id: SchemaId, inst: Mapping[str, Any],
                         afrak_members: Collection = DEFAULT_AFRAK_MEMBERS) -> Optional[str]:
    """First violated side condition of an instantiation, or None

    Raises:
        IncompleteInstantiation: the instantiation misses a metavariable
    """
    _check_complete(signature(schema_id, inst), inst)
    if schema_id is SchemaId.AFRAK:
        return _check_afrak(inst, afrak_members)
    check = _SIDE_CONDITIONS.get(schema_id)
    return check(inst) if check else None


def require_side_condition(schema_id: SchemaId, inst: Mapping[str, Any], **options):
    problem = check_side_condition(schema_id, inst, **options)
    if problem:
        raise SideConditionViolation(f"{schema_id.value}: {problem}")


def afrak_instances(g1: Iterable[str], g2: Iterable[str], g3: Iterable[str],
                    sb: Mapping[str, str], instances: Iterable[Tuple[SchemaId, Instantiation]],
                    members: Collection = DEFAULT_AFRAK_MEMBERS) -> List:
    """Game logic formulas from sabotage instances over G2 with traps replaced

    Raises:
        PartitionViolation: overlapping parts, a non-injective s_b, or an
            instance that leaves G2
        SideConditionViolation: a base instance violates its side condition
    """
    check_partition(g1, g2, g3, sb)
    result = []
    for base, inst in instances:
        if base not in members:
            raise SideConditionViolation(f"{base.value} is not an AFrak base axiom")
        require_side_condition(base, inst)
        result.append(_afrak_shape(instantiate_schema(base, inst), g2, sb))
    logger.debug(f"Built {len(result)} AFrak instances")
    return result
