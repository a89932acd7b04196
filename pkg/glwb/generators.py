"""
Seeded random structures, formulas, schema instantiations and digraphs

Every generator takes a `random.Random`; campaigns derive one per task from
(seed, index), so generated data never depends on scheduling.
"""

import logging
import random
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

from .exceptions import CampaignError, CapExceeded
from .fragments import Fragment, check_fragment
from .poison import Digraph
from .rewrite import flc_negate, free_vars, is_well_named
from .schemas import Instantiation, SchemaId
from .structures import DEFAULT_STATE_CAP, FiniteStructure, Neighbourhoods, Relation
from .terms import (
    And, Atom, Bot, Box, Chop, Choice, CoRec, DChoice, DStar, DStarFix, DTest, Dia, Diamond,
    Dual, DualAtom, FAnd, FBot, FixKind, FNegProp, FOr, FProp, FTop, FVar, Id, Mu, Neg,
    NegProp, Nu, Or, Prop, Rec, Seq, Star, StarFix, Test, Top, TrapA, TrapD, Var, seq,
)


logger = logging.getLogger(__name__)

DEFAULT_PROPS = ("P", "Q")
DEFAULT_GAMES = ("a", "b")
DEFAULT_SABOTAGE = ("a", "b")
DEFAULT_DENSITY = 0.4
DEFAULT_FORMULA_SIZE = 12
MAX_NEIGHBOURHOODS = 3
MAX_ATTEMPTS = 200


def _rng(seed: Optional[int], rng: Optional[random.Random]) -> random.Random:
    return rng if rng is not None else random.Random(seed)


def task_rng(seed: int, index: int) -> random.Random:
    """Independent generator for task `index` of a campaign seeded with `seed`"""
    return random.Random(f"{seed}:{index}")


# Structures

def random_structure(n: int, kind: str = "kripke", seed: Optional[int] = 0,
                     props: Sequence[str] = DEFAULT_PROPS, games: Sequence[str] = DEFAULT_GAMES,
                     density: float = DEFAULT_DENSITY, cap: int = DEFAULT_STATE_CAP,
                     rng: Optional[random.Random] = None) -> FiniteStructure:
    """Random Kripke (`kripke`) or neighbourhood (`nbhd`) structure

    Raises:
        CapExceeded: n is above the state cap
    """
    if n > cap:
        raise CapExceeded(f"{n} states exceed the state cap {cap}")
    if kind not in ("kripke", "nbhd"):
        raise ValueError(f"unknown structure kind {kind!r}")
    rng = _rng(seed, rng)
    valuation = {}
    for p in props:
        valuation[p] = sum(1 << s for s in range(n) if rng.random() < 0.5)
    interps = {}
    for g in games:
        if kind == "kripke":
            edges = frozenset((s, t) for s in range(n) for t in range(n) if rng.random() < density)
            interps[g] = Relation(edges)
        else:
            families = []
            for _ in range(n):
                count = rng.randint(0, MAX_NEIGHBOURHOODS)
                families.append(tuple(sorted({rng.randrange(1 << n) for _ in range(count)})))
            interps[g] = Neighbourhoods(tuple(families))
    return FiniteStructure(n, valuation, interps)


def random_digraph(n: int, density: float = DEFAULT_DENSITY, seed: Optional[int] = 0,
                   rng: Optional[random.Random] = None) -> Digraph:
    rng = _rng(seed, rng)
    return Digraph(n, frozenset((s, t) for s in range(n) for t in range(n)
                                if rng.random() < density))


# Formulas

def _split(rng: random.Random, size: int) -> Tuple[int, int]:
    left = rng.randint(1, size - 2)
    return left, size - 1 - left


class GameLogicGenerator:
    """
    Random formulas and games of the game logic family with:
    - proposition and atomic game pools
    - trap games over a sabotage pool (empty for trap-free logics)
    - optional recursion, right-linear variable placement and literal-only tests
    """

    def __init__(self, rng: random.Random, props: Sequence[str] = DEFAULT_PROPS,
                 games: Sequence[str] = DEFAULT_GAMES, traps: Sequence[str] = (),
                 recursion: bool = False, right_linear: bool = False, poor_tests: bool = False,
                 dual_traps: bool = True):
        self.rng = rng
        self.props = tuple(props)
        self.games = tuple(games)
        self.traps = tuple(traps)
        self.recursion = recursion
        self.right_linear = right_linear
        self.poor_tests = poor_tests
        self.dual_traps = dual_traps
        self._binders = 0

    def _fresh(self) -> str:
        name = f"r{self._binders}"
        self._binders += 1
        return name

    def literal(self):
        rng = self.rng
        pick = rng.randrange(6)
        if pick == 4:
            return Top()
        if pick == 5:
            return Bot()
        name = rng.choice(self.props)
        return Prop(name) if pick % 2 == 0 else NegProp(name)

    def formula(self, size: int):
        rng = self.rng
        if size <= 1:
            return self.literal()
        options = ["neg", "diamond"] + (["or", "and"] if size >= 3 else [])
        pick = rng.choice(options)
        if pick == "neg":
            body = self.formula(size - 1)
            return NegProp(body.name) if isinstance(body, Prop) else Neg(body)
        if pick == "diamond":
            game_size = rng.randint(1, size - 1) if size > 2 else 1
            body_size = max(1, size - 1 - game_size)
            return Diamond(self.game(game_size), self.formula(body_size))
        left, right = _split(rng, size)
        kind = Or if pick == "or" else And
        return kind(self.formula(left), self.formula(right))

    def _leaf(self, variables: Tuple[str, ...]):
        rng = self.rng
        options = ["atom", "dual"]
        if self.traps:
            options += ["trap_a", "trap_d"] if self.dual_traps else ["trap_a"]
        if variables:
            options += ["var", "var"]
        pick = rng.choice(options)
        if pick == "atom":
            return Atom(rng.choice(self.games))
        if pick == "dual":
            return DualAtom(rng.choice(self.games))
        if pick == "trap_a":
            return TrapA(rng.choice(self.traps))
        if pick == "trap_d":
            return TrapD(rng.choice(self.traps))
        return Var(rng.choice(variables))

    def game(self, size: int, scope: Sequence[str] = (), open_: bool = True):
        """Random game whose free variables come from `scope` where `open_` allows them"""
        rng = self.rng
        variables = tuple(scope) if open_ else ()
        if size <= 1:
            return self._leaf(variables)
        options = ["test", "dtest", "star", "dstar", "dual"]
        if size >= 3:
            options += ["choice", "dchoice", "seq", "seq"]
        if self.recursion:
            options += ["rec", "corec"]
        pick = rng.choice(options)
        if pick in ("test", "dtest"):
            body = self.literal() if self.poor_tests else self.formula(size - 1)
            return Test(body) if pick == "test" else DTest(body)
        if pick in ("star", "dstar"):
            body = self.game(size - 1, scope, open_ and not self.right_linear)
            return Star(body) if pick == "star" else DStar(body)
        if pick == "dual":
            inner = self.game(size - 1, scope, open_)
            if free_vars(inner):
                return inner
            return DualAtom(inner.name) if isinstance(inner, Atom) else Dual(inner)
        if pick in ("rec", "corec"):
            var = self._fresh()
            body = self.game(size - 1, variables + (var,), True)
            return Rec(var, body) if pick == "rec" else CoRec(var, body)
        left, right = _split(rng, size)
        if pick == "seq":
            return Seq(self.game(left, scope, open_ and not self.right_linear),
                       self.game(right, scope, open_))
        kind = Choice if pick == "choice" else DChoice
        return kind(self.game(left, scope, open_), self.game(right, scope, open_))


class FlcGenerator:
    """
    Random FLC formulas in one of the modes:
    - lmu: modal mu-calculus (no chop, id or iteration)
    - lstar: iterations instead of fixpoints
    - lsep: separable fixpoints mu x.(psi \\/ rho) and nu x.(psi /\\ rho)
    - flc: every construct
    """

    MODES = ("lmu", "lstar", "lsep", "flc")

    def __init__(self, rng: random.Random, props: Sequence[str] = DEFAULT_PROPS,
                 games: Sequence[str] = DEFAULT_GAMES, mode: str = "lmu"):
        if mode not in self.MODES:
            raise ValueError(f"unknown FLC generator mode {mode!r}")
        self.rng = rng
        self.props = tuple(props)
        self.games = tuple(games)
        self.mode = mode
        self._binders = 0

    def _fresh(self) -> str:
        name = f"f{self._binders}"
        self._binders += 1
        return name

    def _leaf(self, scope: Tuple[str, ...]):
        rng = self.rng
        options = ["prop", "negprop", "top", "bot"]
        if self.mode in ("lstar", "flc"):
            options.append("id")
        if scope and self.mode != "lstar":
            options += ["var", "var"]
        pick = rng.choice(options)
        if pick == "prop":
            return FProp(rng.choice(self.props))
        if pick == "negprop":
            return FNegProp(rng.choice(self.props))
        if pick == "top":
            return FTop()
        if pick == "bot":
            return FBot()
        if pick == "id":
            return Id()
        return FVar(rng.choice(scope))

    def formula(self, size: int, scope: Sequence[str] = ()):
        rng = self.rng
        scope = tuple(scope)
        if size <= 1:
            return self._leaf(scope)
        options = ["dia", "box"]
        if size >= 3:
            options += ["or", "and"]
        if self.mode in ("lmu", "flc"):
            options += ["mu", "nu"]
        if self.mode in ("lstar", "flc"):
            options += ["star", "dstar"]
            if size >= 3:
                options.append("chop")
        if self.mode == "lsep" and size >= 4:
            options += ["mu", "nu"]
        pick = rng.choice(options)
        if pick in ("dia", "box"):
            kind = Dia if pick == "dia" else Box
            return kind(rng.choice(self.games), self.formula(size - 1, scope))
        if pick in ("mu", "nu"):
            var = self._fresh()
            binder = Mu if pick == "mu" else Nu
            if self.mode == "lsep":
                left, right = _split(rng, size - 1) if size >= 4 else (1, 1)
                join = FOr if pick == "mu" else FAnd
                return binder(var, join(self.formula(left, (var,)), self.formula(right, ())))
            return binder(var, self.formula(size - 1, scope + (var,)))
        if pick in ("star", "dstar"):
            kind = StarFix if pick == "star" else DStarFix
            return kind(self.formula(size - 1, scope))
        left, right = _split(rng, size)
        kind = {"or": FOr, "and": FAnd, "chop": Chop}[pick]
        return kind(self.formula(left, scope), self.formula(right, scope))


_GAME_FRAGMENTS = {
    Fragment.GL: dict(),
    Fragment.GLS: dict(sabotage=True),
    Fragment.RGL: dict(recursion=True),
    Fragment.RLGL: dict(recursion=True, right_linear=True),
    Fragment.POOR_TEST: dict(poor_tests=True),
}
_FLC_FRAGMENTS = {Fragment.LMU: "lmu", Fragment.LSTAR: "lstar", Fragment.LSEP: "lsep"}


def _tag(fragment: Union[Fragment, str]) -> Union[Fragment, str]:
    if isinstance(fragment, Fragment):
        return fragment
    if fragment.lower() == "flc":
        return "flc"
    return Fragment.parse(fragment)


def generator_for(fragment: Union[Fragment, str], rng: random.Random,
                  props: Sequence[str] = DEFAULT_PROPS, games: Sequence[str] = DEFAULT_GAMES,
                  sabotage: Sequence[str] = DEFAULT_SABOTAGE):
    tag = _tag(fragment)
    if tag == "flc":
        return FlcGenerator(rng, props, games, "flc")
    if tag in _FLC_FRAGMENTS:
        return FlcGenerator(rng, props, games, _FLC_FRAGMENTS[tag])
    options = dict(_GAME_FRAGMENTS[tag])
    traps = tuple(sabotage) if options.pop("sabotage", False) else ()
    return GameLogicGenerator(rng, props, games, traps, **options)


def _accepts(tag, expr) -> bool:
    if free_vars(expr) or not is_well_named(expr):
        return False
    return tag == "flc" or check_fragment(expr, tag)


def random_formula(fragment: Union[Fragment, str], size: int = DEFAULT_FORMULA_SIZE,
                   props: Sequence[str] = DEFAULT_PROPS, games: Sequence[str] = DEFAULT_GAMES,
                   sabotage: Sequence[str] = DEFAULT_SABOTAGE, seed: Optional[int] = 0,
                   rng: Optional[random.Random] = None):
    """Closed, well-named formula of `fragment` with at most `size` nodes

    `fragment` is a Fragment tag or "flc" for unrestricted fixpoint logic
    with chop.
    """
    rng = _rng(seed, rng)
    tag = _tag(fragment)
    generator = generator_for(tag, rng, props, games, sabotage)
    for _ in range(MAX_ATTEMPTS):
        candidate = generator.formula(rng.randint(1, size))
        if _accepts(tag, candidate):
            return candidate
    raise CampaignError(f"no {tag} formula found in {MAX_ATTEMPTS} attempts")


def random_game(fragment: Union[Fragment, str], size: int = DEFAULT_FORMULA_SIZE,
                props: Sequence[str] = DEFAULT_PROPS, games: Sequence[str] = DEFAULT_GAMES,
                sabotage: Sequence[str] = DEFAULT_SABOTAGE, seed: Optional[int] = 0,
                rng: Optional[random.Random] = None):
    """Closed, well-named game of a game logic fragment"""
    rng = _rng(seed, rng)
    tag = _tag(fragment)
    if tag == "flc" or tag in _FLC_FRAGMENTS:
        raise ValueError(f"{tag} has no games")
    generator = generator_for(tag, rng, props, games, sabotage)
    for _ in range(MAX_ATTEMPTS):
        candidate = generator.game(rng.randint(1, size))
        if _accepts(tag, candidate):
            return candidate
    raise CampaignError(f"no {tag} game found in {MAX_ATTEMPTS} attempts")


# Schema instantiations

class InstantiationSampler:
    """Random instantiations of axiom and rule schemas for soundness fuzzing

    Sabotage schemas keep the trapped atom `a` out of the pools their side
    conditions protect; the kernel still filters every sample through
    check_side_condition.
    """

    def __init__(self, rng: random.Random, size: int = 6, props: Sequence[str] = DEFAULT_PROPS,
                 traps: Sequence[str] = DEFAULT_SABOTAGE):
        self.rng = rng
        self.size = size
        self.props = tuple(props)
        self.traps = tuple(traps)
        self._samplers: Dict[SchemaId, Callable[[bool], Instantiation]] = {
            SchemaId.TAUT: self._taut,
            SchemaId.FP: self._fp,
            SchemaId.ALPHA: self._alpha,
            SchemaId.MU_RULE: self._mu_rule,
            SchemaId.MON_A: self._mon_a,
            SchemaId.BOX_AND: self._modal,
            SchemaId.K: self._modal,
            SchemaId.BOX_TOP: lambda flc: {"a": self.rng.choice(DEFAULT_GAMES)},
            SchemaId.G_NOT: lambda flc: {"alpha": self._game(), "phi": self._formula()},
            SchemaId.G_TEST: lambda flc: {"phi": self._formula(), "psi": self._formula()},
            SchemaId.G_DTEST: lambda flc: {"phi": self._formula(), "psi": self._formula()},
            SchemaId.G_CHOICE: self._two_games,
            SchemaId.G_DCHOICE: self._two_games,
            SchemaId.G_COMP: self._two_games,
            SchemaId.G_FP: self._g_fp,
            SchemaId.G_ALPHA: self._g_alpha,
            SchemaId.G_MU_RULE: lambda flc: self._g_fix_rule("phi"),
            SchemaId.G_NU_RULE: lambda flc: self._g_fix_rule("rho"),
            SchemaId.G_MON: lambda flc: {"alpha": self._game(), "phi": self._formula(),
                                         "psi": self._formula()},
            SchemaId.G_STAR_FP: lambda flc: {"alpha": self._game(), "phi": self._formula()},
            SchemaId.G_STAR_MU: lambda flc: {"alpha": self._game(), "rho": self._formula(),
                                             "psi": self._formula()},
            SchemaId.MP: lambda flc: {"phi": self._formula(), "psi": self._formula()},
            SchemaId.S_ASAB: self._sabotage,
            SchemaId.S_DSAB: self._sabotage,
            SchemaId.S_BRANCH: self._branch,
            SchemaId.S_SAB_P: self._sab_p,
            SchemaId.S_SAB_REM: self._sab_rem,
            SchemaId.S_SAB_NOT_YET: self._not_yet,
        }

    @property
    def schemas(self) -> Tuple[SchemaId, ...]:
        return tuple(self._samplers)

    def _sized(self) -> int:
        return self.rng.randint(1, self.size)

    def _gen(self, games=DEFAULT_GAMES, traps=None, **options) -> GameLogicGenerator:
        traps = self.traps if traps is None else traps
        return GameLogicGenerator(self.rng, self.props, games, traps, **options)

    def _formula(self, games=DEFAULT_GAMES, traps=None):
        return self._gen(games, traps).formula(self._sized())

    def _game(self, games=DEFAULT_GAMES, traps=None):
        return self._gen(games, traps).game(self._sized())

    def _flc(self, scope: Sequence[str] = ()):
        return FlcGenerator(self.rng, self.props, DEFAULT_GAMES, "lmu").formula(self._sized(), scope)

    def sample(self, schema_id: SchemaId, flc: bool = False) -> Instantiation:
        sampler = self._samplers.get(schema_id)
        if sampler is None:
            raise ValueError(f"no sampler for {schema_id.value}")
        return sampler(flc)

    def _taut(self, flc):
        if flc:
            f = self._flc()
            return {"phi": FOr(f, flc_negate(f))}
        f = self._formula()
        return {"phi": Or(f, Neg(f))}

    def _fp(self, flc):
        return {"x": "x", "phi": self._flc(("x",))}

    def _alpha(self, flc):
        kind = self.rng.choice(list(FixKind))
        return {"kind": kind, "x": "x", "y": "y", "phi": self._flc(("x",))}

    def _mu_rule(self, flc):
        return {"x": "x", "phi": self._flc(("x",)), "psi": self._flc()}

    def _mon_a(self, flc):
        return {"a": self.rng.choice(DEFAULT_GAMES), "phi": self._flc(), "psi": self._flc()}

    def _modal(self, flc):
        a = self.rng.choice(DEFAULT_GAMES)
        if flc:
            return {"a": a, "phi": self._flc(), "psi": self._flc()}
        return {"a": a, "phi": self._formula(traps=()), "psi": self._formula(traps=())}

    def _two_games(self, flc):
        return {"alpha": self._game(), "beta": self._game(), "phi": self._formula()}

    def _linear_game(self, scope: Sequence[str], **options):
        generator = self._gen(recursion=True, right_linear=True, traps=(), **options)
        return generator.game(self._sized(), scope)

    def _g_fp(self, flc):
        return {"x": "x", "alpha": self._linear_game(("x",)), "phi": self._formula(traps=())}

    def _g_alpha(self, flc):
        return {"kind": self.rng.choice(list(FixKind)), "x": "x", "y": "y",
                "alpha": self._linear_game(("x",)), "phi": self._formula(traps=())}

    def _g_fix_rule(self, body: str):
        plain = self._gen(traps=(), recursion=True, right_linear=True)
        return {"x": "x", "alpha": self._linear_game(("x",)), "beta": plain.game(self._sized()),
                "psi": plain.formula(self._sized()), body: plain.formula(self._sized())}

    def _vector(self, names: Sequence[str], make) -> Tuple:
        return tuple(None if self.rng.random() < 0.3 else make() for _ in names)

    def _sabotage(self, flc):
        rng = self.rng
        names = ("x1", "x2", "x3")[:rng.randint(0, 3)]
        groups: Dict[str, list] = {"x": [], "y": [], "z": []}
        for name in names:
            groups[rng.choice("xyz")].append(name)
        protected = self._gen(games=("b",), traps=("b",), right_linear=True)
        inst: Instantiation = {
            "a": "a",
            "alpha": protected.game(self._sized(), names),
            "phi": self._gen(games=("b",), traps=DEFAULT_SABOTAGE).formula(self._sized()),
        }
        for group, entries in (("x", "beta"), ("y", "gamma"), ("z", "delta")):
            inst[group] = tuple(groups[group])
            inst[entries] = self._vector(groups[group], self._game)
        return inst

    def _branch(self, flc):
        rng = self.rng
        names = ("a", "b")[:rng.randint(1, 2)]

        def traps():
            steps = [rng.choice((TrapA, TrapD))("c") for _ in range(rng.randint(1, 2))]
            return seq(*steps)
        alpha = self._gen(games=names + ("d",), traps=("d",), right_linear=True).game(
            self._sized(), ("w",))
        return {"a": names, "i": rng.randint(1, len(names)), "w": "w",
                "beta": self._vector(names, traps), "alpha": alpha,
                "rest": self._game(), "phi": self._formula()}

    def _sab_p(self, flc):
        alpha = self._gen().game(self._sized(), ("x",))
        return {"a": "a", "x": "x", "alpha": alpha, "phi": self._formula()}

    def _sab_rem(self, flc):
        rng = self.rng
        xs = ("x1", "x2")[:rng.randint(0, 2)]
        ys = ("y1", "y2")[:rng.randint(1, 2)]

        def trap():
            return rng.choice((TrapA, TrapD))("a")
        alpha = self._gen(games=("b",), traps=DEFAULT_SABOTAGE).game(self._sized(), xs + ys)
        return {"a": "a", "x": xs, "y": ys, "alpha": alpha,
                "eta": tuple(trap() for _ in xs), "delta": tuple(trap() for _ in ys),
                "beta": self._vector(ys, self._game),
                "phi": self._gen(games=("b",)).formula(self._sized())}

    def _not_yet(self, flc):
        rng = self.rng
        guarded = self._gen(games=("a", "c"), traps=("c",))
        return {"a": "a", "x": "x", "y": "y",
                "alpha": guarded.game(self._sized(), ("x", "y")),
                "beta": None if rng.random() < 0.3 else self._game(),
                "eta": rng.choice((TrapA, TrapD))("b"),
                "phi": guarded.formula(self._sized())}
