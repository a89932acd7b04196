"""
Finite Kripke and monotone neighbourhood structures

Relation-backed games are evaluated lazily through successor masks;
extensional effectivity tables are materialized on demand and cached.
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

from .exceptions import CapExceeded, StructureFormatError
from .lattice import Effectivity, StateSet, all_sets, from_states, full_mask, members


logger = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 10


@dataclass(frozen=True)
class Relation:
    """A relational game: w(A) = {s : some t in A with s R t}"""
    edges: FrozenSet[Tuple[int, int]] = frozenset()

    def successor_masks(self, n: int) -> Tuple[StateSet, ...]:
        succ = [0] * n
        for source, target in self.edges:
            succ[source] |= 1 << target
        return tuple(succ)


@dataclass(frozen=True)
class Neighbourhoods:
    """A neighbourhood game: w(A) = {s : some N in families[s] with N inside A}"""
    families: Tuple[Tuple[StateSet, ...], ...]


GameInterp = Union[Relation, Neighbourhoods]


@dataclass(frozen=True, eq=False)
class FiniteStructure:
    """
    Finite structure with:
    - states 0..n-1
    - proposition valuation (unlisted propositions are empty)
    - atomic games as relations or neighbourhood families (unlisted games are
      the empty relation)
    """
    n: int
    valuation: Mapping[str, StateSet] = field(default_factory=dict)
    games: Mapping[str, GameInterp] = field(default_factory=dict)
    _cache: Dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a structure needs at least one state")
        full = full_mask(self.n)
        for name, mask in self.valuation.items():
            if mask & ~full:
                raise ValueError(f"proposition {name} mentions a state outside 0..{self.n - 1}")
        for name, interp in self.games.items():
            if isinstance(interp, Relation):
                for source, target in interp.edges:
                    if not (0 <= source < self.n and 0 <= target < self.n):
                        raise ValueError(f"game {name} edge {source}->{target} out of range")
            else:
                if len(interp.families) != self.n:
                    raise ValueError(f"game {name} needs one neighbourhood family per state")
                for family in interp.families:
                    if any(mask & ~full for mask in family):
                        raise ValueError(f"game {name} neighbourhood out of range")

    def __eq__(self, other) -> bool:
        return (isinstance(other, FiniteStructure) and self.n == other.n
                and _canonical_valuation(self.valuation) == _canonical_valuation(other.valuation)
                and _canonical_games(self.games) == _canonical_games(other.games))

    __hash__ = None

    @property
    def full(self) -> StateSet:
        return full_mask(self.n)

    @property
    def is_kripke(self) -> bool:
        return all(isinstance(g, Relation) for g in self.games.values())

    def prop(self, name: str) -> StateSet:
        return self.valuation.get(name, 0)

    def game(self, name: str) -> GameInterp:
        return self.games.get(name, Relation())

    def _successors(self, name: str) -> Tuple[StateSet, ...]:
        key = ("succ", name)
        if key not in self._cache:
            self._cache[key] = self.game(name).successor_masks(self.n)
        return self._cache[key]

    def step(self, name: str, goal: StateSet) -> StateSet:
        """One lifted step of atomic game `name` towards `goal`"""
        interp = self.game(name)
        result = 0
        if isinstance(interp, Relation):
            for state, succ in enumerate(self._successors(name)):
                if succ & goal:
                    result |= 1 << state
            return result
        for state, family in enumerate(interp.families):
            if any(mask & ~goal == 0 for mask in family):
                result |= 1 << state
        return result

    def dual_step(self, name: str, goal: StateSet) -> StateSet:
        full = self.full
        return full ^ self.step(name, full ^ goal)

    def stepper(self, name: str):
        """The lifted game as a plain callable"""
        return lambda goal: self.step(name, goal)


def lift_game(structure: FiniteStructure, name: str,
              cap: int = DEFAULT_STATE_CAP) -> Effectivity:
    """Extensional effectivity table of an atomic game

    Raises:
        CapExceeded: the structure has more than `cap` states
    """
    if structure.n > cap:
        raise CapExceeded(f"{structure.n} states exceed the state cap {cap}")
    key = ("table", name)
    cached = structure._cache.get(key)
    if cached is None:
        cached = Effectivity.trusted(structure.n,
                                     tuple(structure.step(name, a) for a in all_sets(structure.n)))
        structure._cache[key] = cached
    return cached


def kripke(n: int, valuation: Optional[Mapping[str, Iterable[int]]] = None,
           relations: Optional[Mapping[str, Iterable[Tuple[int, int]]]] = None) -> FiniteStructure:
    """Convenience constructor from state lists and edge lists"""
    return FiniteStructure(
        n,
        {p: from_states(states) for p, states in (valuation or {}).items()},
        {a: Relation(frozenset(edges)) for a, edges in (relations or {}).items()},
    )


def neighbourhood(families: Iterable[Iterable[Iterable[int]]]) -> Neighbourhoods:
    return Neighbourhoods(tuple(tuple(sorted(set(from_states(s) for s in family)))
                                for family in families))


def _canonical_valuation(valuation):
    return tuple(sorted(valuation.items()))


def _canonical_games(games):
    result = []
    for name in sorted(games):
        interp = games[name]
        if isinstance(interp, Relation):
            result.append((name, "rel", tuple(sorted(interp.edges))))
        else:
            result.append((name, "nbhd", tuple(tuple(sorted(set(f))) for f in interp.families)))
    return tuple(result)


# Structure files

_EDGE = re.compile(r"(\d+)\s*->\s*(\d+)")
_FAMILY = re.compile(r"(\d+)\s*:\s*((?:\{[^}]*\}\s*)*)")
_SET = re.compile(r"\{([^}]*)\}")


def _states(text: str, lineno: int, line: str) -> List[int]:
    items = [item for item in re.split(r"[\s,]+", text.strip()) if item]
    try:
        return [int(item) for item in items]
    except ValueError:
        raise StructureFormatError("state numbers expected", lineno, None, line)


def parse_structure(text: str) -> FiniteStructure:
    """Parse the line-oriented structure format

    Raises:
        StructureFormatError: malformed line, with its line number
    """
    n = None
    valuation: Dict[str, StateSet] = {}
    games: Dict[str, GameInterp] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("states"):
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit() or n is not None:
                raise StructureFormatError("expected a single 'states N' header", lineno, 1, raw)
            n = int(parts[1])
            if n < 1:
                raise StructureFormatError("a structure needs at least one state", lineno, 1, raw)
            continue
        if n is None:
            raise StructureFormatError("'states N' must come first", lineno, 1, raw)
        head, sep, rest = line.partition(":")
        words = head.split()
        if not sep or not words:
            raise StructureFormatError("expected 'prop P: ...' or 'game a kind: ...'", lineno, 1, raw)
        if words[0] == "prop" and len(words) == 2:
            states = _states(rest, lineno, raw)
            if any(not 0 <= s < n for s in states):
                raise StructureFormatError("state out of range", lineno, None, raw)
            valuation[words[1]] = from_states(states)
        elif words[0] == "game" and len(words) == 3 and words[2] == "rel":
            edges = set()
            body = rest.strip()
            for token in re.split(r"\s+", body) if body else []:
                match = _EDGE.fullmatch(token)
                if not match:
                    raise StructureFormatError(f"bad edge {token!r}", lineno, None, raw)
                source, target = int(match.group(1)), int(match.group(2))
                if not (0 <= source < n and 0 <= target < n):
                    raise StructureFormatError(f"edge {token} out of range", lineno, None, raw)
                edges.add((source, target))
            games[words[1]] = Relation(frozenset(edges))
        elif words[0] == "game" and len(words) == 3 and words[2] == "nbhd":
            families: List[set] = [set() for _ in range(n)]
            position = 0
            body = rest.strip()
            while position < len(body):
                match = _FAMILY.match(body, position)
                if not match or match.end() == position:
                    raise StructureFormatError("bad neighbourhood list", lineno, None, raw)
                state = int(match.group(1))
                if not 0 <= state < n:
                    raise StructureFormatError(f"state {state} out of range", lineno, None, raw)
                for member_text in _SET.findall(match.group(2)):
                    states = _states(member_text, lineno, raw)
                    if any(not 0 <= s < n for s in states):
                        raise StructureFormatError("state out of range", lineno, None, raw)
                    families[state].add(from_states(states))
                position = match.end()
                while position < len(body) and body[position].isspace():
                    position += 1
            games[words[1]] = Neighbourhoods(tuple(tuple(sorted(f)) for f in families))
        else:
            raise StructureFormatError(f"unknown declaration {head.strip()!r}", lineno, 1, raw)
    if n is None:
        raise StructureFormatError("missing 'states N' header")
    return FiniteStructure(n, valuation, games)


def _set_text(mask: StateSet) -> str:
    return "{" + ",".join(str(s) for s in members(mask)) + "}"


def dump_structure(structure: FiniteStructure) -> str:
    """Canonical text form; parse_structure(dump_structure(s)) == s"""
    lines = [f"states {structure.n}"]
    for name, mask in sorted(structure.valuation.items()):
        states = " ".join(str(s) for s in members(mask))
        lines.append(f"prop {name}: {states}".rstrip())
    for name in sorted(structure.games):
        interp = structure.games[name]
        if isinstance(interp, Relation):
            edges = " ".join(f"{s}->{t}" for s, t in sorted(interp.edges))
            lines.append(f"game {name} rel: {edges}".rstrip())
        else:
            parts = []
            for state, family in enumerate(interp.families):
                if family:
                    parts.append(f"{state}:" + "".join(_set_text(m) for m in sorted(set(family))))
            lines.append(f"game {name} nbhd: {' '.join(parts)}".rstrip())
    return "\n".join(lines) + "\n"


def load_structure(path: Union[str, Path]) -> FiniteStructure:
    structure = parse_structure(Path(path).read_text(encoding="utf-8"))
    logger.debug(f"Loaded structure with {structure.n} states from {path}")
    return structure


def save_structure(structure: FiniteStructure, path: Union[str, Path]):
    Path(path).write_text(dump_structure(structure), encoding="utf-8")
