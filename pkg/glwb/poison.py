"""
The poison game as a sabotage game logic formula, and an explicit-arena oracle

Vertex i of a digraph is the atomic game `a{i+1}`, interpreted as the
relation "move along an edge to vertex i". Demon's move plays a vertex game
dually and then claims it, which poisons the vertex for Angel.
"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import FrozenSet, List, Tuple, Union

from .exceptions import CapExceeded, GraphFormatError
from .lattice import StateSet, from_states
from .structures import DEFAULT_STATE_CAP, FiniteStructure, Relation
from .terms import Atom, Diamond, DStar, Dual, Top, TrapA, choice, seq


logger = logging.getLogger(__name__)

ORACLE_CAP = 6


@dataclass(frozen=True)
class Digraph:
    """Directed graph on vertices 0..n-1; self-loops are allowed"""
    n: int
    edges: FrozenSet[Tuple[int, int]] = frozenset()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a digraph needs at least one vertex")
        for source, target in self.edges:
            if not (0 <= source < self.n and 0 <= target < self.n):
                raise ValueError(f"edge {source}->{target} out of range")

    def successors(self, vertex: int) -> List[int]:
        return sorted(t for s, t in self.edges if s == vertex)


def vertex_atom(vertex: int) -> str:
    return f"a{vertex + 1}"


def poison_formula(n: int):
    """<(alpha_D ; alpha_A)^x> true over vertex games a1..an"""
    angel = choice(*(Atom(vertex_atom(v)) for v in range(n)))
    demon = Dual(choice(*(seq(Atom(vertex_atom(v)), TrapA(vertex_atom(v))) for v in range(n))))
    return Diamond(DStar(seq(demon, angel)), Top())


def poison_build(graph: Digraph, cap: int = DEFAULT_STATE_CAP) -> Tuple[object, FiniteStructure]:
    """Formula and Kripke structure whose truth set is Angel's winning start vertices

    Raises:
        CapExceeded: the graph has more vertices than the state cap
    """
    if graph.n > cap:
        raise CapExceeded(f"{graph.n} vertices exceed the state cap {cap}")
    games = {
        vertex_atom(v): Relation(frozenset((s, t) for s, t in graph.edges if t == v))
        for v in range(graph.n)
    }
    return poison_formula(graph.n), FiniteStructure(graph.n, {}, games)


def poison_oracle(graph: Digraph, rule_change: bool = True) -> StateSet:
    """
    Angel's winning start vertices, by a greatest fixpoint over the arena of
    Demon-to-move positions (vertex, poisoned set).

    Each round Demon may stop (Angel wins), or move and poison; then Angel
    moves to an unpoisoned successor or loses. Infinite plays go to Angel.
    With `rule_change`, Demon playing an already poisoned vertex is skipped
    and he stays put, as the claimed atomic game dictates; without it Demon
    walks onto poisoned vertices like the graph game allows.

    Raises:
        CapExceeded: more than ORACLE_CAP vertices
    """
    n = graph.n
    if n > ORACLE_CAP:
        raise CapExceeded(f"{n} vertices exceed the oracle cap {ORACLE_CAP}")
    succ = [graph.successors(v) for v in range(n)]

    def demon_moves(vertex: int, poisoned: int):
        for target in range(n):
            bit = 1 << target
            if rule_change and poisoned & bit:
                yield vertex, poisoned
            elif target in succ[vertex]:
                yield target, poisoned | bit

    winning = {(v, p) for v in range(n) for p in range(1 << n)}
    changed = True
    while changed:
        changed = False
        for position in sorted(winning):
            vertex, poisoned = position
            survives = all(
                any(not poisoned_after >> w & 1 and (w, poisoned_after) in winning
                    for w in succ[at])
                for at, poisoned_after in demon_moves(vertex, poisoned)
            )
            if not survives:
                winning.discard(position)
                changed = True
    result = from_states(v for v in range(n) if (v, 0) in winning)
    logger.debug(f"Poison oracle on {n} vertices: winners {result:b}")
    return result


# Graph files

_VERTICES = re.compile(r"vertices\s+(\d+)")
_EDGE = re.compile(r"edge\s+(\d+)\s+(\d+)")


def parse_graph(text: str) -> Digraph:
    """Parse `vertices N` followed by `edge i j` lines

    Raises:
        GraphFormatError: malformed line, with its line number
    """
    n = None
    edges = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = _VERTICES.fullmatch(line)
        if header:
            if n is not None:
                raise GraphFormatError("vertices declared twice", lineno, 1, raw)
            n = int(header.group(1))
            if n < 1:
                raise GraphFormatError("a digraph needs at least one vertex", lineno, 1, raw)
            continue
        edge = _EDGE.fullmatch(line)
        if not edge:
            raise GraphFormatError("expected 'vertices N' or 'edge i j'", lineno, 1, raw)
        if n is None:
            raise GraphFormatError("'vertices N' must come first", lineno, 1, raw)
        source, target = int(edge.group(1)), int(edge.group(2))
        if not (0 <= source < n and 0 <= target < n):
            raise GraphFormatError(f"edge {source} {target} out of range", lineno, None, raw)
        edges.add((source, target))
    if n is None:
        raise GraphFormatError("missing 'vertices N' header")
    return Digraph(n, frozenset(edges))


def dump_graph(graph: Digraph) -> str:
    lines = [f"vertices {graph.n}"]
    lines.extend(f"edge {s} {t}" for s, t in sorted(graph.edges))
    return "\n".join(lines) + "\n"


def load_graph(path: Union[str, Path]) -> Digraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def save_graph(graph: Digraph, path: Union[str, Path]):
    Path(path).write_text(dump_graph(graph), encoding="utf-8")
