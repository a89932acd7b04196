"""
State sets, effectivity functions and Kleene fixpoint engines

A state set over states 0..n-1 is an int bitmask. An effectivity function is
stored extensionally as a table with one entry per state set.
"""

import logging
from itertools import product
from typing import Callable, Iterator, List, Sequence, Tuple, TypeVar

from .exceptions import NonMonotoneDetected, WidthMismatch


logger = logging.getLogger(__name__)

StateSet = int
T = TypeVar("T")


def full_mask(n: int) -> StateSet:
    return (1 << n) - 1


def singleton(state: int) -> StateSet:
    return 1 << state


def members(mask: StateSet) -> List[int]:
    """States of a mask in increasing order"""
    result = []
    state = 0
    while mask:
        if mask & 1:
            result.append(state)
        mask >>= 1
        state += 1
    return result


def from_states(states) -> StateSet:
    mask = 0
    for state in states:
        mask |= 1 << state
    return mask


def is_subset(a: StateSet, b: StateSet) -> bool:
    return a & ~b == 0


def all_sets(n: int) -> range:
    return range(1 << n)


class Effectivity:
    """Monotone map from state sets to state sets over a fixed state count"""

    __slots__ = ("n", "table")

    def __init__(self, n: int, table: Sequence[StateSet]):
        if len(table) != 1 << n:
            raise ValueError(f"effectivity over {n} states needs {1 << n} entries")
        self.n = n
        self.table: Tuple[StateSet, ...] = tuple(table)
        witness = self.monotonicity_witness()
        if witness is not None:
            a, b = witness
            raise NonMonotoneDetected(
                f"effectivity not monotone: f({a:#b}) is not below f({b:#b})"
            )

    @classmethod
    def trusted(cls, n: int, table: Sequence[StateSet]) -> "Effectivity":
        """Build without the monotonicity check (for tables built from monotone parts)"""
        obj = cls.__new__(cls)
        obj.n = n
        obj.table = tuple(table)
        return obj

    @classmethod
    def from_function(cls, n: int, fn: Callable[[StateSet], StateSet],
                      check: bool = False) -> "Effectivity":
        table = [fn(a) for a in all_sets(n)]
        return cls(n, table) if check else cls.trusted(n, table)

    @classmethod
    def identity(cls, n: int) -> "Effectivity":
        return cls.trusted(n, range(1 << n))

    @classmethod
    def bottom(cls, n: int) -> "Effectivity":
        return cls.trusted(n, (0,) * (1 << n))

    @classmethod
    def top(cls, n: int) -> "Effectivity":
        return cls.trusted(n, (full_mask(n),) * (1 << n))

    @classmethod
    def const(cls, n: int, value: StateSet) -> "Effectivity":
        return cls.trusted(n, (value,) * (1 << n))

    @classmethod
    def test(cls, n: int, value: StateSet) -> "Effectivity":
        return cls.trusted(n, tuple(value & a for a in all_sets(n)))

    def __call__(self, goal: StateSet) -> StateSet:
        return self.table[goal]

    def __eq__(self, other) -> bool:
        return isinstance(other, Effectivity) and self.n == other.n and self.table == other.table

    def __hash__(self) -> int:
        return hash((self.n, self.table))

    def __repr__(self) -> str:
        return f"Effectivity(n={self.n}, table={list(self.table)})"

    def monotonicity_witness(self):
        """A pair (A, B) with A below B but f(A) not below f(B), or None"""
        table = self.table
        for a in range(len(table)):
            for state in range(self.n):
                bit = 1 << state
                if not a & bit and table[a] & ~table[a | bit]:
                    return a, a | bit
        return None

    def is_monotone(self) -> bool:
        return self.monotonicity_witness() is None

    def _same_width(self, other: "Effectivity"):
        if self.n != other.n:
            raise WidthMismatch(f"effectivities over {self.n} and {other.n} states")

    def dual(self) -> "Effectivity":
        full = full_mask(self.n)
        table = self.table
        return Effectivity.trusted(self.n, tuple(full ^ table[full ^ a] for a in all_sets(self.n)))

    def compose(self, inner: "Effectivity") -> "Effectivity":
        """self after inner"""
        self._same_width(inner)
        outer = self.table
        return Effectivity.trusted(self.n, tuple(outer[b] for b in inner.table))

    def union(self, other: "Effectivity") -> "Effectivity":
        self._same_width(other)
        return Effectivity.trusted(self.n, tuple(a | b for a, b in zip(self.table, other.table)))

    def intersection(self, other: "Effectivity") -> "Effectivity":
        self._same_width(other)
        return Effectivity.trusted(self.n, tuple(a & b for a, b in zip(self.table, other.table)))

    def leq(self, other: "Effectivity") -> bool:
        """Pointwise inclusion"""
        self._same_width(other)
        return all(a & ~b == 0 for a, b in zip(self.table, other.table))


class Constant:
    """Pointwise stand-in for a valuation entry that ignores its argument"""

    __slots__ = ("value",)

    def __init__(self, value: StateSet):
        self.value = value

    def __call__(self, goal: StateSet) -> StateSet:
        return self.value


def eff_dual(w: Effectivity) -> Effectivity:
    return w.dual()


def eff_compose(w: Effectivity, u: Effectivity) -> Effectivity:
    return w.compose(u)


def eff_test(value: StateSet, n: int) -> Effectivity:
    return Effectivity.test(n, value)


def eff_const(value: StateSet, n: int) -> Effectivity:
    return Effectivity.const(n, value)


# Fixpoint engines

def lfp_set(f: Callable[[StateSet], StateSet], n: int) -> StateSet:
    """Least fixpoint of a monotone map on state sets by iteration from the empty set"""
    current = 0
    for step in range(n + 2):
        following = f(current)
        if following == current:
            logger.debug(f"lfp_set converged after {step} steps")
            return current
        if current & ~following:
            raise NonMonotoneDetected("least fixpoint iteration shrank")
        current = following
    raise NonMonotoneDetected("least fixpoint iteration did not stabilize")


def gfp_set(f: Callable[[StateSet], StateSet], n: int) -> StateSet:
    """Greatest fixpoint of a monotone map on state sets by iteration from the full set"""
    current = full_mask(n)
    for step in range(n + 2):
        following = f(current)
        if following == current:
            logger.debug(f"gfp_set converged after {step} steps")
            return current
        if following & ~current:
            raise NonMonotoneDetected("greatest fixpoint iteration grew")
        current = following
    raise NonMonotoneDetected("greatest fixpoint iteration did not stabilize")


def kleene(step: Callable[[T], T], start: T, leq: Callable[[T, T], bool],
           ascending: bool, limit: int) -> T:
    """Generic Kleene iteration on a finite lattice

    Args:
        step: the monotone operator
        start: bottom (ascending) or top (descending) element
        leq: the lattice order
        ascending: iterate upwards from bottom when true
        limit: bound on the chain length

    Returns:
        the extremal fixpoint
    """
    current = start
    for count in range(limit + 2):
        following = step(current)
        if following == current:
            logger.debug(f"fixpoint iteration converged after {count} steps")
            return current
        ordered = leq(current, following) if ascending else leq(following, current)
        if not ordered:
            raise NonMonotoneDetected(
                "fixpoint iteration left its " + ("ascending" if ascending else "descending") + " chain"
            )
        current = following
    raise NonMonotoneDetected("fixpoint iteration did not stabilize")


def lfp_eff(F: Callable[[Effectivity], Effectivity], n: int) -> Effectivity:
    """Least fixpoint in the pointwise order of effectivity functions"""
    return kleene(F, Effectivity.bottom(n), Effectivity.leq, True, n << n)


def gfp_eff(F: Callable[[Effectivity], Effectivity], n: int) -> Effectivity:
    """Greatest fixpoint in the pointwise order of effectivity functions"""
    return kleene(F, Effectivity.top(n), Effectivity.leq, False, n << n)


def tuple_leq(leq: Callable[[T, T], bool]) -> Callable[[Tuple[T, ...], Tuple[T, ...]], bool]:
    """Lift an order componentwise to tuples"""
    def ordered(left, right):
        return all(leq(a, b) for a, b in zip(left, right))
    return ordered


def mask_tuple_leq(left: Tuple[int, ...], right: Tuple[int, ...]) -> bool:
    return all(a & ~b == 0 for a, b in zip(left, right))


def iter_effectivities(n: int) -> Iterator[Effectivity]:
    """Every monotone effectivity over n states (only sensible for n <= 2)"""
    for table in product(range(1 << n), repeat=1 << n):
        candidate = Effectivity.trusted(n, table)
        if candidate.is_monotone():
            yield candidate
