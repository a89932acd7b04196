"""
Truth sets per logic and semantic equivalence checks over finite structures
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from .evaluate import eval_rgl_formula, flc_truth
from .lattice import StateSet, members
from .sabotage import gls_truth
from .structures import FiniteStructure


logger = logging.getLogger(__name__)

GAME_LOGICS = ("gl", "rgl", "rlgl")
FLC_LOGICS = ("flc", "lmu", "lstar")
LOGICS = GAME_LOGICS + ("gls",) + FLC_LOGICS

_GLS_OPTIONS = ("cap", "budget")
_LATTICE_OPTIONS = ("cap", "fast_path", "check_monotone")


def _only(options: Dict, keys: Sequence[str]) -> Dict:
    return {k: v for k, v in options.items() if k in keys}


def truth_set(expr, logic: str, structure: FiniteStructure, **options) -> StateSet:
    """Truth set of a formula read in `logic`; sabotage formulas start in the empty context"""
    logic = logic.lower()
    if logic in GAME_LOGICS:
        return eval_rgl_formula(expr, structure, **_only(options, _LATTICE_OPTIONS))
    if logic == "gls":
        return gls_truth(expr, structure, **_only(options, _GLS_OPTIONS))
    if logic in FLC_LOGICS:
        return flc_truth(expr, structure, **_only(options, _LATTICE_OPTIONS))
    raise ValueError(f"unknown logic {logic!r}; expected one of {', '.join(LOGICS)}")


def valid_in(expr, logic: str, structure: FiniteStructure, **options) -> bool:
    return truth_set(expr, logic, structure, **options) == structure.full


@dataclass(frozen=True)
class Counterexample:
    """First state where the two formulas disagree"""
    structure_index: int
    state: int
    left_holds: bool
    right_holds: bool

    def describe(self) -> str:
        left = "holds" if self.left_holds else "fails"
        right = "holds" if self.right_holds else "fails"
        return (f"structure #{self.structure_index}, state {self.state}: "
                f"left {left}, right {right}")


@dataclass
class EquivalenceReport:
    logics: Tuple[str, str]
    structures_checked: int
    counterexample: Optional[Counterexample] = None

    @property
    def equivalent(self) -> bool:
        return self.counterexample is None

    def __bool__(self) -> bool:
        return self.equivalent

    def to_dict(self) -> Dict:
        return {
            "logics": list(self.logics),
            "structures_checked": self.structures_checked,
            "equivalent": self.equivalent,
            "counterexample": None if self.counterexample is None else {
                "structure": self.counterexample.structure_index,
                "state": self.counterexample.state,
                "left_holds": self.counterexample.left_holds,
                "right_holds": self.counterexample.right_holds,
            },
        }


def equiv_check(left, right, logics: Tuple[str, str] = ("rgl", "rgl"),
                structures: Sequence[FiniteStructure] = (), **options) -> EquivalenceReport:
    """Compare truth sets structure by structure and stop at the first disagreement

    Evaluation errors propagate unchanged.
    """
    left_logic, right_logic = logics
    for index, structure in enumerate(structures):
        left_set = truth_set(left, left_logic, structure, **options)
        right_set = truth_set(right, right_logic, structure, **options)
        difference = left_set ^ right_set
        if difference:
            state = members(difference)[0]
            found = Counterexample(index, state, bool(left_set >> state & 1),
                                   bool(right_set >> state & 1))
            logger.debug(f"Equivalence fails at {found.describe()}")
            return EquivalenceReport((left_logic, right_logic), index + 1, found)
    return EquivalenceReport((left_logic, right_logic), len(structures))
