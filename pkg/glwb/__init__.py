"""
Game Logic Workbench
Model checking, translations and proof checking for game logics with
sabotage, recursion and fixpoint logic with chop
"""

__version__ = "1.0.0"
__author__ = "Game Logic Workbench"

from .campaigns import CampaignRunner, run_campaign
from .equivalence import equiv_check, truth_set
from .grammar import parse_flc, parse_game, parse_game_formula
from .kernel import Calculus, ProofChecker, check_proof
from .poison import poison_build, poison_oracle
from .printer import to_text
from .rewrite import normal_form
from .structures import FiniteStructure

__all__ = [
    "CampaignRunner",
    "run_campaign",
    "equiv_check",
    "truth_set",
    "parse_flc",
    "parse_game",
    "parse_game_formula",
    "Calculus",
    "ProofChecker",
    "check_proof",
    "poison_build",
    "poison_oracle",
    "to_text",
    "normal_form",
    "FiniteStructure",
]
