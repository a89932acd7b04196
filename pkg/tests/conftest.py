"""
Shared fixtures for the workbench test suite
"""

from pathlib import Path

import pytest

from glwb.config import create_workbench_config
from glwb.generators import random_structure
from glwb.structures import kripke, neighbourhood, FiniteStructure

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def chain() -> FiniteStructure:
    """0 -a-> 1 -a-> 2, 0 -b-> 0, P holds at 2"""
    return kripke(3, {"P": [2], "Q": [0, 1]}, {"a": [(0, 1), (1, 2)], "b": [(0, 0)]})


@pytest.fixture
def two_state_nbhd() -> FiniteStructure:
    """Angel can force {0,1} from state 0 with a; nothing from state 1"""
    structure = neighbourhood([[[0, 1]], []])
    return FiniteStructure(2, {"P": 0b01}, {"a": structure})


@pytest.fixture
def structures():
    """A fixed mix of small Kripke and neighbourhood structures"""
    found = []
    for seed in range(4):
        found.append(random_structure(3, "kripke", seed=seed))
        found.append(random_structure(2, "nbhd", seed=seed))
    return found


@pytest.fixture
def proofs_dir() -> Path:
    return REPO_ROOT / "proofs"


@pytest.fixture
def config():
    return create_workbench_config()
