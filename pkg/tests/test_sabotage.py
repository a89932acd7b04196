import random

import pytest
from hypothesis import given, settings, strategies as st

from glwb.evaluate import eval_rgl_formula
from glwb.exceptions import AlphabetTooSmall, CapExceeded, UnsupportedConstruct
from glwb.fragments import Fragment
from glwb.generators import random_formula, random_structure
from glwb.grammar import parse_game_formula
from glwb.sabotage import (
    ContextSpace, Ownership, context_dual_complement, default_alphabet, eval_gls_formula,
    eval_gls_game, gls_truth, gls_valid,
)
from glwb.terms import Neg

ANGEL_OR_DEMON_TRAP = "<(~a ∩ ~'a); a> true"
TRAP_THEN_PASS = "<(~a ∪ ~'a); a; !false> true"


class TestContextSpace:
    def test_first_letter_is_lowest_digit(self):
        space = ContextSpace(["b", "a"])
        assert space.alphabet == ("a", "b")
        assert space.size == 9
        assert space.index({"a": Ownership.ANGEL}) == 1
        assert space.index({"b": Ownership.DEMON}) == 6
        assert space.context(7) == {"a": Ownership.ANGEL, "b": Ownership.DEMON}

    def test_assign_and_dual(self):
        space = ContextSpace(["a", "b"])
        index = space.assign(0, "a", Ownership.DEMON)
        assert space.owner(index, "a") is Ownership.DEMON
        assert space.owner(index, "b") is Ownership.NEITHER
        assert space.context(space.dual(index)) == {"a": Ownership.ANGEL}
        assert all(space.dual(space.dual(c)) == c for c in space.indices())

    def test_ownership_dual(self):
        assert Ownership.ANGEL.dual is Ownership.DEMON
        assert Ownership.NEITHER.dual is Ownership.NEITHER

    def test_unknown_atom(self):
        space = ContextSpace(["a"])
        with pytest.raises(AlphabetTooSmall):
            space.assign(0, "b", Ownership.ANGEL)
        with pytest.raises(AlphabetTooSmall):
            space.index({"b": Ownership.DEMON})


class TestTraps:
    def test_demon_trap_blocks_angel(self, structures):
        formula = parse_game_formula(ANGEL_OR_DEMON_TRAP)
        for structure in structures:
            assert gls_truth(formula, structure) == 0

    def test_angel_trap_lets_angel_pass(self, structures):
        formula = parse_game_formula(TRAP_THEN_PASS)
        for structure in structures:
            assert gls_valid(formula, structure)

    def test_owner_decides_atomic_game(self, chain):
        formula = parse_game_formula("<a> true")
        assert gls_truth(formula, chain) == 0b011
        assert gls_truth(formula, chain, ctx={"a": Ownership.ANGEL}) == chain.full
        assert gls_truth(formula, chain, ctx={"a": Ownership.DEMON}) == 0

    def test_demon_owned_dual_atom_waits(self, chain):
        formula = parse_game_formula("<a^d> P")
        assert gls_truth(formula, chain, ctx={"a": Ownership.DEMON}) == chain.prop("P")
        assert gls_truth(formula, chain, ctx={"a": Ownership.ANGEL}) == chain.full

    def test_game_map(self, chain):
        run = eval_gls_game(parse_game_formula("<~a> true").game, chain)
        family = eval_gls_formula(parse_game_formula("<a> P"), chain, alphabet=["a"])
        moved = run(family)
        assert moved.empty_context == family.at({"a": Ownership.ANGEL})


class TestLimits:
    def test_alphabet_must_cover_traps(self, chain):
        with pytest.raises(AlphabetTooSmall):
            eval_gls_formula(parse_game_formula("<~a> P"), chain, alphabet=[])

    def test_budget(self, chain):
        with pytest.raises(CapExceeded):
            gls_truth(parse_game_formula(ANGEL_OR_DEMON_TRAP), chain, budget=1)

    def test_recursion_is_not_sabotage_logic(self, chain):
        with pytest.raises(UnsupportedConstruct):
            gls_truth(parse_game_formula("<rec x. (?P ∪ a; x)> true"), chain)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_trap_free_formulas_agree_with_game_logic(seed):
    rng = random.Random(seed)
    formula = random_formula(Fragment.GL, 10, rng=rng)
    structure = random_structure(3, rng.choice(["kripke", "nbhd"]), rng=rng)
    assert gls_truth(formula, structure) == eval_rgl_formula(formula, structure)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_negation_is_dual_complement(seed):
    rng = random.Random(seed)
    formula = random_formula(Fragment.GLS, 8, rng=rng)
    structure = random_structure(2, rng.choice(["kripke", "nbhd"]), rng=rng)
    alphabet = default_alphabet(formula)
    family = eval_gls_formula(formula, structure, alphabet)
    negated = eval_gls_formula(Neg(formula), structure, alphabet)
    assert negated == context_dual_complement(family, structure.n)
