import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from glwb.contexts import (
    ContextTranslator, blowup_ceiling, context_variable, ctx_formula, ctx_formula_with_report,
    ctx_translate, marker_valuation,
)
from glwb.evaluate import eval_rgl_formula
from glwb.exceptions import BudgetExceeded
from glwb.fragments import Fragment, check_fragment
from glwb.generators import random_formula, random_structure
from glwb.grammar import parse_game, parse_game_formula
from glwb.sabotage import ContextSpace, Ownership, gls_truth
from glwb.terms import Atom, DTest, Bot, Seq, Test as TestGame, Var

TRAP_EXAMPLES = [
    "<(~a ∩ ~'a); a> true",
    "<(~a ∪ ~'a); a; !false> true",
    "<(~'a; a^d)^*> P",
    "<(a ∪ ~a; b)^*> P",
    "<~'b; (b ∪ a; ~b)^x> Q",
]


class TestGameClauses:
    def test_free_atom_keeps_its_move(self):
        assert ctx_translate(Atom("a"), alphabet=["a"]) == Seq(Atom("a"), Var("y_ctx_0"))

    def test_angel_owned_atom_is_skipped(self):
        assert ctx_translate(Atom("a"), ctx={"a": Ownership.ANGEL}) == Var("y_ctx_1")

    def test_demon_owned_atom_loses(self):
        assert ctx_translate(Atom("a"), ctx={"a": Ownership.DEMON}) == TestGame(Bot())

    def test_angel_owned_dual_atom_wins(self):
        assert ctx_translate(parse_game("a^d"), ctx={"a": Ownership.ANGEL}) == DTest(Bot())

    def test_trap_switches_marker(self):
        assert ctx_translate(parse_game("~'a")) == Var(context_variable(2))

    def test_star_needs_budget(self):
        formula = parse_game_formula("<(~a; a)^*> P")
        with pytest.raises(BudgetExceeded):
            ctx_formula(formula, budget=2)

    def test_expansion_is_recorded(self):
        translator = ContextTranslator(["a"])
        translator.translate(parse_game_formula("<(~a; a)^*> P"))
        assert list(translator.expansion) == ["star_0"]
        assert translator.expansion["star_0"] > 1


class TestTranslatedFormulas:
    @pytest.mark.parametrize("text", TRAP_EXAMPLES)
    @pytest.mark.parametrize("eliminate", [False, True])
    def test_trap_examples(self, structures, text, eliminate):
        formula = parse_game_formula(text)
        translated = ctx_formula(formula, eliminate_bekic=eliminate)
        assert check_fragment(translated, Fragment.RGL)
        for structure in structures:
            assert eval_rgl_formula(translated, structure) == gls_truth(formula, structure)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_random_formulas(self, seed):
        rng = random.Random(seed)
        formula = random_formula(Fragment.GLS, 8, sabotage=("a",), rng=rng)
        structure = random_structure(2, rng.choice(["kripke", "nbhd"]), rng=rng)
        assert eval_rgl_formula(ctx_formula(formula), structure) == gls_truth(formula, structure)


def test_marker_valuation():
    space = ContextSpace(["a"])
    valuation = marker_valuation(space, [1, 2, 3])
    assert valuation == {"y_ctx_0": 1, "y_ctx_1": 2, "y_ctx_2": 3}


class TestBlowup:
    def test_star_free_game(self):
        game = parse_game("a; b")
        assert blowup_ceiling(game) == pytest.approx(math.log10(8 * 3))

    def test_single_star(self):
        game = parse_game("(~a; a)^*")
        assert blowup_ceiling(game) == pytest.approx(3 * math.log10(8 * 4))

    def test_tower_overflows(self):
        game = parse_game("((((a; b; c; d)^*)^*)^*)^*")
        assert blowup_ceiling(game) == math.inf

    @pytest.mark.parametrize("text", [
        "<(~a; a)^*> P",
        "<(~'a; a^d)^*> P",
        "<(a ∪ ~a)^*> P",
        "<(~a ∩ ~'a); a; (a ∪ ~'a)^*> <a> P",
        "-<(~a; a^d; ~'a)^*> -(P ∨ <a> Q)",
    ])
    def test_single_atom_single_star_stays_under_ceiling(self, text):
        formula = parse_game_formula(text)
        output, report = ctx_formula_with_report(formula)
        assert report.translation == "gls->rlgl"
        assert report.expansion
        assert report.ceiling == pytest.approx(blowup_ceiling(formula))
        assert math.log10(report.output_size) <= report.ceiling
        assert report.within_ceiling
        assert output == ctx_formula(formula)

    def test_constant_comes_from_the_caller(self):
        formula = parse_game_formula("<(~a; a)^*> P")
        _, report = ctx_formula_with_report(formula, blowup_constant=100)
        assert report.ceiling == pytest.approx(blowup_ceiling(formula, 100))
