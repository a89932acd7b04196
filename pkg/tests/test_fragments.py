import random

import pytest
from hypothesis import given, settings, strategies as st

from glwb.fragments import (
    Fragment, check_fragment, fragments_of, is_right_linear, rank, separable_split, star_depth,
)
from glwb.generators import random_formula
from glwb.grammar import parse_flc, parse_game, parse_game_formula
from glwb.terms import Dia, FProp, FVar, Prop


def gl(text):
    return parse_game_formula(text)


class TestGameFragments:
    def test_plain_game_logic(self):
        formula = gl("<a; b^*> P")
        for tag in (Fragment.GL, Fragment.GLS, Fragment.RGL, Fragment.RLGL, Fragment.POOR_TEST):
            assert check_fragment(formula, tag)

    def test_traps_only_in_sabotage_logic(self):
        formula = gl("<(~a ∪ ~'a); a> true")
        assert check_fragment(formula, Fragment.GLS)
        assert not check_fragment(formula, Fragment.GL)
        assert not check_fragment(formula, Fragment.RGL)

    def test_recursion_outside_right_linear_fragment(self):
        formula = gl("<rec x. (a; (x ∪ c); b)> P")
        assert check_fragment(formula, Fragment.RGL)
        assert not check_fragment(formula, Fragment.RLGL)
        assert not check_fragment(formula, Fragment.GL)

    def test_right_linear_recursion(self):
        formula = gl("<rec x. (?P ∪ a; x)> Q")
        assert check_fragment(formula, Fragment.RLGL)

    def test_poor_tests(self):
        assert check_fragment(gl("<?P; a> Q"), Fragment.POOR_TEST)
        assert not check_fragment(gl("<?<a> P; a> Q"), Fragment.POOR_TEST)

    def test_game_formula_is_not_flc(self):
        assert not check_fragment(gl("<a> P"), Fragment.LMU)

    def test_fragments_of_keeps_declaration_order(self):
        assert fragments_of(gl("<a> P")) == [
            Fragment.GL, Fragment.GLS, Fragment.RGL, Fragment.RLGL, Fragment.POOR_TEST,
        ]

    def test_is_right_linear(self):
        assert is_right_linear(parse_game("a; x", variables=["x"]))
        assert not is_right_linear(parse_game("x; a", variables=["x"]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_game_logic_is_right_linear(self, seed):
        formula = random_formula(Fragment.GL, 10, rng=random.Random(seed))
        assert check_fragment(formula, Fragment.RLGL)
        assert check_fragment(formula, Fragment.RGL)


class TestFlcFragments:
    def test_modal_mu_calculus(self):
        formula = parse_flc("mu x. (P \\/ <a> x)")
        assert check_fragment(formula, Fragment.LMU)
        assert check_fragment(formula, Fragment.LSEP)
        assert not check_fragment(formula, Fragment.LSTAR)

    def test_iteration_fragment(self):
        formula = parse_flc("P^* ; Q")
        assert check_fragment(formula, Fragment.LSTAR)
        assert not check_fragment(formula, Fragment.LMU)

    def test_separable_split(self):
        formula = parse_flc("mu x. (P \\/ <a> x)")
        assert separable_split(formula) == (Dia("a", FVar("x")), FProp("P"))

    def test_fixpoint_in_both_branches_is_not_separable(self):
        formula = parse_flc("mu x. (<a> x \\/ <b> x)")
        assert separable_split(formula) is None
        assert not check_fragment(formula, Fragment.LSEP)


class TestRank:
    def test_proposition(self):
        assert rank(Prop("P")) == 0

    def test_test_and_diamond(self):
        assert rank(parse_game("?P")) == 2
        assert rank(gl("<a> P")) == 1

    def test_dual_test_ranks_above_test(self):
        assert rank(parse_game("!P")) == 3

    def test_star_counts_through_desugaring(self):
        # rec z. (a; z ∪ ?true): seq 2, choice 2, test 2, rec 1
        assert rank(parse_game("a^*")) == 5

    def test_unfolding_decreases_rank_of_tests(self):
        assert rank(parse_game("?<a> P")) > rank(gl("<a> P"))

    def test_star_depth(self):
        assert star_depth(parse_game("(a^*; b)^*")) == 2
        assert star_depth(parse_flc("P^* ; Q")) == 1


@pytest.mark.parametrize("tag", ["gl", "GLs", "rlgl", "LMU", "poor_test"])
def test_fragment_tags_parse(tag):
    assert Fragment.parse(tag) in Fragment


def test_unknown_fragment_tag():
    with pytest.raises(ValueError):
        Fragment.parse("ctl")
