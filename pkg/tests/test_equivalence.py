import pytest

from glwb.equivalence import equiv_check, truth_set, valid_in
from glwb.grammar import parse_flc, parse_game_formula
from glwb.translate import sharp_formula


def test_truth_set_dispatch(chain):
    assert truth_set(parse_game_formula("<a^*> P"), "GL", chain) == 0b111
    assert truth_set(parse_flc("mu x. (P \\/ <a> x)"), "lmu", chain) == 0b111
    assert truth_set(parse_game_formula("<~a><a> P"), "gls", chain) == chain.prop("P")
    assert truth_set(parse_game_formula("<a> P"), "gls", chain) == 0b010
    with pytest.raises(ValueError):
        truth_set(parse_game_formula("P"), "ctl", chain)


def test_valid_in(chain):
    assert valid_in(parse_game_formula("P \\/ -P"), "rgl", chain)
    assert not valid_in(parse_game_formula("P"), "rgl", chain)


class TestEquivCheck:
    def test_star_unfolding(self, structures):
        left = parse_game_formula("<a^*> P")
        right = parse_game_formula("P \\/ <a><a^*> P")
        report = equiv_check(left, right, structures=structures)
        assert report.equivalent
        assert report.structures_checked == len(structures)
        assert report.to_dict()["counterexample"] is None

    def test_across_logics(self, structures):
        formula = parse_flc("mu x. (Q \\/ <b> x)")
        report = equiv_check(formula, sharp_formula(formula), logics=("flc", "rgl"),
                             structures=structures)
        assert report

    def test_counterexample(self, chain):
        report = equiv_check(parse_game_formula("P"), parse_game_formula("Q"), structures=[chain])
        assert not report
        found = report.counterexample
        assert (found.structure_index, found.state) == (0, 0)
        assert (found.left_holds, found.right_holds) == (False, True)
        assert found.describe() == "structure #0, state 0: left fails, right holds"
        assert report.to_dict()["counterexample"]["state"] == 0

    def test_stops_at_first_disagreement(self, chain, two_state_nbhd):
        report = equiv_check(parse_game_formula("P"), parse_game_formula("Q"),
                             structures=[chain, two_state_nbhd])
        assert report.structures_checked == 1
