import random

import pytest
from hypothesis import given, settings, strategies as st

from glwb.evaluate import eval_rgl_formula, eval_rgl_game, eval_vectorial, flc_truth
from glwb.exceptions import NotRightLinear, NotSeparable, ReservedNameClash, UnsupportedConstruct
from glwb.fragments import Fragment, check_fragment
from glwb.generators import random_formula, random_structure
from glwb.grammar import parse_flc, parse_game_formula
from glwb.sabotage import gls_truth
from glwb.terms import (
    Atom, Bot, Chop, Choice, Dia, DTest, FixKind, FOr, FAnd, FProp, FVar, Id, Mu, Prop,
    Rec, RecSystem, Seq, StarFix, Test as TestGame, Top, Var,
)
from glwb.translate import (
    bekic_eliminate, flat, natural, qflat, sep_to_star, sharp, sharp_formula,
    translation_for, with_report,
)


def _structure(rng):
    return random_structure(rng.choice([2, 3]), rng.choice(["kripke", "nbhd"]), rng=rng)


class TestSharp:
    def test_proposition_ends_the_game(self):
        assert sharp(FProp("P")) == Seq(TestGame(Prop("P")), DTest(Bot()))

    def test_identity_passes(self):
        assert sharp(Id()) == TestGame(Top())

    def test_modalities(self):
        assert sharp(Dia("a", Id())) == Seq(Atom("a"), TestGame(Top()))

    def test_output_is_right_linear(self):
        formula = parse_flc("mu x. (P \\/ <a> x)")
        assert check_fragment(sharp_formula(formula), Fragment.RLGL)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_preserves_truth(self, seed):
        rng = random.Random(seed)
        formula = random_formula(Fragment.LMU, 8, rng=rng)
        structure = _structure(rng)
        assert eval_rgl_formula(sharp_formula(formula), structure) == flc_truth(formula, structure)


class TestFlat:
    def test_atomic_game(self):
        assert flat(Atom("a")) == Dia("a", FVar("u"))

    def test_reserved_markers(self):
        with pytest.raises(ReservedNameClash):
            flat(Atom("u"))

    def test_recursion(self):
        game = Rec("x", Choice(TestGame(Prop("P")), Seq(Atom("a"), Var("x"))))
        expected = Mu("x", FOr(FAnd(FProp("P"), FVar("u")), Dia("a", FVar("x"))))
        assert qflat(game) == expected

    def test_qflat_needs_right_linear_input(self):
        formula = parse_game_formula("<rec x. (a; (x ∪ c); b)> P")
        with pytest.raises(NotRightLinear):
            qflat(formula)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_flat_preserves_truth(self, seed):
        rng = random.Random(seed)
        formula = random_formula(Fragment.RGL, 8, rng=rng)
        structure = _structure(rng)
        assert flc_truth(flat(formula), structure) == eval_rgl_formula(formula, structure)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_qflat_lands_in_mu_calculus(self, seed):
        rng = random.Random(seed)
        formula = random_formula(Fragment.GL, 8, rng=rng)
        structure = _structure(rng)
        translated = qflat(formula)
        assert check_fragment(translated, Fragment.LMU)
        assert flc_truth(translated, structure) == eval_rgl_formula(formula, structure)


class TestSeparable:
    def test_reachability_becomes_iteration(self):
        formula = parse_flc("mu x. (P \\/ <a> x)")
        assert sep_to_star(formula) == Chop(StarFix(Dia("a", Id())), FProp("P"))

    def test_fixpoint_free_formula_is_unchanged(self):
        formula = parse_flc("P \\/ <a> Q")
        assert sep_to_star(formula) == formula

    def test_chop_is_rejected(self):
        with pytest.raises(NotSeparable):
            sep_to_star(parse_flc("P ; Q"))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_preserves_truth(self, seed):
        rng = random.Random(seed)
        formula = random_formula(Fragment.LSEP, 8, rng=rng)
        structure = _structure(rng)
        translated = sep_to_star(formula)
        assert check_fragment(translated, Fragment.LSTAR)
        assert flc_truth(translated, structure) == flc_truth(formula, structure)


class TestBekic:
    G1 = Choice(TestGame(Prop("P")), Seq(Atom("a"), Var("x2")))
    G2 = Choice(TestGame(Prop("Q")), Seq(Atom("b"), Var("x1")))

    def test_singleton_system(self):
        system = RecSystem(FixKind.MU, ("x",), (Var("x"),), 0)
        assert bekic_eliminate(system) == Rec("x", Var("x"))

    def test_last_component_goes_first(self):
        system = RecSystem(FixKind.MU, ("x1", "x2"), (self.G1, self.G2), 0)
        inner = Rec("x2", self.G2)
        expected = Rec("x1", Choice(TestGame(Prop("P")), Seq(Atom("a"), inner)))
        assert bekic_eliminate(system) == expected

    @pytest.mark.parametrize("index", [0, 1])
    @pytest.mark.parametrize("kind", [FixKind.MU, FixKind.NU])
    def test_components_keep_their_meaning(self, structures, index, kind):
        system = RecSystem(kind, ("x1", "x2"), (self.G1, self.G2), index)
        nested = bekic_eliminate(system)
        for structure in structures:
            expected = eval_vectorial([("x1", self.G1), ("x2", self.G2)], kind, structure,
                                      index=index)
            assert eval_rgl_game(nested, structure, fast_path=False) == expected


class TestNatural:
    def test_games_without_recursion_are_unchanged(self):
        assert natural(Atom("a")) == Atom("a")

    def test_reserved_prefixes(self):
        with pytest.raises(ReservedNameClash):
            natural(Atom("b_x"))

    def test_needs_right_linear_input(self):
        with pytest.raises(NotRightLinear):
            natural(parse_game_formula("<rec x. (a; (x ∪ c); b)> P"))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_preserves_truth(self, seed):
        rng = random.Random(seed)
        formula = random_formula(Fragment.RLGL, 6, rng=rng)
        structure = random_structure(2, rng.choice(["kripke", "nbhd"]), rng=rng)
        translated = natural(formula)
        assert check_fragment(translated, Fragment.GLS)
        assert gls_truth(translated, structure) == eval_rgl_formula(formula, structure)


class TestDispatch:
    def test_known_pairs(self):
        assert translation_for("flc", "rgl") is sharp_formula
        assert translation_for("RLGL", "lmu") is qflat
        assert translation_for("lsep", "lstar") is sep_to_star

    def test_unknown_pair(self):
        with pytest.raises(UnsupportedConstruct):
            translation_for("gls", "flc")

    def test_report(self):
        output, report = with_report("sharp", sharp_formula, parse_flc("<a> P"))
        assert output == sharp_formula(parse_flc("<a> P"))
        assert report.translation == "sharp"
        assert report.output_size > report.input_size
        lines = report.as_lines()
        assert lines[0] == "translation=sharp"
        assert any(line.startswith("ratio=") for line in lines)
        assert report.to_dict()["output_size"] == report.output_size

    def test_report_without_ceiling_has_no_verdict(self):
        _, report = with_report("sharp", sharp_formula, parse_flc("<a> P"))
        assert report.ceiling is None and report.within_ceiling is None
        assert not any(line.startswith("ceiling_log10=") for line in report.as_lines())

    def test_report_flags_output_over_ceiling(self):
        _, report = with_report("sharp", sharp_formula, parse_flc("<a> P"), ceiling=0.0)
        assert report.within_ceiling is False
        assert "within_ceiling=no" in report.as_lines()
