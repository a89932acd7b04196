import random

import pytest
from hypothesis import given, settings, strategies as st

from glwb.exceptions import CaptureError, NormalFormViolation, UnsupportedNegation
from glwb.fragments import Fragment
from glwb.generators import random_formula
from glwb.grammar import parse_game_formula
from glwb.rewrite import (
    complement, desugar_star, flc_negate, free_vars, is_normal, is_well_named,
    normal_form, rename_bound, sabotage_atoms, substitute, unfold_fixpoint,
)
from glwb.terms import (
    Atom, Box, Chop, Choice, CoRec, DChoice, Diamond, DStar, DTest, Dia, Dual, DualAtom,
    FNegProp, FProp, FVar, Mu, Neg, NegProp, Nu, Prop, Rec, Seq, Star, Test as TestGame, Top, TrapA,
    TrapD, Var,
)


class TestNormalForm:
    def test_negated_proposition(self):
        assert normal_form(Neg(Prop("P"))) == NegProp("P")

    def test_dual_distributes_over_choice(self):
        game = Dual(Choice(Atom("a"), Atom("b")))
        assert normal_form(game) == DChoice(DualAtom("a"), DualAtom("b"))

    def test_dual_swaps_trap_owner(self):
        assert normal_form(Dual(TrapA("a"))) == TrapD("a")

    def test_negated_diamond_uses_dual_game(self):
        formula = Neg(Diamond(Atom("a"), Prop("P")))
        assert normal_form(formula) == Diamond(DualAtom("a"), NegProp("P"))

    def test_odd_dual_on_variable(self):
        with pytest.raises(NormalFormViolation):
            normal_form(Rec("x", Dual(Var("x"))))

    def test_even_dual_on_variable_is_fine(self):
        game = Dual(Rec("x", Choice(Atom("a"), Dual(Dual(Var("x"))))))
        assert normal_form(game) == CoRec("x", DChoice(DualAtom("a"), Var("x")))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_idempotent(self, seed):
        formula = random_formula(Fragment.GLS, 10, rng=random.Random(seed))
        once = normal_form(formula)
        assert is_normal(once)
        assert normal_form(once) == once

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_complement_is_an_involution(self, seed):
        formula = random_formula(Fragment.RGL, 10, rng=random.Random(seed))
        assert complement(complement(formula)) == normal_form(formula)


class TestFlcNegation:
    def test_fixpoints_swap(self):
        assert flc_negate(Mu("x", Dia("a", FVar("x")))) == Nu("x", Box("a", FVar("x")))

    def test_modalities_swap(self):
        assert flc_negate(Dia("a", FProp("P"))) == Box("a", FNegProp("P"))

    def test_chop_has_no_complement(self):
        with pytest.raises(UnsupportedNegation):
            flc_negate(Chop(FProp("P"), FProp("Q")))


class TestSubstitution:
    def test_replaces_free_occurrences(self):
        assert substitute(Seq(Var("x"), Atom("b")), {"x": Atom("a")}) == Seq(Atom("a"), Atom("b"))

    def test_bound_occurrences_are_kept(self):
        game = Rec("x", Choice(Var("x"), Var("y")))
        assert substitute(game, {"y": Atom("a")}) == Rec("x", Choice(Var("x"), Atom("a")))

    def test_capture(self):
        with pytest.raises(CaptureError):
            substitute(Rec("x", Choice(Var("x"), Var("y"))), {"y": Var("x")})

    def test_free_vars(self):
        assert free_vars(Rec("x", Choice(Var("x"), Var("y")))) == {"y"}


class TestNames:
    def test_rename_repeated_binder(self):
        game = Rec("x", Seq(Atom("a"), Rec("x", Var("x"))))
        renamed = rename_bound(game)
        assert renamed == Rec("x", Seq(Atom("a"), Rec("x1", Var("x1"))))
        assert is_well_named(renamed)
        assert not is_well_named(game)

    def test_sabotage_atoms(self):
        formula = parse_game_formula("<(~a ∪ ~'a); a; b> true")
        assert sabotage_atoms(formula) == {"a"}


class TestFixpoints:
    def test_star_desugars_to_recursion(self):
        var = "z_fix_0"
        expected = Rec(var, Choice(Seq(Atom("a"), Var(var)), TestGame(Top())))
        assert desugar_star(Star(Atom("a"))) == expected

    def test_demonic_star_desugars_to_corecursion(self):
        var = "z_fix_0"
        expected = CoRec(var, DChoice(Seq(Atom("a"), Var(var)), DTest(Top())))
        assert desugar_star(DStar(Atom("a"))) == expected

    def test_unfold(self):
        game = Rec("x", Choice(TestGame(Top()), Seq(Atom("a"), Var("x"))))
        assert unfold_fixpoint(game) == Choice(TestGame(Top()), Seq(Atom("a"), game))
