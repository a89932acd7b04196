import random

import pytest
from hypothesis import given, settings, strategies as st

from glwb.evaluate import (
    FlcEvaluator, eval_flc, eval_rgl_formula, eval_rgl_game, eval_vectorial, flc_truth,
    flc_valid, rgl_valid,
)
from glwb.exceptions import CapExceeded, UnboundVariable, UnsupportedConstruct
from glwb.fragments import Fragment
from glwb.generators import random_formula, random_structure
from glwb.grammar import parse_flc, parse_game, parse_game_formula
from glwb.lattice import Effectivity, all_sets
from glwb.structures import kripke, lift_game
from glwb.terms import Atom, Choice, Dia, FixKind, FVar, Id, Mu, Prop, Rec, Seq, Test as TestGame, Var


class TestGameEvaluation:
    def test_test_game_intersects(self, chain):
        table = eval_rgl_game(TestGame(Prop("P")), chain)
        assert all(table(goal) == goal & chain.prop("P") for goal in all_sets(chain.n))

    def test_reachability_by_iteration(self, chain):
        assert eval_rgl_formula(parse_game_formula("<a^*> P"), chain) == 0b111
        assert eval_rgl_formula(parse_game_formula("<b^*> P"), chain) == 0b100

    def test_demon_moves(self, chain):
        # Demon must move along a; state 2 is stuck so Angel wins there
        assert eval_rgl_formula(parse_game_formula("<a^d> false"), chain) == 0b100

    def test_empty_recursion_is_bottom(self, chain):
        game = Rec("x", Var("x"))
        assert eval_rgl_game(game, chain) == Effectivity.bottom(chain.n)
        assert eval_rgl_game(game, chain, fast_path=False) == Effectivity.bottom(chain.n)

    def test_recursion_matches_star(self, chain):
        star = parse_game("(a)^*")
        rec = Rec("x", Choice(TestGame(Prop("P")), Seq(Atom("a"), Var("x"))))
        reach = eval_rgl_game(star, chain)(chain.prop("P"))
        assert eval_rgl_game(rec, chain, fast_path=False)(chain.full) == reach

    def test_singleton_system_is_plain_recursion(self, chain):
        body = Choice(TestGame(Prop("P")), Seq(Atom("a"), Var("x")))
        system = eval_vectorial([("x", body)], FixKind.MU, chain)
        assert system == eval_rgl_game(Rec("x", body), chain, fast_path=False)

    def test_system_of_identities_is_bottom(self, chain):
        system = [("x", Var("y")), ("y", Var("x"))]
        assert eval_vectorial(system, FixKind.MU, chain, index=1) == Effectivity.bottom(chain.n)
        assert eval_vectorial(system, FixKind.NU, chain, index=0) == Effectivity.top(chain.n)

    def test_unbound_variable(self, chain):
        with pytest.raises(UnboundVariable):
            eval_rgl_game(Seq(Atom("a"), Var("x")), chain)

    def test_traps_need_sabotage_evaluator(self, chain):
        with pytest.raises(UnsupportedConstruct):
            eval_rgl_formula(parse_game_formula("<~a> P"), chain)

    def test_state_cap(self, chain):
        with pytest.raises(CapExceeded):
            eval_rgl_game(Atom("a"), chain, cap=2)

    def test_validity(self, chain):
        assert rgl_valid(parse_game_formula("P \\/ -P"), chain)
        assert not rgl_valid(parse_game_formula("<a> true"), chain)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_pointwise_engine_matches_tables(self, seed):
        rng = random.Random(seed)
        formula = random_formula(Fragment.RGL, 8, rng=rng)
        structure = random_structure(3, rng.choice(["kripke", "nbhd"]), rng=rng)
        fast = eval_rgl_formula(formula, structure)
        assert fast == eval_rgl_formula(formula, structure, fast_path=False)


class TestFlcEvaluation:
    def test_identity_and_bottom(self, chain):
        assert eval_flc(Id(), chain) == Effectivity.identity(chain.n)
        assert eval_flc(Mu("x", FVar("x")), chain) == Effectivity.bottom(chain.n)

    def test_diamond_of_identity_is_the_atomic_game(self, chain):
        assert eval_flc(Dia("a", Id()), chain) == lift_game(chain, "a")

    def test_truth_is_value_at_empty_set(self, chain):
        assert flc_truth(parse_flc("mu x. (P \\/ <a> x)"), chain) == 0b111
        assert flc_truth(parse_flc("<a> id"), chain) == 0
        assert flc_valid(parse_flc("true"), chain)

    def test_iteration(self, chain):
        formula = parse_flc("(<a> id)^* ; P")
        assert flc_truth(formula, chain) == 0b111

    def test_state_cap(self, chain):
        with pytest.raises(CapExceeded):
            FlcEvaluator(chain, cap=2, fast_path=False).table(Id())

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_pointwise_engine_matches_tables(self, seed):
        rng = random.Random(seed)
        formula = random_formula("flc", 8, rng=rng)
        structure = random_structure(2, rng.choice(["kripke", "nbhd"]), rng=rng)
        assert eval_flc(formula, structure) == eval_flc(formula, structure, fast_path=False)


def image(edges, states):
    return {t for s, t in edges if s in states}


def balanced_oracle(n, a_edges, b_edges, goal):
    """States with some k such that k a-steps then k b-steps reach the goal"""
    result = 0
    for start in range(n):
        front = {start}
        for steps in range(n):
            back = front
            for _ in range(steps):
                back = image(b_edges, back)
            if back & goal:
                result |= 1 << start
                break
            front = image(a_edges, front)
    return result


class TestBalancedRecursion:
    FORMULA = "<rec x. (?true ∪ a; x; b)> P"

    @pytest.mark.parametrize("seed", range(40))
    def test_matches_counting_oracle_on_chains(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 6)
        a_edges = [(i, i + 1) for i in range(n - 1) if rng.random() < 0.8]
        b_edges = [(i, j) for i in range(n) for j in (i - 1, i, i + 1)
                   if 0 <= j < n and rng.random() < 0.5]
        goal = {i for i in range(n) if rng.random() < 0.4}
        structure = kripke(n, {"P": goal}, {"a": a_edges, "b": b_edges})
        formula = parse_game_formula(self.FORMULA)
        expected = balanced_oracle(n, a_edges, b_edges, goal)
        assert eval_rgl_formula(formula, structure) == expected
        assert eval_rgl_formula(formula, structure, fast_path=False) == expected

    def test_needs_matching_step_counts(self):
        structure = kripke(3, {"P": [2]}, {"a": [(0, 1)], "b": [(1, 2)]})
        assert eval_rgl_formula(parse_game_formula(self.FORMULA), structure) == 0b101
        assert eval_rgl_formula(parse_game_formula("<a^*; b^*> P"), structure) == 0b111
