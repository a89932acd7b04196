import random

import pytest

from glwb.exceptions import IncompleteInstantiation, PartitionViolation, SideConditionViolation
from glwb.fragments import Fragment, check_fragment
from glwb.generators import InstantiationSampler, random_structure
from glwb.grammar import parse_game_formula
from glwb.sabotage import gls_valid
from glwb.schemas import (
    SCHEMAS, SchemaId, RuleInstance, afrak_instances, check_partition, check_side_condition,
    instantiate_schema, occurs_right_linearly, replace_traps, require_side_condition,
)
from glwb.terms import Atom, FixKind, FOr, FVar, Mu, Nu, Prop, Seq, Star, Var, iff


def angel_cancelation(alpha=Var("x")):
    return {"a": "a", "x": ("x",), "beta": (None,), "alpha": alpha, "phi": Prop("P")}


class TestInstances:
    def test_game_test(self):
        instance = instantiate_schema(SchemaId.G_TEST, {"phi": Prop("P"), "psi": Prop("Q")})
        assert instance == parse_game_formula("<?P> Q <-> P /\\ Q")

    def test_fixpoint_axiom(self):
        instance = instantiate_schema(SchemaId.FP, {"x": "x", "phi": FVar("x")})
        assert instance == FOr(Nu("x", FVar("x")), Mu("x", FVar("x")))

    def test_rule_has_premises(self):
        inst = {"alpha": Atom("a"), "phi": Prop("P"), "psi": Prop("Q")}
        instance = instantiate_schema(SchemaId.G_MON, inst)
        assert isinstance(instance, RuleInstance)
        assert instance.premises == (parse_game_formula("P -> Q"),)
        assert instance.conclusion == parse_game_formula("<a> P -> <a> Q")

    def test_angel_cancelation(self):
        instance = instantiate_schema(SchemaId.S_ASAB, angel_cancelation())
        assert instance == parse_game_formula("<~a><a>P <-> <~a>P")

    def test_demon_sabotage_blocks_angel(self):
        instance = instantiate_schema(SchemaId.S_DSAB, angel_cancelation())
        assert instance == parse_game_formula("<~'a><a>P <-> <?false>P")

    def test_missing_metavariable(self):
        with pytest.raises(IncompleteInstantiation):
            instantiate_schema(SchemaId.G_TEST, {"phi": Prop("P")})

    def test_unknown_metavariable(self):
        with pytest.raises(IncompleteInstantiation):
            instantiate_schema(SchemaId.G_TEST, {"phi": Prop("P"), "psi": Prop("Q"), "chi": Prop("R")})

    def test_every_schema_has_a_signature(self):
        assert set(SCHEMAS) == set(SchemaId)


class TestSideConditions:
    def test_sabotage_atom_outside_alpha(self):
        assert check_side_condition(SchemaId.S_ASAB, angel_cancelation()) is None
        problem = check_side_condition(SchemaId.S_ASAB, angel_cancelation(Seq(Atom("a"), Var("x"))))
        assert problem == "a appears in alpha"

    def test_substituted_variable_must_stay_right_linear(self):
        problem = check_side_condition(SchemaId.S_ASAB, angel_cancelation(Seq(Var("x"), Atom("b"))))
        assert "right-linearly" in problem

    def test_renaming_needs_fresh_variable(self):
        inst = {"kind": FixKind.MU, "x": "x", "y": "y", "alpha": Seq(Atom("a"), Var("y")),
                "phi": Prop("P")}
        assert check_side_condition(SchemaId.G_ALPHA, inst) is not None

    def test_require_raises(self):
        with pytest.raises(SideConditionViolation):
            require_side_condition(SchemaId.S_ASAB, angel_cancelation(Atom("a")))

    def test_occurs_right_linearly(self):
        assert occurs_right_linearly(Seq(Atom("a"), Var("x")), "x")
        assert not occurs_right_linearly(Seq(Var("x"), Atom("a")), "x")
        assert not occurs_right_linearly(Star(Var("x")), "x")


class TestAFrak:
    def test_traps_become_fresh_games(self):
        instances = [(SchemaId.S_ASAB, {**angel_cancelation(), "a": "b"})]
        built = afrak_instances((), ("b",), ("s_b",), {"b": "s_b"}, instances)
        assert built == [parse_game_formula("<s_b><b>P <-> <s_b>P")]
        assert check_fragment(built[0], Fragment.GL)

    def test_no_instances(self):
        assert afrak_instances(("a",), ("b",), ("s_b",), {"b": "s_b"}, []) == []

    def test_overlapping_parts(self):
        with pytest.raises(PartitionViolation):
            check_partition(("a", "b"), ("b",), ("s_b",), {"b": "s_b"})

    def test_non_injective_mapping(self):
        with pytest.raises(PartitionViolation):
            check_partition((), ("b", "c"), ("s",), {"b": "s", "c": "s"})

    def test_instance_outside_g2(self):
        instances = [(SchemaId.S_ASAB, {**angel_cancelation(), "a": "b", "alpha": Seq(Atom("c"), Var("x"))})]
        with pytest.raises(PartitionViolation):
            afrak_instances((), ("b",), ("s_b",), {"b": "s_b"}, instances)

    def test_replace_traps(self):
        formula = parse_game_formula("<~b; ~'b> P")
        assert replace_traps(formula, {"b": "s_b"}) == parse_game_formula("<s_b; s_b^d> P")


@pytest.mark.parametrize("schema_id", [
    SchemaId.G_TEST, SchemaId.G_DTEST, SchemaId.G_CHOICE, SchemaId.G_DCHOICE,
    SchemaId.G_COMP, SchemaId.G_NOT, SchemaId.G_STAR_FP,
])
def test_game_axioms_are_valid(schema_id):
    rng = random.Random(f"schema:{schema_id.value}")
    sampler = InstantiationSampler(rng, size=4)
    for _ in range(5):
        formula = instantiate_schema(schema_id, sampler.sample(schema_id))
        structure = random_structure(2, rng.choice(["kripke", "nbhd"]), rng=rng)
        assert gls_valid(formula, structure)


def test_iff_is_two_implications():
    left, right = Prop("P"), Prop("Q")
    assert iff(left, right) == parse_game_formula("P <-> Q")
