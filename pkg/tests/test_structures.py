import pytest

from glwb.exceptions import CapExceeded, StructureFormatError
from glwb.structures import (
    FiniteStructure, Relation, dump_structure, kripke, lift_game, load_structure,
    neighbourhood, parse_structure, save_structure,
)

SAMPLE = """\
states 3
prop P: 0 2
game a rel: 0->1 1->2
game b nbhd: 0:{0}{1,2} 2:{}
"""


class TestSemantics:
    def test_relational_step(self):
        structure = kripke(2, relations={"a": [(0, 1)]})
        assert structure.step("a", 0b10) == 0b01
        assert structure.step("a", 0b01) == 0

    def test_relational_dual_step(self):
        structure = kripke(2, relations={"a": [(0, 1)]})
        # state 1 has no successor, so Demon is stuck there
        assert structure.dual_step("a", 0) == 0b10
        assert structure.dual_step("a", 0b10) == 0b11

    def test_neighbourhood_step(self, two_state_nbhd):
        assert two_state_nbhd.step("a", 0b11) == 0b01
        assert two_state_nbhd.step("a", 0b01) == 0

    def test_unlisted_names_are_empty(self, chain):
        assert chain.prop("R") == 0
        assert chain.step("c", chain.full) == 0

    def test_lifted_games_are_monotone(self, structures):
        for structure in structures:
            for name in ("a", "b"):
                assert lift_game(structure, name).is_monotone()

    def test_state_cap(self, chain):
        with pytest.raises(CapExceeded):
            lift_game(chain, "a", cap=2)


class TestValidation:
    def test_needs_a_state(self):
        with pytest.raises(ValueError):
            FiniteStructure(0)

    def test_edge_out_of_range(self):
        with pytest.raises(ValueError):
            FiniteStructure(2, {}, {"a": Relation(frozenset({(0, 2)}))})

    def test_family_per_state(self):
        with pytest.raises(ValueError):
            FiniteStructure(2, {}, {"a": neighbourhood([[[0]]])})

    def test_kripke_flag(self, chain, two_state_nbhd):
        assert chain.is_kripke
        assert not two_state_nbhd.is_kripke


class TestStructureFiles:
    def test_canonical_dump(self):
        assert dump_structure(parse_structure(SAMPLE)) == SAMPLE

    def test_parsed_contents(self):
        structure = parse_structure(SAMPLE)
        assert structure.n == 3
        assert structure.prop("P") == 0b101
        assert structure.step("a", 0b100) == 0b010
        assert structure.step("b", 0) == 0b100
        assert structure.step("b", 0b001) == 0b101

    def test_comments_and_blank_lines(self):
        text = "# two states\nstates 2\n\nprop P: 1  # only the second\n"
        assert parse_structure(text).prop("P") == 0b10

    def test_file_round_trip(self, tmp_path, structures):
        for index, structure in enumerate(structures):
            path = tmp_path / f"s{index}.txt"
            save_structure(structure, path)
            assert load_structure(path) == structure

    @pytest.mark.parametrize("text", [
        "prop P: 0\n",
        "states 2\nprop P: 5\n",
        "states 2\nstates 3\n",
        "states 2\ngame a rel: 0-1\n",
        "states 2\ngame a tree: 0->1\n",
        "",
    ])
    def test_malformed(self, text):
        with pytest.raises(StructureFormatError):
            parse_structure(text)

    def test_zero_states_is_reported_on_its_line(self):
        with pytest.raises(StructureFormatError) as info:
            parse_structure("# empty\nstates 0\n")
        assert info.value.line == 2
