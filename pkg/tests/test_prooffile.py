import pytest

from glwb.exceptions import ProofFormatError
from glwb.kernel import Calculus, check_proof, regression_scripts
from glwb.prooffile import (
    dump_proof, load_proof, parse_instantiation, parse_proof, save_proof, split_top_level,
)
from glwb.rewrite import normal_form
from glwb.schemas import SchemaId
from glwb.terms import Prop, Var

CANCELATION = """
# trap then play
calculus GLs
name cancel
1. <~a><a>P <-> <~a>P BY axiom:SAsab {a=a, alpha=x, x=[x], beta=[_], phi=P}
"""


def test_split_top_level():
    parts = split_top_level("a=1, b=[x, y], c={p=q, r=s}, d=<a;b>(P \\/ Q)")
    assert parts == ["a=1", "b=[x, y]", "c={p=q, r=s}", "d=<a;b>(P \\/ Q)"]
    assert split_top_level("") == []
    assert split_top_level("[_]") == ["[_]"]


class TestInstantiation:
    def test_vectors_and_variables(self):
        inst = parse_instantiation(SchemaId.S_ASAB, "{a=a, alpha=x, x=[x], beta=[_], phi=P}",
                                   Calculus.GLS)
        assert inst == {"a": "a", "alpha": Var("x"), "x": ("x",), "beta": (None,), "phi": Prop("P")}

    def test_empty(self):
        assert parse_instantiation(SchemaId.TAUT, "", Calculus.GL) == {}

    def test_unknown_key(self):
        with pytest.raises(ValueError):
            parse_instantiation(SchemaId.G_TEST, "{phi=P, chi=Q}", Calculus.GL)

    def test_repeated_key(self):
        with pytest.raises(ValueError):
            parse_instantiation(SchemaId.G_TEST, "{phi=P, phi=Q}", Calculus.GL)


class TestParse:
    def test_header_and_lines(self):
        script = parse_proof(CANCELATION)
        assert script.calculus is Calculus.GLS
        assert script.name == "cancel"
        assert [line.number for line in script.lines] == [1]
        assert script.lines[0].justification.schema is SchemaId.S_ASAB
        assert check_proof(script)

    def test_premises(self):
        text = "calculus GL\n1. P \\/ -P BY axiom:Taut\n2. P \\/ -P BY rule:MP from 1, 1\n"
        script = parse_proof(text)
        assert script.lines[1].justification.premises == (1, 1)

    @pytest.mark.parametrize("text,line", [
        ("1. P BY axiom:Taut\n", 1),
        ("calculus GL\ncalculus GLs\n", 2),
        ("calculus S4\n", 1),
        ("calculus GL\nthis is not a proof line\n", 2),
        ("calculus GL\n1. P \\/ -P\n", 2),
        ("calculus GL\n1. P BY lemma:Taut\n", 2),
        ("calculus GL\n1. P BY axiom:Nope\n", 2),
        ("calculus GL\n1. P /\\ BY axiom:Taut\n", 2),
        ("calculus GL\n1. <?P>Q <-> P /\\ Q BY axiom:GTest from 1 {phi=P, psi=Q}\n", 2),
    ])
    def test_malformed(self, text, line):
        with pytest.raises(ProofFormatError) as info:
            parse_proof(text)
        assert info.value.line == line

    def test_missing_header(self):
        with pytest.raises(ProofFormatError):
            parse_proof("# nothing here\n")


class TestDump:
    @pytest.mark.parametrize("name", sorted(regression_scripts()))
    def test_dumped_scripts_parse_back(self, name):
        script = regression_scripts()[name]
        parsed = parse_proof(dump_proof(script))
        assert parsed.calculus is script.calculus
        assert parsed.name == script.name
        assert [normal_form(line.formula) for line in parsed.lines] == \
            [normal_form(line.formula) for line in script.lines]
        assert [line.justification.premises for line in parsed.lines] == \
            [line.justification.premises for line in script.lines]
        assert check_proof(parsed)

    def test_instantiation_survives(self):
        script = regression_scripts()["angel-cancelation"]
        parsed = parse_proof(dump_proof(script))
        assert dict(parsed.lines[0].justification.inst) == dict(script.lines[0].justification.inst)

    def test_file_round_trip(self, tmp_path):
        script = regression_scripts()["no-effect"]
        path = tmp_path / "no-effect.proof"
        save_proof(script, path)
        loaded = load_proof(path)
        assert loaded.name == "no-effect"
        assert normal_form(loaded.conclusion()) == normal_form(script.conclusion())

    def test_name_defaults_to_file_stem(self, tmp_path):
        path = tmp_path / "excluded-middle.proof"
        path.write_text("calculus GL\n1. P \\/ -P BY axiom:Taut\n", encoding="utf-8")
        assert load_proof(path).name == "excluded-middle"
