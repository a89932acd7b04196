from pathlib import Path

import pytest

from glwb.exceptions import TooManyAtoms
from glwb.grammar import parse_flc, parse_game_formula
from glwb.kernel import (
    Calculus, Justification, ProofBuilder, ProofLine, ProofScript, Verdict, check_proof,
    regression_scripts, taut_check,
)
from glwb.prooffile import load_proof
from glwb.schemas import SchemaId
from glwb.terms import Atom, FormExpr, GameExpr, Prop, Seq, Var, disjunction

PROOF_FILES = sorted((Path(__file__).resolve().parent.parent / "proofs").glob("*.proof"))


def cancelation_inst(alpha=Var("x")):
    return {"a": "a", "alpha": alpha, "x": ("x",), "beta": (None,), "phi": Prop("P")}


class TestTautologies:
    def test_excluded_middle(self):
        assert taut_check(parse_game_formula("P \\/ -P"))

    def test_single_proposition(self):
        assert not taut_check(parse_game_formula("P"))

    def test_modal_subformulas_are_opaque(self):
        assert taut_check(parse_game_formula("<a> P -> <a> P"))
        assert not taut_check(parse_game_formula("<a> P -> <b> P"))

    def test_flc_formulas(self):
        assert taut_check(parse_flc("P \\/ -P"))

    def test_atom_limit(self):
        formula = disjunction(*[Prop(f"P{i}") for i in range(21)])
        with pytest.raises(TooManyAtoms):
            taut_check(formula)
        assert not taut_check(formula, max_atoms=21)


class TestCalculus:
    def test_parse(self):
        assert Calculus.parse("gls+g") is Calculus.GLS_G
        assert Calculus.parse(" Kozen ") is Calculus.KOZEN
        with pytest.raises(ValueError):
            Calculus.parse("S5")

    def test_sabotage_schemas_only_in_sabotage_calculi(self):
        assert SchemaId.S_ASAB in Calculus.GLS.schemas()
        assert SchemaId.S_ASAB not in Calculus.GL.schemas()
        assert SchemaId.AFRAK in Calculus.GL_A.schemas()

    def test_renaming_flag(self):
        assert SchemaId.G_ALPHA not in Calculus.GLS.schemas()
        assert SchemaId.G_ALPHA in Calculus.GLS.schemas(gls_alpha=True)
        assert SchemaId.G_ALPHA not in Calculus.GL.schemas(gls_alpha=True)

    def test_flc_calculi(self):
        assert Calculus.MLMU.flc and Calculus.KOZEN.flc
        assert not Calculus.RLGL.flc


class TestRegressionScripts:
    @pytest.mark.parametrize("name", sorted(regression_scripts()))
    def test_accepted(self, name):
        verdict = check_proof(regression_scripts()[name])
        assert verdict.accepted, verdict.describe()

    @pytest.mark.parametrize("path", PROOF_FILES, ids=lambda p: p.stem)
    def test_shipped_proofs(self, path):
        verdict = check_proof(load_proof(path))
        assert verdict.accepted, verdict.describe()

    def test_shipped_proofs_exist(self):
        assert PROOF_FILES


class TestRejections:
    def test_sabotage_axiom_outside_sabotage_calculus(self):
        script = regression_scripts()["angel-cancelation"]
        verdict = check_proof(ProofScript(Calculus.GL, list(script.lines)))
        assert not verdict
        assert verdict.line == 1
        assert verdict.reason == "SAsab is not a schema of GL"

    def test_side_condition(self):
        line = ProofLine(1, parse_game_formula("<~a><a>P <-> <~a>P"),
                         Justification(SchemaId.S_ASAB, (), cancelation_inst(Seq(Atom("a"), Var("x")))))
        verdict = check_proof(ProofScript(Calculus.GLS, [line]))
        assert verdict.line == 1
        assert verdict.reason.startswith("side condition of SAsab violated")

    def test_forward_premise(self):
        line = ProofLine(1, parse_game_formula("P"), Justification(SchemaId.MP, (2, 3)))
        verdict = check_proof(ProofScript(Calculus.GLS, [line]))
        assert verdict.reason == "premise 2 does not refer to an earlier line"

    def test_wrong_instance(self):
        script = regression_scripts()["angel-cancelation"]
        first = script.lines[0]
        corrupted = ProofLine(1, parse_game_formula("<~a><a>P <-> P"), first.justification)
        verdict = check_proof(ProofScript(Calculus.GLS, [corrupted]))
        assert verdict.reason.startswith("formula is not the instance")

    def test_not_a_tautology(self):
        line = ProofLine(1, parse_game_formula("P -> Q"), Justification(SchemaId.TAUT))
        verdict = check_proof(ProofScript(Calculus.GL, [line]))
        assert verdict.reason == "formula is not a propositional tautology"

    def test_line_numbers_increase(self):
        taut = Justification(SchemaId.TAUT)
        lines = [ProofLine(2, parse_game_formula("P \\/ -P"), taut),
                 ProofLine(1, parse_game_formula("Q \\/ -Q"), taut)]
        verdict = check_proof(ProofScript(Calculus.GL, lines))
        assert verdict.line == 1
        assert "does not increase" in verdict.reason

    def test_modus_ponens_needs_matching_premises(self):
        proof = ProofBuilder(Calculus.GL)
        proof.taut(parse_game_formula("P \\/ -P"))
        proof.taut(parse_game_formula("Q \\/ -Q"))
        proof.script.lines.append(ProofLine(3, parse_game_formula("R"), Justification(SchemaId.MP, (1, 2))))
        verdict = check_proof(proof.script)
        assert verdict.line == 3

    def test_rejection_stops_at_first_bad_line(self):
        script = regression_scripts()["no-effect"]
        lines = list(script.lines)
        lines[1] = ProofLine(2, parse_game_formula("P"), lines[1].justification)
        verdict = check_proof(ProofScript(script.calculus, lines))
        assert verdict.line == 2


class TestBuilder:
    def test_chain_derives_goal(self):
        proof = ProofBuilder(Calculus.GL, "chain")
        test = proof.axiom(SchemaId.G_TEST, phi=Prop("P"), psi=Prop("Q"))
        goal = parse_game_formula("<?P> Q -> P")
        last = proof.chain([test], goal)
        assert proof.formula(last) == goal
        assert check_proof(proof.script)

    def test_modus_ponens_needs_an_implication(self):
        proof = ProofBuilder(Calculus.GL)
        first = proof.taut(parse_game_formula("P \\/ -P"))
        with pytest.raises(ValueError):
            proof.mp(first, first)

    def test_rule_lines(self):
        proof = ProofBuilder(Calculus.GL)
        premise = proof.taut(parse_game_formula("P -> P"))
        line = proof.rule(SchemaId.G_MON, [premise], alpha=Atom("a"), phi=Prop("P"), psi=Prop("P"))
        assert proof.formula(line) == parse_game_formula("<a> P -> <a> P")
        assert check_proof(proof.script)


def test_verdict_text():
    assert Verdict(True).describe() == "accepted"
    assert Verdict(False, 4, "bad").describe() == "rejected at line 4: bad"


def _replaced(script, index, line):
    lines = list(script.lines)
    lines[index] = line
    return ProofScript(script.calculus, lines, script.name)


def _mutants():
    """(id, corrupted script, line expected to be rejected, expected reason or None)"""
    found = []
    for name, script in sorted(regression_scripts().items()):
        for index, line in enumerate(script.lines):
            just = line.justification
            tag = f"{name}:{line.number}"
            found.append((f"{tag}:formula", _replaced(script, index, ProofLine(
                line.number, Prop("Zmut"), just)), line.number, None))
            if just.premises:
                bad = Justification(just.schema, (line.number,) + just.premises[1:], just.inst)
                found.append((f"{tag}:premise", _replaced(script, index, ProofLine(
                    line.number, line.formula, bad)), line.number,
                    f"premise {line.number} does not refer to an earlier line"))
            for key, value in sorted(just.inst.items()):
                if isinstance(value, FormExpr):
                    changed = Prop("Zmut")
                elif isinstance(value, GameExpr):
                    changed = Seq(Atom("zmut"), value)
                else:
                    continue
                bad = Justification(just.schema, just.premises, {**just.inst, key: changed})
                found.append((f"{tag}:inst.{key}", _replaced(script, index, ProofLine(
                    line.number, line.formula, bad)), line.number, None))
    return found


MUTANTS = _mutants()


class TestMutatedScripts:
    def test_sweep_is_large_enough(self):
        assert len(MUTANTS) >= 50
        kinds = {mutant_id.split(":")[-1].split(".")[0] for mutant_id, *_ in MUTANTS}
        assert kinds == {"formula", "premise", "inst"}

    @pytest.mark.parametrize("script,line,reason", [m[1:] for m in MUTANTS],
                             ids=[m[0] for m in MUTANTS])
    def test_rejected_at_the_mutated_line(self, script, line, reason):
        verdict = check_proof(script)
        assert not verdict
        assert verdict.line == line
        if reason is not None:
            assert verdict.reason == reason
