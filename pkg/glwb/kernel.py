"""
Hilbert proof checking for the fixpoint and game logic calculi

A proof script is a list of numbered lines, each justified by an axiom
instance or by a rule applied to earlier lines. Axiom and rule lines carry
their instantiation explicitly; lines are compared up to normal form.
"""

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Collection, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .exceptions import TooManyAtoms, UnsupportedNegation, WorkbenchError
from .fragments import Fragment, check_fragment
from .grammar import parse_game, parse_game_formula
from .printer import to_text
from .rewrite import complement, flc_negate, normal_form
from .schemas import (
    DEFAULT_AFRAK_MEMBERS, SABOTAGE_SCHEMAS, RuleInstance, SchemaId,
    check_side_condition, instantiate_schema, signature,
)
from .terms import (
    And, Bot, FAnd, FBot, FlcExpr, FNegProp, FOr, FProp, FTop, Neg, NegProp, Or, Prop, Top,
    implies,
)


logger = logging.getLogger(__name__)

DEFAULT_MAX_TAUT_ATOMS = 20


class Calculus(Enum):
    MLMU = "mLmu"
    KOZEN = "Kozen"
    GL = "GL"
    GL_A = "GL+A"
    RLGL = "rlGL"
    RLGL_G = "rlGL+G"
    GLS = "GLs"
    GLS_G = "GLs+G"

    @classmethod
    def parse(cls, name: str) -> "Calculus":
        for member in cls:
            if member.value.lower() == name.strip().lower():
                return member
        raise ValueError(f"unknown calculus {name!r}")

    @property
    def flc(self) -> bool:
        return self in (Calculus.MLMU, Calculus.KOZEN)

    @property
    def fragment(self) -> Fragment:
        return _LANGUAGE[self]

    def schemas(self, gls_alpha: bool = False) -> FrozenSet[SchemaId]:
        admitted = set(_SCHEMAS[self])
        if gls_alpha and self in (Calculus.GLS, Calculus.GLS_G):
            admitted.add(SchemaId.G_ALPHA)
        return frozenset(admitted)


_KOZEN_EXTRAS = {SchemaId.BOX_AND, SchemaId.K, SchemaId.BOX_TOP}
_MLMU = {SchemaId.TAUT, SchemaId.FP, SchemaId.ALPHA, SchemaId.MP, SchemaId.MU_RULE, SchemaId.MON_A}
_RLGL = {
    SchemaId.TAUT, SchemaId.G_NOT, SchemaId.G_TEST, SchemaId.G_CHOICE, SchemaId.G_COMP,
    SchemaId.G_FP, SchemaId.G_ALPHA, SchemaId.MP, SchemaId.G_MU_RULE, SchemaId.G_MON,
    SchemaId.G_DTEST, SchemaId.G_DCHOICE, SchemaId.G_NU_RULE,
}
_GL = {
    SchemaId.TAUT, SchemaId.G_NOT, SchemaId.G_TEST, SchemaId.G_CHOICE, SchemaId.G_COMP,
    SchemaId.G_STAR_FP, SchemaId.MP, SchemaId.G_STAR_MU, SchemaId.G_MON,
    SchemaId.G_DTEST, SchemaId.G_DCHOICE,
}

_SCHEMAS = {
    Calculus.MLMU: _MLMU,
    Calculus.KOZEN: _MLMU | _KOZEN_EXTRAS,
    Calculus.GL: _GL,
    Calculus.GL_A: _GL | {SchemaId.AFRAK},
    Calculus.RLGL: _RLGL,
    Calculus.RLGL_G: _RLGL | _KOZEN_EXTRAS,
    Calculus.GLS: _GL | SABOTAGE_SCHEMAS,
    Calculus.GLS_G: _GL | SABOTAGE_SCHEMAS | _KOZEN_EXTRAS,
}

_LANGUAGE = {
    Calculus.MLMU: Fragment.LMU,
    Calculus.KOZEN: Fragment.LMU,
    Calculus.GL: Fragment.GL,
    Calculus.GL_A: Fragment.GL,
    Calculus.RLGL: Fragment.RLGL,
    Calculus.RLGL_G: Fragment.RLGL,
    Calculus.GLS: Fragment.GLS,
    Calculus.GLS_G: Fragment.GLS,
}


# Propositional tautologies

class _AtomTable:
    """Opaque subformulas, each paired with its syntactic complement"""

    def __init__(self, flc: bool):
        self.flc = flc
        self.index: Dict[Any, int] = {}

    def __len__(self) -> int:
        return len(self.index)

    def _complement(self, f):
        try:
            return flc_negate(f) if self.flc else complement(f)
        except UnsupportedNegation:
            return None

    def literal(self, f) -> Tuple[str, int, bool]:
        if f in self.index:
            return ("lit", self.index[f], True)
        other = self._complement(f)
        if other is not None and other in self.index:
            return ("lit", self.index[other], False)
        self.index[f] = len(self.index)
        return ("lit", self.index[f], True)

    def encode(self, f):
        if isinstance(f, (Top, FTop)):
            return ("const", True)
        if isinstance(f, (Bot, FBot)):
            return ("const", False)
        if isinstance(f, (Or, FOr)):
            return ("or", self.encode(f.left), self.encode(f.right))
        if isinstance(f, (And, FAnd)):
            return ("and", self.encode(f.left), self.encode(f.right))
        if isinstance(f, NegProp):
            return self.literal(Prop(f.name))[:2] + (False,)
        if isinstance(f, FNegProp):
            return self.literal(FProp(f.name))[:2] + (False,)
        return self.literal(f)


def _columns(count: int) -> Tuple[int, List[int]]:
    """All-ones mask and one truth-table column per atom over 2**count rows"""
    rows = 1 << count
    full = (1 << rows) - 1
    columns = []
    for i in range(count):
        block = 1 << i
        repeat = full // ((1 << (2 * block)) - 1)
        columns.append(repeat * (((1 << block) - 1) << block))
    return full, columns


def _value(shape, columns: Sequence[int], full: int) -> int:
    tag = shape[0]
    if tag == "const":
        return full if shape[1] else 0
    if tag == "lit":
        column = columns[shape[1]]
        return column if shape[2] else full ^ column
    left = _value(shape[1], columns, full)
    right = _value(shape[2], columns, full)
    return left | right if tag == "or" else left & right


def taut_check(formula, max_atoms: int = DEFAULT_MAX_TAUT_ATOMS) -> bool:
    """Decide whether a formula is a propositional tautology

    Maximal non-propositional subformulas are opaque atoms; an atom and its
    syntactic complement are one atom with opposite signs.

    Raises:
        TooManyAtoms: more than `max_atoms` distinct opaque atoms
    """
    flc = isinstance(formula, FlcExpr)
    table = _AtomTable(flc)
    shape = table.encode(formula if flc else normal_form(formula))
    if len(table) > max_atoms:
        raise TooManyAtoms(f"{len(table)} opaque atoms exceed the limit of {max_atoms}")
    full, columns = _columns(len(table))
    return _value(shape, columns, full) == full


# Scripts

@dataclass(frozen=True)
class Justification:
    schema: SchemaId
    premises: Tuple[int, ...] = ()
    inst: Mapping[str, Any] = field(default_factory=dict)

    @property
    def is_rule(self) -> bool:
        return bool(self.premises) or signature(self.schema, self.inst).is_rule


@dataclass(frozen=True)
class ProofLine:
    number: int
    formula: Any
    justification: Justification


@dataclass
class ProofScript:
    """
    Hilbert proof with:
    - the calculus it is checked in
    - numbered lines, premises referring strictly backward
    """
    calculus: Calculus
    lines: List[ProofLine] = field(default_factory=list)
    name: str = ""

    def conclusion(self):
        return self.lines[-1].formula if self.lines else None


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    line: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    def describe(self) -> str:
        if self.accepted:
            return "accepted"
        return f"rejected at line {self.line}: {self.reason}"


class _Rejected(Exception):
    pass


class ProofChecker:
    """
    Line-by-line checker with:
    - admissible schemas and formula language fixed by the calculus
    - explicit instantiations for every axiom and rule line
    - comparison of lines up to normal form
    """

    def __init__(self, max_taut_atoms: int = DEFAULT_MAX_TAUT_ATOMS, gls_alpha: bool = False,
                 afrak_members: Collection[SchemaId] = DEFAULT_AFRAK_MEMBERS):
        self.max_taut_atoms = max_taut_atoms
        self.gls_alpha = gls_alpha
        self.afrak_members = tuple(afrak_members)
        self.logger = logging.getLogger(__name__)

    def check(self, script: ProofScript) -> Verdict:
        start = time.time()
        calculus = script.calculus
        admitted = calculus.schemas(self.gls_alpha)
        proved: Dict[int, Any] = {}
        previous = 0
        for line in script.lines:
            try:
                if line.number <= previous:
                    raise _Rejected(f"line number {line.number} does not increase")
                self._check_line(line, calculus, admitted, proved)
            except _Rejected as e:
                return self._reject(script, line.number, str(e))
            except WorkbenchError as e:
                return self._reject(script, line.number, f"{type(e).__name__}: {e}")
            proved[line.number] = line.formula
            previous = line.number
            self.logger.debug(f"line {line.number} {line.justification.schema.value} ok")
        elapsed = time.time() - start
        self.logger.info(f"Proof {script.name or '<script>'} accepted "
                         f"({len(script.lines)} lines, {elapsed:.3f}s)")
        return Verdict(True)

    def _reject(self, script: ProofScript, number: int, reason: str) -> Verdict:
        self.logger.info(f"Proof {script.name or '<script>'} rejected at line {number}: {reason}")
        return Verdict(False, number, reason)

    def _same(self, left, right, flc: bool) -> bool:
        if flc:
            return left == right
        return normal_form(left) == normal_form(right)

    def _check_line(self, line: ProofLine, calculus: Calculus,
                    admitted: FrozenSet[SchemaId], proved: Mapping[int, Any]):
        just = line.justification
        flc = calculus.flc
        if just.schema not in admitted:
            raise _Rejected(f"{just.schema.value} is not a schema of {calculus.value}")
        if not check_fragment(line.formula, calculus.fragment):
            raise _Rejected(f"formula is outside the {calculus.fragment.value} language")
        for ref in just.premises:
            if ref not in proved:
                raise _Rejected(f"premise {ref} does not refer to an earlier line")
        premises = [proved[ref] for ref in just.premises]

        if just.schema is SchemaId.TAUT:
            if just.inst and not self._same(just.inst["phi"], line.formula, flc):
                raise _Rejected("formula differs from the instantiated tautology")
            if not taut_check(line.formula, self.max_taut_atoms):
                raise _Rejected("formula is not a propositional tautology")
            return
        if just.schema is SchemaId.MP and not just.inst:
            self._check_modus_ponens(line.formula, premises, flc)
            return

        problem = check_side_condition(just.schema, just.inst, self.afrak_members)
        if problem:
            raise _Rejected(f"side condition of {just.schema.value} violated: {problem}")
        instance = instantiate_schema(just.schema, just.inst, flc)
        if isinstance(instance, RuleInstance):
            if len(premises) != len(instance.premises):
                raise _Rejected(f"{just.schema.value} needs {len(instance.premises)} premises, "
                                f"got {len(premises)}")
            for ref, have, want in zip(just.premises, premises, instance.premises):
                if not self._same(have, want, flc):
                    raise _Rejected(f"premise {ref} is not {to_text(want)}")
            instance = instance.conclusion
        elif premises:
            raise _Rejected(f"axiom {just.schema.value} takes no premises")
        if not self._same(line.formula, instance, flc):
            raise _Rejected(f"formula is not the instance {to_text(instance)}")

    def _check_modus_ponens(self, formula, premises: Sequence, flc: bool):
        if len(premises) != 2:
            raise _Rejected(f"MP needs 2 premises, got {len(premises)}")
        minor, major = premises
        for antecedent, implication in ((minor, major), (major, minor)):
            expected = FOr(flc_negate(antecedent), formula) if flc else implies(antecedent, formula)
            if self._same(implication, expected, flc):
                return
        raise _Rejected("premises do not form an implication to the formula")


def check_proof(script: ProofScript, max_taut_atoms: int = DEFAULT_MAX_TAUT_ATOMS,
                gls_alpha: bool = False,
                afrak_members: Collection[SchemaId] = DEFAULT_AFRAK_MEMBERS) -> Verdict:
    """Check every line of a script; the verdict names the first rejected line"""
    return ProofChecker(max_taut_atoms, gls_alpha, afrak_members).check(script)


class ProofBuilder:
    """Appends instantiated lines to a script and tracks their formulas"""

    def __init__(self, calculus: Calculus, name: str = ""):
        self.script = ProofScript(calculus, [], name)

    @property
    def flc(self) -> bool:
        return self.script.calculus.flc

    def formula(self, number: int):
        for line in self.script.lines:
            if line.number == number:
                return line.formula
        raise KeyError(number)

    def _append(self, formula, justification: Justification) -> int:
        number = len(self.script.lines) + 1
        self.script.lines.append(ProofLine(number, formula, justification))
        return number

    def axiom(self, schema_id: SchemaId, **inst) -> int:
        return self._append(instantiate_schema(schema_id, inst, self.flc),
                            Justification(schema_id, (), inst))

    def rule(self, schema_id: SchemaId, premises: Sequence[int], **inst) -> int:
        instance = instantiate_schema(schema_id, inst, self.flc)
        return self._append(instance.conclusion, Justification(schema_id, tuple(premises), inst))

    def taut(self, formula) -> int:
        return self._append(formula, Justification(SchemaId.TAUT))

    def mp(self, minor: int, major: int) -> int:
        implication = self.formula(major)
        if self.flc:
            if not isinstance(implication, FOr):
                raise ValueError(f"line {major} is not an implication")
            conclusion = implication.right
        else:
            if not (isinstance(implication, Or) and implication.left == Neg(self.formula(minor))):
                raise ValueError(f"line {major} is not an implication from line {minor}")
            conclusion = implication.right
        return self._append(conclusion, Justification(SchemaId.MP, (minor, major)))

    def chain(self, premises: Sequence[int], goal) -> int:
        """Derive `goal` from `premises` by one tautology and modus ponens steps"""
        statement = goal
        for number in reversed(premises):
            statement = implies(self.formula(number), statement)
        current = self.taut(statement)
        for number in premises:
            current = self.mp(number, current)
        return current


# Derived sabotage axioms as regression scripts

def _f(text: str):
    return parse_game_formula(text)


def _g(text: str, *variables: str):
    return parse_game(text, variables)


def _cancelation() -> ProofScript:
    proof = ProofBuilder(Calculus.GLS, "angel-cancelation")
    proof.axiom(SchemaId.S_ASAB, a="a", alpha=_g("x", "x"), x=("x",), beta=(None,), phi=_f("P"))
    return proof.script


def _angel_wins() -> ProofScript:
    proof = ProofBuilder(Calculus.GLS, "angel-wins")
    trap = proof.axiom(SchemaId.S_ASAB, a="a", alpha=_g("x", "x"), y=("x",), gamma=(None,),
                       phi=_f("false"))
    comp = proof.axiom(SchemaId.G_COMP, alpha=_g("~a"), beta=_g("a^d"), phi=_f("false"))
    test = proof.axiom(SchemaId.G_DTEST, phi=_f("false"), psi=_f("false"))
    proof.chain([trap, comp, test], _f("<~a;a^d>false"))
    return proof.script


def _trap_removal(name: str, last: str) -> ProofScript:
    proof = ProofBuilder(Calculus.GLS, name)
    removal = proof.axiom(SchemaId.S_SAB_REM, a="a", alpha=_g("x;y", "x", "y"), x=("x",),
                          eta=(_g("~a"),), y=("y",), delta=(_g(last),), phi=_f("P"))
    comp = proof.axiom(SchemaId.G_COMP, alpha=_g("?true"), beta=_g(last), phi=_f("P"))
    test = proof.axiom(SchemaId.G_TEST, phi=_f("true"), psi=_f(f"<{last}>P"))
    proof.chain([removal, comp, test], _f(f"<~a;{last}>P <-> <{last}>P"))
    return proof.script


def _lift_both(proof: ProofBuilder, under, left, right, facts: Sequence[int]) -> Tuple[int, int]:
    """From facts giving left <-> right, derive <under>left <-> <under>right in two lines"""
    forward = proof.chain(list(facts), implies(left, right))
    backward = proof.chain(list(facts), implies(right, left))
    return (proof.rule(SchemaId.G_MON, [forward], alpha=under, phi=left, psi=right),
            proof.rule(SchemaId.G_MON, [backward], alpha=under, phi=right, psi=left))


def _no_effect() -> ProofScript:
    proof = ProofBuilder(Calculus.GLS, "no-effect")
    trap = proof.axiom(SchemaId.S_ASAB, a="a", alpha=_g("?true"), phi=_f("P"))
    test = proof.axiom(SchemaId.G_TEST, phi=_f("true"), psi=_f("P"))
    lifted = _lift_both(proof, _g("~a"), _f("<?true>P"), _f("P"), [test])
    proof.chain([trap, test, *lifted], _f("<~a>P <-> P"))
    return proof.script


def _trap_distribute(conjunctive: bool) -> ProofScript:
    join, cap, choice_axiom = ("/\\", "∩", SchemaId.G_DCHOICE) if conjunctive \
        else ("\\/", "∪", SchemaId.G_CHOICE)
    proof = ProofBuilder(Calculus.GLS, "trap-and" if conjunctive else "trap-or")
    trap = proof.axiom(SchemaId.S_ASAB, a="a", alpha=_g(f"x {cap} y", "x", "y"), z=("x", "y"),
                       delta=(_g("?P"), _g("?Q")), phi=_f("true"))
    split = proof.axiom(choice_axiom, alpha=_g("~a;?P"), beta=_g("~a;?Q"), phi=_f("true"))
    comp_p = proof.axiom(SchemaId.G_COMP, alpha=_g("~a"), beta=_g("?P"), phi=_f("true"))
    comp_q = proof.axiom(SchemaId.G_COMP, alpha=_g("~a"), beta=_g("?Q"), phi=_f("true"))
    test_p = proof.axiom(SchemaId.G_TEST, phi=_f("P"), psi=_f("true"))
    test_q = proof.axiom(SchemaId.G_TEST, phi=_f("Q"), psi=_f("true"))
    inner = proof.axiom(choice_axiom, alpha=_g("?P"), beta=_g("?Q"), phi=_f("true"))
    lifted_p = _lift_both(proof, _g("~a"), _f("<?P>true"), _f("P"), [test_p])
    lifted_q = _lift_both(proof, _g("~a"), _f("<?Q>true"), _f("Q"), [test_q])
    lifted = _lift_both(proof, _g("~a"), _f(f"<?P {cap} ?Q>true"), _f(f"P {join} Q"),
                        [test_p, test_q, inner])
    proof.chain([trap, split, comp_p, comp_q, *lifted_p, *lifted_q, *lifted],
                _f(f"<~a>(P {join} Q) <-> <~a>P {join} <~a>Q"))
    return proof.script


def _pass() -> ProofScript:
    proof = ProofBuilder(Calculus.GLS, "pass")
    a, b = _g("~a"), _g("b")
    trap = proof.axiom(SchemaId.S_ASAB, a="a", alpha=_g("b;x", "x"), z=("x",),
                       delta=(_g("?P"),), phi=_f("true"))
    outer_left = proof.axiom(SchemaId.G_COMP, alpha=b, beta=a, phi=_f("P"))
    outer_right = proof.axiom(SchemaId.G_COMP, alpha=a, beta=b, phi=_f("P"))
    shifted = proof.axiom(SchemaId.G_COMP, alpha=b, beta=_g("~a;?P"), phi=_f("true"))
    comp_a = proof.axiom(SchemaId.G_COMP, alpha=a, beta=_g("?P"), phi=_f("true"))
    test = proof.axiom(SchemaId.G_TEST, phi=_f("P"), psi=_f("true"))
    comp_b = proof.axiom(SchemaId.G_COMP, alpha=b, beta=_g("?P"), phi=_f("true"))
    under_a = _lift_both(proof, a, _f("<?P>true"), _f("P"), [test])
    under_b = _lift_both(proof, b, _f("<?P>true"), _f("P"), [test])
    inner_a = _lift_both(proof, b, _f("<~a;?P>true"), _f("<~a>P"), [comp_a, *under_a])
    inner_b = _lift_both(proof, a, _f("<b;?P>true"), _f("<b>P"), [comp_b, *under_b])
    proof.chain([trap, outer_left, outer_right, shifted, *inner_a, *inner_b],
                _f("<b;~a>P <-> <~a;b>P"))
    return proof.script


def regression_scripts() -> Dict[str, ProofScript]:
    """Derivations of the derived sabotage axioms, keyed by script name"""
    scripts = [
        _angel_wins(),
        _cancelation(),
        _trap_distribute(False),
        _trap_distribute(True),
        _no_effect(),
        _pass(),
        _trap_removal("trap-idempotent", "~a"),
        _trap_removal("trap-cancellation", "~'a"),
    ]
    return {script.name: script for script in scripts}
