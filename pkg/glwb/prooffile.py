"""
Proof file format

    # comment
    calculus GLs
    name angel-cancelation
    1. <~a><a>P <-> <~a>P BY axiom:SAsab {a=a, alpha=x, x=[x], beta=[_], phi=P}
    2. ... BY rule:MP from 1,3
    3. ... BY rule:GMon from 2 {alpha=~a, phi=P, psi=Q}

Instantiation values are split at commas outside brackets and braces.
Vectors are written [..] with `_` for an omitted entry; AFrak's s_b map is
written {b=s_b, ...}.
"""

import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from .exceptions import GrammarError, ProofFormatError
from .grammar import parse_flc, parse_game, parse_game_formula
from .kernel import Calculus, Justification, ProofLine, ProofScript
from .printer import to_text
from .schemas import MetaKind, SchemaId, signature
from .terms import IDENTIFIER, FixKind


logger = logging.getLogger(__name__)

_LINE = re.compile(r"(\d+)\.\s+(.*)")
_JUSTIFICATION = re.compile(
    r"(axiom|rule):(\S+?)(?:\s+from\s+(\d+(?:\s*,\s*\d+)*))?\s*(\{.*\})?\s*$"
)
_OPEN = "([{"
_CLOSE = ")]}"


def split_top_level(text: str, separator: str = ",") -> List[str]:
    """Split at `separator` outside (), [] and {}"""
    parts = []
    depth = 0
    current = []
    for char in text:
        if char in _OPEN:
            depth += 1
        elif char in _CLOSE:
            depth -= 1
        if char == separator and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(char)
    tail = "".join(current).strip()
    if tail or parts:
        parts.append(tail)
    return parts


def _unwrap(text: str, brackets: str) -> str:
    text = text.strip()
    if not (text.startswith(brackets[0]) and text.endswith(brackets[1])):
        raise ValueError(f"expected {brackets[0]}...{brackets[1]}, got {text!r}")
    return text[1:-1]


def _name(text: str) -> str:
    text = text.strip()
    if not IDENTIFIER.fullmatch(text):
        raise ValueError(f"{text!r} is not an identifier")
    return text


def _pairs(text: str) -> Dict[str, str]:
    result = {}
    for item in split_top_level(text):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {item!r}")
        key = key.strip()
        if key in result:
            raise ValueError(f"{key} given twice")
        result[key] = value.strip()
    return result


class _ValueReader:
    """Converts instantiation text by metavariable kind"""

    def __init__(self, calculus: Calculus, variables: Sequence[str]):
        self.calculus = calculus
        self.variables = tuple(variables)

    def read(self, kind: MetaKind, text: str) -> Any:
        if kind is MetaKind.FORMULA:
            if self.calculus.flc:
                return parse_flc(text, self.variables)
            return parse_game_formula(text, self.variables)
        if kind is MetaKind.GAME:
            return parse_game(text, self.variables)
        if kind in (MetaKind.ATOM, MetaKind.VARIABLE):
            return _name(text)
        if kind is MetaKind.FIXKIND:
            return FixKind(text.strip().lower())
        if kind is MetaKind.INDEX:
            return int(text)
        if kind is MetaKind.GAMES:
            return tuple(None if entry == "_" else parse_game(entry, self.variables)
                         for entry in split_top_level(_unwrap(text, "[]")))
        if kind in (MetaKind.ATOMS, MetaKind.VARIABLES):
            return tuple(_name(entry) for entry in split_top_level(_unwrap(text, "[]")))
        if kind is MetaKind.SCHEMA:
            return SchemaId.parse(text.strip())
        if kind is MetaKind.ATOMSET:
            return frozenset(_name(entry) for entry in split_top_level(_unwrap(text, "[]")))
        if kind is MetaKind.MAPPING:
            return {_name(k): _name(v) for k, v in _pairs(_unwrap(text, "{}")).items()}
        raise ValueError(f"unsupported metavariable kind {kind}")


def parse_instantiation(schema_id: SchemaId, text: str, calculus: Calculus) -> Dict[str, Any]:
    """Read `{key=value, ...}` for a schema; variables are read before games"""
    raw = _pairs(_unwrap(text, "{}")) if text.strip() else {}
    if schema_id is SchemaId.AFRAK and "base" in raw:
        sig = signature(schema_id, {"base": SchemaId.parse(raw["base"])})
    else:
        sig = signature(schema_id, {})
    kinds = dict(sig.metavariables)
    unknown = set(raw) - set(kinds)
    if unknown:
        raise ValueError(f"{schema_id.value} has no metavariable {', '.join(sorted(unknown))}")
    variables: List[str] = []
    for key, value in raw.items():
        if kinds[key] is MetaKind.VARIABLE:
            variables.append(_name(value))
        elif kinds[key] is MetaKind.VARIABLES:
            variables.extend(_name(v) for v in split_top_level(_unwrap(value, "[]")))
    reader = _ValueReader(calculus, variables)
    return {key: reader.read(kinds[key], value) for key, value in raw.items()}


def _parse_line(match, calculus: Calculus, lineno: int, raw: str) -> ProofLine:
    number = int(match.group(1))
    formula_text, sep, justification_text = match.group(2).rpartition(" BY ")
    if not sep:
        raise ProofFormatError("missing ' BY ' justification", lineno, None, raw)
    found = _JUSTIFICATION.match(justification_text.strip())
    if not found:
        raise ProofFormatError(f"bad justification {justification_text.strip()!r}",
                               lineno, None, raw)
    kind, name, refs, inst_text = found.groups()
    try:
        schema_id = SchemaId.parse(name)
        formula = (parse_flc(formula_text) if calculus.flc
                   else parse_game_formula(formula_text))
        premises = tuple(int(r) for r in refs.split(",")) if refs else ()
        inst = parse_instantiation(schema_id, inst_text or "", calculus)
    except GrammarError as e:
        raise ProofFormatError(str(e), lineno, e.column, raw) from e
    except ValueError as e:
        raise ProofFormatError(str(e), lineno, None, raw) from e
    if kind == "axiom" and premises:
        raise ProofFormatError("axioms take no premises", lineno, None, raw)
    return ProofLine(number, formula, Justification(schema_id, premises, inst))


def parse_proof(text: str) -> ProofScript:
    """Parse a proof file

    Raises:
        ProofFormatError: malformed header or line, with its line number
    """
    calculus: Optional[Calculus] = None
    name = ""
    lines: List[ProofLine] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("calculus "):
            if calculus is not None:
                raise ProofFormatError("calculus declared twice", lineno, 1, raw)
            try:
                calculus = Calculus.parse(line.split(None, 1)[1])
            except ValueError as e:
                raise ProofFormatError(str(e), lineno, 1, raw) from e
            continue
        if line.startswith("name "):
            name = line.split(None, 1)[1].strip()
            continue
        match = _LINE.fullmatch(line)
        if not match:
            raise ProofFormatError("expected 'k. <formula> BY ...'", lineno, 1, raw)
        if calculus is None:
            raise ProofFormatError("'calculus NAME' must come first", lineno, 1, raw)
        lines.append(_parse_line(match, calculus, lineno, raw))
    if calculus is None:
        raise ProofFormatError("missing 'calculus NAME' header")
    return ProofScript(calculus, lines, name)


def _value_text(kind: MetaKind, value: Any) -> str:
    if kind in (MetaKind.FORMULA, MetaKind.GAME):
        return to_text(value)
    if kind is MetaKind.FIXKIND:
        return value.value
    if kind is MetaKind.SCHEMA:
        return value.value
    if kind is MetaKind.GAMES:
        return "[" + ", ".join("_" if v is None else to_text(v) for v in value) + "]"
    if kind in (MetaKind.ATOMS, MetaKind.VARIABLES):
        return "[" + ", ".join(value) + "]"
    if kind is MetaKind.ATOMSET:
        return "[" + ", ".join(sorted(value)) + "]"
    if kind is MetaKind.MAPPING:
        return "{" + ", ".join(f"{k}={v}" for k, v in sorted(value.items())) + "}"
    return str(value)


def dump_instantiation(schema_id: SchemaId, inst: Mapping[str, Any]) -> str:
    if not inst:
        return ""
    sig = signature(schema_id, inst)
    items = [f"{key}={_value_text(kind, inst[key])}"
             for key, kind in sig.metavariables if inst.get(key) is not None]
    return "{" + ", ".join(items) + "}"


def dump_proof(script: ProofScript) -> str:
    """Text form accepted by parse_proof"""
    out = [f"calculus {script.calculus.value}"]
    if script.name:
        out.append(f"name {script.name}")
    for line in script.lines:
        just = line.justification
        kind = "rule" if just.is_rule else "axiom"
        text = f"{line.number}. {to_text(line.formula)} BY {kind}:{just.schema.value}"
        if just.premises:
            text += " from " + ",".join(str(p) for p in just.premises)
        inst = dump_instantiation(just.schema, just.inst)
        if inst:
            text += " " + inst
        out.append(text)
    return "\n".join(out) + "\n"


def load_proof(path: Union[str, Path]) -> ProofScript:
    script = parse_proof(Path(path).read_text(encoding="utf-8"))
    if not script.name:
        script.name = Path(path).stem
    logger.debug(f"Loaded proof {script.name} with {len(script.lines)} lines from {path}")
    return script


def save_proof(script: ProofScript, path: Union[str, Path]):
    Path(path).write_text(dump_proof(script), encoding="utf-8")
