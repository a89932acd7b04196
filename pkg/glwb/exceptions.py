"""
Custom exceptions for the game logic workbench
"""

from typing import Optional


class WorkbenchError(Exception):
    """Base exception for workbench errors"""
    pass


class GrammarError(WorkbenchError):
    """Raised when concrete syntax cannot be parsed"""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None, text: str = ""):
        self.line = line
        self.column = column
        self.text = text
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class KindClash(GrammarError):
    """Raised when one identifier is used with two different kinds"""
    pass


class NormalFormViolation(WorkbenchError):
    """Raised when a bound variable sits under an odd number of duals"""
    pass


class UnsupportedNegation(WorkbenchError):
    """Raised when syntactic negation meets chop or id"""
    pass


class CaptureError(WorkbenchError):
    """Raised when a substitution would capture a free variable"""

    def __init__(self, binder: str, captured: str):
        self.binder = binder
        self.captured = captured
        super().__init__(f"binder {binder} captures free variable {captured}")


class CapExceeded(WorkbenchError):
    """Raised when a structure exceeds the configured state cap"""
    pass


class WidthMismatch(WorkbenchError):
    """Raised when effectivities over different state counts are combined"""
    pass


class NonMonotoneDetected(WorkbenchError):
    """Raised when a fixpoint iteration leaves its ascending or descending chain"""
    pass


class UnboundVariable(WorkbenchError):
    """Raised when evaluation meets a variable missing from the valuation"""
    pass


class AlphabetTooSmall(WorkbenchError):
    """Raised when the context alphabet misses a sabotaged atom"""
    pass


class UnsupportedConstruct(WorkbenchError):
    """Raised when an evaluator or translation meets a constructor outside its logic"""
    pass


class BudgetExceeded(WorkbenchError):
    """Raised when a translation would enumerate more contexts than allowed"""
    pass


class ReservedNameClash(WorkbenchError):
    """Raised when an input already uses a translation-reserved name"""
    pass


class NotRightLinear(WorkbenchError):
    """Raised when a right-linear input is required"""
    pass


class NotSeparable(WorkbenchError):
    """Raised when a separable input is required"""
    pass


class IncompleteInstantiation(WorkbenchError):
    """Raised when a schema instantiation misses a metavariable"""
    pass


class SideConditionViolation(WorkbenchError):
    """Raised when a schema instantiation violates a side condition"""
    pass


class TooManyAtoms(WorkbenchError):
    """Raised when a tautology check would need too many opaque atoms"""
    pass


class PartitionViolation(WorkbenchError):
    """Raised when atomic game partitions overlap or the s_b map is not injective"""
    pass


class ProofFormatError(GrammarError):
    """Raised when a proof file is malformed"""
    pass


class StructureFormatError(GrammarError):
    """Raised when a structure file is malformed"""
    pass


class GraphFormatError(GrammarError):
    """Raised when a graph file is malformed"""
    pass


class ConfigurationError(WorkbenchError):
    """Raised when configuration is invalid"""
    pass


class CampaignError(WorkbenchError):
    """Raised when a campaign cannot be run"""
    pass
