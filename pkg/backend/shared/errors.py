"""
Exception hierarchy for the scenario prioritizer.

Every error is a ValueError so callers that only care about "bad input"
can keep catching ValueError. Each class carries the process exit code the
CLI maps it to.
"""

from typing import List, Optional


class PrioritizerError(ValueError):
    """Base class for all prioritizer failures."""

    exit_code = 2
    category = "model_error"


class ConfigurationError(PrioritizerError):
    category = "configuration"


class ModelSyntaxError(PrioritizerError):
    """Raised when a model file cannot be tokenized or parsed."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        location = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{location}{message}")


class DuplicateNodeError(PrioritizerError):
    def __init__(self, model_name: str, node_id: str, line: int = 0):
        self.model_name = model_name
        self.node_id = node_id
        self.line = line
        where = f" (line {line})" if line else ""
        super().__init__(
            f"Duplicate node id '{node_id}' in model '{model_name}'{where}"
        )


class UnknownNodeKindError(PrioritizerError):
    def __init__(self, kind: str, line: int = 0, column: int = 0):
        self.kind = kind
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}unknown node kind '{kind}'")


class UnknownModelError(PrioritizerError):
    def __init__(self, name: str, available: Optional[List[str]] = None):
        self.name = name
        hint = f"; available: {', '.join(available)}" if available else ""
        super().__init__(f"Model '{name}' not found in bundle{hint}")


class ModelValidationError(PrioritizerError):
    """Raised by the pipeline when validation produced Error findings."""

    def __init__(self, model_name: str, findings: list):
        self.model_name = model_name
        self.findings = findings
        super().__init__(
            f"Model '{model_name}' failed validation with "
            f"{len(findings)} error finding(s)"
        )


class CyclicNestingError(PrioritizerError):
    def __init__(self, chain: List[str]):
        self.chain = chain
        super().__init__(f"Cyclic sub-activity nesting: {' -> '.join(chain)}")


class GraphBuildError(PrioritizerError):
    category = "graph_error"


class UnknownNodeError(PrioritizerError):
    category = "graph_error"

    def __init__(self, node_id: str, graph_name: str = ""):
        self.node_id = node_id
        suffix = f" in graph '{graph_name}'" if graph_name else ""
        super().__init__(f"Unknown node id '{node_id}'{suffix}")


class DegenerateLayoutError(PrioritizerError):
    """The graph has no decision node, so there is only one scenario."""

    exit_code = 3
    category = "degenerate"


class LayoutMismatchError(PrioritizerError):
    exit_code = 4
    category = "integrity"


class IntegrityError(LayoutMismatchError):
    pass


class SearchSpaceTooLargeError(PrioritizerError):
    exit_code = 5
    category = "oracle_bound"

    def __init__(self, total_bits: int, max_bits: int):
        self.total_bits = total_bits
        self.max_bits = max_bits
        super().__init__(
            f"Chromosome space of {total_bits} bits exceeds the enumeration "
            f"bound of {max_bits} bits"
        )
