import re
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class DiagramKind(str, Enum):
    ACTIVITY = "activity"
    STATE_CHART = "statechart"


class NodeKind(str, Enum):
    INITIAL = "initial"
    ACTION = "action"
    DECISION = "decision"
    MERGE = "merge"
    FORK = "fork"
    JOIN = "join"
    STATE = "state"
    FINAL = "final"


ACTIVITY_ONLY_KINDS = {NodeKind.ACTION, NodeKind.FORK, NodeKind.JOIN}
STATE_CHART_ONLY_KINDS = {NodeKind.STATE}


def natural_key(node_id: str) -> Tuple:
    """Sort key ordering dotted numeric ids naturally: 9 < 9.2 < 9.10 < 10."""
    segments = []
    for segment in node_id.split("."):
        runs = []
        for run in re.findall(r"\d+|\D+", segment):
            runs.append((0, int(run), "") if run.isdigit() else (1, 0, run))
        segments.append(tuple(runs))
    return tuple(segments)


class ModelNode(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str = Field(description="Node identifier, unique within its model")
    kind: NodeKind = Field(description="Construct kind of the node")
    label: str = Field(default="", description="Free text shown on the diagram")


class ModelTransition(BaseModel):
    model_config = ConfigDict(frozen=True)

    source: str = Field(description="Id of the node the transition leaves")
    target: str = Field(description="Id of the node the transition enters")
    label: str = Field(
        default="", description="Guard outcome such as 'yes'/'no' or an event name"
    )
    guard: Optional[str] = Field(
        default=None, description="Opaque guard condition text, never evaluated"
    )


class IfOverride(BaseModel):
    """Pins the information-flow value of one node to a fixed reference value."""

    model_config = ConfigDict(frozen=True)

    node: str = Field(description="Id of the pinned node")
    value: int = Field(ge=0, description="IF value used in the weight table")
    reason: str = Field(default="", description="Why the computed value is not used")


class DiagramModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: DiagramKind = Field(description="Activity diagram or state chart")
    name: str = Field(description="Model name, unique within its bundle")
    nodes: List[ModelNode] = Field(default_factory=list)
    transitions: List[ModelTransition] = Field(default_factory=list)
    sub_activities: Dict[str, str] = Field(
        default_factory=dict,
        description="Activity node id -> name of the nested model",
    )
    overrides: List[IfOverride] = Field(default_factory=list)
    resolved: Dict[str, "DiagramModel"] = Field(
        default_factory=dict,
        description="Activity node id -> resolved nested model (set by resolve_nested)",
    )

    def node(self, node_id: str) -> Optional[ModelNode]:
        for candidate in self.nodes:
            if candidate.id == node_id:
                return candidate
        return None

    @property
    def node_ids(self) -> List[str]:
        return [n.id for n in self.nodes]

    def outgoing(self, node_id: str) -> List[ModelTransition]:
        return [t for t in self.transitions if t.source == node_id]


DiagramModel.model_rebuild()


class ModelBundle(BaseModel):
    """All models read from one input file."""

    model_config = ConfigDict(frozen=True)

    models: List[DiagramModel] = Field(default_factory=list)

    @property
    def names(self) -> List[str]:
        return [m.name for m in self.models]

    def find(self, name: str) -> Optional[DiagramModel]:
        for model in self.models:
            if model.name == name:
                return model
        return None


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class Finding(BaseModel):
    model_config = ConfigDict(frozen=True)

    severity: Severity
    location: str = Field(description="Model name plus node or transition reference")
    message: str

    def __str__(self) -> str:
        return f"[{self.severity.value}] {self.location}: {self.message}"


class ValidationReport(BaseModel):
    model_name: str
    findings: List[Finding] = Field(default_factory=list)

    @property
    def errors(self) -> List[Finding]:
        return [f for f in self.findings if f.severity == Severity.ERROR]

    @property
    def ok(self) -> bool:
        return not self.errors
