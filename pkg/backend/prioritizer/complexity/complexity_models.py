from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class PushRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int = Field(description="Position of the push in the traversal")
    depth: int = Field(description="k, the number of nodes below the pushed node")
    stack_size: int = Field(description="Stack height right after the push")
    contribution: int = Field(description="s_max - k")


class StackEvent(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: Literal["push", "pop"]
    node: str
    size: int = Field(description="Stack height after the event")


class StackTraceRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    s_max: int
    events: List[StackEvent] = Field(default_factory=list)

    @property
    def pushes(self) -> List[StackEvent]:
        return [e for e in self.events if e.op == "push"]


class NodeWeight(BaseModel):
    model_config = ConfigDict(frozen=True)

    node: str
    stack_weight: int = Field(ge=0, description="A: sum of push contributions")
    if_computed: int = Field(ge=0, description="FANIN x FANOUT of the graph")
    if_complexity: int = Field(ge=0, description="B: computed or pinned IF value")
    pinned: bool = Field(default=False, description="B comes from an override")
    pin_reason: str = ""
    nested_complexity: int = Field(default=0, ge=0)
    push_log: List[PushRecord] = Field(default_factory=list)

    @property
    def own_total(self) -> int:
        """A + B."""
        return self.stack_weight + self.if_complexity

    @property
    def total(self) -> int:
        """A + B plus the complexity of a nested sub-activity."""
        return self.own_total + self.nested_complexity

    @property
    def contributions(self) -> List[int]:
        return [p.contribution for p in self.push_log]


class WeightTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    graph_name: str
    s_max: int
    rows: List[NodeWeight] = Field(default_factory=list)
    nested: Dict[str, "WeightTable"] = Field(
        default_factory=dict, description="Host node id -> weight table of its sub-graph"
    )

    def row(self, node_id: str) -> NodeWeight:
        for row in self.rows:
            if row.node == node_id:
                return row
        raise KeyError(node_id)

    def total(self, node_id: str) -> int:
        return self.row(node_id).total

    @property
    def totals(self) -> Dict[str, int]:
        return {row.node: row.total for row in self.rows}

    @property
    def grand_total(self) -> int:
        return sum(row.total for row in self.rows)

    def as_records(self) -> List[Dict[str, object]]:
        """Rows shaped for CSV export."""
        return [
            {
                "node": row.node,
                "A": row.stack_weight,
                "B": row.if_complexity,
                "total": row.total,
                "push_contributions": ";".join(str(c) for c in row.contributions),
            }
            for row in self.rows
        ]

    def find_nested(self, node_id: str) -> Optional["WeightTable"]:
        return self.nested.get(node_id)


WeightTable.model_rebuild()
