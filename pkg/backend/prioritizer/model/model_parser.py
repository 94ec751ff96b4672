"""
Reader and writer for the behavioural model formats.

Text form, one directive per line, ``#`` starts a comment::

    model activity ShippingOrder
    node 4 decision "Order complete?"
    edge 4 -> 5 on no
    edge 4 -> 6 on yes when "all fields filled"
    nested 9 ModifyOrder
    override 7 if 2 "reason"
    end

The structured form is a JSON document holding a ``models`` array (or a bare
array) of objects with ``kind``, ``name``, ``nodes``, ``edges``, ``nested`` and
``overrides``. Both forms parse to identical ``DiagramModel`` values.
"""

import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from backend.shared.errors import (
    DuplicateNodeError,
    ModelSyntaxError,
    UnknownNodeKindError,
)
from backend.shared.run_utils import LOGGER_NAME, PerformanceMonitor

from .model_models import (
    DiagramKind,
    DiagramModel,
    IfOverride,
    ModelBundle,
    ModelNode,
    ModelTransition,
    NodeKind,
)

logger = logging.getLogger(LOGGER_NAME)

_TOKEN_RE = re.compile(
    r'(?P<string>"(?:[^"\\]|\\.)*")'
    r"|(?P<arrow>->)"
    r"|(?P<comment>#.*)"
    r'|(?P<open>")'
    r'|(?P<word>[^\s"#]+)'
)

_MODEL_KINDS = {
    "activity": DiagramKind.ACTIVITY,
    "statechart": DiagramKind.STATE_CHART,
    "state-chart": DiagramKind.STATE_CHART,
}


class Token(NamedTuple):
    kind: str
    value: str
    column: int


def tokenize_line(line: str, line_no: int) -> List[Token]:
    tokens: List[Token] = []
    for match in _TOKEN_RE.finditer(line):
        group = match.lastgroup
        column = match.start() + 1
        if group == "comment":
            break
        if group == "open":
            raise ModelSyntaxError("unterminated string", line_no, column)
        value = match.group()
        if group == "string":
            value = _unquote(value)
        tokens.append(Token(group, value, column))
    return tokens


def _unquote(raw: str) -> str:
    return re.sub(r"\\(.)", r"\1", raw[1:-1])


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _word(text: str) -> str:
    if re.fullmatch(r"[^\s\"#]+", text) and text not in ("->", "on", "when"):
        return text
    return _quote(text)


def _node_kind(raw: str, line: int = 0, column: int = 0) -> NodeKind:
    try:
        return NodeKind(raw.lower())
    except ValueError:
        raise UnknownNodeKindError(raw, line, column)


class _ModelDraft:
    """Mutable accumulator for one model while its lines are read."""

    def __init__(self, kind: DiagramKind, name: str):
        self.kind = kind
        self.name = name
        self.nodes: List[ModelNode] = []
        self.node_ids: set = set()
        self.transitions: List[ModelTransition] = []
        self.sub_activities: Dict[str, str] = {}
        self.overrides: List[IfOverride] = []

    def add_node(self, node: ModelNode, line: int = 0) -> None:
        if node.id in self.node_ids:
            raise DuplicateNodeError(self.name, node.id, line)
        self.node_ids.add(node.id)
        self.nodes.append(node)

    def freeze(self) -> DiagramModel:
        return DiagramModel(
            kind=self.kind,
            name=self.name,
            nodes=self.nodes,
            transitions=self.transitions,
            sub_activities=self.sub_activities,
            overrides=self.overrides,
        )


def _expect(tokens: List[Token], index: int, line_no: int, what: str) -> Token:
    if index >= len(tokens):
        column = tokens[-1].column + len(tokens[-1].value) if tokens else 1
        raise ModelSyntaxError(f"expected {what}", line_no, column)
    token = tokens[index]
    if token.kind == "arrow":
        raise ModelSyntaxError(f"expected {what}, found '->'", line_no, token.column)
    return token


def _no_trailing(tokens: List[Token], index: int, line_no: int) -> None:
    if index < len(tokens):
        token = tokens[index]
        raise ModelSyntaxError(f"unexpected token '{token.value}'", line_no, token.column)


def _parse_edge(tokens: List[Token], line_no: int) -> ModelTransition:
    source = _expect(tokens, 1, line_no, "source node id").value
    if len(tokens) < 3 or tokens[2].kind != "arrow":
        column = tokens[2].column if len(tokens) > 2 else tokens[1].column + len(source)
        raise ModelSyntaxError("expected '->'", line_no, column)
    target = _expect(tokens, 3, line_no, "target node id").value
    label = ""
    guard = None
    index = 4
    while index < len(tokens):
        keyword = tokens[index]
        if keyword.kind == "word" and keyword.value == "on" and not label:
            label = _expect(tokens, index + 1, line_no, "edge label").value
            index += 2
        elif keyword.kind == "word" and keyword.value == "when" and guard is None:
            guard = _expect(tokens, index + 1, line_no, "guard text").value
            index += 2
        else:
            raise ModelSyntaxError(
                f"unexpected token '{keyword.value}'", line_no, keyword.column
            )
    return ModelTransition(source=source, target=target, label=label, guard=guard)


def _parse_text(text: str) -> ModelBundle:
    models: List[DiagramModel] = []
    seen_names: set = set()
    draft: Optional[_ModelDraft] = None
    draft_line = 0
    line_no = 0

    for line_no, line in enumerate(text.splitlines(), start=1):
        tokens = tokenize_line(line, line_no)
        if not tokens:
            continue
        head = tokens[0]
        directive = head.value

        if directive == "model":
            if draft is not None:
                raise ModelSyntaxError(
                    f"model '{draft.name}' opened on line {draft_line} is missing 'end'",
                    line_no,
                    head.column,
                )
            kind_token = _expect(tokens, 1, line_no, "model kind")
            kind = _MODEL_KINDS.get(kind_token.value.lower())
            if kind is None:
                raise ModelSyntaxError(
                    f"unknown model kind '{kind_token.value}'", line_no, kind_token.column
                )
            name_token = _expect(tokens, 2, line_no, "model name")
            _no_trailing(tokens, 3, line_no)
            if name_token.value in seen_names:
                raise ModelSyntaxError(
                    f"model '{name_token.value}' defined twice", line_no, name_token.column
                )
            seen_names.add(name_token.value)
            draft = _ModelDraft(kind, name_token.value)
            draft_line = line_no
            continue

        if draft is None:
            raise ModelSyntaxError(
                f"'{directive}' outside of a model block", line_no, head.column
            )

        if directive == "end":
            _no_trailing(tokens, 1, line_no)
            models.append(draft.freeze())
            draft = None
        elif directive == "node":
            node_id = _expect(tokens, 1, line_no, "node id").value
            kind_token = _expect(tokens, 2, line_no, "node kind")
            kind = _node_kind(kind_token.value, line_no, kind_token.column)
            label = ""
            if len(tokens) > 3:
                if tokens[3].kind != "string":
                    raise ModelSyntaxError(
                        "node label must be quoted", line_no, tokens[3].column
                    )
                label = tokens[3].value
            _no_trailing(tokens, 4, line_no)
            draft.add_node(ModelNode(id=node_id, kind=kind, label=label), line_no)
        elif directive == "edge":
            draft.transitions.append(_parse_edge(tokens, line_no))
        elif directive == "nested":
            host = _expect(tokens, 1, line_no, "host node id")
            sub = _expect(tokens, 2, line_no, "nested model name")
            _no_trailing(tokens, 3, line_no)
            if host.value in draft.sub_activities:
                raise ModelSyntaxError(
                    f"node '{host.value}' already nests a model", line_no, host.column
                )
            draft.sub_activities[host.value] = sub.value
        elif directive == "override":
            node = _expect(tokens, 1, line_no, "node id")
            keyword = _expect(tokens, 2, line_no, "'if'")
            if keyword.value != "if":
                raise ModelSyntaxError("expected 'if'", line_no, keyword.column)
            value_token = _expect(tokens, 3, line_no, "override value")
            if not value_token.value.isdigit():
                raise ModelSyntaxError(
                    f"override value must be a non-negative integer, got '{value_token.value}'",
                    line_no,
                    value_token.column,
                )
            reason = tokens[4].value if len(tokens) > 4 else ""
            _no_trailing(tokens, 5, line_no)
            draft.overrides.append(
                IfOverride(node=node.value, value=int(value_token.value), reason=reason)
            )
        else:
            raise ModelSyntaxError(f"unknown directive '{directive}'", line_no, head.column)

    if draft is not None:
        raise ModelSyntaxError(
            f"model '{draft.name}' opened on line {draft_line} is missing 'end'",
            line_no,
            1,
        )

    return ModelBundle(models=models)


class _JsonNode(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    kind: str
    label: str = ""

    @field_validator("id", mode="before")
    @classmethod
    def _coerce_id(cls, value: Any) -> Any:
        return str(value) if isinstance(value, (int, float)) else value


class _JsonEdge(BaseModel):
    model_config = ConfigDict(extra="forbid")

    source: str
    target: str
    label: str = ""
    guard: Optional[str] = None

    @field_validator("source", "target", mode="before")
    @classmethod
    def _coerce_ids(cls, value: Any) -> Any:
        return str(value) if isinstance(value, (int, float)) else value


class _JsonNested(BaseModel):
    model_config = ConfigDict(extra="forbid")

    node: str
    model: str

    @field_validator("node", mode="before")
    @classmethod
    def _coerce_node(cls, value: Any) -> Any:
        return str(value) if isinstance(value, (int, float)) else value


class _JsonModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: str
    name: str
    nodes: List[_JsonNode] = Field(default_factory=list)
    edges: List[_JsonEdge] = Field(default_factory=list)
    nested: List[_JsonNested] = Field(default_factory=list)
    overrides: List[IfOverride] = Field(default_factory=list)


def _parse_json(text: str) -> ModelBundle:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelSyntaxError(e.msg, e.lineno, e.colno)

    raw_models = document.get("models") if isinstance(document, dict) else document
    if not isinstance(raw_models, list):
        raise ModelSyntaxError("expected a 'models' array or a top-level array", 1, 1)

    models: List[DiagramModel] = []
    seen_names: set = set()
    for index, raw in enumerate(raw_models):
        try:
            entry = _JsonModel.model_validate(raw)
        except ValidationError as e:
            raise ModelSyntaxError(f"models[{index}]: {e.errors()[0]['msg']}")

        kind = _MODEL_KINDS.get(entry.kind.lower())
        if kind is None:
            raise ModelSyntaxError(f"models[{index}]: unknown model kind '{entry.kind}'")
        if entry.name in seen_names:
            raise ModelSyntaxError(f"model '{entry.name}' defined twice")
        seen_names.add(entry.name)

        draft = _ModelDraft(kind, entry.name)
        for node in entry.nodes:
            draft.add_node(
                ModelNode(id=node.id, kind=_node_kind(node.kind), label=node.label)
            )
        draft.transitions = [
            ModelTransition(source=e.source, target=e.target, label=e.label, guard=e.guard)
            for e in entry.edges
        ]
        for nested in entry.nested:
            if nested.node in draft.sub_activities:
                raise ModelSyntaxError(f"node '{nested.node}' already nests a model")
            draft.sub_activities[nested.node] = nested.model
        draft.overrides = list(entry.overrides)
        models.append(draft.freeze())

    return ModelBundle(models=models)


def parse_model(text: str, fmt: str = "text") -> ModelBundle:
    """
    Parse model-file contents into a bundle.

    Nested references are recorded but not resolved.

    Args:
        text: File contents
        fmt: "text" or "json"

    Raises:
        ModelSyntaxError, DuplicateNodeError, UnknownNodeKindError
    """
    if fmt == "json":
        return _parse_json(text)
    if fmt != "text":
        raise ValueError(f"Unsupported model format '{fmt}'")
    return _parse_text(text)


@PerformanceMonitor.monitor_operation("parse_model", log_parameters=False)
def load_bundle(path: Union[str, Path]) -> ModelBundle:
    """Read a model file, choosing the structured form for ``.json`` files."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    fmt = "json" if path.suffix.lower() == ".json" else "text"
    bundle = parse_model(text, fmt)
    logger.info(f"Loaded {len(bundle.models)} model(s) from {path.name}: {bundle.names}")
    return bundle


def serialize_model(bundle: ModelBundle) -> str:
    """Render a bundle in the text form."""
    lines: List[str] = []
    for index, model in enumerate(bundle.models):
        if index:
            lines.append("")
        lines.append(f"model {model.kind.value} {model.name}")
        for node in model.nodes:
            label = f" {_quote(node.label)}" if node.label else ""
            lines.append(f"node {node.id} {node.kind.value}{label}")
        for transition in model.transitions:
            line = f"edge {transition.source} -> {transition.target}"
            if transition.label:
                line += f" on {_word(transition.label)}"
            if transition.guard is not None:
                line += f" when {_quote(transition.guard)}"
            lines.append(line)
        for host, sub in model.sub_activities.items():
            lines.append(f"nested {host} {sub}")
        for override in model.overrides:
            reason = f" {_quote(override.reason)}" if override.reason else ""
            lines.append(f"override {override.node} if {override.value}{reason}")
        lines.append("end")
    return "\n".join(lines) + "\n"


def serialize_json(bundle: ModelBundle) -> str:
    """Render a bundle in the structured form."""
    models = []
    for model in bundle.models:
        models.append(
            {
                "kind": model.kind.value,
                "name": model.name,
                "nodes": [n.model_dump(mode="json") for n in model.nodes],
                "edges": [t.model_dump(mode="json") for t in model.transitions],
                "nested": [
                    {"node": host, "model": sub}
                    for host, sub in model.sub_activities.items()
                ],
                "overrides": [o.model_dump(mode="json") for o in model.overrides],
            }
        )
    return json.dumps({"models": models}, indent=2) + "\n"
