from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from backend.shared.errors import LayoutMismatchError


class Chromosome(BaseModel):
    """Fixed-width bit string; most significant field = lowest decision id."""

    model_config = ConfigDict(frozen=True)

    bits: str = Field(pattern=r"^[01]*$")

    @classmethod
    def from_value(cls, value: int, width: int) -> "Chromosome":
        return cls(bits=format(value, f"0{width}b") if width else "")

    @property
    def value(self) -> int:
        return int(self.bits, 2) if self.bits else 0

    def flip(self, index: int) -> "Chromosome":
        flipped = "1" if self.bits[index] == "0" else "0"
        return Chromosome(bits=self.bits[:index] + flipped + self.bits[index + 1 :])

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return self.bits


class LayoutField(BaseModel):
    model_config = ConfigDict(frozen=True)

    node: str = Field(description="Decision node id")
    labels: List[str] = Field(description="Branch labels in declaration order")
    targets: List[str] = Field(description="Branch targets in declaration order")

    @property
    def outdegree(self) -> int:
        return len(self.labels)


class ChromosomeLayout(BaseModel):
    model_config = ConfigDict(frozen=True)

    graph_name: str
    field_width: int = Field(ge=1)
    fields: List[LayoutField] = Field(default_factory=list)

    @property
    def total_bits(self) -> int:
        return self.field_width * len(self.fields)

    @property
    def nodes(self) -> List[str]:
        return [f.node for f in self.fields]

    def check(self, chromosome: Chromosome) -> None:
        if len(chromosome) != self.total_bits:
            raise LayoutMismatchError(
                f"chromosome '{chromosome.bits}' has {len(chromosome)} bits, "
                f"layout of '{self.graph_name}' needs {self.total_bits}"
            )

    def index(self, node: str) -> int:
        for position, field in enumerate(self.fields):
            if field.node == node:
                return position
        raise KeyError(node)

    def codes_for(self, node: str, branch: int) -> List[int]:
        """Every field code that selects ``branch`` at ``node``, aliases included."""
        outdegree = self.fields[self.index(node)].outdegree
        return [code for code in range(2**self.field_width) if code % outdegree == branch]

    def with_code(self, chromosome: Chromosome, node: str, code: int) -> Chromosome:
        """Copy of ``chromosome`` with the field of ``node`` set to ``code``."""
        self.check(chromosome)
        start = self.index(node) * self.field_width
        field = format(code, f"0{self.field_width}b")
        return Chromosome(
            bits=chromosome.bits[:start] + field + chromosome.bits[start + self.field_width :]
        )

    def field_values(self, chromosome: Chromosome) -> List[int]:
        self.check(chromosome)
        width = self.field_width
        return [
            int(chromosome.bits[i * width : (i + 1) * width], 2)
            for i in range(len(self.fields))
        ]

    def is_aliased(self, chromosome: Chromosome) -> bool:
        """True when some field holds a code beyond its node's branch count."""
        return any(
            value >= field.outdegree
            for value, field in zip(self.field_values(chromosome), self.fields)
        )

    def declared_labels(self, chromosome: Chromosome) -> List[str]:
        """Branch label selected at every decision node, reached or not."""
        return [
            field.labels[value % field.outdegree]
            for value, field in zip(self.field_values(chromosome), self.fields)
        ]

    def describe(self) -> List[str]:
        lines = []
        for field in self.fields:
            codes = ", ".join(
                f"{format(i, f'0{self.field_width}b')}->{label or field.targets[i]}"
                for i, label in enumerate(field.labels)
            )
            lines.append(f"node {field.node}: {codes}")
        return lines


class DecisionChoice(BaseModel):
    model_config = ConfigDict(frozen=True)

    node: str
    code: int
    branch: int
    label: str
    target: str


class ScenarioPath(BaseModel):
    model_config = ConfigDict(frozen=True)

    chromosome: str
    nodes: List[str] = Field(description="Visited node ids, each at most once")
    choices: List[DecisionChoice] = Field(default_factory=list)
    complete: bool = Field(description="The walk reached a final node")
    aliased: bool = False
    fitness: Optional[int] = None

    @property
    def edge_labels(self) -> List[str]:
        return [choice.label for choice in self.choices]

    @property
    def branches(self) -> Tuple[Tuple[str, int], ...]:
        """(decision, branch) in walk order; equal for chromosomes that agree where it matters."""
        return tuple((choice.node, choice.branch) for choice in self.choices)

    @property
    def key(self) -> str:
        """Identity of the path as a scenario (node sequence)."""
        return "-".join(self.nodes)
