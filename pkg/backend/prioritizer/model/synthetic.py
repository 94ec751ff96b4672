"""
Random activity models for property tests and size-limit checks.
"""

import numpy as np

from .model_models import DiagramKind, DiagramModel, ModelNode, ModelTransition, NodeKind


def synthetic_model(
    n_decisions: int,
    seed: int = 0,
    max_branches: int = 2,
    back_edge_prob: float = 0.0,
    name: str = "Synthetic",
) -> DiagramModel:
    """
    Build a valid activity model with ``n_decisions`` decision diamonds.

    Each diamond ``d<i>`` opens 2..max_branches branches that meet again at
    merge ``m<i>``. Branch 0 goes straight to the merge; the others run through
    an action. With probability ``back_edge_prob`` the last branch of a diamond
    jumps back to an earlier merge instead, which exercises the loop-once rule.
    """
    rng = np.random.default_rng(seed)
    nodes = [ModelNode(id="s", kind=NodeKind.INITIAL, label="start")]
    transitions = []
    previous = "s"

    for i in range(n_decisions):
        decision, merge = f"d{i}", f"m{i}"
        nodes.append(ModelNode(id=decision, kind=NodeKind.DECISION))
        transitions.append(ModelTransition(source=previous, target=decision))

        branches = int(rng.integers(2, max_branches + 1)) if max_branches > 2 else 2
        loop_back = i >= 2 and rng.random() < back_edge_prob
        for j in range(branches):
            label = f"b{j}"
            if j == 0:
                transitions.append(ModelTransition(source=decision, target=merge, label=label))
                continue
            if loop_back and j == branches - 1:
                earlier = f"m{int(rng.integers(0, i - 1))}"
                transitions.append(ModelTransition(source=decision, target=earlier, label=label))
                continue
            action = f"a{i}_{j}"
            nodes.append(ModelNode(id=action, kind=NodeKind.ACTION))
            transitions.append(ModelTransition(source=decision, target=action, label=label))
            transitions.append(ModelTransition(source=action, target=merge))

        nodes.append(ModelNode(id=merge, kind=NodeKind.MERGE))
        previous = merge

    nodes.append(ModelNode(id="e", kind=NodeKind.FINAL, label="end"))
    transitions.append(ModelTransition(source=previous, target="e"))

    return DiagramModel(
        kind=DiagramKind.ACTIVITY, name=name, nodes=nodes, transitions=transitions
    )
