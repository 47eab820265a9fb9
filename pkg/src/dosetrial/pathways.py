"""Dose transition pathways: exhaustive enumeration of future cohort outcomes
and the dose decision each one would trigger.

Every node holds a full model fit on the trial history up to that point, so a
pathway table answers "which doses could possibly be recommended next" before
the outcomes are known.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from itertools import combinations_with_replacement
from math import comb
from typing import Callable, Sequence

import numpy as np
import pandas as pd
from sklearn.base import clone

from .crm import CrmModel
from .efftox import EffToxModel
from .mcmc import SamplerConfig
from .outcomes import Alphabet, OutcomeSequence, empty_sequence, parse_outcomes

# Letter order fixes enumeration and table row order: no-toxicity first for
# the binary alphabet, alphabetical B < E < N < T for the quaternary one.
_CANONICAL_LETTERS = {Alphabet.BINARY: "NT", Alphabet.QUATERNARY: "BENT"}

DOSE_COLORS = {1: "slategrey", 2: "skyblue1", 3: "royalblue1", 4: "orchid4", 5: "royalblue4"}
STOP_COLOR = "red"
FALLBACK_COLOR = "gray70"


class NodeBudgetError(ValueError):
    """Raised when a pathway expansion would exceed the allowed fit count."""

    def __init__(self, node_count: int, budget: int):
        self.node_count = node_count
        self.budget = budget
        super().__init__(
            f"pathway tree needs {node_count} model fits, exceeding the budget of {budget}"
        )


@dataclass
class PathwayNode:
    node_id: int
    parent_id: int | None
    depth: int
    cohort_outcomes: str            # "" at the root
    dose_given: int | None          # dose at which cohort_outcomes were observed
    next_dose: int | None           # None means Stop
    fit_summary: dict
    fit: object = None


@dataclass
class PathwayTree:
    nodes: list[PathwayNode]
    cohort_sizes: tuple[int, ...]
    design: str                     # "crm" or "efftox"

    def node(self, node_id: int) -> PathwayNode:
        return self.nodes[node_id - 1]

    def children(self, node_id: int) -> list[PathwayNode]:
        return [n for n in self.nodes if n.parent_id == node_id]

    def leaves(self) -> list[PathwayNode]:
        parents = {n.parent_id for n in self.nodes if n.parent_id is not None}
        return [n for n in self.nodes if n.node_id not in parents]

    def to_long(self, include_summaries: bool = False) -> pd.DataFrame:
        rows = []
        for n in self.nodes:
            row = {
                "node": n.node_id,
                "parent": n.parent_id,
                "depth": n.depth,
                "outcomes": n.cohort_outcomes,
                "next_dose": n.next_dose,
            }
            if include_summaries:
                row["fit_summary"] = n.fit_summary
            rows.append(row)
        return pd.DataFrame(rows)


def enumerate_cohort_outcomes(cohort_size: int, alphabet: Alphabet) -> list[str]:
    """All outcome multisets for one cohort, in canonical order."""
    if cohort_size < 1:
        raise ValueError("cohort_size must be >= 1")
    letters = _CANONICAL_LETTERS[alphabet]
    return ["".join(c) for c in combinations_with_replacement(letters, cohort_size)]


def count_pathway_nodes(cohort_sizes: Sequence[int], alphabet: Alphabet) -> int:
    """Fit count for a full (stop-free) pathway tree, root included."""
    m = len(_CANONICAL_LETTERS[alphabet])
    total, layer = 1, 1
    for n in cohort_sizes:
        layer *= comb(n + m - 1, n)
        total += layer
    return total


def default_policy(fit) -> int | None:
    """The model's own recommendation (may be Stop for efficacy-toxicity fits)."""
    return fit.recommended_dose_


def careful_escalation(
    fit,
    tox_threshold: float,
    certainty_threshold: float,
    reference_dose: int = 1,
) -> int | None:
    """Recommendation that never skips untried doses in escalation, and stops
    once the reference dose is too likely to be over-toxic.

    Returns None (Stop) when
    Pr(prob_tox(reference_dose) > tox_threshold | data) > certainty_threshold;
    otherwise the model recommendation capped at one above the highest dose
    given so far. An empty trial starts at dose 1.
    """
    if not 1 <= reference_dose <= fit.prob_tox_draws_.shape[1]:
        raise ValueError(f"reference_dose {reference_dose} outside the dose grid")
    p_toxic = float((fit.prob_tox_draws_[:, reference_dose - 1] > tox_threshold).mean())
    if p_toxic > certainty_threshold:
        return None
    max_given = fit.data_.max_dose_given()
    if max_given is None:
        return 1
    return min(fit.recommended_dose_, max_given + 1)


def make_careful_policy(
    tox_threshold: float, certainty_threshold: float, reference_dose: int = 1
) -> Callable:
    def policy(fit):
        return careful_escalation(fit, tox_threshold, certainty_threshold, reference_dose)

    return policy


def compute_dtps(
    model,
    cohort_sizes: Sequence[int],
    previous_outcomes: str | OutcomeSequence = "",
    policy: Callable | None = None,
    next_dose: int | None = None,
    sampler: SamplerConfig | None = None,
    node_budget: int | None = None,
) -> PathwayTree:
    """Expand the pathway tree for the next cohorts of a dose-finding trial.

    ``model`` is an unfitted CrmModel or EffToxModel; each node refits it to
    the history concatenated with that node's hypothetical outcomes, using a
    deterministic per-node seed derived from the base seed and the outcome
    path. ``next_dose`` overrides the root decision (the dose already chosen
    for the next cohort); the policy decides everywhere else.
    """
    if isinstance(model, CrmModel):
        design, alphabet = "crm", Alphabet.BINARY
    elif isinstance(model, EffToxModel):
        design, alphabet = "efftox", Alphabet.QUATERNARY
    else:
        raise TypeError("model must be a CrmModel or EffToxModel")
    if not cohort_sizes:
        raise ValueError("cohort_sizes must be non-empty")
    cohort_sizes = tuple(int(c) for c in cohort_sizes)
    policy = policy or default_policy
    sampler = sampler or SamplerConfig()

    if node_budget is not None:
        n_nodes = count_pathway_nodes(cohort_sizes, alphabet)
        if n_nodes > node_budget:
            raise NodeBudgetError(n_nodes, node_budget)

    if isinstance(previous_outcomes, str):
        history = parse_outcomes(previous_outcomes, alphabet)
    else:
        history = previous_outcomes

    def fit_node(seq: OutcomeSequence, path: tuple[str, ...]):
        node_sampler = replace(sampler, seed=_node_seed(sampler.seed, path))
        fitted = clone(model)
        try:
            fitted.fit(seq, sampler=node_sampler)
        except Exception as exc:
            raise RuntimeError(f"model fit failed on pathway {'|'.join(path) or '<root>'}") from exc
        return fitted

    root_fit = fit_node(history, ())
    root_next = next_dose if next_dose is not None else policy(root_fit)
    nodes = [
        PathwayNode(
            node_id=1, parent_id=None, depth=0, cohort_outcomes="",
            dose_given=None, next_dose=root_next,
            fit_summary=root_fit.fit_summary(), fit=root_fit,
        )
    ]
    frontier = [(nodes[0], history, ())]

    for depth, size in enumerate(cohort_sizes, start=1):
        new_frontier = []
        for parent, parent_history, path in frontier:
            if parent.next_dose is None:
                continue
            dose = parent.next_dose
            for outcome in enumerate_cohort_outcomes(size, alphabet):
                child_history = parent_history.extend(
                    parse_outcomes(f"{dose}{outcome}", alphabet)
                )
                child_path = path + (outcome,)
                fitted = fit_node(child_history, child_path)
                node = PathwayNode(
                    node_id=len(nodes) + 1,
                    parent_id=parent.node_id,
                    depth=depth,
                    cohort_outcomes=outcome,
                    dose_given=dose,
                    next_dose=policy(fitted),
                    fit_summary=fitted.fit_summary(),
                    fit=fitted,
                )
                nodes.append(node)
                new_frontier.append((node, child_history, child_path))
        frontier = new_frontier

    return PathwayTree(nodes=nodes, cohort_sizes=cohort_sizes, design=design)


def _node_seed(base_seed: int, path: tuple[str, ...]) -> int:
    digest = hashlib.sha256(f"{base_seed}|{'/'.join(path)}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1  # keep within signed 64-bit


def spread_paths(tree: PathwayTree) -> pd.DataFrame:
    """One row per root-to-leaf path, with outcomes/next_dose columns per depth."""
    by_id = {n.node_id: n for n in tree.nodes}
    depth_max = len(tree.cohort_sizes)
    rows = []
    for leaf in tree.leaves():
        chain = []
        node = leaf
        while node is not None:
            chain.append(node)
            node = by_id.get(node.parent_id)
        chain.reverse()
        row = {}
        for d in range(depth_max + 1):
            if d < len(chain):
                row[f"outcomes{d}"] = chain[d].cohort_outcomes
                row[f"next_dose{d}"] = chain[d].next_dose
            else:
                row[f"outcomes{d}"] = None
                row[f"next_dose{d}"] = None
        rows.append((tuple(n.node_id for n in chain), row))
    rows.sort(key=lambda item: item[0])
    return pd.DataFrame([r for _, r in rows])


def export_graph(tree: PathwayTree, format: str = "dot") -> str:
    """Render the tree as Graphviz DOT or a JSON node/edge document."""
    fmt = format.lower()
    if fmt == "dot":
        lines = ["digraph pathways {", "  node [shape=circle style=filled];"]
        for n in tree.nodes:
            label = "Stop" if n.next_dose is None else str(n.next_dose)
            color = _node_color(n.next_dose)
            lines.append(f'  n{n.node_id} [label="{label}" fillcolor="{color}"];')
        for n in tree.nodes:
            if n.parent_id is not None:
                lines.append(f'  n{n.parent_id} -> n{n.node_id} [label="{n.cohort_outcomes}"];')
        lines.append("}")
        return "\n".join(lines)
    if fmt == "json":
        from .reports import canonical_json

        return canonical_json(graph_document(tree))
    raise ValueError(f"unsupported graph format {format!r}")


def graph_document(tree: PathwayTree) -> dict:
    """Long-format nodes plus edges, ready for JSON serialization.

    Nodes carry their parent's modal-dose probability change
    (prob_obd_delta / prob_mtd_delta) so table views need no client-side
    arithmetic.
    """
    by_id = {n.node_id: n for n in tree.nodes}
    prob_key = "prob_obd" if tree.design == "efftox" else "prob_mtd"

    def node_doc(n: PathwayNode) -> dict:
        doc = {
            "node": n.node_id,
            "parent": n.parent_id,
            "depth": n.depth,
            "outcomes": n.cohort_outcomes,
            "dose_given": n.dose_given,
            "next_dose": n.next_dose,
            "color": _node_color(n.next_dose),
            "fit_summary": n.fit_summary,
        }
        if n.parent_id is not None:
            parent = by_id[n.parent_id].fit_summary[prob_key]
            child = n.fit_summary[prob_key]
            doc[f"{prob_key}_delta"] = [c - p for c, p in zip(child, parent)]
        return doc

    return {
        "design": tree.design,
        "cohort_sizes": list(tree.cohort_sizes),
        "nodes": [node_doc(n) for n in tree.nodes],
        "edges": [
            {"from": n.parent_id, "to": n.node_id, "label": n.cohort_outcomes}
            for n in tree.nodes
            if n.parent_id is not None
        ],
    }


def _node_color(next_dose: int | None) -> str:
    if next_dose is None:
        return STOP_COLOR
    return DOSE_COLORS.get(next_dose, FALLBACK_COLOR)
