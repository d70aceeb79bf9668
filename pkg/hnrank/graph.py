"""Weighted directed network, node attributes, groupings and labels."""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import DataValidationError

EdgeRecord = Tuple[str, str, float]


@dataclass(frozen=True, eq=False)
class Transition:
    """Column-stochastic transition operator.

    ``links`` holds the standardized out-weights (row = target, column =
    source); columns flagged in ``dangling`` are all-zero there and act as
    the uniform column 1/N.
    """

    links: sp.csc_matrix
    dangling: np.ndarray

    @property
    def size(self) -> int:
        return int(self.links.shape[0])

    def dot(self, x: np.ndarray) -> np.ndarray:
        """Return T @ x."""
        out = np.asarray(self.links @ x, dtype=float)
        if self.dangling.any():
            out = out + x[self.dangling].sum() / self.size
        return out

    def toarray(self) -> np.ndarray:
        """Dense T with the dangling columns filled in."""
        dense = self.links.toarray()
        dense[:, self.dangling] = 1.0 / self.size
        return dense

    @classmethod
    def from_weights(
        cls, n: int, sources: np.ndarray, targets: np.ndarray, weights: np.ndarray
    ) -> 'Transition':
        """Standardize every source column by its total out-weight."""
        out_weight = np.bincount(sources, weights=weights, minlength=n)
        dangling = out_weight <= 0.0
        keep = weights > 0.0
        src, tgt, w = sources[keep], targets[keep], weights[keep]
        shares = w / out_weight[src]
        links = sp.csc_matrix((shares, (tgt, src)), shape=(n, n))
        links.sum_duplicates()
        dangling.setflags(write=False)
        return cls(links=links, dangling=dangling)


@dataclass(frozen=True, eq=False)
class WeightedDigraph:
    """Node set plus merged weighted directed edges."""

    node_ids: Tuple[str, ...]
    sources: np.ndarray
    targets: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        for array in (self.sources, self.targets, self.weights):
            array.setflags(write=False)

    @property
    def node_count(self) -> int:
        return len(self.node_ids)

    @property
    def edges(self) -> List[Tuple[int, int, float]]:
        return [
            (int(s), int(t), float(w))
            for s, t, w in zip(self.sources, self.targets, self.weights)
        ]

    @cached_property
    def index_of(self) -> Dict[str, int]:
        return {node_id: i for i, node_id in enumerate(self.node_ids)}

    @cached_property
    def transition(self) -> Transition:
        return Transition.from_weights(
            self.node_count, self.sources, self.targets, self.weights
        )

    @cached_property
    def in_strength(self) -> np.ndarray:
        return np.bincount(self.targets, weights=self.weights, minlength=self.node_count)

    @cached_property
    def out_strength(self) -> np.ndarray:
        return np.bincount(self.sources, weights=self.weights, minlength=self.node_count)

    @cached_property
    def in_degree(self) -> np.ndarray:
        return np.bincount(self.targets, minlength=self.node_count)

    @cached_property
    def out_degree(self) -> np.ndarray:
        return np.bincount(self.sources, minlength=self.node_count)

    def indices_of(self, node_ids: Iterable[str]) -> np.ndarray:
        """Map external labels to indices, rejecting unknown labels."""
        ids = list(node_ids)
        unknown = [node_id for node_id in ids if node_id not in self.index_of]
        if unknown:
            raise DataValidationError(
                f"{len(unknown)} node id(s) not present in the graph",
                [f"unknown node_id {node_id!r}" for node_id in unknown],
            )
        return np.array([self.index_of[node_id] for node_id in ids], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class AttributeMatrix:
    """Per-node standardized attributes, rows aligned with graph indices."""

    values: np.ndarray
    attribute_names: Tuple[str, ...]

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise ValueError("attribute values must be a 2-D array")
        if self.values.shape[1] != len(self.attribute_names):
            raise ValueError("attribute_names length must equal the column count")
        self.values.setflags(write=False)

    @property
    def rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def cols(self) -> int:
        return int(self.values.shape[1])

    @classmethod
    def uniform(cls, rows: int) -> 'AttributeMatrix':
        """Single constant attribute; yields uniform teleportation."""
        return cls(values=np.full((rows, 1), 0.5), attribute_names=("uniform",))


@dataclass(frozen=True, eq=False)
class GroupAssignment:
    """Total map from node index to a contiguous group id."""

    group_of: np.ndarray
    K: int = field(init=False)

    def __post_init__(self) -> None:
        group_of = np.asarray(self.group_of, dtype=np.int64)
        if group_of.ndim != 1 or group_of.size == 0:
            raise DataValidationError("group assignment must cover at least one node")
        if group_of.min() < 0:
            raise DataValidationError("group ids must be non-negative")
        K = int(group_of.max()) + 1
        missing = sorted(set(range(K)) - set(np.unique(group_of).tolist()))
        if missing:
            raise DataValidationError(
                "group ids must be contiguous from 0",
                [f"group {k} has no members" for k in missing],
            )
        group_of.setflags(write=False)
        object.__setattr__(self, 'group_of', group_of)
        object.__setattr__(self, 'K', K)

    @classmethod
    def single(cls, n: int) -> 'GroupAssignment':
        return cls(group_of=np.zeros(n, dtype=np.int64))

    def sizes(self) -> np.ndarray:
        return np.bincount(self.group_of, minlength=self.K)


@dataclass(frozen=True, eq=False)
class LabelSet:
    """Observed influence indicator for a subset of nodes."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=np.int64)
        values = np.asarray(self.values, dtype=float)
        if nodes.shape != values.shape or nodes.ndim != 1:
            raise DataValidationError("labels need one value per labeled node")
        unique, counts = np.unique(nodes, return_counts=True)
        duplicates = unique[counts > 1]
        if duplicates.size:
            raise DataValidationError(
                "duplicate labeled nodes",
                [f"node index {int(i)} labeled more than once" for i in duplicates],
            )
        if not np.all(np.isfinite(values)):
            raise DataValidationError("label values must be finite")
        nodes.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, 'nodes', nodes)
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return int(self.nodes.size)

    def check_within(self, node_count: int) -> None:
        bad = self.nodes[(self.nodes < 0) | (self.nodes >= node_count)]
        if bad.size:
            raise DataValidationError(
                "labeled nodes outside the graph",
                [f"node index {int(i)}" for i in bad],
            )

    def subset(self, positions: np.ndarray) -> 'LabelSet':
        """Labels at the given positions (positions index this set, not nodes)."""
        return LabelSet(nodes=self.nodes[positions], values=self.values[positions])


def build_graph(edge_records: Sequence[EdgeRecord]) -> WeightedDigraph:
    """Build a graph from (source, target, weight) records.

    Nodes are indexed in first-appearance order and repeated (source, target)
    pairs have their weights summed.
    """
    if not edge_records:
        raise DataValidationError("edge list is empty")

    index_of: Dict[str, int] = {}
    merged: Dict[Tuple[int, int], float] = {}
    problems: List[str] = []

    for position, record in enumerate(edge_records, 1):
        source, target, weight = record
        if not isinstance(source, str) or not source or not isinstance(target, str) or not target:
            problems.append(f"record {position} {record!r}: labels must be non-empty strings")
            continue
        try:
            weight = float(weight)
        except (TypeError, ValueError):
            problems.append(f"record {position} {record!r}: weight is not a number")
            continue
        if not np.isfinite(weight) or weight < 0:
            problems.append(f"record {position} {record!r}: weight must be a finite value >= 0")
            continue
        s = index_of.setdefault(source, len(index_of))
        t = index_of.setdefault(target, len(index_of))
        merged[(s, t)] = merged.get((s, t), 0.0) + weight

    if problems:
        raise DataValidationError("invalid edge records", problems)

    pairs = list(merged)
    return WeightedDigraph(
        node_ids=tuple(index_of),
        sources=np.array([s for s, _ in pairs], dtype=np.int64),
        targets=np.array([t for _, t in pairs], dtype=np.int64),
        weights=np.array([merged[pair] for pair in pairs], dtype=float),
    )


def minmax_scale(column: np.ndarray) -> np.ndarray:
    """Scale to [0, 1]; constant input maps to 0.5."""
    column = np.asarray(column, dtype=float)
    low, high = column.min(), column.max()
    if high == low:
        return np.full(column.shape, 0.5)
    return (column - low) / (high - low)


def standardize_attributes(
    raw: np.ndarray, attribute_names: Optional[Sequence[str]] = None
) -> AttributeMatrix:
    """Per-column min-max scaling of a raw N x m attribute matrix."""
    raw = np.asarray(raw, dtype=float)
    if raw.ndim == 1:
        raw = raw[:, None]
    if raw.ndim != 2 or raw.shape[0] == 0 or raw.shape[1] == 0:
        raise DataValidationError("attributes must form a non-empty N x m matrix")

    bad_rows, bad_cols = np.nonzero(~np.isfinite(raw))
    if bad_rows.size:
        raise DataValidationError(
            "attribute matrix contains NaN or infinite entries",
            [f"row {r}, column {c}: {raw[r, c]}" for r, c in zip(bad_rows, bad_cols)],
        )

    names = tuple(attribute_names) if attribute_names is not None else tuple(
        f"x{j + 1}" for j in range(raw.shape[1])
    )
    values = np.column_stack([minmax_scale(raw[:, j]) for j in range(raw.shape[1])])
    return AttributeMatrix(values=values, attribute_names=names)


def assign_groups_default(graph: WeightedDigraph, max_levels: int = 3) -> GroupAssignment:
    """Group nodes by head/tail breaks of their weighted in-degree.

    Group 0 is the deepest head; tails of shallower levels get larger ids.
    """
    if max_levels < 1:
        raise ValueError(f"max_levels must be at least 1, got {max_levels}")

    from .evaluation.metrics import head_tail_breaks

    strength = graph.in_strength
    if np.unique(strength).size < 2:
        return GroupAssignment.single(graph.node_count)
    partition = head_tail_breaks(strength, max_levels=max_levels)
    group_of = np.zeros(graph.node_count, dtype=np.int64)

    depth = len(partition.levels)
    for level in partition.levels:
        group_of[level.tail] = depth - level.level + 1
    group_of[partition.levels[-1].head] = 0
    return GroupAssignment(group_of=group_of)
