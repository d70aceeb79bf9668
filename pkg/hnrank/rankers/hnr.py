"""Hetero-NodeRank: group-local damping with attribute-derived teleportation."""

from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from ..config import DAMPING_CAP
from ..errors import DataValidationError
from ..graph import AttributeMatrix, GroupAssignment, WeightedDigraph
from .engine import DEFAULT_TOL, RankVector, TeleportVector, fixed_point_rank


@dataclass(frozen=True, eq=False)
class HnrParams:
    """Per-group damping d(k) and attribute weights a(k)."""

    damping: np.ndarray
    attr_weights: np.ndarray
    combination: str = "linear"

    def __post_init__(self) -> None:
        damping = np.asarray(self.damping, dtype=float).reshape(-1)
        attr_weights = np.atleast_2d(np.asarray(self.attr_weights, dtype=float))
        if attr_weights.shape[0] != damping.size:
            raise DataValidationError(
                f"attr_weights has {attr_weights.shape[0]} rows for {damping.size} groups"
            )
        if np.any(damping < 0.0) or np.any(damping > DAMPING_CAP):
            raise DataValidationError(f"damping values must lie in [0, {DAMPING_CAP}]")
        if np.any(attr_weights < 0.0) or np.any(attr_weights > 1.0):
            raise DataValidationError("attribute weights must lie in [0, 1]")
        if self.combination != "linear":
            raise DataValidationError(f"unsupported combination {self.combination!r}; only 'linear'")
        damping.setflags(write=False)
        attr_weights.setflags(write=False)
        object.__setattr__(self, 'damping', damping)
        object.__setattr__(self, 'attr_weights', attr_weights)

    @property
    def groups(self) -> int:
        return int(self.damping.size)

    @property
    def attributes(self) -> int:
        return int(self.attr_weights.shape[1])

    @classmethod
    def uniform(cls, groups: int, attributes: int, damping: float = 0.85) -> 'HnrParams':
        """Same damping everywhere and equal attribute weights."""
        return cls(
            damping=np.full(groups, damping),
            attr_weights=np.ones((groups, attributes)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'groups': self.groups,
            'damping': [float(v) for v in self.damping],
            'attr_weights': [[float(v) for v in row] for row in self.attr_weights],
            'combination': self.combination,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'HnrParams':
        params = cls(
            damping=np.array(data['damping'], dtype=float),
            attr_weights=np.array(data['attr_weights'], dtype=float),
            combination=data.get('combination', 'linear'),
        )
        if 'groups' in data and int(data['groups']) != params.groups:
            raise DataValidationError(
                f"model declares {data['groups']} groups but carries {params.groups} damping values"
            )
        return params


def _check_dimensions(
    n: int, attrs: AttributeMatrix, groups: GroupAssignment, params: HnrParams
) -> None:
    problems = []
    if attrs.rows != n:
        problems.append(f"attribute matrix has {attrs.rows} rows for {n} nodes")
    if groups.group_of.size != n:
        problems.append(f"group assignment covers {groups.group_of.size} of {n} nodes")
    if params.groups != groups.K:
        problems.append(f"parameters cover {params.groups} groups, assignment has {groups.K}")
    if params.attributes != attrs.cols:
        problems.append(f"parameters weight {params.attributes} attributes, matrix has {attrs.cols}")
    if problems:
        raise DataValidationError("dimension mismatch", problems)


def teleport_from_attributes(
    attrs: AttributeMatrix, groups: GroupAssignment, params: HnrParams
) -> TeleportVector:
    """Linear combination of each node's attributes with its group's weights."""
    _check_dimensions(attrs.rows, attrs, groups, params)
    raw = np.einsum('ij,ij->i', attrs.values, params.attr_weights[groups.group_of])
    return TeleportVector.from_raw(raw)


def hnr_rank(
    graph: WeightedDigraph,
    attrs: AttributeMatrix,
    groups: GroupAssignment,
    params: HnrParams,
    tol: float = DEFAULT_TOL,
    max_iter: Optional[int] = None,
) -> RankVector:
    """Rank nodes with group-local damping and attribute teleportation.

    With one group and constant attributes this is plain PageRank; with
    one group it is the single-damping attribute model; with constant
    attributes it is the local-damping model.
    """
    _check_dimensions(graph.node_count, attrs, groups, params)
    teleport = teleport_from_attributes(attrs, groups, params)
    damping_per_node = params.damping[groups.group_of]
    return fixed_point_rank(graph.transition, teleport, damping_per_node, tol, max_iter)
