"""Spearman correlation, head/tail breaks and ht-level performance reports."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy import stats

from ..config import PartitionOn
from ..errors import DataValidationError, UndefinedCorrelationError
from ..graph import LabelSet
from ..rankers.engine import RankVector

MIN_PART_SIZE = 3


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average (fractional) ranks."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DataValidationError(f"spearman needs equal-length vectors, got {x.shape} and {y.shape}")
    n = x.size
    if n < 2:
        raise DataValidationError(f"spearman needs at least 2 pairs, got {n}")

    # Average ranks of n items always have mean (n + 1) / 2.
    centre = (n + 1) / 2.0
    rx = stats.rankdata(x, method='average') - centre
    ry = stats.rankdata(y, method='average') - centre
    sxx = float(np.dot(rx, rx))
    syy = float(np.dot(ry, ry))
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("spearman is undefined for a constant vector")
    rho = float(np.dot(rx, ry)) / np.sqrt(sxx * syy)
    return float(np.clip(rho, -1.0, 1.0))


def spearman_p_value(rho: float, n: int) -> Optional[float]:
    """Two-sided p-value from the t approximation rho * sqrt((n - 2) / (1 - rho^2))."""
    if n <= 2:
        return None
    if abs(rho) >= 1.0:
        return 0.0
    t = rho * np.sqrt((n - 2) / (1.0 - rho ** 2))
    return float(stats.t.sf(abs(t), n - 2) * 2)


@dataclass(frozen=True, eq=False)
class HtLevel:
    """One head/tail division; members are positions into the source values."""

    level: int
    head: np.ndarray
    tail: np.ndarray
    mean: float


@dataclass(frozen=True, eq=False)
class HtPartition:
    levels: List[HtLevel]
    source_values: np.ndarray

    @property
    def depth(self) -> int:
        return len(self.levels)


def head_tail_breaks(
    values: Sequence[float],
    head_fraction_cap: float = 0.4,
    min_head_size: int = 2,
    max_levels: Optional[int] = None,
) -> HtPartition:
    """Recursive mean split of heavy-tailed values.

    Level 1 is always recorded. A head is split again only while it is
    non-empty, holds at most ``head_fraction_cap`` of its parent and has at
    least ``min_head_size`` members; deeper splits violating the cap are
    not recorded.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise DataValidationError("head/tail breaks needs at least 2 values")

    levels: List[HtLevel] = []
    current = np.arange(values.size)
    level = 1
    while True:
        subset = values[current]
        mean = float(subset.mean())
        if subset.max() == subset.min():
            above = np.zeros(subset.size, dtype=bool)
        else:
            above = subset > mean
        head, tail = current[above], current[~above]
        fraction = head.size / current.size

        if level > 1 and (head.size == 0 or fraction > head_fraction_cap):
            break
        levels.append(HtLevel(level=level, head=head, tail=tail, mean=mean))

        if head.size < min_head_size or fraction > head_fraction_cap:
            break
        if max_levels is not None and level >= max_levels:
            break
        current = head
        level += 1

    return HtPartition(levels=levels, source_values=values)


@dataclass
class EvaluationReport:
    """Overall and per-ht-level Spearman of predicted scores against labels."""

    overall_spearman: float
    n_evaluated: int
    p_value: Optional[float] = None
    per_ht_head: Dict[int, Optional[float]] = field(default_factory=dict)
    per_ht_tail: Dict[int, Optional[float]] = field(default_factory=dict)
    part_sizes: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        per_ht = []
        levels = sorted(set(self.per_ht_head) | set(self.per_ht_tail))
        for level in levels:
            for part, table in (("head", self.per_ht_head), ("tail", self.per_ht_tail)):
                if level in table:
                    per_ht.append({
                        'level': level,
                        'part': part,
                        'n': self.part_sizes[f"{part}{level}"],
                        'spearman': table[level],
                    })
        data: Dict[str, Any] = {'overall_spearman': self.overall_spearman}
        if self.p_value is not None:
            data['p_value'] = self.p_value
        data['per_ht'] = per_ht
        data['n_evaluated'] = self.n_evaluated
        return data


def ht_level_report(
    ranks: Union[RankVector, np.ndarray],
    labels: LabelSet,
    partition_on: PartitionOn = PartitionOn.LABELS,
    head_fraction_cap: float = 0.4,
    min_head_size: int = 2,
) -> EvaluationReport:
    """Spearman overall and within every head and tail part of the labeled nodes.

    Nodes whose score is not finite are left out; parts with fewer than
    three members are reported as absent. A part whose labels or scores are
    all tied keeps its size with a Spearman of None.
    """
    scores = ranks.scores if isinstance(ranks, RankVector) else np.asarray(ranks, dtype=float)
    labels.check_within(scores.size)
    predicted = scores[labels.nodes]
    finite = np.isfinite(predicted)
    predicted, observed = predicted[finite], labels.values[finite]
    if predicted.size < MIN_PART_SIZE:
        raise DataValidationError(
            f"evaluation needs at least {MIN_PART_SIZE} labeled nodes with scores, got {predicted.size}"
        )

    overall = spearman(predicted, observed)
    report = EvaluationReport(
        overall_spearman=overall,
        n_evaluated=int(predicted.size),
        p_value=spearman_p_value(overall, int(predicted.size)),
    )

    quantity = observed if PartitionOn(partition_on) is PartitionOn.LABELS else predicted
    partition = head_tail_breaks(quantity, head_fraction_cap, min_head_size)
    for level in partition.levels:
        for part, members, table in (
            ("head", level.head, report.per_ht_head),
            ("tail", level.tail, report.per_ht_tail),
        ):
            if members.size < MIN_PART_SIZE:
                continue
            try:
                table[level.level] = spearman(predicted[members], observed[members])
            except UndefinedCorrelationError:
                table[level.level] = None
            report.part_sizes[f"{part}{level.level}"] = int(members.size)
    return report
