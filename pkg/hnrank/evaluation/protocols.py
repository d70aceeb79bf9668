"""Train/test protocols: cross-validation, sample-size sweeps and model comparison."""

import logging
from contextlib import nullcontext
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..calibration.manager import calibrate
from ..config import Config, Variant
from ..errors import ConfigError, DataValidationError
from ..graph import AttributeMatrix, GroupAssignment, LabelSet, WeightedDigraph
from ..rankers.strategies import RankingInputs, get_ranker
from ..utils import STREAM_CALIBRATION_SPLIT, STREAM_SPLIT, create_progress_bar, derive_seed
from .metrics import EvaluationReport, MIN_PART_SIZE, head_tail_breaks, ht_level_report, spearman

logger = logging.getLogger(__name__)

UNSUPERVISED_MODELS = ('pagerank', 'wpr', 'attrirank', 'exf')
SUPERVISED_MODELS = {'hnr_e': Variant.E, 'hnr_l': Variant.L, 'hnr_el': Variant.EL}
MODEL_NAMES = UNSUPERVISED_MODELS + tuple(SUPERVISED_MODELS)


@dataclass
class CvSummary:
    """Test-set Spearman of one model over seeded random splits."""

    model: str
    repeats: int
    per_repeat: List[float]
    mean: float
    sd: float
    train_fraction: float
    train_size: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            'model': self.model,
            'repeats': self.repeats,
            'train_fraction': self.train_fraction,
            'train_size': self.train_size,
            'per_repeat': list(self.per_repeat),
            'mean_spearman': self.mean,
            'sd_spearman': self.sd,
        }


@dataclass
class SweepRow:
    fraction: float
    mean_spearman: float
    sd_spearman: float


@dataclass
class ModelComparison:
    """Per-model cross-validation summaries and full-label ht-level reports."""

    summaries: Dict[str, CvSummary] = field(default_factory=dict)
    reports: Dict[str, EvaluationReport] = field(default_factory=dict)
    errors: Dict[str, str] = field(default_factory=dict)
    seed: int = 0

    def to_dict(self) -> Dict[str, Any]:
        models = []
        for name in list(self.summaries) + [n for n in self.errors if n not in self.summaries]:
            entry: Dict[str, Any] = {'model': name}
            if name in self.summaries:
                summary = self.summaries[name]
                entry.update({
                    'mean_spearman': summary.mean,
                    'sd_spearman': summary.sd,
                    'per_repeat': list(summary.per_repeat),
                })
            if name in self.reports:
                entry['ht_report'] = self.reports[name].to_dict()
            if name in self.errors:
                entry['error'] = self.errors[name]
            models.append(entry)
        return {'seed': self.seed, 'models': models}


def train_size(n_labels: int, fraction: float) -> int:
    """round(fraction * n), halves rounded up."""
    return int(np.floor(fraction * n_labels + 0.5))


def check_split(n_labels: int, fraction: float) -> int:
    """Train size for the split, rejecting splits with a side under 3 nodes."""
    if not 0.0 < fraction < 1.0:
        raise ConfigError(f"train fraction must lie in (0, 1), got {fraction}")
    size = train_size(n_labels, fraction)
    if size < MIN_PART_SIZE or n_labels - size < MIN_PART_SIZE:
        raise DataValidationError(
            f"a {fraction:g} split of {n_labels} labels gives {size} train / {n_labels - size} test nodes; "
            f"both sides need at least {MIN_PART_SIZE}"
        )
    return size


def _strata(labels: LabelSet, head_fraction_cap: float, min_head_size: int) -> np.ndarray:
    partition = head_tail_breaks(labels.values, head_fraction_cap, min_head_size)
    stratum = np.zeros(len(labels), dtype=np.int64)
    for level in partition.levels:
        stratum[level.tail] = level.level
    stratum[partition.levels[-1].head] = partition.depth + 1
    return stratum


def split_labels(
    labels: LabelSet,
    fraction: float,
    seed: int,
    stratify: bool = False,
    head_fraction_cap: float = 0.4,
    min_head_size: int = 2,
) -> Tuple[LabelSet, LabelSet]:
    """Seeded disjoint train/test split whose union is the label set.

    With ``stratify`` each head/tail stratum of the label values contributes
    to the train side in proportion to its size (largest remainders).
    """
    n = len(labels)
    size = check_split(n, fraction)
    rng = np.random.default_rng(seed)

    if not stratify:
        train = np.sort(rng.permutation(n)[:size])
    else:
        stratum = _strata(labels, head_fraction_cap, min_head_size)
        ids = np.unique(stratum)
        sizes = np.array([(stratum == s).sum() for s in ids], dtype=np.int64)
        quota, remainder = np.divmod(sizes * size, n)
        order = np.argsort(-remainder, kind='stable')
        quota[order[:size - quota.sum()]] += 1
        picked = [
            rng.permutation(np.flatnonzero(stratum == s))[:q] for s, q in zip(ids, quota)
        ]
        train = np.sort(np.concatenate(picked))

    test = np.setdiff1d(np.arange(n), train)
    return labels.subset(train), labels.subset(test)


def held_out_spearman(scores: np.ndarray, test: LabelSet) -> float:
    """Spearman on the test nodes that carry a finite score."""
    predicted = scores[test.nodes]
    finite = np.isfinite(predicted)
    if finite.sum() < MIN_PART_SIZE:
        raise DataValidationError(
            f"only {int(finite.sum())} test nodes have a defined score; need {MIN_PART_SIZE}"
        )
    return spearman(predicted[finite], test.values[finite])


def _model_name(config: Config, model: Optional[str]) -> str:
    name = model or f"hnr_{config.calibration.variant.value}"
    if name not in MODEL_NAMES:
        raise ConfigError(f"Unknown model {name!r}; choose one of {', '.join(MODEL_NAMES)}")
    return name


def unsupervised_scores(
    name: str,
    graph: WeightedDigraph,
    attrs: Optional[AttributeMatrix],
    config: Config,
    threads: int = 1,
) -> np.ndarray:
    """Scores of a ranker that needs no labels."""
    ranker = get_ranker(name, config.ranking, threads)
    return ranker.score(RankingInputs(graph=graph, attrs=attrs))


def supervised_scores(
    name: str,
    graph: WeightedDigraph,
    attrs: AttributeMatrix,
    groups: GroupAssignment,
    train: LabelSet,
    config: Config,
    seed: int,
    threads: int = 1,
) -> np.ndarray:
    """Calibrate the named HNR variant on ``train`` and rank every node."""
    calibration = config.calibration.model_copy(update={'variant': SUPERVISED_MODELS[name]})
    result = calibrate(graph, attrs, groups, train, calibration, seed=seed, threads=threads)
    ranking = config.ranking.model_copy(update={'tol': calibration.tol, 'max_iter': calibration.max_iter})
    return get_ranker('hnr', ranking, threads).score(
        RankingInputs(graph=graph, attrs=attrs, groups=groups, params=result.best_params)
    )


def cross_validate(
    graph: WeightedDigraph,
    attrs: AttributeMatrix,
    groups: GroupAssignment,
    labels: LabelSet,
    config: Config,
    train_fraction: Optional[float] = None,
    repeats: Optional[int] = None,
    seed: Optional[int] = None,
    model: Optional[str] = None,
    threads: int = 1,
    stratify: Optional[bool] = None,
    show_progress: bool = False,
) -> CvSummary:
    """Repeat: split labels, fit on the train side, Spearman on the test side.

    Split and calibration seeds for every repeat are derived up front from
    ``seed``, so repeats are independent of execution order.
    """
    evaluation = config.evaluation
    fraction = evaluation.train_fraction if train_fraction is None else train_fraction
    repeats = evaluation.repeats if repeats is None else repeats
    seed = config.calibration.seed if seed is None else seed
    stratify = evaluation.stratify if stratify is None else stratify
    name = _model_name(config, model)
    if repeats < 1:
        raise ConfigError(f"repeats must be at least 1, got {repeats}")
    labels.check_within(graph.node_count)
    size = check_split(len(labels), fraction)

    split_seeds = [derive_seed(seed, STREAM_SPLIT, r) for r in range(repeats)]
    calibration_seeds = [derive_seed(seed, STREAM_CALIBRATION_SPLIT, r) for r in range(repeats)]
    fixed_scores = (
        unsupervised_scores(name, graph, attrs, config, threads) if name in UNSUPERVISED_MODELS else None
    )

    per_repeat: List[float] = []
    progress = create_progress_bar() if show_progress else nullcontext(None)
    with progress as bar:
        task = bar.add_task(f"Cross-validating {name}", total=repeats) if bar is not None else None
        for r in range(repeats):
            train, test = split_labels(
                labels, fraction, split_seeds[r], stratify,
                evaluation.head_fraction_cap, evaluation.min_head_size,
            )
            if fixed_scores is not None:
                scores = fixed_scores
            else:
                scores = supervised_scores(
                    name, graph, attrs, groups, train, config, calibration_seeds[r], threads
                )
            per_repeat.append(held_out_spearman(scores, test))
            logger.debug("%s repeat %d: test spearman %.4f", name, r, per_repeat[-1])
            if bar is not None and task is not None:
                bar.advance(task)

    values = np.array(per_repeat)
    return CvSummary(
        model=name,
        repeats=repeats,
        per_repeat=per_repeat,
        mean=float(values.mean()),
        sd=float(values.std(ddof=1)) if repeats > 1 else 0.0,
        train_fraction=fraction,
        train_size=size,
    )


def sample_size_sweep(
    graph: WeightedDigraph,
    attrs: AttributeMatrix,
    groups: GroupAssignment,
    labels: LabelSet,
    config: Config,
    fractions: Optional[Sequence[float]] = None,
    repeats: Optional[int] = None,
    seed: Optional[int] = None,
    model: Optional[str] = None,
    threads: int = 1,
    show_progress: bool = False,
) -> List[SweepRow]:
    """cross_validate at every fraction with the same root seed."""
    fractions = list(config.evaluation.fractions if fractions is None else fractions)
    if not fractions:
        raise ConfigError("sample size sweep needs at least one fraction")
    for fraction in fractions:
        check_split(len(labels), fraction)

    rows = []
    for fraction in fractions:
        summary = cross_validate(
            graph, attrs, groups, labels, config,
            train_fraction=fraction, repeats=repeats, seed=seed, model=model,
            threads=threads, show_progress=show_progress,
        )
        rows.append(SweepRow(fraction=fraction, mean_spearman=summary.mean, sd_spearman=summary.sd))
        logger.info("fraction %.2f: mean test spearman %.4f", fraction, summary.mean)
    return rows


def compare_models(
    graph: WeightedDigraph,
    attrs: AttributeMatrix,
    groups: GroupAssignment,
    labels: LabelSet,
    config: Config,
    models: Optional[Sequence[str]] = None,
    seed: Optional[int] = None,
    threads: int = 1,
    show_progress: bool = False,
) -> ModelComparison:
    """Cross-validate every model on the same splits, plus full-label ht reports.

    Supervised reports use parameters calibrated on the full label set.
    A model whose evaluation is undefined is recorded under ``errors``.
    """
    models = list(MODEL_NAMES if models is None else models)
    seed = config.calibration.seed if seed is None else seed
    for name in models:
        _model_name(config, name)
    check_split(len(labels), config.evaluation.train_fraction)

    comparison = ModelComparison(seed=seed)
    evaluation = config.evaluation
    for name in models:
        try:
            comparison.summaries[name] = cross_validate(
                graph, attrs, groups, labels, config,
                seed=seed, model=name, threads=threads, show_progress=show_progress,
            )
            if name in UNSUPERVISED_MODELS:
                scores = unsupervised_scores(name, graph, attrs, config, threads)
            else:
                scores = supervised_scores(name, graph, attrs, groups, labels, config, seed, threads)
            comparison.reports[name] = ht_level_report(
                scores, labels, evaluation.partition_on,
                evaluation.head_fraction_cap, evaluation.min_head_size,
            )
        except DataValidationError as e:
            logger.warning("%s could not be evaluated: %s", name, e)
            comparison.errors[name] = str(e)
    return comparison
