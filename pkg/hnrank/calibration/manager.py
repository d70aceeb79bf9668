"""Calibration orchestration: run an optimizer, bootstrap intervals, model export."""

import logging
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..config import DAMPING_CAP, CalibrationConfig, LossKind, OptimizerKind
from ..errors import ConfigError, DataValidationError
from ..graph import AttributeMatrix, GroupAssignment, LabelSet, WeightedDigraph
from ..rankers.hnr import HnrParams
from ..utils import STREAM_BOOTSTRAP, STREAM_CALIBRATION, append_jsonl, create_progress_bar, derive_seed
from .chromosome import CalibrationProblem
from .optimizers import GenerationCallback, OptimizationOutcome, get_optimizer

logger = logging.getLogger(__name__)

MIN_BOOTSTRAP_RESAMPLES = 10
MAX_REDRAWS = 100
MIN_DISTINCT_LABELS = 3


@dataclass
class CalibrationResult:
    """Best parameters found for one labeled training set."""

    best_params: HnrParams
    best_fitness: float
    best_loss: float
    fitness_history: List[Dict[str, Any]]
    loss_name: str
    variant: str
    optimizer: str
    seed: int
    train_node_ids: List[str]
    attribute_names: List[str]
    bootstrap: Optional[Dict[str, List[float]]] = None
    generations_run: int = 0


def parameter_names(groups: int, attribute_names: List[str]) -> List[str]:
    """Names in gene-block order: d(k), then a(k)_<attribute> for every group k."""
    names = []
    for k in range(groups):
        names.append(f"d({k})")
        names.extend(f"a({k})_{attribute}" for attribute in attribute_names)
    return names


def _check_labels(graph: WeightedDigraph, labels: LabelSet, loss_kind: LossKind) -> None:
    labels.check_within(graph.node_count)
    needed = MIN_DISTINCT_LABELS if loss_kind is LossKind.NEG_SPEARMAN else 2
    if len(labels) < needed:
        raise DataValidationError(
            f"{loss_kind.value} calibration needs at least {needed} labeled nodes, got {len(labels)}"
        )


def _executor(threads: int):
    if threads > 1:
        return ThreadPoolExecutor(max_workers=threads)
    return nullcontext(None)


def _run(
    problem: CalibrationProblem,
    config: CalibrationConfig,
    seed: int,
    pool: Optional[Executor],
    on_generation: Optional[GenerationCallback] = None,
    initial: Optional[np.ndarray] = None,
) -> OptimizationOutcome:
    optimizer = get_optimizer(config)
    return optimizer.run(
        problem,
        derive_seed(seed, STREAM_CALIBRATION),
        pool=pool,
        on_generation=on_generation,
        initial=initial,
    )


def calibrate(
    graph: WeightedDigraph,
    attrs: AttributeMatrix,
    groups: GroupAssignment,
    labels: LabelSet,
    config: CalibrationConfig,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    history_path: Optional[Path] = None,
    show_progress: bool = False,
    initial: Optional[np.ndarray] = None,
) -> CalibrationResult:
    """Fit HnrParams to labels with the optimizer and variant named in ``config``."""
    seed = config.seed if seed is None else seed
    threads = config.threads if threads is None else threads
    _check_labels(graph, labels, config.loss)

    problem = CalibrationProblem(
        graph, attrs, groups, labels.nodes, labels.values,
        loss_kind=config.loss, variant=config.variant, tol=config.tol, max_iter=config.max_iter,
    )
    logger.info(
        "Calibrating HNR(%s) with %s: K=%d, m=%d, %d genes, %d labels",
        config.variant.value, config.optimizer.value, groups.K, attrs.cols,
        problem.gene_count, len(labels),
    )

    progress = create_progress_bar() if show_progress else nullcontext(None)
    with progress as bar, _executor(threads) as pool:
        task = None
        if bar is not None:
            task = bar.add_task(f"Calibrating ({config.optimizer.value})", total=config.generations)

        def on_generation(entry: Dict[str, Any]) -> None:
            if history_path is not None:
                append_jsonl(history_path, entry)
            if bar is not None and task is not None and entry['generation'] > 0:
                bar.advance(task)

        outcome = _run(problem, config, seed, pool, on_generation, initial)

    best = outcome.best_evaluation
    return CalibrationResult(
        best_params=problem.decode(outcome.best_genes),
        best_fitness=best.fitness,
        best_loss=best.loss,
        fitness_history=outcome.history,
        loss_name=config.loss.value,
        variant=config.variant.value,
        optimizer=config.optimizer.value,
        seed=seed,
        train_node_ids=[graph.node_ids[i] for i in labels.nodes],
        attribute_names=list(attrs.attribute_names),
        generations_run=outcome.generations_run,
    )


def ga_optimize(
    graph: WeightedDigraph,
    attrs: AttributeMatrix,
    groups: GroupAssignment,
    labels: LabelSet,
    config: CalibrationConfig,
    seed: Optional[int] = None,
    **kwargs: Any,
) -> CalibrationResult:
    """Calibrate with the genetic algorithm."""
    config = config.model_copy(update={'optimizer': OptimizerKind.GA})
    return calibrate(graph, attrs, groups, labels, config, seed, **kwargs)


def de_optimize(
    graph: WeightedDigraph,
    attrs: AttributeMatrix,
    groups: GroupAssignment,
    labels: LabelSet,
    config: CalibrationConfig,
    seed: Optional[int] = None,
    **kwargs: Any,
) -> CalibrationResult:
    """Calibrate with DE/rand/1/bin."""
    config = config.model_copy(update={'optimizer': OptimizerKind.DE})
    return calibrate(graph, attrs, groups, labels, config, seed, **kwargs)


def draw_resample(rng: np.random.Generator, size: int) -> np.ndarray:
    """Positions drawn with replacement, sorted, with at least 3 distinct values."""
    for _ in range(MAX_REDRAWS):
        positions = np.sort(rng.integers(0, size, size=size))
        if np.unique(positions).size >= MIN_DISTINCT_LABELS:
            return positions
    raise DataValidationError(
        f"could not draw a bootstrap resample with {MIN_DISTINCT_LABELS} distinct labeled nodes "
        f"in {MAX_REDRAWS} attempts"
    )


def bootstrap_coefficients(
    graph: WeightedDigraph,
    attrs: AttributeMatrix,
    groups: GroupAssignment,
    labels: LabelSet,
    config: CalibrationConfig,
    B: int,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    show_progress: bool = False,
) -> Dict[str, List[float]]:
    """2.5% / 97.5% percentile interval of every d(k) and a(k)_j over B resamples.

    Each resample is recalibrated with the reduced budget and the same
    optimizer seed, so identical resamples give identical parameters.
    """
    if B < MIN_BOOTSTRAP_RESAMPLES:
        raise ConfigError(f"bootstrap needs at least {MIN_BOOTSTRAP_RESAMPLES} resamples, got {B}")
    seed = config.seed if seed is None else seed
    threads = config.threads if threads is None else threads
    _check_labels(graph, labels, config.loss)
    reduced = config.reduced()
    rng = np.random.default_rng(derive_seed(seed, STREAM_BOOTSTRAP))

    samples: List[np.ndarray] = []
    progress = create_progress_bar() if show_progress else nullcontext(None)
    with progress as bar, _executor(threads) as pool:
        task = bar.add_task("Bootstrap", total=B) if bar is not None else None
        for b in range(B):
            positions = draw_resample(rng, len(labels))
            problem = CalibrationProblem(
                graph, attrs, groups, labels.nodes[positions], labels.values[positions],
                loss_kind=reduced.loss, variant=reduced.variant,
                tol=reduced.tol, max_iter=reduced.max_iter,
            )
            outcome = _run(problem, reduced, seed, pool)
            params = problem.decode(outcome.best_genes)
            samples.append(np.column_stack([params.damping, params.attr_weights]).reshape(-1))
            logger.debug("bootstrap resample %d/%d: loss %.6f", b + 1, B, outcome.best_evaluation.loss)
            if bar is not None and task is not None:
                bar.advance(task)

    values = np.vstack(samples)
    low = np.percentile(values, 2.5, axis=0)
    high = np.percentile(values, 97.5, axis=0)
    names = parameter_names(groups.K, list(attrs.attribute_names))
    return {name: [float(lo), float(hi)] for name, lo, hi in zip(names, low, high)}


def export_model(result: CalibrationResult, grouping: Dict[str, Any]) -> Dict[str, Any]:
    """Model JSON document; free of timestamps so reruns are byte-identical."""
    data: Dict[str, Any] = {
        'groups': result.best_params.groups,
        'damping': [float(v) for v in result.best_params.damping],
        'attr_weights': [[float(v) for v in row] for row in result.best_params.attr_weights],
        'attribute_names': list(result.attribute_names),
        'combination': result.best_params.combination,
        'loss': result.loss_name,
        'best_fitness': result.best_fitness,
        'fitness_history': result.fitness_history,
    }
    if result.bootstrap is not None:
        data['bootstrap'] = result.bootstrap
    data.update({
        'variant': result.variant,
        'optimizer': result.optimizer,
        'seed': result.seed,
        'damping_cap': DAMPING_CAP,
        'grouping': grouping,
        'train_node_ids': list(result.train_node_ids),
    })
    return data


def load_model(data: Dict[str, Any]) -> Tuple[HnrParams, Dict[str, Any]]:
    """HnrParams plus the remaining model metadata from a model document."""
    missing = [key for key in ('damping', 'attr_weights') if key not in data]
    if missing:
        raise DataValidationError("model document is incomplete", [f"missing key {key!r}" for key in missing])
    params = HnrParams.from_dict(data)
    names = data.get('attribute_names')
    if names is not None and len(names) != params.attributes:
        raise DataValidationError(
            f"model names {len(names)} attributes but weights {params.attributes}"
        )
    return params, {key: value for key, value in data.items() if key not in ('damping', 'attr_weights')}
