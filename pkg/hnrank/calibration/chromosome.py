"""Chromosome layout and the calibration problem a chromosome is scored on."""

import logging
import threading
from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Dict, List, Optional, Union

import numpy as np

from ..config import DAMPING_CAP, LossKind, Variant
from ..errors import ConvergenceError, DataValidationError
from ..graph import AttributeMatrix, GroupAssignment, WeightedDigraph
from ..rankers.engine import DEFAULT_TOL
from ..rankers.hnr import HnrParams, hnr_rank
from .objective import fitness, loss

logger = logging.getLogger(__name__)


def decode_chromosome(genes: np.ndarray, K: int, m: int) -> HnrParams:
    """Read K blocks of (d(k), a(k)_1..a(k)_m); damping genes scale into [0, 0.99]."""
    genes = np.asarray(genes, dtype=float)
    if genes.shape != (K * (1 + m),):
        raise DataValidationError(
            f"chromosome has {genes.size} genes, expected K*(1+m) = {K * (1 + m)}"
        )
    if np.any(genes < 0.0) or np.any(genes > 1.0):
        raise DataValidationError("chromosome genes must lie in [0, 1]")
    blocks = genes.reshape(K, 1 + m)
    return HnrParams(damping=DAMPING_CAP * blocks[:, 0], attr_weights=blocks[:, 1:])


def encode_params(params: HnrParams) -> np.ndarray:
    """Inverse of decode_chromosome."""
    damping_genes = params.damping / DAMPING_CAP
    return np.column_stack([damping_genes, params.attr_weights]).reshape(-1)


def gene_count(variant: Union[Variant, str], K: int, m: int) -> int:
    variant = Variant(variant)
    if variant is Variant.EL:
        return K * (1 + m)
    if variant is Variant.E:
        return 1 + m
    return K


def decode_variant(genes: np.ndarray, variant: Union[Variant, str], K: int, m: int) -> HnrParams:
    """Expand a variant chromosome to full per-group parameters.

    ``e`` shares one (d, a) block across all groups; ``l`` keeps per-group
    damping and zero attribute weights, which makes teleportation uniform.
    """
    variant = Variant(variant)
    genes = np.asarray(genes, dtype=float)
    if variant is Variant.EL:
        return decode_chromosome(genes, K, m)
    if variant is Variant.E:
        shared = decode_chromosome(genes, 1, m)
        return HnrParams(
            damping=np.repeat(shared.damping, K),
            attr_weights=np.repeat(shared.attr_weights, K, axis=0),
        )
    if genes.shape != (K,):
        raise DataValidationError(f"chromosome has {genes.size} genes, expected K = {K}")
    if np.any(genes < 0.0) or np.any(genes > 1.0):
        raise DataValidationError("chromosome genes must lie in [0, 1]")
    return HnrParams(damping=DAMPING_CAP * genes, attr_weights=np.zeros((K, m)))


@dataclass(frozen=True)
class Evaluation:
    loss: float
    fitness: float


class CalibrationProblem:
    """Scores chromosomes by ranking the graph and comparing against labels.

    ``nodes`` may repeat (bootstrap resamples); ``observed`` is aligned to it.
    Evaluations are cached by gene bytes, so re-scoring an elite is free.
    """

    def __init__(
        self,
        graph: WeightedDigraph,
        attrs: AttributeMatrix,
        groups: GroupAssignment,
        nodes: np.ndarray,
        observed: np.ndarray,
        loss_kind: Union[LossKind, str] = LossKind.NEG_SPEARMAN,
        variant: Union[Variant, str] = Variant.EL,
        tol: float = DEFAULT_TOL,
        max_iter: Optional[int] = None,
    ):
        nodes = np.asarray(nodes, dtype=np.int64)
        observed = np.asarray(observed, dtype=float)
        if nodes.shape != observed.shape or nodes.size == 0:
            raise DataValidationError("calibration needs a non-empty, aligned label set")
        if attrs.rows != graph.node_count or groups.group_of.size != graph.node_count:
            raise DataValidationError("attributes and groups must cover every graph node")
        self.graph = graph
        self.attrs = attrs
        self.groups = groups
        self.nodes = nodes
        self.observed = observed
        self.loss_kind = LossKind(loss_kind)
        self.variant = Variant(variant)
        self.tol = tol
        self.max_iter = max_iter
        self.K = groups.K
        self.m = attrs.cols
        self._cache: Dict[bytes, Evaluation] = {}
        self._lock = threading.Lock()

    @property
    def gene_count(self) -> int:
        return gene_count(self.variant, self.K, self.m)

    def decode(self, genes: np.ndarray) -> HnrParams:
        return decode_variant(genes, self.variant, self.K, self.m)

    def evaluate(self, genes: np.ndarray) -> Evaluation:
        """Loss and fitness of one chromosome; non-converging rankings score 0."""
        key = np.asarray(genes, dtype=float).tobytes()
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached

        params = self.decode(genes)
        try:
            ranks = hnr_rank(self.graph, self.attrs, self.groups, params, self.tol, self.max_iter)
        except ConvergenceError as e:
            logger.debug("penalizing non-converging chromosome (residual %.3e)", e.residual)
            result = Evaluation(loss=float("inf"), fitness=0.0)
        else:
            value = loss(ranks.scores[self.nodes], self.observed, self.loss_kind)
            result = Evaluation(loss=value, fitness=fitness(value))

        with self._lock:
            self._cache[key] = result
        return result

    def evaluate_many(self, population: np.ndarray, pool: Optional[Executor] = None) -> List[Evaluation]:
        """Score a population; ``pool.map`` keeps results in member order."""
        members = list(population)
        if pool is None:
            return [self.evaluate(genes) for genes in members]
        return list(pool.map(self.evaluate, members))
