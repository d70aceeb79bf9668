"""Baseline rankers: PageRank, Weighted PageRank and AttriRank."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np
from scipy.spatial.distance import cdist

from ..config import DAMPING_CAP
from ..errors import ConvergenceError, DataValidationError
from ..graph import AttributeMatrix, Transition, WeightedDigraph
from ..utils import STREAM_ATTRIRANK, derive_seed
from .engine import DEFAULT_MAX_ITER, DEFAULT_TOL, RankVector, TeleportVector, fixed_point_rank, power_iterate

logger = logging.getLogger(__name__)


def _check_damping(d: float) -> None:
    if not 0.0 <= d <= DAMPING_CAP:
        raise DataValidationError(f"damping must lie in [0, {DAMPING_CAP}], got {d}")


def pagerank(
    graph: WeightedDigraph,
    d: float = 0.85,
    tol: float = DEFAULT_TOL,
    max_iter: Optional[int] = None,
) -> RankVector:
    """Classic PageRank on the weighted transition with uniform teleportation."""
    _check_damping(d)
    n = graph.node_count
    return fixed_point_rank(
        graph.transition, TeleportVector.uniform(n), np.full(n, d), tol, max_iter
    )


def _positive_edges(graph: WeightedDigraph) -> tuple[np.ndarray, np.ndarray]:
    keep = graph.weights > 0.0
    return graph.sources[keep], graph.targets[keep]


def wpr_transition(graph: WeightedDigraph) -> Transition:
    """Degree-popularity transition: edge v->u weighted by u's in/out-degree share.

    Degrees are unweighted edge counts. A column whose out-neighbours have
    zero total in- or out-degree splits uniformly over those neighbours.
    """
    n = graph.node_count
    src, tgt = _positive_edges(graph)
    in_deg = np.bincount(tgt, minlength=n).astype(float)
    out_deg = np.bincount(src, minlength=n).astype(float)

    in_sum = np.bincount(src, weights=in_deg[tgt], minlength=n)
    out_sum = np.bincount(src, weights=out_deg[tgt], minlength=n)

    degenerate = (in_sum[src] == 0.0) | (out_sum[src] == 0.0)
    with np.errstate(divide='ignore', invalid='ignore'):
        raw = (in_deg[tgt] / in_sum[src]) * (out_deg[tgt] / out_sum[src])
    raw = np.where(degenerate, 1.0, raw)
    return Transition.from_weights(n, src, tgt, raw)


def weighted_pagerank(
    graph: WeightedDigraph,
    d: float = 0.85,
    tol: float = DEFAULT_TOL,
    max_iter: Optional[int] = None,
) -> RankVector:
    """Weighted PageRank with degree-derived link weights."""
    _check_damping(d)
    n = graph.node_count
    return fixed_point_rank(
        wpr_transition(graph), TeleportVector.uniform(n), np.full(n, d), tol, max_iter
    )


def attribute_similarity(attrs: AttributeMatrix, gamma: float) -> np.ndarray:
    """Column-normalized RBF similarity Q[u, v] = s_uv / sum_k s_kv."""
    similarity = np.exp(-gamma * cdist(attrs.values, attrs.values, 'sqeuclidean'))
    return similarity / similarity.sum(axis=0, keepdims=True)


def structural_transition(graph: WeightedDigraph) -> Transition:
    """Unweighted out-degree transition, uniform for nodes without out-edges."""
    src, tgt = _positive_edges(graph)
    return Transition.from_weights(graph.node_count, src, tgt, np.ones(src.size))


def attrirank(
    graph: WeightedDigraph,
    attrs: AttributeMatrix,
    gamma: Optional[float] = None,
    damping_samples: int = 64,
    seed: int = 0,
    damping: Optional[float] = None,
    tol: float = DEFAULT_TOL,
    max_iter: Optional[int] = None,
    threads: int = 1,
) -> RankVector:
    """AttriRank: a walker mixing structural links with attribute similarity.

    Each sampled d ~ Beta(2, 3) solves PR = (1 - d) Q PR + d P PR; the
    result is the mean of the sampled solutions. ``damping`` pins a single
    value instead of sampling.
    """
    if attrs.rows != graph.node_count:
        raise DataValidationError(
            f"attribute matrix has {attrs.rows} rows for {graph.node_count} nodes"
        )
    if gamma is None:
        gamma = 1.0 / attrs.cols
    if gamma <= 0:
        raise DataValidationError(f"gamma must be positive, got {gamma}")
    if damping_samples < 1:
        raise DataValidationError(f"damping_samples must be at least 1, got {damping_samples}")

    if damping is not None:
        if not 0.0 <= damping <= 1.0:
            raise DataValidationError(f"damping must lie in [0, 1], got {damping}")
        draws = np.array([damping])
    else:
        rng = np.random.default_rng(derive_seed(seed, STREAM_ATTRIRANK))
        draws = rng.beta(2.0, 3.0, size=damping_samples)

    n = graph.node_count
    Q = attribute_similarity(attrs, gamma)
    P = structural_transition(graph)
    start = np.full(n, 1.0 / n)
    # Each step is stochastic rather than a contraction in d.
    budget = DEFAULT_MAX_ITER if max_iter is None else max_iter

    def solve(sample: int) -> np.ndarray:
        d_s = float(draws[sample])

        def step(x: np.ndarray) -> np.ndarray:
            return (1.0 - d_s) * (Q @ x) + d_s * P.dot(x)

        try:
            x, _, _ = power_iterate(step, start, tol, budget, f"attrirank sample {sample}")
        except ConvergenceError as e:
            raise ConvergenceError(
                f"attrirank: sample {sample} (d={d_s:.4f}) did not converge",
                partial=e.partial, residual=e.residual, iterations=e.iterations, sample_index=sample,
            ) from e
        return x / x.sum()

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            solutions: List[np.ndarray] = list(pool.map(solve, range(draws.size)))
    else:
        solutions = [solve(sample) for sample in range(draws.size)]

    scores = np.mean(solutions, axis=0)
    logger.debug("attrirank averaged %d damping samples", draws.size)
    return RankVector.from_scores(scores / scores.sum(), iterations=draws.size, residual=0.0)
