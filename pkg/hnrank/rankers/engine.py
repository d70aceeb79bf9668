"""Fixed-point ranking engine shared by every PageRank-family ranker."""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Optional, Tuple

import numpy as np

from ..config import DAMPING_CAP
from ..errors import ConvergenceError, DataValidationError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 1000


@dataclass(frozen=True, eq=False)
class TeleportVector:
    """Probability distribution used for the non-link part of the recursion."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise DataValidationError("teleport vector must be a non-empty 1-D array")
        if np.any(values < 0) or abs(values.sum() - 1.0) > 1e-12:
            raise DataValidationError("teleport vector must be non-negative and sum to 1")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def uniform(cls, n: int) -> 'TeleportVector':
        return cls(values=np.full(n, 1.0 / n))

    @classmethod
    def from_raw(cls, raw: np.ndarray) -> 'TeleportVector':
        """Normalize non-negative mass; all-zero mass falls back to uniform."""
        raw = np.asarray(raw, dtype=float)
        total = raw.sum()
        if total <= 0.0:
            return cls.uniform(raw.size)
        return cls(values=raw / total)


@dataclass(frozen=True, eq=False)
class RankVector:
    """Converged scores with ordinal ranks (1 = highest, ties by node index)."""

    scores: np.ndarray
    ranks: np.ndarray
    iterations: int = 0
    residual: float = 0.0

    @classmethod
    def from_scores(cls, scores: np.ndarray, iterations: int = 0, residual: float = 0.0) -> 'RankVector':
        scores = np.asarray(scores, dtype=float)
        order = np.lexsort((np.arange(scores.size), -scores))
        ranks = np.empty(scores.size, dtype=np.int64)
        ranks[order] = np.arange(1, scores.size + 1)
        scores.setflags(write=False)
        ranks.setflags(write=False)
        return cls(scores=scores, ranks=ranks, iterations=iterations, residual=float(residual))


def iteration_budget(max_iter: Optional[int], max_damping: float, tol: float) -> int:
    """An explicit ``max_iter`` wins; otherwise enough steps for a contraction of rate
    ``max_damping`` to bring the L1 change from 2 below ``tol``, and never fewer than
    DEFAULT_MAX_ITER.
    """
    if max_iter is not None:
        return max_iter
    if not 0.0 < max_damping < 1.0 or tol >= 2.0:
        return DEFAULT_MAX_ITER
    needed = math.ceil(math.log(tol / 2.0) / math.log(max_damping)) + 1
    return max(DEFAULT_MAX_ITER, needed)


def power_iterate(
    step: Callable[[np.ndarray], np.ndarray],
    start: np.ndarray,
    tol: float,
    max_iter: int,
    what: str = "ranking",
) -> Tuple[np.ndarray, int, float]:
    """Iterate ``x <- step(x)`` until the L1 change drops below ``tol``."""
    x = start
    residual = float("inf")
    for iteration in range(1, max_iter + 1):
        x_next = step(x)
        residual = float(np.abs(x_next - x).sum())
        x = x_next
        if residual < tol:
            logger.debug("%s converged after %d iterations (residual %.3e)", what, iteration, residual)
            return x, iteration, residual

    raise ConvergenceError(
        f"{what}: no convergence within {max_iter} iterations (residual {residual:.3e} >= tol {tol:.1e})",
        partial=x,
        residual=residual,
        iterations=max_iter,
    )


def fixed_point_rank(
    transition: Any,
    teleport: TeleportVector,
    damping_per_node: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_iter: Optional[int] = None,
) -> RankVector:
    """Solve PR = (1 - d) * t + d * (T @ PR) by iteration from the uniform vector.

    ``transition`` is anything with ``dot`` (a graph Transition, a dense
    array or a sparse matrix). The result is renormalized to sum 1. Without
    ``max_iter`` the step budget grows like 1 / (1 - max(d)).
    """
    t = teleport.values
    n = t.size
    d = np.asarray(damping_per_node, dtype=float)
    if d.shape != (n,):
        raise DataValidationError(f"damping vector has shape {d.shape}, expected ({n},)")
    if np.any(d < 0.0) or np.any(d > DAMPING_CAP):
        raise DataValidationError(f"damping values must lie in [0, {DAMPING_CAP}]")

    base = (1.0 - d) * t
    if not d.any():
        # Constant map: the first iterate is the fixed point.
        return RankVector.from_scores(base / base.sum(), iterations=1, residual=0.0)

    def step(x: np.ndarray) -> np.ndarray:
        return base + d * transition.dot(x)

    try:
        budget = iteration_budget(max_iter, float(d.max()), tol)
        x, iterations, residual = power_iterate(step, np.full(n, 1.0 / n), tol, budget, "fixed_point_rank")
    except ConvergenceError as e:
        partial: Optional[np.ndarray] = e.partial
        if partial is not None:
            e.partial = partial / partial.sum()
        raise
    return RankVector.from_scores(x / x.sum(), iterations=iterations, residual=residual)
