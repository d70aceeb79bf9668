"""Loss functions and the loss-to-fitness transform used by evolutionary search."""

from typing import Sequence, Union

import numpy as np

from ..config import LossKind
from ..errors import DataValidationError, UndefinedCorrelationError
from ..evaluation.metrics import spearman
from ..graph import minmax_scale


def loss(
    predicted: Sequence[float],
    observed: Sequence[float],
    kind: Union[LossKind, str] = LossKind.NEG_SPEARMAN,
) -> float:
    """Distance between predicted scores and observed labels (aligned pairs).

    L1/L2 compare independently min-max normalized vectors; NEG_SPEARMAN is
    1 - rho and equals 1 when rho is undefined (a constant vector).
    """
    kind = LossKind(kind)
    predicted = np.asarray(predicted, dtype=float)
    observed = np.asarray(observed, dtype=float)
    if predicted.shape != observed.shape:
        raise DataValidationError(
            f"predicted and observed differ in shape: {predicted.shape} vs {observed.shape}"
        )
    if predicted.size < 2:
        raise DataValidationError(f"loss needs at least 2 labeled nodes, got {predicted.size}")

    if kind is LossKind.NEG_SPEARMAN:
        if predicted.size < 3:
            raise DataValidationError(
                f"NEG_SPEARMAN needs at least 3 labeled nodes, got {predicted.size}"
            )
        try:
            return 1.0 - spearman(predicted, observed)
        except UndefinedCorrelationError:
            return 1.0

    diff = minmax_scale(predicted) - minmax_scale(observed)
    if kind is LossKind.L1:
        return float(np.mean(np.abs(diff)))
    return float(np.mean(diff ** 2))


def fitness(loss_value: float) -> float:
    """F = 1 / (1 + loss), in (0, 1] and strictly decreasing in the loss."""
    if loss_value < 0 or np.isnan(loss_value):
        raise ValueError(f"loss must be non-negative, got {loss_value}")
    return 1.0 / (1.0 + loss_value)
