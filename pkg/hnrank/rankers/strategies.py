"""Ranker strategies behind a common interface, selectable by name."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional, Type

import numpy as np

from ..config import RankingConfig
from ..errors import ConfigError
from ..graph import AttributeMatrix, GroupAssignment, WeightedDigraph
from .baselines import attrirank, pagerank, weighted_pagerank
from .expected_force import expected_force_all
from .hnr import HnrParams, hnr_rank


@dataclass
class RankingInputs:
    """Everything a ranker may read."""

    graph: WeightedDigraph
    attrs: Optional[AttributeMatrix] = None
    groups: Optional[GroupAssignment] = None
    params: Optional[HnrParams] = None


class RankerBase(ABC):
    """Base class for ranking strategies."""

    name: str = ""
    requires_attributes: bool = False
    requires_params: bool = False

    def __init__(self, config: RankingConfig, threads: int = 1):
        self.config = config
        self.threads = threads

    @abstractmethod
    def score(self, inputs: RankingInputs) -> np.ndarray:
        """Influence score per node index (higher = more influential)."""

    def _require(self, inputs: RankingInputs) -> None:
        if self.requires_attributes and inputs.attrs is None:
            raise ConfigError(f"{self.name} needs node attributes")
        if self.requires_params and (inputs.params is None or inputs.groups is None):
            raise ConfigError(f"{self.name} needs model parameters and a grouping")


class PageRankRanker(RankerBase):
    name = "pagerank"

    def score(self, inputs: RankingInputs) -> np.ndarray:
        cfg = self.config
        return pagerank(inputs.graph, cfg.damping, cfg.tol, cfg.max_iter).scores


class WeightedPageRankRanker(RankerBase):
    name = "wpr"

    def score(self, inputs: RankingInputs) -> np.ndarray:
        cfg = self.config
        return weighted_pagerank(inputs.graph, cfg.damping, cfg.tol, cfg.max_iter).scores


class AttriRankRanker(RankerBase):
    name = "attrirank"
    requires_attributes = True

    def score(self, inputs: RankingInputs) -> np.ndarray:
        self._require(inputs)
        assert inputs.attrs is not None
        cfg = self.config
        return attrirank(
            inputs.graph,
            inputs.attrs,
            gamma=cfg.attrirank_gamma,
            damping_samples=cfg.attrirank_samples,
            seed=cfg.attrirank_seed,
            damping=cfg.attrirank_damping,
            tol=cfg.tol,
            max_iter=cfg.max_iter,
            threads=self.threads,
        ).scores


class ExpectedForceRanker(RankerBase):
    """ExF of every node; NaN marks nodes whose neighbourhood is too small."""

    name = "exf"

    def score(self, inputs: RankingInputs) -> np.ndarray:
        return expected_force_all(inputs.graph)


class HnrRanker(RankerBase):
    name = "hnr"
    requires_attributes = True
    requires_params = True

    def score(self, inputs: RankingInputs) -> np.ndarray:
        self._require(inputs)
        assert inputs.attrs is not None and inputs.groups is not None and inputs.params is not None
        cfg = self.config
        return hnr_rank(
            inputs.graph, inputs.attrs, inputs.groups, inputs.params, cfg.tol, cfg.max_iter
        ).scores


RANKERS: Dict[str, Type[RankerBase]] = {
    cls.name: cls
    for cls in (PageRankRanker, WeightedPageRankRanker, AttriRankRanker, ExpectedForceRanker, HnrRanker)
}


def get_ranker(name: str, config: RankingConfig, threads: int = 1) -> RankerBase:
    """Instantiate a ranker strategy by name."""
    try:
        return RANKERS[name](config, threads)
    except KeyError:
        raise ConfigError(
            f"Unknown ranking algorithm {name!r}; choose one of {', '.join(RANKERS)}"
        ) from None
