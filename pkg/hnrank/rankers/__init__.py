"""Ranking algorithms built on one fixed-point engine."""

from .baselines import attrirank, pagerank, weighted_pagerank, wpr_transition
from .engine import RankVector, TeleportVector, fixed_point_rank
from .expected_force import expected_force, expected_force_all
from .hnr import HnrParams, hnr_rank, teleport_from_attributes
from .strategies import RANKERS, RankerBase, RankingInputs, get_ranker

__all__ = [
    'RankVector',
    'TeleportVector',
    'fixed_point_rank',
    'HnrParams',
    'teleport_from_attributes',
    'hnr_rank',
    'pagerank',
    'weighted_pagerank',
    'wpr_transition',
    'attrirank',
    'expected_force',
    'expected_force_all',
    'RankerBase',
    'RankingInputs',
    'RANKERS',
    'get_ranker',
]
