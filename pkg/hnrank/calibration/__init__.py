"""Supervised calibration of HnrParams by evolutionary search."""

from .chromosome import CalibrationProblem, decode_chromosome, decode_variant, encode_params, gene_count
from .manager import (
    CalibrationResult,
    bootstrap_coefficients,
    calibrate,
    de_optimize,
    export_model,
    ga_optimize,
    load_model,
)
from .objective import fitness, loss
from .optimizers import OPTIMIZERS, DifferentialEvolutionOptimizer, GeneticOptimizer, get_optimizer

__all__ = [
    'CalibrationProblem',
    'decode_chromosome',
    'decode_variant',
    'encode_params',
    'gene_count',
    'CalibrationResult',
    'calibrate',
    'ga_optimize',
    'de_optimize',
    'bootstrap_coefficients',
    'export_model',
    'load_model',
    'loss',
    'fitness',
    'OPTIMIZERS',
    'GeneticOptimizer',
    'DifferentialEvolutionOptimizer',
    'get_optimizer',
]
