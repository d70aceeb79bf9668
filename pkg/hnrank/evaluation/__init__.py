"""Evaluation metrics, experiment protocols and the synthetic data generator.

Import from the submodules: ``metrics`` (spearman, head/tail breaks, reports),
``protocols`` (cross-validation, sweeps, model comparison) and ``synthetic``.
"""
