"""Tests for the synthetic dataset generator."""

import numpy as np
import pytest

from hnrank.errors import ConfigError
from hnrank.evaluation.metrics import spearman
from hnrank.evaluation.synthetic import (
    SYNTHETIC_MAX_ITER,
    degree_summary,
    generate_synthetic,
    preferential_attachment_edges,
)
from hnrank.rankers import hnr_rank


class TestGenerateSynthetic:
    """Test synthetic datasets with known parameters."""

    def test_noiseless_labels_self_consistent(self):
        """Test that labels rank exactly like the hidden-parameter scores."""
        data = generate_synthetic(100, K=2, m=3, seed=1)
        scores = hnr_rank(data.graph, data.attrs, data.groups, data.params, max_iter=SYNTHETIC_MAX_ITER).scores
        assert spearman(scores[data.labels.nodes], data.labels.values) == pytest.approx(1.0, abs=1e-12)

    def test_deterministic(self):
        """Test that the same seed gives an identical dataset."""
        first = generate_synthetic(60, K=3, m=2, seed=4, noise_sd=0.05)
        second = generate_synthetic(60, K=3, m=2, seed=4, noise_sd=0.05)

        assert first.graph.node_ids == second.graph.node_ids
        np.testing.assert_array_equal(first.graph.weights, second.graph.weights)
        np.testing.assert_array_equal(first.raw_attributes, second.raw_attributes)
        np.testing.assert_array_equal(first.groups.group_of, second.groups.group_of)
        np.testing.assert_array_equal(first.params.damping, second.params.damping)
        np.testing.assert_array_equal(first.labels.values, second.labels.values)

    def test_seed_changes_dataset(self):
        """Test that different seeds differ."""
        first = generate_synthetic(60, K=2, m=2, seed=1)
        second = generate_synthetic(60, K=2, m=2, seed=2)
        assert not np.array_equal(first.labels.values, second.labels.values)

    def test_dimensions(self):
        """Test shapes of every component."""
        data = generate_synthetic(50, K=3, m=4, seed=0)
        assert data.graph.node_count == 50
        assert data.attrs.values.shape == (50, 4)
        assert data.attrs.attribute_names == ("x1", "x2", "x3", "x4")
        assert 1 <= data.groups.K <= 3
        assert data.params.groups == data.groups.K
        assert len(data.labels) == 50
        assert np.all(data.params.damping <= 0.99)

    def test_single_group(self):
        """Test that K=1 puts every node in group 0."""
        data = generate_synthetic(30, K=1, m=1, seed=0)
        assert data.groups.K == 1
        assert data.params.damping.shape == (1,)

    def test_noise_added(self):
        """Test that noise moves labels off the [0, 1] scaled scores."""
        clean = generate_synthetic(80, K=2, m=2, seed=6)
        noisy = generate_synthetic(80, K=2, m=2, seed=6, noise_sd=0.1)
        assert noisy.noise_sd == 0.1
        assert not np.array_equal(clean.labels.values, noisy.labels.values)
        assert clean.labels.values.min() == 0.0 and clean.labels.values.max() == 1.0

    def test_invalid_dimensions(self):
        """Test that every bad dimension is named."""
        with pytest.raises(ConfigError) as excinfo:
            generate_synthetic(5, K=6, m=0)
        message = str(excinfo.value)
        assert "n_nodes" in message and "K must" in message and "m must" in message

    def test_negative_noise(self):
        """Test that noise sd must be non-negative."""
        with pytest.raises(ConfigError):
            generate_synthetic(20, K=1, m=1, noise_sd=-1.0)

    def test_heavy_tail(self):
        """Test max degree >= 5x median degree at n=300 over 10 seeds."""
        for seed in range(10):
            rng = np.random.default_rng(seed)
            records = preferential_attachment_edges(rng, 300)
            degrees = {}
            for source, target, _ in records:
                degrees[source] = degrees.get(source, 0) + 1
                degrees[target] = degrees.get(target, 0) + 1
            values = np.array(list(degrees.values()))
            assert values.max() >= 5 * np.median(values)


class TestPreferentialAttachment:
    """Test the graph growth model."""

    def test_every_node_linked(self):
        """Test that each node appears and weights lie in [1, 10]."""
        records = preferential_attachment_edges(np.random.default_rng(0), 50, edges_per_node=2)
        nodes = {s for s, _, _ in records} | {t for _, t, _ in records}
        assert len(nodes) == 50
        assert all(1.0 <= w <= 10.0 for _, _, w in records)

    def test_no_reciprocity(self):
        """Test that reciprocity 0 gives exactly edges_per_node links per new node."""
        records = preferential_attachment_edges(np.random.default_rng(0), 40, edges_per_node=3, reciprocity=0.0)
        assert len(records) == 4 + 36 * 3

    def test_zero_padded_names(self):
        """Test that node names sort in creation order."""
        records = preferential_attachment_edges(np.random.default_rng(0), 120)
        assert records[0][0] == "n000"

    def test_degree_summary(self):
        """Test the degree summary keys."""
        data = generate_synthetic(40, K=1, m=1, seed=0)
        summary = degree_summary(data.graph)
        assert set(summary) == {'max_degree', 'median_degree'}
        assert summary['max_degree'] >= summary['median_degree']
