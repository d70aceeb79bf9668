"""Tests for metrics and the train/test protocols."""

import numpy as np
import pytest

from hnrank.config import Config, PartitionOn
from hnrank.errors import ConfigError, DataValidationError, UndefinedCorrelationError
from hnrank.evaluation.metrics import head_tail_breaks, ht_level_report, spearman, spearman_p_value
from hnrank.evaluation.protocols import (
    MODEL_NAMES,
    _strata,
    check_split,
    compare_models,
    cross_validate,
    held_out_spearman,
    sample_size_sweep,
    split_labels,
    train_size,
)
from hnrank.evaluation.synthetic import generate_synthetic
from hnrank.graph import LabelSet
from hnrank.rankers import RankVector


def fractional_ranks(values):
    """1-based ranks with tied values sharing the mean of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return np.array(ranks)


def spearman_oracle(x, y):
    return float(np.corrcoef(fractional_ranks(list(x)), fractional_ranks(list(y)))[0, 1])


def quick_config(**evaluation):
    return Config(
        calibration={'population': 8, 'generations': 3, 'seed': 2},
        evaluation={'repeats': 3, **evaluation},
    )


@pytest.fixture(scope="module")
def dataset():
    return generate_synthetic(40, K=2, m=2, seed=5)


class TestSpearman:
    """Test the rank correlation."""

    def test_identity(self):
        """Test x = y."""
        assert spearman([1, 2, 3], [1, 2, 3]) == 1.0

    def test_reversal(self):
        """Test exact reversal."""
        assert spearman([1, 2, 3], [3, 2, 1]) == -1.0

    def test_ties(self):
        """Test (1,2,2,4) against (1,3,2,4)."""
        expected = 4.5 / np.sqrt(4.5 * 5.0)
        assert spearman([1, 2, 2, 4], [1, 3, 2, 4]) == pytest.approx(expected, abs=1e-12)

    def test_matches_oracle(self):
        """Test random vectors with injected ties against rank-then-Pearson."""
        rng = np.random.default_rng(0)
        for _ in range(300):
            n = int(rng.integers(3, 30))
            x = rng.integers(0, 8, size=n).astype(float)
            y = rng.normal(size=n)
            y[: n // 3] = y[0]
            if np.ptp(x) == 0 or np.ptp(y) == 0:
                continue
            assert spearman(x, y) == pytest.approx(spearman_oracle(x, y), abs=1e-12)

    def test_monotone_invariance(self):
        """Test that a strictly increasing transform leaves rho unchanged."""
        rng = np.random.default_rng(1)
        x, y = rng.uniform(size=50), rng.uniform(size=50)
        assert spearman(np.exp(x), y) == spearman(x, y)

    def test_constant_input(self):
        """Test that a constant vector has no correlation."""
        with pytest.raises(UndefinedCorrelationError):
            spearman([1, 1, 1], [1, 2, 3])

    def test_length_mismatch(self):
        """Test unequal lengths."""
        with pytest.raises(DataValidationError):
            spearman([1, 2, 3], [1, 2])

    def test_p_value(self):
        """Test the t-approximation edge cases."""
        assert spearman_p_value(1.0, 5) == 0.0
        assert spearman_p_value(0.5, 2) is None
        assert 0.0 < spearman_p_value(0.3, 20) < 1.0


class TestHeadTailBreaks:
    """Test recursive mean splitting."""

    def test_constant_values(self):
        """Test that constant data has a single level with an empty head."""
        partition = head_tail_breaks([5, 5, 5, 5])
        assert partition.depth == 1
        assert partition.levels[0].head.size == 0
        np.testing.assert_array_equal(partition.levels[0].tail, [0, 1, 2, 3])

    def test_hand_partition(self):
        """Test (1,1,1,2,10)."""
        partition = head_tail_breaks([1, 1, 1, 2, 10])
        assert partition.depth == 1
        np.testing.assert_array_equal(partition.levels[0].head, [4])
        np.testing.assert_array_equal(partition.levels[0].tail, [0, 1, 2, 3])
        assert partition.levels[0].mean == 3.0

    def test_pareto_properties(self):
        """Test head fractions, head means and nesting on a Pareto sample."""
        values = np.random.default_rng(2).pareto(1.2, size=1000) + 1.0
        partition = head_tail_breaks(values)
        assert partition.depth >= 2

        parent = np.arange(values.size)
        for level in partition.levels:
            assert level.head.size / parent.size <= 0.4
            assert values[level.head].mean() > values[parent].mean()
            assert sorted(np.concatenate([level.head, level.tail])) == sorted(parent)
            parent = level.head

    def test_max_levels(self):
        """Test the level limit."""
        values = np.random.default_rng(3).pareto(1.2, size=1000) + 1.0
        assert head_tail_breaks(values, max_levels=1).depth == 1

    def test_too_few_values(self):
        """Test the minimum input size."""
        with pytest.raises(DataValidationError):
            head_tail_breaks([1.0])


class TestHtLevelReport:
    """Test ht-level performance reports."""

    def test_monotone_link(self):
        """Test that scores proportional to labels give 1.0 everywhere."""
        values = np.random.default_rng(4).pareto(1.5, size=200) + 1.0
        labels = LabelSet(nodes=np.arange(200), values=values)
        report = ht_level_report(RankVector.from_scores(values * 3.0), labels)

        assert report.overall_spearman == pytest.approx(1.0)
        assert report.per_ht_head and report.per_ht_tail
        for value in list(report.per_ht_head.values()) + list(report.per_ht_tail.values()):
            assert value == pytest.approx(1.0)

    def test_small_part_absent(self):
        """Test that a 2-member head is left out."""
        values = np.array([1, 2, 3, 4, 5, 6, 7, 8, 50, 60], dtype=float)
        labels = LabelSet(nodes=np.arange(10), values=values)
        report = ht_level_report(values, labels)

        assert report.per_ht_head == {}
        assert list(report.per_ht_tail) == [1]
        assert report.part_sizes == {'tail1': 8}

    def test_tied_part_undefined(self):
        """Test that a part with constant labels is kept as None."""
        values = np.array([1, 1, 1, 1, 1, 1, 10, 20], dtype=float)
        labels = LabelSet(nodes=np.arange(8), values=values)
        scores = np.arange(8, dtype=float)
        report = ht_level_report(scores, labels)

        assert report.overall_spearman > 0.0
        assert report.per_ht_tail == {1: None}
        assert report.part_sizes == {'tail1': 6}
        assert report.to_dict()['per_ht'] == [{'level': 1, 'part': 'tail', 'n': 6, 'spearman': None}]

    @pytest.mark.slow
    def test_noisier_head_scores_lower(self):
        """Test that label noise concentrated on influential nodes shows up as head < tail."""
        lower = 0
        for seed in range(10):
            data = generate_synthetic(300, K=2, m=3, seed=seed)
            truth = data.labels.values
            rng = np.random.default_rng(seed)
            spread = np.where(truth > truth.mean(), 0.5, 0.05)
            noisy = truth * np.exp(rng.normal(0.0, spread))
            report = ht_level_report(truth, LabelSet(nodes=data.labels.nodes, values=noisy))
            if report.per_ht_head[1] < report.per_ht_tail[1]:
                lower += 1
        assert lower >= 7

    def test_nan_scores_excluded(self):
        """Test that undefined scores drop out of the evaluation."""
        scores = np.array([np.nan, 1.0, 2.0, 3.0, 4.0])
        labels = LabelSet(nodes=np.arange(5), values=np.array([9.0, 1.0, 2.0, 3.0, 5.0]))
        report = ht_level_report(scores, labels)
        assert report.n_evaluated == 4
        assert report.overall_spearman == pytest.approx(1.0)

    def test_partition_on_scores(self):
        """Test splitting on predicted scores instead of labels."""
        rng = np.random.default_rng(5)
        values = rng.pareto(1.5, size=100) + 1.0
        labels = LabelSet(nodes=np.arange(100), values=values + rng.normal(0, 0.1, 100))
        report = ht_level_report(values, labels, PartitionOn.SCORES)
        sizes = sum(size for part, size in report.part_sizes.items() if part == 'head1' or part == 'tail1')
        assert sizes == 100

    def test_report_dict(self):
        """Test the report document layout."""
        values = np.arange(1.0, 11.0)
        labels = LabelSet(nodes=np.arange(10), values=values)
        data = ht_level_report(values, labels).to_dict()

        assert set(data) == {'overall_spearman', 'p_value', 'per_ht', 'n_evaluated'}
        assert data['per_ht'][0] == {'level': 1, 'part': 'head', 'n': 5, 'spearman': pytest.approx(1.0)}

    def test_too_few_nodes(self):
        """Test that fewer than 3 evaluated nodes is rejected."""
        labels = LabelSet(nodes=np.array([0, 1]), values=np.array([1.0, 2.0]))
        with pytest.raises(DataValidationError):
            ht_level_report(np.array([1.0, 2.0, 3.0]), labels)


class TestSplits:
    """Test label splitting."""

    def test_train_size_rounding(self):
        """Test 0.3 of 272 labels -> 82."""
        assert train_size(272, 0.3) == 82
        assert train_size(10, 0.25) == 3

    def test_split_too_small(self):
        """Test that either side below 3 is rejected."""
        with pytest.raises(DataValidationError):
            check_split(8, 0.2)
        with pytest.raises(DataValidationError):
            check_split(8, 0.9)
        with pytest.raises(ConfigError):
            check_split(100, 1.0)

    def test_disjoint_union(self):
        """Test that train and test partition the label set."""
        labels = LabelSet(nodes=np.arange(100, 150), values=np.random.default_rng(0).normal(size=50))
        for seed in range(5):
            train, test = split_labels(labels, 0.3, seed)
            assert len(train) == 15 and len(test) == 35
            assert not set(train.nodes) & set(test.nodes)
            assert set(train.nodes) | set(test.nodes) == set(labels.nodes)

    def test_seeded(self):
        """Test that a split depends only on its seed."""
        labels = LabelSet(nodes=np.arange(30), values=np.arange(30.0))
        first, _ = split_labels(labels, 0.5, 9)
        second, _ = split_labels(labels, 0.5, 9)
        np.testing.assert_array_equal(first.nodes, second.nodes)

    def test_stratified(self):
        """Test that stratified splits keep the size and cover every stratum."""
        values = np.random.default_rng(1).pareto(1.5, size=60) + 1.0
        labels = LabelSet(nodes=np.arange(60), values=values)
        train, test = split_labels(labels, 0.5, 3, stratify=True)

        assert len(train) == 30
        partition = head_tail_breaks(values)
        head = partition.levels[0].head
        picked = np.isin(head, train.nodes).sum()
        # Each stratum inside the head is off by at most one.
        assert abs(picked - head.size / 2) <= partition.depth

    def test_stratified_quotas_exact(self):
        """Test that each stratum gets the floor or ceiling of its share on a large label set."""
        n = 100_003
        values = np.random.default_rng(4).pareto(1.2, size=n) + 1.0
        labels = LabelSet(nodes=np.arange(n), values=values)
        train, _ = split_labels(labels, 0.3, 6, stratify=True)

        size = train_size(n, 0.3)
        assert len(train) == size
        stratum = _strata(labels, 0.4, 2)
        in_train = np.isin(np.arange(n), train.nodes)
        for s in np.unique(stratum):
            members = int((stratum == s).sum())
            low, rest = divmod(members * size, n)
            picked = int(in_train[stratum == s].sum())
            assert picked in (low, low + (rest > 0))

    def test_held_out_spearman_skips_nan(self):
        """Test that test nodes without a score are skipped."""
        test = LabelSet(nodes=np.array([0, 1, 2, 3]), values=np.array([1.0, 2.0, 3.0, 4.0]))
        scores = np.array([np.nan, 0.1, 0.2, 0.3])
        assert held_out_spearman(scores, test) == pytest.approx(1.0)


class TestCrossValidation:
    """Test repeated train/test evaluation."""

    def test_deterministic(self, dataset):
        """Test that the same seed gives an identical summary."""
        config = quick_config()
        first = cross_validate(dataset.graph, dataset.attrs, dataset.groups, dataset.labels, config, seed=4)
        second = cross_validate(dataset.graph, dataset.attrs, dataset.groups, dataset.labels, config, seed=4)
        assert first == second
        assert first.repeats == 3
        assert first.train_size == 12
        assert first.mean == pytest.approx(np.mean(first.per_repeat), abs=1e-12)

    def test_unsupervised_model(self, dataset):
        """Test a baseline that needs no calibration."""
        summary = cross_validate(
            dataset.graph, dataset.attrs, dataset.groups, dataset.labels, quick_config(),
            model="pagerank", repeats=1,
        )
        assert summary.model == "pagerank"
        assert summary.sd == 0.0
        assert -1.0 <= summary.mean <= 1.0

    def test_split_checked_first(self, dataset):
        """Test that a too small split fails before calibrating."""
        labels = dataset.labels.subset(np.arange(5))
        with pytest.raises(DataValidationError):
            cross_validate(dataset.graph, dataset.attrs, dataset.groups, labels, quick_config())

    def test_unknown_model(self, dataset):
        """Test that model names are checked."""
        with pytest.raises(ConfigError):
            cross_validate(
                dataset.graph, dataset.attrs, dataset.groups, dataset.labels, quick_config(), model="hits"
            )

    def test_summary_dict(self, dataset):
        """Test the CV document."""
        summary = cross_validate(
            dataset.graph, dataset.attrs, dataset.groups, dataset.labels, quick_config(),
            model="wpr", repeats=2,
        )
        data = summary.to_dict()
        assert data['model'] == "wpr"
        assert len(data['per_repeat']) == 2
        assert data['train_fraction'] == 0.3

    @pytest.mark.slow
    def test_noiseless_synthetic_recovered(self):
        """Test that calibration on exact labels generalizes to held-out nodes."""
        data = generate_synthetic(300, K=2, m=3, seed=1)
        summary = cross_validate(data.graph, data.attrs, data.groups, data.labels, Config(), repeats=3)
        assert summary.mean >= 0.95

    @pytest.mark.slow
    @pytest.mark.parametrize("optimizer", ["ga", "de"])
    def test_recovery_across_seeds(self, optimizer):
        """Test held-out Spearman >= 0.95 on 70% of the nodes in at least 9 of 10 seeds."""
        recovered = 0
        for seed in range(10):
            data = generate_synthetic(300, K=2, m=3, seed=seed)
            config = Config(calibration={'optimizer': optimizer, 'seed': seed})
            summary = cross_validate(
                data.graph, data.attrs, data.groups, data.labels, config,
                train_fraction=0.3, repeats=1, seed=seed,
            )
            if summary.mean >= 0.95:
                recovered += 1
        assert recovered >= 9

    @pytest.mark.slow
    def test_model_ordering_on_noisy_labels(self):
        """Test el >= e and el >= l >= PageRank in at least 8 of 10 seeds."""
        ordered = 0
        for seed in range(10):
            data = generate_synthetic(300, K=2, m=3, seed=seed, noise_sd=0.05)
            means = {
                model: cross_validate(
                    data.graph, data.attrs, data.groups, data.labels, Config(),
                    repeats=3, seed=seed, model=model,
                ).mean
                for model in ("hnr_el", "hnr_e", "hnr_l", "pagerank")
            }
            if means['hnr_el'] >= means['hnr_e'] and means['hnr_el'] >= means['hnr_l'] >= means['pagerank']:
                ordered += 1
        assert ordered >= 8


class TestSweep:
    """Test sample-size sweeps."""

    def test_shape(self, dataset):
        """Test one finite row per fraction."""
        rows = sample_size_sweep(
            dataset.graph, dataset.attrs, dataset.groups, dataset.labels, quick_config(),
            fractions=[0.3, 0.5, 0.7], repeats=2, model="pagerank",
        )
        assert [row.fraction for row in rows] == [0.3, 0.5, 0.7]
        assert all(-1.0 <= row.mean_spearman <= 1.0 for row in rows)

    def test_single_fraction(self, dataset):
        """Test that a one-fraction sweep equals cross-validation."""
        config = quick_config()
        rows = sample_size_sweep(
            dataset.graph, dataset.attrs, dataset.groups, dataset.labels, config,
            fractions=[0.5], seed=8,
        )
        summary = cross_validate(
            dataset.graph, dataset.attrs, dataset.groups, dataset.labels, config,
            train_fraction=0.5, seed=8,
        )
        assert rows[0].mean_spearman == summary.mean
        assert rows[0].sd_spearman == summary.sd

    def test_fractions_checked_up_front(self, dataset):
        """Test that one invalid fraction fails the whole sweep."""
        with pytest.raises(DataValidationError):
            sample_size_sweep(
                dataset.graph, dataset.attrs, dataset.groups, dataset.labels, quick_config(),
                fractions=[0.5, 0.99],
            )

    @pytest.mark.slow
    def test_more_labels_help(self):
        """Test mean Spearman over 5 seeds rising from 0.1 to 0.3 to 0.9."""
        fractions = [0.1, 0.3, 0.9]
        totals = np.zeros(len(fractions))
        for seed in range(5):
            data = generate_synthetic(300, K=2, m=3, seed=seed)
            rows = sample_size_sweep(
                data.graph, data.attrs, data.groups, data.labels, Config(),
                fractions=fractions, repeats=3, seed=seed,
            )
            totals += [row.mean_spearman for row in rows]
        mean_01, mean_03, mean_09 = totals / 5
        assert mean_03 > mean_01
        assert mean_09 > mean_03


class TestCompareModels:
    """Test side-by-side model comparison."""

    def test_compare(self, dataset):
        """Test summaries and reports for a mix of models."""
        comparison = compare_models(
            dataset.graph, dataset.attrs, dataset.groups, dataset.labels, quick_config(repeats=2),
            models=["pagerank", "wpr", "hnr_e"], seed=1,
        )
        data = comparison.to_dict()

        assert [entry['model'] for entry in data['models']] == ["pagerank", "wpr", "hnr_e"]
        for entry in data['models']:
            assert len(entry['per_repeat']) == 2
            assert 'overall_spearman' in entry['ht_report']
        assert data['seed'] == 1

    def test_all_model_names(self):
        """Test the comparable models."""
        assert MODEL_NAMES == ('pagerank', 'wpr', 'attrirank', 'exf', 'hnr_e', 'hnr_l', 'hnr_el')

    def test_unknown_model(self, dataset):
        """Test that unknown names fail before any work."""
        with pytest.raises(ConfigError):
            compare_models(
                dataset.graph, dataset.attrs, dataset.groups, dataset.labels, quick_config(),
                models=["pagerank", "katz"],
            )
