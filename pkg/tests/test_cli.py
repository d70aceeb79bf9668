"""Tests for the command line interface."""

import csv
import json
import tempfile
from pathlib import Path

import numpy as np
import pytest
from typer.testing import CliRunner

from hnrank.calibration import load_model
from hnrank.cli import app
from hnrank.graph import assign_groups_default
from hnrank.loaders import read_attributes, read_edges, read_json
from hnrank.rankers import hnr_rank

runner = CliRunner()

QUICK_CONFIG = "calibration:\n  population: 8\n  generations: 3\nevaluation:\n  repeats: 2\n"


def write(directory, name, text):
    path = Path(directory) / name
    path.write_text(text, encoding='utf-8')
    return path


def read_csv(path):
    with open(path, newline='', encoding='utf-8') as f:
        return list(csv.DictReader(f))


def synth(tmpdir):
    """Synthetic dataset plus a quick config inside tmpdir."""
    config = write(tmpdir, "config.yaml", QUICK_CONFIG)
    result = runner.invoke(app, [
        "--out-dir", str(tmpdir), "--config", str(config), "--quiet",
        "synth", "--nodes", "40", "--groups", "2", "--attrs", "2", "--seed", "1",
    ])
    assert result.exit_code == 0, result.output
    return config


def dataset_args(tmpdir):
    tmp = Path(tmpdir)
    return [
        "--edges", str(tmp / "edges.csv"),
        "--attrs", str(tmp / "attributes.csv"),
        "--labels", str(tmp / "labels.csv"),
    ]


class TestRankCommand:
    """Test the rank command."""

    def test_pagerank_zero_damping(self):
        """Test that --damping 0 gives 1/N for every node."""
        with tempfile.TemporaryDirectory() as tmpdir:
            edges = write(tmpdir, "e.csv", "source,target,weight\na,b,1\nb,c,2\nc,a,1\na,c,1\n")
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "rank", "--algo", "pagerank", "--edges", str(edges), "--damping", "0",
            ])
            assert result.exit_code == 0, result.output

            rows = read_csv(Path(tmpdir) / "ranks.csv")
            assert [row['node_id'] for row in rows] == ["a", "b", "c"]
            assert all(float(row['score']) == pytest.approx(1 / 3) for row in rows)
            assert (Path(tmpdir) / "ranks.csv.manifest.json").exists()

    def test_exf_single_node(self):
        """Test ExF of the end of a path."""
        with tempfile.TemporaryDirectory() as tmpdir:
            edges = write(tmpdir, "path3.csv", "source,target,weight\na,b,1\nb,c,1\n")
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "rank", "--algo", "exf", "--edges", str(edges), "--node", "a",
            ])
            assert result.exit_code == 0, result.output
            assert (Path(tmpdir) / "exf.csv").read_text() == "node_id,exf\na,0\n"

    def test_exf_insufficient_neighbourhood(self):
        """Test that an undefined single-node ExF is a data error."""
        with tempfile.TemporaryDirectory() as tmpdir:
            edges = write(tmpdir, "e.csv", "source,target,weight\na,b,1\n")
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "rank", "--algo", "exf", "--edges", str(edges), "--node", "a",
            ])
            assert result.exit_code == 3

    def test_missing_attributes(self):
        """Test that attrirank without --attrs is a usage error."""
        with tempfile.TemporaryDirectory() as tmpdir:
            edges = write(tmpdir, "e.csv", "source,target,weight\na,b,1\n")
            result = runner.invoke(app, ["rank", "--algo", "attrirank", "--edges", str(edges)])
            assert result.exit_code == 2

    def test_unknown_algorithm(self):
        """Test that an unknown ranker is a usage error."""
        with tempfile.TemporaryDirectory() as tmpdir:
            edges = write(tmpdir, "e.csv", "source,target,weight\na,b,1\n")
            result = runner.invoke(app, ["--out-dir", tmpdir, "rank", "--algo", "hits", "--edges", str(edges)])
            assert result.exit_code == 2

    def test_missing_edge_file(self):
        """Test that a missing input file exits with the data code."""
        result = runner.invoke(app, ["rank", "--algo", "pagerank", "--edges", "/nonexistent/e.csv"])
        assert result.exit_code == 3

    def test_negative_weight(self):
        """Test that a bad edge row exits with the data code."""
        with tempfile.TemporaryDirectory() as tmpdir:
            edges = write(tmpdir, "e.csv", "source,target,weight\na,b,1\nb,c,-4\n")
            result = runner.invoke(app, ["--out-dir", tmpdir, "rank", "--algo", "pagerank", "--edges", str(edges)])
            assert result.exit_code == 3
            assert not (Path(tmpdir) / "ranks.csv").exists()

    def test_undecodable_edges(self):
        """Test that a non-UTF-8 edge file exits with the data code and names the file."""
        with tempfile.TemporaryDirectory() as tmpdir:
            edges = Path(tmpdir) / "bad.csv"
            edges.write_bytes(b"source,target,weight\n\xff\xfe,b,1\n")
            result = runner.invoke(app, ["--out-dir", tmpdir, "rank", "--algo", "pagerank", "--edges", str(edges)])
            assert result.exit_code == 3
            assert "bad.csv" in result.output

    def test_convergence_failure(self):
        """Test that non-convergence exits with code 4."""
        with tempfile.TemporaryDirectory() as tmpdir:
            edges = write(tmpdir, "e.csv", "source,target,weight\na,b,1\nb,c,1\n")
            config = write(tmpdir, "config.yaml", "ranking:\n  max_iter: 1\n")
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "--config", str(config),
                "rank", "--algo", "pagerank", "--edges", str(edges),
            ])
            assert result.exit_code == 4

    def test_missing_config(self):
        """Test that a missing config file is a config error."""
        result = runner.invoke(app, ["--config", "/nonexistent/config.yaml", "htbreaks", "--values", "v.csv"])
        assert result.exit_code == 2


class TestCalibrateCommand:
    """Test calibration and model round trips."""

    def test_model_round_trip(self):
        """Test that rank --algo hnr reproduces the calibrated model's scores."""
        with tempfile.TemporaryDirectory() as tmpdir:
            tmp = Path(tmpdir)
            config = synth(tmpdir)
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "--config", str(config), "--quiet", "calibrate", *dataset_args(tmpdir),
            ])
            assert result.exit_code == 0, result.output

            result = runner.invoke(app, [
                "--out-dir", tmpdir, "--quiet", "rank", "--algo", "hnr",
                "--edges", str(tmp / "edges.csv"), "--attrs", str(tmp / "attributes.csv"),
                "--params", str(tmp / "model.json"),
            ])
            assert result.exit_code == 0, result.output

            graph = read_edges(tmp / "edges.csv")
            attrs = read_attributes(tmp / "attributes.csv", graph)
            params, meta = load_model(read_json(tmp / "model.json"))
            groups = assign_groups_default(graph, max_levels=meta['grouping']['max_levels'])
            expected = hnr_rank(graph, attrs, groups, params).scores
            scores = np.array([float(row['score']) for row in read_csv(tmp / "ranks.csv")])
            np.testing.assert_allclose(scores, expected, rtol=1e-10)

    def test_seeded_runs_identical(self):
        """Test that --seed 7 twice gives byte-identical models."""
        with tempfile.TemporaryDirectory() as tmpdir:
            tmp = Path(tmpdir)
            config = synth(tmpdir)
            for name in ("first.json", "second.json"):
                result = runner.invoke(app, [
                    "--config", str(config), "--quiet", "calibrate", *dataset_args(tmpdir),
                    "--seed", "7", "--output", str(tmp / name),
                ])
                assert result.exit_code == 0, result.output
            assert (tmp / "first.json").read_bytes() == (tmp / "second.json").read_bytes()

    def test_constant_in_strength_single_group(self):
        """Test that auto grouping on a regular graph records K=1."""
        with tempfile.TemporaryDirectory() as tmpdir:
            tmp = Path(tmpdir)
            write(tmpdir, "edges.csv", "source,target,weight\na,b,1\nb,c,1\nc,a,1\n")
            write(tmpdir, "attributes.csv", "node_id,x\na,1\nb,2\nc,4\n")
            write(tmpdir, "labels.csv", "node_id,label\na,0.1\nb,0.5\nc,0.9\n")
            config = write(tmpdir, "config.yaml", QUICK_CONFIG)
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "--config", str(config), "--quiet", "calibrate", *dataset_args(tmpdir),
            ])
            assert result.exit_code == 0, result.output

            model = json.loads((tmp / "model.json").read_text())
            assert model['groups'] == 1
            assert model['grouping'] == {'source': 'auto', 'max_levels': 3}

    def test_every_file_problem_listed(self):
        """Test that attribute and label mismatches are reported together."""
        with tempfile.TemporaryDirectory() as tmpdir:
            write(tmpdir, "edges.csv", "source,target,weight\na,b,1\nb,c,1\nc,a,1\n")
            write(tmpdir, "attributes.csv", "node_id,x\na,1\nb,2\nc,4\nghost_attr,5\n")
            write(tmpdir, "labels.csv", "node_id,label\na,0.1\nb,0.5\nghost_label,0.9\n")
            result = runner.invoke(app, ["--out-dir", tmpdir, "calibrate", *dataset_args(tmpdir)])
            assert result.exit_code == 3
            assert "ghost_attr" in result.output
            assert "ghost_label" in result.output

    def test_history_and_bootstrap(self):
        """Test the history file and bootstrap intervals in the model."""
        with tempfile.TemporaryDirectory() as tmpdir:
            tmp = Path(tmpdir)
            synth(tmpdir)
            config = write(
                tmpdir, "bootstrap.yaml",
                "calibration:\n  population: 8\n  generations: 3\n"
                "  bootstrap_population: 4\n  bootstrap_generations: 1\n",
            )
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "--config", str(config), "--quiet", "calibrate", *dataset_args(tmpdir),
                "--optimizer", "de", "--variant", "e", "--bootstrap", "10",
                "--history", str(tmp / "history.jsonl"),
            ])
            assert result.exit_code == 0, result.output

            model = json.loads((tmp / "model.json").read_text())
            assert model['optimizer'] == "de"
            assert model['variant'] == "e"
            assert set(model['bootstrap']) >= {"d(0)", "a(0)_x1", "a(0)_x2"}
            lines = (tmp / "history.jsonl").read_text().splitlines()
            assert len(lines) == len(model['fitness_history'])

    def test_train_fraction(self):
        """Test calibrating on a fraction of the labels."""
        with tempfile.TemporaryDirectory() as tmpdir:
            tmp = Path(tmpdir)
            config = synth(tmpdir)
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "--config", str(config), "--quiet", "calibrate", *dataset_args(tmpdir),
                "--train-frac", "0.3",
            ])
            assert result.exit_code == 0, result.output
            model = json.loads((tmp / "model.json").read_text())
            assert len(model['train_node_ids']) == 12

    def test_group_file_required_later(self):
        """Test that a model fitted on a group file asks for it again."""
        with tempfile.TemporaryDirectory() as tmpdir:
            tmp = Path(tmpdir)
            config = synth(tmpdir)
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "--config", str(config), "--quiet", "calibrate", *dataset_args(tmpdir),
                "--groups", str(tmp / "groups.csv"), "--train-frac", "0.3",
            ])
            assert result.exit_code == 0, result.output

            common = ["--out-dir", tmpdir, "--quiet", "evaluate",
                      "--edges", str(tmp / "edges.csv"), "--labels", str(tmp / "labels.csv"),
                      "--attrs", str(tmp / "attributes.csv"), "--model", str(tmp / "model.json")]
            assert runner.invoke(app, common).exit_code == 2
            result = runner.invoke(app, [*common, "--groups", str(tmp / "groups.csv"), "--exclude-train"])
            assert result.exit_code == 0, result.output


class TestEvaluationCommands:
    """Test evaluate, cv, sweep, compare and htbreaks."""

    def test_evaluate_baseline(self):
        """Test an unsupervised ranker report."""
        with tempfile.TemporaryDirectory() as tmpdir:
            tmp = Path(tmpdir)
            synth(tmpdir)
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "--quiet", "evaluate", "--algo", "pagerank",
                "--edges", str(tmp / "edges.csv"), "--labels", str(tmp / "labels.csv"),
            ])
            assert result.exit_code == 0, result.output
            report = json.loads((tmp / "report.json").read_text())
            assert report['n_evaluated'] == 40
            assert -1.0 <= report['overall_spearman'] <= 1.0

    def test_evaluate_needs_one_source(self):
        """Test that --model and --algo are exclusive and one is required."""
        with tempfile.TemporaryDirectory() as tmpdir:
            tmp = Path(tmpdir)
            synth(tmpdir)
            args = ["evaluate", "--edges", str(tmp / "edges.csv"), "--labels", str(tmp / "labels.csv")]
            assert runner.invoke(app, args).exit_code == 2
            both = [*args, "--algo", "pagerank", "--model", str(tmp / "hidden_params.json")]
            assert runner.invoke(app, both).exit_code == 2

    def test_cv(self):
        """Test the CV summary file."""
        with tempfile.TemporaryDirectory() as tmpdir:
            tmp = Path(tmpdir)
            config = synth(tmpdir)
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "--config", str(config), "--quiet", "cv", *dataset_args(tmpdir),
                "--train-frac", "0.3", "--repeats", "2",
            ])
            assert result.exit_code == 0, result.output
            summary = json.loads((tmp / "cv.json").read_text())
            assert summary['repeats'] == 2
            assert summary['train_size'] == 12
            assert summary['model'] == "hnr_el"

    def test_cv_split_too_small(self):
        """Test that an impossible split exits with the data code."""
        with tempfile.TemporaryDirectory() as tmpdir:
            config = synth(tmpdir)
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "--config", str(config), "--quiet", "cv", *dataset_args(tmpdir),
                "--train-frac", "0.02",
            ])
            assert result.exit_code == 3

    def test_sweep(self):
        """Test the sweep CSV."""
        with tempfile.TemporaryDirectory() as tmpdir:
            tmp = Path(tmpdir)
            config = synth(tmpdir)
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "--config", str(config), "--quiet", "sweep", *dataset_args(tmpdir),
                "--fractions", "0.3,0.5", "--model", "pagerank",
            ])
            assert result.exit_code == 0, result.output
            rows = read_csv(tmp / "sweep.csv")
            assert [row['fraction'] for row in rows] == ["0.3", "0.5"]

    def test_compare(self):
        """Test the comparison document."""
        with tempfile.TemporaryDirectory() as tmpdir:
            tmp = Path(tmpdir)
            config = synth(tmpdir)
            result = runner.invoke(app, [
                "--out-dir", tmpdir, "--config", str(config), "--quiet", "compare", *dataset_args(tmpdir),
                "--models", "pagerank,wpr,exf",
            ])
            assert result.exit_code == 0, result.output
            data = json.loads((tmp / "compare.json").read_text())
            assert [entry['model'] for entry in data['models']] == ["pagerank", "wpr", "exf"]

    def test_htbreaks_constant(self):
        """Test that constant values give one level with an empty head."""
        with tempfile.TemporaryDirectory() as tmpdir:
            values = write(tmpdir, "v.csv", "node_id,value\na,5\nb,5\nc,5\n")
            result = runner.invoke(app, ["--out-dir", tmpdir, "htbreaks", "--values", str(values)])
            assert result.exit_code == 0, result.output

            data = json.loads((Path(tmpdir) / "htbreaks.json").read_text())
            assert data['depth'] == 1
            assert data['levels'][0]['head'] == []
            assert data['levels'][0]['tail'] == ["a", "b", "c"]

    def test_htbreaks_bad_cap(self):
        """Test that the head fraction cap is range checked."""
        with tempfile.TemporaryDirectory() as tmpdir:
            values = write(tmpdir, "v.csv", "value\n1\n2\n")
            result = runner.invoke(app, ["htbreaks", "--values", str(values), "--cap", "1.5"])
            assert result.exit_code == 2


class TestSynthCommand:
    """Test dataset generation."""

    def test_files(self):
        """Test that every dataset file and the manifest are written."""
        with tempfile.TemporaryDirectory() as tmpdir:
            tmp = Path(tmpdir)
            synth(tmpdir)
            for name in ("edges.csv", "attributes.csv", "labels.csv", "groups.csv",
                         "hidden_params.json", "synth.manifest.json"):
                assert (tmp / name).exists(), name
            hidden = json.loads((tmp / "hidden_params.json").read_text())
            assert hidden['attribute_names'] == ["x1", "x2"]
            assert len(read_csv(tmp / "labels.csv")) == 40

    def test_invalid_dimensions(self):
        """Test that bad dimensions are a config error."""
        with tempfile.TemporaryDirectory() as tmpdir:
            result = runner.invoke(app, ["--out-dir", tmpdir, "synth", "--nodes", "5"])
            assert result.exit_code == 2

    @pytest.mark.slow
    def test_end_to_end_pipeline(self):
        """Test synth, calibrate and evaluate on 300 nodes."""
        with tempfile.TemporaryDirectory() as tmpdir:
            tmp = Path(tmpdir)
            base = ["--out-dir", tmpdir, "--quiet"]
            assert runner.invoke(app, [*base, "synth", "--nodes", "300", "--groups", "2",
                                       "--attrs", "3", "--seed", "1"]).exit_code == 0
            assert runner.invoke(app, [*base, "calibrate", *dataset_args(tmpdir)]).exit_code == 0
            result = runner.invoke(app, [
                *base, "evaluate", "--edges", str(tmp / "edges.csv"), "--labels", str(tmp / "labels.csv"),
                "--attrs", str(tmp / "attributes.csv"), "--model", str(tmp / "model.json"),
            ])
            assert result.exit_code == 0, result.output
            report = json.loads((tmp / "report.json").read_text())
            assert report['overall_spearman'] >= 0.95
