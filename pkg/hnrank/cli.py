"""Command line interface for HNRank."""

import functools
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, TypeVar

import typer
from dotenv import load_dotenv
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from .calibration.manager import bootstrap_coefficients, calibrate as run_calibration, export_model, load_model
from .config import DAMPING_CAP, Config, LossKind, OptimizerKind, PartitionOn, Variant, load_config
from .errors import ConfigError, DataValidationError, HnrankError
from .evaluation.metrics import head_tail_breaks, ht_level_report
from .evaluation.protocols import (
    MODEL_NAMES,
    compare_models,
    cross_validate,
    sample_size_sweep,
    split_labels,
    unsupervised_scores,
)
from .evaluation.synthetic import generate_synthetic
from .graph import AttributeMatrix, GroupAssignment, LabelSet, WeightedDigraph, assign_groups_default
from .loaders import (
    read_attributes,
    read_edges,
    read_groups,
    read_json,
    read_labels,
    read_node_files,
    read_values,
    write_attributes,
    write_edges,
    write_exf,
    write_groups,
    write_json,
    write_labels,
    write_ranks,
    write_sweep,
)
from .manifest import RunManifest
from .rankers.engine import RankVector
from .rankers.expected_force import expected_force, expected_force_all
from .rankers.hnr import HnrParams
from .rankers.strategies import RankingInputs, get_ranker
from .utils import STREAM_SPLIT, console, derive_seed, ensure_directory, format_duration, setup_logging

err_console = Console(stderr=True)
app = typer.Typer(
    help="HNRank - node influence ranking with calibratable Hetero-NodeRank",
    no_args_is_help=True,
)

F = TypeVar('F', bound=Callable[..., Any])

SEED_OPTION = typer.Option(None, "--seed", help="Root seed (overrides the global --seed)")
EDGES_OPTION = typer.Option(..., "--edges", help="Edge list CSV: source,target,weight")
ATTRS_OPTION = typer.Option(..., "--attrs", help="Attribute CSV: node_id,<attr>,...")
LABELS_OPTION = typer.Option(..., "--labels", help="Label CSV: node_id,label")
GROUPS_OPTION = typer.Option("auto", "--groups", help="'auto' (head/tail breaks) or a CSV: node_id,group")
OUTPUT_OPTION = typer.Option(None, "--output", "-o", help="Output file (default: inside --out-dir)")


@dataclass
class CliState:
    config: Config
    seed: int
    threads: int
    out_dir: Path
    quiet: bool
    config_path: Optional[str] = None


def handle_errors(func: F) -> F:
    """Report library errors in red and exit with their documented code."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except HnrankError as e:
            err_console.print(f"[red]✗ {escape(str(e))}[/red]")
            raise typer.Exit(e.exit_code) from e

    return wrapper  # type: ignore[return-value]


@app.callback()
def main_options(
    ctx: typer.Context,
    seed: Optional[int] = typer.Option(None, "--seed", help="Root seed for every random stream"),
    threads: int = typer.Option(1, "--threads", min=1, envvar="HNRANK_THREADS", help="Worker threads"),
    out_dir: Path = typer.Option(Path("."), "--out-dir", help="Directory for outputs"),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="Only report warnings and errors"),
    config_path: Optional[str] = typer.Option(
        None, "--config", "-c", envvar="HNRANK_CONFIG", help="Configuration file path"
    ),
) -> None:
    """Rank, calibrate and evaluate node influence on weighted directed networks."""
    try:
        config = load_config(config_path)
    except ConfigError as e:
        err_console.print(f"[red]✗ {escape(str(e))}[/red]")
        raise typer.Exit(e.exit_code) from e

    setup_logging(config.logging.level, config.logging.file, quiet)
    ctx.obj = CliState(
        config=config,
        seed=config.calibration.seed if seed is None else seed,
        threads=threads,
        out_dir=out_dir,
        quiet=quiet,
        config_path=config_path,
    )


def _state(ctx: typer.Context) -> CliState:
    return ctx.obj


def _seed(state: CliState, seed: Optional[int]) -> int:
    return state.seed if seed is None else seed


def _output(state: CliState, output: Optional[Path], default_name: str) -> Path:
    path = output if output is not None else state.out_dir / default_name
    ensure_directory(path.parent)
    return path


def _manifest(state: CliState, command: str, seed: int, inputs: List[Optional[Path]], **parameters: Any) -> RunManifest:
    manifest = RunManifest(
        command=command,
        config=state.config.model_dump(mode='json'),
        seed=seed,
        parameters={key: str(value) if isinstance(value, Path) else value for key, value in parameters.items()},
    )
    for path in inputs:
        manifest.add_input(path)
    return manifest


def _finish(manifest: RunManifest, output: Path) -> None:
    manifest.add_output(output)
    manifest_path = manifest.write(output)
    console.print(f"[green]✓ Wrote {output}[/green] [dim](manifest {manifest_path.name}, {format_duration(manifest.duration_seconds)})[/dim]")


def _resolve_groups(
    groups: str, graph: WeightedDigraph, config: Config, max_levels: Optional[int] = None
) -> Tuple[GroupAssignment, Dict[str, Any]]:
    if groups == "auto":
        levels = config.evaluation.max_levels if max_levels is None else max_levels
        assignment = assign_groups_default(graph, max_levels=levels)
        return assignment, {'source': 'auto', 'max_levels': levels}
    return read_groups(Path(groups), graph), {'source': 'file', 'path': Path(groups).name}


def _load_dataset(
    edges: Path, attrs: Path, labels: Path, groups: str, config: Config
) -> Tuple[WeightedDigraph, AttributeMatrix, GroupAssignment, LabelSet, Dict[str, Any]]:
    graph = read_edges(edges)
    files = read_node_files({
        'attrs': lambda: read_attributes(attrs, graph),
        'labels': lambda: read_labels(labels, graph),
        'groups': lambda: _resolve_groups(groups, graph, config),
    })
    assignment, grouping = files['groups']
    return graph, files['attrs'], assignment, files['labels'], grouping


def _groups_input(groups: str) -> Optional[Path]:
    return None if groups == "auto" else Path(groups)


def _model_groups(
    graph: WeightedDigraph, meta: Dict[str, Any], groups: Optional[str], config: Config
) -> GroupAssignment:
    """Grouping for a saved model: an explicit file, else what the model recorded."""
    grouping = meta.get('grouping') or {'source': 'auto'}
    if groups is not None:
        return _resolve_groups(groups, graph, config, grouping.get('max_levels'))[0]
    if grouping.get('source') == 'file':
        raise typer.BadParameter(
            "the model was calibrated with a group file; pass it again", param_hint="--groups"
        )
    return _resolve_groups("auto", graph, config, grouping.get('max_levels'))[0]


def _check_model_attributes(meta: Dict[str, Any], attrs: AttributeMatrix) -> None:
    names = meta.get('attribute_names')
    if names is not None and list(names) != list(attrs.attribute_names):
        raise DataValidationError(
            "attribute columns differ from the model's",
            [f"model: {', '.join(names)}", f"file: {', '.join(attrs.attribute_names)}"],
        )


def _params_table(params: HnrParams, attribute_names: List[str]) -> Table:
    table = Table(title="Calibrated parameters")
    table.add_column("Group", style="cyan", justify="right")
    table.add_column("d(k)", style="green", justify="right")
    for name in attribute_names:
        table.add_column(f"a_{name}", justify="right")
    for k in range(params.groups):
        table.add_row(
            str(k), f"{params.damping[k]:.4f}", *(f"{w:.4f}" for w in params.attr_weights[k])
        )
    return table


@app.command()
@handle_errors
def rank(
    ctx: typer.Context,
    algo: str = typer.Option(..., "--algo", help="pagerank | wpr | attrirank | exf | hnr"),
    edges: Path = EDGES_OPTION,
    attrs: Optional[Path] = typer.Option(None, "--attrs", help="Attribute CSV (attrirank, hnr)"),
    params: Optional[Path] = typer.Option(None, "--params", help="Model JSON (hnr)"),
    groups: Optional[str] = typer.Option(None, "--groups", help="'auto' or group CSV (hnr)"),
    damping: Optional[float] = typer.Option(None, "--damping", help="Damping for pagerank/wpr, or a fixed AttriRank d"),
    node: Optional[str] = typer.Option(None, "--node", help="Single seed node (exf)"),
    seed: Optional[int] = SEED_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Rank every node with one algorithm."""
    state = _state(ctx)
    config = state.config
    seed = _seed(state, seed)
    if algo in ("attrirank", "hnr") and attrs is None:
        raise typer.BadParameter(f"{algo} needs node attributes", param_hint="--attrs")
    if algo == "hnr" and params is None:
        raise typer.BadParameter("hnr needs a model file", param_hint="--params")
    if damping is not None and not 0.0 <= damping <= DAMPING_CAP:
        raise typer.BadParameter(f"must lie in [0, {DAMPING_CAP}]", param_hint="--damping")

    graph = read_edges(edges)
    attributes = read_attributes(attrs, graph) if attrs is not None else None
    manifest = _manifest(
        state, "rank", seed, [edges, attrs, params, _groups_input(groups) if groups else None],
        algo=algo, damping=damping, node=node,
    )

    if algo == "exf":
        output = _output(state, output, "exf.csv")
        if node is not None:
            write_exf(output, [node], [expected_force(graph, node)])
        else:
            write_exf(output, graph.node_ids, expected_force_all(graph))
        _finish(manifest, output)
        return

    inputs = RankingInputs(graph=graph, attrs=attributes)
    if algo == "hnr":
        assert params is not None and attributes is not None
        inputs.params, meta = load_model(read_json(params))
        _check_model_attributes(meta, attributes)
        inputs.groups = _model_groups(graph, meta, groups, config)
    overrides: Dict[str, Any] = {'attrirank_seed': seed}
    if damping is not None:
        overrides['attrirank_damping' if algo == "attrirank" else 'damping'] = damping
    ranker = get_ranker(algo, config.ranking.model_copy(update=overrides), state.threads)
    ranks = RankVector.from_scores(ranker.score(inputs))

    output = _output(state, output, "ranks.csv")
    write_ranks(output, graph, ranks)
    _finish(manifest, output)


@app.command()
@handle_errors
def calibrate(
    ctx: typer.Context,
    edges: Path = EDGES_OPTION,
    attrs: Path = ATTRS_OPTION,
    labels: Path = LABELS_OPTION,
    groups: str = GROUPS_OPTION,
    optimizer: Optional[OptimizerKind] = typer.Option(None, "--optimizer", help="ga | de"),
    variant: Optional[Variant] = typer.Option(None, "--variant", help="el | e | l"),
    loss: Optional[LossKind] = typer.Option(None, "--loss", help="L1 | L2 | NEG_SPEARMAN"),
    bootstrap: int = typer.Option(0, "--bootstrap", min=0, help="Bootstrap resamples for intervals (0 = off)"),
    train_frac: Optional[float] = typer.Option(None, "--train-frac", help="Calibrate on a seeded fraction of the labels"),
    history: Optional[Path] = typer.Option(None, "--history", help="Append per-generation fitness as JSON lines"),
    seed: Optional[int] = SEED_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Fit HNR parameters to labeled nodes and export a model JSON."""
    state = _state(ctx)
    seed = _seed(state, seed)
    overrides = {
        key: value
        for key, value in (('optimizer', optimizer), ('variant', variant), ('loss', loss))
        if value is not None
    }
    calibration = state.config.calibration.model_copy(update=overrides)

    graph, attributes, assignment, label_set, grouping = _load_dataset(
        edges, attrs, labels, groups, state.config
    )
    if train_frac is not None:
        evaluation = state.config.evaluation
        label_set, _ = split_labels(
            label_set, train_frac, derive_seed(seed, STREAM_SPLIT, 0), evaluation.stratify,
            evaluation.head_fraction_cap, evaluation.min_head_size,
        )
    if history is not None and history.exists():
        history.unlink()

    manifest = _manifest(
        state, "calibrate", seed, [edges, attrs, labels, _groups_input(groups)],
        optimizer=calibration.optimizer.value, variant=calibration.variant.value,
        loss=calibration.loss.value, bootstrap=bootstrap, train_frac=train_frac,
    )
    result = run_calibration(
        graph, attributes, assignment, label_set, calibration,
        seed=seed, threads=state.threads, history_path=history, show_progress=not state.quiet,
    )
    if bootstrap:
        result.bootstrap = bootstrap_coefficients(
            graph, attributes, assignment, label_set, calibration, bootstrap,
            seed=seed, threads=state.threads, show_progress=not state.quiet,
        )

    console.print(_params_table(result.best_params, result.attribute_names))
    console.print(f"Best {result.loss_name} loss: [bold]{result.best_loss:.6f}[/bold] (K={assignment.K})")
    output = _output(state, output, "model.json")
    write_json(output, export_model(result, grouping))
    _finish(manifest, output)


@app.command()
@handle_errors
def evaluate(
    ctx: typer.Context,
    edges: Path = EDGES_OPTION,
    labels: Path = LABELS_OPTION,
    model: Optional[Path] = typer.Option(None, "--model", help="Model JSON from calibrate"),
    algo: Optional[str] = typer.Option(None, "--algo", help="Unsupervised ranker to evaluate instead of a model"),
    attrs: Optional[Path] = typer.Option(None, "--attrs", help="Attribute CSV"),
    groups: Optional[str] = typer.Option(None, "--groups", help="'auto' or group CSV"),
    partition_on: Optional[PartitionOn] = typer.Option(None, "--partition-on", help="labels | scores"),
    exclude_train: bool = typer.Option(False, "--exclude-train", help="Drop the model's training nodes"),
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Spearman of a ranking against labels, overall and per head/tail part."""
    state = _state(ctx)
    config = state.config
    if (model is None) == (algo is None):
        raise typer.BadParameter("give exactly one of --model or --algo", param_hint="--model")
    if model is not None and attrs is None:
        raise typer.BadParameter("a model needs node attributes", param_hint="--attrs")
    if algo == "attrirank" and attrs is None:
        raise typer.BadParameter("attrirank needs node attributes", param_hint="--attrs")

    graph = read_edges(edges)
    readers: Dict[str, Callable[[], Any]] = {'labels': lambda: read_labels(labels, graph)}
    if attrs is not None:
        attrs_path = attrs
        readers['attrs'] = lambda: read_attributes(attrs_path, graph)
    files = read_node_files(readers)
    attributes, label_set = files.get('attrs'), files['labels']
    manifest = _manifest(
        state, "evaluate", state.seed,
        [edges, labels, model, attrs, _groups_input(groups) if groups else None],
        algo=algo, exclude_train=exclude_train,
    )

    if model is not None:
        assert attributes is not None
        params, meta = load_model(read_json(model))
        _check_model_attributes(meta, attributes)
        assignment = _model_groups(graph, meta, groups, config)
        scores = get_ranker("hnr", config.ranking).score(
            RankingInputs(graph=graph, attrs=attributes, groups=assignment, params=params)
        )
        if exclude_train:
            train = set(meta.get('train_node_ids') or [])
            keep = [i for i, node in enumerate(label_set.nodes) if graph.node_ids[node] not in train]
            label_set = label_set.subset(keep)
    else:
        assert algo is not None
        if exclude_train:
            raise typer.BadParameter("only a model records training nodes", param_hint="--exclude-train")
        scores = unsupervised_scores(algo, graph, attributes, config, state.threads)

    evaluation = config.evaluation
    report = ht_level_report(
        scores, label_set, partition_on or evaluation.partition_on,
        evaluation.head_fraction_cap, evaluation.min_head_size,
    )
    console.print(
        f"Overall Spearman: [bold]{report.overall_spearman:.4f}[/bold] on {report.n_evaluated} nodes"
    )
    output = _output(state, output, "report.json")
    write_json(output, report.to_dict())
    _finish(manifest, output)


@app.command()
@handle_errors
def cv(
    ctx: typer.Context,
    edges: Path = EDGES_OPTION,
    attrs: Path = ATTRS_OPTION,
    labels: Path = LABELS_OPTION,
    groups: str = GROUPS_OPTION,
    model: Optional[str] = typer.Option(None, "--model", help=f"One of {', '.join(MODEL_NAMES)}"),
    train_frac: Optional[float] = typer.Option(None, "--train-frac", help="Train fraction per repeat"),
    repeats: Optional[int] = typer.Option(None, "--repeats", min=1, help="Number of random splits"),
    stratify: Optional[bool] = typer.Option(None, "--stratify/--no-stratify", help="Stratify splits by label ht level"),
    seed: Optional[int] = SEED_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Repeated random train/test splits; Spearman on the test side."""
    state = _state(ctx)
    seed = _seed(state, seed)
    graph, attributes, assignment, label_set, _ = _load_dataset(edges, attrs, labels, groups, state.config)
    manifest = _manifest(
        state, "cv", seed, [edges, attrs, labels, _groups_input(groups)],
        model=model, train_frac=train_frac, repeats=repeats, stratify=stratify,
    )
    summary = cross_validate(
        graph, attributes, assignment, label_set, state.config,
        train_fraction=train_frac, repeats=repeats, seed=seed, model=model,
        threads=state.threads, stratify=stratify, show_progress=not state.quiet,
    )
    console.print(
        f"{summary.model}: mean test Spearman [bold]{summary.mean:.4f}[/bold] ± {summary.sd:.4f} "
        f"over {summary.repeats} repeats (train size {summary.train_size})"
    )
    output = _output(state, output, "cv.json")
    write_json(output, summary.to_dict())
    _finish(manifest, output)


def _parse_fractions(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise typer.BadParameter(f"not a comma-separated list of numbers: {text!r}", param_hint="--fractions") from None


@app.command()
@handle_errors
def sweep(
    ctx: typer.Context,
    edges: Path = EDGES_OPTION,
    attrs: Path = ATTRS_OPTION,
    labels: Path = LABELS_OPTION,
    groups: str = GROUPS_OPTION,
    model: Optional[str] = typer.Option(None, "--model", help=f"One of {', '.join(MODEL_NAMES)}"),
    fractions: Optional[str] = typer.Option(None, "--fractions", help="Comma-separated train fractions"),
    repeats: Optional[int] = typer.Option(None, "--repeats", min=1, help="Random splits per fraction"),
    seed: Optional[int] = SEED_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Mean test Spearman as a function of the training fraction."""
    state = _state(ctx)
    seed = _seed(state, seed)
    graph, attributes, assignment, label_set, _ = _load_dataset(edges, attrs, labels, groups, state.config)
    manifest = _manifest(
        state, "sweep", seed, [edges, attrs, labels, _groups_input(groups)],
        model=model, fractions=fractions, repeats=repeats,
    )
    rows = sample_size_sweep(
        graph, attributes, assignment, label_set, state.config,
        fractions=_parse_fractions(fractions), repeats=repeats, seed=seed, model=model,
        threads=state.threads, show_progress=not state.quiet,
    )

    table = Table(title="Sample size sweep")
    table.add_column("Fraction", style="cyan", justify="right")
    table.add_column("Mean Spearman", style="green", justify="right")
    table.add_column("SD", justify="right")
    for row in rows:
        table.add_row(f"{row.fraction:g}", f"{row.mean_spearman:.4f}", f"{row.sd_spearman:.4f}")
    console.print(table)

    output = _output(state, output, "sweep.csv")
    write_sweep(output, rows)
    _finish(manifest, output)


@app.command()
@handle_errors
def htbreaks(
    ctx: typer.Context,
    values: Path = typer.Option(..., "--values", help="CSV with a value column (and optional node_id)"),
    cap: Optional[float] = typer.Option(None, "--cap", help="Largest head fraction that is split again"),
    min_head: Optional[int] = typer.Option(None, "--min-head", min=1, help="Smallest head that is split again"),
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Head/tail breaks of a heavy-tailed value column."""
    state = _state(ctx)
    evaluation = state.config.evaluation
    cap = evaluation.head_fraction_cap if cap is None else cap
    if not 0.0 < cap < 1.0:
        raise typer.BadParameter("must lie in (0, 1)", param_hint="--cap")
    min_head = evaluation.min_head_size if min_head is None else min_head

    ids, data = read_values(values)
    if data.size < 2:
        raise DataValidationError(f"{values.name}: head/tail breaks needs at least 2 values")
    manifest = _manifest(state, "htbreaks", state.seed, [values], cap=cap, min_head=min_head)
    partition = head_tail_breaks(data, cap, min_head)

    levels = []
    for level in partition.levels:
        levels.append({
            'level': level.level,
            'mean': level.mean,
            'head_size': int(level.head.size),
            'tail_size': int(level.tail.size),
            'head': [ids[i] for i in level.head],
            'tail': [ids[i] for i in level.tail],
        })
        console.print(
            f"Level {level.level}: mean {level.mean:.6g}, head {level.head.size}, tail {level.tail.size}"
        )
    output = _output(state, output, "htbreaks.json")
    write_json(output, {
        'head_fraction_cap': cap,
        'min_head_size': min_head,
        'depth': partition.depth,
        'levels': levels,
    })
    _finish(manifest, output)


@app.command()
@handle_errors
def synth(
    ctx: typer.Context,
    nodes: int = typer.Option(300, "--nodes", help="Number of nodes (>= 10)"),
    groups: int = typer.Option(2, "--groups", help="Largest number of groups K (1-5)"),
    attrs: int = typer.Option(3, "--attrs", help="Number of attributes m (1-8)"),
    noise: float = typer.Option(0.0, "--noise", help="Gaussian label noise sd"),
    edges_per_node: int = typer.Option(3, "--edges-per-node", min=1, help="Out-links per new node"),
    seed: Optional[int] = SEED_OPTION,
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Output directory (default: --out-dir)"),
) -> None:
    """Generate a synthetic dataset with known HNR parameters."""
    state = _state(ctx)
    seed = _seed(state, seed)
    directory = output if output is not None else state.out_dir
    ensure_directory(directory)
    manifest = _manifest(
        state, "synth", seed, [], nodes=nodes, groups=groups, attrs=attrs,
        noise=noise, edges_per_node=edges_per_node,
    )

    dataset = generate_synthetic(nodes, groups, attrs, seed, noise_sd=noise, edges_per_node=edges_per_node)
    graph = dataset.graph
    files = {
        'edges.csv': lambda path: write_edges(path, graph),
        'attributes.csv': lambda path: write_attributes(path, graph, dataset.raw_attributes, dataset.attrs.attribute_names),
        'labels.csv': lambda path: write_labels(path, graph, dataset.labels),
        'groups.csv': lambda path: write_groups(path, graph, dataset.groups),
        'hidden_params.json': lambda path: write_json(path, {
            **dataset.params.to_dict(),
            'attribute_names': list(dataset.attrs.attribute_names),
            'noise_sd': noise,
        }),
    }
    for name, writer in files.items():
        writer(directory / name)
        manifest.add_output(directory / name)
    manifest_path = manifest.write(directory / "synth")
    console.print(
        f"[green]✓ Wrote {len(files)} files to {directory}[/green] "
        f"[dim]({graph.node_count} nodes, {len(graph.sources)} edges, K={dataset.groups.K}; {manifest_path.name})[/dim]"
    )


@app.command()
@handle_errors
def compare(
    ctx: typer.Context,
    edges: Path = EDGES_OPTION,
    attrs: Path = ATTRS_OPTION,
    labels: Path = LABELS_OPTION,
    groups: str = GROUPS_OPTION,
    models: Optional[str] = typer.Option(None, "--models", help=f"Comma-separated subset of {', '.join(MODEL_NAMES)}"),
    seed: Optional[int] = SEED_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """Cross-validate every ranker on the same splits."""
    state = _state(ctx)
    seed = _seed(state, seed)
    selected = [name.strip() for name in models.split(',') if name.strip()] if models else None
    graph, attributes, assignment, label_set, _ = _load_dataset(edges, attrs, labels, groups, state.config)
    manifest = _manifest(
        state, "compare", seed, [edges, attrs, labels, _groups_input(groups)], models=models,
    )
    comparison = compare_models(
        graph, attributes, assignment, label_set, state.config,
        models=selected, seed=seed, threads=state.threads, show_progress=not state.quiet,
    )

    table = Table(title="Model comparison (test Spearman)")
    table.add_column("Model", style="cyan")
    table.add_column("Mean", style="green", justify="right")
    table.add_column("SD", justify="right")
    for name, summary in comparison.summaries.items():
        table.add_row(name, f"{summary.mean:.4f}", f"{summary.sd:.4f}")
    for name, message in comparison.errors.items():
        if name not in comparison.summaries:
            table.add_row(name, "[red]n/a[/red]", escape(message.splitlines()[0]))
    console.print(table)

    output = _output(state, output, "compare.json")
    write_json(output, comparison.to_dict())
    _finish(manifest, output)


def main() -> None:
    """Console script entry point."""
    load_dotenv()
    app()


if __name__ == "__main__":
    main()
