"""CSV and JSON readers/writers for every file the toolkit consumes or emits.

Readers collect every problem in a file before raising, so one run lists
all bad rows (``file:line: message``) instead of stopping at the first.
"""

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DataValidationError
from .graph import (
    AttributeMatrix,
    GroupAssignment,
    LabelSet,
    WeightedDigraph,
    build_graph,
    standardize_attributes,
)
from .rankers.engine import RankVector
from .utils import atomic_write, dump_json, ensure_directory

Row = Tuple[int, Dict[str, str]]


def _read_rows(path: Path, required: Sequence[str]) -> Tuple[List[str], List[Row]]:
    """Header and (line number, row) pairs of a CSV file with the given columns."""
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"input file not found: {path}")
    with open(path, 'r', encoding='utf-8-sig', newline='') as f:
        reader = csv.DictReader(f)
        try:
            header = [name.strip() for name in (reader.fieldnames or [])]
            missing = [name for name in required if name not in header]
            if missing:
                raise DataValidationError(
                    f"{path.name}: header must contain {', '.join(required)}",
                    [f"{path.name}: missing column {name!r}" for name in missing],
                )
            reader.fieldnames = header
            rows = []
            for row in reader:
                cleaned = {key: (value or '').strip() for key, value in row.items() if key is not None}
                rows.append((reader.line_num, cleaned))
        except UnicodeDecodeError as e:
            raise DataValidationError(
                f"{path.name}:{reader.line_num + 1}: not valid UTF-8 text ({e.reason})"
            ) from e
        except csv.Error as e:
            raise DataValidationError(f"{path.name}:{reader.line_num}: malformed CSV: {e}") from e
    return header, rows


def _parse_float(text: str) -> Optional[float]:
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _check_ids(
    path: Path, rows: List[Row], graph: WeightedDigraph, problems: List[str]
) -> Dict[str, int]:
    """Line of every id, recording unknown and duplicate ids as problems."""
    seen: Dict[str, int] = {}
    for line, row in rows:
        node_id = row['node_id']
        if node_id not in graph.index_of:
            problems.append(f"{path.name}:{line}: unknown node_id {node_id!r}")
        elif node_id in seen:
            problems.append(f"{path.name}:{line}: node_id {node_id!r} repeats line {seen[node_id]}")
        else:
            seen[node_id] = line
    return seen


def read_edges(path: Path) -> WeightedDigraph:
    """Edge list with header ``source,target,weight``."""
    path = Path(path)
    _, rows = _read_rows(path, ('source', 'target', 'weight'))
    records = []
    problems = []
    for line, row in rows:
        weight = _parse_float(row['weight'])
        if not row['source'] or not row['target']:
            problems.append(f"{path.name}:{line}: source and target must be non-empty")
        elif weight is None:
            problems.append(f"{path.name}:{line}: weight {row['weight']!r} is not a finite number")
        elif weight < 0:
            problems.append(f"{path.name}:{line}: weight {weight} is negative")
        else:
            records.append((row['source'], row['target'], weight))
    if problems:
        raise DataValidationError(f"{path.name}: invalid edge rows", problems)
    if not records:
        raise DataValidationError(f"{path.name}: edge list is empty")
    return build_graph(records)


def read_attributes(path: Path, graph: WeightedDigraph) -> AttributeMatrix:
    """``node_id,<attr1>,...`` with one row per graph node, min-max standardized."""
    path = Path(path)
    header, rows = _read_rows(path, ('node_id',))
    names = [name for name in header if name != 'node_id']
    if not names:
        raise DataValidationError(f"{path.name}: no attribute columns after node_id")

    problems: List[str] = []
    seen = _check_ids(path, rows, graph, problems)
    raw = np.zeros((graph.node_count, len(names)))
    for line, row in rows:
        node_id = row['node_id']
        if seen.get(node_id) != line:
            continue
        for j, name in enumerate(names):
            value = _parse_float(row.get(name, ''))
            if value is None:
                problems.append(f"{path.name}:{line}: {name}={row.get(name, '')!r} is not a finite number")
            else:
                raw[graph.index_of[node_id], j] = value
    problems.extend(
        f"{path.name}: no attributes for node {node_id!r}"
        for node_id in graph.node_ids if node_id not in seen
    )
    if problems:
        raise DataValidationError(f"{path.name}: attribute rows do not match the graph", problems)
    return standardize_attributes(raw, names)


def read_labels(path: Path, graph: WeightedDigraph) -> LabelSet:
    """``node_id,label`` for a subset of nodes, kept in file order."""
    path = Path(path)
    _, rows = _read_rows(path, ('node_id', 'label'))
    problems: List[str] = []
    seen = _check_ids(path, rows, graph, problems)
    nodes, values = [], []
    for line, row in rows:
        value = _parse_float(row['label'])
        if value is None:
            problems.append(f"{path.name}:{line}: label {row['label']!r} is not a finite number")
        elif seen.get(row['node_id']) == line:
            nodes.append(graph.index_of[row['node_id']])
            values.append(value)
    if problems:
        raise DataValidationError(f"{path.name}: label rows do not match the graph", problems)
    if not nodes:
        raise DataValidationError(f"{path.name}: no labels")
    return LabelSet(nodes=np.array(nodes, dtype=np.int64), values=np.array(values))


def read_groups(path: Path, graph: WeightedDigraph) -> GroupAssignment:
    """``node_id,group`` covering every graph node with contiguous ids from 0."""
    path = Path(path)
    _, rows = _read_rows(path, ('node_id', 'group'))
    problems: List[str] = []
    seen = _check_ids(path, rows, graph, problems)
    group_of = np.full(graph.node_count, -1, dtype=np.int64)
    for line, row in rows:
        try:
            group = int(row['group'])
        except ValueError:
            problems.append(f"{path.name}:{line}: group {row['group']!r} is not an integer")
            continue
        if seen.get(row['node_id']) == line:
            group_of[graph.index_of[row['node_id']]] = group
    problems.extend(
        f"{path.name}: no group for node {node_id!r}"
        for node_id in graph.node_ids if node_id not in seen
    )
    if problems:
        raise DataValidationError(f"{path.name}: group rows do not match the graph", problems)
    return GroupAssignment(group_of=group_of)


def read_node_files(readers: Dict[str, Callable[[], Any]]) -> Dict[str, Any]:
    """Run every reader, then report the problems of all files together."""
    results: Dict[str, Any] = {}
    problems: List[str] = []
    for name, read in readers.items():
        try:
            results[name] = read()
        except DataValidationError as e:
            problems.extend(e.diagnostics or [e.summary])
    if problems:
        raise DataValidationError("node files do not match the graph", problems)
    return results


def read_values(path: Path) -> Tuple[List[str], np.ndarray]:
    """A ``value`` column with optional ``node_id``; ids default to row numbers."""
    path = Path(path)
    header, rows = _read_rows(path, ('value',))
    problems = []
    ids, values = [], []
    for position, (line, row) in enumerate(rows):
        value = _parse_float(row['value'])
        if value is None:
            problems.append(f"{path.name}:{line}: value {row['value']!r} is not a finite number")
            continue
        ids.append(row['node_id'] if 'node_id' in header else str(position))
        values.append(value)
    if problems:
        raise DataValidationError(f"{path.name}: invalid value rows", problems)
    return ids, np.array(values)


def read_json(path: Path) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"input file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise DataValidationError(f"{path.name}:{e.lineno}: invalid JSON: {e.msg}") from e
    except UnicodeDecodeError as e:
        raise DataValidationError(f"{path.name}: not valid UTF-8 text ({e.reason})") from e
    if not isinstance(data, dict):
        raise DataValidationError(f"{path.name}: expected a JSON object")
    return data


def format_float(value: float) -> str:
    """Shortest text that reads back to the same double."""
    return repr(float(value))


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    path = Path(path)
    ensure_directory(path.parent)
    atomic_write(path, buffer.getvalue())


def write_json(path: Path, data: Dict[str, Any]) -> None:
    path = Path(path)
    ensure_directory(path.parent)
    atomic_write(path, dump_json(data))


def write_ranks(path: Path, graph: WeightedDigraph, ranks: RankVector) -> None:
    """``node_id,score,rank`` in node index order; scores to 12 significant digits."""
    _write_csv(path, ('node_id', 'score', 'rank'), (
        (node_id, f"{score:.12g}", int(rank))
        for node_id, score, rank in zip(graph.node_ids, ranks.scores, ranks.ranks)
    ))


def write_exf(path: Path, node_ids: Sequence[str], values: Sequence[float]) -> None:
    """``node_id,exf``; an empty field marks an insufficient neighbourhood."""
    _write_csv(path, ('node_id', 'exf'), (
        (node_id, '' if math.isnan(value) else f"{value:.12g}")
        for node_id, value in zip(node_ids, values)
    ))


def write_edges(path: Path, graph: WeightedDigraph) -> None:
    _write_csv(path, ('source', 'target', 'weight'), (
        (graph.node_ids[s], graph.node_ids[t], format_float(w)) for s, t, w in graph.edges
    ))


def write_attributes(
    path: Path, graph: WeightedDigraph, raw: np.ndarray, attribute_names: Sequence[str]
) -> None:
    _write_csv(path, ('node_id', *attribute_names), (
        (node_id, *(format_float(v) for v in row)) for node_id, row in zip(graph.node_ids, raw)
    ))


def write_labels(path: Path, graph: WeightedDigraph, labels: LabelSet) -> None:
    _write_csv(path, ('node_id', 'label'), (
        (graph.node_ids[i], format_float(v)) for i, v in zip(labels.nodes, labels.values)
    ))


def write_groups(path: Path, graph: WeightedDigraph, groups: GroupAssignment) -> None:
    _write_csv(path, ('node_id', 'group'), zip(graph.node_ids, (int(g) for g in groups.group_of)))


def write_sweep(path: Path, rows: Iterable[Any]) -> None:
    """``fraction,mean_spearman,sd_spearman`` from SweepRow-like records."""
    _write_csv(path, ('fraction', 'mean_spearman', 'sd_spearman'), (
        (f"{row.fraction:g}", f"{row.mean_spearman:.12g}", f"{row.sd_spearman:.12g}") for row in rows
    ))
