import json
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence

import pandas as pd

from app.core.archspec import CellSpec, parse_arch_text
from app.core.errors import (
    AccuracyOutOfRange,
    BenchmarkIOError,
    InvalidArch,
    MalformedRecord,
    NASGraphError,
    UnknownDataset,
)
from app.core.search import Accuracy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchmarkRecord:
    arch: str
    cell: CellSpec = field(compare=False)
    accuracies: Mapping[str, Accuracy]


def _accuracy(value, line: int, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedRecord(line, f"{where} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value) or not 0.0 <= value <= 100.0:
        raise AccuracyOutOfRange(line, f"{where} = {value} is outside [0, 100]")
    return value


def parse_record(text: str, line: int) -> BenchmarkRecord:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedRecord(line, f"invalid JSON: {e}") from e
    if not isinstance(payload, dict):
        raise MalformedRecord(line, "record must be a JSON object")
    arch, acc = payload.get("arch"), payload.get("acc")
    if not isinstance(arch, str):
        raise MalformedRecord(line, 'missing string field "arch"')
    if not isinstance(acc, dict):
        raise MalformedRecord(line, 'missing object field "acc"')
    try:
        cell = parse_arch_text(arch)
    except NASGraphError as e:
        raise InvalidArch(line, str(e)) from e

    accuracies = {}
    for dataset, splits in acc.items():
        if not isinstance(splits, dict) or "val" not in splits or "test" not in splits:
            raise MalformedRecord(line, f'dataset "{dataset}" needs "val" and "test"')
        accuracies[dataset] = Accuracy(
            _accuracy(splits["val"], line, f"{dataset}.val"),
            _accuracy(splits["test"], line, f"{dataset}.test"),
        )
    return BenchmarkRecord(arch, cell, accuracies)


def load_benchmark(path: str) -> List[BenchmarkRecord]:
    """Read JSON-Lines accuracy records; blank lines are ignored."""
    try:
        with open(path, "rb") as file:
            lines = file.read().splitlines()
    except OSError as e:
        raise BenchmarkIOError(f"Cannot read benchmark file {path}: {e}") from e

    records = []
    seen = set()
    for number, raw in enumerate(lines, start=1):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise MalformedRecord(number, f"not valid UTF-8: {e}") from e
        if not text.strip():
            continue
        record = parse_record(text, number)
        if record.arch in seen:
            raise MalformedRecord(number, f"duplicate architecture {record.arch}")
        seen.add(record.arch)
        records.append(record)
    logger.info("Loaded %d benchmark records from %s", len(records), path)
    return records


def accuracy_table(records: Sequence[BenchmarkRecord], dataset: str) -> Dict[str, Accuracy]:
    """Accuracies on ``dataset`` for every record that reports it."""
    table = {r.arch: r.accuracies[dataset] for r in records if dataset in r.accuracies}
    if records and not table:
        known = sorted({name for r in records for name in r.accuracies})
        raise UnknownDataset(
            f"No record has accuracies for '{dataset}'. Available: {', '.join(known) or 'none'}."
        )
    if len(table) < len(records):
        logger.warning(
            "%d of %d records have no '%s' accuracies and are skipped",
            len(records) - len(table),
            len(records),
            dataset,
        )
    return table


def load_metric_scores(path: str) -> Dict[str, float]:
    """External proxy scores from a CSV with ``arch`` and ``score`` columns."""
    try:
        frame = pd.read_csv(path, dtype={"arch": str})
    except (
        OSError,
        UnicodeDecodeError,
        pd.errors.ParserError,
        pd.errors.EmptyDataError,
    ) as e:
        raise BenchmarkIOError(f"Cannot read score file {path}: {e}") from e
    if "arch" not in frame.columns or "score" not in frame.columns:
        raise MalformedRecord(1, f'{path} needs "arch" and "score" columns')
    scores = {}
    for row, (arch, score) in enumerate(zip(frame["arch"], frame["score"]), start=2):
        try:
            value = float(score)
        except (TypeError, ValueError):
            raise MalformedRecord(row, f"score {score!r} is not a number")
        if not math.isfinite(value):
            raise MalformedRecord(row, f"score {score!r} is not finite")
        if arch in scores:
            raise MalformedRecord(row, f"duplicate architecture {arch}")
        scores[arch] = value
    return scores
