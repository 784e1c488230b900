import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import pandas as pd

from app.core.errors import BenchmarkIOError
from app.core.ranker import BiasReport

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.9g"
CORRELATE_COLUMNS = ["arch", "score", "val_acc", "test_acc", "rank_score", "rank_acc"]
BIAS_COLUMNS = ["operation", "metric_freq", "gt_freq"]


@dataclass(frozen=True)
class RunConfig:
    channels: int
    cells: int
    modules: int
    seeds: Tuple[int, ...]
    measure: str
    dataset: Optional[str] = None

    def echo(self) -> Dict[str, object]:
        echo = {
            "channels": self.channels,
            "cells": self.cells,
            "modules": self.modules,
            "seeds": list(self.seeds),
            "measure": self.measure,
        }
        if self.dataset is not None:
            echo["dataset"] = self.dataset
        return echo


@dataclass(frozen=True)
class Correlation:
    rho: float
    tau: float


@dataclass(frozen=True)
class MetricReport:
    config: RunConfig
    arch_ids: Tuple[str, ...]
    scores: Tuple[float, ...]
    val_acc: Tuple[float, ...]
    test_acc: Tuple[float, ...]
    rank_score: Tuple[float, ...]
    rank_acc: Tuple[float, ...]
    test: Correlation
    val: Correlation
    seconds: float = field(compare=False)
    combined: Optional[Correlation] = None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "arch": list(self.arch_ids),
                "score": list(self.scores),
                "val_acc": list(self.val_acc),
                "test_acc": list(self.test_acc),
                "rank_score": list(self.rank_score),
                "rank_acc": list(self.rank_acc),
            },
            columns=CORRELATE_COLUMNS,
        )

    def summary(self) -> Dict[str, object]:
        summary = {
            "config": self.config.echo(),
            "architectures": len(self.arch_ids),
            "rho_test": self.test.rho,
            "tau_test": self.test.tau,
            "rho_val": self.val.rho,
            "tau_val": self.val.tau,
            "seconds": round(self.seconds, 3),
        }
        if self.combined is not None:
            summary["rho_test_combined"] = self.combined.rho
            summary["tau_test_combined"] = self.combined.tau
        return summary


def write_frame(frame: pd.DataFrame, path: str) -> None:
    try:
        frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise BenchmarkIOError(f"Cannot write {path}: {e}") from e
    logger.info("Wrote %d rows to %s", len(frame), path)


def bias_frame(report: BiasReport) -> pd.DataFrame:
    return pd.DataFrame(report.rows(), columns=BIAS_COLUMNS)


def format_table(rows: List[Tuple[str, ...]]) -> str:
    """Left-aligned plain-text columns."""
    if not rows:
        return ""
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join(
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    )
