from .records import (
    BenchmarkRecord,
    accuracy_table,
    load_benchmark,
    load_metric_scores,
    parse_record,
)
from .report import (
    BIAS_COLUMNS,
    CORRELATE_COLUMNS,
    Correlation,
    MetricReport,
    RunConfig,
    bias_frame,
    format_table,
    write_frame,
)
from .scoring import ScoredBatch, score_cells, unique_seeds
from .commands import (
    GROUND_TRUTH,
    ScoreResult,
    SearchRun,
    SweepPoint,
    benchmark_cells,
    cmd_bias,
    cmd_convert,
    cmd_correlate,
    cmd_score,
    cmd_search,
    cmd_stability,
    cmd_sweep,
    metric_name,
    parse_search_metric,
    random_cells,
    surrogate_grid,
)

__all__ = [
    "BenchmarkRecord",
    "accuracy_table",
    "load_benchmark",
    "load_metric_scores",
    "parse_record",
    "BIAS_COLUMNS",
    "CORRELATE_COLUMNS",
    "Correlation",
    "MetricReport",
    "RunConfig",
    "bias_frame",
    "format_table",
    "write_frame",
    "ScoredBatch",
    "score_cells",
    "unique_seeds",
    "GROUND_TRUTH",
    "ScoreResult",
    "SearchRun",
    "SweepPoint",
    "benchmark_cells",
    "cmd_bias",
    "cmd_convert",
    "cmd_correlate",
    "cmd_score",
    "cmd_search",
    "cmd_stability",
    "cmd_sweep",
    "metric_name",
    "parse_search_metric",
    "random_cells",
    "surrogate_grid",
]
