import logging
import math
import time
from dataclasses import dataclass
from itertools import product
from typing import List, Mapping, Optional, Sequence, Tuple, Union

from app.core.archspec import (
    CellSpec,
    SurrogateConfig,
    expand,
    parse_arch_text,
    render_nb201,
    sample_random_cell,
)
from app.core.errors import MismatchedUniverse, NASGraphError
from app.core.graphify import convert, per_seed_scores, to_dot, to_tsv
from app.core.measures import MeasureKind
from app.core.ranker import (
    BiasReport,
    RankTable,
    StabilityReport,
    combined_rank,
    kendall_tau,
    operation_bias,
    rank_with_ties,
    seed_stability,
    spearman_rho,
)
from app.core.search import Accuracy, SearchSummary, repeated_trials, sampled_union
from .records import BenchmarkRecord, accuracy_table, load_benchmark, load_metric_scores
from .report import Correlation, MetricReport, RunConfig
from .scoring import score_cells, unique_seeds

logger = logging.getLogger(__name__)

# `--measure gt` ranks by the benchmark's own test accuracy
GROUND_TRUTH = "gt"

SearchMetric = Union[MeasureKind, str]


def parse_search_metric(name: str) -> SearchMetric:
    if name.strip().lower() == GROUND_TRUTH:
        return GROUND_TRUTH
    return MeasureKind.parse(name)


def metric_name(metric: SearchMetric) -> str:
    return metric if isinstance(metric, str) else metric.value


@dataclass(frozen=True)
class ScoreResult:
    arch: str
    measure: MeasureKind
    seeds: Tuple[int, ...]
    per_seed: Tuple[float, ...]
    score: float


def cmd_score(
    arch_text: str, surrogate: SurrogateConfig, measure: MeasureKind, seeds: Sequence[int]
) -> ScoreResult:
    seeds = unique_seeds(seeds)
    cell = parse_arch_text(arch_text)
    values = tuple(per_seed_scores(expand(cell, surrogate), measure, seeds))
    return ScoreResult(
        arch=_display_arch(cell, arch_text),
        measure=measure,
        seeds=seeds,
        per_seed=values,
        score=math.fsum(values) / len(values),
    )


def cmd_convert(arch_text: str, surrogate: SurrogateConfig, seed: int, fmt: str) -> str:
    graph = convert(expand(parse_arch_text(arch_text), surrogate), seed)
    if fmt == "tsv":
        return to_tsv(graph)
    if fmt == "dot":
        return to_dot(graph)
    raise NASGraphError(f"Unknown graph format '{fmt}'.")


def _display_arch(cell: CellSpec, arch_text: str) -> str:
    return render_nb201(cell) if cell.is_nb201 else arch_text.strip()


def _correlation(scores: Sequence[float], accuracy: Sequence[float]) -> Correlation:
    return Correlation(spearman_rho(scores, accuracy), kendall_tau(scores, accuracy))


def _load_scored_records(bench_path: str, dataset: str):
    records = load_benchmark(bench_path)
    if not records:
        raise NASGraphError(f"Benchmark file {bench_path} has no records.")
    table = accuracy_table(records, dataset)
    kept = [r for r in records if r.arch in table]
    return kept, table


def _external_scores(path: str, arch_ids: Sequence[str]) -> List[float]:
    external = load_metric_scores(path)
    missing = [arch for arch in arch_ids if arch not in external]
    if missing:
        raise MismatchedUniverse(
            f"{len(missing)} benchmark architectures have no score in {path}."
        )
    return [external[arch] for arch in arch_ids]


def cmd_correlate(
    bench_path: str,
    dataset: str,
    measure: MeasureKind,
    surrogate: SurrogateConfig,
    seeds: Sequence[int],
    jobs: int = 1,
    combine_with: Optional[str] = None,
    progress: bool = True,
) -> MetricReport:
    seeds = unique_seeds(seeds)
    records, table = _load_scored_records(bench_path, dataset)
    arch_ids = [r.arch for r in records]
    batch = score_cells([r.cell for r in records], surrogate, measure, seeds, jobs, progress)
    scores = batch.means()
    val = [table[arch].val for arch in arch_ids]
    test = [table[arch].test for arch in arch_ids]
    rank_score = rank_with_ties(scores)

    combined = None
    if combine_with is not None:
        other = rank_with_ties(_external_scores(combine_with, arch_ids))
        # rank 1 is best, so negate before correlating with accuracy
        merged = [-rank for rank in combined_rank(rank_score, other)]
        combined = _correlation(merged, test)

    report = MetricReport(
        config=RunConfig(
            surrogate.channels,
            surrogate.cells_per_module,
            surrogate.modules,
            seeds,
            measure.value,
            dataset,
        ),
        arch_ids=tuple(arch_ids),
        scores=tuple(scores),
        val_acc=tuple(val),
        test_acc=tuple(test),
        rank_score=tuple(rank_score),
        rank_acc=tuple(rank_with_ties(test)),
        test=_correlation(scores, test),
        val=_correlation(scores, val),
        seconds=batch.seconds,
        combined=combined,
    )
    logger.info(
        "%s on %s: rho=%.4f tau=%.4f over %d architectures",
        measure.value,
        dataset,
        report.test.rho,
        report.test.tau,
        len(arch_ids),
    )
    return report


@dataclass(frozen=True)
class SearchRun:
    metric: str
    summary: SearchSummary
    # process CPU time of scoring plus the trials, summed over worker threads
    cpu_seconds: float


def cmd_search(
    bench_path: str,
    dataset: str,
    metrics: Sequence[SearchMetric],
    surrogate: SurrogateConfig,
    seeds: Sequence[int],
    n: int,
    trials: int,
    seed: int,
    jobs: int = 1,
    shared_subset: bool = True,
    progress: bool = True,
) -> List[SearchRun]:
    """Random search once per metric.

    With ``shared_subset`` every metric sees the same sampled subset for a
    given trial seed; otherwise each metric draws from its own stream. Each
    run reports the CPU seconds spent on its scoring and trials.
    """
    records, table = _load_scored_records(bench_path, dataset)
    return _search_runs(
        records, table, metrics, surrogate, unique_seeds(seeds), n, trials, seed, jobs,
        shared_subset, progress,
    )


def _search_runs(
    records: Sequence[BenchmarkRecord],
    table: Mapping[str, Accuracy],
    metrics: Sequence[SearchMetric],
    surrogate: SurrogateConfig,
    seeds: Tuple[int, ...],
    n: int,
    trials: int,
    seed: int,
    jobs: int,
    shared_subset: bool,
    progress: bool,
) -> List[SearchRun]:
    pool = [r.arch for r in records]
    cells = {r.arch: r.cell for r in records}

    runs = []
    for index, metric in enumerate(dict.fromkeys(metrics)):
        stream = None if shared_subset else index
        start_time = time.process_time()
        if metric == GROUND_TRUTH:
            scores = {arch: acc.test for arch, acc in table.items()}
        else:
            candidates = sampled_union(pool, n, trials, seed, stream)
            batch = score_cells(
                [cells[arch] for arch in candidates], surrogate, metric, seeds, jobs, progress
            )
            scores = dict(zip(candidates, batch.means()))
        summary = repeated_trials(pool, scores, n, trials, seed, table, stream)
        cpu_seconds = time.process_time() - start_time
        runs.append(SearchRun(metric_name(metric), summary, cpu_seconds))
    return runs


def surrogate_grid(
    channels: Sequence[int], cells: Sequence[int], modules: int, probe_resolution: int
) -> List[SurrogateConfig]:
    """Every ``(h, c)`` pair, channels varying slowest."""
    return [
        SurrogateConfig(h, c, modules, probe_resolution)
        for h, c in product(dict.fromkeys(channels), dict.fromkeys(cells))
    ]


@dataclass(frozen=True)
class SweepPoint:
    surrogate: SurrogateConfig
    run: SearchRun


def cmd_sweep(
    bench_path: str,
    dataset: str,
    measure: MeasureKind,
    surrogates: Sequence[SurrogateConfig],
    seeds: Sequence[int],
    n: int,
    trials: int,
    seed: int,
    jobs: int = 1,
    progress: bool = True,
) -> List[SweepPoint]:
    """Repeat the random search once per surrogate size.

    Every size sees the same trial subsets, so differences between rows
    come from the surrogate alone.
    """
    if not surrogates:
        raise NASGraphError("The surrogate grid is empty.")
    seeds = unique_seeds(seeds)
    records, table = _load_scored_records(bench_path, dataset)
    points = []
    for surrogate in surrogates:
        (run,) = _search_runs(
            records, table, [measure], surrogate, seeds, n, trials, seed, jobs, True, progress
        )
        logger.info(
            "NASGraph(%d, %d, %d): chosen test %.2f +- %.2f",
            surrogate.channels,
            surrogate.cells_per_module,
            surrogate.modules,
            run.summary.chosen_test.mean,
            run.summary.chosen_test.std,
        )
        points.append(SweepPoint(surrogate, run))
    return points


def cmd_bias(
    bench_path: str,
    dataset: str,
    metric: SearchMetric,
    surrogate: SurrogateConfig,
    seeds: Sequence[int],
    top_fraction: float,
    jobs: int = 1,
    metric_scores_path: Optional[str] = None,
    progress: bool = True,
) -> BiasReport:
    records, table = _load_scored_records(bench_path, dataset)
    arch_ids = [r.arch for r in records]
    gt_scores = [table[arch].test for arch in arch_ids]

    if metric_scores_path is not None:
        scores = _external_scores(metric_scores_path, arch_ids)
    elif metric == GROUND_TRUTH:
        scores = gt_scores
    else:
        seeds = unique_seeds(seeds)
        batch = score_cells([r.cell for r in records], surrogate, metric, seeds, jobs, progress)
        scores = batch.means()

    return operation_bias(
        RankTable.from_scores(arch_ids, scores),
        RankTable.from_scores(arch_ids, gt_scores),
        {r.arch: r.cell for r in records},
        top_fraction,
    )


def random_cells(count: int, seed: int) -> List[CellSpec]:
    """``count`` NB201 cells drawn from consecutive seeds starting at ``seed``."""
    return [sample_random_cell(seed + i) for i in range(count)]


def cmd_stability(
    cells: Sequence[CellSpec],
    measure: MeasureKind,
    surrogate: SurrogateConfig,
    seeds: Sequence[int],
    jobs: int = 1,
    progress: bool = True,
) -> StabilityReport:
    seeds = unique_seeds(seeds)
    batch = score_cells(cells, surrogate, measure, seeds, jobs, progress)
    return seed_stability(seeds, [batch.for_seed(k) for k in range(len(seeds))])


def benchmark_cells(bench_path: str) -> List[CellSpec]:
    records: List[BenchmarkRecord] = load_benchmark(bench_path)
    return [r.cell for r in records]
