import functools
import json
import logging
import sys

import click

from app.config.settings import (
    DEFAULT_CELLS,
    DEFAULT_CHANNELS,
    DEFAULT_MODULES,
    DEFAULT_PROBE_RESOLUTION,
    DEFAULT_SEEDS,
    DEFAULT_TOP_FRACTION,
    LOG_LEVEL,
    NASGRAPH_JOBS,
    setting_errors,
)
from app.core.archspec import SurrogateConfig
from app.core.errors import NASGraphError
from app.core.harness import (
    benchmark_cells,
    bias_frame,
    cmd_bias,
    cmd_convert,
    cmd_correlate,
    cmd_score,
    cmd_search,
    cmd_stability,
    cmd_sweep,
    format_table,
    parse_search_metric,
    random_cells,
    surrogate_grid,
    write_frame,
)
from app.core.measures import MeasureKind

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s"


def setup_logging(level: str = LOG_LEVEL):
    """Configure logging for the command line; logs go to stderr."""
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


logger = logging.getLogger(__name__)

MEASURE_NAMES = [kind.value for kind in MeasureKind]


def parse_measure(ctx, param, value):
    """Parse a measure name into MeasureKind."""
    try:
        return MeasureKind.parse(value)
    except NASGraphError as e:
        raise click.BadParameter(str(e))


def parse_search_metrics(ctx, param, value):
    try:
        return [parse_search_metric(name) for name in value]
    except NASGraphError as e:
        raise click.BadParameter(str(e))


def exit_codes(command):
    """Input errors exit 1, anything unexpected exits 2."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except NASGraphError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(1)
        except click.exceptions.Exit:
            raise
        except Exception as e:
            logger.error("Internal error: %s", e, exc_info=True)
            click.echo(f"Internal error: {e}", err=True)
            sys.exit(2)

    return wrapper


def surrogate_options(command):
    options = [
        click.option(
            "--channels", "-h", type=int, default=DEFAULT_CHANNELS, show_default=True,
            help="Channels h of the surrogate model",
        ),
        click.option(
            "--cells", "-c", type=int, default=DEFAULT_CELLS, show_default=True,
            help="Cells per module c",
        ),
        click.option(
            "--modules", "-m", type=int, default=DEFAULT_MODULES, show_default=True,
            help="Modules m",
        ),
        click.option(
            "--resolution", type=int, default=DEFAULT_PROBE_RESOLUTION, show_default=True,
            help="Spatial size of the probe input",
        ),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def seeds_option(command):
    return click.option(
        "--seeds", "seeds", type=int, multiple=True,
        help="Initialisation seed; repeat for several (default 0..7)",
    )(command)


def jobs_option(command):
    return click.option(
        "--jobs", type=click.IntRange(min=1), default=NASGRAPH_JOBS, envvar="NASGRAPH_JOBS",
        show_default=True, help="Worker threads for scoring",
    )(command)


def build_surrogate(channels, cells, modules, resolution) -> SurrogateConfig:
    return SurrogateConfig(
        channels=channels, cells_per_module=cells, modules=modules, probe_resolution=resolution
    )


def resolve_seeds(seeds):
    return tuple(seeds) if seeds else DEFAULT_SEEDS


# CLI Commands
@click.group()
def cli():
    """Training-free architecture scoring via graph measures."""
    errors = setting_errors()
    if errors:
        for message in errors:
            click.echo(f"Error: {message}", err=True)
        sys.exit(1)
    setup_logging()


@cli.command("score")
@click.option("--arch", required=True, help="NB201 string or adjacency JSON")
@click.option("--measure", default="avg_deg", show_default=True, callback=parse_measure,
              help=f"One of {', '.join(MEASURE_NAMES)}")
@surrogate_options
@seeds_option
@click.option("--json", "as_json", is_flag=True, help="Print JSON instead of text")
@exit_codes
def score(arch, measure, channels, cells, modules, resolution, seeds, as_json):
    """Score one architecture."""
    surrogate = build_surrogate(channels, cells, modules, resolution)
    result = cmd_score(arch, surrogate, measure, resolve_seeds(seeds))
    if as_json:
        payload = {
            "arch": result.arch,
            "measure": result.measure.value,
            "score": result.score,
            "per_seed": {str(s): v for s, v in zip(result.seeds, result.per_seed)},
        }
        click.echo(json.dumps(payload, indent=2))
        return
    click.echo(f"arch: {result.arch}")
    click.echo(f"{result.measure.value}: {result.score:.9g}")
    for s, value in zip(result.seeds, result.per_seed):
        click.echo(f"  seed {s}: {value:.9g}")


@cli.command("convert")
@click.option("--arch", required=True, help="NB201 string or adjacency JSON")
@surrogate_options
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["dot", "tsv"]), default="tsv",
              show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Write to a file instead of stdout")
@exit_codes
def convert_graph(arch, channels, cells, modules, resolution, seed, fmt, out):
    """Convert one architecture to a graph and export it."""
    surrogate = build_surrogate(channels, cells, modules, resolution)
    text = cmd_convert(arch, surrogate, seed, fmt)
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as file:
            file.write(text)
    except OSError as e:
        raise NASGraphError(f"Cannot write {out}: {e}") from e
    logger.info("Graph written to %s", out)


@cli.command("correlate")
@click.option("--bench", required=True, type=click.Path(dir_okay=False))
@click.option("--dataset", default="cifar10", show_default=True)
@click.option("--measure", default="avg_deg", show_default=True, callback=parse_measure)
@surrogate_options
@seeds_option
@jobs_option
@click.option("--out", type=click.Path(dir_okay=False), help="CSV of per-architecture scores")
@click.option("--combine-with", type=click.Path(dir_okay=False),
              help="CSV with arch,score of another metric to combine by rank")
@exit_codes
def correlate(bench, dataset, measure, channels, cells, modules, resolution, seeds, jobs,
              out, combine_with):
    """Rank correlation between a measure and benchmark accuracy."""
    surrogate = build_surrogate(channels, cells, modules, resolution)
    report = cmd_correlate(
        bench, dataset, measure, surrogate, resolve_seeds(seeds), jobs, combine_with
    )
    if out is not None:
        write_frame(report.to_frame(), out)
    click.echo(json.dumps(report.summary(), indent=2))


def _stats_cell(stats) -> str:
    return f"{stats.mean:.2f} +- {stats.std:.2f}"


@cli.command("search")
@click.option("--bench", required=True, type=click.Path(dir_okay=False))
@click.option("--dataset", default="cifar10", show_default=True)
@click.option("--measure", "metrics", multiple=True, default=["avg_deg"], show_default=True,
              callback=parse_search_metrics,
              help=f"Repeatable; one of {', '.join(MEASURE_NAMES)} or gt")
@surrogate_options
@seeds_option
@click.option("--n", "n", type=click.IntRange(min=1), default=100, show_default=True,
              help="Architectures sampled per trial")
@click.option("--trials", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed of the first trial")
@click.option("--shared-subset/--independent-subsets", default=True, show_default=True)
@jobs_option
@exit_codes
def search(bench, dataset, metrics, channels, cells, modules, resolution, seeds, n, trials,
           seed, shared_subset, jobs):
    """Random search with a proxy metric, repeated over trials."""
    surrogate = build_surrogate(channels, cells, modules, resolution)
    runs = cmd_search(
        bench, dataset, metrics, surrogate, resolve_seeds(seeds), n, trials, seed, jobs,
        shared_subset,
    )
    rows = [("metric", "chosen_val", "chosen_test", "gt_val", "gt_test", "cpu_seconds")]
    for run in runs:
        s = run.summary
        rows.append(
            (
                run.metric,
                _stats_cell(s.chosen_val),
                _stats_cell(s.chosen_test),
                _stats_cell(s.gt_val),
                _stats_cell(s.gt_test),
                f"{run.cpu_seconds:.2f}",
            )
        )
    click.echo(format_table(rows))


@cli.command("sweep")
@click.option("--bench", required=True, type=click.Path(dir_okay=False))
@click.option("--dataset", default="cifar10", show_default=True)
@click.option("--measure", default="avg_deg", show_default=True, callback=parse_measure)
@click.option("--grid-channels", type=click.IntRange(min=1), multiple=True,
              default=[1, 4, 8, 10], show_default=True, help="Repeatable; values of h")
@click.option("--grid-cells", type=click.IntRange(min=1), multiple=True,
              default=[1, 2, 3, 4, 5], show_default=True, help="Repeatable; values of c")
@click.option("--modules", "-m", type=int, default=DEFAULT_MODULES, show_default=True)
@click.option("--resolution", type=int, default=DEFAULT_PROBE_RESOLUTION, show_default=True)
@seeds_option
@click.option("--n", "n", type=click.IntRange(min=1), default=100, show_default=True,
              help="Architectures sampled per trial")
@click.option("--trials", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed of the first trial")
@jobs_option
@exit_codes
def sweep(bench, dataset, measure, grid_channels, grid_cells, modules, resolution, seeds, n,
          trials, seed, jobs):
    """Random search repeated over a grid of surrogate sizes."""
    grid = surrogate_grid(grid_channels, grid_cells, modules, resolution)
    points = cmd_sweep(bench, dataset, measure, grid, resolve_seeds(seeds), n, trials, seed, jobs)
    rows = [("h", "c", "chosen_val", "chosen_test", "gt_test", "cpu_seconds")]
    for point in points:
        s = point.run.summary
        rows.append(
            (
                str(point.surrogate.channels),
                str(point.surrogate.cells_per_module),
                _stats_cell(s.chosen_val),
                _stats_cell(s.chosen_test),
                _stats_cell(s.gt_test),
                f"{point.run.cpu_seconds:.2f}",
            )
        )
    click.echo(format_table(rows))


@cli.command("bias")
@click.option("--bench", required=True, type=click.Path(dir_okay=False))
@click.option("--dataset", default="cifar100", show_default=True)
@click.option("--measure", "metric", default="avg_deg", show_default=True,
              callback=lambda ctx, param, value: parse_search_metrics(ctx, param, [value])[0])
@click.option("--scores", "scores_path", type=click.Path(dir_okay=False),
              help="CSV with arch,score of an external metric")
@surrogate_options
@seeds_option
@click.option("--top", type=click.FloatRange(min=0.0, max=1.0, min_open=True),
              default=DEFAULT_TOP_FRACTION, show_default=True)
@jobs_option
@click.option("--out", type=click.Path(dir_okay=False), help="CSV of operation frequencies")
@exit_codes
def bias(bench, dataset, metric, scores_path, channels, cells, modules, resolution, seeds,
         top, jobs, out):
    """Operation-frequency bias of a metric's top architectures."""
    surrogate = build_surrogate(channels, cells, modules, resolution)
    report = cmd_bias(
        bench, dataset, metric, surrogate, resolve_seeds(seeds), top, jobs, scores_path
    )
    if out is not None:
        write_frame(bias_frame(report), out)
    rows = [("operation", "metric_freq", "gt_freq")]
    rows.extend((op, f"{m:.4f}", f"{g:.4f}") for op, m, g in report.rows())
    click.echo(format_table(rows))
    click.echo(f"bias: {report.bias:.4f} (top {report.top_count})")


@cli.command("stability")
@click.option("--bench", type=click.Path(dir_okay=False),
              help="Benchmark whose architectures are scored")
@click.option("--random", "random_count", type=click.IntRange(min=2),
              help="Score this many random NB201 cells instead of a benchmark")
@click.option("--seed", type=int, default=0, show_default=True,
              help="First seed used to draw random cells")
@click.option("--measure", default="avg_deg", show_default=True, callback=parse_measure)
@surrogate_options
@seeds_option
@jobs_option
@exit_codes
def stability(bench, random_count, seed, measure, channels, cells, modules, resolution, seeds,
              jobs):
    """How much the ranking moves between initialisation seeds."""
    if (bench is None) == (random_count is None):
        raise NASGraphError("Give exactly one of --bench or --random.")
    surrogate = build_surrogate(channels, cells, modules, resolution)
    arch_cells = benchmark_cells(bench) if bench else random_cells(random_count, seed)
    report = cmd_stability(arch_cells, measure, surrogate, resolve_seeds(seeds), jobs)
    rows = [("seed_a", "seed_b", "rank_difference", "rho")]
    rows.extend(
        (str(p.seed_a), str(p.seed_b), f"{p.rank_difference:.1f}", f"{p.rho:.4f}")
        for p in report.pairs
    )
    click.echo(format_table(rows))
    click.echo(
        f"rank_difference: {report.rank_difference_mean:.2f} +- {report.rank_difference_std:.2f}"
    )
    click.echo(f"rho: {report.rho_mean:.4f} +- {report.rho_std:.4f}")


if __name__ == "__main__":
    cli()
