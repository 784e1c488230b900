import json

import numpy as np
import pytest

from app.core.archspec import render_nb201
from app.core.errors import (
    AccuracyOutOfRange,
    BenchmarkIOError,
    InvalidArch,
    MalformedRecord,
    MismatchedUniverse,
    NASGraphError,
    RecordError,
    UnknownDataset,
)
from app.core.harness import (
    CORRELATE_COLUMNS,
    GROUND_TRUTH,
    accuracy_table,
    bias_frame,
    cmd_bias,
    cmd_convert,
    cmd_correlate,
    cmd_score,
    cmd_search,
    cmd_stability,
    cmd_sweep,
    load_benchmark,
    load_metric_scores,
    random_cells,
    score_cells,
    surrogate_grid,
    unique_seeds,
    write_frame,
)
from app.core.measures import MeasureKind
from tests.helpers import ALL_CONV3, ALL_NONE, MIXED, distinct_random_cells


def monotone_rows(cells, tiny, seeds=(0,)):
    """Accuracies that rise strictly with each cell's avg_deg score."""
    scores = score_cells(cells, tiny, MeasureKind.AVG_DEG, seeds, progress=False).means()
    rows = []
    for cell, score in zip(cells, scores):
        test = 100.0 - 40.0 / (1.0 + score)
        rows.append((render_nb201(cell), {"cifar10": (test - 1.0, test)}))
    return rows


def test_load_benchmark(make_benchmark, tmp_path):
    path = make_benchmark([(MIXED, {"cifar10": (80.0, 79.5), "cifar100": (50.0, 49.0)})])
    records = load_benchmark(path)
    assert len(records) == 1
    assert records[0].accuracies["cifar100"].test == 49.0

    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    assert load_benchmark(str(empty)) == []


def test_blank_lines_are_skipped(tmp_path):
    path = tmp_path / "b.jsonl"
    row = json.dumps({"arch": MIXED, "acc": {"cifar10": {"val": 1, "test": 2}}})
    path.write_text(f"\n{row}\n\n")
    assert len(load_benchmark(str(path))) == 1


@pytest.mark.parametrize(
    "line, error",
    [
        ('{"arch": "' + MIXED + '", "acc": {"cifar10": {"val": 50, "test": 101.0}}}', AccuracyOutOfRange),
        ('{"arch": "|bogus~0|", "acc": {}}', InvalidArch),
        ("not json", MalformedRecord),
        ('{"acc": {}}', MalformedRecord),
        ('{"arch": "' + MIXED + '", "acc": {"cifar10": {"val": 50}}}', MalformedRecord),
        ('{"arch": "' + MIXED + '", "acc": {"cifar10": {"val": true, "test": 1}}}', MalformedRecord),
    ],
)
def test_record_errors_carry_line_numbers(tmp_path, line, error):
    good = json.dumps({"arch": ALL_NONE, "acc": {"cifar10": {"val": 1, "test": 2}}})
    path = tmp_path / "bad.jsonl"
    path.write_text(good + "\n" + line + "\n")
    with pytest.raises(error) as info:
        load_benchmark(str(path))
    assert isinstance(info.value, RecordError)
    assert info.value.line == 2
    assert str(info.value).startswith("line 2:")


def test_duplicate_architectures_rejected(make_benchmark):
    path = make_benchmark([(MIXED, {"c": (1, 1)}), (MIXED, {"c": (2, 2)})])
    with pytest.raises(MalformedRecord):
        load_benchmark(path)


def test_missing_file():
    with pytest.raises(BenchmarkIOError):
        load_benchmark("/nonexistent/bench.jsonl")


def test_invalid_utf8_is_a_record_error(tmp_path):
    good = json.dumps({"arch": ALL_NONE, "acc": {"cifar10": {"val": 1, "test": 2}}})
    path = tmp_path / "bad.jsonl"
    path.write_bytes(good.encode() + b'\n{"arch": "\xff\xfe", "acc": {}}\n')
    with pytest.raises(MalformedRecord) as info:
        load_benchmark(str(path))
    assert info.value.line == 2


def test_invalid_utf8_score_file(tmp_path):
    path = tmp_path / "scores.csv"
    path.write_bytes(b"arch,score\n\xff\xfe,1.0\n")
    with pytest.raises(BenchmarkIOError):
        load_metric_scores(str(path))


def test_accuracy_table(make_benchmark):
    records = load_benchmark(
        make_benchmark([(MIXED, {"cifar10": (1, 2)}), (ALL_NONE, {"cifar100": (3, 4)})])
    )
    assert list(accuracy_table(records, "cifar10")) == [MIXED]
    with pytest.raises(UnknownDataset):
        accuracy_table(records, "imagenet16-120")


def test_load_metric_scores(tmp_path):
    path = tmp_path / "scores.csv"
    path.write_text(f"arch,score\n{MIXED},1.5\n{ALL_NONE},-2\n")
    assert load_metric_scores(str(path)) == {MIXED: 1.5, ALL_NONE: -2.0}
    path.write_text("name,value\nx,1\n")
    with pytest.raises(MalformedRecord):
        load_metric_scores(str(path))


def test_unique_seeds():
    assert unique_seeds([1, 1, 0, 1]) == (1, 0)


def test_scoring_is_independent_of_jobs(tiny):
    cells = distinct_random_cells(10)
    serial = score_cells(cells, tiny, MeasureKind.WEDGE, (0, 1), jobs=1, progress=False)
    parallel = score_cells(cells, tiny, MeasureKind.WEDGE, (0, 1), jobs=4, progress=False)
    assert serial.per_seed == parallel.per_seed
    assert serial.for_seed(1) == [row[1] for row in serial.per_seed]


def test_cmd_score(tiny):
    result = cmd_score(MIXED, tiny, MeasureKind.AVG_DEG, [1, 1, 2])
    assert result.arch == MIXED
    assert result.seeds == (1, 2)
    assert len(result.per_seed) == 2
    assert result.score == pytest.approx(sum(result.per_seed) / 2)


def test_none_cell_scores_below_conv_cell(tiny):
    seeds = [0, 1]
    none = cmd_score(ALL_NONE, tiny, MeasureKind.AVG_DEG, seeds)
    conv = cmd_score(ALL_CONV3, tiny, MeasureKind.AVG_DEG, seeds)
    assert none.score < conv.score


def test_cmd_convert_formats(tiny):
    tsv = cmd_convert(MIXED, tiny, 0, "tsv")
    assert tsv == cmd_convert(MIXED, tiny, 0, "tsv")
    assert cmd_convert(MIXED, tiny, 0, "dot").startswith("digraph")


def test_correlate_monotone_benchmark(make_benchmark, tiny):
    path = make_benchmark(monotone_rows(distinct_random_cells(24), tiny))
    report = cmd_correlate(path, "cifar10", MeasureKind.AVG_DEG, tiny, [0], progress=False)
    assert report.test.rho == pytest.approx(1.0, abs=1e-12)
    assert report.test.tau == pytest.approx(1.0, abs=1e-12)
    assert report.rank_score == report.rank_acc
    frame = report.to_frame()
    assert list(frame.columns) == CORRELATE_COLUMNS
    assert report.summary()["config"]["seeds"] == [0]


def test_correlate_unrelated_accuracies(make_benchmark, tiny):
    rng = np.random.default_rng(11)
    cells = distinct_random_cells(200)
    rows = []
    for cell in cells:
        test = float(rng.uniform(10.0, 90.0))
        rows.append((render_nb201(cell), {"cifar10": (test, test)}))
    report = cmd_correlate(make_benchmark(rows), "cifar10", MeasureKind.AVG_DEG, tiny, [0],
                           progress=False)
    assert abs(report.test.rho) < 0.2


def test_correlate_combined_with_external_scores(make_benchmark, tiny, tmp_path):
    rows = monotone_rows(distinct_random_cells(12), tiny)
    path = make_benchmark(rows)
    scores = tmp_path / "ext.csv"
    scores.write_text(
        "arch,score\n" + "".join(f"{arch},{acc['cifar10'][1]}\n" for arch, acc in rows)
    )
    report = cmd_correlate(
        path, "cifar10", MeasureKind.AVG_DEG, tiny, [0], combine_with=str(scores), progress=False
    )
    assert report.combined.rho == pytest.approx(1.0, abs=1e-12)

    scores.write_text("arch,score\n" + f"{rows[0][0]},1.0\n")
    with pytest.raises(MismatchedUniverse):
        cmd_correlate(
            path, "cifar10", MeasureKind.AVG_DEG, tiny, [0], combine_with=str(scores),
            progress=False,
        )


def test_correlate_csv_is_deterministic(make_benchmark, tiny, tmp_path):
    path = make_benchmark(monotone_rows(distinct_random_cells(16), tiny))
    outputs = []
    for jobs in (1, 4):
        report = cmd_correlate(path, "cifar10", MeasureKind.AVG_DEG, tiny, [0, 1], jobs, progress=False)
        out = tmp_path / f"jobs{jobs}.csv"
        write_frame(report.to_frame(), str(out))
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    assert outputs[0].startswith(b"arch,score,val_acc,test_acc,rank_score,rank_acc\n")


def test_search_with_ground_truth_and_measure(make_benchmark, tiny):
    path = make_benchmark(monotone_rows(distinct_random_cells(30), tiny))
    runs = cmd_search(
        path, "cifar10", [GROUND_TRUTH, MeasureKind.AVG_DEG], tiny, [0], n=8, trials=6, seed=0,
        progress=False,
    )
    assert [run.metric for run in runs] == ["gt", "avg_deg"]
    gt = runs[0].summary
    assert gt.chosen_test.mean == gt.gt_test.mean
    measured = runs[1].summary
    # accuracy rises with avg_deg, so the proxy is perfect
    assert measured.chosen_test.mean == measured.gt_test.mean
    assert all(run.cpu_seconds > 0 for run in runs)


def test_search_subset_sharing(make_benchmark, tiny):
    path = make_benchmark(monotone_rows(distinct_random_cells(30), tiny))
    shared = cmd_search(path, "cifar10", [GROUND_TRUTH, MeasureKind.WEDGE], tiny, [0], 8, 4, 0,
                        progress=False)
    assert [r.sampled for r in shared[0].summary.results] == [
        r.sampled for r in shared[1].summary.results
    ]
    independent = cmd_search(path, "cifar10", [GROUND_TRUTH, MeasureKind.WEDGE], tiny, [0], 8, 4,
                             0, shared_subset=False, progress=False)
    assert [r.sampled for r in independent[0].summary.results] != [
        r.sampled for r in independent[1].summary.results
    ]


def test_bias_ground_truth_is_zero(make_benchmark, tiny):
    rows = [
        (render_nb201(cell), {"cifar100": (float(i), float(i))})
        for i, cell in enumerate(distinct_random_cells(20))
    ]
    path = make_benchmark(rows)
    report = cmd_bias(path, "cifar100", GROUND_TRUTH, tiny, [0], 0.1)
    assert report.bias == 0.0
    frame = bias_frame(report)
    assert list(frame.columns) == ["operation", "metric_freq", "gt_freq"]
    assert len(frame) == 5


def test_bias_with_measure(make_benchmark, tiny):
    rows = [
        (render_nb201(cell), {"cifar100": (float(i), float(i))})
        for i, cell in enumerate(distinct_random_cells(20))
    ]
    report = cmd_bias(make_benchmark(rows), "cifar100", MeasureKind.AVG_DEG, tiny, [0], 0.2,
                      progress=False)
    assert report.top_count == 4
    assert 0.0 <= report.bias <= 2.0


def test_stability_over_random_cells(tiny):
    report = cmd_stability(random_cells(12, 0), MeasureKind.AVG_DEG, tiny, [0, 1, 1], progress=False)
    assert len(report.pairs) == 1
    assert -1.0 <= report.rho_mean <= 1.0


def test_surrogate_grid():
    grid = surrogate_grid([1, 4, 4], [1, 2], modules=2, probe_resolution=4)
    assert [(s.channels, s.cells_per_module) for s in grid] == [(1, 1), (1, 2), (4, 1), (4, 2)]
    assert all(s.modules == 2 and s.probe_resolution == 4 for s in grid)


def test_sweep_over_surrogate_sizes(make_benchmark, tiny):
    path = make_benchmark(monotone_rows(distinct_random_cells(20), tiny))
    grid = surrogate_grid([1, 2], [1], modules=2, probe_resolution=4)
    points = cmd_sweep(path, "cifar10", MeasureKind.AVG_DEG, grid, [0], n=6, trials=4, seed=0,
                       progress=False)
    assert [p.surrogate for p in points] == grid
    # same trial subsets for every size, so the best-in-subset column agrees
    assert points[0].run.summary.gt_test == points[1].run.summary.gt_test
    # the benchmark was built from h=2 scores, so that row is a perfect proxy
    assert points[1].run.summary.chosen_test.mean == points[1].run.summary.gt_test.mean
    assert all(p.run.cpu_seconds > 0 for p in points)
    with pytest.raises(NASGraphError):
        cmd_sweep(path, "cifar10", MeasureKind.AVG_DEG, [], [0], 6, 4, 0)
