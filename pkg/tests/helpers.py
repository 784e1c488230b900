import json

from app.core.archspec import render_nb201, sample_random_cell

ALL_CONV3 = "|nor_conv_3x3~0|+|nor_conv_3x3~0|nor_conv_3x3~1|+|nor_conv_3x3~0|nor_conv_3x3~1|nor_conv_3x3~2|"
ALL_NONE = "|none~0|+|none~0|none~1|+|none~0|none~1|none~2|"
ALL_SKIP = "|skip_connect~0|+|skip_connect~0|skip_connect~1|+|skip_connect~0|skip_connect~1|skip_connect~2|"
MIXED = "|nor_conv_3x3~0|+|nor_conv_1x1~0|avg_pool_3x3~1|+|skip_connect~0|none~1|nor_conv_3x3~2|"

# NAS-Bench-101 style: two branches concatenated at the output node.
NB101_CELL = json.dumps(
    {
        "matrix": [[0, 1, 1, 0], [0, 0, 0, 1], [0, 0, 0, 1], [0, 0, 0, 0]],
        "ops": ["input", "conv3x3-bn-relu", "maxpool3x3", "output"],
    }
)

# Small enough that a full conversion takes milliseconds.
TINY_FLAGS = ["-h", "2", "-c", "1", "-m", "2", "--resolution", "4"]


def distinct_random_cells(count: int, start: int = 0):
    cells = {}
    seed = start
    while len(cells) < count:
        cell = sample_random_cell(seed)
        cells.setdefault(render_nb201(cell), cell)
        seed += 1
    return list(cells.values())


def write_benchmark(path, rows):
    """rows: iterable of (arch, {dataset: (val, test)})."""
    with open(path, "w", encoding="utf-8") as file:
        for arch, acc in rows:
            payload = {
                "arch": arch,
                "acc": {name: {"val": val, "test": test} for name, (val, test) in acc.items()},
            }
            file.write(json.dumps(payload) + "\n")
    return str(path)

