import pytest

from app.core.archspec import SurrogateConfig, parse_nb201_arch
from tests.helpers import MIXED, write_benchmark


@pytest.fixture
def tiny():
    return SurrogateConfig(channels=2, cells_per_module=1, modules=2, probe_resolution=4)


@pytest.fixture
def mixed_cell():
    return parse_nb201_arch(MIXED)


@pytest.fixture
def make_benchmark(tmp_path):
    def make(rows, name="bench.jsonl"):
        return write_benchmark(tmp_path / name, rows)

    return make
