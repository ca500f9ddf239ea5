"""Flat key = value experiment files."""

import pytest

from config import DEFAULT_N_GRID, load_config_file
from errors import DomainError


def test_reads_scalars_and_lists(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# comment line\n"
        "\n"
        "alpha-mode = fixed   # trailing comment\n"
        "alpha_value = 0.25\n"
        "n_grid = 16, 64,256\n"
        "threshold_exponents = 1, 2.5\n"
        "trials = 40\n"
        "master_seed = 18446744073709551615\n",
        encoding="utf-8",
    )
    values = load_config_file(path)
    assert values == {
        "alpha_mode": "fixed",
        "alpha_value": 0.25,
        "n_grid": [16, 64, 256],
        "threshold_exponents": [1.0, 2.5],
        "trials": 40,
        "master_seed": 2 ** 64 - 1,
    }


def test_empty_file(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("", encoding="utf-8")
    assert load_config_file(path) == {}


@pytest.mark.parametrize("body", ["trails = 10\n", "trials 10\n", "trials = ten\n", "n_grid = 4, x\n"])
def test_rejected(tmp_path, body):
    path = tmp_path / "bad.cfg"
    path.write_text(body, encoding="utf-8")
    with pytest.raises(DomainError):
        load_config_file(path)


def test_missing_file(tmp_path):
    with pytest.raises(DomainError):
        load_config_file(tmp_path / "nope.cfg")


def test_default_grid_is_powers_of_two():
    assert DEFAULT_N_GRID[0] == 16 and DEFAULT_N_GRID[-1] == 4096
    assert all(b == 2 * a for a, b in zip(DEFAULT_N_GRID, DEFAULT_N_GRID[1:]))
