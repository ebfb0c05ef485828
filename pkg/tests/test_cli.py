import json

import numpy as np
import pytest

from cross_modes.cli import (
    EXIT_INVALID_GRID,
    EXIT_OK,
    EXIT_UNBOUND,
    EXIT_USAGE,
    main,
)
from cross_modes.config import RunConfig, parse_range
from cross_modes.reference import EXTRAPOLATED_GROUND_RATIO
from cross_modes.results import read_records

tiny = ["--L", "4", "--N", "32"]


def test_parse_range():
    assert parse_range("80:200:40", int) == [80, 120, 160, 200]
    assert parse_range("1.0:1.1:0.05") == [1.0, 1.05, 1.1]
    assert parse_range("1.0, 1.05,1.1") == [1.0, 1.05, 1.1]
    assert parse_range("2:4") == [2.0, 3.0, 4.0]
    assert parse_range([1, 2], float) == [1.0, 2.0]
    with pytest.raises(ValueError):
        parse_range("1.2:1.0:0.1")
    with pytest.raises(ValueError):
        parse_range("1.0:1.2:0")


def test_config_file(tmp_path):
    file = tmp_path / "run.cfg"
    file.write_text(
        "# sweep settings\nclass = oo\nbetas = 1.0:1.1:0.05  # ascending\nno-cache = yes\n"
    )
    config = RunConfig.from_file(file)
    assert config.sym == "oo"
    assert config.no_cache is True
    assert config.beta_values() == [1.0, 1.05, 1.1]
    assert config.tol == 1e-9

    config.update({"tol": "1e-10", "window-x": "2,6", "beta": None})
    assert config.tol == 1e-10 and config.window("x") == (2.0, 6.0)
    assert config.window("y") is None

    file_json = tmp_path / "run.json"
    file_json.write_text(config.to_json())
    assert RunConfig.from_file(file_json) == config

    with pytest.raises(ValueError):
        config.update({"colour": "red"})
    file.write_text("class oo\n")
    with pytest.raises(ValueError):
        RunConfig.from_file(file)


def test_solve(tmp_path):
    file = tmp_path / "solve.json"
    argv = ["solve", "--class", "ee", "--beta", "1", *tiny, "--no-cache", "--json", str(file)]
    assert main(argv) == EXIT_OK

    data = json.loads(file.read_text())
    assert data["config"]["sym"] == "ee" and "version" in data["config"]
    (record,) = read_records(file)
    assert record.beta == 1.0 and record.bound
    assert record.L == 4.0 and record.N == 32
    assert 0.0 < record.e_ratio < 1.0


def test_exit_codes(tmp_path):
    assert main(["bogus"]) == EXIT_USAGE
    assert main(["solve", "--beta", "abc"]) == EXIT_USAGE
    assert main(["--version"]) == EXIT_OK
    assert main(["solve", "--beta", "1", "--L", "20", "--N", "602", "--no-cache"]) == (
        EXIT_INVALID_GRID
    )

    argv = ["solve", "--class", "oe", "--beta", "2", *tiny, "--no-cache", "--require-bound"]
    assert main(argv) == EXIT_UNBOUND

    config = tmp_path / "bad.cfg"
    config.write_text("colour = red\n")
    assert main(["solve", "--config", str(config)]) == EXIT_USAGE


def test_export_field(tmp_path):
    field, cut = tmp_path / "field.dat", tmp_path / "cut.dat"
    argv = ["export-field", "--beta", "1.2", *tiny, "--no-cache", "--field", str(field)]
    argv += ["--cut", str(cut)]
    assert main(argv) == EXIT_OK

    values = np.loadtxt(field)
    assert values.shape == (31, 31)
    assert np.unravel_index(np.argmax(values), values.shape) == (15, 15)
    header = field.read_text().splitlines()[1].split()
    assert header[1:] == ["32", "32", "4", "4", "1.2", "ee"]

    columns = np.loadtxt(cut)
    assert columns.shape == (31, 3)
    assert np.all(columns[:, 1] == 0.0)
    assert np.allclose(columns[:, 2], values[15])

    csv = tmp_path / "field.csv"
    argv = ["export-field", "--beta", "1.2", *tiny, "--no-cache", "--field", str(csv)]
    argv += ["--cut", str(cut)]
    assert main(argv) == EXIT_OK
    assert csv.read_text().startswith("x,y,value\n")


def test_cached_rerun(tmp_path):
    cache = str(tmp_path / "cache")
    outputs = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for output in outputs:
        argv = ["sweep", "--betas", "1.0:1.2:0.1", *tiny, "--cache-dir", cache]
        assert main(argv + ["--output", str(output)]) == EXIT_OK
    assert outputs[0].read_bytes() == outputs[1].read_bytes()
    assert outputs[0].read_text().splitlines()[0] == "beta,set,E/E_TH,ell_x,ell_y"

    records = read_records(outputs[0], "ee")
    assert [r.beta for r in records] == [1.0, 1.1, 1.2]


def test_predict_and_critical(tmp_path):
    assert main(["predict"]) == EXIT_OK
    assert main(["critical", "--class", "oo", "--records", "reference"]) == EXIT_OK
    assert main(["critical", "--class", "eo", "--method", "pole"]) == EXIT_OK

    file = tmp_path / "eo.json"
    argv = ["critical", "--class", "eo", "--method", "threshold", "--json", str(file)]
    assert main(argv) == EXIT_OK
    fit = json.loads(file.read_text())["config"]["critical"]["threshold"]
    assert 1.40 < fit["singularity"] < 1.53
    assert fit["extra"]["side"] == "above"


@pytest.mark.slow
def test_extrapolate(tmp_path):
    file, log = tmp_path / "extrapolate.json", tmp_path / "run.log"
    argv = ["extrapolate", "--beta", "1", "--L", "20", "--Ns", "80:880:40", "--no-cache"]
    assert main(argv + ["--json", str(file), "--log", str(log)]) == EXIT_OK
    fit = json.loads(file.read_text())["config"]["fit"]
    assert np.isclose(fit["params"]["a1"], EXTRAPOLATED_GROUND_RATIO, rtol=5e-3)
    assert "Conformal-map value 0.659611" in log.read_text()


@pytest.mark.slow
def test_predict_verify(tmp_path):
    argv = ["predict", "--verify", "--cache-dir", str(tmp_path / "cache")]
    assert main(argv) == EXIT_OK


if __name__ == "__main__":
    test_parse_range()
