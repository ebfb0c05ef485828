import numpy as np
import pytest

from cross_modes.analysis import Sweep, beta_sweep, solve_cell
from cross_modes.analysis import sweeps
from cross_modes.base import CacheIntegrityError
from cross_modes.cache import ResultCache, cell_key
from cross_modes.geometry import CrossProblem
from cross_modes.policies import Fixed

betas = [1.0, 1.2, 1.5]
policy = Fixed(4, 32, label="tiny")


def _ratios(records):
    return [record.e_ratio for record in records]


def test_sweep():
    records = Sweep("ee", policy)(betas)
    assert [record.beta for record in records] == betas
    assert all(record.sym == "ee" and record.grid_set == "tiny" for record in records)
    assert all(record.e_ratio is not None and record.e_ratio > 0 for record in records)
    assert records[0].bound
    assert all(record.eigenvalue < record.threshold for record in records if record.bound)

    # start vectors are seeded, and the small cells take the dense path
    assert _ratios(Sweep("ee", policy)(betas)) == _ratios(records)
    assert _ratios(beta_sweep("ee", betas, policy=policy)) == _ratios(records)


def test_sweep_validation():
    sweep = Sweep("oo", policy)
    with pytest.raises(ValueError):
        sweep([1.2, 1.0])
    with pytest.raises(ValueError):
        sweep([0.9, 1.0])
    with pytest.raises(ValueError):
        sweep([1.0, 1.0])

    # turning the cross swaps even-odd and odd-even, so a one-class sweep refuses beta < 1
    with pytest.raises(ValueError, match="sweep class oe"):
        Sweep("eo", policy)([0.8, 1.2])


def test_failed_cell():
    records = Sweep("ee", Fixed(4, 30))([1.0])
    assert not records[0].bound and records[0].e_ratio is None
    assert records[0].error.startswith("InvalidGridError")


def test_threads():
    records = Sweep("eo", policy, n_jobs=2)(betas)
    assert np.allclose(_ratios(records), _ratios(Sweep("eo", policy)(betas)), rtol=1e-12)


def test_cache(tmp_path, monkeypatch):
    cache = ResultCache(tmp_path)
    records = Sweep("ee", policy, cache=cache)(betas)
    assert len(list(tmp_path.glob("*.dill"))) == len(betas)

    def no_solve(*args, **kwargs):
        raise AssertionError("cache miss")

    monkeypatch.setattr(sweeps, "solve_cell", no_solve)
    cached = Sweep("ee", policy, cache=cache)(betas)
    assert _ratios(cached) == _ratios(records)
    assert all(record.t_run is None for record in cached)

    key = cell_key(CrossProblem(1.0, "ee", 4.0), 32, 1e-9)
    assert key in cache and cache.get(key)["eigenvector"] is not None
    with pytest.raises(CacheIntegrityError):
        cache.put(key, records[0]._replace(e_ratio=1.1 * records[0].e_ratio))

    # an identical record is accepted
    cache.put(key, records[0])

    cache.clear()
    assert key not in cache


def test_full_domain():
    problem = CrossProblem(1.0, "ee", 4.0)
    quarter, _ = solve_cell(problem, 32)
    full, vector = solve_cell(problem, 32, full=True)
    assert np.isclose(full.e_ratio, quarter.e_ratio, rtol=1e-7)
    assert vector.size > 300


if __name__ == "__main__":
    test_sweep()
    test_sweep_validation()
    test_failed_cell()
    test_threads()
    test_full_domain()
