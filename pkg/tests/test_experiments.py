import json
import math
import time

import numpy as np
import pytest

from adapt_clifford.experiments import (
    CSV_COLUMNS,
    BatchConfig,
    FitError,
    InstanceResult,
    cnot_count,
    density_by_size,
    energy_density,
    estimate_alpha_bar,
    fit_density,
    fit_exponent,
    fit_power_law,
    make_solver,
    per_start_ratios,
    read_per_start,
    read_results,
    run_batch,
    success_rate,
    tts_benchmark,
    write_results,
)
from adapt_clifford.graph import gen_complete


def small_cfg(**kw):
    base = dict(family="complete", sizes=[6, 8], instances=3, solvers=["adapt-det", "sg"],
                master_seed=5, exact=True)
    base.update(kw)
    return BatchConfig(**base)


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        BatchConfig(family="torus")
    with pytest.raises(ValueError):
        BatchConfig(solvers=["magic"])
    with pytest.raises(ValueError):
        BatchConfig.from_dict({"family": "sk", "colour": 1})
    cfg = small_cfg()
    path = tmp_path / "cfg.json"
    path.write_text(cfg.to_json())
    assert BatchConfig.from_json(path) == cfg
    assert BatchConfig(family="regular", K=4).K_or_p == "4"
    assert BatchConfig(family="er", p=0.3).K_or_p == "0.3"


def test_solver_tags():
    g = gen_complete(8, seed=0)
    for tag in ("adapt-det", "adapt-rand", "gw:rounds=5", "local", "sg"):
        assert make_solver(tag)(g, 1).cut_value > 0
    with pytest.raises(ValueError):
        make_solver("gw:depth=3")


def test_batch_plumbing(tmp_path):
    out = tmp_path / "res.csv"
    results = run_batch(small_cfg(), out)
    assert len(results) == 2 * 3 * 2
    header = out.read_text().splitlines()[0].split(",")
    assert header == CSV_COLUMNS
    assert json.loads((tmp_path / "res.json").read_text())["config"]["family"] == "complete"
    back = read_results(out)
    for a, b in zip(results, back):
        assert a.row() == b.row()
    for r in results:
        assert not r.error
        assert 0 < r.ratio <= 1 + 1e-12
        assert r.cut_value == pytest.approx(r.total_weight / 2 - r.ising_energy)
    ps = read_per_start(tmp_path / "res.perstart.csv")
    assert len(ps) == 6 and all(len(v) == n for n, v in ps)
    direct = per_start_ratios(results)
    for (n1, a), (n2, b) in zip(ps, direct):
        assert n1 == n2 and np.allclose(a, b)


def test_batch_deterministic_across_runs():
    key = lambda rs: [(r.instance_seed, r.solver, r.cut_value) for r in rs]
    assert key(run_batch(small_cfg())) == key(run_batch(small_cfg()))
    assert key(run_batch(small_cfg())) != key(run_batch(small_cfg(master_seed=6)))


def test_batch_records_errors():
    cfg = small_cfg(family="regular", sizes=[5], K=3, solvers=["sg"], exact=False, instances=1)
    with pytest.raises(Exception):
        run_batch(cfg)  # odd n*K is rejected when the instance is generated


def test_batch_parallel_matches_serial():
    cfg = small_cfg(solvers=["adapt-det"])
    a = run_batch(cfg)
    b = run_batch(small_cfg(solvers=["adapt-det"], threads=2))
    assert [r.row()["cut_value"] for r in a] == [r.row()["cut_value"] for r in b]


def _result(n, energy, exact_e, family="complete"):
    return InstanceResult(family, n, "", 0, "x", "{}", 1.0, energy, 0.0, None, exact_e, None, 1.0)


def test_success_rate():
    rs = [_result(4, -1.0, -1.0), _result(4, -1.0 + 1e-12, -1.0), _result(4, -0.9, -1.0)]
    assert success_rate(rs) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        success_rate([])


def test_energy_density_sk_scaling():
    assert energy_density(_result(10, -3.0, None, family="sk")) == -0.6
    assert energy_density(_result(10, -3.0, None)) == -0.3


def test_fit_recovers_exact_law():
    sizes = [40, 60, 100, 140, 200]
    vals = [1.3 * n ** (-2 / 3) - 0.74 for n in sizes]
    fit = fit_power_law(sizes, vals)
    assert fit.q == pytest.approx(1.3, abs=1e-10)
    assert fit.limit_value == pytest.approx(-0.74, abs=1e-10)
    assert fit.residual < 1e-12
    results = [_result(n, v * n / 2, None, family="sk") for n, v in zip(sizes, vals) for _ in range(2)]
    assert fit_density(results).limit_value == pytest.approx(-0.74, abs=1e-10)
    assert density_by_size(results)[40][2] == 2
    with pytest.raises(FitError):
        fit_density(results, n_range=(40, 60))
    with pytest.raises(FitError):
        fit_power_law([10, 10], [1, 2])


def test_alpha_bar_degenerate():
    data = [(n, np.ones(n)) for n in (10, 12, 14) for _ in range(3)]
    res = estimate_alpha_bar(data)
    assert res.alpha_bar == 1.0
    assert res.alpha_bar_r <= res.alpha_bar
    assert np.all(np.isfinite(res.slopes))


def test_alpha_bar_synthetic_crossing():
    # every start clears 0.94 but fewer starts reach 0.99 as N grows
    rng = np.random.default_rng(0)
    data = []
    for n in (10, 20, 30, 40):
        for _ in range(5):
            good = 0.945 * np.ones(n)
            good[: 20 - n // 2] = 0.99
            data.append((n, good + rng.uniform(0, 1e-4, n)))
    res = estimate_alpha_bar(data, thresholds=np.round(np.arange(0.90, 1.0, 0.01), 2))
    assert res.alpha_bar == pytest.approx(0.94)
    assert res.crossing_found
    assert res.alpha_bar >= res.alpha_bar_r
    with pytest.raises(ValueError):
        estimate_alpha_bar(data, mode="other")
    with pytest.raises(FitError):
        estimate_alpha_bar([(10, np.ones(10))])


@pytest.mark.filterwarnings("ignore:timer resolution")
def test_tts_sleep_control():
    sizes = [4, 8, 16]
    cfg = BatchConfig(sizes=sizes, instances=2, solvers=[])
    solver = {"sleep": lambda g, seed: time.sleep(2e-5 * g.n ** 2)}
    res = tts_benchmark(cfg, instance_fn=lambda n, i: gen_complete(n, seed=i), solvers=solver)
    assert res.exponents["sleep"] == pytest.approx(2.0, abs=0.3)
    assert len(res.rows) == 3
    with pytest.raises(ValueError):
        tts_benchmark(BatchConfig(sizes=[4, 8, 12]), solvers=solver)


def test_fit_exponent():
    assert fit_exponent([1, 2, 4], [1, 8, 64]) == pytest.approx(3.0)


def test_cnot_count():
    assert cnot_count(5, "all-to-all") == 10
    assert cnot_count(5, "linear") == 44
    assert cnot_count(2, "linear") == 2
    with pytest.raises(ValueError):
        cnot_count(5, "ring")
    with pytest.raises(ValueError):
        cnot_count(1)


def test_write_results_roundtrip(tmp_path):
    rs = [_result(4, -1.0, -1.0)]
    rs[0].ratio = math.pi / 4
    write_results(rs, tmp_path / "x.csv")
    back = read_results(tmp_path / "x.csv")
    assert back[0].ratio == rs[0].ratio
    assert back[0].exact_optimum is None
