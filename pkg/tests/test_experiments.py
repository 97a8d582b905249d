import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from primecf import cli
from primecf.errors import DomainError
from primecf.experiments import (
    REGISTRY,
    ExperimentConfig,
    ExperimentReport,
    Row,
    derive_seed,
    mix64,
    parse_config_text,
    resolve,
    run_experiment,
    to_csv,
    to_json,
    write_report,
)
from primecf.experiments.report import CSV_HEADER
from primecf.trajectory_stats import check_hitting_params

EXPERIMENTS = ["freq", "tail", "bcl-counts", "trimmed-slln", "slln-dichotomy", "funny-norm", "ratios",
               "moments", "weak-law", "max-law", "poisson", "clt", "diamond-vaaler"]


def small(name, **kw):
    base = dict(n=3000, trajectories=10)
    if name == "poisson":
        base = dict(n=20, trajectories=10)
    return ExperimentConfig(name, **(base | kw))


def test_splitmix_reference_value():
    # first SplitMix64 output for state 0
    assert mix64(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF


def test_derived_seeds_are_distinct_over_a_million_indices():
    seeds = np.fromiter((derive_seed(12345, i) for i in range(10**6)), dtype=np.uint64, count=10**6)
    assert np.unique(seeds).size == seeds.size


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**40))
def test_derive_seed_is_pure_and_64_bit(master, index):
    s = derive_seed(master, index)
    assert s == derive_seed(master, index)
    assert 0 <= s < 2**64


def test_master_seed_avalanche():
    a = [derive_seed(1, i) for i in range(10_000)]
    b = [derive_seed(2, i) for i in range(10_000)]
    assert np.mean([x != y for x, y in zip(a, b)]) >= 0.99
    bits = np.mean([bin(x ^ y).count("1") for x, y in zip(a, b)])
    assert 30 < bits < 34


def test_registry_lists_every_experiment():
    assert list(REGISTRY) == EXPERIMENTS
    assert all(exp.anchor for exp in REGISTRY.values())


@pytest.mark.parametrize("name", EXPERIMENTS)
def test_every_experiment_runs_and_is_deterministic(name):
    cfg = small(name, n=30_000) if name == "funny-norm" else small(name)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert a.rows and to_csv(a) == to_csv(b)
    assert all(r.experiment == name and r.verdict in ("pass", "fail", "report-only") for r in a.rows)
    assert a.version == "0.1.0" and a.wall_clock >= 0


@pytest.mark.parametrize("name", ["freq", "max-law", "poisson", "moments"])
def test_thread_count_does_not_change_results(name):
    cfg = small(name, trajectories=19)
    assert to_csv(run_experiment(cfg)) == to_csv(run_experiment(cfg.replace(threads=4)))


def test_freq_emits_named_row():
    report = run_experiment(small("freq"))
    assert report.rows[0].statistic == "prime_digit_frequency"
    assert report.row("prime_digit_frequency").reference == pytest.approx(0.36609, abs=1e-5)


def test_defaults_are_filled_per_experiment():
    cfg = resolve(ExperimentConfig("poisson"))
    assert (cfg.level, cfg.theta, cfg.modulus, cfg.initial_law) == (50, 0.5, 4, "lebesgue")
    assert resolve(ExperimentConfig("freq")).initial_law == "gauss"
    assert resolve(ExperimentConfig("moments", gamma=2.0)).initial_law == "lebesgue"
    assert resolve(ExperimentConfig("moments")).gamma == 0.5
    assert resolve(ExperimentConfig("freq", n=7)).n == 7


def test_validation_errors_name_the_violated_condition():
    with pytest.raises(DomainError, match="unknown experiment"):
        resolve(ExperimentConfig("nope"))
    with pytest.raises(DomainError, match="gamma = 1"):
        resolve(ExperimentConfig("moments", gamma=1.0))
    with pytest.raises(DomainError, match="trajectories must be positive"):
        resolve(ExperimentConfig("freq", trajectories=0))
    with pytest.raises(DomainError, match="backend"):
        resolve(ExperimentConfig("freq", backend="abacus"))
    with pytest.raises(DomainError, match="lebesgue"):
        resolve(ExperimentConfig("freq", backend="lazy-real"))


@pytest.mark.parametrize("level, theta, modulus", [(3, 0.5, 4), (50, 1.5, 4), (50, 0.5, 1)])
def test_poisson_validation_matches_core_predicate(level, theta, modulus):
    with pytest.raises(DomainError) as core:
        check_hitting_params(level, 10, theta, modulus)
    with pytest.raises(DomainError) as config:
        resolve(ExperimentConfig("poisson", n=10, level=level, theta=theta, modulus=modulus))
    assert str(core.value) == str(config.value)


def test_lazy_real_backend_runs():
    report = run_experiment(small("freq", backend="lazy-real", initial_law="lebesgue", n=300, trajectories=3))
    assert report.row("prime_digit_frequency").n == 300


def report_fixture():
    rows = [Row("x", "a", 10, 2, 1, 0.1, math.nan, 0.0, 1.0, "pass"), Row("x", "b", 0, 2, 1, 1 / 3)]
    return ExperimentReport("x", {"experiment": "x", "n": 10}, rows, "0.1.0", 1.5)


def test_csv_schema_and_number_format():
    text = to_csv(report_fixture())
    lines = text.split("\n")
    assert lines[0] == CSV_HEADER
    assert lines[1] == "x,a,10,2,1,0.10000000000000001,,0,1,pass"
    assert lines[2].split(",")[5] == "0.33333333333333331"
    assert text.endswith("\n") and "\r" not in text


def test_json_mirrors_csv():
    report = run_experiment(small("clt"))
    doc = json.loads(to_json(report))
    table = list(csv.DictReader(io.StringIO(to_csv(report))))
    assert len(doc["rows"]) == len(table)
    for j, c in zip(doc["rows"], table):
        for key in ("value", "reference", "err_low", "err_high"):
            assert (j[key] is None and c[key] == "") or j[key] == float(c[key])
        assert j["statistic"] == c["statistic"] and j["verdict"] == c["verdict"]
    assert "wall_clock" not in doc and doc["config"]["experiment"] == "clt"


def test_write_report(tmp_path):
    report = report_fixture()
    path = write_report(report, tmp_path / "r.csv")
    assert path.read_bytes() == to_csv(report).encode()
    write_report(report, tmp_path / "r.json", "json")
    assert json.loads((tmp_path / "r.json").read_text())["rows"][1]["reference"] is None
    with pytest.raises(OSError, match="missing"):
        write_report(report, tmp_path / "missing" / "r.csv")
    with pytest.raises(ValueError):
        write_report(report, tmp_path / "r.txt", "txt")


def test_row_rejects_unknown_verdict():
    with pytest.raises(ValueError):
        Row("x", "a", 1, 1, 1, 0.0, verdict="maybe")


def test_config_parsing():
    cfg = parse_config_text("# comment\nexperiment = poisson\ninitial-law = lebesgue  # trailing\nn = 1e2\ntheta=0.25\n")
    assert cfg == {"experiment": "poisson", "initial_law": "lebesgue", "n": 100, "theta": 0.25}
    for bad, match in [("nonsense", "key = value"), ("colour = red", "unknown key"), ("n = 1.5", "cannot parse")]:
        with pytest.raises(DomainError, match=match):
            parse_config_text(bad)


def test_cli_list(capsys):
    assert cli.main(["--list"]) == 0
    out = capsys.readouterr().out
    assert all(name in out for name in EXPERIMENTS)


def test_cli_config_then_overrides(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("experiment = freq\nn = 500\ntrajectories = 3\nseed = 9\n")
    out = tmp_path / "out.csv"
    assert cli.main(["--config", str(cfg), "--n", "40000", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert rows[0]["n"] == "40000" and rows[0]["seed"] == "9" and rows[0]["trajectories"] == "3"
    assert "wall clock" in capsys.readouterr().err


def test_cli_exit_codes(capsys):
    # 16 trajectories are far too few for the KS threshold, so the verdict is fail
    assert cli.main(["--experiment", "max-law", "--n", "2000", "--trajectories", "16"]) == 1
    assert cli.main(["--experiment", "moments", "--gamma", "1"]) == 2
    assert "gamma = 1" in capsys.readouterr().err
    assert cli.main(["--n", "5"]) == 2
    assert cli.main(["--experiment", "freq", "--n", "abc"]) == 2


def test_cli_json_to_stdout(capsys):
    assert cli.main(["--experiment", "freq", "--n", "50000", "--trajectories", "2", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["experiment"] == "freq"
