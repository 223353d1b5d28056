import json

import pytest

from undominated import cyclic_instance, CyclicInstanceSpec, parse_election
from undominated.cli import main
from undominated.election import format_election, random_election
from undominated._util import sub_rng


@pytest.fixture
def e3_file(tmp_path):
    path = tmp_path / "e3.elect"
    path.write_text("3 3\n0 1 2\n1 2 0\n2 0 1\n")
    return str(path)


def test_gen_adversarial_matches_library(capsys):
    assert main(["gen", "--adversarial", "k=3", "ell=5"]) == 0
    out = capsys.readouterr().out
    e = parse_election(out)
    assert e == cyclic_instance(CyclicInstanceSpec(3, 5))


def test_gen_random_valid(capsys):
    assert main(["gen", "--random", "n=3", "m=3", "seed=1"]) == 0
    e = parse_election(capsys.readouterr().out)
    assert e.n == 3 and e.m == 3


def test_gen_rejects_bad_params():
    assert main(["gen", "--random", "n=0", "m=3"]) == 2
    assert main(["gen", "--random"]) == 2
    assert main(["gen"]) == 2
    assert main(["gen", "--random", "--adversarial", "n=1", "m=1", "k=1", "ell=2"]) == 2


def test_verify_pass_and_fail(e3_file):
    assert main(["verify", e3_file, "--committee", "0,1", "--t", "1", "--alpha", "0.5"]) == 0
    assert main(["verify", e3_file, "--committee", "0", "--t", "1", "--alpha", "0.5"]) == 1


def test_verify_bad_committee_string(e3_file):
    assert main(["verify", e3_file, "--committee", "a,b", "--t", "1", "--alpha", "0.5"]) == 2


def test_solve_usage_errors(e3_file):
    assert main(["solve", e3_file, "--t", "3", "--alpha", "0"]) == 2
    assert main(["solve", e3_file, "--t", "0", "--alpha", "0.5"]) == 2
    assert main(["solve", "missing.elect", "--t", "1", "--alpha", "0.5"]) == 2


def test_solve_t1_on_e3(e3_file, tmp_path):
    report = tmp_path / "run.json"
    code = main(["solve", e3_file, "--t", "1", "--alpha", "0.5",
                 "--report", str(report), "--seed", "3"])
    assert code == 0
    doc = json.loads(report.read_text())
    assert doc["verifier"]["pass"] is True
    assert len(doc["committee"]) <= 3


def test_solve_vacuous_alpha_one(tmp_path):
    e = random_election(6, 8, sub_rng(4, 0))
    path = tmp_path / "r.elect"
    path.write_text(format_election(e))
    assert main(["solve", str(path), "--t", "2", "--alpha", "1", "--seed", "1"]) == 0


def test_solve_exit_three_on_non_convergence(tmp_path):
    e = random_election(5, 8, sub_rng(11, 0))
    path = tmp_path / "r.elect"
    path.write_text(format_election(e))
    cfg = tmp_path / "solver.json"
    cfg.write_text(json.dumps({
        "max_iters": 2, "restarts": 1, "scratch_polish_sigmas": [],
        "stall_window": 1000000000,
    }))
    code = main(["solve", str(path), "--t", "1", "--alpha", "0.5",
                 "--solver-config", str(cfg)])
    assert code == 3


def test_oracle_subcommand(e3_file, capsys):
    assert main(["oracle", e3_file, "--t", "1", "--alpha", "1/2", "--size-cap", "3"]) == 0
    assert "min size 2" in capsys.readouterr().err


def test_tables_alpha_k_csv(capsys):
    assert main(["tables", "--which", "alpha_k", "--k-max", "4", "--csv"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[1] == "input,value"
    assert "2,0.750000" in out


def test_lowerbound_small(tmp_path):
    report = tmp_path / "lb.json"
    assert main(["lowerbound", "--k", "2", "--ell", "3", "--t", "1",
                 "--report", str(report)]) == 0
    doc = json.loads(report.read_text())
    assert doc["result"]["certified"] is True


def test_report_bytes_independent_of_jobs(e3_file, tmp_path):
    outs = []
    for jobs in ("1", "8"):
        path = tmp_path / f"lb{jobs}.json"
        assert main(["lowerbound", "--k", "2", "--ell", "3", "--t", "1",
                     "--jobs", jobs, "--report", str(path), "--witnesses"]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_bench_runs(capsys):
    assert main(["bench", "--n", "6", "--m", "4", "--draws", "200"]) == 0
    out = capsys.readouterr().out
    assert "backend" in out
