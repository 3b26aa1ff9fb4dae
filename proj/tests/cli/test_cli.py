import csv
import json
import os
import pathlib
import subprocess

import jsonschema
import pytest

BIN = os.environ.get("OTKIT_BIN", "otkit")
SCHEMAS = pathlib.Path(__file__).resolve().parents[2] / "schemas"


def run(*args, cwd):
    env = dict(os.environ, OTKIT_THREADS="1")
    return subprocess.run([BIN, *map(str, args)], cwd=cwd, env=env,
                          capture_output=True, text=True)


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def gen(tmp, name, n, d=2, seed=1, mode="unbalanced"):
    r = run("gen", "--n", n, "--d", d, "--seed", seed, "--mode", mode, "-o", name, cwd=tmp)
    assert r.returncode == 0, r.stderr
    return name


def write_csv(path, rows, dim):
    header = [f"x{i + 1}" for i in range(dim)] + ["w"]
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


@pytest.fixture
def tmp(tmp_path):
    return tmp_path


def test_gen_is_deterministic(tmp):
    gen(tmp, "a.csv", 50, seed=9)
    gen(tmp, "b.csv", 50, seed=9)
    assert (tmp / "a.csv").read_bytes() == (tmp / "b.csv").read_bytes()


def test_gen_probability_mass(tmp):
    gen(tmp, "p.csv", 300, d=1, mode="probability")
    with open(tmp / "p.csv") as f:
        total = sum(float(r["w"]) for r in csv.DictReader(f))
    assert abs(total - 1.0) <= 1e-12


def test_gen_three_dimensions(tmp):
    gen(tmp, "c.csv", 4, d=3)
    header = (tmp / "c.csv").read_text().splitlines()[0].split(",")
    assert header == ["x1", "x2", "x3", "w"]


def test_uot_result_and_manifest(tmp):
    gen(tmp, "a.csv", 30, seed=1)
    gen(tmp, "b.csv", 20, seed=2)
    r = run("uot", "a.csv", "b.csv", "-o", "u.json", cwd=tmp)
    assert r.returncode == 0, r.stderr
    out = json.loads((tmp / "u.json").read_text())
    jsonschema.validate(out, schema("uot"))
    assert out["converged"]
    assert abs(out["uot_value"] - out["dual_value"]) < 1e-8 * max(1.0, abs(out["uot_value"]))
    man = json.loads((tmp / out["manifest"]).read_text())
    jsonschema.validate(man, schema("manifest"))
    assert man["subcommand"] == "uot"
    assert [i["path"] for i in man["inputs"]] == ["a.csv", "b.csv"]
    assert man["outputs"] == ["u.json"]


def test_uot_is_deterministic(tmp):
    gen(tmp, "a.csv", 30, seed=1)
    gen(tmp, "b.csv", 20, seed=2)
    first = run("uot", "a.csv", "b.csv", "--backend", "nfft", cwd=tmp)
    second = run("uot", "a.csv", "b.csv", "--backend", "nfft", cwd=tmp)
    assert first.returncode == 0, first.stderr
    assert first.stdout == second.stdout


def test_uot_debias_identical_inputs(tmp):
    gen(tmp, "a.csv", 40, seed=3)
    r = run("uot", "a.csv", "a.csv", "--debias", cwd=tmp)
    assert r.returncode == 0, r.stderr
    assert abs(json.loads(r.stdout)["sd"]) < 1e-8


def test_missing_file_writes_nothing(tmp):
    gen(tmp, "a.csv", 10)
    r = run("uot", "a.csv", "missing.csv", "-o", "u.json", cwd=tmp)
    assert r.returncode == 2
    assert r.stderr
    assert not (tmp / "u.json").exists()
    assert not (tmp / "u.json.manifest.json").exists()


def test_invalid_flag_values(tmp):
    gen(tmp, "a.csv", 10)
    assert run("uot", "a.csv", "a.csv", "--lambda", "-1", cwd=tmp).returncode == 2
    assert run("uot", "a.csv", "a.csv", "--backend", "gpu", cwd=tmp).returncode == 2
    assert run("uot", "a.csv", "a.csv", "--no-such-flag", cwd=tmp).returncode == 2
    assert run("gen", "--n", "5", "--d", "4", cwd=tmp).returncode == 2


def test_solver_failure_exit_code(tmp):
    gen(tmp, "a.csv", 30, seed=1)
    gen(tmp, "b.csv", 20, seed=2)
    r = run("uot", "a.csv", "b.csv", "--max-iter", "2", "--tol", "1e-15", cwd=tmp)
    assert r.returncode == 3
    assert json.loads(r.stdout)["converged"] is False


def test_dense_guard(tmp):
    gen(tmp, "big.csv", 20001, d=1)
    r = run("uot", "big.csv", "big.csv", cwd=tmp)
    assert r.returncode == 2
    assert "allow-dense-large" in r.stderr


def test_mmd_identical_inputs(tmp):
    gen(tmp, "a.csv", 50)
    r = run("mmd", "a.csv", "a.csv", "--kernel", "laplace", cwd=tmp)
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    jsonschema.validate(out, schema("mmd"))
    assert out["mmd"] == 0.0


def test_mmd_verify(tmp):
    gen(tmp, "a.csv", 200, seed=1)
    gen(tmp, "b.csv", 150, seed=2)
    r = run("mmd", "a.csv", "b.csv", "--backend", "nfft", "--verify", cwd=tmp)
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    jsonschema.validate(out, schema("mmd"))
    assert out["residual_vs_dense"] < 1e-6


def test_energy_kernel_needs_equal_masses(tmp):
    gen(tmp, "a.csv", 20, seed=1)
    gen(tmp, "b.csv", 20, seed=2)
    assert run("mmd", "a.csv", "b.csv", "--kernel", "energy", cwd=tmp).returncode == 2
    assert run("mmd", "a.csv", "b.csv", "--kernel", "energy", "--force", cwd=tmp).returncode == 0


def test_c_star_reg_unit_atoms(tmp):
    write_csv(tmp / "u.csv", [[0.0, 0.0, 1.0]], 2)
    r = run("bounds", "--check", "c-star-reg", "u.csv", "u.csv", cwd=tmp)
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    jsonschema.validate(out, schema("bounds"))
    assert out["report"]["c_star"] == pytest.approx(1.0, abs=1e-12)


def test_bounds_checks_hold(tmp):
    gen(tmp, "a.csv", 25, d=1, seed=1)
    gen(tmp, "b.csv", 25, d=1, seed=2)
    gen(tmp, "p.csv", 25, d=1, seed=3, mode="probability")
    gen(tmp, "q.csv", 25, d=1, seed=4, mode="probability")
    for check, pair in [("c-star", "ab"), ("wasserstein", "ab"), ("frobenius", "pq"),
                        ("holder", "pq"), ("holder-unbalanced", "ab"), ("elementary", "ab")]:
        r = run("bounds", "--check", check, f"{pair[0]}.csv", f"{pair[1]}.csv", cwd=tmp)
        assert r.returncode == 0, (check, r.stderr)
        out = json.loads(r.stdout)
        jsonschema.validate(out, schema("bounds"))
        assert out["gap"] >= -1e-10
        assert out["violated"] is False


def test_violation_exit_code_keeps_report(tmp):
    gen(tmp, "a.csv", 20, d=1, seed=1)
    gen(tmp, "b.csv", 20, d=1, seed=2)
    r = run("bounds", "--check", "c-star", "a.csv", "b.csv", "--violation-tol", "-1e6",
            "-o", "v.json", cwd=tmp)
    assert r.returncode == 4
    out = json.loads((tmp / "v.json").read_text())
    assert out["violated"] is True


def test_holder_trials(tmp):
    r = run("bounds", "--check", "holder", "--trials", "5", "--n", "20", cwd=tmp)
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    jsonschema.validate(out, schema("bounds"))
    assert len(out["report"]["gaps"]) == 5


def test_bench_row_count(tmp):
    r = run("bench", "--task", "uot", "--sizes", "40,60", "--dims", "1,2",
            "--backends", "dense,nfft", "-o", "b.csv", cwd=tmp)
    assert r.returncode == 0, r.stderr
    with open(tmp / "b.csv") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 8
    assert list(rows[0]) == ["task", "backend", "n", "d", "kernel", "seconds",
                             "peak_mem_bytes_estimate", "iterations"]
    assert (tmp / "b.csv.manifest.json").exists()


def test_sweep_single_eta(tmp):
    gen(tmp, "p.csv", 30, d=1, seed=1, mode="probability")
    r = run("sweep", "p.csv", "p.csv", "--etas", "10", cwd=tmp)
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader(r.stdout.splitlines()))
    assert len(rows) == 1
    assert abs(float(rows[0]["sd"])) < 1e-8


def test_threads_flag_keeps_results(tmp):
    gen(tmp, "a.csv", 300, seed=1)
    gen(tmp, "b.csv", 300, seed=2)
    one = run("--threads", "1", "mmd", "a.csv", "b.csv", cwd=tmp)
    four = run("--threads", "4", "mmd", "a.csv", "b.csv", cwd=tmp)
    assert one.returncode == 0 and four.returncode == 0
    assert json.loads(one.stdout)["mmd_squared"] == pytest.approx(
        json.loads(four.stdout)["mmd_squared"], rel=1e-12)
