import json
import subprocess
import sys

import pytest

from cycformality.cli import EXIT_FAIL, EXIT_IO, EXIT_OK, EXIT_USAGE, main, read_config

FAST = ["--samples", "16384"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_selftest(capsys):
    code, out, _ = run(capsys, "algebra", "selftest", "--count", "20")
    assert code == EXIT_OK
    assert out.strip().endswith("selftest: PASS")


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as e:
        main(["star", "fly"])
    assert e.value.code == EXIT_USAGE


def test_graphs_enumerate(capsys):
    code, out, _ = run(capsys, "graphs", "enumerate", "--m", "1", "--n", "1", "--outdegrees", "2")
    assert code == EXIT_OK
    assert out.strip().splitlines()[-1] == "# 6 graphs"
    code, out, _ = run(capsys, "graphs", "enumerate", "--m", "2", "--n", "0", "--outdegrees", "1,1",
                       "--no-tadpoles", "--format", "json")
    assert json.loads(out)["count"] == 4


def test_outdegree_count_mismatch(capsys):
    code, _, err = run(capsys, "graphs", "enumerate", "--m", "2", "--n", "0", "--outdegrees", "1")
    assert code == EXIT_USAGE and "outdegrees" in err


def test_weight_compute(capsys, tmp_path):
    cache = tmp_path / "w.txt"
    code, out, _ = run(capsys, "weight", "compute", "--graph", "1 2 | b1 b2", "--anchor", "0.5j",
                       "--cache", str(cache), *FAST)
    assert code == EXIT_OK
    assert out.startswith("1 2 | b1 b2  u=[0]  ")
    value, _, sigma = out.split("  ")[2].split()
    assert abs(float(value) - 0.5) <= 3 * float(sigma)
    assert cache.read_text().count("\n") == 1


def test_weight_compute_exact_anchor(capsys):
    code, out, _ = run(capsys, "weight", "compute", "--graph", "1 1 | b1", *FAST)
    assert code == EXIT_OK and " 1.000000 +- " in out


def test_sample_floor(capsys):
    code, _, err = run(capsys, "weight", "compute", "--graph", "1 1 | b1", "--samples", "1000")
    assert code == EXIT_USAGE and "at least" in err


def test_bad_graph_text(capsys):
    code, _, err = run(capsys, "weight", "compute", "--graph", "1 1 | b1 b1", *FAST)
    assert code == EXIT_USAGE and "double edge" in err


def test_weight_relation_single_graph(capsys, tmp_path):
    code, out, _ = run(capsys, "weight", "relations", "--graph", "2 2 | i1 | b2 i1", "--sigma-ceiling", "1",
                       "--cache", str(tmp_path / "w.txt"), *FAST)
    assert code == EXIT_OK
    assert "PASS" in out.splitlines()[-1]


def test_linfty_exact_case(capsys, tmp_path):
    code, out, _ = run(capsys, "linfty", "check", "--input", "x2 d1 + d2", "--cache", str(tmp_path / "w"), *FAST)
    assert code == EXIT_OK


def test_linfty_needs_input(capsys):
    code, _, err = run(capsys, "linfty", "check", *FAST)
    assert code == EXIT_USAGE


def test_failed_check_exit_code(capsys, tmp_path):
    # at these sample sizes the largest sigma exceeds a tiny ceiling
    code, out, _ = run(capsys, "cyclic", "check", "--input", "x1 d1^d2", "--sigma-ceiling", "1e-9",
                       "--cache", str(tmp_path / "w"), *FAST)
    assert code == EXIT_FAIL
    assert out.strip().endswith("FAIL")


def test_star_assoc_three_dimensions(capsys, tmp_path):
    code, out, _ = run(capsys, "star", "assoc", "--poisson", "hbar x3 d1^d2", "--dim", "3", "--order", "2",
                       "--sigma-ceiling", "1", "--cache", str(tmp_path / "w"), *FAST)
    assert code == EXIT_OK, out


def test_star_build_and_reload(capsys, tmp_path):
    path = tmp_path / "star.txt"
    cache = str(tmp_path / "w")
    code, out, _ = run(capsys, "star", "build", "--poisson", "hbar d1^d2", "--order", "2",
                       "--output", str(path), "--cache", cache, *FAST)
    assert code == EXIT_OK
    assert path.read_text().startswith("# star product, dim 2, order 2")
    code, out, _ = run(capsys, "star", "closed", "--star", str(path), "--sigma-ceiling", "1", *FAST)
    assert code == EXIT_OK


def test_star_non_unimodular(capsys):
    code, _, err = run(capsys, "star", "build", "--poisson", "hbar x1 d1^d2", "--order", "1", *FAST)
    assert code == EXIT_USAGE and "Maurer-Cartan" in err


def test_missing_star_file(capsys, tmp_path):
    code, _, _ = run(capsys, "star", "assoc", "--star", str(tmp_path / "nope.txt"), *FAST)
    assert code == EXIT_IO


def test_missing_config_file(capsys, tmp_path):
    code, _, _ = run(capsys, "algebra", "selftest", "--config", str(tmp_path / "nope.cfg"))
    assert code == EXIT_IO


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nsamples = 16384\nseed = 0x10\nformat = json\n")
    code, out, _ = run(capsys, "weight", "compute", "--graph", "1 2 | b1 b2", "--anchor", "0.5j",
                       "--config", str(cfg))
    data = json.loads(out)
    assert code == EXIT_OK and data["seed"] == 16 and data["samples"] == 16384
    code, out, _ = run(capsys, "weight", "compute", "--graph", "1 2 | b1 b2", "--anchor", "0.5j",
                       "--config", str(cfg), "--seed", "17")
    assert json.loads(out)["seed"] == 17


def test_config_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    with pytest.raises(ValueError):
        read_config(str(cfg))


def test_cache_from_environment(capsys, tmp_path, monkeypatch):
    path = tmp_path / "env.txt"
    monkeypatch.setenv("CYCFORMALITY_CACHE", str(path))
    run(capsys, "weight", "compute", "--graph", "1 2 | b1 b2", "--anchor", "0.5j", *FAST)
    assert path.exists()


def test_json_report_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, _, _ = run(capsys, "cyclic", "check", "--input", "d1", "--json", str(path),
                     "--cache", str(tmp_path / "w"), *FAST)
    data = json.loads(path.read_text())
    assert code == EXIT_OK and data["passed"]
    rep = data["reports"][0]
    assert set(rep) == {"name", "passed", "max_sigma", "tol_sigmas", "sigma_ceiling", "notes", "rows"}


def test_repeated_runs_are_byte_identical(capsys, tmp_path):
    cache = str(tmp_path / "w")
    args = ["linfty", "check", "--input", "x1 d1^d2", "--sigma-ceiling", "1", "--cache", cache, *FAST]
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    _, cold, _ = run(capsys, *args[:-4], "--cache", str(tmp_path / "other"), *FAST)
    assert first == second == cold


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "cycformality.cli", "graphs", "enumerate", "--m", "1",
                          "--n", "1", "--outdegrees", "1", "--no-tadpoles"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.splitlines() == ["1 1 | b0", "1 1 | b1", "# 2 graphs"]
