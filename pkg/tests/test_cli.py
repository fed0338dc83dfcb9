import json
import os
import subprocess
import sys

import pytest

from fqbuilding.cli import UsageError, build_parser, main, parse_poly, parse_w1
from fqbuilding.gf import gf
from fqbuilding.rfunc import Poly, poly_one, poly_t


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run(
        [sys.executable, "-m", "fqbuilding.cli", *args],
        capture_output=True, text=True, env=env)
    return proc


def test_parse_poly():
    K = gf(2)
    t = poly_t(K)
    one = poly_one(K)
    assert parse_poly(K, "t") == t
    assert parse_poly(K, "t^2+t+1") == t * t + t + one
    assert parse_poly(K, "0,1") == t
    assert parse_poly(K, "1") == one
    K3 = gf(3)
    assert parse_poly(K3, "2*t^2-1") == Poly(K3, (2, 0, 2))
    with pytest.raises(UsageError):
        parse_poly(K, "5")  # coefficient out of range for q = 2
    with pytest.raises(UsageError):
        parse_poly(K, "x+1")


def test_parse_w1():
    K = gf(2)
    sub = parse_w1(K, 2, "e1")
    assert sub.dim == 1
    sub2 = parse_w1(K, 3, "e1+e2,e3")
    assert sub2.dim == 2
    with pytest.raises(UsageError):
        parse_w1(K, 2, "e1,e2")  # full space is not proper
    with pytest.raises(UsageError):
        parse_w1(K, 2, "e7")
    subj = parse_w1(K, 2, '[["1","t"]]')
    assert subj.dim == 1


def test_valid_config_accepted():
    assert main(["ball", "--q", "2", "--r", "2", "--ideal", "t",
                 "--radius", "2", "--out", os.devnull]) == 0


def test_usage_error_q6():
    proc = run_cli(["ball", "--q", "6", "--r", "2", "--radius", "1"])
    assert proc.returncode == 2
    assert "prime power" in proc.stderr


def test_usage_error_constant_ideal():
    proc = run_cli(["homology", "--q", "2", "--r", "2", "--ideal", "1",
                    "--radius", "1"])
    assert proc.returncode == 2
    assert "ideal" in proc.stderr


def test_usage_error_missing_radius():
    proc = run_cli(["ball", "--q", "2", "--r", "2"])
    assert proc.returncode == 2
    assert "radius" in proc.stderr


def test_ball_report_counts():
    proc = run_cli(["ball", "--q", "2", "--r", "2", "--radius", "1"])
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert data["command"] == "ball"
    assert data["result"]["counts"] == {
        "vertices": 4, "edges": 3, "simplices": {"0": 4, "1": 3}}
    assert data["timing"] is None
    assert any("truncated" in w for w in data["warnings"])


def test_ball_dot_output():
    proc = run_cli(["ball", "--q", "2", "--r", "2", "--radius", "1",
                    "--format", "dot"])
    assert proc.returncode == 0
    assert proc.stdout.startswith("graph ball {")
    assert proc.stdout.count("--") == 3


def test_byte_identical_runs():
    args = ["homology", "--q", "2", "--r", "2", "--ideal", "t", "--radius", "2"]
    a = run_cli(args)
    b = run_cli(args + ["--threads", "4"])
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_homology_report():
    proc = run_cli(["homology", "--q", "2", "--r", "2", "--ideal", "t",
                    "--radius", "2"])
    data = json.loads(proc.stdout)
    res = data["result"]
    assert res["chi"]["additive"] is True
    assert all(v["betti"] == 0 for v in res["full_reduced"]["degrees"].values())
    assert res["steinberg_window"]["rank_by_radius"] == {"1": 2, "2": 2}


def test_components_report():
    proc = run_cli(["components", "--q", "2", "--r", "2", "--ideal", "t",
                    "--radius", "2"])
    data = json.loads(proc.stdout)
    assert len(data["result"]["components"]) == 3


def test_stabilizer_with_brute():
    proc = run_cli(["stabilizer", "--q", "2", "--r", "2", "--ideal", "t",
                    "--radius", "1", "--with-brute"])
    data = json.loads(proc.stdout)
    rows = data["result"]["simplices"]
    assert all(row["brute_matches"] for row in rows)
    dims = {tuple(row["ids"]): row["dim"] for row in rows if row["d"] == 0}
    assert dims[(0,)] == 0


def test_stabilizer_ids_filter():
    proc = run_cli(["stabilizer", "--q", "2", "--r", "2", "--ideal", "t",
                    "--radius", "1", "--ids", "0,1"])
    data = json.loads(proc.stdout)
    assert len(data["result"]["simplices"]) == 1
    proc2 = run_cli(["stabilizer", "--q", "2", "--r", "2", "--ideal", "t",
                     "--radius", "1", "--ids", "1,2"])
    assert proc2.returncode == 2  # leaves of the tree are not adjacent


def test_stabilizer_orbit_search():
    base = ["stabilizer", "--q", "2", "--r", "2", "--ideal", "t",
            "--radius", "2", "--ids", "0,1"]
    found = json.loads(run_cli(base + ["--orbit", "8,1"]).stdout)
    orbit = found["result"]["orbit"]
    assert orbit["found"] is True and orbit["conclusive"] is True
    assert orbit["witness"]["matrix"] == [[[1], [0, 1]], [[], [1]]]
    missed = json.loads(run_cli(base + ["--orbit", "5,1"]).stdout)
    orbit2 = missed["result"]["orbit"]
    assert orbit2["found"] is False and orbit2["conclusive"] is False
    assert any("inconclusive" in w for w in missed["warnings"])
    bad = run_cli(base + ["--orbit", "4,1"])
    assert bad.returncode == 2


def test_unstable_map_with_sigma():
    proc = run_cli(["unstable-map", "--q", "2", "--r", "2", "--ideal", "t",
                    "--radius", "1", "--w1", "e1"])
    data = json.loads(proc.stdout)
    rows = data["result"]["simplices"]
    assert any(row["unstable"] for row in rows)
    assert all("in_sigma_region" in row for row in rows)
    for row in rows:
        if row["in_sigma_region"]:
            assert row["unstable"]


def test_restrict_command():
    proc = run_cli(["restrict", "--q", "2", "--r", "2", "--ideal", "t",
                    "--fine-ideal", "t^2", "--radius", "2"])
    data = json.loads(proc.stdout)
    assert data["result"]["verified_chain_map"] is True
    assert data["result"]["restriction"]["killed_per_degree"] == {"0": 3, "1": 3}
    bad = run_cli(["restrict", "--q", "2", "--r", "2", "--ideal", "t^2",
                   "--fine-ideal", "t", "--radius", "1"])
    assert bad.returncode == 2


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("q = 2\nr = 2\nideal = t\nradius = 1\n# comment\n")
    proc = run_cli(["ball", "--config", str(cfg)])
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["counts"]["vertices"] == 4
    # flags override the file
    proc2 = run_cli(["ball", "--config", str(cfg), "--radius", "2"])
    assert json.loads(proc2.stdout)["result"]["counts"]["vertices"] == 10


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("q = 2\nwibble = 3\n")
    proc = run_cli(["ball", "--config", str(cfg), "--r", "2", "--radius", "1"])
    assert proc.returncode == 2
    assert "wibble" in proc.stderr


def test_env_budget_override_exit_code():
    proc = run_cli(["ball", "--q", "2", "--r", "2", "--radius", "3"],
                   env_extra={"FQBUILDING_VERTEX_BUDGET": "5"})
    assert proc.returncode == 3
    assert "budget" in proc.stderr.lower()


def test_verify_subset():
    proc = run_cli(["verify", "--q", "2", "--r", "2",
                    "--checks", "enumeration-census,restriction-chain-map"])
    assert proc.returncode == 0
    assert "PASS enumeration-census" in proc.stdout
    assert "PASS restriction-chain-map" in proc.stdout
    json_start = proc.stdout.index("\n{") + 1
    data = json.loads(proc.stdout[json_start:])
    assert data["result"]["passed"] is True


def test_verify_unknown_check():
    proc = run_cli(["verify", "--q", "2", "--r", "2", "--checks", "nope"])
    assert proc.returncode == 2


def test_center_roundtrip(tmp_path):
    # export a ball, take a noncentral vertex as the next center
    proc = run_cli(["ball", "--q", "2", "--r", "2", "--radius", "1"])
    vert = json.loads(proc.stdout)["result"]["ball"]["vertices"][1]
    center_file = tmp_path / "center.json"
    center_file.write_text(json.dumps(vert["class"]))
    proc2 = run_cli(["ball", "--q", "2", "--r", "2", "--radius", "1",
                     "--center", str(center_file)])
    assert proc2.returncode == 0
    data = json.loads(proc2.stdout)
    assert data["result"]["counts"]["vertices"] == 4
    assert data["config"]["center"] == vert["class"]


def test_parser_rejects_unknown_command():
    with pytest.raises(SystemExit) as e:
        build_parser().parse_args(["frobnicate"])
    assert e.value.code == 2


def test_unwritable_out_is_clean_failure():
    proc = run_cli(["ball", "--q", "2", "--r", "2", "--radius", "1",
                    "--out", "/nonexistent-dir/x.json"])
    assert proc.returncode == 1
    assert "cannot write output" in proc.stderr


def test_timing_flag_fills_field():
    proc = run_cli(["ball", "--q", "2", "--r", "2", "--radius", "1", "--timing"])
    data = json.loads(proc.stdout)
    assert isinstance(data["timing"]["seconds"], float)
