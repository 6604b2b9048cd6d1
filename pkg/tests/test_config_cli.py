import json
import math
from pathlib import Path

import numpy as np
import pytest

from coronaglue import cli, glue, serialize
from coronaglue.config import ProblemConfig, load_config, save_config
from coronaglue.errors import ConfigError

REPO = Path(__file__).resolve().parents[1]
CONFIGS = REPO / "configs"


def _load(name):
    return load_config(CONFIGS / name)


def test_shipped_configs_parse_and_roundtrip(tmp_path):
    for name in (
        "worked_family.json",
        "worked_family_unscaled.json",
        "constant_family.json",
        "two_param_family.json",
        "three_center_family.json",
        "negative_common_zero.json",
        "negative_common_power.json",
    ):
        cfg = _load(name)
        out = tmp_path / name
        save_config(cfg, out)
        again = load_config(out)
        assert again.to_dict() == cfg.to_dict()
        save_config(again, tmp_path / ("b_" + name))
        assert (tmp_path / ("b_" + name)).read_bytes() == out.read_bytes()


def test_config_validation_errors(tmp_path):
    base = _load("worked_family.json").to_dict()

    bad = json.loads(json.dumps(base))
    bad["domain"]["bounds"] = [[0.0, 1.0], [0.0, 1.0], [0.0, 1.0]]
    with pytest.raises(ConfigError):
        ProblemConfig.from_dict(bad)

    bad = json.loads(json.dumps(base))
    bad["domain"]["bounds"] = [[1.0, 0.0]]
    with pytest.raises(ConfigError):
        ProblemConfig.from_dict(bad)

    bad = json.loads(json.dumps(base))
    bad["solver"]["order"] = 7
    with pytest.raises(ConfigError):
        ProblemConfig.from_dict(bad)

    bad = json.loads(json.dumps(base))
    bad["solver"]["axis_samples"] = 0
    with pytest.raises(ConfigError):
        ProblemConfig.from_dict(bad)

    bad = json.loads(json.dumps(base))
    bad["family"]["components"][0]["z_coeffs"] = []
    with pytest.raises(ConfigError):
        ProblemConfig.from_dict(bad)

    bad = json.loads(json.dumps(base))
    bad["family"]["components"][0]["z_coeffs"][0] = [[1.0], [2.0]]
    with pytest.raises(ConfigError):
        ProblemConfig.from_dict(bad)

    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)


def test_rescale_identity_and_scaling(tmp_path):
    cfg = _load("worked_family_unscaled.json")
    same = cfg.scaled(1.0)
    assert same.to_dict()["family"] == cfg.to_dict()["family"]
    assert same.rescale_factor == 1.0

    third = cfg.scaled(1.0 / 3.0)
    worked = _load("worked_family.json")
    assert third.to_dict()["family"] == worked.to_dict()["family"]
    assert third.rescale_factor == pytest.approx(1.0 / 3.0)

    doubled = cfg.scaled(2.0)
    top = doubled.components[1][0]
    assert top[0] == 4.0 and top[1] == 2.0


def test_solution_roundtrip(tmp_path, worked_solution):
    cfg = _load("worked_family.json")
    path = tmp_path / "sol.json"
    serialize.save_solution(cfg, worked_solution, path)
    cfg2, glued2 = serialize.load_solution(path)
    assert cfg2.to_dict() == cfg.to_dict()
    assert glued2.cover.centers == worked_solution.cover.centers
    assert glued2.residual_cert == worked_solution.residual_cert
    for a, b in zip(glued2.points.solutions, worked_solution.points.solutions):
        for ga, gb in zip(a.g, b.g):
            assert ga == gb
    # evaluation identical through the round trip
    z = np.array([0.3 + 0.4j, -0.2j])
    ga = glue.g_eval(worked_solution, z, [0.3])
    gb = glue.g_eval(glued2, z, [0.3])
    np.testing.assert_array_equal(ga, gb)


def test_solution_roundtrip_infinite_radius(tmp_path):
    cfg = _load("constant_family.json")
    glued, _ = glue.solve(cfg.to_family())
    assert math.isinf(glued.cover.radius)
    path = tmp_path / "const.json"
    serialize.save_solution(cfg, glued, path)
    _, glued2 = serialize.load_solution(path)
    assert math.isinf(glued2.cover.radius)
    np.testing.assert_allclose(glue.g_eval(glued2, 0.1 + 0.2j, [0.5]), [1.0])


def test_cli_check_exit_codes(tmp_path):
    assert cli.main(["check", "--config", str(CONFIGS / "worked_family.json")]) == 0
    assert cli.main(["check", "--config",
                     str(CONFIGS / "negative_common_zero.json")]) == 1
    assert cli.main(["check", "--config", str(tmp_path / "missing.json")]) == 2


def test_cli_solve_verify_flow(tmp_path, capsys):
    sol = tmp_path / "solution.json"
    rep = tmp_path / "report.json"
    code = cli.main([
        "solve", "--config", str(CONFIGS / "three_center_family.json"),
        "--out", str(sol), "--report", str(rep),
    ])
    assert code == 0
    report = json.loads(rep.read_text())
    assert report["verdict"] == "pass"
    assert report["residual_cert"]["hi"] <= 0.5
    assert report["cover_size"] >= 3

    code = cli.main([
        "verify", "--solution", str(sol), "--z-samples", "12",
        "--s-samples", "12", "--report", str(tmp_path / "verify.json"),
    ])
    assert code == 0
    vrep = json.loads((tmp_path / "verify.json").read_text())
    assert vrep["verdict"] == "pass"
    names = {c["name"] for c in vrep["checks"]}
    assert {"residual_resample", "bezout_identity", "norm_bound",
            "pou_sum", "pou_derivative_sums"} <= names


def test_cli_verify_catches_corruption(tmp_path):
    code = cli.main([
        "verify", "--solution", str(CONFIGS / "corrupted_solution.json"),
        "--report", str(tmp_path / "rep.json"),
    ])
    assert code == 1
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert rep["verdict"] == "fail"
    failing = [c for c in rep["checks"] if not c["passed"]]
    assert failing and any("witness" in c for c in failing)


def test_cli_rescale_roundtrip(tmp_path):
    out = tmp_path / "scaled.json"
    code = cli.main([
        "rescale", "--config", str(CONFIGS / "worked_family_unscaled.json"),
        "--factor", "0.3333333333333333", "--out", str(out),
    ])
    assert code == 0
    scaled = load_config(out)
    worked = _load("worked_family.json")
    assert scaled.to_dict()["family"] == worked.to_dict()["family"]


def test_cli_eval_grid(tmp_path, worked_solution):
    cfg = _load("worked_family.json")
    sol = tmp_path / "sol.json"
    serialize.save_solution(cfg, worked_solution, sol)

    out = tmp_path / "grid.csv"
    code = cli.main([
        "eval-grid", "--solution", str(sol), "--out", str(out),
        "--z-samples", "2", "--s-samples", "2",
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "re_z,im_z,s1,k,re_g,im_g,abs_phi"
    assert len(lines) == 1 + 2 * 2 * 2 * 2  # radii x angles x s x components
    for line in lines[1:]:
        cells = line.split(",")
        assert len(cells) == 7
        assert float(cells[-1]) >= 0.5  # passing solution keeps |phi| >= 1/2
    summary = json.loads(out.with_suffix(".summary.json").read_text())
    assert summary["rows"] == len(lines) - 1

    empty = tmp_path / "empty.csv"
    code = cli.main([
        "eval-grid", "--solution", str(sol), "--out", str(empty),
        "--z-samples", "0", "--s-samples", "2",
    ])
    assert code == 0
    assert empty.read_text().splitlines() == ["re_z,im_z,s1,k,re_g,im_g,abs_phi"]


def test_cli_csv_format_details(tmp_path, worked_solution):
    cfg = _load("worked_family.json")
    sol = tmp_path / "sol.json"
    serialize.save_solution(cfg, worked_solution, sol)
    out = tmp_path / "grid.csv"
    cli.main(["eval-grid", "--solution", str(sol), "--out", str(out),
              "--z-samples", "3", "--s-samples", "3"])
    raw = out.read_bytes()
    assert b"\r" not in raw  # LF only
    text = raw.decode("utf-8")
    value = text.splitlines()[1].split(",")[4]
    assert len(value.replace("-", "").replace(".", "").replace("e", "")) >= 1


def test_cli_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        cli.main(["solve"])  # missing --config
    assert err.value.code == 2


def test_two_param_solution_csv_columns(tmp_path):
    cfg = _load("two_param_family.json")
    glued, _ = glue.solve(cfg.to_family())
    sol = tmp_path / "sol2.json"
    serialize.save_solution(cfg, glued, sol)
    out = tmp_path / "grid2.csv"
    cli.main(["eval-grid", "--solution", str(sol), "--out", str(out),
              "--z-samples", "2", "--s-samples", "2"])
    lines = out.read_text().splitlines()
    assert lines[0] == "re_z,im_z,s1,s2,k,re_g,im_g,abs_phi"
    assert len(lines) == 1 + 2 * 2 * 4 * 2
