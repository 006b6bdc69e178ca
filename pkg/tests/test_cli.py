import json

import pytest

from braiddyn.cli import main
from braiddyn.config import ConfigError, load_config

PROTOCOL = {
    "version": 1,
    "n": 3,
    "seed": 7,
    "samples": 1,
    "n_max": 8,
    "base_angle": 0.4,
    "kind": "theta2",
    "map": {
        "twists": [
            {"center": [-0.25, 0.0], "radius": 0.5, "angle": 8.0 / 9.0},
            {"center": [0.25, 0.0], "radius": 0.5, "angle": -8.0 / 9.0},
        ]
    },
    "measures": [
        {"type": "dirac", "point": [-0.5, 0.0]},
        {"type": "dirac", "point": [0.0, 0.0]},
        {"type": "dirac", "point": [0.5, 0.0]},
    ],
}

PAIR = {
    "version": 1,
    "n": 2,
    "seed": 11,
    "samples": 1,
    "n_max": 4,
    "map": {"twists": [{"center": [0.0, 0.0], "radius": 0.5, "angle": 16.0 / 9.0}]},
    "measures": [{"type": "dirac", "point": [-0.25, 0.0]}, {"type": "dirac", "point": [0.25, 0.0]}],
    "extract": {"N": 1, "resolution": 32, "trace": True},
    "calabi": {"samples": 200, "N": 4},
}


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_config_schema_validation(tmp_path):
    bad = dict(PROTOCOL)
    bad.pop("seed")
    with pytest.raises(ConfigError, match="seed"):
        load_config(write(tmp_path, bad))
    bad = json.loads(json.dumps(PROTOCOL))
    bad["measures"] = bad["measures"][:2]
    with pytest.raises(ConfigError, match="measures"):
        load_config(write(tmp_path, bad))
    p = tmp_path / "broken.json"
    p.write_text('{"version": 1,,}')
    with pytest.raises(ConfigError, match="line 1"):
        load_config(str(p))


def test_malformed_config_exit_code(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    rc = main(["theta", "--config", str(p), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "line 1" in capsys.readouterr().err


def test_extract_identity_map(tmp_path, capsys):
    doc = json.loads(json.dumps(PAIR))
    doc["map"] = {"twists": []}
    rc = main(["extract", "--config", write(tmp_path, doc), "--out", str(tmp_path / "out")])
    assert rc == 0
    braid = json.loads((tmp_path / "out" / "braid.json").read_text())
    assert braid["letters"] == [] and braid["pure"] is True
    assert (tmp_path / "out" / "trace.csv").exists()
    assert (tmp_path / "out" / "letters.csv").exists()
    assert (tmp_path / "out" / "paths.png").exists()


def test_extract_full_turn_pair(tmp_path):
    rc = main(["extract", "--config", write(tmp_path, PAIR), "--out", str(tmp_path / "out")])
    assert rc == 0
    braid = json.loads((tmp_path / "out" / "braid.json").read_text())
    assert braid["letters"] == [1, 1] and braid["pure"] is True


def test_theta_subcommand_and_overwrite_protection(tmp_path):
    cfg = write(tmp_path, PROTOCOL)
    out = str(tmp_path / "out")
    assert main(["theta", "--config", cfg, "--out", out]) == 0
    rep = json.loads((tmp_path / "out" / "report.json").read_text())
    assert rep["kind"] == "theta2" and rep["schema_version"] == 1
    assert (tmp_path / "out" / "report.csv").exists()
    assert (tmp_path / "out" / "report.png").exists()
    # CSV numerics are a projection of the JSON document
    csv_lines = (tmp_path / "out" / "report.csv").read_text().strip().splitlines()
    header = csv_lines[0].split(",")
    for line in csv_lines[1:]:
        row = dict(zip(header, line.split(",")))
        match = [r for r in rep["per_N"] if r["N"] == int(row["N"])]
        assert match and float(row["mean"]) == match[0]["mean"]
    assert main(["theta", "--config", cfg, "--out", out]) == 2
    assert main(["theta", "--config", cfg, "--out", out, "--force"]) == 0


def test_degenerate_input_exit_code(tmp_path):
    doc = json.loads(json.dumps(PROTOCOL))
    doc["base_angle"] = 0.0  # collinear return legs for the periodic orbit
    rc = main(["theta", "--config", write(tmp_path, doc), "--out", str(tmp_path / "out")])
    assert rc == 3


def test_calabi_subcommand(tmp_path):
    doc = json.loads(json.dumps(PAIR))
    doc["measures"] = [{"type": "area"}, {"type": "area"}]
    rc = main(["calabi", "--config", write(tmp_path, doc), "--out", str(tmp_path / "out")])
    assert rc == 0
    rep = json.loads((tmp_path / "out" / "report.json").read_text())
    assert rep["kind"] == "calabi"


def test_invariance_check_requires_conjugator(tmp_path):
    cfg = write(tmp_path, PROTOCOL)
    assert main(["invariance-check", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    doc = json.loads(json.dumps(PROTOCOL))
    doc["conjugator"] = {"twists": [{"center": [0.15, 0.2], "radius": 0.35, "angle": 0.6}]}
    doc["n_max"] = 4
    rc = main(["invariance-check", "--config", write(tmp_path, doc), "--out", str(tmp_path / "out")])
    assert rc == 0
    rep = json.loads((tmp_path / "out" / "report.json").read_text())
    assert "base" in rep and "conjugated" in rep


def test_entropy_bound_subcommand(tmp_path):
    doc = json.loads(json.dumps(PROTOCOL))
    doc["n_max"] = 12
    rc = main(["entropy-bound", "--config", write(tmp_path, doc), "--out", str(tmp_path / "out")])
    assert rc == 0
    rep = json.loads((tmp_path / "out" / "report.json").read_text())
    assert rep["entropy_lower_bound"] <= rep["line_stretch"]["rate"]


def test_seed_and_worker_overrides(tmp_path):
    doc = json.loads(json.dumps(PROTOCOL))
    doc["n_max"] = 4
    cfg = write(tmp_path, doc)
    assert main(["theta", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "99"]) == 0
    rep = json.loads((tmp_path / "a" / "report.json").read_text())
    assert rep["seed"] == 99


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "10/10" in out


def test_theta2_protocol_rate_through_cli(tmp_path):
    doc = json.loads(json.dumps(PROTOCOL))
    doc["n_max"] = 32
    rc = main(["theta", "--config", write(tmp_path, doc), "--out", str(tmp_path / "out")])
    assert rc == 0
    rep = json.loads((tmp_path / "out" / "report.json").read_text())
    import math

    assert abs(rep["rate_estimate"] - math.log((3 + math.sqrt(5)) / 2)) < 1e-2
