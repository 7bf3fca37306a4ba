import json
import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eepc.cli import main, parse_code_descriptor
from eepc.config import ExperimentConfig, apply_overrides, config_from_kv
from eepc.ioutil import read_csv_rows, summary_payload, validate_summary, write_csv


def test_config_kv_roundtrip():
    cfg = ExperimentConfig(nu=6, t=3, variant="even", t_max=0.2, seed=99, allzero=False)
    again = config_from_kv(cfg.to_kv())
    assert again == cfg


@settings(max_examples=50)
@given(st.integers(2, 12), st.integers(1, 4), st.floats(0.0, 0.5), st.booleans())
def test_config_kv_roundtrip_random(nu, t, tq, flag):
    cfg = ExperimentConfig(nu=nu, t=t, t_quant=tq, practical_final=flag)
    assert config_from_kv(cfg.to_kv()) == cfg


def test_config_rejects_unknown_key():
    with pytest.raises(ValueError):
        config_from_kv("nonsense = 1\n")
    with pytest.raises(ValueError):
        config_from_kv("allzero = maybe\n")


def test_overrides_skip_none():
    cfg = apply_overrides(ExperimentConfig(), {"nu": 6, "t": None})
    assert cfg.nu == 6 and cfg.t == ExperimentConfig().t


def test_code_descriptor():
    assert parse_code_descriptor(["nu4", "t2"]) == {"nu": 4, "t": 2}
    assert parse_code_descriptor(["nu6-t3-even"]) == {"nu": 6, "t": 3, "variant": "even"}
    assert parse_code_descriptor(["nu6", "t3", "shortened", "plain"]) == {
        "nu": 6, "t": 3, "variant": "shortened-plain"}
    assert parse_code_descriptor(["nu6-t4-shortened"]) == {
        "nu": 6, "t": 4, "variant": "shortened-plain"}
    with pytest.raises(ValueError):
        parse_code_descriptor(["banana"])


def test_summary_schema_validation():
    payload = summary_payload("threshold", {"nu": 4}, {"esn0_star_db": 1.0})
    validate_summary(payload)
    jsonschema = pytest.importorskip("jsonschema")
    from eepc.ioutil import load_schema

    jsonschema.validate(payload, load_schema())
    bad = dict(payload)
    del bad["results"]
    with pytest.raises(ValueError):
        validate_summary(bad)


def test_write_csv_embeds_config(tmp_path):
    path = str(tmp_path / "out.csv")
    write_csv(path, ["a", "b"], [[1, 2], [3, 4]], {"seed": 7})
    text = open(path).read()
    assert "# seed = 7" in text and text.startswith("# eepc")
    header, rows = read_csv_rows(path)
    assert header == ["a", "b"] and rows == [["1", "2"], ["3", "4"]]


def test_cli_capacity(tmp_path):
    out = str(tmp_path / "x")
    assert main(["capacity", "--esn0-db", "0", "--t", "0", "--out", out]) == 0
    header, rows = read_csv_rows(out + "_capacity.csv")
    assert header == ["esn0_db", "T", "delta_c", "eps_c", "capacity"]
    assert float(rows[0][3]) == 0.0  # eps_c = 0 at T = 0


def test_cli_transition_table_deterministic(tmp_path, cache_dir):
    args = ["transition-table", "--code", "nu4", "t2", "--decoder", "eaedplus",
            "--cache-dir", cache_dir]
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(args + ["--out", out1]) == 0
    assert main(args + ["--out", out2]) == 0
    assert open(out1 + "_ttable_eaedplus.csv").read() == open(out2 + "_ttable_eaedplus.csv").read()


def test_cli_threshold_and_scan(tmp_path, cache_dir):
    out = str(tmp_path / "x")
    rc = main(["threshold", "--code", "nu4", "t2", "--decoder", "eaed",
               "--ensemble", "product", "--t", "0.0", "--bisect-db", "0.01",
               "--cache-dir", cache_dir, "--out", out])
    assert rc == 0
    payload = json.load(open(out + "_threshold.json"))
    validate_summary(payload)
    assert "esn0_star_db" in payload["results"]

    rc = main(["scan-t", "--code", "nu4", "t2", "--decoder", "eaed",
               "--t-max", "0.04", "--t-step", "0.02", "--refine-tol", "0.04",
               "--bisect-db", "0.02", "--cache-dir", cache_dir, "--out", out])
    assert rc == 0
    scan = json.load(open(out + "_scan_t.json"))
    assert scan["results"]["gain_db"] >= 0.0
    # resume path: precomputed points are honored
    rc = main(["scan-t", "--code", "nu4", "t2", "--decoder", "eaed",
               "--t-max", "0.04", "--t-step", "0.02", "--refine-tol", "0.04",
               "--bisect-db", "0.02", "--cache-dir", cache_dir, "--out", out, "--resume"])
    assert rc == 0


def test_cli_simulate(tmp_path, cache_dir):
    out = str(tmp_path / "s")
    rc = main(["simulate", "--code", "nu6", "t3", "--esn0-db", "2.0", "--t", "0.0",
               "--schedule", "emp", "--decoder", "eaed", "--iters", "4",
               "--target-ber", "1e-4", "--max-bits", "5e5", "--seed", "1",
               "--out", out])
    header, rows = read_csv_rows(out + "_simulate.csv")
    assert header == ["esn0_db", "T", "iters", "frames", "bit_errors", "ber", "ci_lo", "ci_hi"]
    assert rc in (0, 3)


def test_cli_config_file_and_overrides(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("nu = 4\nt = 2\nesn0_db = 1.0\nt_quant = 0.2\n")
    out = str(tmp_path / "c")
    assert main(["capacity", "--config", str(cfg_file), "--esn0-db", "0.5", "--out", out]) == 0
    _, rows = read_csv_rows(out + "_capacity.csv")
    assert float(rows[0][0]) == 0.5  # flag overrides file
    assert float(rows[0][1]) == 0.2  # file value survives


def test_cli_bad_config_exit_code(tmp_path):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("bogus = 1\n")
    rc = main(["capacity", "--config", str(cfg_file), "--out", str(tmp_path / "y")])
    assert rc == 2
    rc = main(["threshold", "--code", "wat", "--out", str(tmp_path / "z")])
    assert rc == 2


def test_cli_entrypoint_subprocess(tmp_path):
    env = dict(os.environ)
    rc = subprocess.run(
        [sys.executable, "-m", "eepc.cli", "capacity", "--esn0-db", "1", "--t", "0.1",
         "--out", str(tmp_path / "m")],
        capture_output=True, text=True, env=env,
    )
    assert rc.returncode == 0
    assert "C=" in rc.stdout
