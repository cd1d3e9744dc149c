import json
import xml.etree.ElementTree as ET

import pytest

from lucbh.cli import impossibility_report, main
from lucbh.core import build_instance, dump_instance
from lucbh.harness import LUCB_H, PURE_LUCB

HEADER = "axis,algorithm,case,mean_tau,stderr_tau,error_rate,truncated,pulls_1,pulls_2,pulls_3,pulls_4,pulls_5"


def test_list_presets(capsys):
    assert main(["list-presets"]) == 0
    out = capsys.readouterr().out
    assert out.count("\n") == 10 and "fig10" in out


def test_preset_writes_three_files(tmp_path):
    code = main(["preset", "fig1", "--trials", "20", "--seed", "42", "--emit-svg", "--out", str(tmp_path)])
    assert code == 0
    csv_text = (tmp_path / "fig1.csv").read_text()
    lines = csv_text.splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 1 + 6 * 4
    doc = json.loads((tmp_path / "fig1.json").read_text())
    assert doc["schema_version"] == 1 and doc["seed"] == 42 and doc["spec"]["trials"] == 20
    root = ET.parse(tmp_path / "fig1.svg").getroot()
    assert root.tag.endswith("svg") and root.get("viewBox") == "0 0 800 500"

    again = tmp_path / "again"
    assert main(["preset", "fig1", "--trials", "20", "--seed", "42", "--out", str(again)]) == 0
    assert (again / "fig1.csv").read_bytes() == csv_text.encode()
    assert not (again / "fig1.svg").exists()


def test_bai_out_env(tmp_path, monkeypatch):
    monkeypatch.setenv("BAI_OUT", str(tmp_path / "env"))
    assert main(["preset", "fig7", "--trials", "5"]) == 0
    assert (tmp_path / "env" / "fig7.csv").exists()


def test_config_file_then_flags(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trials": 7, "seed": 3}))
    assert main(["preset", "fig7", "--config", str(cfg), "--seed", "9", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "fig7.json").read_text())
    assert doc["spec"]["trials"] == 7 and doc["seed"] == 9


def test_run_with_spec_file(tmp_path):
    inst = build_instance(2, (1.0, 0.0), (1.0, 0.0), (20, 20), (0.1, 0.1), 0.1)
    spec = {
        "name": "mine",
        "axis": "t_s",
        "grid": [0, 40],
        "trials": 10,
        "series": [{"case": "beneficial", "algorithm": "lucb_h", "instance": inst.to_dict()}],
    }
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    assert main(["run", "--config", str(path), "--trials", "6", "--emit-svg", "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "mine.csv").read_text().splitlines()
    assert len(rows) == 3 and rows[1].startswith("0,lucb_h,beneficial")
    ET.parse(tmp_path / "mine.svg")


def test_bounds_command(tmp_path, capsys):
    inst = build_instance(5, (0.8, 0.4, 0.4, 0.4, 0.4), (0.9, 0.2, 0.2, 0.2, 0.2), (200,) * 5, (0.4, 0.2, 0.2, 0.2, 0.2), 0.01)
    path = tmp_path / "g1.json"
    dump_instance(inst, path)
    assert main(["bounds", str(path), "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "200.0000" in out and "612.5000" in out and "UNDEFINED" in out
    doc = json.loads((tmp_path / "g1_bounds.json").read_text())
    assert doc["schema_version"] == 1
    assert doc["bounds"]["arms"][1]["sav_u"] == pytest.approx(200.0)


def test_bounds_zero_history(tmp_path):
    inst = build_instance(3, (0.5, 0.2, 0.0), (0.5, 0.9, 0.0), (0, 0, 0), (0.0, 0.0, 0.0), 0.05)
    path = tmp_path / "z.json"
    dump_instance(inst, path)
    assert main(["bounds", str(path), "--out", str(tmp_path)]) == 0
    arms = json.loads((tmp_path / "z_bounds.json").read_text())["bounds"]["arms"]
    assert all(a["sav_u"] == 0 and a["sav_l"] == 0 for a in arms[1:])


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["preset", "fig99", "--out", str(tmp_path)]) != 0
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["bounds", str(bad), "--out", str(tmp_path)]) != 0
    bad.write_text(json.dumps({"k": 2, "mu_on": [1, 1], "mu_off": [0, 0], "t_s": [0, 0], "v": [0, 0], "delta": 0.1}))
    assert main(["bounds", str(bad), "--out", str(tmp_path)]) != 0
    assert main(["run", "--out", str(tmp_path)]) != 0
    assert main(["impossibility", "--beta", "0.5", "--epsilon", "1e-20", "--delta", "0.5", "--out", str(tmp_path)]) != 0
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 5 and all(line.startswith("lucbh: error:") for line in err)


def test_impossibility_command(tmp_path, capsys):
    args = ["impossibility", "--beta", "0.5", "--epsilon", "0.1", "--c", "1", "--delta", "0.41", "--trials", "10"]
    assert main(args + ["--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "impossibility.json").read_text())
    assert doc["schema_version"] == 1 and len(doc["results"]) == 4
    assert "P" in capsys.readouterr().out


def test_impossibility_tradeoff():
    report = impossibility_report(0.5, 0.1, 1.0, 0.1, trials=300)
    rows = {(r["instance"], r["algorithm"]): r for r in report["results"]}
    assert rows["P", LUCB_H]["mean_tau"] < rows["P", PURE_LUCB]["mean_tau"]
    q_h, q_pure = rows["Q", LUCB_H], rows["Q", PURE_LUCB]
    assert q_h["error_rate"] > q_pure["error_rate"] or q_h["mean_tau"] > q_pure["mean_tau"]
