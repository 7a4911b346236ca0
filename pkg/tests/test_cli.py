import csv
import json
import math

import pytest

from cliffbell.cli import ConfigError, RunConfig, load_config, main, parse_config_text
from cliffbell.ga_core import DEFAULT_TABLE, ProductTable


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_verify_passes(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["verify", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] and all(c["passed"] for c in doc["checks"])
    assert doc["findings"]["christian_joint_average_bivector_max_norm"] > 0.5


def test_verify_flags_faulty_table(tmp_path, capsys):
    d = DEFAULT_TABLE.to_dict()
    # e1 e2 -> -e12
    d["sign"][1][2] = -d["sign"][1][2]
    bad = tmp_path / "table.json"
    bad.write_text(json.dumps(d))
    assert main(["verify", "--product-table", str(bad), "--out", str(tmp_path / "v.csv")]) == 1
    err = capsys.readouterr().err
    assert "FAILED: basis_table" in err
    assert "homomorphism" in err
    rows = _read_csv(tmp_path / "v.csv")
    assert {r["check"] for r in rows if r["status"] == "FAIL"} >= {"basis_table", "homomorphism"}


def test_product_table_round_trip():
    t = ProductTable.from_dict(DEFAULT_TABLE.to_dict())
    assert (t.sign == DEFAULT_TABLE.sign).all() and (t.index == DEFAULT_TABLE.index).all()


@pytest.mark.parametrize(
    "argv",
    [
        ["correlate", "--seed", "-3"],
        ["correlate", "--samples", "0"],
        ["correlate", "--grid", "0:90"],
        ["chsh", "--resolution", "4"],
        ["chsh", "--model", "bohm"],
        ["correlate", "--mode", "sloppy"],
        ["frobnicate"],
        [],
    ],
)
def test_bad_arguments_exit_2(argv, capsys):
    assert main(argv) == 2


def test_config_unknown_key_and_malformed(tmp_path, capsys):
    p = tmp_path / "c.cfg"
    p.write_text("samples = 10\nwhat = 1\n")
    assert main(["correlate", "--config", str(p)]) == 2
    assert "unknown field 'what'" in capsys.readouterr().err
    p.write_text("samples 10\n")
    assert main(["correlate", "--config", str(p)]) == 2
    p.write_text("samples = ten\n")
    assert main(["correlate", "--config", str(p)]) == 2
    assert main(["correlate", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_config_precedence(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("# run settings\nseed = 5\nsamples = 1234\nmodel = bell, quantum\ngrid = 0:60:3\n")
    cfg = load_config(["correlate", "--config", str(p), "--seed", "9"])
    assert cfg.seed == 9
    assert cfg.samples == 1234
    assert cfg.models == ("bell", "quantum")
    assert cfg.grid == (0.0, 60.0, 3)
    assert load_config(["correlate"]).samples == RunConfig().samples


def test_parse_config_text_comments():
    assert parse_config_text("# samples = 5\n\n  \n") == {}
    assert parse_config_text("seed = 7  # trailing") == {"seed": 7}
    with pytest.raises(ConfigError):
        parse_config_text("shards = x")


def test_correlate_values(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["correlate", "--grid", "0:180:7", "--samples", "200000", "--seed", "1", "--out", str(out)]) == 0
    rows = {float(r["theta_deg"]): r for r in _read_csv(out)}
    assert float(rows[0.0]["E_quantum"]) == pytest.approx(-1.0, abs=1e-12)
    assert float(rows[90.0]["E_quantum"]) == pytest.approx(0.0, abs=1e-12)
    assert float(rows[60.0]["E_quantum"]) == pytest.approx(-0.5, abs=1e-12)
    assert float(rows[60.0]["E_bell_closed"]) == pytest.approx(-1 / 3, abs=1e-12)
    for r in rows.values():
        assert r["dominance_ok"] == "true"
        assert float(r["E_christian_exact"]) == pytest.approx(float(r["E_quantum"]), abs=1e-12)
        se = float(r["E_bell_mc_stderr"])
        assert abs(float(r["E_bell_mc"]) - float(r["E_bell_closed"])) <= 5 * se + 1e-3


def test_csv_round_trip_precision(tmp_path):
    out = tmp_path / "c.csv"
    main(["correlate", "--grid", "0:180:13", "--samples", "1000", "--out", str(out)])
    for r in _read_csv(out):
        th = math.radians(float(r["theta_deg"]))
        assert float(r["E_quantum"]) == pytest.approx(-math.cos(th), abs=1e-12)
        assert float(r["E_bell_closed"]) == pytest.approx(-1 + 2 * th / math.pi if th <= math.pi else 0, abs=1e-12)


def test_correlate_json(tmp_path):
    out = tmp_path / "c.json"
    assert main(["correlate", "--grid", "0:90:2", "--samples", "100", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["columns"][0] == "theta_deg" and len(doc["rows"]) == 2


@pytest.mark.parametrize("command", ["correlate", "chsh"])
def test_byte_identical_reruns(tmp_path, command):
    extra = ["--resolution", "8", "--mode", "monte_carlo", "--samples", "20000"] if command == "chsh" else ["--samples", "20000"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([command, "--seed", "42", "--out", str(a), *extra]) == 0
    assert main([command, "--seed", "42", "--shards", "3", "--out", str(b), *extra]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_chsh_resolution_eight(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["chsh", "--resolution", "8", "--out", str(out)]) == 0
    rows = {r["model"]: r for r in _read_csv(out)}
    assert set(rows) == {"quantum", "bell", "christian"}
    for model, bound in [("quantum", 2 * math.sqrt(2)), ("bell", 2.0), ("christian", 2 * math.sqrt(2))]:
        assert abs(float(rows[model]["S"])) <= bound + 1e-12
    assert list(rows["bell"]) == ["model", "a_deg", "a′_deg", "b_deg", "b′_deg", "E_ab", "E_ab′", "E_a′b", "E_a′b′", "S", "stderr"]
    summary = json.loads((tmp_path / "s.summary.json").read_text())
    for m in summary["models"]:
        assert set(m) == {"model", "max_abs_S", "argmax_settings_deg", "bound", "margin", "samples", "seed"}


def test_chsh_stdout(capsys):
    assert main(["chsh", "--resolution", "8", "--model", "quantum"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("model,a_deg")
    assert '"max_abs_S"' in out


def test_report(tmp_path):
    out = tmp_path / "r.json"
    assert main(["report", "--resolution", "8", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["verify"]["passed"]
    assert {"findings", "notes", "chsh", "backend"} <= set(doc)
    assert doc["findings"]["averaged_cross_commutator_max_norm"] > 1.0


def test_backend_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--backend"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() in ("cython", "python")
