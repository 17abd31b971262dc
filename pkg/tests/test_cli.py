import hashlib
import json
import subprocess
import sys

import pytest

from propcover.cli import best_epsilon, main, parse_level, parse_seed, resolve_methods


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


# -- interval -------------------------------------------------------------------


def test_interval_wald(capsys):
    code, out, _ = run(["interval", "--x", "50", "--n", "100", "--method", "wald", "--level", "0.95"], capsys)
    assert code == 0
    assert "unclipped: [0.402002, 0.597998]" in out


def test_interval_wald_degenerate(capsys):
    _, out, _ = run(["interval", "--x", "0", "--n", "10", "--method", "wald", "--level", "0.95"], capsys)
    assert "clipped:   [0.000000, 0.000000]" in out


def test_interval_adjusted_wilson_clips(capsys):
    _, out, _ = run(["interval", "--x", "0", "--n", "10", "--method", "adj-wilson",
                     "--epsilon", "4", "--level", "0.95"], capsys)
    assert "unclipped: [-0.040443, 0.326157]" in out
    assert "clipped:   [0.000000, 0.326157]" in out


def test_interval_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["interval", "--x", "11", "--n", "10", "--method", "wald"])
    assert exc.value.code == 2


# -- helpers --------------------------------------------------------------------


def test_parse_helpers():
    assert parse_level("95") == 0.95 and parse_level("0.9") == 0.9 and parse_level(99) == 0.99
    assert parse_seed("0xff") == 255 and parse_seed("18446744073709551615") == 2**64 - 1
    for bad in ("-1", str(2**64), "seven"):
        with pytest.raises(ValueError):
            parse_seed(bad)
    assert [best_epsilon(v) for v in (0.90, 0.95, 0.99)] == [3, 4, 6]
    assert best_epsilon(0.8) == 2
    names = [e.name for e in resolve_methods("wald,wilson,best,adjwilson7,wald", 0.95)]
    assert names == ["wald", "wilson", "adjwilson4", "adjwilson7"]
    assert len(resolve_methods("all10", 0.9)) == 10


# -- grid -----------------------------------------------------------------------


def test_grid_outputs_and_manifest(tmp_path, capsys):
    out = tmp_path / "g"
    code, stdout, _ = run(["grid", "--levels", "95", "--methods", "wald,best", "--nmax", "12",
                           "--formats", "csv,json,ppm,png", "--out", str(out)], capsys)
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    for stem in ("wald_95_12", "adjwilson4_95_12"):
        for ext in (".csv", ".ppm", ".png", ".meta.json"):
            assert stem + ext in names
    assert {"spp_95_12.csv", "spp_95_12.txt", "grids_95_12.json", "manifest.json"} <= set(names)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["mode"] == "exact" and manifest["config"]["seed"] == "0"
    assert set(manifest["versions"]) == {"propcover", "python", "numpy"}
    for name, digest in manifest["outputs"].items():
        assert sha(out / name) == digest
    assert "Adjusted Wilson 4" in stdout


def test_grid_mc_is_deterministic_across_threads(tmp_path, capsys):
    common = ["grid", "--levels", "90,99", "--methods", "wald,wilson,best", "--nmax", "15",
              "--mode", "mc", "--seed", "7", "--n-sim", "200"]
    run(common + ["--threads", "1", "--out", str(tmp_path / "a")], capsys)
    run(common + ["--threads", "3", "--out", str(tmp_path / "b")], capsys)
    a = json.loads((tmp_path / "a" / "manifest.json").read_text())["outputs"]
    b = json.loads((tmp_path / "b" / "manifest.json").read_text())["outputs"]
    assert a == b and len(a) > 0


def test_grid_seed_accepts_hex(tmp_path, capsys):
    base = ["grid", "--methods", "wald", "--nmax", "5", "--mode", "mc", "--n-sim", "50"]
    run(base + ["--seed", "0x10", "--out", str(tmp_path / "h")], capsys)
    run(base + ["--seed", "16", "--out", str(tmp_path / "d")], capsys)
    assert sha(tmp_path / "h" / "wald_95_5.csv") == sha(tmp_path / "d" / "wald_95_5.csv")


def test_config_precedence(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nmax": 4, "methods": "wilson", "levels": "90", "formats": "csv"}))
    monkeypatch.setenv("PROPCOVER_OUTDIR", str(tmp_path / "env"))
    code, _, _ = run(["grid", "--config", str(cfg), "--nmax", "3"], capsys)
    assert code == 0
    produced = sorted(p.name for p in (tmp_path / "env").iterdir())
    assert "wilson_90_3.csv" in produced and not any(n.endswith(".ppm") for n in produced)


def test_bad_config_key_reports_json(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    code, _, err = run(["grid", "--config", str(cfg), "--out", str(tmp_path)], capsys)
    assert code == 1
    report = json.loads(err.strip().splitlines()[-1])
    assert report["command"] == "grid" and "colour" in report["message"]


def test_unknown_method_reports_json(tmp_path, capsys):
    code, _, err = run(["grid", "--methods", "bogus", "--out", str(tmp_path)], capsys)
    assert code == 1 and json.loads(err)["error"] == "CliError"


def test_unwritable_output_directory(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = run(["grid", "--methods", "wald", "--nmax", "2", "--out", str(blocker / "sub")], capsys)
    assert code == 1 and "output directory" in json.loads(err)["message"]


# -- ttest ----------------------------------------------------------------------


def test_ttest_self_comparison(capsys, tmp_path):
    code, out, _ = run(["ttest", "--level", "99", "--eps", "5", "5", "--runs", "3", "--nmax", "5",
                        "--n-sim", "50", "--save", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert "t = 0.000000, df = 2, p = 1" in out
    saved = json.loads((tmp_path / "ttest_99_eps5_vs_5.json").read_text())
    assert saved["p_value"] == 1.0 and saved["spp_a"] == saved["spp_b"]


def test_ttest_needs_two_runs():
    with pytest.raises(SystemExit) as exc:
        main(["ttest", "--eps", "5", "6", "--runs", "1"])
    assert exc.value.code == 2


# -- reproduce / legend ---------------------------------------------------------


def test_reproduce_fig1(tmp_path, capsys):
    code, _, _ = run(["reproduce", "fig1", "--out", str(tmp_path)], capsys)
    assert code == 0
    meta = json.loads((tmp_path / "legend_90-95-99.meta.json").read_text())
    assert [b["level"] for b in meta["bands"]] == [0.9, 0.95, 0.99]
    assert (tmp_path / "legend_90-95-99.ppm").read_bytes().startswith(b"P6\n")


def test_reproduce_table2_writes_comparison(tmp_path, capsys):
    code, out, _ = run(["reproduce", "table2", "--out", str(tmp_path)], capsys)
    assert code == 0
    rows = (tmp_path / "table2_comparison.csv").read_text().splitlines()
    assert rows[0] == "level,method,epsilon,n_max,reference,ours,delta,ours_is_max"
    assert len(rows) == 31
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["target"] == "table2" and "max_abs_delta" in manifest
    assert not list(tmp_path.glob("*.ppm"))


def test_reproduce_unknown_target():
    with pytest.raises(SystemExit) as exc:
        main(["reproduce", "table9"])
    assert exc.value.code == 2


def test_legend_command(tmp_path, capsys):
    code, _, _ = run(["legend", "--levels", "95", "--out", str(tmp_path)], capsys)
    assert code == 0 and (tmp_path / "legend_95.ppm").exists()
    code, _, err = run(["legend", "--levels", "50", "--out", str(tmp_path)], capsys)
    assert code == 1 and "alpha" in json.loads(err)["message"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "propcover", "interval", "--x", "5", "--n", "10",
                           "--method", "wilson"], capture_output=True, text=True, check=True)
    assert "Wilson 95% interval" in proc.stdout
