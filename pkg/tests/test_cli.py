from __future__ import annotations

import json
import shutil
import subprocess
import sys

import pytest

from insidernet.cli import main


@pytest.fixture
def data(fixtures_dir):
    base = fixtures_dir / "synth42"
    return {"trades": str(base / "trades.csv"), "quotes": str(base / "quotes.csv")}


def error_of(capsys) -> dict:
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_pipeline_writes_artifacts(tmp_path, data, capsys):
    out = tmp_path / "out"
    assert main(["pipeline", "--trades", data["trades"], "--quotes", data["quotes"], "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["out"] == str(out)
    for side in ("sale", "purchase"):
        for name in ("network.json", "network.dot", "stats.json", "hyperedges.json", "fit.json",
                     "scores.csv", "top_scores.csv", "profits_top.csv", "profit_summary.json"):
            assert (out / side / name).is_file(), (side, name)
        assert len(list((out / side / "egonets").glob("*.dot"))) == 10
        assert len((out / side / "top_scores.csv").read_text().splitlines()) == 1 + 10


def test_missing_quotes_file_exits_1_naming_path(tmp_path, data, capsys):
    missing = tmp_path / "absent_quotes.csv"
    code = main(["pipeline", "--trades", data["trades"], "--quotes", str(missing), "--out", str(tmp_path / "o")])
    assert code == 1
    err = error_of(capsys)
    assert err["error"] == "UnreadableStream" and str(missing) in err["message"]


def test_malformed_strict_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("insider_id,insider_name,company,date,side,shares,price\nA,a,X,notadate,S,1,1\n")
    assert main(["build-net", "--trades", str(bad), "--out", str(tmp_path / "o"), "--strict"]) == 1
    assert error_of(capsys)["error"] == "StrictModeViolation"


def test_degenerate_scoring_exits_2(tmp_path, capsys):
    rows = ["insider_id,insider_name,company,date,side,shares,price"]
    for ins in ("A", "B"):
        rows += [f"{ins},x,X,2014-01-0{d},S,10,1" for d in range(1, 6)]
    trades = tmp_path / "t.csv"
    trades.write_text("\n".join(rows) + "\n")
    assert main(["score", "--trades", str(trades), "--out", str(tmp_path / "o"), "--side", "sale"]) == 2
    assert error_of(capsys)["error"] == "DegenerateInput"


def test_sale_lcs_threshold_flag(tmp_path, data, capsys):
    out = tmp_path / "o"
    args = ["build-net", "--trades", data["trades"], "--out", str(out), "--side", "sale", "--mode", "lcs", "--t", "5"]
    assert main(args) == 0
    net = json.loads((out / "sale" / "network.json").read_text())
    assert net["mode"] == {"mode": "lcs", "threshold": 5, "variant": "subsequence"}
    assert all(e["weight"] >= 5 for e in net["edges"])
    assert not (out / "purchase").exists()


def test_config_file_and_flag_priority(tmp_path, data, fixtures_dir, capsys, monkeypatch):
    out = tmp_path / "o"
    cfg = fixtures_dir / "example.ini"
    assert main(["--config", str(cfg), "score", "--trades", data["trades"], "--out", str(out)]) == 0
    top = (out / "sale" / "top_scores.csv").read_text().splitlines()
    assert len(top) == 1 + 5
    assert not (out / "purchase").exists()
    monkeypatch.setenv("INSIDERNET_CONFIG", str(cfg))
    out2 = tmp_path / "o2"
    assert main(["score", "--trades", data["trades"], "--out", str(out2), "--top-n", "3"]) == 0
    assert len((out2 / "sale" / "top_scores.csv").read_text().splitlines()) == 1 + 3


def test_bad_config_key_exits_1(tmp_path, data, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[insidernet]\nbogus = 1\n")
    assert main(["--config", str(cfg), "build-net", "--trades", data["trades"]]) == 1
    assert "bogus" in error_of(capsys)["message"]


def test_ingest_check_reports(tmp_path, data, capsys):
    assert main(["ingest-check", "--trades", data["trades"], "--quotes", data["quotes"]]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["trades"]["errors"] == [] and report["quotes"]["errors"] == []
    assert report["trades"]["records"] == 2829


def test_mine_hyper_and_profit(tmp_path, data, capsys):
    out = tmp_path / "o"
    assert main(["mine-hyper", "--trades", data["trades"], "--out", str(out), "--side", "sale"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["sale"]["multi_hyperedge_insiders"] == ["I000205"]
    assert main(["profit", "--trades", data["trades"], "--quotes", data["quotes"], "--out", str(out),
                 "--side", "sale"]) == 0
    assert (out / "sale" / "profits_hyper.csv").read_text().count("\n") > 1


def test_profit_without_quotes_is_usage_error(tmp_path, data, capsys):
    assert main(["profit", "--trades", data["trades"], "--out", str(tmp_path)]) == 1
    assert error_of(capsys)["error"] == "UsageError"


def test_synth_matches_committed_fixture(tmp_path, fixtures_dir, capsys):
    out = tmp_path / "s"
    assert main(["synth", "--out", str(out), "--seed", "42", "--companies", "20", "--cliques", "12", "--hubs", "2",
                 "--cliques-per-hub", "4", "--profit-bias", "0.8", "--planted-side", "both"]) == 0
    for name in ("trades.csv", "quotes.csv", "truth.json"):
        assert (out / name).read_bytes() == (fixtures_dir / "synth42" / name).read_bytes()


def test_infeasible_synth_exits_1(tmp_path, capsys):
    assert main(["synth", "--out", str(tmp_path), "--companies", "2", "--cliques", "5", "--hubs", "1",
                 "--cliques-per-hub", "3"]) == 1
    assert error_of(capsys)["error"] == "InfeasibleConfig"


@pytest.mark.skipif(shutil.which("insidernet") is None, reason="console script not installed")
def test_console_script_entry_point():
    proc = subprocess.run(["insidernet", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "pipeline" in proc.stdout


def test_module_is_runnable():
    proc = subprocess.run([sys.executable, "-m", "insidernet.cli", "synth", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
