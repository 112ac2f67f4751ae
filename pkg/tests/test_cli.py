import json

from click.testing import CliRunner

from mlworkbench.cli import main

from conftest import iris_schema
from test_session import CASE1


def test_interpret_prints_frame_json():
    runner = CliRunner()
    result = runner.invoke(main, ["interpret", "--command", CASE1])
    assert result.exit_code == 0
    frame = json.loads(result.output)
    assert frame["bindings"]["PROBLEM"]["value"] == "CLUSTERING"
    assert frame["bindings"]["DATASET"]["value"] == "iris"
    assert frame["bindings"]["NB_CLST"]["value"] == "3"
    assert frame["unresolved"] == []


def test_interpret_unresolved_exits_nonzero():
    runner = CliRunner()
    result = runner.invoke(main, ["interpret", "--command", "hello there"])
    assert result.exit_code == 1
    frame = json.loads(result.output)
    assert "PROBLEM" in frame["unresolved"]


def test_repl_with_script_file(tmp_path, data_dir):
    iris_schema().save(data_dir / "iris.json")
    config = {
        "data_dir": str(data_dir), "out_dir": str(tmp_path / "out"),
        "ledger_path": str(tmp_path / "requests.jsonl"),
    }
    (tmp_path / "config.json").write_text(json.dumps(config))
    (tmp_path / "out").mkdir()
    script = tmp_path / "script.txt"
    script.write_text(CASE1 + "\ny\nexit\n")
    runner = CliRunner()
    result = runner.invoke(main, ["repl", "--config",
                                  str(tmp_path / "config.json"),
                                  "--script", str(script)])
    assert result.exit_code == 0, result.output
    assert "Request _" in result.output
    assert "Explanations written to" in result.output


def test_serve_rejects_missing_config():
    runner = CliRunner()
    result = runner.invoke(main, ["serve", "--config", "/nope/config.json"])
    assert result.exit_code != 0
