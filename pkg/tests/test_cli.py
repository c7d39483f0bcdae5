import json

import pytest

from condenselab.cli import build_parser, run
from condenselab.config import CONFIG_ENV_VAR


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_measure(capsys):
    assert run(["measure", "--fn", "tribes:2", "--kind", "D0"]) == 0
    document = _json(capsys)
    assert document["kind"] == "D0"
    assert document["value"] == 3
    assert document["function"] == {"family": "tribes", "params": {"n": 2}}


def test_measure_at_point_with_witness(capsys):
    assert run(["measure", "--fn", "tribes:2", "--kind", "C", "--at", "1001", "--witness"]) == 0
    document = _json(capsys)
    assert document["value"] == 2
    assert document["witness"]["positions"] == [1, 4]


def test_tagged_measure(capsys):
    assert run(["measure", "--fn", "and:3", "--kind", "s", "--tag", "zeros"]) == 0
    document = _json(capsys)
    assert document["kind"] == "s0"
    assert document["value"] == 1


def test_build_and_read_back(tmp_path, capsys):
    out = tmp_path / "and2.tbl"
    assert run(["build", "--fn", "and:2", "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == "arity: 2\n8\n"
    capsys.readouterr()
    assert run(["measure", "--fn", str(out), "--kind", "sparsity"]) == 0
    assert _json(capsys)["value"] == 4


def test_build_uses_output_root(tmp_path, capsys):
    config = tmp_path / "config.yaml"
    config.write_text(f"output_root: {tmp_path / 'out'}\n", encoding="utf-8")
    assert run(["--config", str(config), "build", "--fn", "parity:3"]) == 0
    assert (tmp_path / "out" / "tables" / "parity_3.tbl").exists()
    assert _json(capsys)["ones"] == 4


def test_restrict(capsys):
    assert run(["restrict", "--fn", "and:3", "--rho", "1*1"]) == 0
    document = _json(capsys)
    assert document == {
        "function": "and:3",
        "restriction": "1*1",
        "arity": 1,
        "constancy": "NonConstant",
        "table": "2",
    }


def test_condense(capsys):
    assert run(["condense", "--fn", "and:3", "--measure", "s", "--free", "2", "--exhaustive"]) == 0
    document = _json(capsys)
    assert document["value"] == 2
    assert document["witness"] == "**1"
    assert document["mode"] == {"kind": "Exhaustive"}


def test_condense_search_flags_are_exclusive(capsys):
    argv = ["condense", "--fn", "and:3", "--measure", "s", "--free", "2", "--exhaustive", "--sample", "1:5"]
    assert run(argv) == 2
    assert "not allowed" in capsys.readouterr().err


def test_condense_sampled(capsys):
    assert run(["condense", "--fn", "tribes:2", "--measure", "bs", "--free", "3", "--sample", "3:10"]) == 0
    document = _json(capsys)
    assert document["lower_bound"] is True
    assert document["mode"]["seed"] == 3


def test_verify_echoes_config(capsys):
    assert run(["--seed", "5", "verify", "--claim", "TRIBES-D0", "--params", "n=2"]) == 0
    document = _json(capsys)
    assert document["config"]["dt_cap"] == 14
    assert document["config"]["default_seed"] == 5
    assert document["reports"][0]["status"] == "Pass"


def test_verify_is_byte_stable_without_runtime(capsys):
    argv = ["verify", "--claim", "OPT-EXP", "--no-runtime"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first


def test_strict_skips_exit_three(tmp_path, capsys):
    config = tmp_path / "small.yaml"
    config.write_text("dt_cap: 3\n", encoding="utf-8")
    argv = ["--config", str(config), "verify", "--claim", "TRIBES-D0", "--params", "n=2"]
    assert run(argv) == 0
    assert run(["--strict"] + argv) == 3


def test_export_renders_saved_reports(tmp_path, capsys):
    path = tmp_path / "reports.json"
    assert run(["verify", "--claim", "TRIBES-D0", "--params", "n=2", "--out", str(path)]) == 0
    assert run(["--format", "csv", "export", str(path)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("claim_id,ref,statement,params")
    assert lines[1].startswith("TRIBES-D0,zero-depth of TRIBES,")


def test_tribes_game_emits_transcript(tmp_path, capsys):
    emit = tmp_path / "transcript.json"
    assert run(["game", "--kind", "tribes", "--n", "2", "--querier", "constructive", "--emit", str(emit)]) == 0
    transcript = json.loads(emit.read_text(encoding="utf-8"))
    assert transcript["zero_count"] == 3
    assert transcript["output"] == 0
    assert transcript["queries"][-1] == {"set": [2, 4], "answer": 0}


def test_tribes_game_on_an_input(capsys):
    assert run(["game", "--kind", "tribes", "--n", "2", "--querier", "greedy", "--input", "1001"]) == 0
    assert _json(capsys)["transcript"]["output"] == 1


def test_cheatsheet_game(capsys):
    assert run(["game", "--kind", "cheatsheet", "--n", "2", "--c", "2", "--querier", "greedy"]) == 0
    document = _json(capsys)
    assert document["outcome"]["satisfied"] is True


def test_usage_errors_exit_two(capsys):
    assert run(["measure", "--fn", "bogus:1", "--kind", "s"]) == 2
    assert "bogus" in capsys.readouterr().err
    assert run(["verify", "--claim", "NOPE"]) == 2
    assert run(["game", "--kind", "cheatsheet", "--n", "2"]) == 2
    assert run(["--jobs", "0", "measure", "--fn", "and:2", "--kind", "s"]) == 2
    assert run(["--log-level", "chatty", "measure", "--fn", "and:2", "--kind", "s"]) == 2
    assert run(["frobnicate"]) == 2
    assert run(["measure", "--fn", "and:2"]) == 2


def test_capacity_errors_exit_two(capsys):
    assert run(["measure", "--fn", "tribes:4", "--kind", "D"]) == 2
    assert "dt_cap" in capsys.readouterr().err


def test_parser_lists_every_subcommand():
    parser = build_parser()
    for command in ("measure", "build", "restrict", "condense", "verify", "game", "export"):
        assert parser.parse_args(_minimal(command)).command == command


def _minimal(command):
    return {
        "measure": ["measure", "--fn", "and:2", "--kind", "s"],
        "build": ["build", "--fn", "and:2"],
        "restrict": ["restrict", "--fn", "and:2", "--rho", "1*"],
        "condense": ["condense", "--fn", "and:2", "--measure", "s", "--free", "1"],
        "verify": ["verify", "--claim", "ALL"],
        "game": ["game", "--kind", "tribes", "--n", "2"],
        "export": ["export", "reports.json"],
    }[command]
