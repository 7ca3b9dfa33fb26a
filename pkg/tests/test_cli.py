from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from wordswarm import cli
from wordswarm.config import ConfigError, apply_override, default_config, load

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = str(FIXTURES / "corpus_small.ndjson")


# ------------------------------------------------------------------- config


def test_defaults_build():
    cfg = load(None, [])
    assert cfg.session.tick_rate == 30.0
    assert cfg.session.layout.speed_coefficient == 0.1
    # d_max defaults to half the viewport diagonal
    assert cfg.session.euler.d_max == pytest.approx(cfg.session.layout.viewport.diagonal / 2)


def test_file_then_flag_precedence(tmp_path):
    path = tmp_path / "conf.json"
    path.write_text(json.dumps({"layout": {"speed_coefficient": 0.3}, "tick_rate": 10}))
    cfg = load(path, [("layout.speed_coefficient", "0.7")])
    assert cfg.session.layout.speed_coefficient == 0.7  # flag wins
    assert cfg.session.tick_rate == 10.0  # file survives where no flag


def test_unknown_file_key_named(tmp_path):
    path = tmp_path / "conf.json"
    path.write_text(json.dumps({"layout": {"speed": 1}}))
    with pytest.raises(ConfigError, match="layout.speed"):
        load(path, [])


def test_unknown_override_key_named():
    with pytest.raises(ConfigError, match="euler.radius"):
        load(None, [("euler.radius", "5")])


def test_out_of_range_value_rejected():
    with pytest.raises(ConfigError, match="layout"):
        load(None, [("layout.speed_coefficient", "-1")])
    with pytest.raises(ConfigError, match="euler"):
        load(None, [("euler.d_max", "10")])  # below 2 * r_max


def test_override_parses_json_values():
    config = default_config()
    apply_override(config, "layout.behaviors", '["bounds_clamp"]')
    assert config["layout"]["behaviors"] == ["bounds_clamp"]
    apply_override(config, "update_mode", "incremental")
    assert config["update_mode"] == "incremental"


def test_source_entries_validated():
    config = default_config()
    config["sources"] = [{"location": "x.ndjson", "kind": "warp"}]
    from wordswarm.config import build

    with pytest.raises(ConfigError, match="sources"):
        build(config)


def test_file_source_must_exist_at_startup():
    config = default_config()
    config["sources"] = [{"location": "/no/such/corpus.ndjson", "kind": "ndjson_file"}]
    from wordswarm.config import build

    with pytest.raises(ConfigError, match="no such file"):
        build(config)


# ---------------------------------------------------------------- cli: core


def run_cli(args, capsys):
    code = cli.main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_print_config_round_trip(capsys, tmp_path):
    path = tmp_path / "conf.json"
    path.write_text(json.dumps({"tick_rate": 12}))
    code, out, _ = run_cli(["--config", str(path), "--layout.timestep", "2.0", "--print-config"], capsys)
    assert code == 0
    effective = json.loads(out)
    assert effective["tick_rate"] == 12
    assert effective["layout"]["timestep"] == 2.0


def test_invalid_config_key_exits_1(capsys):
    code, _, err = run_cli(["--euler.bogus", "3", "analyze", "--corpus", CORPUS], capsys)
    assert code == 1
    assert "euler.bogus" in err


def test_usage_error_exits_1(capsys):
    code, _, err = run_cli(["--not-dotted-flag", "analyze"], capsys)
    assert code == 1


def test_missing_command_exits_1(capsys):
    code, _, err = run_cli([], capsys)
    assert code == 1


def test_unreadable_corpus_exits_2(capsys):
    code, _, err = run_cli(["analyze", "--corpus", "/no/such/file.ndjson"], capsys)
    assert code == 2


# -------------------------------------------------------------- cli: analyze


def test_analyze_prints_tables(capsys):
    code, out, _ = run_cli(["--analyzer.f_min", "1", "analyze", "--corpus", CORPUS], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[:3] == ["alpha 2", "beta 1", "gamma 1"]
    assert "alpha beta 1" in lines
    assert "alpha gamma 1" in lines


def test_analyze_empty_corpus(tmp_path, capsys):
    empty = tmp_path / "empty.ndjson"
    empty.write_text("")
    code, out, _ = run_cli(["analyze", "--corpus", str(empty)], capsys)
    assert code == 0
    assert out == ""


def test_analyze_below_threshold_notes(capsys, tmp_path):
    # default f_min is 2; every word here appears once
    single = tmp_path / "single.ndjson"
    single.write_text(
        json.dumps({"id": "A1", "source": "s", "ts": "2026-01-01T00:00:00+00:00",
                    "text": "solo", "words": ["solo"]}) + "\n"
    )
    code, out, _ = run_cli(["analyze", "--corpus", str(single)], capsys)
    assert code == 0
    assert out.strip() == "no words selected"


# ------------------------------------------------------------- cli: snapshot


def test_snapshot_writes_labeled_circles(tmp_path, capsys):
    out_path = tmp_path / "scene.svg"
    code, _, _ = run_cli(
        ["--seed", "5", "--analyzer.f_min", "1", "snapshot",
         "--corpus", CORPUS, "--ticks", "200", "--out", str(out_path)],
        capsys,
    )
    assert code == 0
    svg = out_path.read_text()
    assert svg.count("<circle") == 3
    for word in ("alpha", "beta", "gamma"):
        assert f">{word}</text>" in svg


def test_snapshot_empty_corpus(tmp_path, capsys):
    empty = tmp_path / "empty.ndjson"
    empty.write_text("")
    out_path = tmp_path / "scene.svg"
    code, _, _ = run_cli(["snapshot", "--corpus", str(empty), "--ticks", "10", "--out", str(out_path)], capsys)
    assert code == 0
    assert "<circle" not in out_path.read_text()


def test_snapshot_deterministic_across_processes(tmp_path):
    outs = []
    for k in range(2):
        out_path = tmp_path / f"scene{k}.svg"
        result = subprocess.run(
            [sys.executable, "-m", "wordswarm.cli", "--seed", "11", "--analyzer.f_min", "1",
             "snapshot", "--corpus", CORPUS, "--ticks", "150", "--out", str(out_path)],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0, result.stderr
        outs.append(out_path.read_bytes())
    assert outs[0] == outs[1]


# --------------------------------------------------------------- cli: replay


def test_replay_emits_frames(tmp_path, capsys):
    frames_path = tmp_path / "frames.ndjson"
    code, _, _ = run_cli(
        ["--seed", "3", "--analyzer.f_min", "1", "replay",
         "--corpus", CORPUS, "--ticks", "25", "--frames-out", str(frames_path)],
        capsys,
    )
    assert code == 0
    lines = frames_path.read_text().splitlines()
    assert len(lines) == 25
    first = json.loads(lines[0])
    assert first["type"] == "frame"
    assert first["tick"] == 1
    assert {a["id"] for a in first["agents"]} == {"alpha", "beta", "gamma"}


def test_replay_deterministic_across_processes(tmp_path):
    blobs = []
    for k in range(2):
        frames_path = tmp_path / f"frames{k}.ndjson"
        result = subprocess.run(
            [sys.executable, "-m", "wordswarm.cli", "--seed", "3", "--analyzer.f_min", "1",
             "replay", "--corpus", CORPUS, "--ticks", "60", "--frames-out", str(frames_path)],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0, result.stderr
        blobs.append(frames_path.read_bytes())
    assert blobs[0] == blobs[1]
