from __future__ import annotations

import hashlib
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from craftagent.harness import RunOptions, build_gateway, run_agent, run_zero_shot
from craftagent.harness.cli import main as cli_main
from craftagent.harness.runner import RunRecorder


def scripted_options(run_dir: Path, **kwargs) -> RunOptions:
    defaults = dict(agent="voyager", seed=3, max_iterations=160, llm="scripted",
                    run_dir=str(run_dir), curriculum_mode="manual")
    defaults.update(kwargs)
    return RunOptions(**defaults)


def digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_run_directory_layout(tmp_path):
    summary = run_agent(scripted_options(tmp_path / "run"))
    root = tmp_path / "run"
    assert (root / "events.log").exists()
    assert (root / "metrics.csv").exists()
    assert (root / "cassette.jsonl").exists()
    assert (root / "summary.json").exists()
    assert (root / "skills" / "manifest").exists()
    prompts = sorted((root / "prompts").iterdir())
    assert prompts and prompts[0].name.endswith(".txt")
    assert summary["completed_tasks"] == 10
    assert summary["tech_tree"]["iron"] == "9"


def test_prompt_files_carry_role_and_temperature(tmp_path):
    run_agent(scripted_options(tmp_path / "run"))
    sample = sorted((tmp_path / "run" / "prompts").glob("*codegen*"))[0].read_text()
    assert sample.startswith("role: codegen\ntemperature: 0.0\n")
    assert "=== SYSTEM ===" in sample and "=== USER ===" in sample


def test_two_runs_byte_identical(tmp_path):
    run_agent(scripted_options(tmp_path / "a"))
    run_agent(scripted_options(tmp_path / "b"))
    assert digest(tmp_path / "a" / "events.log") == digest(tmp_path / "b" / "events.log")
    assert digest(tmp_path / "a" / "cassette.jsonl") == digest(tmp_path / "b" / "cassette.jsonl")
    assert digest(tmp_path / "a" / "metrics.csv") == digest(tmp_path / "b" / "metrics.csv")


def test_replay_reproduces_recorded_run(tmp_path):
    run_agent(scripted_options(tmp_path / "rec"))
    replay_options = scripted_options(
        tmp_path / "replay", llm="replay",
        cassette_path=str(tmp_path / "rec" / "cassette.jsonl"))
    summary = run_agent(replay_options)
    assert summary["completed_tasks"] == 10
    assert digest(tmp_path / "rec" / "events.log") == digest(tmp_path / "replay" / "events.log")


def test_zero_shot_never_mutates_library_files(tmp_path):
    run_agent(scripted_options(tmp_path / "train"))
    library_dir = tmp_path / "train" / "skills"
    before = {p.name: digest(p) for p in library_dir.iterdir()}

    options = RunOptions(llm="scripted", run_dir=str(tmp_path / "zs"),
                         attach_skill_library=True, agent="voyager")
    recorder = RunRecorder(tmp_path / "zs")
    gateway = build_gateway(options, recorder)
    results = run_zero_shot(["Craft 1 diamond pickaxe"], gateway,
                            library_path=str(library_dir), seed=6, event_sink=recorder.event)
    recorder.close()
    assert results[0].success and results[0].iterations <= 50
    after = {p.name: digest(p) for p in library_dir.iterdir()}
    assert after == before


def test_zero_shot_without_library_hits_cap(tmp_path):
    options = RunOptions(llm="scripted", run_dir=str(tmp_path / "zs"),
                         attach_skill_library=True, agent="voyager")
    recorder = RunRecorder(tmp_path / "zs")
    gateway = build_gateway(options, recorder)
    results = run_zero_shot(["Craft 1 diamond pickaxe"], gateway, library_path=None,
                            seed=6, max_iterations=50, event_sink=recorder.event)
    recorder.close()
    result = results[0]
    assert result.success is False
    assert result.label == "N/A"
    rounds = [e for e in recorder.events if e.get("type") == "round"]
    assert len(rounds) == 50  # the full iteration budget was spent


# ----- CLI ------------------------------------------------------------------------


def test_cli_run_and_metrics(tmp_path):
    runner = CliRunner()
    result = runner.invoke(cli_main, [
        "run", "--agent", "voyager", "--llm", "scripted", "--seed", "3",
        "--curriculum", "manual", "--run-dir", str(tmp_path / "run")])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["completed_tasks"] == 10

    metrics = runner.invoke(cli_main, ["metrics", "--run", str(tmp_path / "run")])
    assert metrics.exit_code == 0, metrics.output
    assert "unique items:" in metrics.output
    assert '"wooden": "3"' in metrics.output


def test_cli_skills_tools(tmp_path):
    runner = CliRunner()
    runner.invoke(cli_main, ["run", "--llm", "scripted", "--seed", "3",
                             "--curriculum", "manual", "--run-dir", str(tmp_path / "run")])
    library = str(tmp_path / "run" / "skills")

    listing = runner.invoke(cli_main, ["skills", "list", "--library", library])
    assert listing.exit_code == 0
    assert "mineOneDiamondTask" in listing.output

    show = runner.invoke(cli_main, ["skills", "show", "mineOneDiamondTask", "--library", library])
    assert show.exit_code == 0
    assert "fn mineOneDiamondTask()" in show.output

    query = runner.invoke(cli_main, ["skills", "query", "mine 1 diamond",
                                     "--library", library, "-k", "3"])
    assert query.exit_code == 0
    assert query.output.strip().splitlines()[0].split("\t")[1] == "mineOneDiamondTask"


def test_cli_zero_shot(tmp_path):
    runner = CliRunner()
    runner.invoke(cli_main, ["run", "--llm", "scripted", "--seed", "3",
                             "--curriculum", "manual", "--run-dir", str(tmp_path / "run")])
    result = runner.invoke(cli_main, [
        "eval", "zero-shot", "--library", str(tmp_path / "run" / "skills"),
        "--task", "Craft 1 diamond pickaxe", "--seed", "6",
        "--run-dir", str(tmp_path / "zs")])
    assert result.exit_code == 0, result.output
    assert "Craft 1 diamond pickaxe:" in result.output
    assert "N/A" not in result.output


def test_cli_run_rejects_bad_agent(tmp_path):
    runner = CliRunner()
    result = runner.invoke(cli_main, ["run", "--agent", "skynet"])
    assert result.exit_code != 0


def test_cli_baseline_run(tmp_path):
    runner = CliRunner()
    result = runner.invoke(cli_main, [
        "run", "--agent", "react", "--llm", "scripted", "--seed", "3",
        "--max-iterations", "8", "--run-dir", str(tmp_path / "react")])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["cycles"] == 2
    assert payload["iterations"] == 8


def test_events_carry_driver_identity(tmp_path):
    run_agent(scripted_options(tmp_path / "run"))
    from craftagent.harness.metrics import read_events

    events = read_events(tmp_path / "run" / "events.log")
    assert events and all(e.get("driver") == "voyager" for e in events)


def test_config_file_overrides(tmp_path):
    config = tmp_path / "run.yaml"
    config.write_text(
        "ablation:\n  include_env_feedback: false\n  curriculum_mode: manual\n"
        "world:\n  base_height: 70\n  biomes:\n    layout: {}\n"
        "    palette: [forest]\n"
        "    features:\n      forest: {surface: grass_block, tree: oak_log, trees: 6}\n"
        "  ores:\n    iron_ore: [40, 66, 8]\n    diamond_ore: [-52, -28, 4]\n"
        "    coal_ore: [40, 66, 8]\n"
        "  mob_spawns:\n    forest: [{name: sheep, weight: 1}]\n")
    runner = CliRunner()
    result = runner.invoke(cli_main, [
        "run", "--llm", "scripted", "--seed", "3", "--config", str(config),
        "--max-iterations", "12", "--run-dir", str(tmp_path / "run")])
    assert result.exit_code == 0, result.output
    # every region is forest under the override palette
    rounds = [json.loads(l) for l in (tmp_path / "run" / "events.log").read_text().splitlines()
              if '"type": "round"' in l]
    assert rounds and all(r["biome"] == "forest" for r in rounds)
