"""Command-line interface.

`run` drives an agent locally (optionally serving the console API);
`eval zero-shot` runs the generalization protocol; `skills` inspects a
persisted library; `metrics` recomputes metrics from a run directory;
`steer` is a thin HTTP client for a served run.
"""

from __future__ import annotations

import json
from pathlib import Path

import click
import requests

from ..gateway import Gateway, GatewayConfig
from ..library import RetrievalQuery, SkillLibrary
from ..oracle import oracle_provider
from .metrics import compute_metrics, read_events, tech_tree_labels, write_metrics_csv
from .runner import AGENTS, RunOptions, RunRecorder, build_gateway, build_loop, finalize_run, run_agent
from .zero_shot import run_zero_shot


@click.group()
def main() -> None:
    """Lifelong crafting agent: runs, evaluation, skill tools, console service."""


@main.command("run")
@click.option("--agent", type=click.Choice(AGENTS), default="voyager", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="YAML with world/llm/ablation sections.")
@click.option("--seed", type=int, default=3, show_default=True)
@click.option("--max-iterations", type=int, default=160, show_default=True)
@click.option("--llm", type=click.Choice(["live", "scripted", "replay"]), default="scripted",
              show_default=True)
@click.option("--cassette", "cassette_path", type=click.Path(), default=None,
              help="Recorded exchanges for --llm replay.")
@click.option("--run-dir", default="run", show_default=True)
@click.option("--curriculum", "curriculum_mode",
              type=click.Choice(["auto", "manual", "random", "human"]), default="manual",
              show_default=True)
@click.option("--verifier", "verifier_mode", type=click.Choice(["self", "human"]),
              default="self", show_default=True)
@click.option("--env-feedback/--no-env-feedback", default=True, show_default=True)
@click.option("--execution-errors/--no-execution-errors", default=True, show_default=True)
@click.option("--self-verification/--no-self-verification", default=True, show_default=True)
@click.option("--skill-library/--no-skill-library", default=True, show_default=True)
@click.option("--attach-skill-library", is_flag=True, default=False,
              help="Baselines: add retrieval from --library to subgoal prompts.")
@click.option("--library", "library_path", type=click.Path(), default=None,
              help="Start from a persisted skill library.")
@click.option("--serve", "serve_port", type=int, default=None,
              help="Serve the console API on this port while running.")
def run_command(**kwargs) -> None:
    """Run one agent to its prompting-iteration cap."""
    serve_port = kwargs.pop("serve_port")
    options = RunOptions(
        agent=kwargs["agent"],
        seed=kwargs["seed"],
        max_iterations=kwargs["max_iterations"],
        llm=kwargs["llm"],
        cassette_path=kwargs["cassette_path"],
        config_path=kwargs["config_path"],
        run_dir=kwargs["run_dir"],
        curriculum_mode=kwargs["curriculum_mode"],
        verifier_mode=kwargs["verifier_mode"],
        include_env_feedback=kwargs["env_feedback"],
        include_execution_errors=kwargs["execution_errors"],
        use_self_verification=kwargs["self_verification"],
        use_skill_library=kwargs["skill_library"],
        attach_skill_library=kwargs["attach_skill_library"],
        library_path=kwargs["library_path"],
    )
    if serve_port is None:
        summary = run_agent(options)
        click.echo(json.dumps(summary, indent=2, sort_keys=True))
        return
    if options.agent != "voyager":
        raise click.UsageError("--serve only applies to the main agent loop")
    import uvicorn

    from .service import RunController, create_app

    recorder = RunRecorder(options.run_dir)
    recorder.event({"type": "run_start", "agent": options.agent, "seed": options.seed,
                    "max_iterations": options.max_iterations, "llm": options.llm})
    loop = build_loop(options, recorder)
    controller = RunController(loop, recorder)
    app = create_app(controller)
    controller.start()
    try:
        uvicorn.run(app, host="127.0.0.1", port=serve_port, log_level="warning")
    finally:
        summary = finalize_run(recorder, loop.gateway, loop.library)
        click.echo(json.dumps(summary, indent=2, sort_keys=True))


@main.group("eval")
def eval_group() -> None:
    """Evaluation protocols."""


@eval_group.command("zero-shot")
@click.option("--library", "library_path", type=click.Path(), default=None,
              help="Persisted skill library directory (omit for the empty-library arm).")
@click.option("--task", "tasks", multiple=True, required=True)
@click.option("--max-iterations", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=6, show_default=True)
@click.option("--llm", type=click.Choice(["live", "scripted"]), default="scripted",
              show_default=True)
@click.option("--run-dir", default="run-zero-shot", show_default=True)
def zero_shot_command(library_path, tasks, max_iterations, seed, llm, run_dir) -> None:
    """Fresh world, cleared inventory, read-only library, 50-iteration cap."""
    options = RunOptions(llm=llm, run_dir=run_dir, attach_skill_library=library_path is not None)
    recorder = RunRecorder(run_dir)
    gateway = build_gateway(options, recorder)
    results = run_zero_shot(list(tasks), gateway, library_path=library_path, seed=seed,
                            max_iterations=max_iterations, event_sink=recorder.event)
    recorder.close()
    for result in results:
        click.echo(f"{result.task}: {result.label}")


def _library_gateway() -> Gateway:
    return Gateway(oracle_provider(), config=GatewayConfig(sleep=lambda s: None))


@main.group("skills")
def skills_group() -> None:
    """Inspect a persisted skill library."""


@skills_group.command("list")
@click.option("--library", "library_path", type=click.Path(exists=True), required=True)
def skills_list(library_path) -> None:
    library = SkillLibrary.load(library_path, _library_gateway())
    for name, skill in library.skills.items():
        click.echo(f"{name}\t(iteration {skill.created_at_iteration})\t{skill.description[:70]}")


@skills_group.command("show")
@click.argument("name")
@click.option("--library", "library_path", type=click.Path(exists=True), required=True)
def skills_show(name, library_path) -> None:
    library = SkillLibrary.load(library_path, _library_gateway())
    if name not in library.skills:
        raise click.UsageError(f"no skill named {name}")
    skill = library.skills[name]
    click.echo(f"# {skill.name}\n# {skill.description}\n")
    click.echo(skill.source.text)


@skills_group.command("query")
@click.argument("text")
@click.option("--library", "library_path", type=click.Path(exists=True), required=True)
@click.option("-k", type=int, default=5, show_default=True)
def skills_query(text, library_path, k) -> None:
    library = SkillLibrary.load(library_path, _library_gateway())
    similarities = library.similarities(RetrievalQuery(text, k=k))
    for skill in library.retrieve(RetrievalQuery(text, k=k)):
        click.echo(f"{similarities[skill.name]:.4f}\t{skill.name}")


@main.command("metrics")
@click.option("--run", "run_dir", type=click.Path(exists=True), required=True)
def metrics_command(run_dir) -> None:
    """Recompute metrics from a persisted event log."""
    events = read_events(Path(run_dir) / "events.log")
    metrics = compute_metrics(events)
    write_metrics_csv(events, Path(run_dir) / "metrics.csv")
    final = metrics.unique_items_curve[-1][1] if metrics.unique_items_curve else 0
    click.echo(f"unique items: {final}")
    click.echo("tech tree: " + json.dumps(tech_tree_labels(metrics.tech_tree)))
    if metrics.coverage:
        click.echo(f"coverage radius: {metrics.coverage.radius:.3f}")
    click.echo("terrains: " + ", ".join(metrics.terrains))
    click.echo(f"metrics.csv written to {run_dir}")


@main.group("steer")
@click.option("--url", default="http://127.0.0.1:8000", show_default=True)
@click.pass_context
def steer_group(ctx, url) -> None:
    """Steer a served run over HTTP (thin client)."""
    ctx.obj = url.rstrip("/")


@steer_group.command("state")
@click.pass_obj
def steer_state(url) -> None:
    click.echo(json.dumps(requests.get(f"{url}/api/state", timeout=10).json(), indent=2))


@steer_group.command("critique")
@click.option("--success/--failure", default=False)
@click.option("--text", default="")
@click.pass_obj
def steer_critique(url, success, text) -> None:
    response = requests.post(f"{url}/api/critique",
                             json={"success": success, "critique": text}, timeout=10)
    click.echo(f"{response.status_code}: {response.text}")


@steer_group.command("task")
@click.argument("description")
@click.pass_obj
def steer_task(url, description) -> None:
    response = requests.post(f"{url}/api/task", json={"description": description}, timeout=10)
    click.echo(f"{response.status_code}: {response.text}")


@steer_group.command("pause")
@click.pass_obj
def steer_pause(url) -> None:
    response = requests.post(f"{url}/api/control", json={"action": "pause"}, timeout=10)
    click.echo(f"{response.status_code}: {response.text}")


@steer_group.command("resume")
@click.pass_obj
def steer_resume(url) -> None:
    response = requests.post(f"{url}/api/control", json={"action": "resume"}, timeout=10)
    click.echo(f"{response.status_code}: {response.text}")


if __name__ == "__main__":
    main()
