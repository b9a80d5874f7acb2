"""Run orchestration: builds world/gateway/driver from options, records the
run directory (events.log, prompts/, skills/, metrics.csv, cassette)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from ..baselines import BaselineConfig, run_autogpt, run_react, run_reflexion
from ..craftworld import WorldConfig, config_from_dict, create_world, default_config, load_config
from ..gateway import (
    Cassette,
    ChatRequest,
    ChatResponse,
    Gateway,
    GatewayConfig,
    HttpProvider,
    ReplayProvider,
)
from ..library import SkillLibrary
from ..loop import AblationConfig, LifelongLoop, LoopConfig, LoopHooks
from ..oracle import oracle_provider
from .metrics import compute_metrics, tech_tree_labels, write_metrics_csv

AGENTS = ("voyager", "react", "reflexion", "autogpt")


@dataclass
class RunOptions:
    agent: str = "voyager"
    seed: int = 3
    max_iterations: int = 160
    llm: str = "scripted"  # live | scripted | replay
    cassette_path: Optional[str] = None
    config_path: Optional[str] = None
    run_dir: str = "run"
    curriculum_mode: str = "manual"
    verifier_mode: str = "self"
    include_env_feedback: bool = True
    include_execution_errors: bool = True
    use_self_verification: bool = True
    use_skill_library: bool = True
    attach_skill_library: bool = False
    library_path: Optional[str] = None
    execution_budget: int = 2000
    base_url: str = ""
    models: dict = field(default_factory=dict)


class RunRecorder:
    """Owns the run directory; append-only event log plus saved prompts."""

    def __init__(self, run_dir: str | Path, driver: Optional[str] = None):
        self.run_dir = Path(run_dir)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        (self.run_dir / "prompts").mkdir(exist_ok=True)
        self.driver = driver
        self.events: list[dict] = []
        self._events_file = open(self.run_dir / "events.log", "w")
        self._prompt_seq = 0
        self.listeners: list = []

    def event(self, record: dict) -> None:
        if self.driver is not None and "driver" not in record:
            record = {**record, "driver": self.driver}
        self.events.append(record)
        self._events_file.write(json.dumps(record, sort_keys=True) + "\n")
        self._events_file.flush()
        for listener in self.listeners:
            listener(record)

    def on_exchange(self, request: ChatRequest, response: ChatResponse) -> None:
        self._prompt_seq += 1
        path = self.run_dir / "prompts" / f"{self._prompt_seq:04d}_{request.role_tag}.txt"
        path.write_text(
            f"role: {request.role_tag}\ntemperature: {request.temperature}\n"
            f"\n=== SYSTEM ===\n{request.system_prompt}\n"
            f"\n=== USER ===\n{request.user_prompt}\n")

    def close(self) -> None:
        self._events_file.close()


def build_world_config(options: RunOptions) -> WorldConfig:
    if options.config_path:
        raw = yaml.safe_load(Path(options.config_path).read_text())
        world_section = raw.get("world")
        if world_section is not None:
            return config_from_dict(world_section, seed=options.seed)
        return load_config(options.config_path, seed=options.seed)
    return default_config(seed=options.seed)


def build_gateway(options: RunOptions, recorder: Optional[RunRecorder] = None) -> Gateway:
    record_cassette: Optional[Cassette] = Cassette()
    if options.llm == "scripted":
        provider = oracle_provider(delegate_to_library=options.attach_skill_library
                                   and options.agent == "voyager")
    elif options.llm == "replay":
        if not options.cassette_path:
            raise ValueError("--llm replay needs --cassette")
        provider = ReplayProvider(Cassette.load(options.cassette_path))
        record_cassette = None  # replaying; do not re-record
    elif options.llm == "live":
        if not options.base_url:
            raise ValueError("live provider needs a base_url (config llm.base_url)")
        provider = HttpProvider(options.base_url, options.models or {"default": "gpt-4"},
                                embed_model=options.models.get("embed", "text-embedding-ada-002")
                                if options.models else "text-embedding-ada-002")
    else:
        raise ValueError(f"unknown llm mode: {options.llm}")
    return Gateway(
        provider,
        cassette=record_cassette,
        config=GatewayConfig(),
        on_exchange=recorder.on_exchange if recorder else None,
    )


def apply_config_file(options: RunOptions) -> RunOptions:
    if not options.config_path:
        return options
    raw = yaml.safe_load(Path(options.config_path).read_text()) or {}
    llm = raw.get("llm", {})
    options.base_url = llm.get("base_url", options.base_url)
    options.models = llm.get("models", options.models)
    ablation = raw.get("ablation", {})
    options.include_env_feedback = ablation.get("include_env_feedback", options.include_env_feedback)
    options.include_execution_errors = ablation.get(
        "include_execution_errors", options.include_execution_errors)
    options.use_self_verification = ablation.get("use_self_verification", options.use_self_verification)
    options.use_skill_library = ablation.get("use_skill_library", options.use_skill_library)
    options.curriculum_mode = ablation.get("curriculum_mode", options.curriculum_mode)
    return options


def build_loop(options: RunOptions, recorder: RunRecorder,
               hooks: Optional[LoopHooks] = None) -> LifelongLoop:
    world = create_world(build_world_config(options), event_sink=recorder.event)
    gateway = build_gateway(options, recorder)
    library = SkillLibrary(gateway)
    if options.library_path:
        library = SkillLibrary.load(options.library_path, gateway)
    config = LoopConfig(
        ablation=AblationConfig(
            include_env_feedback=options.include_env_feedback,
            include_execution_errors=options.include_execution_errors,
            use_self_verification=options.use_self_verification,
            use_skill_library=options.use_skill_library,
            curriculum_mode=options.curriculum_mode,
            verifier_mode=options.verifier_mode,
        ),
        max_iterations=options.max_iterations,
        execution_budget=options.execution_budget,
    )
    return LifelongLoop(world, gateway, library, config, event_sink=recorder.event,
                        hooks=hooks, driver_name=options.agent)


def finalize_run(recorder: RunRecorder, gateway: Gateway,
                 library: Optional[SkillLibrary] = None) -> dict:
    if gateway.cassette is not None:
        gateway.cassette.save(recorder.run_dir / "cassette.jsonl")
    if library is not None and len(library):
        library.persist(recorder.run_dir / "skills")
    write_metrics_csv(recorder.events, recorder.run_dir / "metrics.csv")
    metrics = compute_metrics(recorder.events)
    summary = {
        "unique_items": metrics.unique_items_curve[-1][1] if metrics.unique_items_curve else 0,
        "tech_tree": tech_tree_labels(metrics.tech_tree),
        "coverage_radius": round(metrics.coverage.radius, 3) if metrics.coverage else 0.0,
        "terrains": metrics.terrains,
        "usage": gateway.account(),
    }
    (recorder.run_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    recorder.close()
    return summary


def run_agent(options: RunOptions, hooks: Optional[LoopHooks] = None) -> dict:
    """Run one agent driver to its iteration cap and write the run directory."""
    options = apply_config_file(options)
    recorder = RunRecorder(options.run_dir, driver=options.agent)
    # llm mode stays out of the event log so cassette replays are byte-identical
    recorder.event({"type": "run_start", "agent": options.agent, "seed": options.seed,
                    "max_iterations": options.max_iterations})
    if options.agent == "voyager":
        loop = build_loop(options, recorder, hooks)
        loop.run_lifelong()
        summary = finalize_run(recorder, loop.gateway, loop.library)
        summary["llm"] = options.llm
        summary["episodes"] = len(loop.episodes)
        summary["completed_tasks"] = loop.progress.num_completed
        return summary

    world = create_world(build_world_config(options), event_sink=recorder.event)
    gateway = build_gateway(options, recorder)
    config = BaselineConfig(max_iterations=options.max_iterations,
                            execution_budget=options.execution_budget,
                            attach_skill_library=options.attach_skill_library)
    library = None
    if options.library_path:
        library = SkillLibrary.load(options.library_path, gateway)
    if options.agent == "react":
        result = run_react(world, gateway, config, recorder.event, library=library)
    elif options.agent == "reflexion":
        result = run_reflexion(world, gateway, config, recorder.event, library=library)
    elif options.agent == "autogpt":
        result = run_autogpt(world, gateway, config, recorder.event, library=library)
    else:
        raise ValueError(f"unknown agent: {options.agent}")
    summary = finalize_run(recorder, gateway)
    summary.update(result)
    return summary
