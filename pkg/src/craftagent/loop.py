"""The lifelong loop: propose a task, generate code, execute, verify, commit.

One "prompting iteration" is exactly one code-generation chat call; the
global counter caps the run. Episodes spend at most four rounds on a task
before the curriculum moves on.
"""

from __future__ import annotations

import logging
import re
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

from .craftworld.world import AgentState, World, render_state
from .curriculum import (
    CurriculumDone,
    CurriculumError,
    DocStore,
    ExplorationProgress,
    HumanCurriculum,
    ManualCurriculum,
    QaPair,
    RandomCurriculum,
    Task,
    WarmupSchedule,
    gather_context,
    propose_next_task,
)
from .gateway import ChatRequest, Gateway, GatewayError
from .library import RetrievalQuery, Skill, SkillLibrary, describe_skill
from .skillscript import (
    ExecError,
    ExecutionOutcome,
    ProgramSource,
    analyze,
    execute,
    parse,
    render_api_docs,
)
from .skillscript.parser import ParseError
from .templates import load_template
from .verifier import HumanVerifier, VerificationResult, rule_check, self_verify

logger = logging.getLogger(__name__)

MAX_ROUNDS = 4
FULL_STATE_FIELDS = ["inventory", "equipment", "nearby_blocks", "position", "nearby_entities",
                     "recently_seen_blocks", "biome", "health", "hunger", "time", "chests"]


@dataclass
class AblationConfig:
    include_env_feedback: bool = True
    include_execution_errors: bool = True
    use_self_verification: bool = True
    use_skill_library: bool = True
    curriculum_mode: str = "auto"  # auto | manual | random | human
    verifier_mode: str = "self"  # self | human (human-as-critic of the console)


@dataclass
class LoopConfig:
    ablation: AblationConfig = field(default_factory=AblationConfig)
    max_iterations: int = 160
    execution_budget: int = 2000
    retrieval_k: int = 5
    qa_pairs: int = 5
    schedule: WarmupSchedule = field(default_factory=WarmupSchedule)
    manual_tasks: Optional[list[str]] = None
    random_pool_seed: int = 0
    gather_qa_context: bool = True


@dataclass
class RoundRecord:
    iteration_index: int
    prompt_digest: str
    program: Optional[ProgramSource]
    extraction_error: Optional[str]
    outcome: Optional[ExecutionOutcome]
    verdict: VerificationResult

    @property
    def feedback_lines(self) -> list[str]:
        return list(self.outcome.feedback) if self.outcome else []

    @property
    def error_text(self) -> Optional[str]:
        if self.extraction_error:
            return self.extraction_error
        if self.outcome and self.outcome.error:
            return self.outcome.error.render()
        return None


@dataclass
class EpisodeRecord:
    task: Task
    rounds: list[RoundRecord]
    final: str  # "success" | "abandoned"
    committed_skill: Optional[str]


@dataclass
class LoopHooks:
    pause_gate: Optional[threading.Event] = None
    on_round: Optional[Callable[["LifelongLoop", RoundRecord], None]] = None
    on_episode: Optional[Callable[["LifelongLoop", EpisodeRecord], None]] = None


# ----- prompt assembly -------------------------------------------------------


@dataclass
class PromptFlags:
    include_feedback: bool = True
    include_errors: bool = True
    include_critique: bool = True
    include_skills: bool = True


def assemble_codegen_prompt(task_description: str, context: list[QaPair],
                            retrieved: list[Skill], last_round: Optional[RoundRecord],
                            state: AgentState, registry, gateway: Gateway,
                            flags: Optional[PromptFlags] = None) -> ChatRequest:
    flags = flags or PromptFlags()
    system = load_template("codegen_system") + "\n\n" + render_api_docs(registry)
    if flags.include_skills and retrieved:
        sources = "\n".join(skill.source.text for skill in retrieved)
        system += "\nRetrieved skill implementations:\n\n" + sources
    parts: list[str] = []
    if last_round is not None:
        if last_round.program is not None:
            parts.append("Code from the last round:\n```\n" + last_round.program.text.rstrip() + "\n```")
        else:
            parts.append("Code from the last round: none was produced.")
        if flags.include_feedback:
            feedback = "\n".join(last_round.feedback_lines) or "None"
            parts.append("Chat log:\n" + feedback)
        if flags.include_errors:
            parts.append("Execution error:\n" + (last_round.error_text or "None"))
        if flags.include_critique and not last_round.verdict.success and last_round.verdict.critique:
            parts.append("Critique:\n" + last_round.verdict.critique)
    parts.append(render_state(state, FULL_STATE_FIELDS))
    parts.append(f"Task: {task_description}")
    if context:
        parts.append("Context:\n" + "\n".join(p.render() for p in context))
    return gateway.request("codegen", system, "\n\n".join(parts))


_FENCE_RE = re.compile(r"```[a-zA-Z0-9_]*\n(.*?)```", re.DOTALL)


def extract_program(text: str) -> tuple[Optional[ProgramSource], Optional[str]]:
    """The single fenced code block, parsed; failures become next-round errors."""
    blocks = _FENCE_RE.findall(text)
    if not blocks:
        return None, "ExtractionError: no fenced code block found in the response"
    if len(blocks) > 1:
        return None, f"ExtractionError: found {len(blocks)} fenced code blocks, exactly one is required"
    source = blocks[0].strip() + "\n"
    try:
        program = parse(source)
    except ParseError as exc:
        return None, f"ExtractionError: the code block does not parse: {exc}"
    return ProgramSource(text=source, entry_name=program.function.name), None


# ----- the loop ----------------------------------------------------------------


class LifelongLoop:
    def __init__(self, world: World, gateway: Gateway, library: SkillLibrary,
                 config: Optional[LoopConfig] = None,
                 doc_store: Optional[DocStore] = None,
                 event_sink: Optional[Callable[[dict], None]] = None,
                 hooks: Optional[LoopHooks] = None,
                 driver_name: str = "voyager"):
        self.world = world
        self.gateway = gateway
        self.library = library
        self.config = config or LoopConfig()
        self.doc_store = doc_store or DocStore.bundled()
        self.event_sink = event_sink or (lambda record: None)
        self.hooks = hooks or LoopHooks()
        self.driver_name = driver_name

        self.iteration = 0
        self.progress = ExplorationProgress()
        self.episodes: list[EpisodeRecord] = []
        self._task_counter = 0
        self.awaiting_critique = False
        self.current_task: Optional[Task] = None

        mode = self.config.ablation.curriculum_mode
        self.manual = ManualCurriculum(self.config.manual_tasks) if mode == "manual" else None
        self.random = RandomCurriculum(seed=self.config.random_pool_seed) if mode == "random" else None
        self.human_curriculum = HumanCurriculum() if mode == "human" else None
        self.human_verifier = HumanVerifier() if self.config.ablation.verifier_mode == "human" else None

    # ----- plumbing -----

    def _event(self, record: dict) -> None:
        self.event_sink(record)

    def _wait_if_paused(self) -> None:
        if self.hooks.pause_gate is not None:
            self.hooks.pause_gate.wait()

    def _next_task_id(self) -> int:
        self._task_counter += 1
        return self._task_counter

    # ----- curriculum interface -----

    def next_task(self) -> tuple[Task, list[QaPair]]:
        mode = self.config.ablation.curriculum_mode
        if mode == "manual":
            return self.manual.next(self.progress, self._next_task_id()), []
        if mode == "random":
            return self.random.next(self.progress, self._next_task_id()), []
        if mode == "human":
            task = self.human_curriculum.next(self.progress, self._next_task_id())
            self._event({"type": "proposal", "task": task.description, "proposer": "human"})
            return task, []
        state = self.world.observe()
        context: list[QaPair] = []
        schedule = self.config.schedule
        unlocked = self.progress.num_completed >= schedule.thresholds["additional_context"]
        if unlocked and self.config.gather_qa_context:
            context = gather_context(state, self.progress, self.gateway, self.doc_store,
                                     max_pairs=self.config.qa_pairs, schedule=schedule)
        task, reasoning = propose_next_task(
            state, self.progress, context, self.gateway, self._next_task_id(), schedule)
        self._event({"type": "proposal", "task": task.description, "proposer": "auto",
                     "reasoning": reasoning})
        return task, context

    # ----- rounds and episodes -----

    def run_round(self, task: Task, context: list[QaPair], last_round: Optional[RoundRecord],
                  episode_start: AgentState, round_number: int) -> RoundRecord:
        self._wait_if_paused()
        ablation = self.config.ablation
        state = self.world.observe()

        retrieved: list[Skill] = []
        if ablation.use_skill_library:
            plan_text = task.description
            if context:
                plan_text += "\n" + "\n".join(p.answer for p in context)
            feedback_text = "\n".join(last_round.feedback_lines) if last_round else ""
            retrieved = self.library.retrieve(RetrievalQuery(
                plan_text=plan_text, env_feedback_text=feedback_text, k=self.config.retrieval_k))
        registry = self.library.registry(retrieved)

        flags = PromptFlags(
            include_feedback=ablation.include_env_feedback,
            include_errors=ablation.include_execution_errors,
            include_critique=True,
            include_skills=ablation.use_skill_library,
        )
        request = assemble_codegen_prompt(
            task.description, context, retrieved, last_round, state, registry, self.gateway, flags)
        response = self.gateway.chat(request)
        self.iteration += 1

        program, extraction_error = extract_program(response.text)
        outcome: Optional[ExecutionOutcome] = None
        if program is not None:
            tree = parse(program.text)
            static_errors = analyze(tree, registry)
            if static_errors:
                rendered = "; ".join(str(e) for e in static_errors)
                outcome = ExecutionOutcome(
                    feedback=[],
                    error=ExecError("static", rendered, trace=[]),
                    primitive_trace=[],
                    end_state=self.world.observe(),
                    steps_used=0,
                )
            else:
                outcome = execute(tree, self.world, registry, budget=self.config.execution_budget)

        verdict = self._verdict(task, context, outcome, episode_start, round_number)
        record = RoundRecord(
            iteration_index=self.iteration,
            prompt_digest=request.digest(),
            program=program,
            extraction_error=extraction_error,
            outcome=outcome,
            verdict=verdict,
        )
        end_state = outcome.end_state if outcome else state
        self._event({
            "type": "round",
            "driver": self.driver_name,
            "iteration": record.iteration_index,
            "task": task.description,
            "prompt_digest": record.prompt_digest,
            "program": program.text if program else None,
            "error": record.error_text,
            "feedback": record.feedback_lines,
            "verdict": {"success": verdict.success, "critique": verdict.critique},
            "position": list(end_state.position),
            "biome": end_state.biome,
            "inventory": dict(end_state.inventory),
            "items_ever": sorted(self.world.items_ever),
            "steps_used": outcome.steps_used if outcome else 0,
        })
        if self.hooks.on_round is not None:
            self.hooks.on_round(self, record)
        return record

    def _verdict(self, task: Task, context: list[QaPair], outcome: Optional[ExecutionOutcome],
                 episode_start: AgentState, round_number: int) -> VerificationResult:
        ablation = self.config.ablation
        if outcome is None:
            return VerificationResult(False, "No executable program was produced this round.", "")
        if ablation.verifier_mode == "human":
            self.awaiting_critique = True
            try:
                return self.human_verifier.verify()
            finally:
                self.awaiting_critique = False
        if not ablation.use_self_verification:
            # refinement runs blind for all four rounds; the rule oracle only
            # scores the final state for the logs
            if round_number < MAX_ROUNDS:
                return VerificationResult(False, "Self-verification is disabled; keep refining.", "")
            checked = rule_check(episode_start, outcome.end_state, task.description)
            return VerificationResult(bool(checked), "Final round of the refinement window.",
                                      "rule check")
        verdict = self_verify(outcome.end_state, task.description, context, self.gateway)
        checked = rule_check(episode_start, outcome.end_state, task.description)
        if checked is not None and checked != verdict.success:
            self._event({"type": "verifier_disagreement", "task": task.description,
                         "verifier": verdict.success, "rule_check": checked})
        return verdict

    def run_episode(self, task: Task, context: list[QaPair]) -> EpisodeRecord:
        self.current_task = task
        episode_start = self.world.observe()
        rounds: list[RoundRecord] = []
        last: Optional[RoundRecord] = None
        while len(rounds) < MAX_ROUNDS and self.iteration < self.config.max_iterations:
            record = self.run_round(task, context, last, episode_start, len(rounds) + 1)
            rounds.append(record)
            last = record
            if record.verdict.success:
                break
        success = bool(rounds) and rounds[-1].verdict.success
        committed: Optional[str] = None
        if success and self.config.ablation.use_skill_library and rounds[-1].program is not None:
            committed = self._commit_skill(rounds[-1].program)
        self.progress.record_outcome(task, success)
        episode = EpisodeRecord(task, rounds, "success" if success else "abandoned", committed)
        self.episodes.append(episode)
        self._event({
            "type": "episode",
            "task": task.description,
            "final": episode.final,
            "rounds": len(rounds),
            "committed_skill": committed,
        })
        if self.hooks.on_episode is not None:
            self.hooks.on_episode(self, episode)
        self.current_task = None
        return episode

    def _commit_skill(self, program: ProgramSource) -> Optional[str]:
        try:
            description = describe_skill(program, self.gateway, load_template("describe_system"))
            skill = self.library.add_skill(program, description, created_at_iteration=self.iteration)
            self._event({"type": "skill_added", "name": skill.name, "description": description})
            return skill.name
        except (GatewayError, ValueError) as exc:
            logger.warning("skill commit failed: %s", exc)
            return None

    def run_lifelong(self) -> list[EpisodeRecord]:
        """Episodes until the prompting-iteration cap; self-heals on curriculum
        hiccups, stops when a finite curriculum is exhausted."""
        consecutive_errors = 0
        while self.iteration < self.config.max_iterations:
            try:
                task, context = self.next_task()
                consecutive_errors = 0
            except CurriculumDone:
                break
            except CurriculumError as exc:
                logger.warning("curriculum error, skipping to a fresh proposal: %s", exc)
                self._event({"type": "curriculum_error", "error": str(exc)})
                consecutive_errors += 1
                if consecutive_errors >= 3:
                    break
                continue
            self.run_episode(task, context)
        return self.episodes
