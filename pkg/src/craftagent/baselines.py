"""ReAct-, Reflexion-, and AutoGPT-style drivers sharing the same world,
interpreter, and gateway so comparisons are apples to apples.

All three work on the fixed open-ended goal and share the prompting-iteration
definition (one codegen call). ReAct sees feedback and state only; Reflexion
adds execution errors and the critic; AutoGPT decomposes the goal into
subgoals and replans after three consecutive subgoals that yield no new item.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

from .craftworld.world import World
from .gateway import Gateway
from .library import RetrievalQuery, Skill, SkillLibrary
from .loop import PromptFlags, RoundRecord, assemble_codegen_prompt, extract_program
from .skillscript import ExecError, ExecutionOutcome, analyze, execute, parse
from .templates import load_template
from .verifier import VerificationResult, self_verify

EXPLORE_TASK = "explore the world and get as many items as possible"
CYCLE_ROUNDS = 4  # one generation from scratch + three refinements


@dataclass
class BaselineConfig:
    max_iterations: int = 160
    execution_budget: int = 2000
    retrieval_k: int = 5
    attach_skill_library: bool = False  # the "w/ skill library" table row


@dataclass
class SubgoalPlan:
    subgoals: list[str]
    cursor: int = 0
    consecutive_no_new_item: int = 0

    def current(self) -> Optional[str]:
        if self.cursor < len(self.subgoals):
            return self.subgoals[self.cursor]
        return None


class _Driver:
    def __init__(self, name: str, world: World, gateway: Gateway, config: BaselineConfig,
                 library: Optional[SkillLibrary] = None,
                 event_sink: Optional[Callable[[dict], None]] = None):
        self.name = name
        self.world = world
        self.gateway = gateway
        self.config = config
        self.library = library
        self.event_sink = event_sink or (lambda record: None)
        self.iteration = 0

    def _retrieve(self, task: str, last: Optional[RoundRecord]) -> list[Skill]:
        if not (self.config.attach_skill_library and self.library and len(self.library)):
            return []
        feedback = "\n".join(last.feedback_lines) if last else ""
        return self.library.retrieve(RetrievalQuery(task, feedback, k=self.config.retrieval_k))

    def round(self, task: str, last: Optional[RoundRecord], flags: PromptFlags,
              verify: bool) -> RoundRecord:
        state = self.world.observe()
        retrieved = self._retrieve(task, last)
        registry = _registry_for(retrieved)
        request = assemble_codegen_prompt(task, [], retrieved, last, state, registry,
                                          self.gateway, flags)
        response = self.gateway.chat(request)
        self.iteration += 1
        program, extraction_error = extract_program(response.text)
        outcome: Optional[ExecutionOutcome] = None
        if program is not None:
            tree = parse(program.text)
            static_errors = analyze(tree, registry)
            if static_errors:
                outcome = ExecutionOutcome(
                    feedback=[], error=ExecError("static", "; ".join(str(e) for e in static_errors)),
                    primitive_trace=[], end_state=self.world.observe(), steps_used=0)
            else:
                outcome = execute(tree, self.world, registry, budget=self.config.execution_budget)
        if verify and outcome is not None:
            verdict = self_verify(outcome.end_state, task, [], self.gateway)
        else:
            verdict = VerificationResult(False, "no verdict for this driver", "")
        record = RoundRecord(self.iteration, request.digest(), program, extraction_error,
                             outcome, verdict)
        end_state = outcome.end_state if outcome else state
        self.event_sink({
            "type": "round",
            "driver": self.name,
            "iteration": record.iteration_index,
            "task": task,
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
        return record


def _registry_for(retrieved: list[Skill]):
    from .skillscript import ApiRegistry

    registry = ApiRegistry()
    for skill in retrieved:
        registry.add_skill(parse(skill.source.text).function, doc=skill.description)
    return registry


def run_react(world: World, gateway: Gateway, config: Optional[BaselineConfig] = None,
              event_sink: Optional[Callable[[dict], None]] = None,
              include_errors: bool = False, use_verifier: bool = False,
              driver_name: str = "react",
              library: Optional[SkillLibrary] = None) -> dict:
    """Cycles of one from-scratch generation plus three refinements."""
    config = config or BaselineConfig()
    driver = _Driver(driver_name, world, gateway, config, library, event_sink)
    flags = PromptFlags(include_feedback=True, include_errors=include_errors,
                        include_critique=use_verifier,
                        include_skills=config.attach_skill_library)
    cycles = 0
    while driver.iteration < config.max_iterations:
        cycles += 1
        last: Optional[RoundRecord] = None
        for _ in range(CYCLE_ROUNDS):
            if driver.iteration >= config.max_iterations:
                break
            last = driver.round(EXPLORE_TASK, last, flags, verify=use_verifier)
    return {"driver": driver_name, "iterations": driver.iteration, "cycles": cycles,
            "items": sorted(world.items_ever)}


def run_reflexion(world: World, gateway: Gateway, config: Optional[BaselineConfig] = None,
                  event_sink: Optional[Callable[[dict], None]] = None,
                  library: Optional[SkillLibrary] = None) -> dict:
    """ReAct cycles plus execution errors in prompts and the critic's verdicts."""
    return run_react(world, gateway, config, event_sink, include_errors=True,
                     use_verifier=True, driver_name="reflexion", library=library)


_NUMBERED_RE = re.compile(r"^\s*\d+[.)]\s*(.+?)\s*$", re.MULTILINE)


def decompose_goal(goal: str, gateway: Gateway, note: str = "") -> list[str]:
    user = f"Task: {goal}"
    if note:
        user += f"\n\n{note}"
    response = gateway.chat(gateway.request("decompose", load_template("decompose_system"), user))
    subgoals = _NUMBERED_RE.findall(response.text)
    return subgoals or [goal]


def run_autogpt(world: World, gateway: Gateway, config: Optional[BaselineConfig] = None,
                event_sink: Optional[Callable[[dict], None]] = None,
                library: Optional[SkillLibrary] = None,
                goal: str = EXPLORE_TASK) -> dict:
    """Subgoal execution: a subgoal is done at the first round with no
    execution error, or abandoned after four rounds; three consecutive
    subgoals without a new unique item trigger a replan."""
    config = config or BaselineConfig()
    driver = _Driver("autogpt", world, gateway, config, library, event_sink)
    flags = PromptFlags(include_feedback=True, include_errors=True, include_critique=False,
                        include_skills=config.attach_skill_library)
    sink = event_sink or (lambda record: None)
    plan = SubgoalPlan(decompose_goal(goal, gateway))
    sink({"type": "plan", "driver": "autogpt", "subgoals": list(plan.subgoals)})
    replans = 0
    while driver.iteration < config.max_iterations:
        subgoal = plan.current()
        if subgoal is None:
            plan = SubgoalPlan(decompose_goal(goal, gateway, "The earlier plan is exhausted; plan again."))
            replans += 1
            sink({"type": "plan", "driver": "autogpt", "subgoals": list(plan.subgoals),
                  "replan": replans})
            continue
        items_before = set(world.items_ever)
        last: Optional[RoundRecord] = None
        completed = False
        for _ in range(CYCLE_ROUNDS):
            if driver.iteration >= config.max_iterations:
                break
            last = driver.round(subgoal, last, flags, verify=False)
            if last.outcome is not None and last.outcome.error is None:
                completed = True  # no execution error counts as subgoal done
                break
        sink({"type": "subgoal", "driver": "autogpt", "subgoal": subgoal,
              "completed": completed,
              "new_items": sorted(set(world.items_ever) - items_before)})
        plan.cursor += 1
        if set(world.items_ever) - items_before:
            plan.consecutive_no_new_item = 0
        else:
            plan.consecutive_no_new_item += 1
            if plan.consecutive_no_new_item >= 3 and driver.iteration < config.max_iterations:
                plan = SubgoalPlan(decompose_goal(
                    goal, gateway, "The last plan stalled without new items; make a different plan."))
                replans += 1
                sink({"type": "plan", "driver": "autogpt", "subgoals": list(plan.subgoals),
                      "replan": replans})
    return {"driver": "autogpt", "iterations": driver.iteration, "replans": replans,
            "items": sorted(world.items_ever)}
