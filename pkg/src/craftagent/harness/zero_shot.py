"""Zero-shot protocol: fresh world, cleared inventory, library loaded
read-only, model-decomposed subgoals, 50-iteration cap per task."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ..baselines import decompose_goal
from ..craftworld import create_world, default_config
from ..curriculum import CurriculumDone, CurriculumError
from ..gateway import Gateway
from ..library import SkillLibrary
from ..loop import AblationConfig, LifelongLoop, LoopConfig
from ..verifier import rule_check

DEFAULT_ZERO_SHOT_CAP = 50


@dataclass
class ZeroShotResult:
    task: str
    success: bool
    iterations: Optional[int]

    @property
    def label(self) -> str:
        return str(self.iterations) if self.success else "N/A"


def run_zero_shot(tasks: list[str], gateway: Gateway,
                  library_path: Optional[str] = None,
                  seed: int = 6, max_iterations: int = DEFAULT_ZERO_SHOT_CAP,
                  event_sink: Optional[Callable[[dict], None]] = None,
                  use_skill_library: bool = True) -> list[ZeroShotResult]:
    results = []
    for task_description in tasks:
        sink = event_sink or (lambda record: None)
        world = create_world(default_config(seed=seed), event_sink=sink)
        start_state = world.observe()
        assert start_state.inventory == {}, "zero-shot begins with a cleared inventory"
        if library_path is not None:
            library = SkillLibrary.load(library_path, gateway)
        else:
            library = SkillLibrary(gateway)
        subgoals = decompose_goal(task_description, gateway)
        sink({"type": "zero_shot_plan", "task": task_description, "subgoals": subgoals})
        loop = LifelongLoop(
            world, gateway, library,
            LoopConfig(
                ablation=AblationConfig(curriculum_mode="manual",
                                        use_skill_library=use_skill_library),
                max_iterations=max_iterations,
                manual_tasks=subgoals,
            ),
            event_sink=sink,
            driver_name="zero-shot",
        )
        success_at: Optional[int] = None
        while loop.iteration < max_iterations:
            try:
                task, context = loop.next_task()
            except CurriculumDone:
                break
            except CurriculumError:
                break
            loop.run_episode(task, context)
            if rule_check(start_state, world.observe(), task_description):
                success_at = loop.iteration
                break
        result = ZeroShotResult(task_description, success_at is not None, success_at)
        sink({"type": "zero_shot_result", "task": task_description,
              "success": result.success, "iterations": result.iterations})
        results.append(result)
    return results
