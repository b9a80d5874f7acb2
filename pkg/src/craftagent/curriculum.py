"""Task proposers: warm-up-gated automatic curriculum, manual, random, human."""

from __future__ import annotations

import logging
import queue
import random
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .craftworld.world import AgentState, render_state
from .gateway import Gateway, GatewayError
from .naming import humanize
from .templates import load_template

logger = logging.getLogger(__name__)


class CurriculumError(Exception):
    pass


class CurriculumDone(Exception):
    """Raised by finite curricula when every task has been consumed."""


@dataclass
class Task:
    id: int
    description: str
    proposer: str  # auto | manual | random | human
    attempts: int = 0

    def __post_init__(self) -> None:
        if not self.description.strip():
            raise CurriculumError("task description must be non-empty")


def _key(description: str) -> str:
    return " ".join(description.lower().split()).rstrip(".")


@dataclass
class ExplorationProgress:
    """Ordered ledgers of completed and failed tasks; disjoint by description."""

    completed: list[Task] = field(default_factory=list)
    failed: list[Task] = field(default_factory=list)

    @property
    def num_completed(self) -> int:
        return len(self.completed)

    def record_outcome(self, task: Task, success: bool) -> None:
        key = _key(task.description)
        if success:
            self.failed = [t for t in self.failed if _key(t.description) != key]
            if all(_key(t.description) != key for t in self.completed):
                self.completed.append(task)
        else:
            task.attempts += 1
            for existing in self.failed:
                if _key(existing.description) == key:
                    existing.attempts += 1
                    return
            if all(_key(t.description) != key for t in self.completed):
                self.failed.append(task)


# ----- warm-up schedule (state fields unlock as tasks complete) -------------

CORE_INVENTORY_ITEMS = [
    "log", "planks", "stick", "crafting_table", "furnace",
    "dirt", "coal", "pickaxe", "sword", "axe",
]

DEFAULT_THRESHOLDS = {
    "core_inventory": 0,
    "equipment": 0,
    "nearby_blocks": 0,
    "position": 0,
    "nearby_entities": 5,
    "full_inventory": 7,
    "recently_seen_blocks": 10,
    "biome": 10,
    "health": 15,
    "hunger": 15,
    "time": 15,
    "additional_context": 15,
}

# threshold key -> state render field
_FIELD_ORDER = [
    ("core_inventory", "inventory"),
    ("equipment", "equipment"),
    ("nearby_blocks", "nearby_blocks"),
    ("position", "position"),
    ("nearby_entities", "nearby_entities"),
    ("full_inventory", "inventory"),
    ("recently_seen_blocks", "recently_seen_blocks"),
    ("biome", "biome"),
    ("health", "health"),
    ("hunger", "hunger"),
    ("time", "time"),
]


@dataclass
class WarmupSchedule:
    thresholds: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    core_items: list[str] = field(default_factory=lambda: list(CORE_INVENTORY_ITEMS))

    def __post_init__(self) -> None:
        if any(v < 0 for v in self.thresholds.values()):
            raise CurriculumError("warm-up thresholds must be non-negative")
        if self.thresholds["core_inventory"] > self.thresholds["full_inventory"]:
            raise CurriculumError("core inventory must unlock before the full inventory")


@dataclass
class FilteredState:
    fields: list[str]
    inventory_view: Optional[dict[str, int]]
    context_unlocked: bool
    state: AgentState

    def render(self) -> str:
        return render_state(self.state, self.fields, inventory_override=self.inventory_view)


def warmup_filter(state: AgentState, num_completed: int,
                  schedule: Optional[WarmupSchedule] = None) -> FilteredState:
    """Keep only the state fields unlocked after `num_completed` tasks."""
    schedule = schedule or WarmupSchedule()
    fields: list[str] = []
    inventory_view: Optional[dict[str, int]] = None
    full_inventory = num_completed >= schedule.thresholds["full_inventory"]
    for key, render_field in _FIELD_ORDER:
        if num_completed < schedule.thresholds[key]:
            continue
        if key == "core_inventory":
            if full_inventory:
                inventory_view = None  # superseded by the full inventory row
            else:
                inventory_view = {
                    item: count for item, count in state.inventory.items()
                    if any(token in item for token in schedule.core_items)
                }
            fields.append("inventory")
        elif key == "full_inventory":
            if "inventory" not in fields:
                inventory_view = None
                fields.append("inventory")
        else:
            fields.append(render_field)
    return FilteredState(
        fields=fields,
        inventory_view=inventory_view,
        context_unlocked=num_completed >= schedule.thresholds["additional_context"],
        state=state,
    )


# ----- self-ask / self-answer context ---------------------------------------


@dataclass
class QaPair:
    question: str
    concept: str
    answer: str

    def render(self) -> str:
        return f"Question: {self.question}\nAnswer: {self.answer}"


class DocStore:
    """Concept-keyed reference documents; the stub store ships a few entries."""

    def __init__(self, docs: Optional[dict[str, str]] = None):
        self.docs = dict(docs or {})

    @classmethod
    def bundled(cls) -> "DocStore":
        docs = {}
        root = resources.files("craftagent.craftworld.data").joinpath("docs")
        for entry in sorted(root.iterdir(), key=lambda e: e.name):
            if entry.name.endswith(".txt"):
                docs[entry.name[:-4]] = entry.read_text()
        return cls(docs)

    @classmethod
    def from_dir(cls, path: str | Path) -> "DocStore":
        docs = {}
        for file in sorted(Path(path).glob("*.txt")):
            docs[file.stem] = file.read_text()
        return cls(docs)

    def lookup(self, concept: str) -> Optional[str]:
        key = "_".join(concept.lower().split())
        if key in self.docs:
            return self.docs[key]
        tokens = set(key.split("_"))
        best, overlap = None, 0
        for name in sorted(self.docs):
            shared = len(tokens & set(name.split("_")))
            if shared > overlap:
                best, overlap = name, shared
        return self.docs[best] if best else None


_QA_RE = re.compile(r"Question\s*\d*\s*:\s*(.+?)\s*\n\s*Concept\s*\d*\s*:\s*(.+)", re.IGNORECASE)


def gather_context(state: AgentState, progress: ExplorationProgress, gateway: Gateway,
                   doc_store: Optional[DocStore] = None, max_pairs: int = 5,
                   schedule: Optional[WarmupSchedule] = None) -> list[QaPair]:
    """Self-ask questions about the situation, self-answer them (optionally
    grounded on a reference document); failures degrade to no context."""
    doc_store = doc_store or DocStore()
    filtered = warmup_filter(state, progress.num_completed, schedule)
    ask_user = "My current state:\n" + filtered.render() + "\n\n" + _progress_lines(progress)
    try:
        ask_response = gateway.chat(gateway.request("qa_ask", load_template("curriculum_ask_system"), ask_user))
        pairs = _QA_RE.findall(ask_response.text)[:max_pairs]
        context: list[QaPair] = []
        for question, concept in pairs:
            document = doc_store.lookup(concept.strip())
            answer_user = f"Question: {question.strip()}"
            if document:
                answer_user += f"\n\nReference document:\n{document.strip()}"
            answer = gateway.chat(
                gateway.request("qa_answer", load_template("curriculum_answer_system"), answer_user))
            context.append(QaPair(question.strip(), concept.strip(), answer.text.strip()))
        return context
    except GatewayError as exc:
        logger.warning("context generation failed, continuing without it: %s", exc)
        return []


def _progress_lines(progress: ExplorationProgress) -> str:
    completed = [t.description for t in progress.completed]
    failed = [t.description for t in progress.failed]
    lines = [
        "Completed tasks so far: " + ("; ".join(completed) if completed else "None"),
        "Failed tasks that are too hard: " + ("; ".join(failed) if failed else "None"),
    ]
    return "\n".join(lines)


# ----- automatic proposer -----------------------------------------------------

_TASK_LINE_RE = re.compile(r"^Task\s*:\s*(.+?)\s*$", re.MULTILINE)


def build_curriculum_user_prompt(filtered: FilteredState, progress: ExplorationProgress,
                                 context: list[QaPair], budget_chars: int) -> str:
    """Assemble the proposer prompt, shedding oldest completed entries and
    then recently-seen blocks when over the context budget."""
    completed = [t.description for t in progress.completed]
    failed = [t.description for t in progress.failed]
    recently = list(filtered.state.recently_seen_blocks)

    def build(completed_list, recently_list) -> str:
        state = filtered.state
        saved = state.recently_seen_blocks
        state.recently_seen_blocks = recently_list
        try:
            body = filtered.render()
        finally:
            state.recently_seen_blocks = saved
        parts = [body,
                 "Completed tasks so far: " + ("; ".join(completed_list) if completed_list else "None"),
                 "Failed tasks that are too hard: " + ("; ".join(failed) if failed else "None")]
        if filtered.context_unlocked and context:
            parts.append("\n".join(p.render() for p in context))
        return "\n\n".join(parts)

    prompt = build(completed, recently)
    while len(prompt) > budget_chars and completed:
        completed = completed[1:]  # drop oldest completed entries first
        prompt = build(completed, recently)
    while len(prompt) > budget_chars and recently:
        recently = recently[1:]
        prompt = build(completed, recently)
    return prompt


def parse_task_line(text: str) -> Optional[str]:
    matches = _TASK_LINE_RE.findall(text)
    if not matches:
        return None
    description = matches[-1].strip().rstrip(".")
    return description or None


def propose_next_task(state: AgentState, progress: ExplorationProgress, context: list[QaPair],
                      gateway: Gateway, task_id: int,
                      schedule: Optional[WarmupSchedule] = None) -> tuple[Task, str]:
    """One curriculum call at temperature 0.1; returns the task and the
    model's reasoning text for the run log."""
    filtered = warmup_filter(state, progress.num_completed, schedule)
    budget_chars = gateway.config.context_budget_tokens * 4
    user = build_curriculum_user_prompt(filtered, progress, context, budget_chars)
    system = load_template("curriculum_system")
    response = gateway.chat(gateway.request("curriculum", system, user))
    description = parse_task_line(response.text)
    if description is None:
        reminder = (user + "\n\nYour previous reply did not contain a final line starting with "
                           "'Task:'. Answer again in the required format.")
        response = gateway.chat(gateway.request("curriculum", system, reminder))
        description = parse_task_line(response.text)
        if description is None:
            raise CurriculumError("curriculum response had no Task line after one reprompt")
    reasoning = response.text[:response.text.rfind("Task")].strip()
    return Task(task_id, description, "auto"), reasoning


# ----- manual / random / human proposers ----------------------------------------

MANUAL_DIAMOND_CURRICULUM = [
    "Mine 3 wood log",
    "Craft 1 crafting table",
    "Craft 1 wooden pickaxe",
    "Mine 11 cobblestone",
    "Craft 1 stone pickaxe",
    "Craft 1 furnace",
    "Mine 3 iron ore",
    "Smelt 3 iron ore",
    "Craft 1 iron pickaxe",
    "Mine 1 diamond",
]


class ManualCurriculum:
    def __init__(self, tasks: Optional[list[str]] = None):
        self.tasks = list(tasks if tasks is not None else MANUAL_DIAMOND_CURRICULUM)

    def next(self, progress: ExplorationProgress, task_id: int) -> Task:
        index = progress.num_completed
        if index >= len(self.tasks):
            raise CurriculumDone(f"all {len(self.tasks)} manual tasks completed")
        return Task(task_id, self.tasks[index], "manual")


def load_random_pool() -> list[str]:
    text = resources.files("craftagent.craftworld.data").joinpath("random_pool.txt").read_text()
    return [line.strip() for line in text.splitlines()
            if line.strip() and not line.startswith("#")]


class RandomCurriculum:
    def __init__(self, pool: Optional[list[str]] = None, seed: int = 0):
        self.pool = list(pool if pool is not None else load_random_pool())
        if not self.pool:
            raise CurriculumError("random curriculum pool is empty")
        self.rng = random.Random(seed)

    def next(self, progress: ExplorationProgress, task_id: int) -> Task:
        item = self.rng.choice(self.pool)
        return Task(task_id, f"Obtain 1 {humanize(item)}", "random")


class HumanCurriculum:
    """Blocks on a queue fed by the console service (one producer, one consumer)."""

    def __init__(self, task_queue: Optional[queue.Queue] = None):
        self.queue = task_queue if task_queue is not None else queue.Queue()

    def submit(self, description: str) -> None:
        self.queue.put(description)

    def next(self, progress: ExplorationProgress, task_id: int,
             timeout: Optional[float] = None) -> Task:
        try:
            description = self.queue.get(timeout=timeout)
        except queue.Empty as exc:
            raise CurriculumError("no human task arrived before the timeout") from exc
        return Task(task_id, description, "human")
