"""Self-verification critic plus the rule-based oracle used for measurement."""

from __future__ import annotations

import queue
import re
from dataclasses import dataclass
from typing import Optional

from .craftworld.world import AgentState, render_state
from .curriculum import QaPair
from .gateway import Gateway
from .naming import snake
from .templates import load_template

# A.5-style exclusions: recently seen blocks and nearby entities carry no
# signal about task completion.
VERIFIER_FIELDS = ["inventory", "equipment", "nearby_blocks", "position",
                   "biome", "health", "hunger", "time", "chests"]


@dataclass
class VerificationResult:
    success: bool
    critique: str
    raw_reasoning: str

    def __post_init__(self) -> None:
        if self.success:
            self.critique = ""
        elif not self.critique.strip():
            self.critique = "The task was not completed."


_SUCCESS_RE = re.compile(r"^Success\s*:\s*(true|false)\s*$", re.IGNORECASE | re.MULTILINE)
_CRITIQUE_RE = re.compile(r"^Critique\s*:\s*(.*)$", re.IGNORECASE | re.MULTILINE | re.DOTALL)
_REASONING_RE = re.compile(r"^Reasoning\s*:\s*(.*?)(?=^Success\s*:)", re.IGNORECASE | re.MULTILINE | re.DOTALL)


def build_verifier_prompt(state: AgentState, task_description: str,
                          context: list[QaPair]) -> tuple[str, str]:
    parts = [f"Task: {task_description}", render_state(state, VERIFIER_FIELDS)]
    if context:
        parts.append("\n".join(p.render() for p in context))
    return load_template("verifier_system"), "\n\n".join(parts)


def _parse_verdict(text: str) -> Optional[VerificationResult]:
    match = _SUCCESS_RE.search(text)
    if not match:
        return None
    success = match.group(1).lower() == "true"
    critique_match = _CRITIQUE_RE.search(text)
    critique = critique_match.group(1).strip() if critique_match else ""
    reasoning_match = _REASONING_RE.search(text)
    reasoning = reasoning_match.group(1).strip() if reasoning_match else text.strip()
    return VerificationResult(success, critique, reasoning)


def self_verify(state: AgentState, task_description: str, context: list[QaPair],
                gateway: Gateway) -> VerificationResult:
    """One critic call at temperature 0; unparseable output means failure."""
    system, user = build_verifier_prompt(state, task_description, context)
    response = gateway.chat(gateway.request("verifier", system, user))
    verdict = _parse_verdict(response.text)
    if verdict is None:
        reminder = (user + "\n\nYour previous reply was not in the required format. "
                           "Reply with Reasoning, Success, and Critique lines.")
        response = gateway.chat(gateway.request("verifier", system, reminder))
        verdict = _parse_verdict(response.text)
        if verdict is None:
            return VerificationResult(False, "verifier unparseable", response.text)
    return verdict


class HumanVerifier:
    """Human-as-critic: blocks until the console posts a verdict."""

    def __init__(self, critique_queue: Optional[queue.Queue] = None):
        self.queue = critique_queue if critique_queue is not None else queue.Queue()

    def submit(self, success: bool, critique: str) -> None:
        self.queue.put((success, critique))

    def verify(self, timeout: Optional[float] = None) -> VerificationResult:
        success, critique = self.queue.get(timeout=timeout)
        return VerificationResult(success, critique, "human verdict")


# ----- rule-based ground truth ------------------------------------------------

_TASK_RE = re.compile(r"^\s*(mine|craft|smelt|obtain|collect|kill)\s+(\d+)\s+(.+?)\.?\s*$",
                      re.IGNORECASE)

# task nouns whose inventory evidence differs from their snake_case form
_MINE_ALIASES = {
    "wood_log": ("suffix", "_log"),
    "log": ("suffix", "_log"),
    "wood": ("suffix", "_log"),
    "stone": ("items", ["cobblestone"]),
    "cobblestone": ("items", ["cobblestone"]),
    "iron_ore": ("items", ["raw_iron"]),
    "copper_ore": ("items", ["raw_copper"]),
    "gold_ore": ("items", ["raw_gold"]),
    "coal_ore": ("items", ["coal"]),
    "diamond_ore": ("items", ["diamond"]),
}

_SMELT_ALIASES = {
    "iron_ore": "iron_ingot",
    "raw_iron": "iron_ingot",
    "gold_ore": "gold_ingot",
    "raw_gold": "gold_ingot",
    "copper_ore": "copper_ingot",
    "raw_copper": "copper_ingot",
    "sand": "glass",
}

_KILL_DROPS = {
    "sheep": ["mutton"], "cow": ["beef"], "pig": ["porkchop"],
    "chicken": ["chicken"], "zombie": ["rotten_flesh"], "spider": ["string"],
    "skeleton": ["bone"], "creeper": ["gunpowder"], "cod": ["cod"], "salmon": ["salmon"],
}


def _delta(before: AgentState, after: AgentState, item: str) -> int:
    return after.inventory.get(item, 0) - before.inventory.get(item, 0)


def _family_delta(before: AgentState, after: AgentState, suffix: str) -> int:
    items = set(before.inventory) | set(after.inventory)
    return sum(_delta(before, after, i) for i in items if i.endswith(suffix))


def rule_check(state_before: AgentState, state_after: AgentState,
               task_description: str) -> Optional[bool]:
    """Ground-truth success by inventory delta for "<verb> N <item>"-style
    tasks; None for tasks that are not rule-checkable. Used by the harness to
    measure the critic, never by the agent itself."""
    match = _TASK_RE.match(task_description)
    if not match:
        return None
    verb, count, noun = match.group(1).lower(), int(match.group(2)), snake(match.group(3))
    if verb == "mine" and noun in _MINE_ALIASES:
        kind, payload = _MINE_ALIASES[noun]
        if kind == "suffix":
            return _family_delta(state_before, state_after, payload) >= count
        return sum(_delta(state_before, state_after, i) for i in payload) >= count
    if verb == "smelt":
        target = _SMELT_ALIASES.get(noun, noun)
        return _delta(state_before, state_after, target) >= count
    if verb == "kill":
        drops = _KILL_DROPS.get(noun)
        if drops is None:
            return None
        return any(_delta(state_before, state_after, d) >= 1 for d in drops)
    # mine/craft/obtain/collect of a plainly named item ("sticks" -> "stick")
    candidates = [noun] + ([noun[:-1]] if noun.endswith("s") else [])
    return any(_delta(state_before, state_after, c) >= count for c in candidates)
