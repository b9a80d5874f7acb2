from __future__ import annotations

import json
import re
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from craftagent.craftworld import create_world, default_config
from craftagent.skillscript import (
    ApiRegistry,
    ParseError,
    analyze,
    execute,
    parse,
    print_program,
    program_source,
    render_api_docs,
    static_call_bound,
)
from tests.conftest import FOREST_SEED

CORPUS_DIR = Path(__file__).parent / "corpus"
CORPUS_ORDER = [
    "craftWoodenPlanks", "mineThreeWoodLogs", "craftCraftingTable", "craftWoodenPickaxe",
    "mineElevenCobblestone", "craftStonePickaxe", "craftFurnace", "mineThreeIronOre",
    "smeltFiveRawIronV2", "craftIronPickaxe", "mineOneDiamond", "mineTenStoneBelowZero",
    "killFiveCodSafely", "craftIronChestplate", "killOneSheepForFood", "cookMuttonInFurnace",
    "exploreEastForIron", "depositExtraCobblestone", "craftTorches", "collectCoalForFuel",
]


def corpus_text(name: str) -> str:
    return (CORPUS_DIR / f"{name}.skill").read_text()


def corpus_registry() -> ApiRegistry:
    registry = ApiRegistry()
    for name in CORPUS_ORDER:
        program = parse(corpus_text(name))
        assert analyze(program, registry) == [], name
        registry.add_skill(program.function, doc=f"corpus skill {name}")
    return registry


# ----- parsing ----------------------------------------------------------------


def test_parse_noop():
    program = parse("fn noop() { }")
    assert program.function.name == "noop"
    assert program.function.params == []
    assert program.function.body == []


def test_unbalanced_brace_reports_position():
    source = 'fn broken() {\n  say "hi"\n'
    with pytest.raises(ParseError) as exc:
        parse(source)
    assert exc.value.line == 3
    assert "}" in exc.value.expected


def test_multiple_top_level_functions_rejected():
    with pytest.raises(ParseError, match="multiple top-level"):
        parse("fn a() { }\nfn b() { }")


def test_empty_source_rejected():
    with pytest.raises(ParseError, match="function"):
        parse("   \n# nothing here\n")


def test_program_source_matches_entry_name():
    source = program_source("fn pickTask() { say \"x\" }")
    assert source.entry_name == "pickTask"


@pytest.mark.parametrize("name", CORPUS_ORDER)
def test_corpus_parses_and_round_trips(name):
    text = corpus_text(name)
    tree = parse(text)
    printed = print_program(tree)
    assert parse(printed) == tree
    # printing is a fixed point after one normalization
    assert print_program(parse(printed)) == printed


# ----- static analysis -----------------------------------------------------------


def test_unknown_callable_reported():
    program = parse("fn bad() { craftAcaciaAxe() }")
    errors = analyze(program, ApiRegistry())
    assert [e.kind for e in errors] == ["unknown_callable"]
    assert "craftAcaciaAxe" in errors[0].message


def test_cycle_detected():
    registry = ApiRegistry()
    a = parse("fn skillA() { skillB() }").function
    b = parse("fn skillB() { skillA() }").function
    registry.skills = {}
    registry.add_skill(b)  # b references a, which is being analyzed
    errors = analyze(a, registry)
    cycles = [e for e in errors if e.kind == "cycle"]
    assert cycles and "skillA -> skillB -> skillA" in cycles[0].message


def test_valid_program_has_no_errors():
    registry = ApiRegistry()
    program = parse(corpus_text("craftWoodenPickaxe"))
    assert analyze(program, registry) == []


def test_arity_mismatch():
    program = parse('fn bad() { mine_block("oak_log", 1, 2) }')
    errors = analyze(program, ApiRegistry())
    assert [e.kind for e in errors] == ["arity"]


def test_unknown_variable():
    program = parse("fn bad() { say missing }")
    errors = analyze(program, ApiRegistry())
    assert [e.kind for e in errors] == ["unknown_variable"]


def test_let_scoping_is_block_local():
    program = parse("""
fn bad() {
  if true {
    let x = 1
  }
  say x
}
""")
    errors = analyze(program, ApiRegistry())
    assert [e.kind for e in errors] == ["unknown_variable"]


def test_query_not_callable_as_action():
    program = parse('fn bad() { block_nearby("stone") }')
    errors = analyze(program, ApiRegistry())
    assert [e.kind for e in errors] == ["misuse"]


# ----- execution -------------------------------------------------------------------


def fresh_world():
    return create_world(default_config(seed=FOREST_SEED))


def test_bootstrap_program_reaches_wooden_pickaxe():
    source = """
fn bootstrap() {
  mine_block("oak_log", 3)
  craft_item("oak_planks", 12)
  craft_item("crafting_table", 1)
  craft_item("stick", 4)
  place_item("crafting_table")
  craft_item("wooden_pickaxe", 1)
}
"""
    world = fresh_world()
    outcome = execute(parse(source), world, ApiRegistry())
    assert outcome.error is None
    assert outcome.end_state.inventory.get("wooden_pickaxe") == 1
    # stations placed by the program were recycled afterwards
    assert outcome.end_state.inventory.get("crafting_table") == 1
    assert world.edits == {}


def test_budget_exhaustion():
    source = """
fn spin() {
  repeat 1000000000 {
    explore_until("east", 1)
  }
}
"""
    world = fresh_world()
    outcome = execute(parse(source), world, ApiRegistry(), budget=37)
    assert outcome.error is not None
    assert outcome.error.kind == "budget_exceeded"
    assert outcome.steps_used == 37


def test_runtime_error_carries_location_and_trace():
    registry = ApiRegistry()
    helper = parse('fn digMithril() { mine_block("mithril", 1) }').function
    registry.add_skill(helper)
    program = parse("fn main() {\n  digMithril()\n}")
    outcome = execute(program, fresh_world(), registry)
    assert outcome.error is not None
    assert outcome.error.kind == "unknown_block"
    assert outcome.error.trace == ["digMithril"]
    assert "unknown block: mithril" in outcome.error.render()


def test_say_goes_to_feedback():
    outcome = execute(parse('fn chat() { say "hello " + "world" }'), fresh_world(), ApiRegistry())
    assert "hello world" in outcome.feedback


def test_skill_call_matches_inlined_program():
    registry = corpus_registry()
    composed = parse("""
fn doBoth() {
  craftWoodenPlanks(4)
  craftCraftingTable()
}
""")
    inlined = parse(
        "fn flat() {\n"
        + "\n".join("  " + line for line in _body_lines("craftWoodenPlanks", ("count", "4")))
        + "\n"
        + "\n".join("  " + line for line in _body_lines("craftCraftingTable"))
        + "\n}"
    )
    events_a: list = []
    events_b: list = []
    world_a = create_world(default_config(seed=FOREST_SEED), event_sink=events_a.append)
    world_b = create_world(default_config(seed=FOREST_SEED), event_sink=events_b.append)
    out_a = execute(composed, world_a, registry)
    out_b = execute(inlined, world_b, registry)
    assert out_a.error is None and out_b.error is None
    assert out_a.end_state.to_dict() == out_b.end_state.to_dict()
    assert json.dumps(events_a, sort_keys=True) == json.dumps(events_b, sort_keys=True)


def _body_lines(name: str, *bindings: tuple[str, str]) -> list[str]:
    """Inline a corpus skill body with parameters substituted textually."""
    text = corpus_text(name)
    lines = text.strip().splitlines()
    body = lines[1:-1]
    out = []
    for line in body:
        for param, value in bindings:
            line = re.sub(rf"\b{param}\b", value, line)
        out.append(line.strip())
    return [line for line in out if line and not line.startswith("#")]


def test_execution_budget_respects_static_bound():
    registry = corpus_registry()
    for name in ("craftWoodenPickaxe", "mineThreeIronOre", "craftTorches"):
        program = parse(corpus_text(name))
        bound = static_call_bound(program, registry)
        outcome = execute(program, fresh_world(), registry, budget=100000)
        assert outcome.steps_used <= bound


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 4))
def test_nested_repeat_counts_exact(outer, inner, mines):
    source = (
        "fn gen() {\n"
        f"  repeat {outer} {{\n"
        f"    repeat {inner} {{\n"
        f'      mine_block("dirt", {mines})\n'
        "    }\n"
        "  }\n"
        "}\n"
    )
    program = parse(source)
    registry = ApiRegistry()
    bound = static_call_bound(program, registry)
    assert bound == outer * inner
    outcome = execute(program, fresh_world(), registry, budget=1000)
    assert outcome.steps_used == outer * inner
    assert print_program(parse(print_program(program))) == print_program(program)


def test_interpreter_module_is_hermetic():
    import craftagent.skillscript.interpreter as module
    source = Path(module.__file__).read_text()
    for banned in ("import os", "import socket", "import subprocess", "open(", "requests"):
        assert banned not in source


# ----- api docs -------------------------------------------------------------------


def test_render_docs_deterministic():
    registry = ApiRegistry()
    first = render_api_docs(registry)
    assert first == render_api_docs(registry)
    assert "mine_block(name, count=1)" in first
    assert "Library skills" not in first


def test_render_docs_grows_by_one_signature():
    registry = ApiRegistry()
    before = render_api_docs(registry)
    registry.add_skill(parse("fn helperSkill(a, b) { say a }").function, doc="Example skill.")
    after = render_api_docs(registry)
    assert "helperSkill(a, b)" in after
    added = set(after.splitlines()) - set(before.splitlines())
    assert {line.strip() for line in added} == {
        "Library skills in scope:", "helperSkill(a, b)", "Example skill."}
