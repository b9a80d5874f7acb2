from __future__ import annotations

from pathlib import Path

import pytest

from craftagent.gateway import Gateway, GatewayConfig, ScriptedProvider, cosine
from craftagent.library import LibraryError, RetrievalQuery, Skill, SkillLibrary, describe_skill
from craftagent.skillscript import ProgramSource, program_source, render_api_docs
from tests.test_skillscript import CORPUS_ORDER, corpus_text


def make_gateway(handler=lambda req: "A canned description."):
    return Gateway(ScriptedProvider(handler), config=GatewayConfig(sleep=lambda s: None))


def make_library(handler=lambda req: "A canned description.") -> SkillLibrary:
    return SkillLibrary(make_gateway(handler))


SMELT_SKILL = """
fn smeltFiveRawIron() {
  place_item("furnace")
  smelt_item("raw_iron", "coal", 5)
}
"""


def test_add_to_empty_library():
    library = make_library()
    skill = library.add_skill(SMELT_SKILL, "Smelts five raw iron with coal.")
    assert len(library) == 1
    assert skill.name == "smeltFiveRawIron"
    assert skill.embedding.dimension == 256


def test_name_collision_gets_version_suffix():
    library = make_library()
    library.add_skill(SMELT_SKILL, "Smelts five raw iron with coal.")
    second = library.add_skill(SMELT_SKILL, "Improved: checks fuel first.")
    assert second.name == "smeltFiveRawIronV2"
    assert "fn smeltFiveRawIronV2(" in second.source.text
    third = library.add_skill(SMELT_SKILL, "Third revision.")
    assert third.name == "smeltFiveRawIronV3"


def test_added_skill_enters_api_docs():
    library = make_library()
    library.add_skill(SMELT_SKILL, "Smelts five raw iron with coal.")
    docs = render_api_docs(library.registry())
    assert "smeltFiveRawIron()" in docs
    assert "Smelts five raw iron with coal." in docs


def test_invalid_source_rejected():
    library = make_library()
    with pytest.raises(LibraryError, match="unknown callable"):
        library.add_skill("fn bad() { flyToTheMoon() }", "Does not exist.")
    with pytest.raises(LibraryError, match="non-empty"):
        library.add_skill(SMELT_SKILL, "   ")


def test_add_never_mutates_existing_skills():
    library = make_library()
    first = library.add_skill(SMELT_SKILL, "Smelts five raw iron with coal.")
    snapshot = (first.name, first.description, first.source.text, first.embedding.components)
    library.add_skill(SMELT_SKILL, "Another one.")
    library.add_skill('fn other() { say "hi" }', "Other.")
    again = library.skills["smeltFiveRawIron"]
    assert (again.name, again.description, again.source.text, again.embedding.components) == snapshot


def corpus_library(names=CORPUS_ORDER) -> SkillLibrary:
    library = make_library()
    for i, name in enumerate(names):
        library.add_skill(corpus_text(name), f"The function is about the skill {name}.",
                          created_at_iteration=i)
    return library


def test_self_retrieval_rank_one_similarity_one():
    library = corpus_library(CORPUS_ORDER[:8])
    for name, skill in library.skills.items():
        results = library.retrieve(RetrievalQuery(skill.description, k=1))
        assert [s.name for s in results] == [name]
        sims = library.similarities(RetrievalQuery(skill.description))
        assert sims[name] == 1.0


def test_empty_library_retrieval():
    assert make_library().retrieve(RetrievalQuery("anything")) == []


def test_retrieval_matches_brute_force_on_corpus():
    library = corpus_library(CORPUS_ORDER[:8])
    query = RetrievalQuery("craft a stone pickaxe", k=5)
    query_vector = library.gateway.embed(query.text())
    # independent oracle: exhaustive cosine over all stored skills
    scored = []
    for index, skill in enumerate(library.skills.values()):
        scored.append((-cosine(query_vector, skill.embedding), skill.created_at_iteration,
                       index, skill.name))
    expected = [name for *_, name in sorted(scored)[:5]]
    got = [s.name for s in library.retrieve(query)]
    assert got == expected


def test_retrieval_tie_break_prefers_older():
    library = make_library()
    library.add_skill("fn one() { say \"a\" }", "identical description", created_at_iteration=9)
    library.add_skill("fn two() { say \"b\" }", "identical description", created_at_iteration=2)
    results = library.retrieve(RetrievalQuery("identical description", k=2))
    assert [s.name for s in results] == ["two", "one"]


def test_retrieval_is_pure():
    library = corpus_library(CORPUS_ORDER[:8])
    query = RetrievalQuery("smelt iron in a furnace")
    first = [s.name for s in library.retrieve(query)]
    second = [s.name for s in library.retrieve(query)]
    assert first == second


# ----- persistence -------------------------------------------------------------


def test_persist_load_round_trip(tmp_path):
    library = corpus_library(CORPUS_ORDER[:3])
    library.persist(tmp_path / "skills")
    loaded = SkillLibrary.load(tmp_path / "skills", make_gateway())
    assert list(loaded.skills) == list(library.skills)
    for name in library.skills:
        original, restored = library.skills[name], loaded.skills[name]
        assert restored.description == original.description
        assert restored.source.text == original.source.text
        assert restored.created_at_iteration == original.created_at_iteration
        assert max(abs(a - b) for a, b in zip(restored.embedding.components,
                                              original.embedding.components)) <= 1e-9


def test_on_disk_layout(tmp_path):
    library = corpus_library(CORPUS_ORDER[:2])
    library.persist(tmp_path / "skills")
    files = {p.name for p in (tmp_path / "skills").iterdir()}
    assert "manifest" in files
    for name in CORPUS_ORDER[:2]:
        fn = corpus_text(name).split("(")[0].split()[-1]
        assert f"{fn}.skill" in files
        assert f"{fn}.desc.txt" in files


def test_load_missing_source_names_entry(tmp_path):
    library = corpus_library(CORPUS_ORDER[:2])
    library.persist(tmp_path / "skills")
    victim = list(library.skills)[1]
    (tmp_path / "skills" / f"{victim}.skill").unlink()
    with pytest.raises(LibraryError, match=victim):
        SkillLibrary.load(tmp_path / "skills", make_gateway())


def test_retrieval_identical_after_round_trip(tmp_path):
    library = corpus_library(CORPUS_ORDER[:8])
    query = RetrievalQuery("mine iron ore east of here")
    before = [s.name for s in library.retrieve(query)]
    library.persist(tmp_path / "skills")
    loaded = SkillLibrary.load(tmp_path / "skills", make_gateway())
    after = [s.name for s in loaded.retrieve(query)]
    assert before == after


# ----- description generation -----------------------------------------------------


def test_describe_skill_uses_describe_role():
    seen = []

    def handler(request):
        seen.append(request)
        return "The function is about smelting iron."

    gateway = make_gateway(handler)
    source = program_source(SMELT_SKILL)
    text = describe_skill(source, gateway, "TEMPLATE")
    assert text == "The function is about smelting iron."
    assert seen[0].role_tag == "describe"
    assert seen[0].temperature == 0.0
    assert seen[0].system_prompt == "TEMPLATE"
    assert SMELT_SKILL.strip() in seen[0].user_prompt


def test_describe_deterministic_under_scripted_gateway():
    gateway = make_gateway(lambda req: "Same text.")
    source = program_source(SMELT_SKILL)
    assert describe_skill(source, gateway, "T") == describe_skill(source, gateway, "T")


def test_load_rejects_description_digest_mismatch(tmp_path):
    library = corpus_library(CORPUS_ORDER[:1])
    library.persist(tmp_path / "skills")
    victim = next(iter(library.skills))
    (tmp_path / "skills" / f"{victim}.desc.txt").write_text("tampered description")
    with pytest.raises(LibraryError, match="digest mismatch"):
        SkillLibrary.load(tmp_path / "skills", make_gateway())
