from __future__ import annotations

import time

import pytest
from fastapi.testclient import TestClient

from craftagent.craftworld import create_world, default_config
from craftagent.gateway import Gateway, GatewayConfig, ScriptedProvider
from craftagent.harness.runner import RunRecorder
from craftagent.harness.service import RunController, create_app
from craftagent.library import SkillLibrary
from craftagent.loop import AblationConfig, LifelongLoop, LoopConfig
from craftagent.oracle import OracleScript
from tests.conftest import FOREST_SEED


def wait_until(predicate, timeout=5.0, interval=0.01):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if predicate():
            return True
        time.sleep(interval)
    return False


class CapturingProvider(ScriptedProvider):
    def __init__(self, handler):
        super().__init__(handler)
        self.requests = []

    def chat(self, request):
        self.requests.append(request)
        return super().chat(request)


def build_controller(tmp_path, *, curriculum_mode="manual", verifier_mode="self",
                     max_iterations=40, provider=None):
    recorder = RunRecorder(tmp_path / "run")
    world = create_world(default_config(seed=FOREST_SEED), event_sink=recorder.event)
    provider = provider or CapturingProvider(OracleScript())
    gateway = Gateway(provider, config=GatewayConfig(sleep=lambda s: None))
    library = SkillLibrary(gateway)
    loop = LifelongLoop(
        world, gateway, library,
        LoopConfig(ablation=AblationConfig(curriculum_mode=curriculum_mode,
                                           verifier_mode=verifier_mode),
                   max_iterations=max_iterations),
        event_sink=recorder.event)
    controller = RunController(loop, recorder)
    client = TestClient(create_app(controller))
    return controller, client, provider


def test_state_snapshot_before_start(tmp_path):
    controller, client, _ = build_controller(tmp_path)
    body = client.get("/api/state").json()
    assert body["running"] is False
    assert body["state"]["health"] == 20
    assert body["pending_verification"] is False
    assert body["curriculum_mode"] == "manual"


def test_critique_without_pending_verification_is_409(tmp_path):
    controller, client, _ = build_controller(tmp_path, verifier_mode="human")
    response = client.post("/api/critique", json={"success": True, "critique": ""})
    assert response.status_code == 409


def test_critique_in_self_mode_is_409(tmp_path):
    controller, client, _ = build_controller(tmp_path, verifier_mode="self")
    response = client.post("/api/critique", json={"success": False, "critique": "x"})
    assert response.status_code == 409


def test_task_post_rejected_outside_human_mode(tmp_path):
    controller, client, _ = build_controller(tmp_path, curriculum_mode="manual")
    response = client.post("/api/task", json={"description": "build a house"})
    assert response.status_code == 409


def test_human_critic_flow_threads_critique(tmp_path):
    controller, client, provider = build_controller(
        tmp_path, verifier_mode="human", max_iterations=8)
    controller.start()
    assert wait_until(lambda: client.get("/api/state").json()["pending_verification"])
    response = client.post("/api/critique", json={
        "success": False, "critique": "the doorway is one block too short"})
    assert response.status_code == 200
    # the loop resumes and the next codegen prompt carries the critique verbatim
    assert wait_until(lambda: len(
        [r for r in provider.requests if r.role_tag == "codegen"]) >= 2)
    second = [r for r in provider.requests if r.role_tag == "codegen"][1]
    assert "the doorway is one block too short" in second.user_prompt
    # a success verdict commits the skill and completes the task
    assert wait_until(lambda: client.get("/api/state").json()["pending_verification"])
    client.post("/api/critique", json={"success": True, "critique": ""})
    assert wait_until(
        lambda: "Mine 3 wood log" in client.get("/api/state").json()["completed_tasks"])


def test_human_curriculum_tasks_consumed_in_order(tmp_path):
    controller, client, provider = build_controller(
        tmp_path, curriculum_mode="human", max_iterations=6)
    client.post("/api/task", json={"description": "Mine 3 wood log"})
    client.post("/api/task", json={"description": "Craft 1 crafting table"})
    controller.start()
    assert wait_until(lambda: len(client.get("/api/state").json()["completed_tasks"]) >= 2)
    completed = client.get("/api/state").json()["completed_tasks"]
    assert completed[:2] == ["Mine 3 wood log", "Craft 1 crafting table"]


def test_events_cursor_is_incremental(tmp_path):
    controller, client, _ = build_controller(tmp_path, max_iterations=12)
    controller.start()
    assert wait_until(lambda: not controller.running())
    first = client.get("/api/events", params={"cursor": 0}).json()
    assert first["cursor"] == len(first["events"]) > 0
    again = client.get("/api/events", params={"cursor": first["cursor"]}).json()
    assert again["events"] == []
    assert again["cursor"] == first["cursor"]
    middle = client.get("/api/events", params={"cursor": 3}).json()
    assert middle["events"] == first["events"][3:]


def test_pause_and_resume_gate(tmp_path):
    controller, client, _ = build_controller(tmp_path, max_iterations=40)
    client.post("/api/control", json={"action": "pause"})
    controller.start()
    time.sleep(0.1)
    iteration = client.get("/api/state").json()["iteration"]
    assert iteration <= 1  # at most the round already in flight
    assert client.get("/api/state").json()["paused"] is True
    client.post("/api/control", json={"action": "resume"})
    assert wait_until(lambda: client.get("/api/state").json()["iteration"] >= 2)


def test_empty_task_description_rejected(tmp_path):
    controller, client, _ = build_controller(tmp_path, curriculum_mode="human")
    response = client.post("/api/task", json={"description": ""})
    assert response.status_code == 422  # validation, not the 409 mode gate


def test_state_response_shape(tmp_path):
    controller, client, _ = build_controller(tmp_path, max_iterations=4)
    controller.start()
    assert wait_until(lambda: not controller.running())
    body = client.get("/api/state").json()
    for key in ("state", "episode", "iteration", "completed_tasks", "failed_tasks",
                "pending_verification", "paused", "running", "curriculum_mode", "verifier_mode"):
        assert key in body
    assert set(body["state"]) >= {"inventory", "equipment", "nearby_blocks", "position",
                                  "biome", "health", "hunger", "time_of_day"}


def test_pending_verification_shows_current_task(tmp_path):
    controller, client, _ = build_controller(
        tmp_path, verifier_mode="human", max_iterations=4)
    controller.start()
    assert wait_until(lambda: client.get("/api/state").json()["pending_verification"])
    body = client.get("/api/state").json()
    assert body["episode"]["task"] == "Mine 3 wood log"
    client.post("/api/critique", json={"success": True, "critique": ""})
