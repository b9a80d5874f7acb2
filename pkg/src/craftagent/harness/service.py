"""HTTP service around a live run: state/event polling for the console plus
the human-as-critic and human-as-curriculum steering endpoints."""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..loop import EpisodeRecord, LifelongLoop, LoopHooks, RoundRecord
from .runner import RunRecorder

FRONTEND_DIST = Path(__file__).resolve().parents[3] / "frontend" / "dist"


class CritiqueRequest(BaseModel):
    success: bool
    critique: str = ""


class TaskRequest(BaseModel):
    description: str = Field(min_length=1)


class ControlRequest(BaseModel):
    action: Literal["pause", "resume"]


class AckResponse(BaseModel):
    ok: bool = True
    detail: str = ""


class EventsResponse(BaseModel):
    cursor: int
    events: list[dict]


class EpisodeSnapshot(BaseModel):
    task: Optional[str] = None
    round_number: int = 0
    final: Optional[str] = None
    committed_skill: Optional[str] = None


class StateResponse(BaseModel):
    state: Optional[dict] = None
    episode: Optional[EpisodeSnapshot] = None
    iteration: int = 0
    completed_tasks: list[str] = []
    failed_tasks: list[str] = []
    pending_verification: bool = False
    paused: bool = False
    running: bool = False
    curriculum_mode: str = "auto"
    verifier_mode: str = "self"


class RunController:
    """Owns the loop thread; the service reads snapshots taken at round
    boundaries so clients never observe a torn state."""

    def __init__(self, loop: LifelongLoop, recorder: RunRecorder):
        self.loop = loop
        self.recorder = recorder
        self.pause_gate = threading.Event()
        self.pause_gate.set()
        self._lock = threading.Lock()
        self._snapshot: Optional[dict] = None
        self._episode = EpisodeSnapshot()
        self.thread: Optional[threading.Thread] = None
        loop.hooks = LoopHooks(
            pause_gate=self.pause_gate,
            on_round=self._on_round,
            on_episode=self._on_episode,
        )
        self._take_snapshot(round_number=0)

    # ----- loop-side callbacks (run on the loop thread) -----

    def _take_snapshot(self, round_number: int) -> None:
        state = self.loop.world.observe().to_dict()
        with self._lock:
            self._snapshot = state
            task = self.loop.current_task
            self._episode = EpisodeSnapshot(
                task=task.description if task else None,
                round_number=round_number,
            )

    def _on_round(self, loop: LifelongLoop, record: RoundRecord) -> None:
        current = self._episode.round_number if self._episode else 0
        self._take_snapshot(round_number=current + 1)

    def _on_episode(self, loop: LifelongLoop, episode: EpisodeRecord) -> None:
        with self._lock:
            self._episode = EpisodeSnapshot(
                task=episode.task.description,
                round_number=len(episode.rounds),
                final=episode.final,
                committed_skill=episode.committed_skill,
            )

    # ----- service-side API -----

    def start(self) -> None:
        if self.thread is not None:
            return
        self.thread = threading.Thread(target=self.loop.run_lifelong, daemon=True)
        self.thread.start()

    def running(self) -> bool:
        return self.thread is not None and self.thread.is_alive()

    def state(self) -> StateResponse:
        with self._lock:
            snapshot = dict(self._snapshot) if self._snapshot else None
            episode = self._episode.model_copy() if self._episode else None
        current = self.loop.current_task
        if episode is not None and episode.task is None and current is not None:
            episode.task = current.description  # episode under way, no round boundary yet
        return StateResponse(
            state=snapshot,
            episode=episode,
            iteration=self.loop.iteration,
            completed_tasks=[t.description for t in self.loop.progress.completed],
            failed_tasks=[t.description for t in self.loop.progress.failed],
            pending_verification=self.loop.awaiting_critique,
            paused=not self.pause_gate.is_set(),
            running=self.running(),
            curriculum_mode=self.loop.config.ablation.curriculum_mode,
            verifier_mode=self.loop.config.ablation.verifier_mode,
        )

    def events_since(self, cursor: int) -> EventsResponse:
        events = self.recorder.events
        cursor = max(0, min(cursor, len(events)))
        return EventsResponse(cursor=len(events), events=list(events[cursor:]))

    def post_critique(self, body: CritiqueRequest) -> None:
        if self.loop.human_verifier is None:
            raise HTTPException(status_code=409, detail="run is not in human-critic mode")
        if not self.loop.awaiting_critique:
            raise HTTPException(status_code=409, detail="no verification is pending")
        self.loop.human_verifier.submit(body.success, body.critique)

    def post_task(self, body: TaskRequest) -> None:
        if self.loop.human_curriculum is None:
            raise HTTPException(status_code=409, detail="run is not in human-curriculum mode")
        self.loop.human_curriculum.submit(body.description)

    def control(self, body: ControlRequest) -> str:
        if body.action == "pause":
            self.pause_gate.clear()
            return "paused at the next round boundary"
        self.pause_gate.set()
        return "resumed"


def create_app(controller: RunController, static_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="craftagent console service")

    @app.get("/api/state", response_model=StateResponse)
    def get_state() -> StateResponse:
        return controller.state()

    @app.get("/api/events", response_model=EventsResponse)
    def get_events(cursor: int = 0) -> EventsResponse:
        return controller.events_since(cursor)

    @app.post("/api/critique", response_model=AckResponse)
    def post_critique(body: CritiqueRequest) -> AckResponse:
        controller.post_critique(body)
        return AckResponse(detail="verdict delivered to the loop")

    @app.post("/api/task", response_model=AckResponse)
    def post_task(body: TaskRequest) -> AckResponse:
        controller.post_task(body)
        return AckResponse(detail="task queued for the next episode")

    @app.post("/api/control", response_model=AckResponse)
    def post_control(body: ControlRequest) -> AckResponse:
        return AckResponse(detail=controller.control(body))

    static_root = static_dir if static_dir is not None else FRONTEND_DIST
    if static_root.is_dir():
        app.mount("/", StaticFiles(directory=static_root, html=True), name="console")
    return app
