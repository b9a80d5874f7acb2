// DOM rendering from the view model; no game logic lives here.

import type { ViewModel } from "./model.js";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node;
}

function renderTable(data: Record<string, unknown>): string {
  const rows = Object.entries(data)
    .map(([key, value]) => `<tr><td>${key}</td><td>${String(value)}</td></tr>`)
    .join("");
  return `<table>${rows}</table>`;
}

export function render(vm: ViewModel): void {
  el("connection").textContent = vm.connected ? "connected" : "reconnecting…";
  el("connection").className = vm.connected ? "ok" : "warn";

  const state = vm.state;
  if (state?.state) {
    const agent = state.state;
    el("inventory").innerHTML = renderTable(agent.inventory);
    el("equipment").innerHTML = renderTable(agent.equipment);
    el("vitals").textContent =
      `health ${agent.health}/20 · hunger ${agent.hunger}/20 · ${agent.time_of_day}`;
    el("place").textContent =
      `${agent.biome} @ (${agent.position.join(", ")})`;
    el("nearby").textContent = agent.nearby_blocks.join(", ") || "nothing";
  }
  if (state) {
    el("iteration").textContent = String(state.iteration);
    const episode = state.episode;
    el("task").textContent = episode?.task
      ? `${episode.task} (round ${episode.round_number})`
      : "waiting for a task";
    el("completed").innerHTML =
      state.completed_tasks.map((t) => `<li>${t}</li>`).join("") || "<li>none yet</li>";
    el("failed").innerHTML =
      state.failed_tasks.map((t) => `<li>${t}</li>`).join("") || "<li>none</li>";

    const pending = state.pending_verification;
    el("pending").hidden = !pending;
    (el("critique-form") as HTMLFieldSetElement & { disabled: boolean }).toggleAttribute(
      "disabled", !pending);
    const humanCurriculum = state.curriculum_mode === "human";
    (el("task-form") as HTMLFieldSetElement).toggleAttribute("disabled", !humanCurriculum);
    el("task-mode-note").hidden = humanCurriculum;
    el("pause-state").textContent = state.paused ? "paused" : (state.running ? "running" : "idle");
  }

  el("program").textContent = vm.latestProgram ?? "(no program yet)";
  el("feedback").innerHTML =
    vm.latestFeedback.map((line) => `<li>${escapeHtml(line)}</li>`).join("") || "<li>none</li>";
  el("exec-error").textContent = vm.latestError ?? "";
  el("exec-error").hidden = vm.latestError === null;

  const logNode = el("log");
  logNode.innerHTML = vm.log
    .slice(-200)
    .map((entry) => `<li class="${entry.kind}">${escapeHtml(entry.text)}</li>`)
    .join("");
  logNode.scrollTop = logNode.scrollHeight;
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;");
}

export function showFormError(id: string, message: string | null): void {
  const node = el(id);
  node.textContent = message ?? "";
  node.hidden = message === null;
}
