// Polling loop plus form wiring. The console is stateless with respect to
// the run: everything is rebuilt from the service on reload.

import { ApiError, getEvents, getState, postControl, postCritique, postTask } from "./api.js";
import {
  applyEvents,
  applyState,
  backoffDelayMs,
  emptyViewModel,
  markDisconnected,
  validateTaskDescription,
} from "./model.js";
import { render, showFormError } from "./render.js";

const POLL_MS = 800;

let vm = emptyViewModel();
let failures = 0;
let timer: number | undefined;

async function poll(): Promise<void> {
  try {
    const state = await getState();
    vm = applyState(vm, state);
    const batch = await getEvents(vm.cursor);
    vm = applyEvents(vm, batch.events, batch.cursor);
    failures = 0;
  } catch {
    failures += 1;
    vm = markDisconnected(vm);
  }
  render(vm);
  const delay = failures > 0 ? backoffDelayMs(failures) : POLL_MS;
  timer = window.setTimeout(poll, delay);
}

function wireForms(): void {
  const critiqueForm = document.getElementById("critique-form-el") as HTMLFormElement;
  critiqueForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    const success = (document.getElementById("critique-success") as HTMLInputElement).checked;
    const text = (document.getElementById("critique-text") as HTMLTextAreaElement).value;
    try {
      await postCritique(success, text);
      showFormError("critique-error", null);
      (document.getElementById("critique-text") as HTMLTextAreaElement).value = "";
    } catch (error) {
      const detail = error instanceof ApiError ? error.message : "service unreachable";
      showFormError("critique-error", detail);
    }
  });

  const taskForm = document.getElementById("task-form-el") as HTMLFormElement;
  taskForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    const input = document.getElementById("task-text") as HTMLInputElement;
    const invalid = validateTaskDescription(input.value);
    if (invalid) {
      showFormError("task-error", invalid);
      return;
    }
    try {
      await postTask(input.value.trim());
      showFormError("task-error", null);
      input.value = "";
    } catch (error) {
      const detail = error instanceof ApiError ? error.message : "service unreachable";
      showFormError("task-error", detail);
    }
  });

  document.getElementById("pause")!.addEventListener("click", () => postControl("pause"));
  document.getElementById("resume")!.addEventListener("click", () => postControl("resume"));
}

document.addEventListener("DOMContentLoaded", () => {
  wireForms();
  void poll();
});

export { timer };
