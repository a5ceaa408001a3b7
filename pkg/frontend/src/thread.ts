import { markdownToHtml } from "./markdown.js";
import { buildWidget, type WidgetHandlers } from "./widgets.js";
import type { ThreadViewModel } from "./types.js";

export interface ThreadHandlers extends WidgetHandlers {
  selectResponse(cellId: string): void;
  jumpTo(cellId: string): void;
  ask(question: string): void;
  selectCell(cellId: string): void;
}

/**
 * Render the flattened dialog: the current cell's ancestor chain, the
 * available responses, the custom-question box, and the back-to-main
 * affordance. Purely a projection of service data; no navigation logic.
 */
export function renderThread(container: HTMLElement, vm: ThreadViewModel, handlers: ThreadHandlers): void {
  container.textContent = "";

  const thread = document.createElement("div");
  thread.className = "thread";
  for (const cell of vm.cells) {
    const message = document.createElement("article");
    message.className = "message";
    message.dataset.cellId = cell.cellId;
    if (cell.cellId === vm.selectedCellId) message.classList.add("selected");
    if (cell.isDivergencePoint) message.classList.add("divergence");
    message.addEventListener("click", () => handlers.selectCell(cell.cellId));

    const header = document.createElement("header");
    const speaker = document.createElement("span");
    speaker.className = "speaker";
    speaker.textContent = cell.personaName;
    header.appendChild(speaker);
    if (cell.hasMultipleResponses) {
      const icon = document.createElement("span");
      icon.className = "branch-icon" + (cell.isDivergencePoint ? " branch-icon-divergence" : "");
      icon.title = cell.isDivergencePoint
        ? "Your path diverges from the main thread here"
        : "This message has multiple possible responses";
      icon.textContent = "⑂"; // ⑂
      header.appendChild(icon);
    }
    if (cell.codeChanged) {
      const icon = document.createElement("span");
      icon.className = "code-icon";
      icon.title = "This message changes the code sample";
      icon.textContent = "{}";
      header.appendChild(icon);
    }
    message.appendChild(header);

    if (cell.aiWarning) {
      const warning = document.createElement("div");
      warning.className = "ai-warning";
      warning.textContent = "Warning: AI-generated content that has not been verified.";
      message.appendChild(warning);
    }

    const body = document.createElement("div");
    body.className = "message-body";
    for (const segment of cell.renderedSegments) {
      if (segment.kind === "markdown") {
        const block = document.createElement("div");
        block.className = "markdown";
        block.innerHTML = markdownToHtml(segment.text ?? "");
        body.appendChild(block);
      } else {
        body.appendChild(buildWidget(segment, handlers));
      }
    }
    message.appendChild(body);
    thread.appendChild(message);
  }
  container.appendChild(thread);

  const controls = document.createElement("div");
  controls.className = "controls";

  if (vm.nav.backToMain) {
    const back = document.createElement("button");
    back.type = "button";
    back.id = "back-to-main";
    back.textContent = "Back to main thread";
    back.dataset.target = vm.nav.backToMain;
    back.disabled = vm.pendingAsk;
    back.addEventListener("click", () => handlers.jumpTo(vm.nav.backToMain as string));
    controls.appendChild(back);
  }

  if (vm.nav.reachedTarget) {
    const done = document.createElement("div");
    done.className = "target-reached";
    done.textContent = "You reached the goal of this page.";
    controls.appendChild(done);
  }

  const responses = document.createElement("div");
  responses.className = "responses";
  for (const option of vm.responses) {
    const button = document.createElement("button");
    button.type = "button";
    button.className = "response-option";
    button.dataset.cellId = option.cellId;
    button.textContent = `${option.personaName}: ${option.preview}`;
    button.disabled = vm.pendingAsk;
    button.addEventListener("click", () => handlers.selectResponse(option.cellId));
    responses.appendChild(button);
  }
  controls.appendChild(responses);

  const askRow = document.createElement("div");
  askRow.className = "ask-row";
  const input = document.createElement("input");
  input.id = "ask-input";
  input.placeholder = "Write a custom message to ask the instructor...";
  input.disabled = vm.pendingAsk;
  const send = document.createElement("button");
  send.type = "button";
  send.id = "ask-send";
  send.textContent = vm.pendingAsk ? "Asking..." : "Ask";
  send.disabled = vm.pendingAsk;
  send.addEventListener("click", () => {
    if (input.value.trim()) handlers.ask(input.value.trim());
  });
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && input.value.trim()) handlers.ask(input.value.trim());
  });
  askRow.appendChild(input);
  askRow.appendChild(send);
  controls.appendChild(askRow);

  container.appendChild(controls);
}
