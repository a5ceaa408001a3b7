import { markdownToHtml } from "./markdown.js";
import type { AnswerResult, RunResult, SegmentView } from "./types.js";

export interface WidgetHandlers {
  answer(directiveId: string, selected: number[]): Promise<AnswerResult>;
  answerAction(directiveId: string, action: "skip" | "reveal"): Promise<AnswerResult>;
  run(directiveId: string, code: string): Promise<RunResult>;
}

/** Build the interactive block for one directive segment. */
export function buildWidget(segment: SegmentView, handlers: WidgetHandlers): HTMLElement {
  if (segment.dirType === "multiple-choice" && segment.options) {
    return multipleChoiceWidget(segment, handlers);
  }
  if (segment.dirType === "code-question") {
    return codeQuestionWidget(segment, handlers);
  }
  const unknown = document.createElement("div");
  unknown.className = "widget widget-unknown";
  unknown.textContent = `(unsupported ${segment.dirType ?? "directive"} block)`;
  return unknown;
}

function resultArea(): HTMLElement {
  const area = document.createElement("div");
  area.className = "widget-result";
  return area;
}

function showError(area: HTMLElement, err: unknown): void {
  area.textContent = `Something went wrong: ${err instanceof Error ? err.message : String(err)}`;
  area.dataset.verdict = "error";
}

function multipleChoiceWidget(segment: SegmentView, handlers: WidgetHandlers): HTMLElement {
  const root = document.createElement("div");
  root.className = "widget widget-quiz";
  root.dataset.directiveId = segment.id ?? "";

  const prompt = document.createElement("div");
  prompt.className = "widget-prompt";
  prompt.innerHTML = markdownToHtml(segment.prompt ?? "");
  root.appendChild(prompt);

  const boxes: HTMLInputElement[] = [];
  const optionRows = document.createElement("div");
  optionRows.className = "quiz-options";
  (segment.options ?? []).forEach((label, index) => {
    const row = document.createElement("label");
    row.className = "quiz-option";
    const box = document.createElement("input");
    box.type = "checkbox";
    box.dataset.optionIndex = String(index);
    boxes.push(box);
    const text = document.createElement("span");
    text.textContent = label;
    row.appendChild(box);
    row.appendChild(text);
    optionRows.appendChild(row);
  });
  root.appendChild(optionRows);

  const area = resultArea();
  const buttons = document.createElement("div");
  buttons.className = "widget-buttons";

  const submit = document.createElement("button");
  submit.type = "button";
  submit.className = "quiz-submit";
  submit.textContent = "Check answer";
  submit.addEventListener("click", async () => {
    const selected = boxes.filter((b) => b.checked).map((b) => Number(b.dataset.optionIndex));
    try {
      const result = await handlers.answer(segment.id ?? "", selected);
      if (result.correct) {
        area.textContent = "Correct!";
        area.dataset.verdict = "correct";
      } else {
        const feedback = (result.feedback ?? []).map(([, text]) => text);
        area.textContent = feedback.length ? feedback.join(" ") : "Not quite - try again.";
        area.dataset.verdict = "incorrect";
      }
    } catch (err) {
      showError(area, err);
    }
  });
  buttons.appendChild(submit);
  appendSkipReveal(buttons, area, segment, handlers, true);
  root.appendChild(buttons);
  root.appendChild(area);
  return root;
}

function codeQuestionWidget(segment: SegmentView, handlers: WidgetHandlers): HTMLElement {
  const root = document.createElement("div");
  root.className = "widget widget-code";
  root.dataset.directiveId = segment.id ?? "";

  const prompt = document.createElement("div");
  prompt.className = "widget-prompt";
  prompt.innerHTML = markdownToHtml(segment.prompt ?? "");
  root.appendChild(prompt);

  const editor = document.createElement("textarea");
  editor.className = "code-editor";
  editor.rows = 8;
  editor.value = segment.starter ?? "";
  editor.spellcheck = false;
  root.appendChild(editor);

  const area = resultArea();
  const buttons = document.createElement("div");
  buttons.className = "widget-buttons";

  const run = document.createElement("button");
  run.type = "button";
  run.className = "code-run";
  run.textContent = "Run tests";
  run.addEventListener("click", async () => {
    run.disabled = true;
    area.textContent = "Running...";
    try {
      const result = await handlers.run(segment.id ?? "", editor.value);
      const lines: string[] = [];
      if (result.timedOut) {
        lines.push(`Timed out after ${result.durationMs} ms.`);
      } else if (result.testsPassed === null) {
        lines.push(`Finished with exit status ${result.exitStatus}.`);
      } else {
        lines.push(result.testsPassed ? "All tests passed!" : "Tests failed.");
      }
      if (result.stdout.trim()) lines.push(`stdout:\n${result.stdout.trim()}`);
      if (result.stderr.trim()) lines.push(`stderr:\n${result.stderr.trim()}`);
      area.textContent = lines.join("\n");
      area.dataset.verdict = result.testsPassed ? "correct" : "incorrect";
    } catch (err) {
      showError(area, err);
    } finally {
      run.disabled = false;
    }
  });
  buttons.appendChild(run);
  appendSkipReveal(buttons, area, segment, handlers, segment.hasSolution === true);
  root.appendChild(buttons);
  root.appendChild(area);
  return root;
}

function appendSkipReveal(
  buttons: HTMLElement,
  area: HTMLElement,
  segment: SegmentView,
  handlers: WidgetHandlers,
  canReveal: boolean,
): void {
  const skip = document.createElement("button");
  skip.type = "button";
  skip.className = "widget-skip";
  skip.textContent = "Skip";
  skip.addEventListener("click", async () => {
    try {
      await handlers.answerAction(segment.id ?? "", "skip");
      area.textContent = "Skipped.";
      area.dataset.verdict = "skipped";
    } catch (err) {
      showError(area, err);
    }
  });
  buttons.appendChild(skip);

  if (!canReveal) return; // no stored solution: the button is hidden entirely
  const reveal = document.createElement("button");
  reveal.type = "button";
  reveal.className = "widget-reveal";
  reveal.textContent = "Reveal answer";
  reveal.addEventListener("click", async () => {
    try {
      const result = await handlers.answerAction(segment.id ?? "", "reveal");
      area.textContent = `Answer:\n${result.solution ?? ""}`;
      area.dataset.verdict = "revealed";
    } catch (err) {
      showError(area, err);
    }
  });
  buttons.appendChild(reveal);
}
