import { describe, expect, it, vi } from "vitest";

import { buildWidget, type WidgetHandlers } from "../src/widgets.js";
import type { SegmentView } from "../src/types.js";

const QUIZ: SegmentView = {
  kind: "directive",
  id: "1a:multiple-choice:0",
  dirType: "multiple-choice",
  prompt: "Which of the following adds up to `2`?",
  options: ["5+5", "1+1", "2+2"],
};

function handlers(overrides: Partial<WidgetHandlers> = {}): WidgetHandlers {
  return {
    answer: vi.fn(async () => ({ correct: true, feedback: [], status: "correct", attempts: 1 })),
    answerAction: vi.fn(async () => ({ status: "skipped", attempts: 0 })),
    run: vi.fn(async () => ({
      exitStatus: 0,
      stdout: "",
      stderr: "",
      durationMs: 10,
      testsPassed: true,
      timedOut: false,
      status: "correct",
      attempts: 1,
    })),
    ...overrides,
  };
}

const flush = () => new Promise((resolve) => setTimeout(resolve, 0));

describe("multiple-choice widget", () => {
  it("posts the selected indices and shows per-option feedback", async () => {
    const answer = vi.fn(async () => ({
      correct: false,
      feedback: [[0, "Not quite. That adds to 10"]] as [number, string][],
      status: "incorrect",
      attempts: 1,
    }));
    const widget = buildWidget(QUIZ, handlers({ answer }));
    document.body.appendChild(widget);

    const boxes = widget.querySelectorAll<HTMLInputElement>("input[type=checkbox]");
    expect(boxes).toHaveLength(3);
    boxes[0].checked = true;
    (widget.querySelector(".quiz-submit") as HTMLButtonElement).click();
    await flush();

    expect(answer).toHaveBeenCalledWith("1a:multiple-choice:0", [0]);
    expect(widget.querySelector(".widget-result")?.textContent).toContain("Not quite. That adds to 10");
    widget.remove();
  });

  it("shows a correct indicator", async () => {
    const widget = buildWidget(QUIZ, handlers());
    document.body.appendChild(widget);
    widget.querySelectorAll<HTMLInputElement>("input")[1].checked = true;
    (widget.querySelector(".quiz-submit") as HTMLButtonElement).click();
    await flush();
    expect(widget.querySelector(".widget-result")?.textContent).toBe("Correct!");
    widget.remove();
  });
});

describe("code widget", () => {
  const CODE_Q: SegmentView = {
    kind: "directive",
    id: "5d:code-question:0",
    dirType: "code-question",
    prompt: "write it",
    language: "python",
    starter: "def total(a, b):\n    ...",
    hasSolution: true,
  };

  it("prefills the starter and posts the edited code", async () => {
    const run = vi.fn(async () => ({
      exitStatus: 0,
      stdout: "ok",
      stderr: "",
      durationMs: 4,
      testsPassed: true,
      timedOut: false,
      status: "correct",
      attempts: 1,
    }));
    const widget = buildWidget(CODE_Q, handlers({ run }));
    document.body.appendChild(widget);
    const editor = widget.querySelector("textarea") as HTMLTextAreaElement;
    expect(editor.value).toContain("def total");
    editor.value = "def total(a, b):\n    return a + b";
    (widget.querySelector(".code-run") as HTMLButtonElement).click();
    await flush();
    expect(run).toHaveBeenCalledWith("5d:code-question:0", "def total(a, b):\n    return a + b");
    expect(widget.querySelector(".widget-result")?.textContent).toContain("All tests passed");
    widget.remove();
  });

  it("hides the reveal button when there is no stored solution", () => {
    const withSolution = buildWidget(CODE_Q, handlers());
    expect(withSolution.querySelector(".widget-reveal")).not.toBeNull();
    const without = buildWidget({ ...CODE_Q, hasSolution: false }, handlers());
    expect(without.querySelector(".widget-reveal")).toBeNull();
  });
});
