import type { CodeView } from "./types.js";

/**
 * Render the code column for the selected cell: every file of its snapshot,
 * with the lines the cell itself added or removed visually marked, plus one
 * curved connector per deictic pointer from the message to its line range.
 *
 * Pointer line numbers refer to the reconstructed snapshot (1-based).
 */
export function renderCodePanel(
  panel: HTMLElement,
  connectorLayer: SVGSVGElement,
  code: CodeView,
  selectedMessage: HTMLElement | null,
): void {
  panel.textContent = "";
  connectorLayer.textContent = "";

  const diffByFile = new Map(code.diffs.map((d) => [d.file, d]));
  const files = Object.keys(code.files).sort();
  if (!files.length) {
    const empty = document.createElement("div");
    empty.className = "code-empty";
    empty.textContent = "No code at this step.";
    panel.appendChild(empty);
  }

  for (const file of files) {
    const section = document.createElement("section");
    section.className = "code-file";
    const heading = document.createElement("h4");
    heading.textContent = file;
    section.appendChild(heading);

    const block = document.createElement("div");
    block.className = "code-lines";
    const diff = diffByFile.get(file);
    if (diff && !diff.deleted) {
      let lineNo = 0;
      for (const line of diff.lines) {
        const removed = line.op === "del";
        if (!removed) lineNo += 1;
        block.appendChild(codeLine(file, removed ? null : lineNo, line.text, line.op));
      }
    } else {
      splitLines(code.files[file]).forEach((text, index) => {
        block.appendChild(codeLine(file, index + 1, text, "keep"));
      });
    }
    section.appendChild(block);
    panel.appendChild(section);
  }

  for (const pointer of code.pointers) {
    const first = panel.querySelector<HTMLElement>(
      `.code-line[data-file="${cssEscape(pointer.file)}"][data-line="${pointer.startLine}"]`,
    );
    const last = panel.querySelector<HTMLElement>(
      `.code-line[data-file="${cssEscape(pointer.file)}"][data-line="${pointer.endLine}"]`,
    );
    if (!first || !last) {
      const notice = document.createElement("div");
      notice.className = "pointer-missing";
      notice.textContent = `(a pointer to ${pointer.file} lines ${pointer.startLine}-${pointer.endLine} no longer matches the code)`;
      panel.appendChild(notice);
      continue;
    }
    first.classList.add("pointed");
    last.classList.add("pointed");
    drawConnector(connectorLayer, selectedMessage, first, last);
  }
}

function codeLine(file: string, lineNo: number | null, text: string, op: string): HTMLElement {
  const row = document.createElement("div");
  row.className = `code-line line-${op}`;
  row.dataset.file = file;
  if (lineNo !== null) row.dataset.line = String(lineNo);
  const number = document.createElement("span");
  number.className = "lineno";
  number.textContent = lineNo === null ? "-" : String(lineNo);
  const content = document.createElement("span");
  content.className = "line-text";
  content.textContent = text === "" ? "\u00a0" : text;
  row.appendChild(number);
  row.appendChild(content);
  return row;
}

/** Cubic curve with horizontal tangents from the message to the line range. */
function drawConnector(
  layer: SVGSVGElement,
  from: HTMLElement | null,
  firstLine: HTMLElement,
  lastLine: HTMLElement,
): void {
  const layerRect = layer.getBoundingClientRect();
  const fromRect = (from ?? firstLine).getBoundingClientRect();
  const firstRect = firstLine.getBoundingClientRect();
  const lastRect = lastLine.getBoundingClientRect();

  const x1 = fromRect.right - layerRect.left;
  const y1 = fromRect.top + fromRect.height / 2 - layerRect.top;
  const x2 = firstRect.left - layerRect.left;
  const y2 = (firstRect.top + lastRect.bottom) / 2 - layerRect.top;
  const bend = Math.max(30, (x2 - x1) / 2);

  const path = document.createElementNS("http://www.w3.org/2000/svg", "path");
  path.setAttribute("d", `M ${x1} ${y1} C ${x1 + bend} ${y1}, ${x2 - bend} ${y2}, ${x2} ${y2}`);
  path.setAttribute("class", "connector");
  path.setAttribute("fill", "none");
  layer.appendChild(path);
}

function splitLines(text: string): string[] {
  if (text === "") return [];
  const body = text.endsWith("\n") ? text.slice(0, -1) : text;
  return body.split("\n");
}

function cssEscape(value: string): string {
  return value.replace(/["\\]/g, "\\$&");
}
