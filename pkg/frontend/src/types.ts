// Wire types mirroring the dpage service JSON responses.

export interface SegmentView {
  kind: "markdown" | "directive";
  text?: string;
  id?: string;
  dirType?: string;
  prompt?: string;
  options?: string[];
  language?: string;
  starter?: string;
  hasSolution?: boolean;
}

export interface CellView {
  cellId: string;
  personaName: string;
  renderedSegments: SegmentView[];
  hasMultipleResponses: boolean;
  isDivergencePoint: boolean;
  aiWarning: boolean;
  codeChanged: boolean;
}

export interface NavView {
  currentCellId: string;
  divergencePoint: string | null;
  backToMain: string | null;
  reachedTarget: boolean;
}

export interface ResponseOption {
  cellId: string;
  personaName: string;
  preview: string;
}

export interface DiffLineWire {
  op: "keep" | "add" | "del";
  text: string;
}

export interface FileDiffWire {
  file: string;
  deleted: boolean;
  lines: DiffLineWire[];
  eofNewline: boolean;
}

export interface PointerWire {
  file: string;
  startLine: number;
  endLine: number;
}

export interface CodeView {
  files: Record<string, string>;
  diffs: FileDiffWire[];
  pointers: PointerWire[];
}

export interface AnswerResult {
  correct?: boolean;
  feedback?: [number, string][];
  solution?: string;
  status: string;
  attempts: number;
}

export interface RunResult {
  exitStatus: number | null;
  stdout: string;
  stderr: string;
  durationMs: number;
  testsPassed: boolean | null;
  timedOut: boolean;
  status: string;
  attempts: number;
}

export interface SessionHandle {
  sessionId: string;
  pageId: string;
  createdAt: string;
}

export interface PageMeta {
  pageId: string;
  title: string;
  contentHash: string;
}

export interface AskResult extends NavView {
  newCellIds: string[];
}

/** Everything the thread column needs; assembled purely from service data. */
export interface ThreadViewModel {
  cells: CellView[];
  responses: ResponseOption[];
  nav: NavView;
  pendingAsk: boolean;
  selectedCellId: string;
}
