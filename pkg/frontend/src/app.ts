import { ApiClient } from "./api.js";
import { renderCodePanel } from "./codepanel.js";
import { renderThread, type ThreadHandlers } from "./thread.js";
import type { ThreadViewModel } from "./types.js";

/**
 * The reader application. Stateless with respect to semantics: every view
 * is rebuilt from service responses, so reloading the page reconstructs the
 * identical view from the session state.
 */
export class ReaderApp {
  private sessionId = "";
  private pendingAsk = false;
  private selectedCellId: string | null = null;

  private banner!: HTMLElement;
  private threadCol!: HTMLElement;
  private codePanel!: HTMLElement;
  private connectorLayer!: SVGSVGElement;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
  ) {}

  async start(): Promise<void> {
    this.buildSkeleton();
    try {
      const meta = await this.api.pageMeta();
      const title = this.root.querySelector(".page-title") as HTMLElement;
      title.textContent = meta.title;
      const handle = await this.api.createSession(meta.pageId);
      this.sessionId = handle.sessionId;
      await this.refresh();
    } catch (err) {
      this.showBanner(err);
    }
  }

  private buildSkeleton(): void {
    this.root.textContent = "";
    this.root.innerHTML = `
      <div class="banner hidden"></div>
      <h1 class="page-title"></h1>
      <main class="columns">
        <section class="thread-col"></section>
        <aside class="code-col"></aside>
      </main>
      <svg class="connector-layer"></svg>
    `;
    this.banner = this.root.querySelector(".banner") as HTMLElement;
    this.threadCol = this.root.querySelector(".thread-col") as HTMLElement;
    this.codePanel = this.root.querySelector(".code-col") as HTMLElement;
    this.connectorLayer = this.root.querySelector(".connector-layer") as SVGSVGElement;
  }

  /** Refetch everything and rebuild both columns. */
  async refresh(): Promise<void> {
    const [cells, nav, responses] = await Promise.all([
      this.api.thread(this.sessionId),
      this.api.nav(this.sessionId),
      this.api.responses(this.sessionId),
    ]);
    if (this.selectedCellId === null || !cells.some((c) => c.cellId === this.selectedCellId)) {
      this.selectedCellId = nav.currentCellId;
    }
    const vm: ThreadViewModel = {
      cells,
      responses,
      nav,
      pendingAsk: this.pendingAsk,
      selectedCellId: this.selectedCellId,
    };
    renderThread(this.threadCol, vm, this.handlers());
    await this.refreshCodePanel();
    this.hideBanner();
  }

  private async refreshCodePanel(): Promise<void> {
    if (!this.selectedCellId) return;
    const code = await this.api.code(this.sessionId, this.selectedCellId);
    const message = this.threadCol.querySelector<HTMLElement>(
      `.message[data-cell-id="${this.selectedCellId}"]`,
    );
    renderCodePanel(this.codePanel, this.connectorLayer, code, message);
  }

  private handlers(): ThreadHandlers {
    return {
      selectResponse: (cellId) => this.guard(() => this.api.select(this.sessionId, cellId), cellId),
      jumpTo: (cellId) => this.guard(() => this.api.jump(this.sessionId, cellId), cellId),
      ask: (question) => this.askQuestion(question),
      selectCell: async (cellId) => {
        this.selectedCellId = cellId;
        this.threadCol
          .querySelectorAll(".message.selected")
          .forEach((el) => el.classList.remove("selected"));
        this.threadCol
          .querySelector(`.message[data-cell-id="${cellId}"]`)
          ?.classList.add("selected");
        try {
          await this.refreshCodePanel();
        } catch (err) {
          this.showBanner(err);
        }
      },
      answer: (directiveId, selected) => this.api.answer(this.sessionId, directiveId, selected),
      answerAction: (directiveId, action) => this.api.answerAction(this.sessionId, directiveId, action),
      run: (directiveId, code) => this.api.run(this.sessionId, directiveId, code),
    };
  }

  private async guard(action: () => Promise<unknown>, focusCell: string): Promise<void> {
    try {
      await action();
      this.selectedCellId = focusCell;
      await this.refresh();
    } catch (err) {
      this.showBanner(err);
    }
  }

  private async askQuestion(question: string): Promise<void> {
    if (this.pendingAsk) return;
    this.pendingAsk = true;
    try {
      await this.refresh(); // repaint with inputs disabled
      const result = await this.api.ask(this.sessionId, question);
      this.selectedCellId = result.currentCellId;
      this.pendingAsk = false;
      await this.refresh();
    } catch (err) {
      this.pendingAsk = false;
      try {
        await this.refresh();
      } catch {
        // keep the original error visible if the refresh also failed
      }
      this.showBanner(err, "The question was not sent. You can retry.");
    }
  }

  private showBanner(err: unknown, hint = ""): void {
    const message = err instanceof Error ? err.message : String(err);
    this.banner.textContent = "";
    this.banner.classList.remove("hidden");
    const text = document.createElement("span");
    text.textContent = `${hint ? hint + " " : ""}(${message})`;
    const retry = document.createElement("button");
    retry.type = "button";
    retry.className = "banner-retry";
    retry.textContent = "Retry";
    retry.addEventListener("click", () => {
      this.hideBanner();
      this.refresh().catch((e) => this.showBanner(e));
    });
    this.banner.appendChild(text);
    this.banner.appendChild(retry);
  }

  private hideBanner(): void {
    this.banner.classList.add("hidden");
    this.banner.textContent = "";
  }
}

/** Mount the reader into a DOM node; the service origin defaults to ours. */
export function mountApp(root: HTMLElement, baseUrl?: string): ReaderApp {
  const api = new ApiClient(baseUrl ?? "");
  const app = new ReaderApp(root, api);
  void app.start();
  return app;
}
