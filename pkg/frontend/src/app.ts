// Session wiring: schema-driven filter controls, question entry, answer
// rendering. One ask request in flight at a time; a new submission
// cancels the previous one. Server errors become banners and never
// discard the current view.

import { ApiError, type Client } from "./api.js";
import {
  boundsError,
  buildControls,
  collectFilters,
  resetControl,
  type FilterControl,
} from "./filters.js";
import type { AskRequest, Mode } from "./types.js";
import { el, renderAnswer, renderControls, renderRetrieved } from "./view.js";

export class Console {
  private controls: FilterControl[] = [];
  private inflight: AbortController | null = null;

  private banner: HTMLDivElement;
  private question: HTMLInputElement;
  private mode: HTMLSelectElement;
  private filterList: HTMLDivElement;
  private result: HTMLElement;
  private ranking: HTMLElement;

  constructor(
    root: HTMLElement,
    private client: Client,
  ) {
    root.replaceChildren();
    root.append(el("h1", undefined, "docqa console"));

    this.banner = el("div", "banner");
    this.banner.hidden = true;
    root.append(this.banner);

    const form = el("form", "ask-form");
    this.question = el("input", "question");
    this.question.type = "text";
    this.question.placeholder = "ask a question";
    this.mode = el("select", "mode");
    for (const mode of ["best_fit", "multi_doc"]) {
      const option = el("option", undefined, mode.replace("_", " "));
      option.value = mode;
      this.mode.append(option);
    }
    const button = el("button", undefined, "Ask");
    button.type = "submit";
    form.append(this.question, this.mode, button);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
    root.append(form);

    const filters = el("fieldset", "filters");
    filters.append(el("legend", undefined, "filters"));
    this.filterList = el("div", "filter-list");
    filters.append(this.filterList);
    root.append(filters);

    this.result = el("section", "result");
    this.ranking = el("section", "ranking");
    root.append(this.result, this.ranking);
  }

  async start(): Promise<void> {
    try {
      const schema = await this.client.fetchSchema();
      this.controls = buildControls(schema);
      renderControls(this.filterList, this.controls);
      this.hideBanner();
    } catch (err) {
      this.showBanner(`could not load the filter schema: ${message(err)}`, "Retry", () => {
        void this.start();
      });
    }
  }

  async submit(): Promise<void> {
    if (!this.question.value.trim()) {
      return;
    }
    for (const control of this.controls) {
      const problem = boundsError(control);
      if (problem) {
        this.showBanner(problem);
        return;
      }
    }

    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;

    const body: AskRequest = {
      question: this.question.value,
      mode: this.mode.value as Mode,
    };
    const filters = collectFilters(this.controls);
    if (Object.keys(filters).length > 0) {
      body.filters = filters;
    }

    try {
      const response = await this.client.ask(body, controller.signal);
      const doc = await this.client.fetchDocument(response.doc_id);
      if (this.inflight !== controller) {
        return;
      }
      this.hideBanner();
      renderAnswer(this.result, response, doc);
      renderRetrieved(this.ranking, response.retrieved, response.doc_id);
    } catch (err) {
      if (controller.signal.aborted) {
        return; // superseded by a newer submission
      }
      if (err instanceof ApiError && err.status === 409) {
        this.showBanner("no documents match your filters", "Reset filters", () => {
          this.resetFilters();
        });
      } else {
        this.showBanner(message(err));
      }
    } finally {
      if (this.inflight === controller) {
        this.inflight = null;
      }
    }
  }

  resetFilters(): void {
    for (const control of this.controls) {
      resetControl(control);
    }
    renderControls(this.filterList, this.controls);
    this.hideBanner();
  }

  private showBanner(text: string, actionLabel?: string, action?: () => void): void {
    this.banner.replaceChildren(el("span", "banner-text", text));
    if (actionLabel && action) {
      const button = el("button", "banner-action", actionLabel);
      button.type = "button";
      button.addEventListener("click", action);
      this.banner.append(button);
    }
    this.banner.hidden = false;
  }

  private hideBanner(): void {
    this.banner.hidden = true;
    this.banner.replaceChildren();
  }
}

function message(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

export function mountConsole(root: HTMLElement, client: Client): Console {
  const ui = new Console(root, client);
  void ui.start();
  return ui;
}
