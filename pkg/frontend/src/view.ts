// DOM construction helpers. Document text is rendered with textContent
// nodes only, and the highlight is the verbatim response slice; offsets
// are never recomputed client-side.

import type { FilterControl } from "./filters.js";
import type { AskResponse, DocumentView, RetrievedEntry } from "./types.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function categoricalControl(control: FilterControl & { kind: "categorical" }): HTMLElement {
  const wrap = el("label", "filter filter-categorical");
  wrap.dataset.field = control.field;
  wrap.append(el("span", "filter-name", control.field));
  const select = el("select");
  select.multiple = true;
  select.size = Math.min(control.options.length, 4) || 1;
  for (const value of control.options) {
    const option = el("option", undefined, value);
    option.value = value;
    select.append(option);
  }
  select.addEventListener("change", () => {
    control.selected = new Set(Array.from(select.selectedOptions, (o) => o.value));
  });
  wrap.append(select);
  return wrap;
}

function boundInput(
  control: FilterControl & { kind: "real" | "timestamp" },
  side: "min" | "max",
): HTMLInputElement {
  const input = el("input", "filter-bound");
  input.type = "text";
  input.dataset.bound = side;
  const observed = side === "min" ? control.observedMin : control.observedMax;
  input.placeholder = observed === undefined ? side : `${side} (${observed})`;
  input.addEventListener("input", () => {
    control[side] = input.value;
  });
  return input;
}

function rangeControl(control: FilterControl & { kind: "real" | "timestamp" }): HTMLElement {
  const wrap = el("label", `filter filter-range filter-${control.kind}`);
  wrap.dataset.field = control.field;
  wrap.append(el("span", "filter-name", control.field));
  wrap.append(boundInput(control, "min"), boundInput(control, "max"));
  return wrap;
}

export function renderControls(container: HTMLElement, controls: FilterControl[]): void {
  container.replaceChildren();
  for (const control of controls) {
    container.append(
      control.kind === "categorical" ? categoricalControl(control) : rangeControl(control),
    );
  }
}

export function renderAnswer(
  container: HTMLElement,
  response: AskResponse,
  doc: DocumentView,
): void {
  container.replaceChildren();
  const answer = el("p", "answer");
  answer.append(el("strong", undefined, response.answer_text));
  answer.append(
    el("span", "answer-meta", ` from ${doc.id} (score ${response.reader_score.toFixed(3)})`),
  );
  container.append(answer);

  const article = el("article", "document");
  article.append(el("h3", undefined, doc.title || doc.id));
  const body = el("p", "document-text");
  body.append(document.createTextNode(doc.text.slice(0, response.char_start)));
  body.append(el("mark", undefined, doc.text.slice(response.char_start, response.char_end)));
  body.append(document.createTextNode(doc.text.slice(response.char_end)));
  article.append(body);
  container.append(article);
}

export function renderRetrieved(
  container: HTMLElement,
  entries: RetrievedEntry[],
  activeId: string,
): void {
  container.replaceChildren();
  if (entries.length === 0) {
    return;
  }
  container.append(el("h3", undefined, "retrieved documents"));
  const list = el("ol", "retrieved");
  for (const entry of entries) {
    const item = el("li", entry.doc_id === activeId ? "active" : undefined);
    item.append(el("span", "retrieved-id", entry.doc_id));
    item.append(el("span", "retrieved-score", entry.score.toFixed(4)));
    list.append(item);
  }
  container.append(list);
}
