/**
 * DOM rendering for the annotator. Instance texts render with stacked
 * underlines so overlapping edits stay legible; the palette, the question
 * form, committed edits, adjudication panes, and the submit/completion flow
 * all re-render from state. Behavior lives in draft/questions/snap; this
 * module reflects state and forwards events.
 */

import { ApiError, SessionApi } from "./client.js";
import { AnnotationDraft } from "./draft.js";
import type {
  AnswerValue,
  BlockNode,
  EditData,
  InlineNode,
  InterfaceIR,
  IrInstance,
  IrPane,
  IrQuestion,
  Side,
} from "./ir.js";
import { visibleQuestions } from "./questions.js";
import { scalarLength, scalarSlice, utf16ToScalar } from "./unicode.js";

export interface AppOptions {
  root: HTMLElement;
  ir: InterfaceIR;
  draft: AnnotationDraft;
  api: SessionApi;
  sessionId: string;
}

export interface Highlight {
  start: number;
  end: number;
  color: string;
  pending: boolean;
}

interface AppState {
  status: { kind: "ok" | "error" | "info"; text: string } | null;
  // keyed "<instance id>:<edit index>"
  diagnostics: Map<string, string[]>;
  completionCode: string | null;
  instructionsOpen: boolean;
}

export function renderApp(opts: AppOptions): void {
  const { root, ir, draft, api, sessionId } = opts;
  const state: AppState = {
    status: null,
    diagnostics: new Map(),
    completionCode: null,
    instructionsOpen: ir.config.instructions_display === "inline",
  };

  const t = (key: string, subst: Record<string, string | number> = {}): string => {
    let text = ir.strings[key] ?? key;
    for (const [name, value] of Object.entries(subst)) {
      text = text.replaceAll(`{${name}}`, String(value));
    }
    return text;
  };

  const reviewOnly = !ir.selection_enabled || ir.panes.length > 1;

  function rerender(): void {
    root.textContent = "";
    root.appendChild(buildHeader());
    if (state.status !== null) {
      root.appendChild(el("div", { class: `status status-${state.status.kind}` },
        state.status.text));
    }
    if (state.completionCode !== null) {
      root.appendChild(el("div", { class: "completion" },
        el("strong", {}, t("ui.completion_title")), " ",
        el("code", {}, state.completionCode), " ",
        el("span", {}, t("ui.completion_hint"))));
    }
    if (state.instructionsOpen && ir.instructions.length > 0) {
      root.appendChild(buildInstructions());
    }
    root.appendChild(reviewOnly ? buildPaneGrid() : buildEditor());
    root.appendChild(buildFooter());
  }

  function buildHeader(): HTMLElement {
    const header = el("header", { class: "bar" },
      el("h1", {}, ir.typology_name),
      el("span", { class: "counter" }, t("ui.instance_counter", {
        current: draft.cursorIndex + 1,
        total: draft.instanceCount,
      })));
    if (ir.instructions.length > 0 && ir.config.instructions_display !== "inline") {
      header.appendChild(button(t("ui.instructions_button"), () => {
        state.instructionsOpen = !state.instructionsOpen;
        rerender();
      }));
    }
    if (!reviewOnly) {
      header.appendChild(button(t("ui.submit"), () => {
        void submit();
      }, { class: "primary" }));
      header.appendChild(button(t("ui.request_completion"), () => {
        void requestCompletion();
      }));
    }
    return header;
  }

  function buildInstructions(): HTMLElement {
    const body = el("div", { class: "instructions-body" });
    for (const block of ir.instructions) body.appendChild(renderBlock(block));
    return el("section", { class: "instructions" },
      el("h2", {}, t("ui.instructions_title")), body,
      button(t("ui.close"), () => {
        state.instructionsOpen = false;
        rerender();
      }));
  }

  // -- read-only panes (adjudication, preloaded review) ----------------------

  function buildPaneGrid(): HTMLElement {
    const grid = el("div", { class: "panes" });
    for (const pane of ir.panes) grid.appendChild(buildPane(pane));
    return grid;
  }

  function buildPane(pane: IrPane): HTMLElement {
    const column = el("section", { class: "pane" },
      el("h2", {}, pane.annotator_id === null
        ? t("ui.annotator_label")
        : t("ui.adjudication_pane", { annotator: pane.annotator_id })));
    for (const instance of ir.instances) {
      const edits = pane.edits[instance.id] ?? [];
      const block = el("div", { class: "pane-instance" },
        el("h3", {}, instance.id));
      appendInstanceTexts(block, instance,
        (side) => collectHighlights(edits, side, ir.palette), null);
      if (edits.length === 0) {
        block.appendChild(el("p", { class: "muted" }, t("ui.no_edits")));
      } else {
        block.appendChild(buildEditList(instance, edits, null));
      }
      column.appendChild(block);
    }
    return column;
  }

  // -- editing layout ---------------------------------------------------------

  function buildEditor(): HTMLElement {
    const instance = draft.currentInstance();
    const pendingHighlights = (side: Side): Highlight[] => {
      const committed = collectHighlights(draft.editsFor(instance.id), side, ir.palette);
      const pending = draft.pending();
      if (pending !== null) {
        const color = ir.palette[pending.category] ?? "#555";
        for (const pair of pending.spans[side]) {
          committed.push({ start: pair[0], end: pair[1], color, pending: true });
        }
        for (const child of pending.children) {
          const childColor = ir.palette[child.category] ?? color;
          for (const pair of child.spans[side]) {
            committed.push({ start: pair[0], end: pair[1], color: childColor, pending: true });
          }
        }
      }
      return committed;
    };

    const section = el("section", { class: "editor" });
    appendInstanceTexts(section, instance, pendingHighlights,
      ir.selection_enabled ? onSelect : null);
    section.appendChild(buildPalette());
    const pendingPanel = buildPendingPanel();
    if (pendingPanel !== null) section.appendChild(pendingPanel);
    section.appendChild(el("h3", {}, t("ui.edit_list_title")));
    const edits = draft.editsFor(instance.id);
    if (edits.length === 0) {
      section.appendChild(el("p", { class: "muted" }, t("ui.no_edits")));
    } else {
      section.appendChild(buildEditList(instance, edits, (index) => {
        draft.removeEdit(instance.id, index);
        rerender();
      }));
    }
    section.appendChild(buildNav(instance));
    return section;
  }

  function onSelect(side: Side, container: HTMLElement, text: string): void {
    const selection = window.getSelection();
    if (selection === null || selection.rangeCount === 0 || selection.isCollapsed) return;
    const range = selection.getRangeAt(0);
    // selections reaching outside this text block are discarded silently
    if (!container.contains(range.startContainer) || !container.contains(range.endContainer)) {
      return;
    }
    const a = utf16Within(container, range.startContainer, range.startOffset);
    const b = utf16Within(container, range.endContainer, range.endOffset);
    if (a === null || b === null) return;
    const start = utf16ToScalar(text, Math.min(a, b));
    const end = utf16ToScalar(text, Math.max(a, b));
    if (draft.addSelection(side, start, end)) {
      selection.removeAllRanges();
      rerender();
    }
  }

  function buildPalette(): HTMLElement {
    const palette = el("div", { class: "palette" },
      el("span", { class: "muted" }, t("ui.select_category")));
    const pending = draft.pending();
    for (const cat of ir.categories) {
      const chip = button(cat.label, () => {
        if (draft.beginEdit(cat.name)) rerender();
      }, { class: "chip", style: `--cat-color: ${cat.color}` });
      if (!draft.canAnnotate(cat.name) || pending !== null) chip.disabled = true;
      palette.appendChild(chip);
    }
    return palette;
  }

  function buildPendingPanel(): HTMLElement | null {
    const pending = draft.pending();
    if (pending === null) return null;
    const cat = draft.category(pending.category);
    if (cat === undefined) return null;

    const panel = el("div", { class: "pending", style: `--cat-color: ${cat.color}` },
      el("h3", {}, `${t("ui.add_edit")}: ${cat.label}`));

    if (cat.selection === "composite") {
      panel.appendChild(el("h4", {}, t("ui.children_title")));
      const childBar = el("div", { class: "palette" });
      for (const child of cat.children ?? []) {
        childBar.appendChild(button(`+ ${child.label}`, () => {
          if (draft.addChild(child.name)) rerender();
        }, { class: "chip", style: `--cat-color: ${child.color}` }));
      }
      panel.appendChild(childBar);
      pending.children.forEach((child, index) => {
        const childCat = draft.category(child.category);
        const row = el("div", {
          class: index === pending.activeChild ? "child active" : "child",
        },
          button(childCat?.label ?? child.category, () => {
            draft.setActiveChild(index);
            rerender();
          }),
          spanChips(child.spans),
          button(t("ui.remove_edit"), () => {
            draft.removeChild(index);
            rerender();
          }, { class: "danger" }));
        if (childCat?.questions !== undefined) {
          row.appendChild(questionForm(childCat.questions, child.answers,
            (qid, value) => {
              if (draft.setChildAnswer(index, qid, value)) rerender();
            }));
        }
        panel.appendChild(row);
      });
    } else {
      panel.appendChild(spanChips(pending.spans));
    }

    if (cat.questions !== undefined && cat.questions.length > 0) {
      panel.appendChild(el("h4", {}, t("ui.questions_title")));
      panel.appendChild(questionForm(cat.questions, pending.answers, (qid, value) => {
        if (draft.setAnswer(qid, value)) rerender();
      }));
    }

    const blockers = draft.commitBlockers();
    if (blockers.length > 0) {
      panel.appendChild(el("ul", { class: "blockers" },
        ...blockers.map((reason) => el("li", {}, reason))));
    }
    const commit = button(t("ui.add_edit"), () => {
      if (draft.commitEdit()) rerender();
    }, { class: "primary" });
    commit.disabled = blockers.length > 0;
    panel.appendChild(commit);
    panel.appendChild(button(t("ui.close"), () => {
      draft.cancelEdit();
      rerender();
    }));
    return panel;
  }

  function spanChips(groups: { source: [number, number][]; target: [number, number][] }):
      HTMLElement {
    const instance = draft.currentInstance();
    const wrap = el("span", { class: "span-chips" });
    for (const side of ["source", "target"] as Side[]) {
      const text = side === "source" ? instance.source : instance.target;
      groups[side].forEach((pair, index) => {
        wrap.appendChild(el("span", { class: "span-chip" },
          `${t(`ui.side_${side}`)} [${pair[0]}, ${pair[1]}) `,
          el("q", {}, text === undefined ? "" : scalarSlice(text, pair[0], pair[1])),
          button("×", () => {
            draft.removeSelection(side, index);
            rerender();
          }, { class: "danger small" })));
      });
    }
    return wrap;
  }

  function questionForm(
    questions: IrQuestion[],
    answers: ReadonlyMap<string, AnswerValue>,
    onAnswer: (questionId: string, value: AnswerValue) => void,
  ): HTMLElement {
    const form = el("div", { class: "questions" });
    for (const q of visibleQuestions(questions, answers)) {
      const row = el("div", { class: "question" },
        el("label", {}, q.prompt + (q.optional ? " (optional)" : "")));
      if (q.kind === "textbox") {
        const input = el("textarea", {
          placeholder: q.placeholder ?? "",
          rows: "2",
        }) as HTMLTextAreaElement;
        const current = answers.get(q.id);
        if (typeof current === "string") input.value = current;
        input.addEventListener("change", () => {
          onAnswer(q.id, input.value);
        });
        row.appendChild(input);
      } else {
        const group = el("div", { class: "options" });
        (q.options ?? []).forEach((label, index) => {
          const option = button(label, () => {
            onAnswer(q.id, index);
          }, { class: answers.get(q.id) === index ? "option selected" : "option" });
          group.appendChild(option);
        });
        row.appendChild(group);
      }
      form.appendChild(row);
    }
    return form;
  }

  function buildEditList(instance: IrInstance, edits: readonly EditData[],
                         onRemove: ((index: number) => void) | null): HTMLElement {
    const list = el("ol", { class: "edits" });
    edits.forEach((edit, index) => {
      const cat = draft.category(edit.category);
      const item = el("li", { style: `--cat-color: ${cat?.color ?? "#555"}` },
        el("strong", {}, cat?.label ?? edit.category));
      item.appendChild(editSummary(instance, edit));
      for (const child of edit.children ?? []) {
        const childCat = draft.category(child.category);
        const row = el("div", { class: "child" },
          el("em", {}, childCat?.label ?? child.category));
        row.appendChild(editSummary(instance, child));
        item.appendChild(row);
      }
      if (onRemove !== null) {
        item.appendChild(button(t("ui.remove_edit"), () => {
          onRemove(index);
        }, { class: "danger small" }));
      }
      for (const message of state.diagnostics.get(`${instance.id}:${index}`) ?? []) {
        item.appendChild(el("div", { class: "diagnostic" }, message));
      }
      list.appendChild(item);
    });
    return list;
  }

  function editSummary(instance: IrInstance, edit: EditData): HTMLElement {
    const wrap = el("span", { class: "summary" });
    for (const side of ["source", "target"] as Side[]) {
      const text = side === "source" ? instance.source : instance.target;
      for (const pair of edit.spans?.[side] ?? []) {
        wrap.appendChild(el("span", { class: "span-chip" },
          el("q", {}, text === undefined ? "" : scalarSlice(text, pair[0], pair[1]))));
      }
    }
    for (const answer of edit.answers ?? []) {
      wrap.appendChild(el("span", { class: "answer" },
        `${answer.question_id}: ${String(answer.value)}`));
    }
    return wrap;
  }

  function buildNav(instance: IrInstance): HTMLElement {
    const nav = el("div", { class: "nav" });
    const prev = button(t("ui.previous_instance"), () => {
      if (draft.previous()) rerender();
    });
    prev.disabled = draft.cursorIndex === 0;
    const next = button(t("ui.next_instance"), () => {
      if (draft.next()) rerender();
    });
    next.disabled = draft.cursorIndex >= draft.instanceCount - 1;
    nav.appendChild(prev);
    nav.appendChild(next);
    if (!reviewOnly && draft.editsFor(instance.id).length === 0) {
      const confirm = button(t("ui.confirm_no_edits"), () => {
        if (draft.confirmNoEdits()) rerender();
      }, { class: draft.visited(instance.id) ? "confirmed" : "" });
      confirm.disabled = draft.visited(instance.id);
      nav.appendChild(confirm);
    }
    return nav;
  }

  function buildFooter(): HTMLElement {
    const footer = el("footer", { class: "bar" });
    const config = ir.config;
    if (config.paper_link !== undefined) {
      footer.appendChild(el("a", { href: config.paper_link, target: "_blank" },
        t("ui.view_paper")));
    }
    if (config.demo_data_link !== undefined) {
      footer.appendChild(el("a", { href: config.demo_data_link, target: "_blank" },
        t("ui.view_demo_data")));
    }
    if (config.citation !== undefined) {
      footer.appendChild(el("details", {},
        el("summary", {}, t("ui.cite_typology")),
        el("pre", {}, config.citation)));
    }
    return footer;
  }

  // -- texts with highlights --------------------------------------------------

  function appendInstanceTexts(
    parent: HTMLElement,
    instance: IrInstance,
    highlightsFor: (side: Side) => Highlight[],
    selectHandler: ((side: Side, container: HTMLElement, text: string) => void) | null,
  ): void {
    if (instance.context_before !== undefined) {
      parent.appendChild(contextBlock(t("ui.context_before_label"), instance.context_before));
    }
    if (instance.source !== undefined) {
      parent.appendChild(textBlock("source", t("ui.source_label"), instance.source,
        highlightsFor("source"), selectHandler));
    }
    parent.appendChild(textBlock("target", t("ui.target_label"), instance.target,
      highlightsFor("target"), selectHandler));
    if (instance.context !== undefined) {
      parent.appendChild(contextBlock(t("ui.context_label"), instance.context));
    }
    if (instance.context_after !== undefined) {
      parent.appendChild(contextBlock(t("ui.context_after_label"), instance.context_after));
    }
  }

  function contextBlock(label: string, text: string): HTMLElement {
    return el("div", { class: "context" }, el("span", { class: "side-label" }, label), text);
  }

  function textBlock(side: Side, label: string, text: string, highlights: Highlight[],
                     selectHandler: ((side: Side, container: HTMLElement, text: string) => void)
                       | null): HTMLElement {
    const container = el("div", { class: "text", "data-side": side });
    for (const segment of segmentText(text, highlights)) {
      const span = el("span", {}, segment.text);
      if (segment.covers.length > 0) {
        span.className = segment.covers.some((h) => h.pending) ? "covered pending" : "covered";
        // one underline stripe per covering edit, stacked downward
        span.style.boxShadow = segment.covers
          .map((h, depth) => `0 ${2 + depth * 3}px 0 0 ${h.color}`)
          .join(", ");
      }
      container.appendChild(span);
    }
    if (selectHandler !== null) {
      container.addEventListener("mouseup", () => {
        selectHandler(side, container, text);
      });
    }
    return el("div", { class: "text-row" },
      el("span", { class: "side-label" }, label), container);
  }

  // -- submission -------------------------------------------------------------

  async function submit(): Promise<void> {
    if (api.submissionInFlight) return;
    state.diagnostics = new Map();
    try {
      await api.submit(sessionId, draft.document());
      state.status = { kind: "ok", text: t("ui.submission_ok") };
    } catch (error) {
      if (error instanceof ApiError) {
        state.status = { kind: "error", text: `${error.envelope.code}: ${error.envelope.message}` };
        routeDiagnostics(error);
      } else {
        // network failure: the draft is still in storage, offer a retry
        state.status = { kind: "error", text: `${t("ui.submission_failed")} ${t("ui.retry")}?` };
      }
    }
    rerender();
  }

  function routeDiagnostics(error: ApiError): void {
    for (const detail of error.envelope.details) {
      const path = typeof detail.path === "string" ? detail.path : "";
      const match = /^instances\.(.+?)\[(\d+)\]/.exec(path);
      const message = `${detail.code ?? "error"}: ${detail.message ?? path}`;
      if (match !== null) {
        const key = `${match[1]}:${match[2]}`;
        const bucket = state.diagnostics.get(key) ?? [];
        bucket.push(message);
        state.diagnostics.set(key, bucket);
      }
    }
  }

  async function requestCompletion(): Promise<void> {
    if (!draft.allVisited()) {
      state.status = { kind: "info", text: t("ui.completion_blocked") };
      rerender();
      return;
    }
    try {
      const receipt = await api.complete(sessionId, draft.annotatorId);
      state.completionCode = receipt.completion_code;
      state.status = null;
    } catch (error) {
      state.status = {
        kind: "error",
        text: error instanceof ApiError
          ? `${error.envelope.code}: ${error.envelope.message}`
          : `${t("ui.submission_failed")} ${t("ui.retry")}?`,
      };
    }
    rerender();
  }

  rerender();
}

// -- pure fragments -----------------------------------------------------------

interface Segment {
  text: string;
  covers: Highlight[];
}

/** Split text at every highlight boundary; each piece knows what covers it. */
export function segmentText(text: string, highlights: Highlight[]): Segment[] {
  const length = scalarLength(text);
  const cuts = new Set<number>([0, length]);
  for (const h of highlights) {
    cuts.add(Math.max(0, Math.min(length, h.start)));
    cuts.add(Math.max(0, Math.min(length, h.end)));
  }
  const offsets = [...cuts].sort((a, b) => a - b);
  const segments: Segment[] = [];
  for (let i = 0; i + 1 < offsets.length; i++) {
    const start = offsets[i] as number;
    const end = offsets[i + 1] as number;
    segments.push({
      text: scalarSlice(text, start, end),
      covers: highlights.filter((h) => h.start <= start && end <= h.end),
    });
  }
  return segments;
}

function collectHighlights(edits: readonly EditData[], side: Side,
                           palette: Record<string, string>): Highlight[] {
  const out: Highlight[] = [];
  const walk = (edit: EditData, fallback: string): void => {
    const color = palette[edit.category] ?? fallback;
    for (const pair of edit.spans?.[side] ?? []) {
      out.push({ start: pair[0], end: pair[1], color, pending: false });
    }
    for (const child of edit.children ?? []) walk(child, color);
  };
  for (const edit of edits) walk(edit, "#888");
  return out;
}

/** Render one block of the precompiled instruction tree. */
function renderBlock(block: BlockNode): HTMLElement {
  switch (block.type) {
    case "heading": {
      const level = Math.min(6, Math.max(1, block.level ?? 2));
      const node = document.createElement(`h${level}`);
      appendInlines(node, block.children ?? []);
      return node;
    }
    case "code_block":
      return el("pre", {}, el("code", {}, block.text ?? ""));
    case "list": {
      const list = el(block.ordered === true ? "ol" : "ul", {});
      for (const item of block.items ?? []) {
        const entry = el("li", {});
        appendInlines(entry, item);
        list.appendChild(entry);
      }
      return list;
    }
    default: {
      const paragraph = el("p", {});
      appendInlines(paragraph, block.children ?? []);
      return paragraph;
    }
  }
}

function appendInlines(parent: HTMLElement, nodes: InlineNode[]): void {
  for (const node of nodes) parent.appendChild(renderInline(node));
}

function renderInline(node: InlineNode): Node {
  switch (node.type) {
    case "text":
      return document.createTextNode(node.text ?? "");
    case "code":
      return el("code", {}, node.text ?? "");
    case "strong": {
      const strong = el("strong", {});
      appendInlines(strong, node.children ?? []);
      return strong;
    }
    case "emphasis": {
      const emphasis = el("em", {});
      appendInlines(emphasis, node.children ?? []);
      return emphasis;
    }
    case "link": {
      const link = el("a", { href: node.href ?? "#", target: "_blank", rel: "noopener" });
      appendInlines(link, node.children ?? []);
      return link;
    }
    case "image":
      return el("img", { src: node.src ?? "", alt: node.alt ?? "" });
  }
}

/** UTF-16 offset of a selection endpoint inside container, via a prefix range. */
function utf16Within(container: HTMLElement, node: Node, offset: number): number | null {
  try {
    const range = document.createRange();
    range.setStart(container, 0);
    range.setEnd(node, offset);
    return range.toString().length;
  } catch {
    return null;
  }
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    if (name === "style") node.style.cssText = value;
    else node.setAttribute(name, value);
  }
  for (const child of children) node.append(child);
  return node;
}

function button(label: string, onClick: () => void,
                attrs: Record<string, string> = {}): HTMLButtonElement {
  const node = el("button", { type: "button", ...attrs }, label);
  node.addEventListener("click", onClick);
  return node;
}
