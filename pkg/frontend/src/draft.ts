/**
 * One annotator's in-progress annotation document. Every mutation goes
 * through a guard that mirrors a server-side validation rule, so a draft
 * can only ever serialize to a document the server accepts:
 *
 *  - spans come from trySnap over the instance's boundary arrays,
 *  - span groups never overlap within one edit and single_span replaces,
 *  - composite edits carry children, never spans of their own,
 *  - answers are recorded only for visible questions with wire-legal values,
 *  - changing an answer collapses untriggered branches and clears them.
 *
 * The draft autosaves to storage keyed by (session, annotator) after every
 * mutation so an interrupted browser session loses nothing.
 */

import type {
  AnnotationDocument,
  AnswerValue,
  EditData,
  InterfaceIR,
  IrCategory,
  IrInstance,
  IrQuestion,
  Side,
  SpanPair,
} from "./ir.js";
import { categoryIndex, requiredSides } from "./ir.js";
import { trySnap } from "./snap.js";
import {
  acceptableAnswer,
  orderedAnswers,
  pruneAnswers,
  requiredUnanswered,
  visibleQuestions,
} from "./questions.js";

/** The subset of the Web Storage API the draft needs; injectable for tests. */
export interface DraftStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

interface SpanGroups {
  source: SpanPair[];
  target: SpanPair[];
}

export interface PendingChild {
  category: string;
  spans: SpanGroups;
  answers: Map<string, AnswerValue>;
}

export interface PendingEdit {
  category: string;
  spans: SpanGroups;
  answers: Map<string, AnswerValue>;
  children: PendingChild[];
  /** Which child receives selections; null targets the edit itself. */
  activeChild: number | null;
}

function emptyGroups(): SpanGroups {
  return { source: [], target: [] };
}

function overlapsAny(spans: SpanPair[], candidate: SpanPair): boolean {
  return spans.some(([s, e]) => s < candidate[1] && candidate[0] < e);
}

function insertSorted(spans: SpanPair[], candidate: SpanPair): void {
  let at = 0;
  while (at < spans.length && (spans[at] as SpanPair)[0] < candidate[0]) at++;
  spans.splice(at, 0, candidate);
}

export function draftStorageKey(sessionId: string, annotatorId: string): string {
  return `thresh.draft.${sessionId}.${annotatorId}`;
}

export class AnnotationDraft {
  readonly ir: InterfaceIR;
  readonly sessionId: string;
  readonly annotatorId: string;

  private readonly storage: DraftStorage | null;
  private readonly categories: Map<string, IrCategory>;
  private edits = new Map<string, EditData[]>();
  private confirmedEmpty = new Set<string>();
  private cursor = 0;
  private pendingEdit: PendingEdit | null = null;

  constructor(ir: InterfaceIR, sessionId: string, annotatorId: string,
              storage?: DraftStorage) {
    this.ir = ir;
    this.sessionId = sessionId;
    this.annotatorId = annotatorId;
    this.storage = storage ?? null;
    this.categories = categoryIndex(ir.categories);
    this.restore();
  }

  // -- navigation -----------------------------------------------------------

  get instanceCount(): number {
    return this.ir.instances.length;
  }

  get cursorIndex(): number {
    return this.cursor;
  }

  currentInstance(): IrInstance {
    const instance = this.ir.instances[this.cursor];
    if (instance === undefined) throw new Error("interface document has no instances");
    return instance;
  }

  goTo(index: number): boolean {
    if (!Number.isInteger(index) || index < 0 || index >= this.ir.instances.length) return false;
    if (index === this.cursor) return true;
    this.pendingEdit = null;
    this.cursor = index;
    this.save();
    return true;
  }

  next(): boolean {
    return this.goTo(this.cursor + 1);
  }

  previous(): boolean {
    return this.goTo(this.cursor - 1);
  }

  // -- pending edit ---------------------------------------------------------

  pending(): PendingEdit | null {
    return this.pendingEdit;
  }

  category(name: string): IrCategory | undefined {
    return this.categories.get(name);
  }

  /** Whether a fresh edit of this root category can be completed here. */
  canAnnotate(categoryName: string): boolean {
    if (!this.ir.selection_enabled) return false;
    const cat = this.ir.categories.find((c) => c.name === categoryName);
    if (cat === undefined) return false;
    const instance = this.currentInstance();
    if (cat.selection === "composite") {
      return (cat.children ?? []).some((child) => this.sidesAvailable(child, instance));
    }
    return this.sidesAvailable(cat, instance);
  }

  private sidesAvailable(cat: IrCategory, instance: IrInstance): boolean {
    return requiredSides(cat).every((side) => {
      const bounds = instance.bounds[side];
      return bounds !== undefined && bounds.starts.length > 0 && bounds.ends.length > 0;
    });
  }

  beginEdit(categoryName: string): boolean {
    if (!this.canAnnotate(categoryName)) return false;
    this.pendingEdit = {
      category: categoryName,
      spans: emptyGroups(),
      answers: new Map(),
      children: [],
      activeChild: null,
    };
    this.save();
    return true;
  }

  cancelEdit(): void {
    this.pendingEdit = null;
    this.save();
  }

  /** Add a component selection under the pending composite edit. */
  addChild(categoryName: string): boolean {
    const pending = this.pendingEdit;
    if (pending === null) return false;
    const cat = this.categories.get(pending.category);
    if (cat === undefined || cat.selection !== "composite") return false;
    const child = (cat.children ?? []).find((c) => c.name === categoryName);
    if (child === undefined) return false;
    if (!this.sidesAvailable(child, this.currentInstance())) return false;
    pending.children.push({ category: categoryName, spans: emptyGroups(), answers: new Map() });
    pending.activeChild = pending.children.length - 1;
    this.save();
    return true;
  }

  removeChild(index: number): boolean {
    const pending = this.pendingEdit;
    if (pending === null || pending.children[index] === undefined) return false;
    pending.children.splice(index, 1);
    if (pending.activeChild !== null && pending.activeChild >= pending.children.length) {
      pending.activeChild = pending.children.length > 0 ? pending.children.length - 1 : null;
    }
    this.save();
    return true;
  }

  setActiveChild(index: number | null): boolean {
    const pending = this.pendingEdit;
    if (pending === null) return false;
    if (index !== null && pending.children[index] === undefined) return false;
    pending.activeChild = index;
    this.save();
    return true;
  }

  /**
   * Route a raw selection (scalar offsets) into the pending edit. Returns
   * false when the selection is discarded: no pending edit, wrong side,
   * no boundaries, collapsed or degenerate after snapping, or overlapping
   * an existing span in the same group.
   */
  addSelection(side: Side, rawStart: number, rawEnd: number): boolean {
    const pending = this.pendingEdit;
    if (pending === null) return false;
    const cat = this.categories.get(pending.category);
    if (cat === undefined) return false;

    let target: PendingEdit | PendingChild = pending;
    let targetCat = cat;
    if (cat.selection === "composite") {
      if (pending.activeChild === null) return false;
      const child = pending.children[pending.activeChild];
      if (child === undefined) return false;
      const childCat = this.categories.get(child.category);
      if (childCat === undefined) return false;
      target = child;
      targetCat = childCat;
    }

    if (!requiredSides(targetCat).includes(side)) return false;
    const snapped = trySnap(rawStart, rawEnd, this.currentInstance().bounds[side]);
    if (snapped === null) return false;

    const group = target.spans[side];
    if (targetCat.selection === "single_span") {
      target.spans[side] = [snapped];
    } else {
      if (overlapsAny(group, snapped)) return false;
      insertSorted(group, snapped);
    }
    this.save();
    return true;
  }

  removeSelection(side: Side, index: number): boolean {
    const pending = this.pendingEdit;
    if (pending === null) return false;
    const cat = this.categories.get(pending.category);
    let target: PendingEdit | PendingChild = pending;
    if (cat !== undefined && cat.selection === "composite") {
      if (pending.activeChild === null) return false;
      const child = pending.children[pending.activeChild];
      if (child === undefined) return false;
      target = child;
    }
    if (target.spans[side][index] === undefined) return false;
    target.spans[side].splice(index, 1);
    this.save();
    return true;
  }

  /**
   * Record an answer on the pending edit's own question tree. Only visible
   * questions accept answers; an empty textbox value clears instead. After
   * any change, answers on collapsed branches are pruned.
   */
  setAnswer(questionId: string, value: AnswerValue): boolean {
    const pending = this.pendingEdit;
    if (pending === null) return false;
    const cat = this.categories.get(pending.category);
    if (cat === undefined) return false;
    return this.recordAnswer(cat.questions ?? [], pending.answers, questionId, value);
  }

  setChildAnswer(index: number, questionId: string, value: AnswerValue): boolean {
    const pending = this.pendingEdit;
    if (pending === null) return false;
    const child = pending.children[index];
    if (child === undefined) return false;
    const childCat = this.categories.get(child.category);
    if (childCat === undefined) return false;
    return this.recordAnswer(childCat.questions ?? [], child.answers, questionId, value);
  }

  private recordAnswer(roots: IrQuestion[], answers: Map<string, AnswerValue>,
                       questionId: string, value: AnswerValue): boolean {
    const question = visibleQuestions(roots, answers).find((q) => q.id === questionId);
    if (question === undefined) return false;
    if (question.kind === "textbox" && value === "") {
      answers.delete(questionId);
    } else {
      if (!acceptableAnswer(question, value)) return false;
      answers.set(questionId, value);
    }
    const kept = pruneAnswers(roots, answers);
    answers.clear();
    for (const [k, v] of kept) answers.set(k, v);
    this.save();
    return true;
  }

  /** Human-readable reasons the pending edit cannot be committed yet. */
  commitBlockers(): string[] {
    const pending = this.pendingEdit;
    if (pending === null) return ["no edit in progress"];
    const cat = this.categories.get(pending.category);
    if (cat === undefined) return [`unknown category ${pending.category}`];
    const blockers: string[] = [];

    if (cat.selection === "composite") {
      if (pending.children.length === 0) {
        blockers.push("composite edits need at least one component selection");
      }
      pending.children.forEach((child, i) => {
        const childCat = this.categories.get(child.category);
        if (childCat === undefined) return;
        for (const side of requiredSides(childCat)) {
          if (child.spans[side].length === 0) {
            blockers.push(`component ${i + 1} (${childCat.label}) needs a ${side} span`);
          }
        }
        if (requiredUnanswered(childCat.questions ?? [], child.answers).length > 0) {
          blockers.push(`component ${i + 1} (${childCat.label}) has unanswered questions`);
        }
      });
    } else {
      for (const side of requiredSides(cat)) {
        if (pending.spans[side].length === 0) {
          blockers.push(`select a ${side} span`);
        }
      }
    }
    for (const q of requiredUnanswered(cat.questions ?? [], pending.answers)) {
      blockers.push(`answer "${q.prompt}"`);
    }
    return blockers;
  }

  /** Append the pending edit to the current instance when every gate passes. */
  commitEdit(): boolean {
    if (this.commitBlockers().length > 0) return false;
    const pending = this.pendingEdit as PendingEdit;
    const cat = this.categories.get(pending.category) as IrCategory;
    const instanceId = this.currentInstance().id;
    const list = this.edits.get(instanceId) ?? [];
    list.push(this.toEditData(pending, cat));
    this.edits.set(instanceId, list);
    this.confirmedEmpty.delete(instanceId);
    this.pendingEdit = null;
    this.save();
    return true;
  }

  private toEditData(pending: PendingEdit, cat: IrCategory): EditData {
    const data: EditData = { category: pending.category };
    if (cat.selection === "composite") {
      data.children = pending.children.map((child) => {
        const childCat = this.categories.get(child.category) as IrCategory;
        const childData: EditData = { category: child.category };
        attachSpans(childData, child.spans);
        const answers = orderedAnswers(childCat.questions ?? [], child.answers);
        if (answers.length > 0) childData.answers = answers;
        return childData;
      });
    } else {
      attachSpans(data, pending.spans);
    }
    const answers = orderedAnswers(cat.questions ?? [], pending.answers);
    if (answers.length > 0) data.answers = answers;
    return data;
  }

  // -- committed edits ------------------------------------------------------

  editsFor(instanceId: string): readonly EditData[] {
    return this.edits.get(instanceId) ?? [];
  }

  removeEdit(instanceId: string, index: number): boolean {
    const list = this.edits.get(instanceId);
    if (list === undefined || list[index] === undefined) return false;
    list.splice(index, 1);
    if (list.length === 0) this.edits.delete(instanceId);
    this.save();
    return true;
  }

  /** Explicitly mark the current instance as reviewed with nothing to annotate. */
  confirmNoEdits(): boolean {
    const instanceId = this.currentInstance().id;
    if ((this.edits.get(instanceId) ?? []).length > 0) return false;
    this.confirmedEmpty.add(instanceId);
    this.save();
    return true;
  }

  visited(instanceId: string): boolean {
    return (this.edits.get(instanceId) ?? []).length > 0 || this.confirmedEmpty.has(instanceId);
  }

  /** Instance ids the completion endpoint would still reject. */
  missingInstances(): string[] {
    return this.ir.instances.map((i) => i.id).filter((id) => !this.visited(id));
  }

  allVisited(): boolean {
    return this.missingInstances().length === 0;
  }

  // -- document -------------------------------------------------------------

  document(): AnnotationDocument {
    const instances: Record<string, EditData[]> = {};
    for (const instance of this.ir.instances) {
      const list = this.edits.get(instance.id);
      if (list !== undefined && list.length > 0) {
        instances[instance.id] = list.map(cloneEdit);
      } else if (this.confirmedEmpty.has(instance.id)) {
        instances[instance.id] = [];
      }
    }
    return {
      format_version: "1.0",
      typology_name: this.ir.typology_name,
      annotator_id: this.annotatorId,
      instances,
    };
  }

  // -- persistence ----------------------------------------------------------

  clear(): void {
    this.edits = new Map();
    this.confirmedEmpty = new Set();
    this.pendingEdit = null;
    this.cursor = 0;
    this.storage?.removeItem(draftStorageKey(this.sessionId, this.annotatorId));
  }

  private save(): void {
    if (this.storage === null) return;
    const pending = this.pendingEdit;
    const snapshot = {
      typology: this.ir.typology_name,
      cursor: this.cursor,
      confirmed_empty: [...this.confirmedEmpty],
      edits: Object.fromEntries(this.edits),
      pending: pending === null ? null : {
        category: pending.category,
        spans: pending.spans,
        answers: [...pending.answers],
        active_child: pending.activeChild,
        children: pending.children.map((child) => ({
          category: child.category,
          spans: child.spans,
          answers: [...child.answers],
        })),
      },
    };
    this.storage.setItem(
      draftStorageKey(this.sessionId, this.annotatorId), JSON.stringify(snapshot));
  }

  private restore(): void {
    if (this.storage === null) return;
    const raw = this.storage.getItem(draftStorageKey(this.sessionId, this.annotatorId));
    if (raw === null) return;
    try {
      const snapshot = JSON.parse(raw) as DraftSnapshot;
      if (snapshot.typology !== this.ir.typology_name) return;
      const ids = new Set(this.ir.instances.map((i) => i.id));
      this.cursor = Math.min(Math.max(0, snapshot.cursor | 0), this.ir.instances.length - 1);
      this.confirmedEmpty = new Set(snapshot.confirmed_empty.filter((id) => ids.has(id)));
      this.edits = new Map(Object.entries(snapshot.edits).filter(([id]) => ids.has(id)));
      const pending = snapshot.pending;
      this.pendingEdit = pending === null ? null : {
        category: pending.category,
        spans: pending.spans,
        answers: new Map(pending.answers),
        activeChild: pending.active_child,
        children: pending.children.map((child) => ({
          category: child.category,
          spans: child.spans,
          answers: new Map(child.answers),
        })),
      };
    } catch {
      // a corrupt draft is dropped rather than blocking the session
      this.storage.removeItem(draftStorageKey(this.sessionId, this.annotatorId));
    }
  }
}

interface PendingChildSnapshot {
  category: string;
  spans: SpanGroups;
  answers: [string, AnswerValue][];
}

interface DraftSnapshot {
  typology: string;
  cursor: number;
  confirmed_empty: string[];
  edits: Record<string, EditData[]>;
  pending: null | (PendingChildSnapshot & {
    active_child: number | null;
    children: PendingChildSnapshot[];
  });
}

function attachSpans(data: EditData, groups: SpanGroups): void {
  const spans: EditData["spans"] = {};
  if (groups.source.length > 0) spans.source = groups.source.map((pair) => [...pair] as SpanPair);
  if (groups.target.length > 0) spans.target = groups.target.map((pair) => [...pair] as SpanPair);
  if (spans.source !== undefined || spans.target !== undefined) data.spans = spans;
}

function cloneEdit(edit: EditData): EditData {
  return JSON.parse(JSON.stringify(edit)) as EditData;
}
