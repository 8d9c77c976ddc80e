/**
 * Question-tree traversal over the interface document. A followup is live
 * when its parent's current answer matches the followup key: the option
 * index for binary/scale kinds, "any" for textbox. Visibility is therefore
 * a pure function of (questions, answers so far).
 */

import type { AnswerData, AnswerValue, IrQuestion } from "./ir.js";

const ANY_TRIGGER = "any";

export type AnswerMap = ReadonlyMap<string, AnswerValue>;

function liveFollowupKeys(question: IrQuestion, answers: AnswerMap): string[] {
  const followups = question.followups;
  if (followups === undefined) return [];
  const value = answers.get(question.id);
  if (value === undefined) return [];
  const keys: string[] = [];
  if (typeof value === "number" && followups[String(value)] !== undefined) {
    keys.push(String(value));
  }
  if (typeof value === "string" && followups[ANY_TRIGGER] !== undefined) {
    keys.push(ANY_TRIGGER);
  }
  return keys;
}

/** Root questions plus every followup whose trigger answer is present, pre-order. */
export function visibleQuestions(roots: IrQuestion[], answers: AnswerMap): IrQuestion[] {
  const out: IrQuestion[] = [];
  const walk = (questions: IrQuestion[]): void => {
    for (const q of questions) {
      out.push(q);
      for (const key of liveFollowupKeys(q, answers)) {
        walk(q.followups?.[key] ?? []);
      }
    }
  };
  walk(roots);
  return out;
}

/**
 * Drop answers whose question is no longer visible. Visibility depends only
 * on ancestor answers, so one pre-order pass collapses a whole branch: an
 * untriggered followup is skipped and everything below it goes with it.
 */
export function pruneAnswers(roots: IrQuestion[], answers: AnswerMap): Map<string, AnswerValue> {
  const kept = new Map<string, AnswerValue>();
  for (const q of visibleQuestions(roots, answers)) {
    const value = answers.get(q.id);
    if (value !== undefined) kept.set(q.id, value);
  }
  return kept;
}

/** Answers serialized in visible pre-order, so parents precede followups. */
export function orderedAnswers(roots: IrQuestion[], answers: AnswerMap): AnswerData[] {
  const out: AnswerData[] = [];
  for (const q of visibleQuestions(roots, answers)) {
    const value = answers.get(q.id);
    if (value !== undefined) out.push({ question_id: q.id, value });
  }
  return out;
}

/** Visible non-optional questions with no answer yet. */
export function requiredUnanswered(roots: IrQuestion[], answers: AnswerMap): IrQuestion[] {
  return visibleQuestions(roots, answers).filter((q) => !q.optional && !answers.has(q.id));
}

/**
 * Whether a value is storable for this question: an in-range option index
 * for binary/scale kinds, non-empty text for textbox. The server enforces
 * the same rules; the interface just refuses to record anything else.
 */
export function acceptableAnswer(question: IrQuestion, value: AnswerValue): boolean {
  if (question.kind === "textbox") {
    return typeof value === "string" && value.length > 0;
  }
  const arity = question.options?.length ?? 0;
  return typeof value === "number" && Number.isInteger(value) && value >= 0 && value < arity;
}
