/**
 * End-to-end exercise against a real server process: one hundred scripted
 * annotator sessions drive the draft state machine with randomized actions
 * (legal and illegal alike), then submit, resubmit, and request completion
 * codes. Every HTTP response in the log must be < 400: the draft guards are
 * supposed to make an invalid submission impossible to construct.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { setTimeout as sleep } from "node:timers/promises";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SessionApi } from "../src/client.js";
import { AnnotationDraft } from "../src/draft.js";
import type { InterfaceIR, IrCategory, IrInstance, IrQuestion, Side } from "../src/ir.js";
import { requiredSides } from "../src/ir.js";
import { requiredUnanswered } from "../src/questions.js";
import { scalarLength } from "../src/unicode.js";

type Rng = () => number;

function mulberry32(seed: number): Rng {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function intIn(rng: Rng, lo: number, hi: number): number {
  return lo + Math.floor(rng() * (hi - lo));
}

function pick<T>(rng: Rng, items: readonly T[]): T {
  if (items.length === 0) throw new Error("pick from empty list");
  return items[intIn(rng, 0, items.length)] as T;
}

const PHRASES = ["ok", "unclear wording", "dropped a clause", "词序不对", "😀 emphasis lost"];

function validAnswer(question: IrQuestion, rng: Rng): number | string {
  if (question.kind === "textbox") return pick(rng, PHRASES);
  return intIn(rng, 0, (question.options ?? ["0"]).length);
}

function sideText(instance: IrInstance, side: Side): string {
  return (side === "source" ? instance.source : instance.target) ?? "";
}

function sidesPresent(category: IrCategory, instance: IrInstance): boolean {
  return requiredSides(category).every(
    (side) => (instance.bounds[side]?.starts.length ?? 0) > 0);
}

/** Raw offsets roughly around the text, deliberately often out of range. */
function rawSpan(instance: IrInstance, side: Side, rng: Rng): [number, number] {
  const n = scalarLength(sideText(instance, side));
  const start = intIn(rng, -3, n + 4);
  const end = intIn(rng, start - 2, n + 5);
  return [start, end];
}

function selectUntilAdded(draft: AnnotationDraft, side: Side, rng: Rng): boolean {
  const instance = draft.currentInstance();
  for (let attempt = 0; attempt < 30; attempt++) {
    const [start, end] = rawSpan(instance, side, rng);
    if (draft.addSelection(side, start, end)) return true;
  }
  return false;
}

/** One constructive move toward a committable pending edit; false = nothing left. */
function improveOnce(draft: AnnotationDraft, rng: Rng): boolean {
  const pending = draft.pending();
  if (pending === null) return false;
  const cat = draft.category(pending.category);
  if (cat === undefined) return false;
  const instance = draft.currentInstance();

  if (cat.selection === "composite") {
    if (pending.children.length === 0) {
      const usable = (cat.children ?? []).filter((c) => sidesPresent(c, instance));
      return usable.length > 0 && draft.addChild(pick(rng, usable).name);
    }
    for (let index = 0; index < pending.children.length; index++) {
      const child = pending.children[index];
      if (child === undefined) continue;
      const childCat = draft.category(child.category);
      if (childCat === undefined) continue;
      for (const side of requiredSides(childCat)) {
        if (child.spans[side].length === 0) {
          draft.setActiveChild(index);
          return selectUntilAdded(draft, side, rng);
        }
      }
      const unanswered = requiredUnanswered(childCat.questions ?? [], child.answers)[0];
      if (unanswered !== undefined) {
        return draft.setChildAnswer(index, unanswered.id, validAnswer(unanswered, rng));
      }
    }
  } else {
    for (const side of requiredSides(cat)) {
      if (pending.spans[side].length === 0) return selectUntilAdded(draft, side, rng);
    }
  }
  const unanswered = requiredUnanswered(cat.questions ?? [], pending.answers)[0];
  if (unanswered !== undefined) {
    return draft.setAnswer(unanswered.id, validAnswer(unanswered, rng));
  }
  return false;
}

function completePending(draft: AnnotationDraft, rng: Rng): boolean {
  for (let guard = 0; guard < 80; guard++) {
    if (draft.commitBlockers().length === 0) return draft.commitEdit();
    if (!improveOnce(draft, rng)) break;
  }
  draft.cancelEdit();
  return false;
}

/** Anything a pointer and keyboard could do, including plenty of illegal moves. */
function chaoticStep(draft: AnnotationDraft, ir: InterfaceIR, rng: Rng): void {
  const allNames = ir.categories.flatMap((c) => [c.name, ...(c.children ?? []).map(
    (child) => child.name)]).concat("no_such_category");
  const allQuestions: IrQuestion[] = [];
  const collect = (qs: IrQuestion[]): void => {
    for (const q of qs) {
      allQuestions.push(q);
      for (const branch of Object.values(q.followups ?? {})) collect(branch);
    }
  };
  for (const cat of ir.categories) {
    collect(cat.questions ?? []);
    for (const child of cat.children ?? []) collect(child.questions ?? []);
  }
  const qids = allQuestions.map((q) => q.id).concat("no_such_question");
  const values: (number | string)[] = [7, -1, 2.5, "", "free text", 0, 1];
  const sides: Side[] = ["source", "target"];
  const instance = draft.currentInstance();

  const moves: (() => unknown)[] = [
    () => draft.beginEdit(pick(rng, allNames)),
    () => {
      const [start, end] = rawSpan(instance, pick(rng, sides), rng);
      return draft.addSelection(pick(rng, sides), start, end);
    },
    () => draft.setAnswer(pick(rng, qids), pick(rng, values)),
    () => draft.setChildAnswer(intIn(rng, 0, 3), pick(rng, qids), pick(rng, values)),
    () => draft.addChild(pick(rng, allNames)),
    () => draft.setActiveChild(intIn(rng, -1, 3)),
    () => draft.removeChild(intIn(rng, 0, 3)),
    () => draft.removeSelection(pick(rng, sides), intIn(rng, 0, 3)),
    () => draft.removeEdit(instance.id, intIn(rng, 0, 4)),
    () => draft.confirmNoEdits(),
    () => draft.goTo(intIn(rng, -1, draft.instanceCount + 1)),
    () => draft.commitEdit(),
  ];
  pick(rng, moves)();
}

function driveSession(draft: AnnotationDraft, ir: InterfaceIR, rng: Rng): void {
  const rootNames = ir.categories.map((c) => c.name);
  const steps = 40 + intIn(rng, 0, 80);
  for (let step = 0; step < steps; step++) {
    const roll = rng();
    if (draft.pending() === null) {
      if (roll < 0.5) draft.beginEdit(pick(rng, rootNames));
      else if (roll < 0.7) chaoticStep(draft, ir, rng);
      else if (roll < 0.85) draft.goTo(intIn(rng, 0, draft.instanceCount));
      else if (draft.editsFor(draft.currentInstance().id).length > 0 && roll < 0.92) {
        draft.removeEdit(draft.currentInstance().id, 0);
      } else {
        draft.confirmNoEdits();
      }
    } else if (roll < 0.55) {
      if (!improveOnce(draft, rng)) draft.commitEdit();
    } else if (roll < 0.85) {
      chaoticStep(draft, ir, rng);
    } else if (roll < 0.95) {
      completePending(draft, rng);
    } else {
      draft.cancelEdit();
    }
  }

  // finishing pass: leave no instance unvisited, no edit half-built
  if (draft.pending() !== null) completePending(draft, rng);
  for (let index = 0; index < draft.instanceCount; index++) {
    draft.goTo(index);
    const id = draft.currentInstance().id;
    if (!draft.visited(id) && rng() < 0.5) {
      const usable = ir.categories.filter((c) => draft.canAnnotate(c.name));
      if (usable.length > 0 && draft.beginEdit(pick(rng, usable).name)) {
        completePending(draft, rng);
      }
    }
    if (!draft.visited(id)) draft.confirmNoEdits();
  }
}

// ---------------------------------------------------------------------------

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        probe.close(() => reject(new Error("no port assigned")));
        return;
      }
      const { port } = address;
      probe.close(() => resolve(port));
    });
  });
}

const fixtureDir = new URL("../../tests/fixtures/", import.meta.url);

function fixture(name: string): string {
  return readFileSync(new URL(name, fixtureDir), "utf8");
}

const PAIRS: [string, string][] = [
  ["salsa_like.yml", "instances.json"],
  ["mqm_like.yml", "instances.json"],
  ["subword_template.yml", "subword_instances.json"],
];

describe("scripted annotator sessions against a live server", () => {
  let server: ChildProcess | null = null;
  let serverLog = "";
  let workDir = "";
  let base = "";
  const sessionIds: string[] = [];
  const requestLog: { method: string; url: string; status: number }[] = [];

  const recordingFetch = async (input: string, init?: RequestInit): Promise<Response> => {
    const response = await fetch(input, init);
    requestLog.push({ method: init?.method ?? "GET", url: input, status: response.status });
    return response;
  };

  beforeAll(async () => {
    const port = await freePort();
    base = `http://127.0.0.1:${port}`;
    workDir = mkdtempSync(join(tmpdir(), "annotator-ui-"));
    const configPath = join(workDir, "server.yml");
    writeFileSync(configPath, [
      `host: "127.0.0.1"`,
      `port: ${port}`,
      `secret: "ui-test-secret"`,
      `store_dir: ${JSON.stringify(join(workDir, "store"))}`,
      "",
    ].join("\n"));

    server = spawn("thresh", ["serve", "-c", configPath], {
      stdio: ["ignore", "pipe", "pipe"],
    });
    server.stdout?.on("data", (chunk: Buffer) => {
      serverLog += chunk.toString();
    });
    server.stderr?.on("data", (chunk: Buffer) => {
      serverLog += chunk.toString();
    });
    const exited = new Promise<never>((_, reject) => {
      server?.once("exit", (code) => {
        reject(new Error(`server exited early (${code}):\n${serverLog}`));
      });
    });

    let healthy = false;
    for (let attempt = 0; attempt < 120 && !healthy; attempt++) {
      await Promise.race([sleep(250), exited]);
      try {
        const response = await fetch(`${base}/api/health`);
        healthy = response.ok;
      } catch {
        // not listening yet
      }
    }
    if (!healthy) throw new Error(`server never became healthy:\n${serverLog}`);
    server.removeAllListeners("exit");

    const boot = new SessionApi(base, recordingFetch);
    for (const [template, data] of PAIRS) {
      const { session_id } = await boot.createSession({
        template_inline: fixture(template),
        data_inline: fixture(data),
      });
      sessionIds.push(session_id);
    }
  }, 60_000);

  afterAll(async () => {
    if (server !== null && server.exitCode === null) {
      const gone = new Promise((resolve) => server?.once("exit", resolve));
      server.kill("SIGTERM");
      await Promise.race([gone, sleep(5_000)]);
      if (server.exitCode === null) server.kill("SIGKILL");
    }
    if (workDir !== "") rmSync(workDir, { recursive: true, force: true });
  });

  it("100 randomized sessions submit and complete without a single 4xx", async () => {
    for (let i = 0; i < 100; i++) {
      const rng = mulberry32(0xa5a50000 + i);
      const sessionId = sessionIds[i % sessionIds.length] as string;
      const annotator = `ann${i}`;
      const api = new SessionApi(base, recordingFetch);

      const ir = await api.interface_(sessionId, { annotatorId: annotator });
      const draft = new AnnotationDraft(ir, sessionId, annotator);
      driveSession(draft, ir, rng);
      expect(draft.allVisited()).toBe(true);

      let sent = draft.document();
      const receipt = await api.submit(sessionId, sent);
      expect(receipt.receipt).toMatch(/^[0-9a-f]{64}$/);
      expect(receipt.annotator_id).toBe(annotator);

      if (i % 4 === 0) {
        // keep working after a save: later submissions replace earlier ones
        draft.goTo(intIn(rng, 0, draft.instanceCount));
        const usable = ir.categories.filter((c) => draft.canAnnotate(c.name));
        if (usable.length > 0 && draft.beginEdit(pick(rng, usable).name)) {
          completePending(draft, rng);
        }
        sent = draft.document();
        const second = await api.submit(sessionId, sent);
        expect(second.annotator_id).toBe(annotator);
      }

      if (i % 10 === 0) {
        expect(await api.annotations(sessionId, annotator)).toEqual(sent);
      }

      const completion = await api.complete(sessionId, annotator);
      expect(completion.annotator_id).toBe(annotator);
      expect(completion.completion_code).toMatch(/^[0-9A-HJKMNP-TV-Z]{12}$/);
    }

    const failures = requestLog.filter((entry) => entry.status >= 400);
    expect(failures).toEqual([]);
    const submissions = requestLog.filter(
      (entry) => entry.method === "POST" && entry.url.endsWith("/annotations"));
    expect(submissions.length).toBeGreaterThanOrEqual(100);
  }, 300_000);
});
