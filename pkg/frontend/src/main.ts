/**
 * Entry point: reads session/annotator/locale from the query string, loads
 * the compiled interface document, and mounts the annotator.
 */

import { SessionApi } from "./client.js";
import { AnnotationDraft } from "./draft.js";
import { renderApp } from "./view.js";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (root === null) throw new Error("missing #app mount point");
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get("session");
  if (sessionId === null) {
    root.textContent = "Missing ?session=<id> in the URL.";
    return;
  }
  const annotatorId = params.get("annotator") ?? "anonymous";
  const api = new SessionApi(params.get("api") ?? "");
  const ir = await api.interface_(sessionId, {
    locale: params.get("locale") ?? undefined,
    annotatorId,
  });
  document.title = ir.typology_name;
  const draft = new AnnotationDraft(ir, sessionId, annotatorId, window.localStorage);
  renderApp({ root, ir, draft, api, sessionId });
}

boot().catch((error: unknown) => {
  const root = document.getElementById("app");
  if (root !== null) root.textContent = String(error);
});
