/**
 * DOM wiring: load a bundle file, show the panels, run diagnosis sessions.
 * All state lives in two variables; every interaction re-renders from them.
 */

import { LoadedBundle, loadBundle } from "./bundle.js";
import {
  renderBranches,
  renderElementNotice,
  renderElements,
  renderError,
  renderOutcome,
  renderProofTree,
  renderSolutions,
} from "./render.js";
import { UiSession, Verdict, canonicalJson } from "./session.js";

let loaded: LoadedBundle | null = null;
let session: UiSession | null = null;
let currentElement: string | null = null;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function renderAll(): void {
  const banner = el("banner");
  banner.innerHTML = "";
  if (!loaded) return;
  el("branches").innerHTML = renderBranches(loaded);
  el("solutions").innerHTML = renderSolutions(loaded);
  el("elements").innerHTML = renderElements(loaded);
  renderTreePanel();
}

function renderTreePanel(): void {
  const panel = el("tree");
  if (!loaded || !currentElement) {
    panel.innerHTML = `<p class="notice">pick an element to see why it was removed</p>`;
    el("outcome").innerHTML = "";
    return;
  }
  const tree = loaded.treesByElement.get(currentElement);
  if (!tree) {
    const [varName, value] = currentElement.split("=");
    panel.innerHTML = renderElementNotice(varName, Number(value));
    return;
  }
  panel.innerHTML = renderProofTree(loaded.bundle, tree, session ? { session } : {});
  el("outcome").innerHTML = session ? renderOutcome(session, loaded.bundle) : "";
  el("session-controls").innerHTML = session
    ? session.concluded
      ? `<button id="download-transcript">download transcript</button>`
      : `<span class="hint">judge the highlighted node</span>`
    : `<button id="start-session">start diagnosis session</button>`;
}

function startSession(): void {
  if (!loaded || !currentElement) return;
  const tree = loaded.treesByElement.get(currentElement);
  if (!tree) return;
  session = new UiSession(tree, loaded.bundle);
  renderTreePanel();
}

function downloadTranscript(): void {
  if (!loaded || !session?.concluded) return;
  const merged = { ...loaded.bundle, transcript: JSON.parse(session.transcript()) };
  const blob = new Blob([canonicalJson(merged)], { type: "application/json" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "session.bundle.json";
  a.click();
  URL.revokeObjectURL(a.href);
}

function onFile(file: File): void {
  file.text().then((text) => {
    const result = loadBundle(text);
    if (!result.ok) {
      loaded = null;
      session = null;
      currentElement = null;
      el("banner").innerHTML = renderError(result.error);
      for (const id of ["branches", "solutions", "elements", "tree", "outcome", "session-controls"]) {
        el(id).innerHTML = "";
      }
      return;
    }
    loaded = result.loaded;
    session = null;
    currentElement = null;
    renderAll();
  });
}

export function boot(): void {
  el("file").addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    if (input.files?.[0]) onFile(input.files[0]);
  });

  document.body.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const elementItem = target.closest<HTMLElement>(".element");
    if (elementItem?.dataset.element) {
      currentElement = elementItem.dataset.element;
      session = null;
      renderTreePanel();
      return;
    }
    if (target.id === "start-session") {
      startSession();
      return;
    }
    if (target.id === "download-transcript") {
      downloadTranscript();
      return;
    }
    if (target.classList.contains("verdict") && !target.hasAttribute("disabled")) {
      const node = target.dataset.node!;
      const verdict = target.dataset.verdict as Verdict;
      if (session?.canAnswer(node)) {
        session.answer(node, verdict);
        renderTreePanel();
      }
    }
  });
}

boot();
