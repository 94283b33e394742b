/**
 * Pure rendering: every panel is a function (bundle, state) -> HTML string,
 * so tests can assert structure without a DOM and the app stays a thin
 * event loop around re-rendering.
 */

import {
  Bundle,
  ConstraintInfo,
  LoadedBundle,
  ProofTreeNode,
  constraintText,
  elementKey,
} from "./bundle.js";
import { UiSession } from "./session.js";

const STATUS_BADGE: Record<string, string> = {
  SOLUTION: "badge-solution",
  FAILURE: "badge-failure",
  EXHAUSTED: "badge-exhausted",
};

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function constraintById(bundle: Bundle, id: string): ConstraintInfo | undefined {
  return bundle.csp.constraints.find((c) => c.id === id);
}

export function ruleBadge(bundle: Bundle, node: ProofTreeNode): string {
  if (node.ruleKind === "LABELING") {
    return `<span class="badge badge-labeling">LABELING</span><span class="rule-origin">merge</span>`;
  }
  if (node.ruleKind === "RESTRICTION") {
    return (
      `<span class="badge badge-restriction">RESTRICTION</span>` +
      `<span class="rule-origin">choice ${escapeHtml(node.origin)}</span>`
    );
  }
  const op = bundle.operators.local[node.origin];
  const c = op ? constraintById(bundle, op.constraint) : undefined;
  const text = c ? `${c.id}: ${constraintText(c)}` : node.origin;
  return `<span class="badge badge-local">LOCAL</span><span class="rule-origin">${escapeHtml(text)}</span>`;
}

export function contextChips(context: string[]): string {
  return context
    .map((b) => `<span class="chip" data-branch="${escapeHtml(b)}">${escapeHtml(b)}</span>`)
    .join("");
}

export interface TreeRenderOptions {
  session?: UiSession;
}

/**
 * One node: premises (collapsible) above the rule line, conclusion below,
 * mirroring inference-rule layout.
 */
function renderNode(bundle: Bundle, node: ProofTreeNode, id: string, opts: TreeRenderOptions): string {
  const session = opts.session;
  const verdict = session?.verdicts.get(id) ?? null;
  const classes = ["pt-node"];
  if (session) {
    if (id === session.cursor) classes.push("cursor");
    if (verdict === "CORRECT") classes.push("judged-correct");
    if (verdict === "INCORRECT") classes.push("judged-incorrect");
    if (session.blamePath().includes(id)) classes.push("blame-path");
    if (session.outcome?.node === id) classes.push("blamed");
  }
  const premises = node.children
    .map((child, i) => renderNode(bundle, child, `${id}.${i}`, opts))
    .join("");
  const premisesBlock = node.children.length
    ? `<details class="premises" open><summary>premises (${node.children.length})</summary>${premises}</details>`
    : "";
  const judgment =
    `<span class="context">${contextChips(node.judgment.context)}</span>` +
    `<span class="element">(${escapeHtml(node.judgment.var)},${node.judgment.value})</span>`;
  const buttons = session && !session.concluded
    ? `<span class="verdict-buttons">` +
      `<button class="verdict" data-node="${id}" data-verdict="CORRECT"` +
      `${session.canAnswer(id) && id === session.cursor ? "" : " disabled"}>correct</button>` +
      `<button class="verdict" data-node="${id}" data-verdict="INCORRECT"` +
      `${session.canAnswer(id) && id === session.cursor ? "" : " disabled"}>incorrect</button>` +
      `</span>`
    : "";
  return (
    `<div class="${classes.join(" ")}" data-node="${id}">` +
    premisesBlock +
    `<div class="rule-line">${ruleBadge(bundle, node)}</div>` +
    `<div class="judgment">${judgment}${buttons}</div>` +
    `</div>`
  );
}

export function renderProofTree(bundle: Bundle, tree: ProofTreeNode, opts: TreeRenderOptions = {}): string {
  return `<div class="proof-tree">${renderNode(bundle, tree, "0", opts)}</div>`;
}

export function renderElementNotice(varName: string, value: number): string {
  return `<p class="notice">(${escapeHtml(varName)},${value}) has no explanation in this bundle (never removed).</p>`;
}

export function renderBranches(loaded: LoadedBundle): string {
  const rows = loaded.branches
    .map((leaf) => {
      const badge = STATUS_BADGE[leaf.status ?? ""] ?? "";
      return (
        `<li class="branch" data-branch="${escapeHtml(leaf.id)}">` +
        `<span class="branch-id">${escapeHtml(leaf.id)}</span>` +
        `<span class="badge ${badge}">${leaf.status}</span>` +
        `</li>`
      );
    })
    .join("");
  return `<ul class="branch-list">${rows}</ul>`;
}

export function renderSolutions(loaded: LoadedBundle): string {
  const vars = loaded.bundle.csp.variables.map((v) => v.name);
  if (loaded.bundle.solutions.length === 0) {
    return `<p class="notice">no solutions</p>`;
  }
  const rows = loaded.bundle.solutions
    .map((s) => `<li class="solution">${vars.map((v) => `${v}=${s[v]}`).join(" ")}</li>`)
    .join("");
  return `<ul class="solution-list">${rows}</ul>`;
}

export function renderElements(loaded: LoadedBundle): string {
  if (loaded.treesByElement.size === 0) {
    return `<p class="notice">no removals</p>`;
  }
  const items = [...loaded.treesByElement.values()]
    .map((pt) => {
      const key = elementKey(pt.judgment);
      return (
        `<li class="element" data-element="${escapeHtml(key)}">` +
        `(${escapeHtml(pt.judgment.var)},${pt.judgment.value})` +
        `<span class="ctx-size">${pt.judgment.context.length} branch(es)</span>` +
        `</li>`
      );
    })
    .join("");
  return `<ul class="element-list">${items}</ul>`;
}

export function renderOutcome(session: UiSession, bundle: Bundle): string {
  if (!session.concluded || !session.outcome) return "";
  const o = session.outcome;
  if (o.kind === "no_blame") {
    return `<div class="banner banner-info">symptom not confirmed: the root judgment is correct</div>`;
  }
  if (o.kind === "constraint") {
    const c = o.constraint ? constraintById(bundle, o.constraint) : undefined;
    const text = c ? `${c.id} (${constraintText(c)})` : o.constraint ?? "?";
    return `<div class="banner banner-blame">blamed constraint: ${escapeHtml(text)} at node ${o.node}</div>`;
  }
  if (o.kind === "restriction") {
    return `<div class="banner banner-blame">blamed labeling choice ${escapeHtml(o.choice ?? "?")} at node ${o.node}</div>`;
  }
  return `<div class="banner banner-blame">blamed labeling merge at node ${o.node}</div>`;
}

export function renderError(message: string): string {
  return `<div class="banner banner-error">${escapeHtml(message)}</div>`;
}
