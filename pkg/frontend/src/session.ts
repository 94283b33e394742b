/**
 * Client-side diagnosis session: the same cursor rule the engine documents,
 * re-implemented over a bundle's proof tree. Conformance contract: given
 * the same verdict sequence, the canonical transcript must be byte-equal
 * to the engine's.
 */

import { Bundle, ProofTreeNode } from "./bundle.js";

export type Verdict = "CORRECT" | "INCORRECT";
type Stored = Verdict | "UNKNOWN";

export interface Outcome {
  kind: "no_blame" | "constraint" | "restriction" | "labeling";
  constraint?: string;
  choice?: string;
  node?: string;
  origin?: string;
}

interface NodeEntry {
  node: ProofTreeNode;
  parent: string | null;
  children: string[];
}

export class UiSession {
  readonly root: ProofTreeNode;
  readonly nodes = new Map<string, NodeEntry>();
  readonly preorder: string[] = [];
  readonly verdicts = new Map<string, Stored>();
  readonly answers: { node: string; verdict: Verdict }[] = [];
  cursor: string | null = "0";
  concluded = false;
  outcome: Outcome | null = null;

  constructor(tree: ProofTreeNode, private readonly bundle: Bundle) {
    this.root = tree;
    const index = (node: ProofTreeNode, id: string, parent: string | null): void => {
      const children = node.children.map((_, i) => `${id}.${i}`);
      this.nodes.set(id, { node, parent, children });
      this.preorder.push(id);
      this.verdicts.set(id, "UNKNOWN");
      node.children.forEach((child, i) => index(child, children[i], id));
    };
    index(tree, "0", null);
  }

  nodeAt(id: string): ProofTreeNode {
    const entry = this.nodes.get(id);
    if (!entry) throw new Error(`unknown node ${id}`);
    return entry.node;
  }

  /** Legal now: the cursor, or any unknown node under an incorrect parent. */
  canAnswer(id: string): boolean {
    const entry = this.nodes.get(id);
    if (!entry || this.concluded || this.verdicts.get(id) !== "UNKNOWN") return false;
    if (id === this.cursor) return true;
    return entry.parent !== null && this.verdicts.get(entry.parent) === "INCORRECT";
  }

  answer(id: string, verdict: Verdict): void {
    if (this.concluded) throw new Error("the session is already concluded");
    if (!this.nodes.has(id)) throw new Error(`unknown node ${id}`);
    if (this.verdicts.get(id) !== "UNKNOWN") throw new Error(`node ${id} was already answered`);
    if (!this.canAnswer(id)) throw new Error(`node ${id} is not a legal query target yet`);
    this.verdicts.set(id, verdict);
    this.answers.push({ node: id, verdict });
    this.advance();
  }

  private advance(): void {
    const root = this.verdicts.get("0");
    if (root === "UNKNOWN") {
      this.cursor = "0";
      return;
    }
    if (root === "CORRECT") {
      this.concluded = true;
      this.cursor = null;
      this.outcome = { kind: "no_blame" };
      return;
    }
    // Conclude on the first incorrect node whose premises are all correct.
    for (const id of this.preorder) {
      if (this.verdicts.get(id) !== "INCORRECT") continue;
      const kids = this.nodes.get(id)!.children;
      if (kids.every((k) => this.verdicts.get(k) === "CORRECT")) {
        this.concluded = true;
        this.cursor = null;
        this.outcome = this.blame(id);
        return;
      }
    }
    // Otherwise query the first unknown child of the shallowest incorrect node.
    const open = this.preorder.filter((id) => {
      if (this.verdicts.get(id) !== "INCORRECT") return false;
      return this.nodes.get(id)!.children.some((k) => this.verdicts.get(k) === "UNKNOWN");
    });
    if (open.length === 0) throw new Error("diagnosis cursor rule reached an impossible state");
    const depth = (id: string): number => id.split(".").length;
    let shallowest = open[0];
    for (const id of open) {
      if (depth(id) < depth(shallowest)) shallowest = id;
    }
    this.cursor = this.nodes.get(shallowest)!.children.find(
      (k) => this.verdicts.get(k) === "UNKNOWN",
    )!;
  }

  private blame(id: string): Outcome {
    const node = this.nodeAt(id);
    if (node.ruleKind === "LOCAL") {
      const op = this.bundle.operators.local[node.origin];
      return { kind: "constraint", constraint: op?.constraint, node: id, origin: node.origin };
    }
    if (node.ruleKind === "RESTRICTION") {
      return { kind: "restriction", choice: node.origin, node: id };
    }
    return { kind: "labeling", node: id };
  }

  /** Path from the root to the blamed node, for highlighting. */
  blamePath(): string[] {
    if (!this.outcome?.node) return [];
    const path: string[] = [];
    let id: string | null = this.outcome.node;
    while (id !== null) {
      path.unshift(id);
      id = this.nodes.get(id)!.parent;
    }
    return path;
  }

  transcript(): string {
    if (!this.concluded) throw new Error("only concluded sessions have a transcript");
    const element = this.root.judgment;
    return canonicalJson({
      answers: this.answers.map((a) => ({ node: a.node, verdict: a.verdict })),
      element: { value: element.value, var: element.var },
      outcome: this.outcome,
    });
  }
}

/** Canonical JSON: sorted keys, compact separators; matches the engine's export. */
export function canonicalJson(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return `[${value.map(canonicalJson).join(",")}]`;
  }
  const record = value as Record<string, unknown>;
  const body = Object.keys(record)
    .filter((k) => record[k] !== undefined)
    .sort()
    .map((k) => `${JSON.stringify(k)}:${canonicalJson(record[k])}`)
    .join(",");
  return `{${body}}`;
}
