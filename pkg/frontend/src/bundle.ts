/**
 * Bundle loading: parse an exported solve, re-check referential integrity,
 * and build the indexes the panels need. Pure data, no DOM.
 */

export const SUPPORTED_VERSION = 1;

export type RuleKind = "LOCAL" | "RESTRICTION" | "LABELING";
export type LeafStatus = "SOLUTION" | "FAILURE" | "EXHAUSTED";

export interface ElementRef {
  var: string;
  value: number;
}

export interface Judgment {
  context: string[];
  var: string;
  value: number;
}

export interface ProofTreeNode {
  judgment: Judgment;
  ruleKind: RuleKind;
  origin: string;
  children: ProofTreeNode[];
}

export interface LogEntry {
  step: number;
  element: ElementRef;
  origin: string;
  antecedents: ElementRef[];
}

export interface TreeNode {
  id: string;
  parent: string | null;
  depth: number;
  arriving: string;
  status: LeafStatus | null;
  partition: { var: string; cells: number[][] } | null;
  env: Record<string, number[]>;
  restrictedEnv: Record<string, number[]>;
  facts: LogEntry[];
  closure: LogEntry[] | null;
}

export interface LocalOperatorInfo {
  constraint: string;
  out: string;
  reads: string[];
}

export interface RestrictionOperatorInfo {
  var: string;
  kept: number[];
}

export interface ConstraintInfo {
  id: string;
  kind: string;
  scope: string[];
  offset?: number;
  tuples?: number[][];
}

export interface Bundle {
  version: number;
  csp: {
    variables: { name: string; values: number[] }[];
    constraints: ConstraintInfo[];
    label: { var: string; strategy: string }[];
  };
  operators: {
    local: Record<string, LocalOperatorInfo>;
    restriction: Record<string, RestrictionOperatorInfo>;
  };
  tree: TreeNode[];
  solutions: Record<string, number>[];
  proofTrees: ProofTreeNode[];
  transcript?: unknown;
}

export interface LoadedBundle {
  bundle: Bundle;
  /** leaf branches in depth-first order */
  branches: TreeNode[];
  /** "var=value" -> maximal proof tree */
  treesByElement: Map<string, ProofTreeNode>;
  /** branch id -> full removal log (facts then closure) */
  logsByBranch: Map<string, LogEntry[]>;
  nodesById: Map<string, TreeNode>;
}

export function elementKey(el: { var: string; value: number }): string {
  return `${el.var}=${el.value}`;
}

export function constraintText(c: ConstraintInfo): string {
  if (c.kind === "table") {
    const cells = (c.tuples ?? []).map((t) => `(${t.join(",")})`).join(" ");
    return `table(${c.scope.join(",")}) { ${cells} }`;
  }
  const [x, y] = c.scope;
  const rhs = c.offset ? `${y} + ${c.offset}` : y;
  return `${x} ${c.kind} ${rhs}`;
}

class BundleError extends Error {}

function fail(message: string): never {
  throw new BundleError(message);
}

function validate(bundle: Bundle): void {
  if (bundle.version !== SUPPORTED_VERSION) {
    fail(`unsupported bundle version ${JSON.stringify(bundle.version)} (viewer supports ${SUPPORTED_VERSION})`);
  }
  const knownOps = new Set([
    ...Object.keys(bundle.operators?.local ?? {}),
    ...Object.keys(bundle.operators?.restriction ?? {}),
  ]);
  const constraintIds = new Set((bundle.csp?.constraints ?? []).map((c) => c.id));
  for (const [opId, op] of Object.entries(bundle.operators?.local ?? {})) {
    if (!constraintIds.has(op.constraint)) {
      fail(`operator ${opId} references unknown constraint ${op.constraint}`);
    }
  }
  const nodeIds = new Set((bundle.tree ?? []).map((n) => n.id));
  for (const node of bundle.tree ?? []) {
    if (node.parent !== null && !nodeIds.has(node.parent)) {
      fail(`node ${node.id} has an unknown parent ${node.parent}`);
    }
    for (const entry of [...node.facts, ...(node.closure ?? [])]) {
      if (!knownOps.has(entry.origin)) {
        fail(`log entry references unknown operator ${entry.origin}`);
      }
    }
  }
  const checkTree = (pt: ProofTreeNode): void => {
    if (pt.ruleKind !== "LABELING" && !knownOps.has(pt.origin)) {
      fail(`proof tree references unknown operator ${pt.origin}`);
    }
    for (const branch of pt.judgment.context) {
      if (!nodeIds.has(branch)) {
        fail(`proof tree context references unknown branch ${branch}`);
      }
    }
    pt.children.forEach(checkTree);
  };
  (bundle.proofTrees ?? []).forEach(checkTree);
}

export function parseBundle(text: string): Bundle {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    fail(`not a bundle: ${(err as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    fail("not a bundle: top level must be an object");
  }
  const bundle = raw as Bundle;
  validate(bundle);
  return bundle;
}

export type LoadResult =
  | { ok: true; loaded: LoadedBundle }
  | { ok: false; error: string };

export function loadBundle(text: string): LoadResult {
  try {
    const bundle = parseBundle(text);
    const nodesById = new Map(bundle.tree.map((n) => [n.id, n]));
    const branches = bundle.tree.filter((n) => n.status !== null);
    const treesByElement = new Map(
      bundle.proofTrees.map((pt) => [elementKey(pt.judgment), pt]),
    );
    const logsByBranch = new Map<string, LogEntry[]>();
    for (const leaf of branches) {
      const log: LogEntry[] = [];
      let node: TreeNode | undefined = leaf;
      const path: TreeNode[] = [];
      while (node) {
        path.unshift(node);
        node = node.parent === null ? undefined : nodesById.get(node.parent);
      }
      for (const step of path) {
        log.push(...step.facts, ...(step.closure ?? []));
      }
      logsByBranch.set(leaf.id, log);
    }
    return { ok: true, loaded: { bundle, branches, treesByElement, logsByBranch, nodesById } };
  } catch (err) {
    return { ok: false, error: (err as Error).message };
  }
}
