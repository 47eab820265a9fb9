// View models: plain structures the renderer draws from. Every numeric value
// here is copied verbatim from a service response; the console computes no
// statistics of its own (pinned by the snapshot test).

import type {
  ContourDoc,
  CrmDoseRow,
  DtpDoc,
  DtpNode,
  EffToxDoseRow,
  SessionDoc,
} from "./types.js";

export interface Banner {
  kind: "dose" | "stop" | "none";
  dose: number | null;
}

export interface SessionView {
  sessionId: string;
  design: "crm" | "efftox";
  revision: number;
  cohortChips: string[];
  columns: string[];
  doseRows: Array<Array<number | boolean>>;
  banner: Banner;
  entropy: number | null;
  seed: number;
  entryEnabled: boolean;
}

const CRM_COLUMNS = ["Dose", "Skeleton", "N", "Tox", "ProbTox", "MedianProbTox", "ProbMTD"];
const EFFTOX_COLUMNS = [
  "Dose", "N", "ProbEff", "ProbTox", "ProbAccEff", "ProbAccTox",
  "Utility", "Acceptable", "ProbOBD",
];

export function buildSessionView(doc: SessionDoc): SessionView {
  const columns = doc.design === "crm" ? CRM_COLUMNS : EFFTOX_COLUMNS;
  const latest = doc.latest;
  const doseRows: Array<Array<number | boolean>> = [];
  let banner: Banner = { kind: "none", dose: null };
  let entropy: number | null = null;
  if (latest) {
    for (const row of latest.fit.doses) {
      doseRows.push(columns.map((c) => (row as unknown as Record<string, number | boolean>)[c]));
    }
    banner =
      latest.recommendation === null
        ? { kind: "stop", dose: null }
        : { kind: "dose", dose: latest.recommendation };
    entropy = latest.fit.entropy;
  }
  return {
    sessionId: doc.session_id,
    design: doc.design,
    revision: doc.revision,
    cohortChips: [...doc.outcome_history],
    columns,
    doseRows,
    banner,
    entropy,
    seed: doc.seed,
    entryEnabled: banner.kind !== "stop",
  };
}

export interface PathwayNodeView {
  id: number;
  parent: number | null;
  depth: number;
  label: string;          // next dose or "Stop"
  edgeLabel: string;      // cohort outcomes leading here
  color: string;
  isStop: boolean;
  summaryColumns: string[];
  summaryRows: number[][];
  deltaModal: number | null; // service-computed change in the modal dose's probability
  children: PathwayNodeView[];
}

export interface PathwayView {
  design: "crm" | "efftox";
  nodeCount: number;
  leafCount: number;
  root: PathwayNodeView | null;
  virtualized: boolean;  // beyond this many nodes the tree starts collapsed
}

export const VIRTUALIZE_THRESHOLD = 100;

function summaryTable(node: DtpNode): { columns: string[]; rows: number[][] } {
  const s = node.fit_summary;
  if (s.prob_eff && s.prob_tox && s.utility && s.prob_obd) {
    const columns = ["Dose", "ProbEff", "ProbTox", "Utility", "ProbOBD"];
    const rows = s.dose_levels.map((d, i) => [
      d, s.prob_eff![i], s.prob_tox![i], s.utility![i], s.prob_obd![i],
    ]);
    return { columns, rows };
  }
  const columns = ["Dose", "ProbTox", "ProbMTD"];
  const rows = s.dose_levels.map((d, i) => [d, s.prob_tox![i], s.prob_mtd![i]]);
  return { columns, rows };
}

export function buildPathwayView(doc: DtpDoc): PathwayView {
  const byId = new Map<number, PathwayNodeView>();
  for (const node of doc.nodes) {
    const { columns, rows } = summaryTable(node);
    const delta = node.prob_obd_delta ?? node.prob_mtd_delta ?? null;
    const probs = node.fit_summary.prob_obd ?? node.fit_summary.prob_mtd ?? null;
    let deltaModal: number | null = null;
    if (delta && probs) {
      let modal = 0;
      for (let i = 1; i < probs.length; i++) if (probs[i] > probs[modal]) modal = i;
      deltaModal = delta[modal];
    }
    byId.set(node.node, {
      id: node.node,
      parent: node.parent,
      depth: node.depth,
      label: node.next_dose === null ? "Stop" : String(node.next_dose),
      edgeLabel: node.outcomes,
      color: node.color,
      isStop: node.next_dose === null,
      summaryColumns: columns,
      summaryRows: rows,
      deltaModal,
      children: [],
    });
  }
  let root: PathwayNodeView | null = null;
  for (const node of byId.values()) {
    if (node.parent === null) {
      root = node;
    } else {
      byId.get(node.parent)?.children.push(node);
    }
  }
  const leafCount = [...byId.values()].filter((n) => n.children.length === 0).length;
  return {
    design: doc.design,
    nodeCount: byId.size,
    leafCount,
    root,
    virtualized: byId.size > VIRTUALIZE_THRESHOLD,
  };
}

// Wide-format rows for the CSV download: outcomes0/next_dose0 ... per depth.
export function widePaths(doc: DtpDoc): Array<Record<string, string | number | null>> {
  const byId = new Map(doc.nodes.map((n) => [n.node, n]));
  const parents = new Set(doc.nodes.map((n) => n.parent).filter((p) => p !== null));
  const leaves = doc.nodes.filter((n) => !parents.has(n.node));
  const depthMax = doc.cohort_sizes.length;
  const rows: Array<{ key: number[]; row: Record<string, string | number | null> }> = [];
  for (const leaf of leaves) {
    const chain: DtpNode[] = [];
    let cur: DtpNode | undefined = leaf;
    while (cur) {
      chain.unshift(cur);
      cur = cur.parent === null ? undefined : byId.get(cur.parent);
    }
    const row: Record<string, string | number | null> = {};
    for (let d = 0; d <= depthMax; d++) {
      row[`outcomes${d}`] = d < chain.length ? chain[d].outcomes : null;
      row[`next_dose${d}`] = d < chain.length ? chain[d].next_dose : null;
    }
    rows.push({ key: chain.map((n) => n.node), row });
  }
  rows.sort((a, b) => {
    for (let i = 0; i < Math.max(a.key.length, b.key.length); i++) {
      const x = a.key[i] ?? -1;
      const y = b.key[i] ?? -1;
      if (x !== y) return x - y;
    }
    return 0;
  });
  return rows.map((r) => r.row);
}

export function widePathsCsv(doc: DtpDoc): string {
  const rows = widePaths(doc);
  if (rows.length === 0) return "";
  const columns = Object.keys(rows[0]);
  const lines = [columns.join(",")];
  for (const row of rows) {
    lines.push(columns.map((c) => (row[c] === null ? "" : String(row[c]))).join(","));
  }
  return lines.join("\n");
}

export interface ContourView {
  gridEff: number[];
  gridTox: number[];
  utility: number[][];
  dosePoints: Array<{ dose: number; probEff: number; probTox: number; utility: number }>;
}

export function buildContourView(doc: ContourDoc): ContourView {
  return {
    gridEff: doc.prob_eff,
    gridTox: doc.prob_tox,
    utility: doc.utility,
    dosePoints: doc.dose_points.map((p) => ({
      dose: p.dose_level,
      probEff: p.prob_eff,
      probTox: p.prob_tox,
      utility: p.utility,
    })),
  };
}
