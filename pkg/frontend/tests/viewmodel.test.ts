import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import type { DtpDoc, SessionDoc, ContourDoc } from "../src/types.js";
import {
  VIRTUALIZE_THRESHOLD,
  buildContourView,
  buildPathwayView,
  buildSessionView,
  widePaths,
  widePathsCsv,
} from "../src/viewmodel.js";

function fixture<T>(name: string): T {
  return JSON.parse(
    readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf-8"),
  ) as T;
}

const crmSession = fixture<SessionDoc>("crm_session.json");
const efftoxSession = fixture<SessionDoc>("efftox_session.json");
const crmDtp = fixture<DtpDoc>("crm_dtp.json");
const efftoxDtp = fixture<DtpDoc>("efftox_dtp.json");
const contour = fixture<ContourDoc>("efftox_contour.json");

describe("session replay", () => {
  it("replayed five-patient CRM trial recommends dose 4", () => {
    const view = buildSessionView(crmSession);
    expect(view.banner).toEqual({ kind: "dose", dose: 4 });
    expect(view.design).toBe("crm");
    expect(view.cohortChips).toEqual(["3N 5N 5T 3N 4N"]);
    expect(view.columns).toEqual([
      "Dose", "Skeleton", "N", "Tox", "ProbTox", "MedianProbTox", "ProbMTD",
    ]);
    expect(view.doseRows).toHaveLength(5);
    expect(view.entryEnabled).toBe(true);
  });

  it("replayed six-patient EffTox trial recommends dose 3", () => {
    const view = buildSessionView(efftoxSession);
    expect(view.banner).toEqual({ kind: "dose", dose: 3 });
    expect(view.columns).toContain("Utility");
    expect(view.doseRows[2][view.columns.indexOf("Acceptable")]).toBe(true);
    expect(view.doseRows[4][view.columns.indexOf("Acceptable")]).toBe(false);
  });

  it("a stopped session disables outcome entry", () => {
    const stopped: SessionDoc = {
      ...crmSession,
      latest: { fit: crmSession.latest!.fit, recommendation: null },
    };
    const view = buildSessionView(stopped);
    expect(view.banner.kind).toBe("stop");
    expect(view.entryEnabled).toBe(false);
  });

  it("a fresh session renders without a fit", () => {
    const view = buildSessionView({ ...crmSession, latest: null, outcome_history: [] });
    expect(view.banner.kind).toBe("none");
    expect(view.doseRows).toHaveLength(0);
  });
});

describe("pathway explorer", () => {
  it("renders the 21-node two-cohort tree with the TTT,TTT leaf stopped", () => {
    const view = buildPathwayView(crmDtp);
    expect(view.nodeCount).toBe(21);
    expect(view.leafCount).toBe(16);
    expect(view.virtualized).toBe(false);
    const root = view.root!;
    expect(root.children).toHaveLength(4);
    const ttt = root.children.find((c) => c.edgeLabel === "TTT")!;
    const tttTtt = ttt.children.find((c) => c.edgeLabel === "TTT")!;
    expect(tttTtt.isStop).toBe(true);
    expect(tttTtt.label).toBe("Stop");
    expect(tttTtt.color).toBe("red");
    const stops = view.root
      ? [root, ...root.children, ...root.children.flatMap((c) => c.children)].filter((n) => n.isStop)
      : [];
    expect(stops).toHaveLength(1);
  });

  it("node and edge counts equal the service long format", () => {
    const view = buildPathwayView(crmDtp);
    expect(view.nodeCount).toBe(crmDtp.nodes.length);
    expect(crmDtp.edges.length).toBe(crmDtp.nodes.length - 1);
  });

  it("exposes the 20 EffTox children with service-computed deltas", () => {
    const view = buildPathwayView(efftoxDtp);
    expect(view.root!.children).toHaveLength(20);
    const enn = view.root!.children.find((c) => c.edgeLabel === "ENN")!;
    const ennNode = efftoxDtp.nodes.find((n) => n.outcomes === "ENN" && n.depth === 1)!;
    const probs = ennNode.fit_summary.prob_obd!;
    const modal = probs.indexOf(Math.max(...probs));
    expect(enn.deltaModal).toBe(ennNode.prob_obd_delta![modal]);
    expect(enn.summaryColumns).toEqual(["Dose", "ProbEff", "ProbTox", "Utility", "ProbOBD"]);
  });

  it("wide table has one row per leaf, canonical order, stop as empty dose", () => {
    const rows = widePaths(crmDtp);
    expect(rows).toHaveLength(16);
    expect(rows[0].outcomes1).toBe("NNN");
    expect(rows[0].outcomes2).toBe("NNN");
    const last = rows[rows.length - 1];
    expect(last.outcomes1).toBe("TTT");
    expect(last.outcomes2).toBe("TTT");
    expect(last.next_dose2).toBeNull();
    const csv = widePathsCsv(crmDtp);
    expect(csv.split("\n")).toHaveLength(17);
    expect(csv.split("\n")[0]).toBe(
      "outcomes0,next_dose0,outcomes1,next_dose1,outcomes2,next_dose2",
    );
  });

  it("virtualizes large trees", () => {
    const big: DtpDoc = {
      design: "crm",
      cohort_sizes: [1],
      nodes: Array.from({ length: VIRTUALIZE_THRESHOLD + 1 }, (_, i) => ({
        node: i + 1,
        parent: i === 0 ? null : 1,
        depth: i === 0 ? 0 : 1,
        outcomes: i === 0 ? "" : "N",
        dose_given: i === 0 ? null : 1,
        next_dose: 1,
        color: "slategrey",
        fit_summary: {
          dose_levels: [1], recommended_dose: 1, entropy: 0,
          prob_tox: [0.1], median_prob_tox: [0.1], prob_mtd: [1.0],
        },
      })),
      edges: [],
    };
    expect(buildPathwayView(big).virtualized).toBe(true);
  });
});

describe("contour panel", () => {
  it("passes the utility grid and dose points through unchanged", () => {
    const view = buildContourView(contour);
    expect(view.gridEff).toHaveLength(41);
    expect(view.utility).toHaveLength(41);
    expect(view.dosePoints).toHaveLength(5);
    expect(view.dosePoints[2].probEff).toBe(contour.dose_points[2].prob_eff);
  });

  it("neutral contour passes near the hinge points", () => {
    // u at grid cell nearest (0.7, 0.25) should be close to zero
    const i = contour.prob_eff.findIndex((v) => Math.abs(v - 0.7) < 0.013);
    const j = contour.prob_tox.findIndex((v) => Math.abs(v - 0.25) < 0.013);
    expect(Math.abs(contour.utility[i][j])).toBeLessThan(0.06);
  });
});
