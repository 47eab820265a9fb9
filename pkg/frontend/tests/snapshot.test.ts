// No client-computed numbers: every numeric value in a view model must appear
// verbatim somewhere in the service response it was built from.

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import type { DtpDoc, SessionDoc, ContourDoc } from "../src/types.js";
import {
  buildContourView,
  buildPathwayView,
  buildSessionView,
  widePaths,
} from "../src/viewmodel.js";

function fixture<T>(name: string): T {
  return JSON.parse(
    readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf-8"),
  ) as T;
}

function collectNumbers(obj: unknown, into: Set<number>): Set<number> {
  if (typeof obj === "number") {
    into.add(obj);
  } else if (Array.isArray(obj)) {
    for (const v of obj) collectNumbers(v, into);
  } else if (obj !== null && typeof obj === "object") {
    for (const v of Object.values(obj)) collectNumbers(v, into);
  }
  return into;
}

function assertSubset(view: unknown, response: unknown, allow: Set<number> = new Set()) {
  const responseNumbers = collectNumbers(response, new Set<number>());
  const viewNumbers = collectNumbers(view, new Set<number>());
  const foreign = [...viewNumbers].filter(
    (v) => !responseNumbers.has(v) && !allow.has(v),
  );
  expect(foreign).toEqual([]);
}

describe("snapshot: view models only relay service numbers", () => {
  it("CRM session view", () => {
    const doc = fixture<SessionDoc>("crm_session.json");
    assertSubset(buildSessionView(doc), doc);
  });

  it("EffTox session view", () => {
    const doc = fixture<SessionDoc>("efftox_session.json");
    assertSubset(buildSessionView(doc), doc);
  });

  it("pathway views (tree ids allowed; all statistics relayed)", () => {
    for (const name of ["crm_dtp.json", "efftox_dtp.json"]) {
      const doc = fixture<DtpDoc>(name);
      const ids = new Set<number>(doc.nodes.map((n) => n.node));
      assertSubset(buildPathwayView(doc), doc, ids);
      assertSubset(widePaths(doc), doc);
    }
  });

  it("contour view", () => {
    const doc = fixture<ContourDoc>("efftox_contour.json");
    assertSubset(buildContourView(doc), doc);
  });
});
