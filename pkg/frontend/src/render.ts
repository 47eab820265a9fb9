// DOM rendering. Values come straight from view models; numbers are rounded
// for display only at this layer.

import type { ContourView, PathwayNodeView, PathwayView, SessionView } from "./viewmodel.js";

export function fmt(value: number | boolean | string | null): string {
  if (value === null) return "";
  if (typeof value === "boolean") return value ? "TRUE" : "FALSE";
  if (typeof value === "number") {
    if (Number.isInteger(value)) return String(value);
    return value.toFixed(4);
  }
  return value;
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: Array<Node | string> = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "class") node.className = v;
    else node.setAttribute(k, v);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function renderTable(columns: string[], rows: Array<Array<number | boolean | string | null>>): HTMLTableElement {
  const table = el("table", { class: "data-table" });
  const thead = el("thead");
  thead.append(el("tr", {}, columns.map((c) => el("th", {}, [c]))));
  table.append(thead);
  const tbody = el("tbody");
  for (const row of rows) {
    tbody.append(el("tr", {}, row.map((v) => el("td", {}, [fmt(v)]))));
  }
  table.append(tbody);
  return table;
}

export function renderSession(view: SessionView): HTMLElement {
  const container = el("div", { class: "session-view" });

  const chips = el("div", { class: "chips" },
    view.cohortChips.map((c) => el("span", { class: "chip" }, [c])));
  container.append(el("h3", {}, ["Outcome history"]), chips);

  const banner = el("div", {
    class: view.banner.kind === "stop" ? "banner banner-stop" : "banner banner-dose",
  });
  if (view.banner.kind === "stop") {
    banner.textContent = "STOP — no dose is recommended";
  } else if (view.banner.kind === "dose") {
    banner.textContent = `Next recommended dose-level: ${view.banner.dose}`;
  } else {
    banner.textContent = "No fit yet — record the first cohort";
  }
  container.append(banner);

  if (view.doseRows.length > 0) {
    container.append(el("h3", {}, ["Dose summary"]),
                     renderTable(view.columns, view.doseRows));
  }
  if (view.entropy !== null) {
    container.append(el("p", { class: "entropy" }, [`Model entropy: ${fmt(view.entropy)}`]));
  }
  container.append(el("p", { class: "meta" }, [`seed ${view.seed} · revision ${view.revision}`]));
  return container;
}

export function renderPathways(
  view: PathwayView,
  onSelect: (node: PathwayNodeView) => void,
): HTMLElement {
  const container = el("div", { class: "pathway-view" });
  container.append(
    el("p", { class: "meta" }, [
      `${view.nodeCount} nodes, ${view.leafCount} leaves` +
      (view.virtualized ? " (large tree: branches start collapsed)" : ""),
    ]),
  );
  if (view.root) {
    container.append(renderNode(view.root, onSelect, view.virtualized));
  }
  return container;
}

function renderNode(
  node: PathwayNodeView,
  onSelect: (node: PathwayNodeView) => void,
  collapsed: boolean,
): HTMLElement {
  const item = el("div", { class: "tree-node" });
  const row = el("div", { class: "tree-row" });
  const toggle = el("button", { class: "toggle" }, [node.children.length ? (collapsed ? "+" : "−") : "·"]);
  const badge = el("span", {
    class: node.isStop ? "dose-badge stop" : "dose-badge",
    style: `background:${cssColor(node.color)}`,
    "data-node-id": String(node.id),
  }, [node.label]);
  const edge = el("span", { class: "edge-label" }, [node.edgeLabel || "(start)"]);
  row.append(toggle, edge, badge);
  if (node.deltaModal !== null) {
    row.append(el("span", { class: "delta" }, [`Δ ${fmt(node.deltaModal)}`]));
  }
  badge.addEventListener("click", () => onSelect(node));
  item.append(row);

  if (node.children.length > 0) {
    const kids = el("div", { class: "tree-children" });
    kids.hidden = collapsed;
    for (const child of node.children) {
      kids.append(renderNode(child, onSelect, collapsed));
    }
    toggle.addEventListener("click", () => {
      kids.hidden = !kids.hidden;
      toggle.textContent = kids.hidden ? "+" : "−";
    });
    item.append(kids);
  }
  return item;
}

// The palette uses R color names; map the non-CSS ones.
const R_COLORS: Record<string, string> = {
  slategrey: "#708090",
  skyblue1: "#87ceff",
  royalblue1: "#4876ff",
  orchid4: "#8b4789",
  royalblue4: "#27408b",
  red: "#d9341c",
  gray70: "#b3b3b3",
};

export function cssColor(name: string): string {
  return R_COLORS[name] ?? name;
}

export function renderContour(view: ContourView, canvas: HTMLCanvasElement, readout: HTMLElement): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const w = canvas.width;
  const h = canvas.height;
  const ne = view.gridEff.length;
  const nt = view.gridTox.length;
  const img = ctx.createImageData(w, h);
  let min = Infinity;
  let max = -Infinity;
  for (const row of view.utility) {
    for (const u of row) {
      if (isFinite(u)) {
        if (u < min) min = u;
        if (u > max) max = u;
      }
    }
  }
  for (let px = 0; px < w; px++) {
    for (let py = 0; py < h; py++) {
      const i = Math.min(ne - 1, Math.floor((px / w) * ne));
      const j = Math.min(nt - 1, Math.floor(((h - 1 - py) / h) * nt));
      const u = view.utility[i][j];
      const t = isFinite(u) ? (u - min) / (max - min) : 0;
      const idx = 4 * (py * w + px);
      img.data[idx] = Math.round(40 + 200 * t);
      img.data[idx + 1] = Math.round(60 + 150 * t);
      img.data[idx + 2] = Math.round(150 - 60 * t);
      img.data[idx + 3] = 255;
    }
  }
  ctx.putImageData(img, 0, 0);

  // neutral-utility contour (u = 0) and dose points
  ctx.strokeStyle = "#ffffff";
  ctx.lineWidth = 1.5;
  for (let i = 0; i < ne - 1; i++) {
    for (let j = 0; j < nt - 1; j++) {
      const u = view.utility[i][j];
      const right = view.utility[i + 1][j];
      const up = view.utility[i][j + 1];
      if ((u <= 0 && right > 0) || (u > 0 && right <= 0) || (u <= 0 && up > 0) || (u > 0 && up <= 0)) {
        const px = (i / (ne - 1)) * w;
        const py = h - (j / (nt - 1)) * h;
        ctx.strokeRect(px, py, 1, 1);
      }
    }
  }
  ctx.font = "12px sans-serif";
  for (const point of view.dosePoints) {
    const px = point.probEff * (w - 1);
    const py = h - 1 - point.probTox * (h - 1);
    ctx.fillStyle = "#ffffff";
    ctx.beginPath();
    ctx.arc(px, py, 5, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#111111";
    ctx.fillText(String(point.dose), px + 7, py + 4);
  }

  canvas.onmousemove = (ev) => {
    const rect = canvas.getBoundingClientRect();
    const x = ((ev.clientX - rect.left) / rect.width) * w;
    const y = ((ev.clientY - rect.top) / rect.height) * h;
    let best: (typeof view.dosePoints)[number] | null = null;
    let bestDist = 144;
    for (const p of view.dosePoints) {
      const px = p.probEff * (w - 1);
      const py = h - 1 - p.probTox * (h - 1);
      const d = (px - x) ** 2 + (py - y) ** 2;
      if (d < bestDist) {
        best = p;
        bestDist = d;
      }
    }
    readout.textContent = best
      ? `dose ${best.dose}: ProbEff ${fmt(best.probEff)}, ProbTox ${fmt(best.probTox)}, utility ${fmt(best.utility)}`
      : "";
  };
}
