// DOM rendering for the three panes. Everything here is a thin projection
// of the view models; no state, no requests.

import type {
    ConclusionPanelView,
    ConclusionRowView,
    CrWindowView,
    ExplanationView,
    GalleryView,
    WhatIfDiffView,
    WorkspaceView,
} from "./models.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    attrs: Record<string, string> = {},
    children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
        node.setAttribute(key, value);
    }
    for (const child of children) {
        node.append(child);
    }
    return node;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
    const node = document.createElementNS(SVG_NS, tag);
    for (const [key, value] of Object.entries(attrs)) {
        node.setAttribute(key, value);
    }
    return node;
}

export function clear(node: HTMLElement | SVGElement): void {
    while (node.firstChild) {
        node.removeChild(node.firstChild);
    }
}

// -- gallery -----------------------------------------------------------------

export function renderGallery(
    svg: SVGSVGElement,
    view: GalleryView,
    onFrame: (id: string) => void,
    onEdge: (a: string, b: string) => void,
): void {
    clear(svg);
    const width = svg.clientWidth || 320;
    const height = svg.clientHeight || 260;
    const pos = new Map(view.nodes.map((n) => [n.id, { x: n.x * width, y: n.y * height }]));
    for (const edge of view.edges) {
        const a = pos.get(edge.a);
        const b = pos.get(edge.b);
        if (!a || !b) continue;
        const line = svgEl("line", {
            x1: String(a.x),
            y1: String(a.y),
            x2: String(b.x),
            y2: String(b.y),
            class: "gallery-edge",
        });
        line.addEventListener("click", () => onEdge(edge.a, edge.b));
        svg.append(line);
    }
    for (const node of view.nodes) {
        const p = pos.get(node.id)!;
        const group = svgEl("g", { class: "gallery-node", transform: `translate(${p.x},${p.y})` });
        group.append(svgEl("circle", { r: "18" }));
        const text = svgEl("text", { y: "32", "text-anchor": "middle" });
        text.textContent = node.id;
        group.append(text);
        group.addEventListener("click", () => onFrame(node.id));
        svg.append(group);
    }
}

export function renderCrWindow(container: HTMLElement, view: CrWindowView): void {
    clear(container);
    const partners = (label: string, side: 0 | 1): string[] =>
        view.lines.filter((pair) => pair[side] === label).map((pair) => pair[1 - side]);
    const column = (title: string, labels: string[], side: 0 | 1): HTMLElement =>
        el("div", { class: "cr-column" }, [
            el("h4", {}, [title]),
            el(
                "ul",
                {},
                labels.map((label) => {
                    const linked = partners(label, side);
                    return el("li", { class: linked.length ? "" : "unlinked" }, [
                        label,
                        linked.length
                            ? el("span", { class: "cr-partners" }, [
                                  " ↔ " + linked.join(", "),
                              ])
                            : "",
                    ]);
                }),
            ),
        ]);
    container.append(
        el("h3", {}, [`${view.frameA} ↔ ${view.frameB}`]),
        el("div", { class: "cr-columns" }, [
            column(view.frameA, view.left, 0),
            column(view.frameB, view.right, 1),
        ]),
        el("p", { class: "cr-meta" }, [`${view.lines.length} compatible pairs`]),
    );
}

// -- workspace ---------------------------------------------------------------

const COLUMN_WIDTH = 150;
const ROW_HEIGHT = 64;

export function renderWorkspace(
    svg: SVGSVGElement,
    view: WorkspaceView,
    selected: Set<string>,
    onNode: (id: string) => void,
): void {
    clear(svg);
    const place = new Map(
        view.nodes.map((n) => [
            n.id,
            { x: 70 + n.column * COLUMN_WIDTH, y: 40 + n.row * ROW_HEIGHT },
        ]),
    );
    const maxX = Math.max(140, ...[...place.values()].map((p) => p.x + 80));
    const maxY = Math.max(120, ...[...place.values()].map((p) => p.y + 50));
    svg.setAttribute("viewBox", `0 0 ${maxX} ${maxY}`);
    for (const link of view.links) {
        const a = place.get(link.from);
        const b = place.get(link.to);
        if (!a || !b) continue;
        svg.append(
            svgEl("line", {
                x1: String(a.x),
                y1: String(a.y),
                x2: String(b.x),
                y2: String(b.y),
                class: link.highlighted ? "lineage-link influential" : "lineage-link",
            }),
        );
    }
    for (const node of view.nodes) {
        const p = place.get(node.id)!;
        const classes = ["boe-node", `op-${node.opKind}`];
        if (selected.has(node.id)) classes.push("selected");
        if (node.highlighted) classes.push("influential");
        if (node.disabled) classes.push("disabled");
        const group = svgEl("g", {
            class: classes.join(" "),
            transform: `translate(${p.x},${p.y})`,
        });
        group.append(svgEl("rect", { x: "-58", y: "-20", width: "116", height: "40", rx: "6" }));
        const title = svgEl("text", { y: "-4", "text-anchor": "middle", class: "node-title" });
        title.textContent = `${node.id} ${node.label}`.slice(0, 18);
        const sub = svgEl("text", { y: "12", "text-anchor": "middle", class: "node-sub" });
        sub.textContent = `${node.frame} · ${node.badge}`.slice(0, 22);
        group.append(title, sub);
        if (node.inconclusive) {
            const warn = svgEl("text", { x: "50", y: "-10", class: "node-warn" });
            warn.textContent = "?";
            group.append(warn);
        }
        group.addEventListener("click", () => onNode(node.id));
        svg.append(group);
    }
}

// -- conclusions -------------------------------------------------------------

function barFor(row: ConclusionRowView): HTMLElement {
    const bar = el("div", { class: "bar" });
    for (const segment of row.segments) {
        const width = Math.max(0, Math.min(1, segment.fraction)) * 100;
        const piece = el("div", {
            class: `bar-${segment.kind}`,
            style: `width:${width}%`,
            title: `${segment.kind}: ${segment.text}`,
        });
        bar.append(piece);
    }
    return bar;
}

function conclusionRow(row: ConclusionRowView): HTMLElement {
    return el("div", { class: "conclusion-row" }, [
        el("div", { class: "statement" }, [row.statementText]),
        barFor(row),
        el("div", { class: "numbers" }, [
            el("span", { class: "value support", title: "supporting" }, [row.supportText]),
            el("span", { class: "value uncertainty", title: "uncommitted" }, [
                row.uncertaintyText,
            ]),
            el("span", { class: "value against", title: "contradicting" }, [row.againstText]),
        ]),
    ]);
}

export function renderConclusion(container: HTMLElement, view: ConclusionPanelView): void {
    clear(container);
    container.append(el("h3", {}, [`Conclusion ${view.boeId}`]));
    for (const row of view.rows) {
        container.append(conclusionRow(row));
    }
    if (view.hasUnknown) {
        const bar = el("div", { class: "bar" }, [
            el("div", {
                class: "bar-unknown",
                style: `width:${Math.min(1, view.unknownFraction) * 100}%`,
                title: `unknown: ${view.unknownText}`,
            }),
        ]);
        container.append(
            el("div", { class: "conclusion-row unknown-row" }, [
                el("div", { class: "statement" }, ["unknown (truth may be outside the frame)"]),
                bar,
                el("div", { class: "numbers" }, [
                    el("span", { class: "value unknown" }, [view.unknownText]),
                ]),
            ]),
        );
    }
    if (view.hasConflict) {
        container.append(el("p", { class: "conflict-note" }, [`conflict K = ${view.conflictText}`]));
    }
}

export function renderWhatIfDiff(container: HTMLElement, view: WhatIfDiffView): void {
    clear(container);
    const table = el("table", { class: "diff-table" });
    table.append(
        el("tr", {}, [
            el("th", {}, ["statement"]),
            el("th", {}, ["original (support / uncertain / against)"]),
            el("th", {}, ["what-if"]),
        ]),
    );
    const cell = (row: ConclusionRowView | null): HTMLElement =>
        row
            ? el("td", {}, [
                  barFor(row),
                  el("div", { class: "numbers" }, [
                      `${row.supportText} / ${row.uncertaintyText} / ${row.againstText}`,
                  ]),
              ])
            : el("td", { class: "missing" }, ["—"]);
    for (const row of view.rows) {
        const tr = el("tr", { class: row.changed ? "changed" : "" }, [
            el("td", {}, [row.statementText]),
            cell(row.before),
            cell(row.after),
        ]);
        table.append(tr);
    }
    container.append(el("h3", {}, ["What-if comparison"]), table);
    if (view.beforeUnknown !== "0" || view.afterUnknown !== "0") {
        container.append(
            el("p", {}, [`unknown: ${view.beforeUnknown} → ${view.afterUnknown}`]),
        );
    }
}

// -- explanation ---------------------------------------------------------------

export function renderExplanation(container: HTMLElement, view: ExplanationView): void {
    clear(container);
    container.append(el("h3", {}, ["Why this conclusion"]));
    const list = el("ol", { class: "influence-list" });
    for (const entry of view.entries) {
        const classes = entry.most ? "most" : entry.least ? "least" : "";
        list.append(
            el("li", { class: classes }, [
                el("span", { class: "influence-source" }, [`${entry.source} (${entry.boeId})`]),
                el("span", { class: "influence-values" }, [
                    `${entry.influenceText} bits · share ${entry.shareText}`,
                ]),
            ]),
        );
    }
    container.append(list, el("p", { class: "explanation-text" }, [view.text]));
    if (view.approximate) {
        container.append(el("p", { class: "approx-note" }, ["(restricted-lattice approximation)"]));
    }
}
