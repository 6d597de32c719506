// Pure view-model layer: everything the panes display is derived here
// from API payloads, with no DOM access and no arithmetic on the evidence
// itself. Numbers shown to the operator are the API's full-precision
// strings, verbatim; parsing happens only to size bars and sort rows.

import type {
    ConclusionReport,
    ExplanationReport,
    FrameInfo,
    NodeInfo,
    RelationInfo,
} from "./api.js";

// ---------------------------------------------------------------------------
// evidence entry form

export interface FormRowInput {
    labels: string[];
    massText: string;
}

export interface FormState {
    total: number;
    remainderToTheta: number;
    blocked: boolean;
    problems: string[];
}

/** Validate the mass-entry rows. Submission is blocked whenever the
 * entered masses exceed 1; anything left over is shown as mass that will
 * go to the whole frame (uncommitted belief). */
export function evaluateForm(rows: FormRowInput[]): FormState {
    const problems: string[] = [];
    let total = 0;
    for (const row of rows) {
        const text = row.massText.trim();
        if (text === "" && row.labels.length === 0) {
            continue;
        }
        const mass = Number(text === "" ? "0" : text);
        if (!Number.isFinite(mass)) {
            problems.push(`"${row.massText}" is not a number`);
            continue;
        }
        if (mass < 0) {
            problems.push("masses cannot be negative");
            continue;
        }
        if (mass > 0 && row.labels.length === 0) {
            problems.push("a statement with mass needs at least one proposition");
            continue;
        }
        total += mass;
    }
    if (total > 1 + 1e-12) {
        problems.push(`entered masses sum to ${total.toFixed(4)}, exceeding 1`);
    }
    return {
        total,
        remainderToTheta: Math.max(0, 1 - total),
        blocked: problems.length > 0,
        problems,
    };
}

// ---------------------------------------------------------------------------
// conclusions panel

export interface BarSegment {
    kind: "support" | "uncertainty" | "against";
    /** verbatim API string */
    text: string;
    /** parsed only to size the bar segment */
    fraction: number;
}

export interface ConclusionRowView {
    statementText: string;
    supportText: string;
    uncertaintyText: string;
    againstText: string;
    segments: BarSegment[];
}

export interface ConclusionPanelView {
    boeId: string;
    rows: ConclusionRowView[];
    conflictText: string;
    unknownText: string;
    unknownFraction: number;
    hasUnknown: boolean;
    hasConflict: boolean;
}

export function statementText(labels: string[]): string {
    return "{" + labels.join(", ") + "}";
}

/** Three-segment bar per statement plus a separate "unknown" bar when the
 * unnormalized rule left mass on the empty set. Every *Text field is the
 * API payload string, untouched. */
export function conclusionPanel(report: ConclusionReport): ConclusionPanelView {
    const rows = report.rows.map((row) => ({
        statementText: statementText(row.statement),
        supportText: row.support,
        uncertaintyText: row.uncertainty,
        againstText: row.against,
        segments: [
            { kind: "support" as const, text: row.support, fraction: parseFloat(row.support) },
            {
                kind: "uncertainty" as const,
                text: row.uncertainty,
                fraction: parseFloat(row.uncertainty),
            },
            { kind: "against" as const, text: row.against, fraction: parseFloat(row.against) },
        ],
    }));
    const unknownFraction = parseFloat(report.unknown_mass);
    return {
        boeId: report.boe_id,
        rows,
        conflictText: report.conflict,
        unknownText: report.unknown_mass,
        unknownFraction,
        hasUnknown: unknownFraction > 0,
        hasConflict: parseFloat(report.conflict) > 0,
    };
}

// ---------------------------------------------------------------------------
// what-if diff

export interface DiffRowView {
    statementText: string;
    before: ConclusionRowView | null;
    after: ConclusionRowView | null;
    changed: boolean;
}

export interface WhatIfDiffView {
    rows: DiffRowView[];
    beforeUnknown: string;
    afterUnknown: string;
    anyChange: boolean;
}

/** Pair up the original and recomputed conclusions statement by
 * statement for side-by-side display. A row counts as changed when any
 * of its three payload strings differ (string comparison: the UI never
 * re-derives values). */
export function whatIfDiff(
    before: ConclusionReport,
    after: ConclusionReport,
): WhatIfDiffView {
    const beforeView = conclusionPanel(before);
    const afterView = conclusionPanel(after);
    const byStatement = new Map<string, DiffRowView>();
    for (const row of beforeView.rows) {
        byStatement.set(row.statementText, {
            statementText: row.statementText,
            before: row,
            after: null,
            changed: true,
        });
    }
    for (const row of afterView.rows) {
        const existing = byStatement.get(row.statementText);
        if (existing) {
            existing.after = row;
            existing.changed =
                existing.before!.supportText !== row.supportText ||
                existing.before!.uncertaintyText !== row.uncertaintyText ||
                existing.before!.againstText !== row.againstText;
        } else {
            byStatement.set(row.statementText, {
                statementText: row.statementText,
                before: null,
                after: row,
                changed: true,
            });
        }
    }
    const rows = [...byStatement.values()];
    const anyChange =
        rows.some((r) => r.changed) || before.unknown_mass !== after.unknown_mass;
    return {
        rows,
        beforeUnknown: before.unknown_mass,
        afterUnknown: after.unknown_mass,
        anyChange,
    };
}

// ---------------------------------------------------------------------------
// workspace (lineage graph)

export interface WorkspaceNodeView {
    id: string;
    label: string;
    frame: string;
    opKind: NodeInfo["op"]["kind"];
    badge: string;
    openWorld: boolean;
    inconclusive: boolean;
    disabled: boolean;
    highlighted: boolean;
    column: number;
    row: number;
}

export interface WorkspaceLinkView {
    from: string;
    to: string;
    /** red link: this edge leaves the most influential contribution */
    highlighted: boolean;
}

export interface WorkspaceView {
    nodes: WorkspaceNodeView[];
    links: WorkspaceLinkView[];
    highlight: string | null;
}

function badgeFor(node: NodeInfo): string {
    switch (node.op.kind) {
        case "entered":
            return node.source.confidence;
        case "discounted":
        case "auto_discounted":
            return `discount ${node.op.rate ?? ""}`.trim();
        case "translated":
            return `to ${node.frame}`;
        case "fused":
            return node.op.rule ?? "fused";
    }
}

/** Lay the lineage out in columns by derivation depth. The view derives
 * solely from API responses; `highlight` must be the explanation's
 * most_influential id so the red link always matches the ranking. */
export function workspaceView(nodes: NodeInfo[], highlight: string | null): WorkspaceView {
    const depth = new Map<string, number>();
    const byId = new Map(nodes.map((n) => [n.node_id, n]));
    const depthOf = (id: string): number => {
        const cached = depth.get(id);
        if (cached !== undefined) {
            return cached;
        }
        const node = byId.get(id);
        const value =
            !node || node.inputs.length === 0
                ? 0
                : 1 + Math.max(...node.inputs.map(depthOf));
        depth.set(id, value);
        return value;
    };
    const rowsPerColumn = new Map<number, number>();
    const views: WorkspaceNodeView[] = [];
    const links: WorkspaceLinkView[] = [];
    for (const node of nodes) {
        const column = depthOf(node.node_id);
        const row = rowsPerColumn.get(column) ?? 0;
        rowsPerColumn.set(column, row + 1);
        views.push({
            id: node.node_id,
            label: node.source.name,
            frame: node.frame,
            opKind: node.op.kind,
            badge: badgeFor(node),
            openWorld: node.open_world,
            inconclusive: node.op.kind === "fused" && node.inconclusive,
            disabled: node.disabled,
            highlighted: node.node_id === highlight,
            column,
            row,
        });
        for (const input of node.inputs) {
            links.push({
                from: input,
                to: node.node_id,
                highlighted: highlight !== null && input === highlight,
            });
        }
    }
    return { nodes: views, links, highlight };
}

/** The node to paint red, straight from the API ranking. */
export function highlightFrom(explanation: ExplanationReport | null): string | null {
    return explanation ? explanation.most_influential : null;
}

// ---------------------------------------------------------------------------
// frame gallery

export interface GalleryNodeView {
    id: string;
    label: string;
    x: number;
    y: number;
}

export interface GalleryEdgeView {
    a: string;
    b: string;
}

export interface GalleryView {
    nodes: GalleryNodeView[];
    edges: GalleryEdgeView[];
}

/** Circle layout of the frame graph (unit coordinates, scaled by the
 * renderer). */
export function galleryView(frames: FrameInfo[], relations: RelationInfo[]): GalleryView {
    const n = Math.max(frames.length, 1);
    const nodes = frames.map((frame, i) => ({
        id: frame.id,
        label: frame.label,
        x: 0.5 + 0.4 * Math.cos((2 * Math.PI * i) / n - Math.PI / 2),
        y: 0.5 + 0.4 * Math.sin((2 * Math.PI * i) / n - Math.PI / 2),
    }));
    const edges = relations.map((rel) => ({ a: rel.a, b: rel.b }));
    return { nodes, edges };
}

export interface CrWindowView {
    frameA: string;
    frameB: string;
    left: string[];
    right: string[];
    lines: [string, string][];
}

/** The relation editor window: the propositions of each frame lined up on
 * each side, with a line per compatible pair. */
export function crWindow(
    relation: RelationInfo,
    frames: FrameInfo[],
): CrWindowView {
    const frameA = frames.find((f) => f.id === relation.a);
    const frameB = frames.find((f) => f.id === relation.b);
    return {
        frameA: relation.a,
        frameB: relation.b,
        left: frameA ? frameA.propositions : [],
        right: frameB ? frameB.propositions : [],
        lines: relation.pairs,
    };
}

// ---------------------------------------------------------------------------
// explanation panel

export interface ExplanationEntryView {
    source: string;
    boeId: string;
    influenceText: string;
    shareText: string;
    shareFraction: number;
    most: boolean;
    least: boolean;
}

export interface ExplanationView {
    text: string;
    entries: ExplanationEntryView[];
    approximate: boolean;
    mostInfluential: string;
}

export function explanationView(report: ExplanationReport): ExplanationView {
    return {
        text: report.text,
        approximate: !report.exact,
        mostInfluential: report.most_influential,
        entries: report.entries.map((entry) => ({
            source: entry.source,
            boeId: entry.boe_id,
            influenceText: entry.influence,
            shareText: entry.share,
            shareFraction: parseFloat(entry.share),
            most: entry.boe_id === report.most_influential,
            least: entry.boe_id === report.least_influential,
        })),
    };
}
