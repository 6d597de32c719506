// UI contract tests: the view models must reproduce API payloads verbatim
// (no client-side arithmetic on evidence), pair what-if conclusions side
// by side, and take the highlight straight from the explanation ranking.

import { describe, expect, it } from "vitest";

import type {
    ConclusionReport,
    ExplanationReport,
    FrameInfo,
    NodeInfo,
    RelationInfo,
} from "../src/api.js";
import {
    conclusionPanel,
    crWindow,
    evaluateForm,
    explanationView,
    galleryView,
    highlightFrom,
    statementText,
    whatIfDiff,
    workspaceView,
} from "../src/models.js";

// full-precision strings exactly as the service serializes them
const CONCLUSION: ConclusionReport = {
    boe_id: "n5",
    conflict: "0",
    unknown_mass: "0.41999999999999998",
    rows: [
        {
            statement: ["A"],
            support: "0.48275862068965519",
            uncertainty: "0.20689655172413793",
            against: "0.31034482758620691",
        },
        {
            statement: ["A", "B", "C"],
            support: "1",
            uncertainty: "0",
            against: "0",
        },
    ],
};

describe("conclusionPanel", () => {
    it("renders every value verbatim (string equality with the payload)", () => {
        const view = conclusionPanel(CONCLUSION);
        expect(view.rows[0].supportText).toBe(CONCLUSION.rows[0].support);
        expect(view.rows[0].uncertaintyText).toBe(CONCLUSION.rows[0].uncertainty);
        expect(view.rows[0].againstText).toBe(CONCLUSION.rows[0].against);
        expect(view.rows[1].supportText).toBe("1");
        expect(view.unknownText).toBe("0.41999999999999998");
        expect(view.conflictText).toBe("0");
        const segmentTexts = view.rows[0].segments.map((s) => s.text);
        expect(segmentTexts).toEqual([
            CONCLUSION.rows[0].support,
            CONCLUSION.rows[0].uncertainty,
            CONCLUSION.rows[0].against,
        ]);
    });

    it("sizes the three bar segments from the payload without changing it", () => {
        const view = conclusionPanel(CONCLUSION);
        const fractions = view.rows[0].segments.map((s) => s.fraction);
        expect(fractions[0]).toBeCloseTo(0.4828, 4);
        expect(fractions[0] + fractions[1] + fractions[2]).toBeCloseTo(1, 9);
    });

    it("shows a separate unknown bar only when the empty set carries mass", () => {
        expect(conclusionPanel(CONCLUSION).hasUnknown).toBe(true);
        const closed = { ...CONCLUSION, unknown_mass: "0" };
        expect(conclusionPanel(closed).hasUnknown).toBe(false);
    });

    it("formats statements as proposition sets", () => {
        expect(statementText(["A", "B"])).toBe("{A, B}");
        expect(conclusionPanel(CONCLUSION).rows[1].statementText).toBe("{A, B, C}");
    });
});

describe("whatIfDiff", () => {
    const after: ConclusionReport = {
        boe_id: "n9",
        conflict: "0",
        unknown_mass: "0",
        rows: [
            {
                statement: ["A"],
                support: "0.25",
                uncertainty: "0.5",
                against: "0.25",
            },
            { statement: ["B"], support: "0.125", uncertainty: "0.75", against: "0.125" },
        ],
    };

    it("pairs statements side by side and marks missing sides", () => {
        const diff = whatIfDiff(CONCLUSION, after);
        const a = diff.rows.find((r) => r.statementText === "{A}");
        expect(a?.before?.supportText).toBe("0.48275862068965519");
        expect(a?.after?.supportText).toBe("0.25");
        const theta = diff.rows.find((r) => r.statementText === "{A, B, C}");
        expect(theta?.after).toBeNull();
        const b = diff.rows.find((r) => r.statementText === "{B}");
        expect(b?.before).toBeNull();
        expect(diff.beforeUnknown).toBe("0.41999999999999998");
        expect(diff.afterUnknown).toBe("0");
    });

    it("marks changed rows by string comparison", () => {
        const diff = whatIfDiff(CONCLUSION, after);
        expect(diff.rows.find((r) => r.statementText === "{A}")?.changed).toBe(true);
        expect(diff.anyChange).toBe(true);
    });

    it("an identical recomputation shows no change", () => {
        const diff = whatIfDiff(CONCLUSION, CONCLUSION);
        expect(diff.rows.every((r) => !r.changed)).toBe(true);
        expect(diff.anyChange).toBe(false);
        expect(diff.rows.every((r) => r.before !== null && r.after !== null)).toBe(true);
    });
});

function nodeInfo(partial: Partial<NodeInfo> & { node_id: string }): NodeInfo {
    return {
        frame: "f",
        kind: "initial",
        open_world: false,
        masses: [],
        source: {
            name: partial.node_id,
            confidence: "probable",
            independent: true,
            entry_path: "manual",
        },
        op: { kind: "entered" },
        inputs: [],
        disabled: false,
        inconclusive: false,
        ...partial,
    };
}

describe("workspaceView highlight", () => {
    const explanation: ExplanationReport = {
        conclusion_id: "n4",
        most_influential: "n1",
        least_influential: "n2",
        exact: true,
        method: "standalone_info",
        text: "Eye-Witness contributed the most…",
        entries: [
            { boe_id: "n1", source: "Eye-Witness", influence: "2", share: "1" },
            { boe_id: "n2", source: "Rumor", influence: "0", share: "0" },
        ],
    };

    const nodes = [
        nodeInfo({ node_id: "n1" }),
        nodeInfo({ node_id: "n2" }),
        nodeInfo({
            node_id: "n4",
            kind: "secondary",
            op: { kind: "fused", rule: "smets" },
            inputs: ["n1", "n2"],
            request_inputs: ["n1", "n2"],
        }),
    ];

    it("equals the explanation's most_influential", () => {
        const view = workspaceView(nodes, highlightFrom(explanation));
        expect(view.highlight).toBe(explanation.most_influential);
        const highlighted = view.nodes.filter((n) => n.highlighted).map((n) => n.id);
        expect(highlighted).toEqual(["n1"]);
        const redLinks = view.links.filter((l) => l.highlighted);
        expect(redLinks).toEqual([{ from: "n1", to: "n4", highlighted: true }]);
    });

    it("no explanation, no highlight", () => {
        const view = workspaceView(nodes, highlightFrom(null));
        expect(view.highlight).toBeNull();
        expect(view.nodes.every((n) => !n.highlighted)).toBe(true);
        expect(view.links.every((l) => !l.highlighted)).toBe(true);
    });

    it("columns follow derivation depth", () => {
        const view = workspaceView(nodes, null);
        const byId = new Map(view.nodes.map((n) => [n.id, n]));
        expect(byId.get("n1")?.column).toBe(0);
        expect(byId.get("n2")?.column).toBe(0);
        expect(byId.get("n4")?.column).toBe(1);
    });
});

describe("evaluateForm", () => {
    it("blocks when entered masses exceed 1", () => {
        const form = evaluateForm([
            { labels: ["A"], massText: "0.8" },
            { labels: ["B"], massText: "0.4" },
        ]);
        expect(form.blocked).toBe(true);
        expect(form.problems.join(" ")).toContain("exceeding 1");
    });

    it("reports the remainder as uncommitted mass", () => {
        const form = evaluateForm([{ labels: ["A"], massText: "0.7" }]);
        expect(form.blocked).toBe(false);
        expect(form.remainderToTheta).toBeCloseTo(0.3, 9);
    });

    it("blocks non-numeric and negative masses", () => {
        expect(evaluateForm([{ labels: ["A"], massText: "lots" }]).blocked).toBe(true);
        expect(evaluateForm([{ labels: ["A"], massText: "-0.2" }]).blocked).toBe(true);
    });

    it("a statement with mass needs propositions", () => {
        expect(evaluateForm([{ labels: [], massText: "0.5" }]).blocked).toBe(true);
    });

    it("an empty form is a valid vacuous entry", () => {
        const form = evaluateForm([{ labels: [], massText: "" }]);
        expect(form.blocked).toBe(false);
        expect(form.remainderToTheta).toBe(1);
    });

    it("exactly 1 is allowed", () => {
        expect(evaluateForm([{ labels: ["A"], massText: "1.0" }]).blocked).toBe(false);
    });
});

describe("gallery", () => {
    const frames: FrameInfo[] = [
        { id: "classification", label: "Classification", propositions: ["Oberon", "Collins"] },
        { id: "type", label: "Type", propositions: ["SSK", "SSN"] },
        { id: "lone", label: "Lone", propositions: ["x"] },
    ];
    const relations: RelationInfo[] = [
        { a: "classification", b: "type", pairs: [["Oberon", "SSK"], ["Collins", "SSK"]] },
    ];

    it("one node per frame, one edge per relation; isolated frames stay", () => {
        const view = galleryView(frames, relations);
        expect(view.nodes.map((n) => n.id)).toEqual(["classification", "type", "lone"]);
        expect(view.edges).toEqual([{ a: "classification", b: "type" }]);
    });

    it("cr window lines up both frames' propositions with the pair lines", () => {
        const view = crWindow(relations[0], frames);
        expect(view.left).toEqual(["Oberon", "Collins"]);
        expect(view.right).toEqual(["SSK", "SSN"]);
        expect(view.lines).toEqual([
            ["Oberon", "SSK"],
            ["Collins", "SSK"],
        ]);
    });
});

describe("explanationView", () => {
    it("keeps influence and share strings verbatim and flags extremes", () => {
        const report: ExplanationReport = {
            conclusion_id: "n7",
            most_influential: "n1",
            least_influential: "n3",
            exact: false,
            method: "standalone_info",
            text: "Eye-Witness contributed the most information…",
            entries: [
                { boe_id: "n1", source: "Eye-Witness", influence: "2.3219280948873622", share: "0.75" },
                { boe_id: "n3", source: "Rumor", influence: "0.77395629833135788", share: "0.25" },
            ],
        };
        const view = explanationView(report);
        expect(view.entries[0].influenceText).toBe("2.3219280948873622");
        expect(view.entries[0].most).toBe(true);
        expect(view.entries[1].least).toBe(true);
        expect(view.approximate).toBe(true);
        expect(view.mostInfluential).toBe("n1");
    });
});
