// Application wiring: state, 1 s polling, and the operator flows
// (enter evidence, select and fuse, inspect conclusions, what-if).
// At most one mutation is in flight at a time; reads may overlap.

import {
    ApiClient,
    ApiRequestError,
    ApiUnreachableError,
    type ConclusionReport,
    type ExplanationReport,
    type FrameInfo,
    type NodeInfo,
    type RelationInfo,
} from "./api.js";
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
    type FormRowInput,
} from "./models.js";
import {
    clear,
    el,
    renderConclusion,
    renderCrWindow,
    renderExplanation,
    renderGallery,
    renderWhatIfDiff,
    renderWorkspace,
} from "./render.js";

const client = new ApiClient("");

interface AppState {
    frames: FrameInfo[];
    relations: RelationInfo[];
    nodes: NodeInfo[];
    selected: Set<string>;
    activeConclusion: string | null;
    explanation: ExplanationReport | null;
    baseConclusion: ConclusionReport | null;
    mutationInFlight: boolean;
    offline: boolean;
    formRows: FormRowInput[];
}

const state: AppState = {
    frames: [],
    relations: [],
    nodes: [],
    selected: new Set(),
    activeConclusion: null,
    explanation: null,
    baseConclusion: null,
    mutationInFlight: false,
    offline: false,
    formRows: [{ labels: [], massText: "" }],
};

function byId(id: string): HTMLElement {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node;
}

function setOffline(offline: boolean): void {
    state.offline = offline;
    byId("offline-banner").hidden = !offline;
}

function showError(message: string): void {
    const box = byId("error-box");
    box.textContent = message;
    box.hidden = message === "";
}

async function guardMutation(action: () => Promise<void>): Promise<void> {
    if (state.mutationInFlight) {
        return;
    }
    state.mutationInFlight = true;
    showError("");
    try {
        await action();
        setOffline(false);
    } catch (err) {
        if (err instanceof ApiUnreachableError) {
            setOffline(true);
        } else if (err instanceof ApiRequestError) {
            showError(`${err.code}: ${err.message}`);
        } else {
            showError(String(err));
        }
    } finally {
        state.mutationInFlight = false;
    }
}

// -- gallery ------------------------------------------------------------------

function showCrWindowFor(a: string, b: string): void {
    const rel = state.relations.find(
        (r) => (r.a === a && r.b === b) || (r.a === b && r.b === a),
    );
    if (rel) {
        renderCrWindow(byId("cr-window"), crWindow(rel, state.frames));
    }
}

function showFrameWindow(frameId: string): void {
    const related = state.relations.filter((r) => r.a === frameId || r.b === frameId);
    if (related.length > 0) {
        showCrWindowFor(related[0].a, related[0].b);
        return;
    }
    const frame = state.frames.find((f) => f.id === frameId);
    const box = byId("cr-window");
    clear(box);
    if (frame) {
        box.append(
            el("h3", {}, [frame.label]),
            el("p", {}, [frame.propositions.join(", ")]),
            el("p", { class: "cr-meta" }, ["no compatibility relations yet"]),
        );
    }
}

function redrawGallery(): void {
    renderGallery(
        byId("gallery-svg") as unknown as SVGSVGElement,
        galleryView(state.frames, state.relations),
        showFrameWindow,
        showCrWindowFor,
    );
}

// -- evidence form -------------------------------------------------------------

function selectedFrame(): FrameInfo | undefined {
    const id = (byId("form-frame") as HTMLSelectElement).value;
    return state.frames.find((f) => f.id === id);
}

function redrawFormRows(): void {
    const frame = selectedFrame();
    const holder = byId("form-rows");
    clear(holder);
    state.formRows.forEach((row, index) => {
        const line = el("div", { class: "form-row" });
        const boxes = el("span", { class: "prop-boxes" });
        for (const prop of frame ? frame.propositions : []) {
            const label = el("label", {}, []);
            const input = el("input", { type: "checkbox" }) as HTMLInputElement;
            input.checked = row.labels.includes(prop);
            input.addEventListener("change", () => {
                row.labels = input.checked
                    ? [...row.labels, prop]
                    : row.labels.filter((l) => l !== prop);
                updateFormStatus();
            });
            label.append(input, prop);
            boxes.append(label);
        }
        const mass = el("input", {
            type: "text",
            class: "mass-input",
            placeholder: "mass",
            value: row.massText,
        }) as HTMLInputElement;
        mass.addEventListener("input", () => {
            row.massText = mass.value;
            updateFormStatus();
        });
        const drop = el("button", { type: "button", class: "small" }, ["×"]);
        drop.addEventListener("click", () => {
            state.formRows.splice(index, 1);
            if (state.formRows.length === 0) {
                state.formRows.push({ labels: [], massText: "" });
            }
            redrawFormRows();
            updateFormStatus();
        });
        line.append(boxes, mass, drop);
        holder.append(line);
    });
}

function updateFormStatus(): void {
    const form = evaluateForm(state.formRows);
    const status = byId("form-status");
    status.textContent = form.blocked
        ? form.problems.join("; ")
        : `uncommitted (goes to the whole frame): ${form.remainderToTheta.toFixed(4)}`;
    status.classList.toggle("problem", form.blocked);
    (byId("form-submit") as HTMLButtonElement).disabled = form.blocked;
}

function setupForm(): void {
    const frameSelect = byId("form-frame") as HTMLSelectElement;
    frameSelect.addEventListener("change", () => {
        state.formRows = [{ labels: [], massText: "" }];
        redrawFormRows();
        updateFormStatus();
    });
    byId("form-add-row").addEventListener("click", () => {
        state.formRows.push({ labels: [], massText: "" });
        redrawFormRows();
    });
    byId("form-submit").addEventListener("click", () =>
        guardMutation(async () => {
            const frame = selectedFrame();
            if (!frame) return;
            const form = evaluateForm(state.formRows);
            if (form.blocked) return;
            const masses = state.formRows
                .filter((row) => row.labels.length > 0 && row.massText.trim() !== "")
                .map((row) => ({ set: row.labels, mass: Number(row.massText) }));
            const confidence = (
                document.querySelector("input[name=confidence]:checked") as HTMLInputElement
            ).value;
            const name =
                (byId("form-source") as HTMLInputElement).value.trim() || "manual report";
            await client.submitBoe({ frame: frame.id, masses, source: { name, confidence } });
            state.formRows = [{ labels: [], massText: "" }];
            redrawFormRows();
            updateFormStatus();
            await refreshNodes();
        }),
    );
}

// -- workspace and fusion -------------------------------------------------------

function redrawWorkspace(): void {
    renderWorkspace(
        byId("workspace-svg") as unknown as SVGSVGElement,
        workspaceView(state.nodes, highlightFrom(state.explanation)),
        state.selected,
        (id) => void onNodeClick(id),
    );
    const fuseButton = byId("fuse-button") as HTMLButtonElement;
    fuseButton.disabled = state.selected.size < 2;
    byId("selection-status").textContent =
        state.selected.size > 0 ? `selected: ${[...state.selected].join(", ")}` : "";
}

async function onNodeClick(id: string): Promise<void> {
    const node = state.nodes.find((n) => n.node_id === id);
    if (!node) return;
    if (node.op.kind === "fused") {
        await openConclusion(id);
        return;
    }
    if (state.selected.has(id)) {
        state.selected.delete(id);
    } else {
        state.selected.add(id);
    }
    redrawWorkspace();
}

async function openConclusion(id: string): Promise<void> {
    try {
        const report = await client.conclusion(id);
        state.activeConclusion = id;
        state.baseConclusion = report;
        renderConclusion(byId("conclusion-box"), conclusionPanel(report));
        const node = state.nodes.find((n) => n.node_id === id);
        try {
            state.explanation = await client.explanation(id);
            renderExplanation(byId("explanation-box"), explanationView(state.explanation));
        } catch {
            state.explanation = null;
            clear(byId("explanation-box"));
        }
        renderWhatIfControls(node ?? null);
        clear(byId("whatif-box"));
        redrawWorkspace();
        setOffline(false);
    } catch (err) {
        if (err instanceof ApiUnreachableError) setOffline(true);
    }
}

function setupFusion(): void {
    byId("fuse-button").addEventListener("click", () =>
        guardMutation(async () => {
            const rule = (byId("fusion-rule") as HTMLSelectElement).value;
            const target = (byId("fusion-target") as HTMLSelectElement).value;
            const auto = (byId("auto-discount") as HTMLInputElement).checked;
            const fusedId = await client.fuse([...state.selected], rule, target, auto);
            state.selected.clear();
            await refreshNodes();
            await openConclusion(fusedId);
        }),
    );
}

// -- what-if ----------------------------------------------------------------------

function renderWhatIfControls(node: NodeInfo | null): void {
    const box = byId("whatif-controls");
    clear(box);
    if (!node || node.op.kind !== "fused" || !node.request_inputs) {
        return;
    }
    box.append(el("h3", {}, ["What if…"]));
    const rows: { id: string; disable: HTMLInputElement; rate: HTMLInputElement }[] = [];
    for (const inputId of node.request_inputs) {
        const source = state.nodes.find((n) => n.node_id === inputId)?.source.name ?? inputId;
        const disable = el("input", { type: "checkbox" }) as HTMLInputElement;
        const rate = el("input", {
            type: "text",
            class: "rate-input",
            placeholder: "rate",
        }) as HTMLInputElement;
        rows.push({ id: inputId, disable, rate });
        box.append(
            el("div", { class: "whatif-row" }, [
                el("label", {}, [disable, ` remove ${source} (${inputId})`]),
                el("label", {}, [" or re-discount at ", rate]),
            ]),
        );
    }
    const run = el("button", { type: "button" }, ["Recalculate"]);
    run.addEventListener("click", () =>
        guardMutation(async () => {
            if (!state.activeConclusion || !state.baseConclusion) return;
            const disable = rows.filter((r) => r.disable.checked).map((r) => r.id);
            const rediscount: Record<string, number> = {};
            for (const row of rows) {
                const text = row.rate.value.trim();
                if (text !== "" && !row.disable.checked) {
                    rediscount[row.id] = Number(text);
                }
            }
            const newId = await client.whatIf(state.activeConclusion, disable, rediscount);
            const after = await client.conclusion(newId);
            renderWhatIfDiff(byId("whatif-box"), whatIfDiff(state.baseConclusion, after));
            await refreshNodes();
        }),
    );
    box.append(run);
}

// -- polling ----------------------------------------------------------------------

async function refreshNodes(): Promise<void> {
    state.nodes = await client.nodes();
    redrawWorkspace();
}

async function poll(): Promise<void> {
    try {
        await refreshNodes();
        setOffline(false);
    } catch (err) {
        if (err instanceof ApiUnreachableError) {
            setOffline(true);
        }
    }
}

function populateFrameSelectors(): void {
    for (const selectId of ["form-frame", "fusion-target"]) {
        const select = byId(selectId) as HTMLSelectElement;
        clear(select);
        for (const frame of state.frames) {
            select.append(el("option", { value: frame.id }, [frame.label]));
        }
    }
}

async function boot(): Promise<void> {
    try {
        state.frames = await client.frames();
        state.relations = await client.relations();
        setOffline(false);
    } catch (err) {
        if (err instanceof ApiUnreachableError) {
            setOffline(true);
            setTimeout(boot, 1000);
            return;
        }
        throw err;
    }
    populateFrameSelectors();
    redrawGallery();
    setupForm();
    setupFusion();
    redrawFormRows();
    updateFormStatus();
    await poll();
    setInterval(poll, 1000);
}

document.addEventListener("DOMContentLoaded", () => void boot());

// exported for debugging in the browser console
export { state, statementText };
