// Typed client for the evidential-reasoning service. All real values
// arrive as decimal strings with 17 significant digits; this layer never
// converts them to numbers, so the UI can display exactly what the
// engine computed.

export interface FrameInfo {
    id: string;
    label: string;
    propositions: string[];
}

export interface RelationInfo {
    a: string;
    b: string;
    pairs: [string, string][];
}

export interface SourceInfo {
    name: string;
    confidence: "certain" | "probable" | "possible";
    independent: boolean;
    entry_path: string;
    timestamp?: string;
}

export interface MassEntry {
    set: string[];
    mass: string;
}

export interface OpInfo {
    kind: "entered" | "discounted" | "auto_discounted" | "translated" | "fused";
    rate?: string;
    rule?: "dempster" | "smets" | "dependent";
    path?: [string, string][];
    loss?: string;
}

export interface NodeInfo {
    node_id: string;
    frame: string;
    kind: "initial" | "secondary";
    open_world: boolean;
    masses: MassEntry[];
    source: SourceInfo;
    op: OpInfo;
    inputs: string[];
    disabled: boolean;
    conflict?: string;
    inconclusive: boolean;
    request_inputs?: string[];
}

export interface ConclusionRow {
    statement: string[];
    support: string;
    uncertainty: string;
    against: string;
}

export interface ConclusionReport {
    boe_id: string;
    conflict: string;
    unknown_mass: string;
    rows: ConclusionRow[];
}

export interface InfluenceEntry {
    boe_id: string;
    source: string;
    influence: string;
    share: string;
}

export interface ExplanationReport {
    conclusion_id: string;
    most_influential: string;
    least_influential: string;
    exact: boolean;
    method: "standalone_info" | "leave_one_out";
    text: string;
    entries: InfluenceEntry[];
}

export interface MetaInfo {
    kb: { name: string; version: string; created: string };
    log_position: number;
    auto_discount: {
        enabled: boolean;
        rate_certain: string;
        rate_probable: string;
        rate_possible: string;
    };
}

export interface SubmitBody {
    frame: string;
    masses: { set: string[]; mass: number }[];
    source: { name: string; confidence: string };
}

export class ApiRequestError extends Error {
    constructor(
        public code: string,
        message: string,
        public status: number,
    ) {
        super(message);
    }
}

// Raised when the service itself cannot be reached (offline banner case).
export class ApiUnreachableError extends Error {}

export class ApiClient {
    constructor(private base: string = "") {}

    private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
        let response: Response;
        try {
            response = await fetch(this.base + path, {
                method,
                headers: body === undefined ? {} : { "content-type": "application/json" },
                body: body === undefined ? undefined : JSON.stringify(body),
            });
        } catch (err) {
            throw new ApiUnreachableError(String(err));
        }
        const payload = await response.json().catch(() => null);
        if (!response.ok) {
            const code = payload && payload.code ? String(payload.code) : "error";
            const message =
                payload && payload.message ? String(payload.message) : response.statusText;
            throw new ApiRequestError(code, message, response.status);
        }
        return payload as T;
    }

    async frames(): Promise<FrameInfo[]> {
        return (await this.request<{ frames: FrameInfo[] }>("GET", "/api/v1/frames")).frames;
    }

    async relations(): Promise<RelationInfo[]> {
        return (await this.request<{ relations: RelationInfo[] }>("GET", "/api/v1/relations"))
            .relations;
    }

    async nodes(): Promise<NodeInfo[]> {
        return (await this.request<{ nodes: NodeInfo[] }>("GET", "/api/v1/boes")).nodes;
    }

    meta(): Promise<MetaInfo> {
        return this.request("GET", "/api/v1/meta");
    }

    conclusion(nodeId: string): Promise<ConclusionReport> {
        return this.request("GET", `/api/v1/nodes/${encodeURIComponent(nodeId)}/conclusion`);
    }

    explanation(nodeId: string): Promise<ExplanationReport> {
        return this.request("GET", `/api/v1/nodes/${encodeURIComponent(nodeId)}/explanation`);
    }

    async submitBoe(body: SubmitBody): Promise<string> {
        const out = await this.request<{ node_id: string }>("POST", "/api/v1/boes", body);
        return out.node_id;
    }

    async fuse(
        nodes: string[],
        rule: string,
        target: string,
        autoDiscount: boolean,
    ): Promise<string> {
        const out = await this.request<{ node_id: string }>("POST", "/api/v1/ops/fuse", {
            nodes,
            rule,
            target,
            auto_discount: autoDiscount,
        });
        return out.node_id;
    }

    async discount(node: string, rate: number): Promise<string> {
        const out = await this.request<{ node_id: string }>("POST", "/api/v1/ops/discount", {
            node,
            rate,
        });
        return out.node_id;
    }

    async translate(node: string, target: string): Promise<string> {
        const out = await this.request<{ node_id: string }>("POST", "/api/v1/ops/translate", {
            node,
            target,
        });
        return out.node_id;
    }

    async whatIf(
        recompute: string,
        disable: string[],
        rediscount: Record<string, number>,
    ): Promise<string> {
        const out = await this.request<{ node_id: string }>("POST", "/api/v1/whatif", {
            recompute,
            disable,
            rediscount,
        });
        return out.node_id;
    }
}
