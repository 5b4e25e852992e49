/**
 * Typed client for the coopkb HTTP API.
 *
 * Every call goes through an injectable Transport so tests can stub the
 * server; the real transport (fetchTransport) wraps window.fetch. The
 * client never interprets knowledge: admission outcomes, conflicts and
 * scores are returned exactly as the server produced them.
 */

export interface ApiResponse {
  status: number;
  body: any;
}

export type Transport = (
  method: string,
  path: string,
  payload?: unknown,
) => Promise<ApiResponse>;

export type ConflictKind =
  | "complete-redundancy"
  | "partial-redundancy"
  | "inconsistency";

export interface Conflict {
  object: string;
  kind: ConflictKind;
}

export interface AdmissionResult {
  outcome: "accepted" | "needs_connection" | "conflict_detected";
  conflicts: Conflict[];
  required_action: string;
  statement_id: string | null;
  relation_ids: string[];
}

export interface TreeNode {
  object: string;
  relation_type: string | null;
  creators: string[];
  annotations: RelationDto[];
  children: TreeNode[];
}

export interface RelationDto {
  id: string;
  type: string;
  src: string;
  dst: string;
  creator: string;
  modality?: string;
  cardinality?: string;
}

export interface Score {
  value: number;
  voter_count: number;
  argument_balance: number;
}

export interface ObjectDetail {
  id: string;
  object_kind: string;
  creator?: string;
  believers?: string[];
  scores?: Record<string, Score>;
  relations: RelationDto[];
  body?: unknown;
  fl?: string | null;
  kind?: string;
}

export interface StatementDraft {
  user: string;
  fl?: string;
  informal?: string;
  negated?: boolean;
  connections: Array<[string, string]>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export function fetchTransport(base = ""): Transport {
  return async (method, path, payload) => {
    const reply = await fetch(base + path, {
      method,
      headers: payload === undefined ? {} : { "content-type": "application/json" },
      body: payload === undefined ? undefined : JSON.stringify(payload),
    });
    return { status: reply.status, body: await reply.json() };
  };
}

export class ApiClient {
  constructor(private readonly transport: Transport) {}

  private async call(method: string, path: string, payload?: unknown): Promise<ApiResponse> {
    const reply = await this.transport(method, path, payload);
    if (reply.status >= 400 && reply.status !== 422) {
      throw new ApiError(
        reply.status,
        reply.body?.error ?? "unknown",
        reply.body?.message ?? `request failed with ${reply.status}`,
      );
    }
    return reply;
  }

  /** One hierarchy level below an object (exactly one spec call, depth 1). */
  async specChildren(id: string): Promise<TreeNode> {
    const reply = await this.call(
      "GET",
      `/query?q=${encodeURIComponent(`spec ${id} 1`)}`,
    );
    if (reply.body.kind === "candidates") {
      throw new ApiError(300, "ambiguous_name", reply.body.candidates.join(", "));
    }
    return reply.body.tree as TreeNode;
  }

  async objectDetail(id: string): Promise<ObjectDetail> {
    const reply = await this.call("GET", `/objects/${encodeURIComponent(id)}`);
    return reply.body as ObjectDetail;
  }

  async propose(draft: StatementDraft): Promise<AdmissionResult> {
    const reply = await this.call("POST", "/statements", draft);
    return reply.body.result as AdmissionResult;
  }

  async addBelief(user: string, object: string): Promise<string[]> {
    const reply = await this.call("POST", "/beliefs", { user, object });
    return reply.body.believers as string[];
  }

  async castVote(
    voter: string,
    object: string,
    dimension: string,
    value: number,
  ): Promise<void> {
    await this.call("POST", "/votes", { voter, object, dimension, value });
  }

  async score(object: string, dimension: string): Promise<Score> {
    const detail = await this.objectDetail(object);
    const score = detail.scores?.[dimension];
    if (!score) {
      throw new ApiError(500, "missing_score", `no ${dimension} score on ${object}`);
    }
    return score;
  }

  async search(text: string): Promise<string[]> {
    const reply = await this.call(
      "GET",
      `/query?q=${encodeURIComponent(`search ${text}`)}`,
    );
    return (reply.body.objects ?? []) as string[];
  }
}
