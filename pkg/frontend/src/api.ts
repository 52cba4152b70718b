// Thin fetch wrapper over the session API. Every mutation returns the
// server's own truth; callers re-render from fresh payloads, never from
// locally patched state.

import type {
  CandidateList,
  ConstraintEdit,
  GridDocument,
  SchemaCreated,
  TreeCreated,
  Violation,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  violations: Violation[];

  constructor(status: number, message: string, violations: Violation[] = []) {
    super(message);
    this.status = status;
    this.violations = violations;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let violations: Violation[] = [];
  let message = `${response.status}`;
  try {
    const body = await response.json();
    if (Array.isArray(body.violations)) {
      violations = body.violations;
      message = violations.map((v) => `${v.code}: ${v.message}`).join("; ");
    } else if (Array.isArray(body.diagnostics)) {
      message = body.diagnostics
        .map((d: { code: string; message: string }) => `${d.code}: ${d.message}`)
        .join("; ");
    } else if (typeof body.error === "string") {
      message = body.error;
    } else if (typeof body.detail === "string") {
      message = body.detail;
    }
  } catch {
    // keep the bare status
  }
  return new ApiError(response.status, message, violations);
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(method: string, path: string, payload?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: payload === undefined ? {} : { "Content-Type": "application/json" },
      body: payload === undefined ? undefined : JSON.stringify(payload),
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  createSchema(text: string): Promise<SchemaCreated> {
    return this.request("POST", "/api/schemas", { text });
  }

  createTree(schemaId: string, text: string): Promise<TreeCreated> {
    return this.request("POST", `/api/schemas/${schemaId}/trees`, { text });
  }

  loadGrid(treeId: string, maxRows = 10): Promise<GridDocument> {
    return this.request("GET", `/api/trees/${treeId}/grid?maxRows=${maxRows}`);
  }

  extensionCandidates(treeId: string, node: string): Promise<CandidateList> {
    return this.request(
      "GET",
      `/api/trees/${treeId}/nodes/${node}/extension-candidates`,
    );
  }

  addEdge(treeId: string, node: string, link: string, revision?: number) {
    return this.request<{ treeId: string; revision: number; node: string }>(
      "POST",
      `/api/trees/${treeId}/nodes/${node}/edges`,
      { link, revision: revision ?? null },
    );
  }

  explode(treeId: string, node: string, revision?: number) {
    return this.request<{ treeId: string; revision: number }>(
      "POST",
      `/api/trees/${treeId}/nodes/${node}/explode`,
      { revision: revision ?? null },
    );
  }

  collapse(treeId: string, node: string, revision?: number) {
    return this.request<{ treeId: string; revision: number }>(
      "POST",
      `/api/trees/${treeId}/nodes/${node}/collapse`,
      { revision: revision ?? null },
    );
  }

  patchConstraints(schemaId: string, edits: ConstraintEdit[], revision?: number) {
    return this.request<{ schemaId: string; revision: number }>(
      "PATCH",
      `/api/schemas/${schemaId}/constraints`,
      { edits, revision: revision ?? null },
    );
  }
}
