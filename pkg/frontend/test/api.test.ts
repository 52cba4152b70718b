import { afterEach, describe, expect, it, vi } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import { ApiClient, ApiError } from "../src/api.js";
import { hasRepeatedInstance } from "../src/viewmodel.js";
import type { GridDocument } from "../src/types.js";

const fixture = (name: string): GridDocument =>
  JSON.parse(readFileSync(join(__dirname, "fixtures", name), "utf8"));

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("api client", () => {
  it("posts schema text and returns the session", async () => {
    const calls: Array<{ url: string; init: RequestInit | undefined }> = [];
    vi.stubGlobal("fetch", (url: string, init?: RequestInit) => {
      calls.push({ url, init });
      return Promise.resolve(
        jsonResponse(201, { schemaId: "s1", revision: 0, diagnostics: [] }),
      );
    });
    const api = new ApiClient();
    const created = await api.createSchema("value V size 2\n");
    expect(created.schemaId).toBe("s1");
    expect(calls[0]!.url).toBe("/api/schemas");
    expect(JSON.parse(calls[0]!.init!.body as string)).toEqual({
      text: "value V size 2\n",
    });
  });

  it("raises ApiError with violations on 422", async () => {
    vi.stubGlobal("fetch", () =>
      Promise.resolve(
        jsonResponse(422, {
          violations: [{ code: "LinkReuse", message: "link by reused", subjects: [] }],
        }),
      ),
    );
    const api = new ApiClient();
    await expect(api.addEdge("t1", "n0", "by")).rejects.toMatchObject({
      status: 422,
      violations: [{ code: "LinkReuse", message: "link by reused", subjects: [] }],
    });
  });

  it("flags stale revisions as 409 errors", async () => {
    vi.stubGlobal("fetch", () =>
      Promise.resolve(jsonResponse(409, { error: "stale revision", revision: 4 })),
    );
    const api = new ApiClient();
    try {
      await api.explode("t1", "n2", 1);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(409);
    }
  });

  it("constraint removal then refetch surfaces the repeated instance", async () => {
    const grids = [fixture("shop_grid.json"), fixture("shop_grid_no_unique.json")];
    let gridCalls = 0;
    vi.stubGlobal("fetch", (url: string, init?: RequestInit) => {
      if (url.includes("/grid")) {
        return Promise.resolve(jsonResponse(200, grids[gridCalls++]));
      }
      expect(init?.method).toBe("PATCH");
      expect(JSON.parse(init!.body as string).edits).toEqual([
        { op: "remove", kind: "unique", roles: ["of"] },
      ]);
      return Promise.resolve(jsonResponse(200, { schemaId: "s1", revision: 1 }));
    });
    const api = new ApiClient();
    const before = await api.loadGrid("t1");
    expect(hasRepeatedInstance(before.umbrellas[0]!, 1)).toBe(false);
    await api.patchConstraints("s1", [{ op: "remove", kind: "unique", roles: ["of"] }]);
    const after = await api.loadGrid("t1");
    expect(hasRepeatedInstance(after.umbrellas[0]!, 1)).toBe(true);
  });
});
