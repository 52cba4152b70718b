// Application shell: submit schema and tree text, then drive the
// validation loop against the session API. All mutations round-trip
// through the server; the grid always re-renders from the last payload.

import { ApiClient, ApiError } from "./api.js";
import { renderCandidateListbox, renderErrorBanner, renderGrid } from "./render.js";
import { fromPayload, GridViewModel, withHover } from "./viewmodel.js";
import type { ConstraintEdit } from "./types.js";

interface AppState {
  schemaId: string | null;
  treeId: string | null;
  revision: number;
  vm: GridViewModel | null;
  maxRows: number;
  inflight: boolean;
}

export function mountApp(root: HTMLElement, api: ApiClient = new ApiClient()): void {
  const state: AppState = {
    schemaId: null,
    treeId: null,
    revision: 0,
    vm: null,
    maxRows: 10,
    inflight: false,
  };

  root.innerHTML = `
    <h1>exemplar</h1>
    <section class="input">
      <label>Schema
        <textarea id="schema-text" rows="10" spellcheck="false"></textarea>
      </label>
      <label>Tree
        <textarea id="tree-text" rows="3" spellcheck="false"></textarea>
      </label>
      <label>Max rows <input id="max-rows" type="number" min="1" value="10"></label>
      <button id="load">Load grid</button>
    </section>
    <section class="constraints">
      <select id="edit-op"><option>remove</option><option>add</option></select>
      <select id="edit-kind"><option>unique</option><option>total</option></select>
      <input id="edit-roles" placeholder="role[, role]">
      <button id="apply-edit">Apply constraint edit</button>
    </section>
    <div id="messages"></div>
    <div id="grid-host"></div>
  `;

  const messages = root.querySelector("#messages") as HTMLElement;
  const host = root.querySelector("#grid-host") as HTMLElement;

  function showError(err: unknown): void {
    messages.innerHTML = "";
    const text = err instanceof Error ? err.message : String(err);
    messages.appendChild(renderErrorBanner(text));
  }

  async function refreshGrid(): Promise<void> {
    if (state.treeId === null) {
      return;
    }
    const payload = await api.loadGrid(state.treeId, state.maxRows);
    state.vm = fromPayload(payload, state.vm ?? undefined);
    renderCurrent();
  }

  function renderCurrent(): void {
    if (state.vm === null) {
      return;
    }
    host.innerHTML = "";
    host.appendChild(
      renderGrid(state.vm, {
        onHover(key) {
          if (state.vm !== null) {
            state.vm = withHover(state.vm, key);
            renderCurrent();
          }
        },
        onExtend(node, anchor) {
          void offerCandidates(node, anchor);
        },
        onExplode(node) {
          void mutate(() => api.explode(state.treeId!, node, state.revision));
        },
        onCollapse(node) {
          void mutate(() => api.collapse(state.treeId!, node, state.revision));
        },
      }),
    );
  }

  async function offerCandidates(node: string, anchor: HTMLElement): Promise<void> {
    try {
      const list = await api.extensionCandidates(state.treeId!, node);
      anchor.querySelectorAll(".candidates").forEach((el) => el.remove());
      anchor.appendChild(
        renderCandidateListbox(list.candidates, (link) => {
          void mutate(() => api.addEdge(state.treeId!, node, link, state.revision));
        }),
      );
    } catch (err) {
      showError(err);
    }
  }

  async function mutate(run: () => Promise<{ revision: number }>): Promise<void> {
    if (state.inflight) {
      return; // at most one in-flight mutation per session
    }
    state.inflight = true;
    messages.innerHTML = "";
    try {
      const outcome = await run();
      state.revision = outcome.revision;
      await refreshGrid();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        await refreshGrid();
        showError("Someone else edited this session; the grid was refreshed. Retry?");
      } else {
        showError(err);
      }
    } finally {
      state.inflight = false;
    }
  }

  (root.querySelector("#load") as HTMLButtonElement).addEventListener("click", () => {
    void (async () => {
      messages.innerHTML = "";
      try {
        const schemaText = (root.querySelector("#schema-text") as HTMLTextAreaElement).value;
        const treeText = (root.querySelector("#tree-text") as HTMLTextAreaElement).value;
        state.maxRows = Number((root.querySelector("#max-rows") as HTMLInputElement).value) || 10;
        const schema = await api.createSchema(schemaText);
        state.schemaId = schema.schemaId;
        const tree = await api.createTree(schema.schemaId, treeText);
        state.treeId = tree.treeId;
        state.revision = tree.revision;
        await refreshGrid();
      } catch (err) {
        showError(err);
      }
    })();
  });

  (root.querySelector("#apply-edit") as HTMLButtonElement).addEventListener("click", () => {
    if (state.schemaId === null) {
      return;
    }
    const edit: ConstraintEdit = {
      op: (root.querySelector("#edit-op") as HTMLSelectElement).value as "add" | "remove",
      kind: (root.querySelector("#edit-kind") as HTMLSelectElement).value as
        | "unique"
        | "total",
      roles: (root.querySelector("#edit-roles") as HTMLInputElement).value
        .split(",")
        .map((r) => r.trim())
        .filter((r) => r.length > 0),
    };
    void mutate(() => api.patchConstraints(state.schemaId!, [edit], state.revision));
  });
}

if (typeof document !== "undefined" && document.getElementById("app") !== null) {
  mountApp(document.getElementById("app") as HTMLElement);
}
