// DOM rendering: one table per umbrella. Column headers carry the action
// buttons (extend to the right, explode down, collapse up); hovering any
// cell highlights every row that shares the hovered instance.

import type { GridUmbrella } from "./types.js";
import {
  GridViewModel,
  collapseTarget,
  highlightedRows,
  showsCollapseButton,
  showsExplodeButton,
  showsExtendButton,
} from "./viewmodel.js";

export interface GridHandlers {
  onHover(key: string | null): void;
  onExtend(node: string, anchor: HTMLElement): void;
  onExplode(node: string): void;
  onCollapse(node: string): void;
}

const NO_HANDLERS: GridHandlers = {
  onHover: () => undefined,
  onExtend: () => undefined,
  onExplode: () => undefined,
  onCollapse: () => undefined,
};

export function renderGrid(
  vm: GridViewModel,
  handlers: GridHandlers = NO_HANDLERS,
): HTMLElement {
  const container = document.createElement("div");
  container.className = "grid";
  if (vm.document.umbrellas.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "Nothing to show: the tree has no relationship types yet.";
    container.appendChild(empty);
    return container;
  }
  for (const umbrella of vm.document.umbrellas) {
    container.appendChild(renderUmbrella(umbrella, vm, handlers));
  }
  return container;
}

export function renderErrorBanner(message: string): HTMLElement {
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.setAttribute("role", "alert");
  banner.textContent = message;
  return banner;
}

function renderUmbrella(
  umbrella: GridUmbrella,
  vm: GridViewModel,
  handlers: GridHandlers,
): HTMLTableElement {
  const table = document.createElement("table");
  table.className = "umbrella";
  table.dataset.root = umbrella.root;

  const thead = document.createElement("thead");
  const headRow = document.createElement("tr");
  const collapsesShown = new Set<string>();
  for (const column of umbrella.columns) {
    const th = document.createElement("th");
    th.dataset.node = column.node;
    const label = document.createElement("span");
    label.textContent = column.type;
    th.appendChild(label);
    if (showsExtendButton(column)) {
      th.appendChild(button("extend", "▸", () => handlers.onExtend(column.node, th)));
    }
    if (showsExplodeButton(column)) {
      th.appendChild(button("explode", "▾", () => handlers.onExplode(column.node)));
    }
    if (showsCollapseButton(column)) {
      const target = collapseTarget(column);
      if (target !== null && !collapsesShown.has(target)) {
        collapsesShown.add(target);
        th.appendChild(button("collapse", "▴", () => handlers.onCollapse(target)));
      }
    }
    headRow.appendChild(th);
  }
  thead.appendChild(headRow);
  table.appendChild(thead);

  const tbody = document.createElement("tbody");
  const highlighted = new Set(highlightedRows(umbrella, vm.hoveredKey));
  umbrella.rows.forEach((row, rowIndex) => {
    const tr = document.createElement("tr");
    if (highlighted.has(rowIndex)) {
      tr.classList.add("linked");
    }
    for (const cell of row.cells) {
      const td = document.createElement("td");
      td.textContent = cell.text ?? "—";
      if (cell.key !== null) {
        td.dataset.key = cell.key;
        td.addEventListener("mouseenter", () => handlers.onHover(cell.key));
        td.addEventListener("mouseleave", () => handlers.onHover(null));
      } else {
        td.classList.add("nil");
      }
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  });
  table.appendChild(tbody);
  return table;
}

export function renderCandidateListbox(
  candidates: string[],
  onPick: (link: string) => void,
): HTMLElement {
  const box = document.createElement("ul");
  box.className = "candidates";
  for (const link of candidates) {
    const item = document.createElement("li");
    const pick = document.createElement("button");
    pick.textContent = link;
    pick.addEventListener("click", () => onPick(link));
    item.appendChild(pick);
    box.appendChild(item);
  }
  return box;
}

function button(kind: string, glyph: string, onClick: () => void): HTMLButtonElement {
  const el = document.createElement("button");
  el.className = `btn btn-${kind}`;
  el.dataset.action = kind;
  el.textContent = glyph;
  el.addEventListener("click", onClick);
  return el;
}
