// View state over the last grid payload. The payload is never edited
// locally: every displayed grid equals the most recent server response,
// and this module only derives per-render facts from it (which rows a
// hovered instance links to, which buttons a column offers).

import type { GridColumn, GridDocument, GridUmbrella } from "./types.js";

export interface GridViewModel {
  document: GridDocument;
  hoveredKey: string | null;
  pendingRevision: number | null;
}

export function fromPayload(
  document: GridDocument,
  previous?: GridViewModel,
): GridViewModel {
  return {
    document,
    hoveredKey: previous?.hoveredKey ?? null,
    pendingRevision: null,
  };
}

export function withHover(vm: GridViewModel, key: string | null): GridViewModel {
  return { ...vm, hoveredKey: key };
}

/** Indices of the rows containing a cell with the hovered key. */
export function highlightedRows(umbrella: GridUmbrella, key: string | null): number[] {
  if (key === null) {
    return [];
  }
  const out: number[] = [];
  umbrella.rows.forEach((row, index) => {
    if (row.cells.some((cell) => cell.key === key)) {
      out.push(index);
    }
  });
  return out;
}

// Button visibility is a pure function of the payload flags.
export function showsExtendButton(column: GridColumn): boolean {
  return column.canExtend;
}

export function showsExplodeButton(column: GridColumn): boolean {
  return column.explodable;
}

export function showsCollapseButton(column: GridColumn): boolean {
  return column.exploded;
}

/** Collapse targets the node the column group was split from. */
export function collapseTarget(column: GridColumn): string | null {
  return column.explodedFrom;
}

/** Keys of every instance in the column, nil cells skipped. */
export function columnKeys(umbrella: GridUmbrella, columnIndex: number): string[] {
  const out: string[] = [];
  for (const row of umbrella.rows) {
    const cell = row.cells[columnIndex];
    if (cell && cell.key !== null) {
      out.push(cell.key);
    }
  }
  return out;
}

/** True when some instance occurs twice in the column (a repeated example,
 * the visible effect of dropping a uniqueness constraint). */
export function hasRepeatedInstance(umbrella: GridUmbrella, columnIndex: number): boolean {
  const keys = columnKeys(umbrella, columnIndex);
  return new Set(keys).size < keys.length;
}
