// Wire types mirroring the service's JSON responses.

export interface GridCell {
  text: string | null;
  key: string | null;
}

export interface GridColumn {
  node: string;
  type: string;
  canExtend: boolean;
  explodable: boolean;
  exploded: boolean;
  explodedFrom: string | null;
}

export interface GridRow {
  cells: GridCell[];
}

export interface GridUmbrella {
  root: string;
  columns: GridColumn[];
  rows: GridRow[];
}

export interface GridDocument {
  umbrellas: GridUmbrella[];
}

export interface Diagnostic {
  severity: string;
  line: number;
  column: number;
  code: string;
  message: string;
}

export interface SchemaCreated {
  schemaId: string;
  revision: number;
  diagnostics: Diagnostic[];
}

export interface TreeCreated {
  treeId: string;
  revision: number;
  labels: Record<string, string>;
  diagnostics: Diagnostic[];
}

export interface CandidateList {
  treeId: string;
  node: string;
  candidates: string[];
  canExtend: boolean;
}

export interface Violation {
  code: string;
  message: string;
  subjects: string[];
}

export interface ConstraintEdit {
  op: "add" | "remove";
  kind: "unique" | "total";
  roles: string[];
}
