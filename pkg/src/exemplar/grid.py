"""Umbrella grids as render-ready documents.

One umbrella (a non-implicit node heading at least one relationship type)
becomes one table: a column per displayed node and a row per pattern row of
each involved relationship type. Nodes showing a multi-component
identification are replaced by one column per component; such columns carry
the node they were split from so a client can offer the collapse action.
Rows are grouped by the root instance's position in the usage-reordered
population, so instances participating in many facts come first.

The JSON form is byte-deterministic for fixed inputs.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Mapping

from .model import NodeId, RoleId, Schema, TypeId, ref_component_count
from .popgen import (
    GenConfig,
    Instance,
    Nil,
    Seq,
    UmbrellaRel,
    ValueProvider,
    component_instances,
    gen_pop,
    gen_value,
    instance_key,
    instance_text,
    umbrella_layout,
)
from .tree import (
    GridTree,
    IdfRoles,
    extension_candidates,
    idf_components,
    implicit_nodes,
    rel_set,
    _ref_scheme_of,
)


@dataclass(frozen=True)
class GridColumn:
    node: NodeId
    type: TypeId
    can_extend: bool
    explodable: bool
    exploded: bool
    exploded_from: NodeId | None = None


@dataclass(frozen=True)
class GridCell:
    text: str | None
    key: str | None


@dataclass(frozen=True)
class GridUmbrella:
    root: NodeId
    columns: tuple[GridColumn, ...]
    rows: tuple[tuple[GridCell, ...], ...]


@dataclass(frozen=True)
class GridDocument:
    umbrellas: tuple[GridUmbrella, ...]

    def to_dict(self) -> dict:
        return {
            "umbrellas": [
                {
                    "root": u.root,
                    "columns": [
                        {
                            "node": c.node,
                            "type": c.type,
                            "canExtend": c.can_extend,
                            "explodable": c.explodable,
                            "exploded": c.exploded,
                            "explodedFrom": c.exploded_from,
                        }
                        for c in u.columns
                    ],
                    "rows": [
                        {"cells": [{"text": c.text, "key": c.key} for c in row]}
                        for row in u.rows
                    ],
                }
                for u in self.umbrellas
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for u in self.umbrellas:
            writer.writerow([c.type for c in u.columns])
            for row in u.rows:
                writer.writerow(["" if c.text is None else c.text for c in row])
        return buf.getvalue()

    def to_table(self) -> str:
        lines: list[str] = []
        for u in self.umbrellas:
            headers = [c.type for c in u.columns]
            body = [["—" if c.text is None else c.text for c in row] for row in u.rows]
            widths = [max(len(h), *(len(r[i]) for r in body), 1) if body else len(h)
                      for i, h in enumerate(headers)]
            lines.append("  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip())
            lines.append("  ".join("-" * w for w in widths))
            for r in body:
                lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
            lines.append("")
        return "\n".join(lines)


def _is_multi_exploded(schema: Schema, tree: GridTree, n: NodeId) -> bool:
    ref = tree.n_ref_sch.get(n)
    return ref is not None and len(idf_components(ref)) >= 2


def _leaf_columns(schema: Schema, tree: GridTree, n: NodeId,
                  exploded_from: NodeId | None = None) -> list[tuple[NodeId, NodeId | None]]:
    """Display leaves for one node: itself, or its identification components
    when it is exploded (recursively). Each leaf remembers the exploded
    ancestor it came from."""
    if not _is_multi_exploded(schema, tree, n):
        return [(n, exploded_from)]
    out: list[tuple[NodeId, NodeId | None]] = []
    for comp in idf_components(tree.n_ref_sch[n]):
        out.extend(_leaf_columns(schema, tree, comp, exploded_from or n))
    return out


def _display_nodes(schema: Schema, tree: GridTree, root: NodeId) -> list[NodeId]:
    """Root plus the explicit members of its umbrella: direct children, with
    implicit children replaced by their own children."""
    implicit = implicit_nodes(tree)
    nodes = [root]
    for _l, m in tree.out_edges(root):
        if m in implicit:
            nodes.extend(m2 for _l2, m2 in tree.out_edges(m))
        else:
            nodes.append(m)
    nodes.sort(key=lambda n: tree.order[n])
    return nodes


def _values_for(schema: Schema, tree: GridTree, provider: ValueProvider,
                node: NodeId, entry: UmbrellaRel, role_of: Mapping[NodeId, RoleId],
                row: Mapping[RoleId, Instance], ordinal: int) -> list[Instance | None]:
    """Cell instances for one display node (one per leaf column)."""
    ref = tree.n_ref_sch.get(node)
    multi = ref is not None and len(idf_components(ref)) >= 2

    if tree.obj[node] == entry.rel and node not in role_of:
        # the relationship type's own column: its r-th row stands for its
        # r-th instance
        if multi and isinstance(ref, IdfRoles):
            out: list[Instance | None] = []
            for p, comp in ref.entries:  # objectified: components are the roles
                out.extend(_spread_instance(schema, tree, comp, row.get(p)))
            return out
        return [gen_value(schema, provider, entry.rel, ordinal)]

    base = row.get(role_of[node]) if node in role_of else None
    return _spread_instance(schema, tree, node, base)


def _spread_instance(schema: Schema, tree: GridTree, node: NodeId,
                     base: Instance | None) -> list[Instance | None]:
    """Distribute one node's instance over its leaf columns."""
    if not _is_multi_exploded(schema, tree, node):
        return [base]
    comps = idf_components(tree.n_ref_sch[node])
    leaves_per_comp = [_spread_instance(schema, tree, c, None) for c in comps]
    width = sum(len(x) for x in leaves_per_comp)
    if base is None:
        return [None] * width
    if isinstance(base, Nil):
        return [base] * width
    if not isinstance(base, Seq):
        return [base] + [None] * (width - 1)
    parts = component_instances(base, len(comps))
    out: list[Instance | None] = []
    for comp, part in zip(comps, parts):
        out.extend(_spread_instance(schema, tree, comp, part))
    return out


def build_grid_document(schema: Schema, tree: GridTree,
                        cfg: GenConfig = GenConfig(),
                        provider: ValueProvider | None = None) -> GridDocument:
    if provider is None:
        provider = ValueProvider.from_schema(schema)
    implicit = implicit_nodes(tree)
    idf_nodes_set = tree.identification_nodes()
    umbrellas: list[GridUmbrella] = []

    roots = [n for n in tree.grid_nodes() if n not in implicit]
    roots.sort(key=lambda n: tree.order[n])
    for root in roots:
        if not rel_set(schema, tree, root):
            continue
        umbrellas.append(_build_umbrella(schema, tree, cfg, provider, root, idf_nodes_set))
    return GridDocument(tuple(umbrellas))


def _build_umbrella(schema: Schema, tree: GridTree, cfg: GenConfig,
                    provider: ValueProvider, root: NodeId,
                    idf_nodes_set: frozenset[NodeId]) -> GridUmbrella:
    pop = gen_pop(schema, tree, root, cfg, provider)
    layout = umbrella_layout(schema, tree, root)
    display = _display_nodes(schema, tree, root)

    columns: list[GridColumn] = []
    for d in display:
        for leaf, origin in _leaf_columns(schema, tree, d):
            t = tree.obj[leaf]
            ref = _ref_scheme_of(schema, t)
            explodable = (ref is not None and ref_component_count(ref) >= 2
                          and leaf not in tree.n_ref_sch)
            columns.append(GridColumn(
                node=leaf,
                type=t,
                can_extend=(leaf not in idf_nodes_set
                            and bool(extension_candidates(schema, tree, leaf))),
                explodable=explodable,
                exploded=origin is not None,
                exploded_from=origin,
            ))

    root_type = tree.obj[root]
    rank: dict[Instance, int] = {}
    for i, inst in enumerate(pop.o_pop.get(root_type, ())):
        rank[inst] = i

    ranked_rows: list[tuple[int, int, tuple[GridCell, ...]]] = []
    seq = 0
    for entry in layout:
        role_of = {}
        for p, n in entry.role_nodes.items():
            role_of.setdefault(n, p)
        for ordinal, row in enumerate(pop.r_pop[entry.rel], start=1):
            cells: list[GridCell] = []
            for d in display:
                for inst in _values_for(schema, tree, provider, d, entry,
                                        role_of, row, ordinal):
                    if inst is None or isinstance(inst, Nil):
                        cells.append(GridCell(None, None))
                    else:
                        cells.append(GridCell(instance_text(inst), instance_key(inst)))
            root_inst = row.get(entry.anchor_role) if entry.anchor_role else None
            row_rank = rank.get(root_inst, len(rank)) if root_inst is not None else len(rank)
            ranked_rows.append((row_rank, seq, tuple(cells)))
            seq += 1
    ranked_rows.sort(key=lambda r: (r[0], r[1]))
    return GridUmbrella(root, tuple(columns), tuple(r[2] for r in ranked_rows))
