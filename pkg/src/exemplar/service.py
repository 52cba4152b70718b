"""HTTP session service for the interactive validation loop.

A session wraps one parsed schema plus any number of selection trees built
against it. Constraint edits are session-local what-ifs: they never touch
the schema text on disk, they just regenerate grids. Mutations are
serialized per session and bump a revision counter; clients may echo the
revision they saw to detect concurrent edits (stale echoes get 409).
Domain rule breaches (say, reusing a link on a node) come back as 422 with
the violation payload.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .dsl import parse_schema, parse_tree_spec, render_schema
from .extnat import ext_json
from .grid import build_grid_document
from .model import Schema, Violation, validate_schema
from .popgen import node_size
from .sizing import GenConfig, plausibility_report
from .tree import (
    GridTree,
    Link,
    TreeEditError,
    add_edge,
    collapse,
    explode,
    extension_candidates,
    implicit_nodes,
    rel_set,
    validate_tree,
)


class SchemaCreate(BaseModel):
    text: str


class TreeCreate(BaseModel):
    text: str
    revision: int | None = None


class EdgeCreate(BaseModel):
    link: str
    revision: int | None = None


class RevisionEcho(BaseModel):
    revision: int | None = None


class ConstraintEdit(BaseModel):
    op: str  # add | remove
    kind: str  # unique | total
    roles: list[str]


class ConstraintPatch(BaseModel):
    edits: list[ConstraintEdit]
    revision: int | None = None


@dataclass
class Session:
    id: str
    schema: Schema
    trees: dict[str, GridTree] = field(default_factory=dict)
    cfg: GenConfig = field(default_factory=GenConfig)
    revision: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass
class Registry:
    sessions: dict[str, Session] = field(default_factory=dict)
    tree_owner: dict[str, str] = field(default_factory=dict)
    _session_ids: "itertools.count[int]" = field(default_factory=lambda: itertools.count(1))
    _tree_ids: "itertools.count[int]" = field(default_factory=lambda: itertools.count(1))

    def new_session(self, schema: Schema) -> Session:
        session = Session(id=f"s{next(self._session_ids)}", schema=schema)
        self.sessions[session.id] = session
        return session

    def new_tree_id(self) -> str:
        return f"t{next(self._tree_ids)}"


def _violations_response(violations: list[Violation]) -> JSONResponse:
    return JSONResponse(status_code=422, content={
        "violations": [
            {"code": v.code, "message": v.message, "subjects": list(v.subjects)}
            for v in violations
        ]
    })


def _diagnostics_payload(diagnostics) -> list[dict]:
    return [
        {"severity": d.severity, "line": d.line, "column": d.column,
         "code": d.code, "message": d.message}
        for d in diagnostics
    ]


def create_app(ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="exemplar", version="0.1.0")
    registry = Registry()

    def session_of(schema_id: str) -> Session:
        session = registry.sessions.get(schema_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown schema {schema_id}")
        return session

    def session_of_tree(tree_id: str) -> Session:
        owner = registry.tree_owner.get(tree_id)
        if owner is None:
            raise HTTPException(status_code=404, detail=f"unknown tree {tree_id}")
        return registry.sessions[owner]

    def check_revision(session: Session, echoed: int | None) -> JSONResponse | None:
        if echoed is not None and echoed != session.revision:
            return JSONResponse(status_code=409, content={
                "error": "stale revision", "revision": session.revision})
        return None

    @app.post("/api/schemas", status_code=201)
    def create_schema(body: SchemaCreate):
        result = parse_schema(body.text)
        if not result.ok:
            return JSONResponse(status_code=422, content={
                "diagnostics": _diagnostics_payload(result.diagnostics)})
        session = registry.new_session(result.schema)
        return {"schemaId": session.id, "revision": session.revision,
                "diagnostics": _diagnostics_payload(result.diagnostics)}

    @app.get("/api/schemas/{schema_id}")
    def get_schema(schema_id: str):
        session = session_of(schema_id)
        return {"schemaId": session.id, "revision": session.revision,
                "text": render_schema(session.schema),
                "trees": sorted(session.trees)}

    @app.patch("/api/schemas/{schema_id}/constraints")
    def patch_constraints(schema_id: str, body: ConstraintPatch):
        session = session_of(schema_id)
        with session.lock:
            stale = check_revision(session, body.revision)
            if stale is not None:
                return stale
            schema = session.schema
            for edit in body.edits:
                outcome = _apply_edit(schema, edit)
                if isinstance(outcome, Violation):
                    return _violations_response([outcome])
                schema = outcome
            broken = validate_schema(schema)
            if broken:
                return _violations_response(broken)
            session.schema = schema
            session.revision += 1
            return {"schemaId": session.id, "revision": session.revision}

    @app.get("/api/schemas/{schema_id}/plausibility")
    def get_plausibility(schema_id: str,
                         accounting: str = Query(default="strict")):
        session = session_of(schema_id)
        try:
            cfg = GenConfig(accounting=accounting)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        report = plausibility_report(session.schema, cfg)
        return {
            "types": [
                {"type": e.type, "initial": ext_json(e.initial),
                 "final": ext_json(e.final), "verdict": e.verdict}
                for e in report.entries
            ],
            "suspects": list(report.suspects),
        }

    @app.post("/api/schemas/{schema_id}/trees", status_code=201)
    def create_tree(schema_id: str, body: TreeCreate):
        session = session_of(schema_id)
        with session.lock:
            stale = check_revision(session, body.revision)
            if stale is not None:
                return stale
            result = parse_tree_spec(body.text, session.schema)
            if not result.ok or result.tree is None:
                return JSONResponse(status_code=422, content={
                    "diagnostics": _diagnostics_payload(result.diagnostics)})
            tree_id = registry.new_tree_id()
            session.trees[tree_id] = result.tree
            registry.tree_owner[tree_id] = session.id
            session.revision += 1
            return {"treeId": tree_id, "revision": session.revision,
                    "labels": result.labels,
                    "diagnostics": _diagnostics_payload(result.diagnostics)}

    @app.get("/api/trees/{tree_id}")
    def get_tree(tree_id: str):
        session = session_of_tree(tree_id)
        tree = session.trees[tree_id]
        return _tree_payload(session, tree_id, tree)

    def _tree_payload(session: Session, tree_id: str, tree: GridTree) -> dict:
        implicit = implicit_nodes(tree)
        idf = tree.identification_nodes()
        nodes = []
        for n in tree.nodes:
            nodes.append({
                "id": n,
                "type": tree.obj[n],
                "order": tree.order[n],
                "implicit": n in implicit,
                "identification": n in idf,
                "canExtend": n not in idf and bool(extension_candidates(session.schema, tree, n)),
                "exploded": n in tree.n_ref_sch,
            })
        edges = [{"from": n, "link": str(l), "to": m}
                 for n in tree.nodes for (l, m) in tree.out_edges(n)]
        return {"treeId": tree_id, "schemaId": session.id,
                "revision": session.revision, "nodes": nodes, "edges": edges}

    def _mutate_tree(tree_id: str, revision: int | None, action):
        session = session_of_tree(tree_id)
        with session.lock:
            stale = check_revision(session, revision)
            if stale is not None:
                return stale
            tree = session.trees[tree_id]
            try:
                new_tree = action(session.schema, tree)
            except TreeEditError as exc:
                return _violations_response([Violation(exc.code, exc.message)])
            except LookupError as exc:
                raise HTTPException(status_code=404, detail=str(exc))
            broken = validate_tree(session.schema, new_tree)
            if broken:
                return _violations_response(broken)
            session.trees[tree_id] = new_tree
            session.revision += 1
            return session, new_tree

    @app.post("/api/trees/{tree_id}/nodes/{node_id}/edges")
    def post_edge(tree_id: str, node_id: str, body: EdgeCreate):
        link_text = body.link.strip()
        link = Link(link_text.rstrip("~"), reversed=link_text.endswith("~"))

        outcome = _mutate_tree(tree_id, body.revision,
                               lambda schema, tree: add_edge(schema, tree, node_id, link))
        if isinstance(outcome, JSONResponse):
            return outcome
        session, tree = outcome
        new_node = next(m for (l, m) in tree.out_edges(node_id) if l == link)
        return {"treeId": tree_id, "revision": session.revision, "node": new_node}

    @app.post("/api/trees/{tree_id}/nodes/{node_id}/explode")
    def post_explode(tree_id: str, node_id: str, body: RevisionEcho | None = None):
        revision = body.revision if body else None
        outcome = _mutate_tree(tree_id, revision,
                               lambda schema, tree: explode(schema, tree, node_id))
        if isinstance(outcome, JSONResponse):
            return outcome
        session, _tree = outcome
        return {"treeId": tree_id, "revision": session.revision}

    @app.post("/api/trees/{tree_id}/nodes/{node_id}/collapse")
    def post_collapse(tree_id: str, node_id: str, body: RevisionEcho | None = None):
        revision = body.revision if body else None
        outcome = _mutate_tree(tree_id, revision,
                               lambda schema, tree: collapse(schema, tree, node_id))
        if isinstance(outcome, JSONResponse):
            return outcome
        session, _tree = outcome
        return {"treeId": tree_id, "revision": session.revision}

    @app.get("/api/trees/{tree_id}/grid")
    def get_grid(tree_id: str,
                 maxRows: int = Query(default=10, ge=1),
                 accounting: str = Query(default="strict")):
        session = session_of_tree(tree_id)
        try:
            cfg = GenConfig(accounting=accounting, max_user_size_pref=maxRows)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        tree = session.trees[tree_id]
        doc = build_grid_document(session.schema, tree, cfg)
        return JSONResponse(content=doc.to_dict())

    @app.get("/api/trees/{tree_id}/nodes/{node_id}/extension-candidates")
    def get_candidates(tree_id: str, node_id: str):
        session = session_of_tree(tree_id)
        tree = session.trees[tree_id]
        if node_id not in set(tree.nodes):
            raise HTTPException(status_code=404, detail=f"unknown node {node_id}")
        candidates = sorted(str(l) for l in extension_candidates(session.schema, tree, node_id))
        return {"treeId": tree_id, "node": node_id, "candidates": candidates,
                "canExtend": bool(candidates)}

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _apply_edit(schema: Schema, edit: ConstraintEdit) -> "Schema | Violation":
    roles = frozenset(edit.roles)
    if edit.op not in ("add", "remove"):
        return Violation("InvalidEdit", f"unknown op {edit.op!r}")
    if edit.kind not in ("unique", "total"):
        return Violation("InvalidEdit", f"unknown constraint kind {edit.kind!r}")
    if not roles:
        return Violation("InvalidEdit", "a constraint edit needs at least one role")
    for r in sorted(roles):
        if r not in schema.player:
            return Violation("UnknownRole", f"unknown role {r}")
    from dataclasses import replace

    if edit.kind == "unique":
        current = schema.uniqueness
        if edit.op == "add":
            if roles in current:
                return Violation("InvalidEdit", "that uniqueness constraint already exists")
            return replace(schema, uniqueness=current + (roles,))
        if roles not in current:
            return Violation("InvalidEdit", "no such uniqueness constraint")
        return replace(schema, uniqueness=tuple(u for u in current if u != roles))
    current = schema.totality
    if edit.op == "add":
        if roles in current:
            return Violation("InvalidEdit", "that totality constraint already exists")
        return replace(schema, totality=current + (roles,))
    if roles not in current:
        return Violation("InvalidEdit", "no such totality constraint")
    return replace(schema, totality=tuple(s for s in current if s != roles))
