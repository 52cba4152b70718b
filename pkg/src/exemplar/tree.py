"""Subschema selection trees.

A tree is five components: a node set, outgoing labelled edges, the object
type per node, a display order, and per-node identification structures that
mirror the schema's reference schemes. Edges are labelled with links: a role
taken forwards (player towards its relationship type) or reversed
(relationship type towards a player). Trees are immutable; every editing
operation returns a new tree that again satisfies all axioms.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .model import (
    NodeId,
    PairSeqRef,
    RefScheme,
    RoleId,
    RoleSeqRef,
    Schema,
    SuperTypeRef,
    TypeId,
    UnknownIdError,
    Violation,
    rel_of,
    ref_component_count,
    type_related,
)


@dataclass(frozen=True)
class Link:
    role: RoleId
    reversed: bool = False

    def __str__(self) -> str:
        return self.role + ("~" if self.reversed else "")


class TreeEditError(ValueError):
    """An edit would break a tree axiom; carries the violation code."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


# identification structure at a node, mirroring the schema-side cases
@dataclass(frozen=True)
class IdfSuper:
    node: NodeId


@dataclass(frozen=True)
class IdfRoles:
    entries: tuple[tuple[RoleId, NodeId], ...]


@dataclass(frozen=True)
class IdfPairs:
    entries: tuple[tuple[RoleId, RoleId, NodeId], ...]


NodeRefScheme = IdfSuper | IdfRoles | IdfPairs


def idf_components(ref: NodeRefScheme) -> tuple[NodeId, ...]:
    if isinstance(ref, IdfSuper):
        return (ref.node,)
    if isinstance(ref, IdfRoles):
        return tuple(n for _r, n in ref.entries)
    return tuple(n for _p, _q, n in ref.entries)


@dataclass(frozen=True)
class GridTree:
    nodes: tuple[NodeId, ...] = ()
    e_out: Mapping[NodeId, tuple[tuple[Link, NodeId], ...]] = field(default_factory=dict)
    obj: Mapping[NodeId, TypeId] = field(default_factory=dict)
    order: Mapping[NodeId, int] = field(default_factory=dict)
    n_ref_sch: Mapping[NodeId, NodeRefScheme] = field(default_factory=dict)
    next_id: int = 0

    def out_edges(self, n: NodeId) -> tuple[tuple[Link, NodeId], ...]:
        return tuple(self.e_out.get(n, ()))

    def in_edges(self, n: NodeId) -> tuple[tuple[Link, NodeId], ...]:
        return tuple((l, m) for m in self.nodes for (l, t) in self.e_out.get(m, ()) if t == n)

    def identification_nodes(self) -> frozenset[NodeId]:
        """Nodes that occur as identification components of some node."""
        out: set[NodeId] = set()
        for ref in self.n_ref_sch.values():
            out.update(idf_components(ref))
        return frozenset(out)

    def grid_nodes(self) -> tuple[NodeId, ...]:
        idf = self.identification_nodes()
        return tuple(n for n in self.nodes if n not in idf)

    def root(self) -> NodeId | None:
        targets = {t for edges in self.e_out.values() for (_l, t) in edges}
        roots = [n for n in self.grid_nodes() if n not in targets]
        return roots[0] if len(roots) == 1 else None


def link_endpoints(schema: Schema, link: Link) -> tuple[TypeId, TypeId]:
    """(start, end) of a link: a forward role runs player -> relationship
    type, a reversed one relationship type -> player."""
    rel = rel_of(schema, link.role)
    player = schema.player[link.role]
    return (rel, player) if link.reversed else (player, rel)


def rel_of_link(schema: Schema, link: Link) -> TypeId:
    return rel_of(schema, link.role)


def _fresh(tree: GridTree) -> tuple[GridTree, NodeId]:
    node = f"n{tree.next_id}"
    return replace(tree, next_id=tree.next_id + 1), node


def _add_node(tree: GridTree, type_id: TypeId) -> tuple[GridTree, NodeId]:
    tree, node = _fresh(tree)
    order = max(tree.order.values(), default=-1) + 1
    return replace(
        tree,
        nodes=tree.nodes + (node,),
        obj={**tree.obj, node: type_id},
        order={**tree.order, node: order},
    ), node


def new_tree(schema: Schema, root_type: TypeId) -> GridTree:
    """A single-node tree, with simple identifications attached."""
    if root_type not in set(schema.types):
        raise UnknownIdError(f"unknown type: {root_type}")
    tree, root = _add_node(GridTree(), root_type)
    return _auto_identify(schema, tree, root)


def _identification_for(schema: Schema, tree: GridTree, node: NodeId,
                        ref: RefScheme) -> GridTree:
    """Install identification component nodes for `node` mirroring `ref`,
    recursing into simple identifications of the fresh components."""
    obj = tree.obj[node]
    if isinstance(ref, SuperTypeRef):
        tree, comp = _add_node(tree, ref.type)
        tree = replace(tree, n_ref_sch={**tree.n_ref_sch, node: IdfSuper(comp)})
        return _auto_identify(schema, tree, comp)
    if isinstance(ref, RoleSeqRef):
        entries = []
        comps = []
        for p in ref.roles:
            tree, comp = _add_node(tree, schema.player[p])
            entries.append((p, comp))
            comps.append(comp)
        tree = replace(tree, n_ref_sch={**tree.n_ref_sch, node: IdfRoles(tuple(entries))})
    else:
        entries = []
        comps = []
        for p, q in ref.pairs:
            tree, comp = _add_node(tree, schema.player[q])
            entries.append((p, q, comp))
            comps.append(comp)
        tree = replace(tree, n_ref_sch={**tree.n_ref_sch, node: IdfPairs(tuple(entries))})
    for comp in comps:
        tree = _auto_identify(schema, tree, comp)
    return tree


def _auto_identify(schema: Schema, tree: GridTree, node: NodeId) -> GridTree:
    """Add the mandatory simple identification at `node` if its type has a
    single-component reference scheme (recursively)."""
    if node in tree.n_ref_sch:
        return tree
    ref = _ref_scheme_of(schema, tree.obj[node])
    if ref is None or ref_component_count(ref) != 1:
        return tree
    return _identification_for(schema, tree, node, ref)


def _ref_scheme_of(schema: Schema, type_id: TypeId) -> RefScheme | None:
    ref = schema.ref_schemes.get(type_id)
    if ref is None and type_id in schema.rel_types:
        roles = schema.roles.get(type_id, ())
        if roles:
            ref = RoleSeqRef(tuple(roles))
    return ref


def validate_tree(schema: Schema, tree: GridTree) -> list[Violation]:
    """All broken tree axioms, in a deterministic order."""
    out: list[Violation] = []
    node_set = set(tree.nodes)
    idf_nodes_set = tree.identification_nodes()
    grid = [n for n in tree.nodes if n not in idf_nodes_set]

    # all used nodes carry an object type
    used = set(tree.e_out.keys())
    for edges in tree.e_out.values():
        used.update(t for (_l, t) in edges)
    used.update(idf_nodes_set)
    used.update(tree.n_ref_sch.keys())
    for n in sorted(used):
        if n not in tree.obj:
            out.append(Violation("MissingObj", f"node {n} has no object type", (n,)))
        if n not in node_set:
            out.append(Violation("MissingObj", f"node {n} used but not declared", (n,)))

    # edges connect source and destination through their link
    incoming: dict[NodeId, list[tuple[Link, NodeId]]] = {}
    for n in tree.nodes:
        seen_links: set[Link] = set()
        for link, m in tree.e_out.get(n, ()):
            if link in seen_links:
                out.append(Violation("LinkReuse",
                                     f"link {link} labels two outgoing edges of {n}", (n, str(link))))
            seen_links.add(link)
            incoming.setdefault(m, []).append((link, n))
            try:
                start, end = link_endpoints(schema, link)
            except UnknownIdError:
                out.append(Violation("UnknownRole", f"edge at {n} uses unknown role {link.role}",
                                     (n, link.role)))
                continue
            if n in tree.obj and not type_related(schema, start, tree.obj[n]):
                out.append(Violation("EdgeWellFormedness",
                                     f"link {link} cannot start at {n} ({tree.obj[n]})",
                                     (n, str(link))))
            if m in tree.obj and tree.obj[m] != end:
                out.append(Violation("EdgeWellFormedness",
                                     f"link {link} must end at {end}, not {tree.obj[m]}",
                                     (m, str(link))))

    # at most one incoming edge; exactly one root
    for n, edges in sorted(incoming.items()):
        if len(edges) > 1:
            out.append(Violation("MultipleIncomingEdges",
                                 f"node {n} has {len(edges)} incoming edges", (n,)))
    roots = [n for n in grid if n not in incoming]
    if len(roots) != 1 and grid:
        out.append(Violation("UniqueRoot",
                             f"expected exactly one root, found {len(roots)}", tuple(roots)))

    # display order is a total order
    by_order: dict[int, NodeId] = {}
    for n in tree.nodes:
        o = tree.order.get(n)
        if o is None:
            out.append(Violation("DuplicateOrder", f"node {n} has no display position", (n,)))
        elif o in by_order:
            out.append(Violation("DuplicateOrder",
                                 f"nodes {by_order[o]} and {n} share display position {o}",
                                 (by_order[o], n)))
        else:
            by_order[o] = n

    # identification structures mirror the schema's reference schemes
    for n in sorted(tree.n_ref_sch):
        out.extend(_check_idf_conformity(schema, tree, n))

    # identification must be acyclic
    out.extend(_check_idf_acyclic(tree))

    # identification nodes stay out of the grid; their roots stay in it
    grid_used = set(tree.e_out.keys()) | set(incoming.keys())
    grid_used = {n for n in grid_used if tree.e_out.get(n) or n in incoming}
    for n in sorted(idf_nodes_set):
        if n in grid_used:
            out.append(Violation("IdentificationGridOverlap",
                                 f"identification node {n} also occurs in the grid", (n,)))
    for n in sorted(tree.n_ref_sch):
        if n not in idf_nodes_set and grid and n not in set(grid):
            out.append(Violation("DanglingIdentificationRoot",
                                 f"identification root {n} is not part of the tree", (n,)))

    # simple identifications are mandatory
    for n in sorted(node_set):
        t = tree.obj.get(n)
        if t is None:
            continue
        ref = _ref_scheme_of(schema, t)
        if ref is not None and ref_component_count(ref) == 1 and n not in tree.n_ref_sch:
            out.append(Violation("MissingSimpleIdentification",
                                 f"node {n} ({t}) lacks its mandatory simple identification", (n, t)))

    return out


def _check_idf_conformity(schema: Schema, tree: GridTree, n: NodeId) -> list[Violation]:
    out: list[Violation] = []
    node_ref = tree.n_ref_sch[n]
    t = tree.obj.get(n)
    if t is None:
        return out
    ref = _ref_scheme_of(schema, t)
    if ref is None:
        out.append(Violation("IdfConformity",
                             f"node {n} has identification but {t} has no reference scheme", (n, t)))
        return out

    def bad(msg: str) -> None:
        out.append(Violation("IdfConformity", f"node {n} ({t}): {msg}", (n, t)))

    if isinstance(node_ref, IdfSuper):
        if not isinstance(ref, SuperTypeRef):
            bad("supertype identification does not match the reference scheme")
        elif tree.obj.get(node_ref.node) != ref.type:
            bad(f"identification node must represent {ref.type}")
    elif isinstance(node_ref, IdfRoles):
        if not isinstance(ref, RoleSeqRef) or tuple(r for r, _n in node_ref.entries) != ref.roles:
            bad("role identification does not match the reference scheme")
        else:
            for r, m in node_ref.entries:
                if tree.obj.get(m) != schema.player[r]:
                    bad(f"component for role {r} must represent {schema.player[r]}")
    else:
        if not isinstance(ref, PairSeqRef) or tuple((p, q) for p, q, _n in node_ref.entries) != ref.pairs:
            bad("pair identification does not match the reference scheme")
        else:
            for _p, q, m in node_ref.entries:
                if tree.obj.get(m) != schema.player[q]:
                    bad(f"component for role {q} must represent {schema.player[q]}")
    return out


def _check_idf_acyclic(tree: GridTree) -> list[Violation]:
    out: list[Violation] = []

    def non_cyclic(x: NodeId, seen: frozenset[NodeId]) -> bool:
        ref = tree.n_ref_sch.get(x)
        if ref is None:
            return True
        comps = idf_components(ref)
        if seen & set(comps):
            return False
        return all(non_cyclic(y, seen | {y}) for y in comps)

    for x in sorted(tree.n_ref_sch):
        if not non_cyclic(x, frozenset({x})):
            out.append(Violation("IdentificationCycle",
                                 f"identification of node {x} is cyclic", (x,)))
    return out


def extension_candidates(schema: Schema, tree: GridTree, n: NodeId) -> set[Link]:
    """Forward roles that could label a fresh outgoing edge at n; the node can
    be extended exactly when this set is nonempty."""
    if n not in set(tree.nodes):
        raise UnknownIdError(f"unknown node: {n}")
    t = tree.obj[n]
    used = {link for (link, _m) in tree.e_out.get(n, ())}
    out: set[Link] = set()
    for role in schema.preds:
        link = Link(role)
        if link in used:
            continue
        if type_related(schema, schema.player[role], t):
            out.add(link)
    return out


def can_extend(schema: Schema, tree: GridTree, n: NodeId) -> bool:
    return bool(extension_candidates(schema, tree, n))


def add_edge(schema: Schema, tree: GridTree, n: NodeId, link: Link) -> GridTree:
    """Attach a fresh node to n through `link`; the new node gets the link's
    end type, the next display position, and its simple identifications."""
    if n not in set(tree.nodes):
        raise UnknownIdError(f"unknown node: {n}")
    start, end = link_endpoints(schema, link)
    if not type_related(schema, start, tree.obj[n]):
        raise TreeEditError("EdgeWellFormedness",
                            f"link {link} cannot start at a {tree.obj[n]} node")
    if any(existing == link for (existing, _m) in tree.e_out.get(n, ())):
        raise TreeEditError("LinkReuse", f"link {link} already labels an outgoing edge of {n}")
    tree, m = _add_node(tree, end)
    tree = replace(tree, e_out={**tree.e_out, n: tree.e_out.get(n, ()) + ((link, m),)})
    return _auto_identify(schema, tree, m)


def implicit_nodes(tree: GridTree) -> frozenset[NodeId]:
    """Nodes that need no column of their own: all incoming links forward,
    all outgoing links reversed, and both edge sets nonempty."""
    out: set[NodeId] = set()
    for n in tree.nodes:
        ins = tree.in_edges(n)
        outs = tree.out_edges(n)
        if not ins or not outs:
            continue
        if any(l.reversed for (l, _m) in ins):
            continue
        if any(not l.reversed for (l, _m) in outs):
            continue
        out.add(n)
    return frozenset(out)


def umbrella(tree: GridTree, n: NodeId) -> tuple[NodeId, ...]:
    """Direct descendants of n, closed over implicit children."""
    implicit = implicit_nodes(tree)
    seen: list[NodeId] = []

    def go(x: NodeId) -> None:
        for _l, m in tree.out_edges(x):
            if m not in seen:
                seen.append(m)
            if m in implicit:
                go(m)

    go(n)
    return tuple(seen)


def rel_set(schema: Schema, tree: GridTree, n: NodeId) -> tuple[TypeId, ...]:
    """Relationship types reachable through n's outgoing links, in edge
    order, without repeats."""
    out: list[TypeId] = []
    for link, _m in tree.out_edges(n):
        rel = rel_of_link(schema, link)
        if rel not in out:
            out.append(rel)
    return tuple(out)


def explode(schema: Schema, tree: GridTree, n: NodeId) -> GridTree:
    """Split n into its identification components."""
    if n not in set(tree.nodes):
        raise UnknownIdError(f"unknown node: {n}")
    if n in tree.n_ref_sch:
        raise TreeEditError("AlreadyExploded", f"node {n} already shows its identification")
    ref = _ref_scheme_of(schema, tree.obj[n])
    if ref is None:
        raise TreeEditError("NotExplodable", f"{tree.obj[n]} has no reference scheme to show")
    if ref_component_count(ref) < 2:
        raise TreeEditError("NotExplodable",
                            f"{tree.obj[n]} has a simple identification; nothing to split")
    return _identification_for(schema, tree, n, ref)


def collapse(schema: Schema, tree: GridTree, n: NodeId) -> GridTree:
    """Hide n's identification subtree again."""
    if n not in set(tree.nodes):
        raise UnknownIdError(f"unknown node: {n}")
    ref = tree.n_ref_sch.get(n)
    if ref is None:
        raise TreeEditError("NotExploded", f"node {n} shows no identification")
    if len(idf_components(ref)) < 2:
        raise TreeEditError("SimpleIdentificationMandatory",
                            f"the simple identification of {n} cannot be hidden")
    doomed: set[NodeId] = set()

    def collect(x: NodeId) -> None:
        r = tree.n_ref_sch.get(x)
        if r is None:
            return
        for comp in idf_components(r):
            doomed.add(comp)
            collect(comp)

    collect(n)
    return replace(
        tree,
        nodes=tuple(x for x in tree.nodes if x not in doomed),
        obj={k: v for k, v in tree.obj.items() if k not in doomed},
        order={k: v for k, v in tree.order.items() if k not in doomed},
        n_ref_sch={k: v for k, v in tree.n_ref_sch.items() if k != n and k not in doomed},
    )


def idf_nodes(tree: GridTree, n: NodeId) -> tuple[NodeId, ...]:
    """Identification component nodes of n, in declaration order."""
    ref = tree.n_ref_sch.get(n)
    if ref is None:
        raise TreeEditError("NotExploded", f"node {n} has no identification structure")
    return idf_components(ref)


def reorder_by_weight(tree: GridTree, weights: Mapping[TypeId, int]) -> GridTree:
    """Reassign display positions so heavier types come later; equal weights
    keep their previous relative order."""
    for n in tree.nodes:
        if tree.obj[n] not in weights:
            raise UnknownIdError(f"no weight for type: {tree.obj[n]}")
    ranked = sorted(tree.nodes, key=lambda n: (weights[tree.obj[n]], tree.order[n]))
    return replace(tree, order={n: i for i, n in enumerate(ranked)})
