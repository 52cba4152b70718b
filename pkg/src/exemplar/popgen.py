"""Deterministic example instances and umbrella populations.

Instances are nested identification values: a nil, an atom (a value-type
example or a surrogate like ``LineInfo1``), or a sequence composed from the
identifying instances. A single index drives the whole construction, and an
even/odd permutation spreads consecutive indices across each value domain so
small populations show instances from both ends of the example lists.

An umbrella (a non-implicit node with its descendants, closed over implicit
ones) is populated by generating the significant pattern of every involved
relationship type, then mapping the index rows to instances at the nodes
that play the roles. The root node's instances are finally reordered by how
many rows use them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .extnat import INF, ExtNat, ext_min
from .model import (
    MissingDomSizeError,
    NodeId,
    RoleId,
    Schema,
    TypeId,
    UndefinedIdentificationError,
    idf_objs,
    recursive_max_size,
    ref_component_count,
)
from .sizing import GenConfig, gen_pattern
from .tree import GridTree, idf_components, rel_of_link, rel_set


class IndexRangeError(ValueError):
    """An instance index fell outside the population bound."""


# --- instances ---------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Nil:
    def __repr__(self) -> str:
        return "Nil"


NIL = Nil()


@dataclass(frozen=True, slots=True)
class Atom:
    text: str
    type: TypeId
    index: int


@dataclass(frozen=True, slots=True)
class Seq:
    children: tuple["Instance", ...]
    type: TypeId | None = None  # tagged on whole-node instances only
    index: int | None = None


Instance = Nil | Atom | Seq


def instance_key(inst: Instance) -> str | None:
    """Stable identity for linking equal instances across cells; nil has none."""
    if isinstance(inst, Atom):
        return f"{inst.type}#{inst.index}"
    if isinstance(inst, Seq) and inst.type is not None:
        return f"{inst.type}#{inst.index}"
    return None


def instance_text(inst: Instance) -> str | None:
    """Flatten to display text: atoms joined in identification order."""
    if isinstance(inst, Nil):
        return None
    atoms: list[str] = []

    def walk(x: Instance) -> None:
        if isinstance(x, Atom):
            atoms.append(x.text)
        elif isinstance(x, Seq):
            for c in x.children:
                walk(c)

    walk(inst)
    return ", ".join(atoms)


def component_instances(inst: Seq, count: int) -> list[Instance]:
    """Undo the pairwise nesting of a composed instance: one instance per
    identification component."""
    if count == 1:
        return [inst.children[0]]
    head = inst.children[0]
    tail = inst.children[1]
    assert isinstance(head, Seq) and isinstance(tail, Seq)
    return [head.children[0]] + component_instances(tail, count - 1)


# --- value synthesis ---------------------------------------------------------

@dataclass(frozen=True)
class ValueProvider:
    """Example texts per value type; anything missing falls back to the
    surrogate TypeName+index."""

    examples: Mapping[TypeId, tuple[str, ...]] = field(default_factory=dict)

    @classmethod
    def from_schema(cls, schema: Schema) -> "ValueProvider":
        return cls(dict(schema.value_examples))

    def examples_for(self, t: TypeId) -> tuple[str, ...]:
        return tuple(self.examples.get(t, ()))


def gamma(m: int, product: int) -> int:
    """Even/odd spread: evens walk up from 0, odds walk down from the top.
    A bijection on 0..product-1."""
    if not 0 <= m < product:
        raise IndexRangeError(f"index {m} outside 0..{product - 1}")
    if m % 2 == 0:
        return m // 2
    return product - (m + 1) // 2


def gen_value(schema: Schema, provider: ValueProvider, x: TypeId, n: int) -> Atom:
    """The n-th raw instance of a type: a declared example while they last,
    otherwise the surrogate TypeName+n."""
    if n < 1:
        raise IndexRangeError(f"instance index must be positive, got {n}")
    if x in schema.value_types:
        examples = provider.examples.get(x)
        if examples is not None and n <= len(examples):
            return Atom(examples[n - 1], x, n)
    return Atom(f"{x}{n}", x, n)


# --- node-level instance construction ----------------------------------------

@dataclass
class PopulationContext:
    schema: Schema
    tree: GridTree
    provider: ValueProvider
    _bounds: dict[TypeId, int] = field(default_factory=dict)

    def bound(self, t: TypeId) -> int:
        if t not in self._bounds:
            self._bounds[t] = recursive_max_size(self.schema, t)
        return self._bounds[t]


def get_inst(ctx: PopulationContext, node: NodeId, n: int) -> Instance:
    """The n-th instance shown at a tree node: nil for 0, the composed
    identification when the node has one, a raw instance otherwise."""
    if n == 0:
        return NIL
    t = ctx.tree.obj[node]
    bounds = ctx._bounds
    bound = bounds.get(t)
    if bound is None:
        bound = ctx.bound(t)
    if n < 0 or n > bound:
        raise IndexRangeError(f"index {n} outside the population bound of {t}")
    ref = ctx.tree.n_ref_sch.get(node)
    if ref is not None:
        inner = compose(ctx, idf_components(ref), n - 1)
        return Seq(inner.children, type=t, index=n)
    return gen_value(ctx.schema, ctx.provider, t, n)


def compose(ctx: PopulationContext, comps: tuple[NodeId, ...], m: int) -> Seq:
    """Mixed-radix split of one index over identification components, with
    the spread applied per level: the first component takes the index modulo
    its bound, the remaining ones share the quotient, and the pair nesting
    recurses to the right."""
    sizes = [ctx.bound(ctx.tree.obj[c]) for c in comps]
    products = list(sizes)
    for i in range(len(sizes) - 2, -1, -1):
        products[i] = sizes[i] * products[i + 1]
    indices: list[int] = []
    last = len(comps) - 1
    for i in range(last):
        product = products[i]
        if not 0 <= m < product:
            raise IndexRangeError(f"composition index {m} outside 0..{product - 1}")
        g = gamma(m, product)
        indices.append(gamma(g % sizes[i], sizes[i]) + 1)
        m = g // sizes[i]
    if not 0 <= m < products[last]:
        raise IndexRangeError(f"composition index {m} outside 0..{products[last] - 1}")
    node = Seq((get_inst(ctx, comps[last], gamma(m, products[last]) + 1),))
    for i in range(last - 1, -1, -1):
        node = Seq((Seq((get_inst(ctx, comps[i], indices[i]),)), node))
    return node


def type_inst(schema: Schema, provider: ValueProvider, t: TypeId, n: int) -> Instance:
    """Type-level twin of get_inst for roles without a node in the umbrella:
    behaves exactly as a freshly added node would (simple identifications
    composed, everything else a raw instance)."""
    if n == 0:
        return NIL
    bound = recursive_max_size(schema, t)
    if n < 0 or n > bound:
        raise IndexRangeError(f"index {n} outside the population bound of {t}")
    ref = schema.ref_schemes.get(t)
    if ref is not None and ref_component_count(ref) == 1:
        inner = _compose_types(schema, provider, idf_objs(schema, t), n - 1)
        return Seq(inner.children, type=t, index=n)
    return gen_value(schema, provider, t, n)


def _compose_types(schema: Schema, provider: ValueProvider,
                   comps: tuple[TypeId, ...], m: int) -> Seq:
    sizes = [recursive_max_size(schema, c) for c in comps]
    product = 1
    for s in sizes:
        product *= s
    if not 0 <= m < product:
        raise IndexRangeError(f"composition index {m} outside 0..{product - 1}")
    if len(comps) == 1:
        return Seq((type_inst(schema, provider, comps[0], gamma(m, product) + 1),))
    g = gamma(m, product)
    head = Seq((type_inst(schema, provider, comps[0], gamma(g % sizes[0], sizes[0]) + 1),))
    tail = _compose_types(schema, provider, comps[1:], g // sizes[0])
    return Seq((head, tail))


# --- umbrella negotiation ----------------------------------------------------

def _bound_or_inf(schema: Schema, t: TypeId) -> ExtNat:
    try:
        return recursive_max_size(schema, t)
    except (MissingDomSizeError, UndefinedIdentificationError):
        return INF


def _pattern_sizes(schema: Schema, rel: TypeId) -> dict[TypeId, ExtNat]:
    sizes: dict[TypeId, ExtNat] = {}
    for p in schema.roles[rel]:
        sizes[schema.player[p]] = _bound_or_inf(schema, schema.player[p])
    sizes[rel] = _bound_or_inf(schema, rel)
    return sizes


def usage(schema: Schema, tree: GridTree, rel: TypeId, node: NodeId,
          cfg: GenConfig = GenConfig()) -> ExtNat:
    """How many instances of the node's type one relationship's significant
    pattern consumes, measured against the context-free bounds."""
    sizes = _pattern_sizes(schema, rel)
    if not any(isinstance(v, int) for v in sizes.values()):
        return INF
    used, _rows = gen_pattern(schema, rel, sizes, cfg)
    t = tree.obj[node]
    if t in used:
        return used[t]
    linked = [used[schema.player[l.role]]
              for (l, _m) in tree.out_edges(node)
              if rel_of_link(schema, l) == rel and schema.player[l.role] in used]
    if linked:
        return min(linked)
    return INF


def node_size(schema: Schema, tree: GridTree, node: NodeId,
              cfg: GenConfig = GenConfig()) -> int:
    """Negotiated instance count for an umbrella root: the user's preferred
    maximum, further capped by every involved relationship's usage. Zero when
    the node heads no relationships (its umbrella is skipped)."""
    rels = rel_set(schema, tree, node)
    if not rels:
        return 0
    result: ExtNat = cfg.max_user_size_pref
    for rel in rels:
        result = ext_min(result, usage(schema, tree, rel, node, cfg))
    assert isinstance(result, int)
    return result


# --- umbrella layout ---------------------------------------------------------

@dataclass(frozen=True)
class UmbrellaRel:
    """One relationship type inside an umbrella: the role the root plays (if
    it reaches the relationship through a forward link), the node standing
    for the relationship type, and the node showing each covered role."""

    rel: TypeId
    anchor_role: RoleId | None
    rel_node: NodeId | None
    role_nodes: Mapping[RoleId, NodeId]


def umbrella_layout(schema: Schema, tree: GridTree, root: NodeId) -> tuple[UmbrellaRel, ...]:
    order: list[TypeId] = []
    anchors: dict[TypeId, RoleId | None] = {}
    rel_nodes: dict[TypeId, NodeId | None] = {}
    role_nodes: dict[TypeId, dict[RoleId, NodeId]] = {}
    for link, m in tree.out_edges(root):
        rel = rel_of_link(schema, link)
        if rel not in order:
            order.append(rel)
            anchors[rel] = None
            rel_nodes[rel] = None
            role_nodes[rel] = {}
        if link.reversed:
            # the root itself stands for the relationship type
            rel_nodes[rel] = rel_nodes[rel] or root
            role_nodes[rel].setdefault(link.role, m)
        else:
            if anchors[rel] is None:
                anchors[rel] = link.role
            role_nodes[rel].setdefault(link.role, root)
            rel_nodes[rel] = rel_nodes[rel] or m
            for l2, m2 in tree.out_edges(m):
                if l2.reversed and rel_of_link(schema, l2) == rel:
                    role_nodes[rel].setdefault(l2.role, m2)
    return tuple(UmbrellaRel(rel, anchors[rel], rel_nodes[rel], role_nodes[rel])
                 for rel in order)


# --- population --------------------------------------------------------------

@dataclass(frozen=True)
class GridPopulation:
    r_pop: Mapping[TypeId, tuple[Mapping[RoleId, Instance], ...]]
    o_pop: Mapping[TypeId, tuple[Instance, ...]]


def gen_pop(schema: Schema, tree: GridTree, root: NodeId,
            cfg: GenConfig = GenConfig(),
            provider: ValueProvider | None = None) -> GridPopulation:
    """Populate the umbrella rooted at `root`: per relationship type the
    pattern rows mapped to instances, plus per object type the distinct
    instances in first-use order, the root's type reordered by usage."""
    if provider is None:
        provider = ValueProvider.from_schema(schema)
    ctx = PopulationContext(schema, tree, provider)
    layout = umbrella_layout(schema, tree, root)
    size_cap = node_size(schema, tree, root, cfg)
    root_type = tree.obj[root]

    r_pop: dict[TypeId, tuple[dict[RoleId, Instance], ...]] = {}
    o_pop: dict[TypeId, list[Instance]] = {}

    for entry in layout:
        sizes = _pattern_sizes(schema, entry.rel)
        if root_type in sizes:
            sizes[root_type] = ext_min(size_cap, sizes[root_type])
        used, rows = gen_pattern(schema, entry.rel, sizes, cfg)
        inst_rows: list[dict[RoleId, Instance]] = []
        for row in rows:
            inst_row: dict[RoleId, Instance] = {}
            for p in schema.roles[entry.rel]:
                inst_row[p] = _cell_instance(ctx, entry, p, row[p])
            inst_rows.append(inst_row)
            for p in schema.roles[entry.rel]:
                inst = inst_row[p]
                if isinstance(inst, Nil):
                    continue
                bucket = o_pop.setdefault(schema.player[p], [])
                if inst not in bucket:
                    bucket.append(inst)
        r_pop[entry.rel] = tuple(inst_rows)

    frozen_o_pop = {t: tuple(v) for t, v in o_pop.items()}
    if root_type in frozen_o_pop:
        frozen_o_pop[root_type] = reorder(schema, r_pop, frozen_o_pop, root_type)
    return GridPopulation(r_pop, frozen_o_pop)


def _cell_instance(ctx: PopulationContext, entry: UmbrellaRel,
                   role: RoleId, index: int) -> Instance:
    player = ctx.schema.player[role]
    node = entry.role_nodes.get(role)
    if node is not None and ctx.tree.obj[node] == player:
        return get_inst(ctx, node, index)
    return type_inst(ctx.schema, ctx.provider, player, index)


def tuples_using(schema: Schema,
                 r_pop: Mapping[TypeId, tuple[Mapping[RoleId, Instance], ...]],
                 value: Instance, x: TypeId) -> int:
    """How many rows use `value` through some role played by x."""
    count = 0
    for rel, rows in r_pop.items():
        relevant = [p for p in schema.roles.get(rel, ()) if schema.player[p] == x]
        if not relevant:
            continue
        for row in rows:
            if any(row.get(p) == value for p in relevant):
                count += 1
    return count


def reorder(schema: Schema,
            r_pop: Mapping[TypeId, tuple[Mapping[RoleId, Instance], ...]],
            o_pop: Mapping[TypeId, tuple[Instance, ...]],
            x: TypeId) -> tuple[Instance, ...]:
    """Sort x's instances by descending row usage; ties keep their previous
    relative order."""
    current = o_pop[x]
    return tuple(sorted(current, key=lambda v: -tuples_using(schema, r_pop, v, x)))
