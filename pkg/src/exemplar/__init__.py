"""Example-population toolkit for fact-based conceptual schemas: parse a
schema, check its cardinality constraints for plausibility, select a
subschema as a tree, and fill example grids with significant populations."""

from .extnat import INF, ExtNat, ext_add, ext_less, ext_min, ext_mul
from .model import (
    PairSeqRef,
    RefScheme,
    RoleSeqRef,
    Schema,
    SuperTypeRef,
    Violation,
    idf_objs,
    initial_max_size,
    recursive_max_size,
    rel_of,
    type_related,
    validate_schema,
)
from .dsl import ParseDiagnostic, parse_schema, parse_tree_spec, render_schema
from .tree import (
    GridTree,
    Link,
    TreeEditError,
    add_edge,
    can_extend,
    collapse,
    explode,
    extension_candidates,
    idf_nodes,
    implicit_nodes,
    link_endpoints,
    new_tree,
    rel_set,
    reorder_by_weight,
    umbrella,
    validate_tree,
)
from .sizing import (
    GenConfig,
    NonTerminatingCallError,
    PatternResult,
    PlausibilityReport,
    calc_sizes,
    gen_pattern,
    plausibility_report,
    resize,
)
from .popgen import (
    Atom,
    GridPopulation,
    IndexRangeError,
    Instance,
    NIL,
    Nil,
    Seq,
    ValueProvider,
    compose,
    gamma,
    gen_pop,
    gen_value,
    get_inst,
    node_size,
    reorder,
    usage,
)
from .grid import GridDocument, build_grid_document

__all__ = [name for name in dir() if not name.startswith("_")]
